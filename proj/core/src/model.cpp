#include "hyperver/model.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace hyperver {

namespace {

std::string with_line(const std::string& what, std::size_t line) {
    if (line == 0) return what;
    return "line " + std::to_string(line) + ": " + what;
}

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_words(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
        std::size_t j = i;
        while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
        if (j > i) out.push_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

bool valid_identifier(std::string_view s) {
    if (s.empty()) return false;
    return std::all_of(s.begin(), s.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-';
    });
}

std::string format_probability(double p) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), p);
    if (ec != std::errc{}) throw ModelError("cannot format probability");
    return std::string(buf, end);
}

}  // namespace

ModelError::ModelError(const std::string& what, std::size_t line)
    : std::runtime_error(with_line(what, line)), line_(line) {}

Dtmc::Dtmc(std::vector<StateDecl> states, std::vector<std::vector<Transition>> transitions)
    : rows_(std::move(transitions)) {
    if (states.empty()) throw ModelError("model has no states");
    if (rows_.size() != states.size()) throw ModelError("transition table size does not match state count");

    std::set<std::string> atom_set;
    names_.reserve(states.size());
    for (std::size_t i = 0; i < states.size(); ++i) {
        auto& decl = states[i];
        if (!state_index_.emplace(decl.name, static_cast<std::uint32_t>(i)).second)
            throw ModelError("duplicate state '" + decl.name + "'");
        names_.push_back(decl.name);
        atom_set.insert(decl.labels.begin(), decl.labels.end());
    }
    atoms_.assign(atom_set.begin(), atom_set.end());
    for (std::size_t a = 0; a < atoms_.size(); ++a) atom_index_.emplace(atoms_[a], static_cast<AtomId>(a));

    labels_.resize(states.size());
    for (std::size_t i = 0; i < states.size(); ++i) {
        for (const auto& l : states[i].labels) labels_[i].push_back(atom_index_.find(l)->second);
        std::sort(labels_[i].begin(), labels_[i].end());
        labels_[i].erase(std::unique(labels_[i].begin(), labels_[i].end()), labels_[i].end());
    }

    for (std::size_t s = 0; s < rows_.size(); ++s) {
        double sum = 0.0;
        std::set<StateIndex> seen;
        for (const auto& t : rows_[s]) {
            if (t.target >= names_.size())
                throw ModelError("state '" + names_[s] + "' has a dangling successor index " + std::to_string(t.target));
            if (!(t.probability >= 0.0 && t.probability <= 1.0))
                throw ModelError("state '" + names_[s] + "' has a transition probability outside [0,1]");
            if (!seen.insert(t.target).second)
                throw ModelError("state '" + names_[s] + "' declares the transition to '" + names_[t.target] +
                                 "' more than once");
            sum += t.probability;
        }
        if (std::abs(sum - 1.0) > kRowSumTolerance) {
            std::ostringstream msg;
            msg.precision(17);
            msg << "outgoing probabilities of state '" << names_[s] << "' sum to " << sum << ", expected 1";
            throw ModelError(msg.str());
        }
    }
}

std::optional<StateIndex> Dtmc::find(std::string_view name) const {
    auto it = state_index_.find(name);
    if (it == state_index_.end()) return std::nullopt;
    return it->second;
}

StateIndex Dtmc::index_of(std::string_view name) const {
    if (auto s = find(name)) return *s;
    throw ModelError("unknown state '" + std::string(name) + "'");
}

double Dtmc::probability(StateIndex from, StateIndex to) const {
    for (const auto& t : rows_.at(from))
        if (t.target == to) return t.probability;
    return 0.0;
}

std::optional<AtomId> Dtmc::atom_id(std::string_view atom) const {
    auto it = atom_index_.find(atom);
    if (it == atom_index_.end()) return std::nullopt;
    return it->second;
}

bool Dtmc::has_label(StateIndex s, AtomId atom) const {
    const auto& l = labels_.at(s);
    return std::binary_search(l.begin(), l.end(), atom);
}

bool Dtmc::has_label(StateIndex s, std::string_view atom) const {
    auto id = atom_id(atom);
    return id && has_label(s, *id);
}

std::vector<std::string> Dtmc::labels(StateIndex s) const {
    std::vector<std::string> out;
    for (auto id : labels_.at(s)) out.push_back(atoms_[id]);
    return out;
}

bool operator==(const Dtmc& lhs, const Dtmc& rhs) {
    if (lhs.names_ != rhs.names_ || lhs.atoms_ != rhs.atoms_ || lhs.labels_ != rhs.labels_) return false;
    for (std::size_t s = 0; s < lhs.rows_.size(); ++s) {
        std::multiset<std::pair<StateIndex, double>> a, b;
        for (const auto& t : lhs.rows_[s]) a.emplace(t.target, t.probability);
        for (const auto& t : rhs.rows_[s]) b.emplace(t.target, t.probability);
        if (a != b) return false;
    }
    return true;
}

Dtmc parse_model(std::string_view text) {
    struct PendingTransition {
        std::string source, target;
        double probability;
        std::size_t line;
    };

    std::vector<StateDecl> states;
    std::map<std::string, std::size_t, std::less<>> declared_at;
    std::vector<PendingTransition> pending;
    bool saw_declaration = false;

    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        std::string_view line = text.substr(pos, eol - pos);
        pos = eol + 1;
        ++line_no;

        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);

        std::size_t start = 0;
        while (start <= line.size()) {
            auto semi = line.find(';', start);
            if (semi == std::string_view::npos) semi = line.size();
            std::string_view decl = trim(line.substr(start, semi - start));
            start = semi + 1;
            if (decl.empty()) continue;

            auto words = split_words(decl);
            const auto keyword = words.front();
            if (keyword == "dtmc") {
                if (words.size() != 1) throw ModelError("unexpected tokens after 'dtmc'", line_no);
                if (saw_declaration) throw ModelError("'dtmc' header must come first", line_no);
                saw_declaration = true;
            } else if (keyword == "state") {
                saw_declaration = true;
                auto colon = decl.find("labels:");
                if (words.size() < 3 || colon == std::string_view::npos)
                    throw ModelError("expected 'state <name> labels: <a1,a2,...>'", line_no);
                std::string name(words[1]);
                if (!valid_identifier(name)) throw ModelError("invalid state name '" + name + "'", line_no);
                if (trim(decl.substr(5, colon - 5)) != words[1])
                    throw ModelError("expected 'labels:' after the state name", line_no);
                if (declared_at.count(name))
                    throw ModelError("duplicate state '" + name + "' (first declared on line " +
                                         std::to_string(declared_at.find(name)->second) + ")",
                                     line_no);
                declared_at.emplace(name, line_no);
                StateDecl sd{name, {}};
                std::string_view rest = trim(decl.substr(colon + 7));
                std::size_t lp = 0;
                while (!rest.empty() && lp <= rest.size()) {
                    auto comma = rest.find(',', lp);
                    if (comma == std::string_view::npos) comma = rest.size();
                    auto atom = trim(rest.substr(lp, comma - lp));
                    lp = comma + 1;
                    if (!valid_identifier(atom)) throw ModelError("invalid label '" + std::string(atom) + "'", line_no);
                    sd.labels.emplace_back(atom);
                }
                states.push_back(std::move(sd));
            } else if (keyword == "trans") {
                saw_declaration = true;
                if (words.size() != 4) throw ModelError("expected 'trans <src> <dst> <prob>'", line_no);
                double p = 0.0;
                auto w = words[3];
                auto [end, ec] = std::from_chars(w.data(), w.data() + w.size(), p);
                if (ec != std::errc{} || end != w.data() + w.size() || !std::isfinite(p))
                    throw ModelError("invalid probability literal '" + std::string(w) + "'", line_no);
                if (p < 0.0 || p > 1.0)
                    throw ModelError("probability " + std::string(w) + " outside [0,1]", line_no);
                pending.push_back({std::string(words[1]), std::string(words[2]), p, line_no});
            } else {
                throw ModelError("unknown declaration '" + std::string(keyword) + "'", line_no);
            }
        }
        if (eol == text.size()) break;
    }

    if (states.empty()) throw ModelError("model declares no states");

    std::map<std::string, StateIndex, std::less<>> index;
    for (std::size_t i = 0; i < states.size(); ++i) index.emplace(states[i].name, static_cast<StateIndex>(i));
    std::vector<std::vector<Transition>> rows(states.size());
    for (const auto& t : pending) {
        auto src = index.find(t.source);
        if (src == index.end()) throw ModelError("transition from undeclared state '" + t.source + "'", t.line);
        auto dst = index.find(t.target);
        if (dst == index.end())
            throw ModelError("dangling successor '" + t.target + "' in transition from '" + t.source + "'", t.line);
        for (const auto& existing : rows[src->second])
            if (existing.target == dst->second)
                throw ModelError("duplicate transition " + t.source + " -> " + t.target, t.line);
        rows[src->second].push_back({dst->second, t.probability});
    }
    return Dtmc(std::move(states), std::move(rows));
}

Dtmc read_model(std::istream& in) {
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_model(buffer.str());
}

Dtmc load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ModelError("cannot open model file '" + path + "'");
    return read_model(in);
}

void write_model(std::ostream& out, const Dtmc& model) {
    out << "dtmc\n";
    for (StateIndex s = 0; s < model.size(); ++s) {
        out << "state " << model.name(s) << " labels:";
        const auto labels = model.labels(s);
        for (std::size_t i = 0; i < labels.size(); ++i) out << (i == 0 ? " " : ",") << labels[i];
        out << '\n';
    }
    for (StateIndex s = 0; s < model.size(); ++s)
        for (const auto& t : model.successors(s))
            out << "trans " << model.name(s) << ' ' << model.name(t.target) << ' ' << format_probability(t.probability)
                << '\n';
}

std::string model_to_text(const Dtmc& model) {
    std::ostringstream out;
    write_model(out, model);
    return out.str();
}

}  // namespace hyperver
