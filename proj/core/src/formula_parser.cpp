#include <cctype>
#include <charconv>
#include <limits>

#include "hyperver/formula.hpp"

namespace hyperver {

namespace {

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    Formula parse() {
        Formula f = formula();
        skip_space();
        if (pos_ != text_.size()) fail("unexpected trailing input");
        return f;
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& what) const { throw FormulaError(what, pos_); }
    [[noreturn]] void fail_at(const std::string& what, std::size_t pos) const { throw FormulaError(what, pos); }

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool at_end() {
        skip_space();
        return pos_ >= text_.size();
    }

    char peek() {
        skip_space();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    bool match(std::string_view token) {
        skip_space();
        if (text_.substr(pos_, token.size()) == token) {
            pos_ += token.size();
            return true;
        }
        return false;
    }

    void expect(std::string_view token) {
        if (!match(token)) fail("expected '" + std::string(token) + "'");
    }

    std::string identifier(const char* what) {
        skip_space();
        if (pos_ >= text_.size() || !is_ident_start(text_[pos_])) fail(std::string("expected ") + what);
        const std::size_t start = pos_;
        while (pos_ < text_.size() && is_ident_char(text_[pos_])) ++pos_;
        return std::string(text_.substr(start, pos_ - start));
    }

    unsigned natural() {
        skip_space();
        const std::size_t start = pos_;
        for (std::string_view inf : {"inf", "infinity", "oo", "\xE2\x88\x9E"}) {
            if (text_.substr(pos_, inf.size()) == inf) fail("non-finite until bound; only bounded operators are supported");
        }
        unsigned long long value = 0;
        auto [end, ec] = std::from_chars(text_.data() + pos_, text_.data() + text_.size(), value);
        if (ec == std::errc::result_out_of_range || value > std::numeric_limits<unsigned>::max())
            fail_at("until bound too large", start);
        if (ec != std::errc{}) fail("expected a natural-number time bound");
        pos_ = static_cast<std::size_t>(end - text_.data());
        return static_cast<unsigned>(value);
    }

    double decimal() {
        skip_space();
        const std::size_t start = pos_;
        while (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.' ||
                                       text_[pos_] == 'e' || text_[pos_] == 'E' || text_[pos_] == '-' ||
                                       text_[pos_] == '+'))
            ++pos_;
        double value = 0.0;
        auto [end, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, value);
        if (ec != std::errc{} || end != text_.data() + pos_) fail_at("expected a decimal number", start);
        return value;
    }

    Formula formula() {
        skip_space();
        if (pos_ >= text_.size()) fail("unexpected end of formula");
        const char c = text_[pos_];
        if (c == '!') {
            ++pos_;
            return Formula::negation(formula());
        }
        if (c == '(') return parenthesised();
        if (!is_ident_start(c)) fail(std::string("unexpected character '") + c + "'");

        const std::size_t start = pos_;
        std::string word = identifier("identifier");
        if (peek() == '@') {
            ++pos_;
            return Formula::atom(std::move(word), identifier("path variable after '@'"));
        }
        if (word == "true") return Formula::truth();
        if (word == "X") return Formula::next(formula());
        if ((word == "F" || word == "G") && match("<=")) {
            const unsigned k = natural();
            Formula body = formula();
            return word == "F" ? Formula::eventually(k, std::move(body)) : Formula::always(k, std::move(body));
        }
        if (word == "P" && peek() == '{') return probabilistic(start);
        fail_at("expected '@' after proposition '" + word + "'", start);
    }

    Formula parenthesised() {
        expect("(");
        Formula first = formula();
        if (match(")")) return first;
        if (match("&")) {
            Formula acc = Formula::conjunction(std::move(first), formula());
            while (match("&")) acc = Formula::conjunction(std::move(acc), formula());
            expect(")");
            return acc;
        }
        if (match("->")) {
            Formula rhs = formula();
            expect(")");
            return Formula::implication(std::move(first), std::move(rhs));
        }
        if (match("|")) {
            Formula acc = Formula::disjunction(std::move(first), formula());
            while (match("|")) acc = Formula::disjunction(std::move(acc), formula());
            expect(")");
            return acc;
        }
        if (match("U")) {
            expect("<=");
            const unsigned k = natural();
            Formula rhs = formula();
            expect(")");
            return Formula::until(std::move(first), k, std::move(rhs));
        }
        fail("expected '&', '|', '->', 'U<=' or ')'");
    }

    Formula probabilistic(std::size_t start) {
        expect("{");
        std::vector<Interval> intervals;
        do {
            const std::size_t at = (skip_space(), pos_);
            expect("[");
            const double lo = decimal();
            expect(",");
            const double hi = decimal();
            expect("]");
            if (!(0.0 <= lo && lo <= hi && hi <= 1.0)) fail_at("interval must satisfy 0 <= lower <= upper <= 1", at);
            intervals.push_back({lo, hi});
        } while (match(","));
        expect("}");
        expect("(");
        std::vector<ProbArgument> args;
        do {
            const std::size_t at = (skip_space(), pos_);
            if (identifier("'Pr'") != "Pr") fail_at("expected 'Pr'", at);
            expect("[");
            ProbArgument arg{{}, Formula::truth()};
            do {
                const std::size_t vat = (skip_space(), pos_);
                std::string v = identifier("path variable");
                for (const auto& existing : arg.variables)
                    if (existing == v) fail_at("path variable '" + v + "' bound twice in one Pr", vat);
                arg.variables.push_back(std::move(v));
            } while (match(","));
            expect("]");
            expect("(");
            arg.body = formula();
            expect(")");
            args.push_back(std::move(arg));
        } while (match(","));
        expect(")");
        if (intervals.size() != args.size())
            fail_at("region has " + std::to_string(intervals.size()) + " interval(s) but " +
                        std::to_string(args.size()) + " Pr argument(s)",
                    start);
        return Formula::prob(BoxRegion(std::move(intervals)), std::move(args));
    }
};

}  // namespace

Formula parse_formula(std::string_view text) { return Parser(text).parse(); }

}  // namespace hyperver
