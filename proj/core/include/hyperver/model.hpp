#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace hyperver {

using StateIndex = std::uint32_t;
using AtomId = std::uint32_t;

/// Raised for malformed model text and for chains that violate the DTMC
/// invariants. `line()` is 0 when the problem is not tied to a source line.
class ModelError : public std::runtime_error {
public:
    explicit ModelError(const std::string& what, std::size_t line = 0);
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

struct Transition {
    StateIndex target;
    double probability;

    friend bool operator==(const Transition&, const Transition&) = default;
};

struct StateDecl {
    std::string name;
    std::vector<std::string> labels;
};

/// Finite labelled discrete-time Markov chain. Immutable once constructed;
/// the constructor enforces row-stochasticity (within kRowSumTolerance),
/// valid successor indices and unique state names.
class Dtmc {
public:
    static constexpr double kRowSumTolerance = 1e-9;

    Dtmc(std::vector<StateDecl> states, std::vector<std::vector<Transition>> transitions);

    std::size_t size() const noexcept { return names_.size(); }
    const std::string& name(StateIndex s) const { return names_.at(s); }
    std::optional<StateIndex> find(std::string_view name) const;
    /// Throws ModelError for unknown names.
    StateIndex index_of(std::string_view name) const;

    std::span<const Transition> successors(StateIndex s) const { return rows_.at(s); }
    /// R(from, to); zero when no transition is declared.
    double probability(StateIndex from, StateIndex to) const;

    /// Sorted atomic propositions (the union of all labels).
    const std::vector<std::string>& propositions() const noexcept { return atoms_; }
    std::optional<AtomId> atom_id(std::string_view atom) const;
    bool has_label(StateIndex s, AtomId atom) const;
    bool has_label(StateIndex s, std::string_view atom) const;
    std::vector<std::string> labels(StateIndex s) const;

    /// Structural equality: same state names in the same order, same
    /// labels and same transition multiset per state.
    friend bool operator==(const Dtmc& lhs, const Dtmc& rhs);

private:
    struct StringHash {
        using is_transparent = void;
        std::size_t operator()(std::string_view s) const noexcept { return std::hash<std::string_view>{}(s); }
    };
    using NameIndex = std::unordered_map<std::string, std::uint32_t, StringHash, std::equal_to<>>;

    std::vector<std::string> names_;
    NameIndex state_index_;
    std::vector<std::vector<Transition>> rows_;
    std::vector<std::string> atoms_;
    NameIndex atom_index_;
    std::vector<std::vector<AtomId>> labels_;  // sorted per state
};

/// Line-oriented model text:
///
///     dtmc
///     state <name> labels: <a1,a2,...>
///     trans <src> <dst> <prob>
///
/// '#' starts a comment; ';' may be used instead of a newline to separate
/// declarations. Declaration order of states defines their indices.
Dtmc parse_model(std::string_view text);
Dtmc read_model(std::istream& in);
Dtmc load_model(const std::string& path);

/// Inverse of parse_model. Probabilities are written in shortest
/// round-trip form so parse(write(m)) == m.
void write_model(std::ostream& out, const Dtmc& model);
std::string model_to_text(const Dtmc& model);

}  // namespace hyperver
