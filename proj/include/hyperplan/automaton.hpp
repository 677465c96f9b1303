#pragma once

#include "hyperplan/formula.hpp"
#include "hyperplan/semantics.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace hyperplan {

/// Bit set over an automaton's alphabet: bit i is alphabet()[i].
using LetterMask = std::uint32_t;

/// Conjunction of literals: bits in `care` are constrained to equal `value`.
struct Cube {
    LetterMask care = 0;
    LetterMask value = 0;

    bool matches(LetterMask letter) const { return (letter & care) == value; }
    auto operator<=>(const Cube&) const = default;
};

/// Disjunction of cubes.
struct Guard {
    std::vector<Cube> cubes;

    bool matches(LetterMask letter) const;
};

struct Edge {
    Guard guard;
    int target = 0;
};

enum class AutomatonKind { Dfa, Dsa };

struct AutomatonOptions {
    std::size_t max_states = 10000;
    /// Upper bound on the number of indexed atoms in the body; construction
    /// enumerates 2^n letters per state.
    int max_alphabet = 16;
};

/// Deterministic automaton over sets of indexed atoms. For a DFA the marked
/// states are accepting (reach one eventually); for a DSA they are losing
/// (never visit one). Marked states are absorbing in both cases.
class DetAutomaton {
public:
    DetAutomaton(AutomatonKind kind, std::vector<IndexedAtom> alphabet, std::vector<std::string> residues,
                 std::vector<std::vector<Edge>> edges, std::vector<bool> marked);

    AutomatonKind kind() const { return kind_; }
    const std::vector<IndexedAtom>& alphabet() const { return alphabet_; }
    int num_states() const { return static_cast<int>(edges_.size()); }
    int initial() const { return 0; }
    bool marked(int q) const { return marked_.at(q); }
    const std::vector<Edge>& edges(int q) const { return edges_.at(q); }
    /// Residual formula the state stands for, in the body syntax with
    /// numeric path indices (`a_1`), or `true` / `false`.
    const std::string& residue(int q) const { return residues_.at(q); }

    /// Atoms outside the alphabet are ignored.
    LetterMask mask_of(const Letter& letter) const;
    int step(int q, LetterMask letter) const;
    int step(int q, const Letter& letter) const { return step(q, mask_of(letter)); }

    std::string guard_to_string(const Guard& g) const;
    std::string to_dot() const;

private:
    AutomatonKind kind_;
    std::vector<IndexedAtom> alphabet_;
    std::vector<std::string> residues_;
    std::vector<std::vector<Edge>> edges_;
    std::vector<bool> marked_;
};

/// DFA by formula progression; throws ClassificationError outside the
/// reachability fragment and ResourceError past the caps.
DetAutomaton build_reach_dfa(const Body& body, const AutomatonOptions& options = {});

/// DSA by formula progression; throws ClassificationError outside the safety
/// fragment and ResourceError past the caps.
DetAutomaton build_safety_dsa(const Body& body, const AutomatonOptions& options = {});

/// DFA: True once a marked state is reached, else Unknown.
/// DSA: False once a marked state is reached, else Unknown.
Truth accepts(const DetAutomaton& aut, std::span<const Letter> word);

/// Throws if some state has overlapping or non-exhaustive guards, or a marked
/// state that is not absorbing. Enumerates every letter.
void check_well_formed(const DetAutomaton& aut);

} // namespace hyperplan
