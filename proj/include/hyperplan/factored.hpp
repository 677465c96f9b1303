#pragma once

#include "hyperplan/encoding.hpp"

#include <string>
#include <vector>

namespace hyperplan {

/// Effect applied when every fluent in `when` holds in the source state.
/// Successor = (source \ union of dels) ∪ union of adds over firing effects.
struct CondEffect {
    std::vector<int> when;
    std::vector<int> add;
    std::vector<int> del;
    auto operator<=>(const CondEffect&) const = default;
};

/// One action per existential direction tuple; each outcome is one branch of
/// the non-deterministic choice.
struct FactoredAction {
    JointAction dirs;
    std::vector<std::vector<CondEffect>> outcomes;
};

/// Propositional encoding over the fluents at(p, l), autstate(q) and a few
/// flags: win/lose/alive for the safe variant (alive iff q is unmarked) and
/// accept for the reach variant (accept iff q is marked).
struct FactoredEncoding {
    Variant variant = Variant::Reach;
    std::vector<std::string> paths;      ///< path variable names, prefix order
    std::string quantifier_word;
    std::vector<std::string> locations;
    std::vector<std::string> directions;
    int num_aut_states = 0;
    std::vector<int> marked;             ///< marked automaton states, ascending
    std::vector<int> init;               ///< sorted fluent ids
    std::vector<FactoredAction> actions; ///< lexicographic over dirs

    int num_paths() const { return static_cast<int>(paths.size()); }
    int num_locations() const { return static_cast<int>(locations.size()); }
    /// `path` is 1-based.
    int at(int path, int location) const { return (path - 1) * num_locations() + location; }
    int autstate(int q) const { return num_paths() * num_locations() + q; }
    int win() const { return flag(0); }
    int lose() const { return flag(1); }
    int alive() const { return flag(2); }
    int accept() const { return flag(0); }
    int goal() const { return variant == Variant::Safe ? win() : accept(); }
    int num_fluents() const { return flag(0) + (variant == Variant::Safe ? 3 : 1); }
    /// n·|L| + |Q|, the location and automaton fluents without the flags.
    int num_core_fluents() const { return flag(0); }
    std::string fluent_name(int fluent) const;

private:
    int flag(int i) const { return num_paths() * num_locations() + num_aut_states + i; }
};

FactoredEncoding encode_factored(const TransitionSystem& ts, const HyperFormula& f, const DetAutomaton& aut,
                                 Variant variant);

/// Reachable state structure of a factored encoding. State 0 is the initial
/// state; images[s][a] is sorted and duplicate-free.
struct GroundedStructure {
    std::vector<std::vector<int>> states;  ///< sorted fluent ids
    std::vector<std::vector<std::vector<int>>> images;
    std::vector<JointAction> actions;
    std::vector<bool> goal;
};

/// Throws ResourceError past `max_states`.
GroundedStructure ground_factored(const FactoredEncoding& fenc, std::size_t max_states = 1'000'000);

/// Reads a fluent set back as ⟨locs, q⟩, Win or Lose; throws SemanticError if
/// it is not exactly one location per path and one automaton state.
PlanningState decode_state(const FactoredEncoding& fenc, const std::vector<int>& fluents);

/// Compares reachable states, goals and per-action images. On mismatch returns
/// false and, if `why` is non-null, describes the first difference.
bool isomorphic(const FactoredEncoding& fenc, const GroundedStructure& g, const QDecPomdp& enc,
                std::string* why = nullptr);

} // namespace hyperplan
