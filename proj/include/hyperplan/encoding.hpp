#pragma once

#include "hyperplan/automaton.hpp"
#include "hyperplan/formula.hpp"
#include "hyperplan/system.hpp"

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace hyperplan {

enum class Variant { Reach, Safe };
const char* name(Variant v);

/// ⟨l_1..l_n, q⟩, or one of the two sinks of the safe variant.
struct PlanningState {
    enum class Kind { Product, Win, Lose };
    Kind kind = Kind::Product;
    std::vector<int> locs;  ///< locs[i-1] is the location of path i
    int q = 0;

    static PlanningState win() { return {Kind::Win, {}, 0}; }
    static PlanningState lose() { return {Kind::Lose, {}, 0}; }
    bool is_product() const { return kind == Kind::Product; }
    auto operator<=>(const PlanningState&) const = default;
};

/// What an agent sees: a location prefix, or a sink marker.
struct Observation {
    enum class Kind { Locations, Win, Lose };
    Kind kind = Kind::Locations;
    std::vector<int> locs;
    auto operator<=>(const Observation&) const = default;
};

/// One direction per existential path variable, in prefix order.
using JointAction = std::vector<int>;

/// Explicit QDec-POMDP restricted to the states reachable from the initial
/// state. States are numbered in breadth-first discovery order, so state 0 is
/// the initial state. Actions are numbered lexicographically over JointAction
/// with the first existential variable most significant.
class QDecPomdp {
public:
    Variant variant() const { return variant_; }
    const std::string& quantifier_word() const { return word_; }
    int num_paths() const { return static_cast<int>(word_.size()); }
    const std::vector<int>& existential() const { return existential_; }
    const std::vector<int>& universal() const { return universal_; }
    int num_directions() const { return num_directions_; }

    int num_states() const { return static_cast<int>(states_.size()); }
    int initial() const { return 0; }
    const PlanningState& state(int id) const { return states_.at(id); }
    std::optional<int> find(const PlanningState& s) const;
    std::optional<int> win() const { return find(PlanningState::win()); }
    std::optional<int> lose() const { return find(PlanningState::lose()); }
    bool goal(int id) const { return goal_.at(id); }

    int num_actions() const { return num_actions_; }
    JointAction action(int index) const;
    int action_index(const JointAction& a) const;
    /// Sorted, duplicate-free successor ids; never empty.
    const std::vector<int>& image(int state, int action) const { return delta_.at(state).at(action); }

    /// ω_i for the agent owning path variable `path` (1-based).
    Observation observe(int path, int state) const;

    /// |L|^n · |Q| (+2 for the sinks of the safe variant): the unpruned size.
    std::uint64_t state_space_size() const { return state_space_size_; }

private:
    friend QDecPomdp build_encoding(const TransitionSystem&, const HyperFormula&, const DetAutomaton&, Variant);

    Variant variant_ = Variant::Reach;
    std::string word_;
    std::vector<int> existential_, universal_;
    int num_directions_ = 0;
    int num_actions_ = 1;
    std::vector<PlanningState> states_;
    std::map<PlanningState, int> index_;
    std::vector<std::vector<std::vector<int>>> delta_;
    std::vector<bool> goal_;
    std::uint64_t state_space_size_ = 0;
};

/// Letter builder shared by every module that runs the body automaton on a
/// location tuple: maps each alphabet bit to the (path, atom) it reads.
class LetterMap {
public:
    /// Throws SemanticError if the alphabet names an atom the system lacks or
    /// a path outside 1..num_paths.
    LetterMap(const TransitionSystem& ts, const DetAutomaton& aut, int num_paths);

    LetterMask mask(const std::vector<int>& locs) const;
    /// 1-based path indices that occur in the alphabet, ascending.
    const std::vector<int>& relevant_paths() const { return relevant_; }

private:
    const TransitionSystem* ts_;
    std::vector<std::pair<int, int>> bits_;  // (path, atom index)
    std::vector<int> relevant_;
};

/// Def.-2 style encoding of a reachability body; goal = marked DFA states.
QDecPomdp encode_reach(const TransitionSystem& ts, const HyperFormula& f, const DetAutomaton& dfa);

/// Safe variant: marked states lead to Lose, other product states add Win to
/// every image, the sinks self-loop, goal = {Win}.
QDecPomdp encode_safe(const TransitionSystem& ts, const HyperFormula& f, const DetAutomaton& dsa);

/// All state ids, which are exactly the states reachable from the initial one.
std::vector<PlanningState> reachable_states(const QDecPomdp& enc);

std::string to_string(const PlanningState& s, const TransitionSystem& ts);
std::string to_string(const JointAction& a, const TransitionSystem& ts);
std::string to_string(const Observation& o, const TransitionSystem& ts);

/// Diagnostic JSON dump (format "hyperplan-encoding", version 1).
std::string encoding_to_json(const QDecPomdp& enc, const TransitionSystem& ts, const HyperFormula& f);

} // namespace hyperplan
