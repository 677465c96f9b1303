#pragma once

#include "hyperplan/automaton.hpp"
#include "hyperplan/policy.hpp"
#include "hyperplan/system.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace hyperplan {

/// One replayed execution. locations[k][p - 1] is path p's location at step
/// k; actions[k] and nodes[k] are the existential directions and controller
/// node used to leave step k.
struct WitnessRun {
    std::vector<std::vector<int>> locations;
    std::vector<JointAction> actions;
    std::vector<int> nodes;
    /// First step whose observation has no controller edge; the run stops there.
    std::optional<int> undefined_at;
};

/// Skolem functions for the existential paths, realized by replaying a
/// controller. Existential paths start at the initial location and move by
/// the controller's directions, which depend only on observations of earlier
/// steps.
class SkolemWitness {
public:
    SkolemWitness(TransitionSystem ts, HyperFormula f, Controller c);

    const TransitionSystem& system() const { return ts_; }
    const HyperFormula& formula() const { return f_; }
    const Controller& controller() const { return c_; }

    /// universal[k] lists one direction per universal variable, in prefix
    /// order, for the move out of step k. A node without an action keeps its
    /// paths moving by direction 0.
    WitnessRun run(const std::vector<std::vector<int>>& universal) const;

    /// ξ for existential path `path` over `steps` moves. earlier[j] is the
    /// direction sequence of the j-th universal variable before `path`; later
    /// universal variables cannot influence the result and move by direction 0.
    /// Truncated where the controller is undefined.
    std::vector<int> xi(int path, const std::vector<std::vector<int>>& earlier, int steps) const;

private:
    TransitionSystem ts_;
    HyperFormula f_;
    Controller c_;
    std::vector<int> existential_;
    std::vector<int> universal_;
};

/// Throws SemanticError if the controller cannot drive this formula's
/// existential paths: wrong observer, action arity or out-of-range directions.
SkolemWitness extract_skolem(const Controller& c, const HyperFormula& f, const TransitionSystem& ts);

struct ValidationOptions {
    int bound = 10;
    /// Reach bodies: the plan's horizon N. Every combination must accept
    /// within N steps; combinations still open after min(bound, N) steps make
    /// the result Indeterminate rather than a Violation when bound < N.
    std::optional<int> horizon;
    /// Search configurations visited before ResourceError.
    std::size_t work_budget = 10'000'000;
};

struct Validation {
    enum class Status { Validated, Violation, Indeterminate };
    Status status = Status::Validated;
    /// Violation: universal directions per step up to the violation, the
    /// lexicographically least such sequence.
    std::vector<std::vector<int>> universal;
    int step = 0;
    std::string reason;
    std::size_t explored = 0;
};
const char* name(Validation::Status s);

/// Enumerates every universal direction sequence up to the bound, in
/// lexicographic order with memoization on (node, locations, automaton
/// state). Safety: Violation iff some combination visits a losing state or
/// leaves the controller's domain. Throws ResourceError past the budget.
Validation validate_witness(const SkolemWitness& w, const DetAutomaton& aut, const ValidationOptions& options = {});

/// Text table of one execution: step, every path's location, the letter
/// (atoms of the body that hold) and the automaton state at that step.
std::string trace_table(const SkolemWitness& w, const DetAutomaton& aut,
                        const std::vector<std::vector<int>>& universal);

} // namespace hyperplan
