#pragma once

#include "hyperplan/encoding.hpp"
#include "hyperplan/policy.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace hyperplan {

enum class PlanKind { Weak, Strong, StrongCyclic };
const char* name(PlanKind k);

struct Verdict {
    enum class Status { PlanFound, NoPlan, Unsupported };
    Status status = Status::NoPlan;
    PlanKind kind = PlanKind::Strong;
    Controller controller;
    /// Classical plans only: the action sequence.
    std::vector<JointAction> sequence;
    /// Strong and classical plans: steps after which every execution is in G.
    int horizon = 0;
    std::string reason;
    /// Search nodes (states or beliefs) built.
    std::size_t explored = 0;

    bool found() const { return status == Status::PlanFound; }
};
const char* name(Verdict::Status s);

struct SolverOptions {
    std::size_t belief_cap = 1'000'000;
};

/// Path index whose observation the single merged agent receives: the last
/// existential variable.
int observer_of(const QDecPomdp& enc);

/// Shortest plan; ties broken by the lexicographically smallest sequence.
/// Unsupported unless every reachable image is a singleton.
Verdict solve_classical(const QDecPomdp& enc);

/// Backward layered strong planning; horizon = rank of the initial state.
/// Unsupported outside ExistsOnly / ForallExists.
Verdict solve_fond_strong(const QDecPomdp& enc);

/// Prune-until-fixpoint strong-cyclic planning. Each state keeps the smallest
/// action that has a successor one step closer to the goal.
Verdict solve_fond_strong_cyclic(const QDecPomdp& enc);

/// Belief-space search for a single agent observing ω_observer_of(enc).
/// Unsupported for General prefixes; ResourceError past the belief cap.
Verdict solve_pond(const QDecPomdp& enc, PlanKind kind, const SolverOptions& options = {});

struct SafetyGameResult {
    bool existential_wins = false;
    std::vector<bool> winning;                 ///< per state
    std::vector<std::optional<int>> strategy;  ///< action per winning product state
};

/// Greatest fixpoint of states from which some action keeps every successor
/// away from Lose. Unsupported (throws) outside the safe ForallExists /
/// ExistsOnly setting.
SafetyGameResult solve_safety_game(const QDecPomdp& enc);

/// Explores the product of controller nodes and encoding states.
/// Strong: every execution reaches G within `horizon` steps (default: the
/// number of product pairs, which always suffices); throws IndeterminateError
/// if the product is acyclic but deeper than `horizon`.
/// StrongCyclic: every visited pair can still reach G.
/// Weak: some execution reaches G.
bool check_execution(const QDecPomdp& enc, const Controller& c, PlanKind kind,
                     std::optional<std::size_t> horizon = std::nullopt);

} // namespace hyperplan
