#pragma once

#include "hyperplan/encoding.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hyperplan {

struct ControllerEdge {
    Observation obs;
    int to = 0;
};

/// A node without an action is a goal node and has no edges.
struct ControllerNode {
    std::optional<JointAction> action;
    std::vector<ControllerEdge> edges;  ///< sorted by observation, unique
};

/// Finite-state controller. Execution: at a node take its action, observe the
/// successor through ω_observer and follow the matching edge.
struct Controller {
    int observer = 1;  ///< 1-based path index whose observation labels edges
    int start = 0;
    std::vector<ControllerNode> nodes;

    std::optional<int> next(int node, const Observation& obs) const;
};

/// Case-safe PDDL identifier: `X` becomes `_x`, `_` becomes `__`.
std::string mangle(std::string_view name);
/// `move-<d1>-<d2>...` over the mangled direction names.
std::string action_name(const JointAction& a, const TransitionSystem& ts);

/// Controller JSON (format "hyperplan-controller", version 1).
std::string controller_to_json(const Controller& c, const TransitionSystem& ts, const HyperFormula& f);

/// Accepts actions as `move-...` names or arrays of direction names and
/// observations as arrays of location names, "win" or "lose". Throws
/// ParseError on malformed JSON and SemanticError on schema violations,
/// unknown names, or nodes unreachable from the start node.
Controller controller_from_json(std::string_view text, const TransitionSystem& ts, const HyperFormula& f);

} // namespace hyperplan
