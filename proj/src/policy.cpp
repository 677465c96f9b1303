#include "hyperplan/policy.hpp"

#include "hyperplan/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>

namespace hyperplan {

std::optional<int> Controller::next(int node, const Observation& obs) const
{
    const auto& edges = nodes.at(node).edges;
    auto it = std::lower_bound(edges.begin(), edges.end(), obs,
                               [](const ControllerEdge& e, const Observation& o) { return e.obs < o; });
    if (it == edges.end() || it->obs != obs)
        return std::nullopt;
    return it->to;
}

std::string mangle(std::string_view name)
{
    std::string out;
    for (char c : name) {
        if (c == '_')
            out += "__";
        else if (std::isupper(static_cast<unsigned char>(c)))
            out += std::string("_") + static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        else
            out += c;
    }
    return out;
}

std::string action_name(const JointAction& a, const TransitionSystem& ts)
{
    std::string out = "move";
    for (int d : a)
        out += "-" + mangle(ts.directions().at(d));
    return out;
}

std::string controller_to_json(const Controller& c, const TransitionSystem& ts, const HyperFormula& f)
{
    using nlohmann::json;
    json nodes = json::array();
    for (std::size_t i = 0; i < c.nodes.size(); ++i) {
        const auto& node = c.nodes[i];
        json edges = json::array();
        for (const auto& e : node.edges) {
            json obs;
            if (e.obs.kind == Observation::Kind::Win)
                obs = "win";
            else if (e.obs.kind == Observation::Kind::Lose)
                obs = "lose";
            else {
                obs = json::array();
                for (int l : e.obs.locs)
                    obs.push_back(ts.locations()[l]);
            }
            edges.push_back({{"obs", obs}, {"to", e.to}});
        }
        json action = node.action ? json(action_name(*node.action, ts)) : json(nullptr);
        nodes.push_back({{"id", i}, {"action", action}, {"edges", edges}});
    }
    json doc{{"format", "hyperplan-controller"},
             {"version", 1},
             {"observer", f.var_name(c.observer)},
             {"start", c.start},
             {"nodes", nodes}};
    return doc.dump(2) + "\n";
}

namespace {

[[noreturn]] void schema(const std::string& msg) { throw SemanticError("controller: " + msg); }

const nlohmann::json& field(const nlohmann::json& obj, const char* key)
{
    if (!obj.is_object() || !obj.contains(key))
        schema(std::string("missing field '") + key + "'");
    return obj.at(key);
}

int as_int(const nlohmann::json& v, const char* what)
{
    if (!v.is_number_integer())
        schema(std::string(what) + " must be an integer");
    return v.get<int>();
}

} // namespace

Controller controller_from_json(std::string_view text, const TransitionSystem& ts, const HyperFormula& f)
{
    using nlohmann::json;
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("controller JSON: ") + e.what(), 1, e.byte);
    }
    if (field(doc, "format") != "hyperplan-controller")
        schema("unexpected format");
    if (field(doc, "version") != 1)
        schema("unsupported version");

    Controller c;
    const json& observer = field(doc, "observer");
    if (!observer.is_string())
        schema("observer must be a path variable name");
    c.observer = 0;
    for (int p = 1; p <= f.num_paths(); ++p)
        if (f.var_name(p) == observer.get<std::string>())
            c.observer = p;
    if (c.observer == 0)
        schema("observer '" + observer.get<std::string>() + "' is not a path variable of the formula");

    const std::size_t arity = f.existential_vars().size();
    std::vector<JointAction> all_actions{{}};
    for (std::size_t i = 0; i < arity; ++i) {
        std::vector<JointAction> next;
        for (const auto& a : all_actions)
            for (int d = 0; d < ts.num_directions(); ++d) {
                auto b = a;
                b.push_back(d);
                next.push_back(b);
            }
        all_actions = std::move(next);
    }
    auto parse_action = [&](const json& v) -> JointAction {
        if (v.is_string()) {
            for (const auto& a : all_actions)
                if (action_name(a, ts) == v.get<std::string>())
                    return a;
            schema("unknown action '" + v.get<std::string>() + "'");
        }
        if (!v.is_array() || v.size() != arity)
            schema("action must be a name or an array of " + std::to_string(arity) + " directions");
        JointAction a;
        for (const auto& d : v) {
            auto idx = d.is_string() ? ts.find_direction(d.get<std::string>()) : std::nullopt;
            if (!idx)
                schema("unknown direction " + d.dump());
            a.push_back(*idx);
        }
        return a;
    };
    auto parse_obs = [&](const json& v) -> Observation {
        if (v == "win")
            return {Observation::Kind::Win, {}};
        if (v == "lose")
            return {Observation::Kind::Lose, {}};
        if (!v.is_array() || static_cast<int>(v.size()) != c.observer)
            schema("observation must list " + std::to_string(c.observer) + " locations");
        Observation o;
        for (const auto& l : v) {
            auto idx = l.is_string() ? ts.find_location(l.get<std::string>()) : std::nullopt;
            if (!idx)
                schema("unknown location " + l.dump());
            o.locs.push_back(*idx);
        }
        return o;
    };

    const json& nodes = field(doc, "nodes");
    if (!nodes.is_array() || nodes.empty())
        schema("nodes must be a non-empty array");
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const json& jn = nodes[i];
        if (as_int(field(jn, "id"), "node id") != static_cast<int>(i))
            schema("node ids must be 0, 1, 2, ... in order");
        ControllerNode node;
        const json& action = field(jn, "action");
        if (!action.is_null())
            node.action = parse_action(action);
        const json& edges = jn.contains("edges") ? jn.at("edges") : json::array();
        if (!edges.is_array())
            schema("edges must be an array");
        for (const auto& je : edges)
            node.edges.push_back({parse_obs(field(je, "obs")), as_int(field(je, "to"), "edge target")});
        if (!node.action && !node.edges.empty())
            schema("goal node " + std::to_string(i) + " must not have edges");
        std::sort(node.edges.begin(), node.edges.end(),
                  [](const ControllerEdge& a, const ControllerEdge& b) { return a.obs < b.obs; });
        for (std::size_t k = 1; k < node.edges.size(); ++k)
            if (node.edges[k].obs == node.edges[k - 1].obs)
                schema("node " + std::to_string(i) + " has two edges for one observation");
        c.nodes.push_back(std::move(node));
    }
    c.start = as_int(field(doc, "start"), "start");
    const int count = static_cast<int>(c.nodes.size());
    if (c.start < 0 || c.start >= count)
        schema("start node out of range");
    for (const auto& node : c.nodes)
        for (const auto& e : node.edges)
            if (e.to < 0 || e.to >= count)
                schema("edge target out of range");

    std::vector<bool> seen(c.nodes.size());
    std::vector<int> stack{c.start};
    seen[c.start] = true;
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        for (const auto& e : c.nodes[v].edges)
            if (!seen[e.to]) {
                seen[e.to] = true;
                stack.push_back(e.to);
            }
    }
    for (std::size_t i = 0; i < seen.size(); ++i)
        if (!seen[i])
            schema("node " + std::to_string(i) + " is unreachable from the start node");
    return c;
}

} // namespace hyperplan
