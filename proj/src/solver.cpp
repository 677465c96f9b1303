#include "hyperplan/solver.hpp"

#include "hyperplan/errors.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <stdexcept>

namespace hyperplan {

const char* name(PlanKind k)
{
    switch (k) {
    case PlanKind::Weak: return "weak";
    case PlanKind::Strong: return "strong";
    case PlanKind::StrongCyclic: return "strong-cyclic";
    }
    return "?";
}

const char* name(Verdict::Status s)
{
    switch (s) {
    case Verdict::Status::PlanFound: return "PlanFound";
    case Verdict::Status::NoPlan: return "NoPlan";
    case Verdict::Status::Unsupported: return "Unsupported";
    }
    return "?";
}

int observer_of(const QDecPomdp& enc)
{
    return enc.existential().empty() ? enc.num_paths() : enc.existential().back();
}

namespace {

// AND-OR graph shared by the FOND (node = state) and POND (node = belief)
// solvers. Goal nodes are never expanded. Node 0 is the start.
struct Graph {
    int num_actions = 0;
    std::vector<std::vector<std::vector<int>>> succ;
    std::vector<bool> goal;
    std::vector<Observation> obs;

    int size() const { return static_cast<int>(goal.size()); }
};

struct Solution {
    std::vector<int> action;  // -1: none
    int horizon = 0;
};

std::vector<std::vector<std::pair<int, int>>> reverse_edges(const Graph& g)
{
    std::vector<std::vector<std::pair<int, int>>> rev(g.size());
    for (int s = 0; s < g.size(); ++s)
        for (int a = 0; a < static_cast<int>(g.succ[s].size()); ++a)
            for (int c : g.succ[s][a])
                rev[c].emplace_back(s, a);
    return rev;
}

std::optional<Solution> solve_strong(const Graph& g)
{
    const int n = g.size();
    std::vector<int> rank(n, -1);
    Solution sol;
    sol.action.assign(n, -1);
    std::vector<std::vector<int>> remaining(n);
    for (int s = 0; s < n; ++s)
        for (const auto& img : g.succ[s])
            remaining[s].push_back(static_cast<int>(img.size()));
    const auto rev = reverse_edges(g);

    std::vector<int> frontier;
    for (int s = 0; s < n; ++s)
        if (g.goal[s]) {
            rank[s] = 0;
            frontier.push_back(s);
        }
    for (int layer = 1; !frontier.empty(); ++layer) {
        std::map<int, int> chosen;
        for (int c : frontier)
            for (auto [s, a] : rev[c]) {
                if (rank[s] != -1)
                    continue;
                if (--remaining[s][a] == 0) {
                    auto [it, fresh] = chosen.emplace(s, a);
                    if (!fresh)
                        it->second = std::min(it->second, a);
                }
            }
        frontier.clear();
        for (auto [s, a] : chosen) {
            rank[s] = layer;
            sol.action[s] = a;
            frontier.push_back(s);
        }
    }
    if (rank[0] == -1)
        return std::nullopt;
    sol.horizon = rank[0];
    return sol;
}

std::optional<Solution> solve_strong_cyclic(const Graph& g)
{
    const int n = g.size();
    const auto rev = reverse_edges(g);
    std::vector<bool> in(n, true);
    std::vector<int> dist;
    auto allowed = [&](int s, int a) {
        return std::all_of(g.succ[s][a].begin(), g.succ[s][a].end(), [&](int c) { return bool(in[c]); });
    };
    for (;;) {
        dist.assign(n, -1);
        std::deque<int> queue;
        for (int s = 0; s < n; ++s)
            if (g.goal[s] && in[s]) {
                dist[s] = 0;
                queue.push_back(s);
            }
        while (!queue.empty()) {
            int c = queue.front();
            queue.pop_front();
            for (auto [s, a] : rev[c])
                if (in[s] && dist[s] == -1 && allowed(s, a)) {
                    dist[s] = dist[c] + 1;
                    queue.push_back(s);
                }
        }
        bool changed = false;
        for (int s = 0; s < n; ++s)
            if (in[s] && dist[s] == -1) {
                in[s] = false;
                changed = true;
            }
        if (!changed)
            break;
    }
    if (!in[0])
        return std::nullopt;
    Solution sol;
    sol.action.assign(n, -1);
    for (int s = 0; s < n; ++s) {
        if (!in[s] || g.goal[s])
            continue;
        for (int a = 0; a < static_cast<int>(g.succ[s].size()) && sol.action[s] == -1; ++a) {
            if (!allowed(s, a))
                continue;
            for (int c : g.succ[s][a])
                if (dist[c] == dist[s] - 1)
                    sol.action[s] = a;
        }
    }
    return sol;
}

Controller make_controller(const Graph& g, const Solution& sol, int observer, const QDecPomdp& enc)
{
    Controller c;
    c.observer = observer;
    c.start = 0;
    std::map<int, int> id{{0, 0}};
    std::vector<int> order{0};
    for (std::size_t i = 0; i < order.size(); ++i) {
        const int s = order[i];
        ControllerNode node;
        if (!g.goal[s]) {
            const int a = sol.action[s];
            node.action = enc.action(a);
            for (int child : g.succ[s][a]) {
                auto [it, fresh] = id.emplace(child, static_cast<int>(order.size()));
                if (fresh)
                    order.push_back(child);
                node.edges.push_back({g.obs[child], it->second});
            }
            std::sort(node.edges.begin(), node.edges.end(),
                      [](const ControllerEdge& x, const ControllerEdge& y) { return x.obs < y.obs; });
            for (std::size_t k = 1; k < node.edges.size(); ++k)
                if (node.edges[k].obs == node.edges[k - 1].obs)
                    throw std::logic_error("two successors share an observation");
        }
        c.nodes.push_back(std::move(node));
    }
    return c;
}

Graph state_graph(const QDecPomdp& enc, int observer)
{
    Graph g;
    g.num_actions = enc.num_actions();
    for (int s = 0; s < enc.num_states(); ++s) {
        g.goal.push_back(enc.goal(s));
        g.obs.push_back(enc.observe(observer, s));
        std::vector<std::vector<int>> row;
        if (!enc.goal(s))
            for (int a = 0; a < enc.num_actions(); ++a)
                row.push_back(enc.image(s, a));
        g.succ.push_back(std::move(row));
    }
    return g;
}

Verdict unsupported(std::string reason)
{
    Verdict v;
    v.status = Verdict::Status::Unsupported;
    v.reason = std::move(reason);
    return v;
}

bool fully_observable_class(const QDecPomdp& enc)
{
    const PrefixClass c = classify_word(enc.quantifier_word());
    return c == PrefixClass::ExistsOnly || c == PrefixClass::ForallExists;
}

Verdict self_checked(const QDecPomdp& enc, Verdict v)
{
#ifdef HYPERPLAN_SELF_CHECK
    if (v.found() && !check_execution(enc, v.controller, v.kind))
        throw std::logic_error(std::string("self-check failed for a ") + name(v.kind) + " plan");
#else
    (void)enc;
#endif
    return v;
}

Verdict from_solution(const QDecPomdp& enc, const Graph& g, const std::optional<Solution>& sol, PlanKind kind,
                      int observer)
{
    Verdict v;
    v.kind = kind;
    v.explored = static_cast<std::size_t>(g.size());
    if (!sol) {
        v.status = Verdict::Status::NoPlan;
        v.reason = std::string("no ") + name(kind) + " plan exists for this encoding";
        return v;
    }
    v.status = Verdict::Status::PlanFound;
    v.horizon = kind == PlanKind::Strong ? sol->horizon : 0;
    v.controller = make_controller(g, *sol, observer, enc);
    return self_checked(enc, std::move(v));
}

} // namespace

Verdict solve_classical(const QDecPomdp& enc)
{
    for (int s = 0; s < enc.num_states(); ++s)
        for (int a = 0; a < enc.num_actions(); ++a)
            if (enc.image(s, a).size() != 1)
                return unsupported("encoding is non-deterministic; classical planning needs singleton images");
    const int observer = observer_of(enc);
    std::vector<int> parent(enc.num_states(), -2), via(enc.num_states(), -1);
    parent[0] = -1;
    std::deque<int> queue{0};
    int found = -1;
    while (!queue.empty()) {
        int s = queue.front();
        queue.pop_front();
        if (enc.goal(s)) {
            found = s;
            break;
        }
        for (int a = 0; a < enc.num_actions(); ++a) {
            int t = enc.image(s, a)[0];
            if (parent[t] == -2) {
                parent[t] = s;
                via[t] = a;
                queue.push_back(t);
            }
        }
    }
    Verdict v;
    v.kind = PlanKind::Strong;
    v.explored = static_cast<std::size_t>(std::count_if(parent.begin(), parent.end(), [](int p) { return p != -2; }));
    if (found == -1) {
        v.status = Verdict::Status::NoPlan;
        v.reason = "goal unreachable";
        return v;
    }
    std::vector<int> states{found};
    while (parent[states.back()] != -1)
        states.push_back(parent[states.back()]);
    std::reverse(states.begin(), states.end());
    v.status = Verdict::Status::PlanFound;
    v.controller.observer = observer;
    for (std::size_t i = 0; i + 1 < states.size(); ++i) {
        v.sequence.push_back(enc.action(via[states[i + 1]]));
        ControllerNode node;
        node.action = v.sequence.back();
        node.edges.push_back({enc.observe(observer, states[i + 1]), static_cast<int>(i) + 1});
        v.controller.nodes.push_back(std::move(node));
    }
    v.controller.nodes.emplace_back();
    v.horizon = static_cast<int>(v.sequence.size());
    return self_checked(enc, std::move(v));
}

Verdict solve_fond_strong(const QDecPomdp& enc)
{
    if (!fully_observable_class(enc))
        return unsupported("FOND planning needs an exists-only or forall-exists prefix");
    const int observer = observer_of(enc);
    Graph g = state_graph(enc, observer);
    return from_solution(enc, g, solve_strong(g), PlanKind::Strong, observer);
}

Verdict solve_fond_strong_cyclic(const QDecPomdp& enc)
{
    if (!fully_observable_class(enc))
        return unsupported("FOND planning needs an exists-only or forall-exists prefix");
    const int observer = observer_of(enc);
    Graph g = state_graph(enc, observer);
    return from_solution(enc, g, solve_strong_cyclic(g), PlanKind::StrongCyclic, observer);
}

Verdict solve_pond(const QDecPomdp& enc, PlanKind kind, const SolverOptions& options)
{
    if (classify_word(enc.quantifier_word()) == PrefixClass::General)
        return unsupported("General prefixes need several agents with different observations");
    if (kind == PlanKind::Weak)
        return unsupported("belief-space search produces strong or strong-cyclic plans only");
    const int observer = observer_of(enc);

    Graph g;
    g.num_actions = enc.num_actions();
    std::vector<std::vector<int>> beliefs;
    std::map<std::vector<int>, int> index;
    auto intern = [&](std::vector<int> b) {
        auto [it, fresh] = index.emplace(b, static_cast<int>(beliefs.size()));
        if (fresh) {
            if (beliefs.size() >= options.belief_cap)
                throw ResourceError("belief space exceeds the cap of " + std::to_string(options.belief_cap));
            beliefs.push_back(std::move(b));
        }
        return it->second;
    };
    intern({enc.initial()});
    for (std::size_t b = 0; b < beliefs.size(); ++b) {
        const std::vector<int> cur = beliefs[b];
        const bool goal = std::all_of(cur.begin(), cur.end(), [&](int s) { return enc.goal(s); });
        g.goal.push_back(goal);
        g.obs.push_back(enc.observe(observer, cur.front()));
        std::vector<std::vector<int>> row;
        if (!goal) {
            for (int a = 0; a < enc.num_actions(); ++a) {
                std::map<Observation, std::vector<int>> parts;
                for (int s : cur)
                    for (int t : enc.image(s, a))
                        parts[enc.observe(observer, t)].push_back(t);
                std::vector<int> children;
                for (auto& [o, part] : parts) {
                    std::sort(part.begin(), part.end());
                    part.erase(std::unique(part.begin(), part.end()), part.end());
                    children.push_back(intern(std::move(part)));
                }
                std::sort(children.begin(), children.end());
                row.push_back(std::move(children));
            }
        }
        g.succ.push_back(std::move(row));
    }
    auto sol = kind == PlanKind::Strong ? solve_strong(g) : solve_strong_cyclic(g);
    return from_solution(enc, g, sol, kind, observer);
}

SafetyGameResult solve_safety_game(const QDecPomdp& enc)
{
    if (enc.variant() != Variant::Safe)
        throw UnsupportedError("the safety game needs a safe-variant encoding");
    if (!fully_observable_class(enc))
        throw UnsupportedError("the safety game needs an exists-only or forall-exists prefix");
    const int n = enc.num_states();
    const auto lose = enc.lose();
    SafetyGameResult r;
    r.winning.assign(n, true);
    if (lose)
        r.winning[*lose] = false;
    auto safe_action = [&](int s, int a) {
        const auto& img = enc.image(s, a);
        return std::all_of(img.begin(), img.end(), [&](int t) { return bool(r.winning[t]); });
    };
    for (bool changed = true; changed;) {
        changed = false;
        for (int s = 0; s < n; ++s) {
            if (!r.winning[s])
                continue;
            bool ok = false;
            for (int a = 0; a < enc.num_actions() && !ok; ++a)
                ok = safe_action(s, a);
            if (!ok) {
                r.winning[s] = false;
                changed = true;
            }
        }
    }
    r.strategy.assign(n, std::nullopt);
    for (int s = 0; s < n; ++s)
        if (r.winning[s] && enc.state(s).is_product())
            for (int a = 0; a < enc.num_actions() && !r.strategy[s]; ++a)
                if (safe_action(s, a))
                    r.strategy[s] = a;
    r.existential_wins = r.winning[enc.initial()];
    return r;
}

bool check_execution(const QDecPomdp& enc, const Controller& c, PlanKind kind, std::optional<std::size_t> horizon)
{
    if (c.nodes.empty() || c.start < 0 || c.start >= static_cast<int>(c.nodes.size()))
        throw SemanticError("controller has no valid start node");
    if (c.observer < 1 || c.observer > enc.num_paths())
        throw SemanticError("controller observer is not a path of the encoding");

    // Product pairs (node, state); terminal pairs sit on goal states.
    std::map<std::pair<int, int>, int> index;
    std::vector<std::pair<int, int>> pairs;
    std::vector<std::vector<int>> succ;
    std::vector<bool> terminal, broken;
    auto intern = [&](int v, int s) {
        auto [it, fresh] = index.emplace(std::make_pair(v, s), static_cast<int>(pairs.size()));
        if (fresh) {
            pairs.emplace_back(v, s);
            succ.emplace_back();
            terminal.push_back(enc.goal(s));
            broken.push_back(false);
        }
        return it->second;
    };
    intern(c.start, enc.initial());
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        if (terminal[i])
            continue;
        const auto [v, s] = pairs[i];
        const auto& node = c.nodes.at(v);
        if (!node.action) {
            broken[i] = true;
            continue;
        }
        const int a = enc.action_index(*node.action);
        for (int t : enc.image(s, a)) {
            auto next = c.next(v, enc.observe(c.observer, t));
            if (!next || *next < 0 || *next >= static_cast<int>(c.nodes.size())) {
                broken[i] = true;
                continue;
            }
            const int j = intern(*next, t);
            succ[i].push_back(j);
        }
    }
    const int n = static_cast<int>(pairs.size());

    if (kind == PlanKind::Weak)
        return std::any_of(terminal.begin(), terminal.end(), [](bool b) { return b; });
    if (std::any_of(broken.begin(), broken.end(), [](bool b) { return b; }))
        return false;

    if (kind == PlanKind::StrongCyclic) {
        std::vector<std::vector<int>> rev(n);
        for (int i = 0; i < n; ++i)
            for (int j : succ[i])
                rev[j].push_back(i);
        std::vector<bool> good(terminal);
        std::vector<int> stack;
        for (int i = 0; i < n; ++i)
            if (good[i])
                stack.push_back(i);
        while (!stack.empty()) {
            int j = stack.back();
            stack.pop_back();
            for (int i : rev[j])
                if (!good[i]) {
                    good[i] = true;
                    stack.push_back(i);
                }
        }
        return std::all_of(good.begin(), good.end(), [](bool b) { return b; });
    }

    // Strong: acyclic product, then longest path to a terminal pair.
    std::vector<int> state(n, 0), depth(n, 0);
    std::vector<std::pair<int, std::size_t>> stack{{0, 0}};
    state[0] = 1;
    while (!stack.empty()) {
        auto& [i, k] = stack.back();
        if (k < succ[i].size()) {
            int j = succ[i][k++];
            if (state[j] == 1)
                return false;
            if (state[j] == 0) {
                state[j] = 1;
                stack.emplace_back(j, 0);
            }
            continue;
        }
        for (int j : succ[i])
            depth[i] = std::max(depth[i], depth[j] + 1);
        state[i] = 2;
        stack.pop_back();
    }
    const std::size_t limit = horizon.value_or(static_cast<std::size_t>(n));
    if (static_cast<std::size_t>(depth[0]) > limit)
        throw IndeterminateError("strong plan needs " + std::to_string(depth[0]) + " steps, horizon is " +
                                 std::to_string(limit));
    return true;
}

} // namespace hyperplan
