#include "fixtures.hpp"
#include "generators.hpp"

#include "hyperplan/errors.hpp"
#include "hyperplan/solver.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

using namespace hyperplan;

namespace {

struct Instance {
    TransitionSystem ts;
    HyperFormula f;
    DetAutomaton aut;
    QDecPomdp enc;
};

Instance make(const TransitionSystem& ts, const std::string& formula)
{
    auto f = parse_formula(formula);
    const bool safe = classify_body(f.body()) == BodyClass::Safety;
    auto aut = safe ? build_safety_dsa(f.body()) : build_reach_dfa(f.body());
    auto enc = safe ? encode_safe(ts, f, aut) : encode_reach(ts, f, aut);
    return {ts, f, aut, enc};
}

Instance running() { return make(fixtures::running_system(), fixtures::kRunningFormula); }

PlanningState product(std::vector<int> locs, int q) { return {PlanningState::Kind::Product, std::move(locs), q}; }

// Node reached from the start by following observations of the given states.
int node_at(const Controller& c, const QDecPomdp& enc, const std::vector<int>& states)
{
    int v = c.start;
    for (int s : states)
        v = *c.next(v, enc.observe(c.observer, s));
    return v;
}

// Number of positional policies, saturating at 10^6.
double policy_count(const QDecPomdp& enc)
{
    return std::min(1e6, std::pow(double(enc.num_actions()), enc.num_states()));
}

// Independent oracle: does some positional policy satisfy the plan kind?
bool brute_force(const QDecPomdp& enc, PlanKind kind)
{
    const int n = enc.num_states();
    std::vector<int> choice(n, 0);
    for (;;) {
        std::set<int> seen{0};
        std::vector<int> order{0};
        for (std::size_t i = 0; i < order.size(); ++i) {
            int s = order[i];
            if (enc.goal(s))
                continue;
            for (int t : enc.image(s, choice[s]))
                if (seen.insert(t).second)
                    order.push_back(t);
        }
        bool ok = true;
        if (kind == PlanKind::StrongCyclic) {
            for (int s : order) {
                std::set<int> r{s};
                std::vector<int> st{s};
                bool reach = enc.goal(s);
                while (!st.empty() && !reach) {
                    int u = st.back();
                    st.pop_back();
                    for (int t : enc.image(u, choice[u])) {
                        reach |= enc.goal(t);
                        if (r.insert(t).second && !enc.goal(t))
                            st.push_back(t);
                    }
                }
                ok &= reach;
            }
        } else {
            // acyclic among non-goal states reached under the policy
            std::vector<int> indeg(n, 0);
            for (int s : order)
                if (!enc.goal(s))
                    for (int t : enc.image(s, choice[s]))
                        ++indeg[t];
            std::vector<int> ready;
            for (int s : order)
                if (indeg[s] == 0)
                    ready.push_back(s);
            std::size_t done = 0;
            while (!ready.empty()) {
                int s = ready.back();
                ready.pop_back();
                ++done;
                if (!enc.goal(s))
                    for (int t : enc.image(s, choice[s]))
                        if (--indeg[t] == 0)
                            ready.push_back(t);
            }
            ok = done == order.size();
        }
        if (ok)
            return true;
        int i = 0;
        while (i < n && ++choice[i] == enc.num_actions())
            choice[i++] = 0;
        if (i == n)
            return false;
    }
}

} // namespace

TEST_CASE("running example: strong fails, strong-cyclic succeeds with the drawn policy")
{
    auto r = running();
    auto strong = solve_fond_strong(r.enc);
    CHECK(strong.status == Verdict::Status::NoPlan);
    auto cyclic = solve_fond_strong_cyclic(r.enc);
    REQUIRE(cyclic.found());
    CHECK(cyclic.kind == PlanKind::StrongCyclic);
    const int lA = 0, lB = 1, dA = 0, dB = 1;
    const auto& c = cyclic.controller;
    CHECK(c.observer == 2);
    CHECK(*c.nodes[c.start].action == JointAction{dA});
    int s1 = *r.enc.find(product({lB, lA}, 1));
    CHECK(*c.nodes[node_at(c, r.enc, {s1})].action == JointAction{dB});
    CHECK(check_execution(r.enc, c, PlanKind::StrongCyclic, 10));
    CHECK(check_execution(r.enc, c, PlanKind::Weak));
    CHECK_FALSE(check_execution(r.enc, c, PlanKind::Strong));

    auto game = solve_safety_game(r.enc);
    CHECK(game.existential_wins);
}

TEST_CASE("a policy that ignores the delay obligation is rejected")
{
    auto r = running();
    auto c = solve_fond_strong_cyclic(r.enc).controller;
    int s1 = *r.enc.find(product({1, 0}, 1));
    c.nodes[node_at(c, r.enc, {s1})].action = JointAction{0};
    CHECK_FALSE(check_execution(r.enc, c, PlanKind::StrongCyclic));
}

TEST_CASE("delay-free copying has no plan and the safety game agrees")
{
    auto r = make(fixtures::running_system(), "forall p1. exists p2. G (a_p1 <-> a_p2)");
    CHECK(solve_fond_strong_cyclic(r.enc).status == Verdict::Status::NoPlan);
    CHECK_FALSE(solve_safety_game(r.enc).existential_wins);
}

TEST_CASE("classical plans are shortest and lexicographically smallest")
{
    auto r = make(fixtures::running_system(), "exists p1. exists p2. F (a_p1 & !a_p2)");
    auto v = solve_classical(r.enc);
    REQUIRE(v.found());
    CHECK(v.sequence == std::vector<JointAction>{{0, 1}, {0, 0}});
    CHECK(v.horizon == 2);
    CHECK(v.controller.nodes.size() == 3);
    CHECK_FALSE(v.controller.nodes.back().action.has_value());
    CHECK(check_execution(r.enc, v.controller, PlanKind::Strong));

    auto trivial = make(fixtures::running_system(), "exists p. a_p");
    auto t = solve_classical(trivial.enc);
    // the first letter is read before the goal can hold, so one step is needed
    REQUIRE(t.found());
    CHECK(t.sequence.size() == 1);

    auto initial_goal = make(fixtures::running_system(), "exists p. true");
    auto e = solve_classical(initial_goal.enc);
    REQUIRE(e.found());
    CHECK(e.sequence.empty());
    CHECK(check_execution(initial_goal.enc, e.controller, PlanKind::Strong));

    auto never = make(fixtures::running_system(), "exists p. F (a_p & !a_p)");
    CHECK(solve_classical(never.enc).status == Verdict::Status::NoPlan);

    CHECK(solve_classical(running().enc).status == Verdict::Status::Unsupported);
}

TEST_CASE("strong plan absorbed in one step")
{
    auto r = make(fixtures::running_system(), "forall p1. exists p2. F a_p2");
    auto v = solve_fond_strong(r.enc);
    REQUIRE(v.found());
    CHECK(v.horizon == 1);
    CHECK(check_execution(r.enc, v.controller, PlanKind::Strong, 1));
    CHECK(solve_fond_strong_cyclic(r.enc).found());
}

TEST_CASE("strong horizon check is indeterminate when too short")
{
    auto r = make(fixtures::running_system(), "exists p1. exists p2. F (a_p1 & !a_p2)");
    auto v = solve_fond_strong(r.enc);
    REQUIRE(v.found());
    CHECK(v.horizon == 2);
    CHECK_THROWS_AS(check_execution(r.enc, v.controller, PlanKind::Strong, 1), IndeterminateError);
}

TEST_CASE("every route to the goal through a losing state means no plan")
{
    auto r = make(fixtures::running_system(), "forall p1. exists p2. G (a_p1 & !a_p1)");
    CHECK(solve_fond_strong_cyclic(r.enc).status == Verdict::Status::NoPlan);
    CHECK_FALSE(solve_safety_game(r.enc).existential_wins);
    CHECK_FALSE(brute_force(r.enc, PlanKind::StrongCyclic));
}

TEST_CASE("belief-space search")
{
    auto ts = fixtures::running_system();
    // trailing universal path never read by the body
    auto fef = make(ts, "forall p1. exists p2. forall p3. G (a_p1 <-> X a_p2)");
    auto pond = solve_pond(fef.enc, PlanKind::StrongCyclic);
    CHECK(pond.found() == solve_fond_strong_cyclic(running().enc).found());
    CHECK(check_execution(fef.enc, pond.controller, PlanKind::StrongCyclic));
    CHECK(pond.controller.observer == 2);

    // singleton beliefs: same verdict as FOND
    auto r = running();
    CHECK(solve_pond(r.enc, PlanKind::StrongCyclic).found());
    CHECK(solve_pond(r.enc, PlanKind::Strong).status == Verdict::Status::NoPlan);

    // the agent cannot see the trailing universal it has to match
    auto blind = make(ts, "exists p1. forall p2. G (a_p1 <-> X a_p2)");
    CHECK(solve_pond(blind.enc, PlanKind::StrongCyclic).status == Verdict::Status::NoPlan);

    auto general = make(ts, "exists p1. forall p2. exists p3. G (a_p1 <-> a_p3)");
    CHECK(solve_pond(general.enc, PlanKind::StrongCyclic).status == Verdict::Status::Unsupported);
    CHECK(solve_fond_strong_cyclic(general.enc).status == Verdict::Status::Unsupported);
    CHECK(solve_fond_strong_cyclic(fef.enc).status == Verdict::Status::Unsupported);
    CHECK(solve_pond(r.enc, PlanKind::Weak).status == Verdict::Status::Unsupported);

    SolverOptions tiny;
    tiny.belief_cap = 2;
    CHECK_THROWS_AS(solve_pond(fef.enc, PlanKind::StrongCyclic, tiny), ResourceError);
}

TEST_CASE("safety game gates")
{
    auto reach = make(fixtures::running_system(), "forall p1. exists p2. F a_p2");
    CHECK_THROWS_AS(solve_safety_game(reach.enc), UnsupportedError);
    auto dead = make(fixtures::running_system(), "forall p1. exists p2. G false");
    CHECK_FALSE(solve_safety_game(dead.enc).existential_wins);
}

TEST_CASE("property: solvers agree with each other and with brute force")
{
    std::mt19937 rng(51);
    int plans = 0, small = 0;
    for (int iter = 0; iter < 200; ++iter) {
        auto ts = gen::random_system(rng, 4, 2, 2);
        auto body = gen::random_body_of_class(rng, BodyClass::Safety, 2, 2, 4);
        auto f = gen::formula_of("AE", body);
        auto dsa = build_safety_dsa(f.body());
        auto enc = encode_safe(ts, f, dsa);

        auto cyclic = solve_fond_strong_cyclic(enc);
        auto strong = solve_fond_strong(enc);
        auto game = solve_safety_game(enc);
        CHECK(cyclic.found() == game.existential_wins);
        if (strong.found())
            CHECK(cyclic.found());
        if (cyclic.found()) {
            ++plans;
            CHECK(check_execution(enc, cyclic.controller, PlanKind::StrongCyclic));
        }
        if (policy_count(enc) < 1e5) {
            ++small;
            CHECK(cyclic.found() == brute_force(enc, PlanKind::StrongCyclic));
            CHECK(strong.found() == brute_force(enc, PlanKind::Strong));
        }
        // deterministic output
        auto again = solve_fond_strong_cyclic(enc);
        if (cyclic.found())
            CHECK(controller_to_json(again.controller, ts, f) == controller_to_json(cyclic.controller, ts, f));
    }
    CHECK(plans > 20);
    CHECK(small > 20);
}

TEST_CASE("property: reach solvers agree with brute force")
{
    std::mt19937 rng(52);
    for (int iter = 0; iter < 200; ++iter) {
        auto ts = gen::random_system(rng, 3, 2, 2);
        auto body = gen::random_body_of_class(rng, BodyClass::Reachability, 2, 2, 4);
        auto f = gen::formula_of(iter % 2 ? "AE" : "EE", body);
        auto dfa = build_reach_dfa(f.body());
        auto enc = encode_reach(ts, f, dfa);
        auto strong = solve_fond_strong(enc);
        auto cyclic = solve_fond_strong_cyclic(enc);
        if (strong.found())
            CHECK(cyclic.found());
        if (policy_count(enc) < 1e5) {
            CHECK(strong.found() == brute_force(enc, PlanKind::Strong));
            CHECK(cyclic.found() == brute_force(enc, PlanKind::StrongCyclic));
        }
        if (iter % 2 == 0) {
            auto classical = solve_classical(enc);
            CHECK(classical.found() == strong.found());
            if (classical.found())
                CHECK(classical.horizon == strong.horizon);
        }
    }
}
