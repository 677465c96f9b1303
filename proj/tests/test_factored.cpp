#include "fixtures.hpp"
#include "generators.hpp"

#include "hyperplan/errors.hpp"
#include "hyperplan/factored.hpp"

#include <doctest.h>

#include <algorithm>

using namespace hyperplan;

TEST_CASE("running example factored encoding")
{
    auto ts = fixtures::running_system();
    auto f = fixtures::running_formula();
    auto dsa = build_safety_dsa(f.body());
    auto fe = encode_factored(ts, f, dsa, Variant::Safe);
    CHECK(fe.num_core_fluents() == 2 * 2 + 4);
    CHECK(fe.num_fluents() == 8 + 3);
    CHECK(fe.actions.size() == 2);
    for (const auto& a : fe.actions)
        CHECK(a.outcomes.size() == 3);  // two universal branches and the win branch
    CHECK(fe.fluent_name(fe.at(2, 1)) == "at(p2,lB)");
    CHECK(fe.fluent_name(fe.alive()) == "alive");

    auto g = ground_factored(fe);
    auto enc = encode_safe(ts, f, dsa);
    std::string why;
    CHECK_MESSAGE(isomorphic(fe, g, enc, &why), why);
    CHECK(decode_state(fe, g.states[0]) == enc.state(0));
}

TEST_CASE("trivial one-location instance grounds to at most two states")
{
    auto ts = parse_ts("atoms a\nlocations l\ndirections d\ninit l\ntrans l d l\n");
    auto f = parse_formula("exists p. F a_p");
    auto dfa = build_reach_dfa(f.body());
    auto fe = encode_factored(ts, f, dfa, Variant::Reach);
    auto g = ground_factored(fe);
    CHECK(g.states.size() <= 2);
    CHECK(isomorphic(fe, g, encode_reach(ts, f, dfa)));
}

TEST_CASE("a dropped effect breaks the isomorphism")
{
    auto ts = fixtures::running_system();
    auto f = fixtures::running_formula();
    auto dsa = build_safety_dsa(f.body());
    auto fe = encode_factored(ts, f, dsa, Variant::Safe);
    auto enc = encode_safe(ts, f, dsa);
    const auto g = ground_factored(fe);
    int live = 0;
    for (std::size_t k = 0; k < fe.actions[0].outcomes[0].size(); ++k) {
        const auto& e = fe.actions[0].outcomes[0][k];
        bool fires = false;
        for (const auto& s : g.states)
            fires |= std::includes(s.begin(), s.end(), e.when.begin(), e.when.end());
        if (!fires)
            continue;
        ++live;
        auto broken = fe;
        broken.actions[0].outcomes[0].erase(broken.actions[0].outcomes[0].begin() + static_cast<long>(k));
        CHECK_FALSE(isomorphic(broken, ground_factored(broken), enc));
    }
    CHECK(live >= 4);
}

TEST_CASE("decode rejects malformed fluent sets")
{
    auto ts = fixtures::running_system();
    auto f = fixtures::running_formula();
    auto fe = encode_factored(ts, f, build_safety_dsa(f.body()), Variant::Safe);
    CHECK_THROWS_AS(decode_state(fe, {fe.at(1, 0), fe.autstate(0), fe.alive()}), SemanticError);
    CHECK_THROWS_AS(decode_state(fe, {fe.at(1, 0), fe.at(2, 0), fe.autstate(0)}), SemanticError);
    CHECK_THROWS_AS(decode_state(fe, {fe.at(1, 0), fe.win()}), SemanticError);
    CHECK(decode_state(fe, {fe.lose()}) == PlanningState::lose());
}

TEST_CASE("property: factored grounding is isomorphic to the explicit encoding")
{
    std::mt19937 rng(41);
    static const char* words[] = {"AE", "EE", "E", "AEA", "EA"};
    for (int iter = 0; iter < 150; ++iter) {
        auto ts = gen::random_system(rng, 3, 1 + iter % 2, 2);
        const std::string word = words[iter % 5];
        const bool safe = iter % 3 != 0;
        auto body = gen::random_body_of_class(rng, safe ? BodyClass::Safety : BodyClass::Reachability, 2,
                                              static_cast<int>(word.size()), 4);
        auto f = gen::formula_of(word, body);
        auto aut = safe ? build_safety_dsa(f.body()) : build_reach_dfa(f.body());
        auto enc = safe ? encode_safe(ts, f, aut) : encode_reach(ts, f, aut);
        auto fe = encode_factored(ts, f, aut, safe ? Variant::Safe : Variant::Reach);
        CHECK(fe.num_core_fluents() == f.num_paths() * ts.num_locations() + aut.num_states());
        std::string why;
        CHECK_MESSAGE(isomorphic(fe, ground_factored(fe), enc, &why), why << " for " << to_string(f));
    }
}
