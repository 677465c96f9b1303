#include "fixtures.hpp"
#include "generators.hpp"

#include "hyperplan/automaton.hpp"
#include "hyperplan/errors.hpp"
#include "hyperplan/semantics.hpp"

#include <doctest.h>

using namespace hyperplan;

namespace {

Letter letter(std::initializer_list<IndexedAtom> atoms) { return Letter(atoms); }

const IndexedAtom a1{"a", 1}, a2{"a", 2};

BodyPtr body_of(const char* text) { return parse_formula(text).body_ptr(); }

} // namespace

TEST_CASE("running-example safety automaton has the four-state shape")
{
    auto dsa = build_safety_dsa(fixtures::running_formula().body());
    REQUIRE(dsa.num_states() == 4);
    CHECK(dsa.kind() == AutomatonKind::Dsa);
    CHECK(dsa.initial() == 0);
    CHECK_FALSE(dsa.marked(0));
    CHECK_FALSE(dsa.marked(1));
    CHECK_FALSE(dsa.marked(2));
    CHECK(dsa.marked(3));
    CHECK(dsa.residue(3) == "false");

    CHECK(dsa.step(0, letter({a1})) == 1);
    CHECK(dsa.step(0, letter({a1, a2})) == 1);
    CHECK(dsa.step(0, letter({})) == 2);
    CHECK(dsa.step(0, letter({a2})) == 2);

    CHECK(dsa.step(1, letter({a1, a2})) == 1);
    CHECK(dsa.step(1, letter({a2})) == 2);
    CHECK(dsa.step(1, letter({a1})) == 3);
    CHECK(dsa.step(1, letter({})) == 3);

    CHECK(dsa.step(2, letter({a1})) == 1);
    CHECK(dsa.step(2, letter({})) == 2);
    CHECK(dsa.step(2, letter({a2})) == 3);
    CHECK(dsa.step(2, letter({a1, a2})) == 3);

    for (const auto& l : {letter({}), letter({a1}), letter({a2}), letter({a1, a2})})
        CHECK(dsa.step(3, l) == 3);

    // one edge per target, guards as drawn
    REQUIRE(dsa.edges(0).size() == 2);
    CHECK(dsa.guard_to_string(dsa.edges(0)[0].guard) == "a_1");
    CHECK(dsa.guard_to_string(dsa.edges(0)[1].guard) == "!a_1");
    REQUIRE(dsa.edges(1).size() == 3);
    CHECK(dsa.guard_to_string(dsa.edges(1)[0].guard) == "a_1 & a_2");
    CHECK(dsa.guard_to_string(dsa.edges(1)[2].guard) == "!a_2");
    REQUIRE(dsa.edges(3).size() == 1);
    CHECK(dsa.guard_to_string(dsa.edges(3)[0].guard) == "true");
    check_well_formed(dsa);
    CHECK(dsa.to_dot().find("digraph") != std::string::npos);
}

TEST_CASE("running-example acceptance on short words")
{
    auto dsa = build_safety_dsa(fixtures::running_formula().body());
    std::vector<Letter> lose{letter({a1}), letter({})};
    std::vector<Letter> stay{letter({a1}), letter({a1, a2})};
    CHECK(accepts(dsa, lose) == Truth::False);
    CHECK(accepts(dsa, stay) == Truth::Unknown);
    CHECK(accepts(dsa, std::vector<Letter>{}) == Truth::Unknown);
}

TEST_CASE("canonical small automata")
{
    auto f = build_reach_dfa(*body_of("exists p. F a_p"));
    CHECK(f.num_states() == 2);
    CHECK(f.step(0, letter({{"a", 1}})) == 1);
    CHECK(f.step(0, letter({})) == 0);
    CHECK(f.marked(1));
    CHECK(accepts(f, std::vector<Letter>{letter({{"a", 1}})}) == Truth::True);

    auto static_body = build_reach_dfa(*body_of("exists p. a_p & b_p"));
    CHECK(static_body.num_states() == 3);
    int hit = static_body.step(0, letter({{"a", 1}, {"b", 1}}));
    int miss = static_body.step(0, letter({{"a", 1}}));
    CHECK(hit != miss);
    CHECK(static_body.marked(hit));
    CHECK_FALSE(static_body.marked(miss));
    CHECK(static_body.step(miss, letter({{"a", 1}, {"b", 1}})) == miss);

    auto reach = build_reach_dfa(*body_of("exists p1. exists p2. F (a_p1 & !a_p2)"));
    CHECK(reach.num_states() == 2);
    CHECK(accepts(reach, std::vector<Letter>{letter({a1})}) == Truth::True);
    CHECK(accepts(reach, std::vector<Letter>{letter({a1, a2})}) == Truth::Unknown);

    auto g = build_safety_dsa(*body_of("exists p. G a_p"));
    CHECK(g.num_states() == 2);
    CHECK(g.step(0, letter({{"a", 1}})) == 0);
    CHECK(g.marked(g.step(0, letter({}))));

    auto vacuous = build_safety_dsa(*body_of("exists p. G true"));
    CHECK(vacuous.num_states() == 1);
    CHECK_FALSE(vacuous.marked(0));
}

TEST_CASE("fragment and cap errors")
{
    CHECK_THROWS_AS(build_reach_dfa(fixtures::running_formula().body()), ClassificationError);
    CHECK_THROWS_AS(build_safety_dsa(*body_of("exists p. F a_p")), ClassificationError);
    CHECK_THROWS_AS(build_safety_dsa(*body_of("exists p. (F a_p) & G b_p")), ClassificationError);
    AutomatonOptions tiny;
    tiny.max_states = 2;
    CHECK_THROWS_AS(build_safety_dsa(fixtures::running_formula().body(), tiny), ResourceError);
    AutomatonOptions narrow;
    narrow.max_alphabet = 1;
    CHECK_THROWS_AS(build_safety_dsa(fixtures::running_formula().body(), narrow), ResourceError);
}

TEST_CASE("atoms outside the alphabet are ignored")
{
    auto dsa = build_safety_dsa(fixtures::running_formula().body());
    CHECK(dsa.step(0, letter({a1, {"zz", 1}})) == 1);
}

namespace {

// Words of every length 1..max_len over the two given letters.
template <typename F>
void for_each_word(const Letter& x, const Letter& y, int max_len, F&& visit)
{
    for (int len = 1; len <= max_len; ++len) {
        for (int bits = 0; bits < (1 << len); ++bits) {
            std::vector<Letter> word;
            for (int i = 0; i < len; ++i)
                word.push_back((bits >> i) & 1 ? y : x);
            visit(word);
        }
    }
}

Letter random_letter(std::mt19937& rng, int atoms, int paths)
{
    Letter l;
    for (int a = 0; a < atoms; ++a)
        for (int v = 1; v <= paths; ++v)
            if (rng() % 2)
                l.insert({"a" + std::to_string(a), v});
    return l;
}

void check_oracle_agreement(BodyClass fragment, unsigned seed)
{
    std::mt19937 rng(seed);
    for (int iter = 0; iter < 100; ++iter) {
        auto body = gen::random_body_of_class(rng, fragment, 3, 2, 4);
        auto aut = fragment == BodyClass::Safety ? build_safety_dsa(*body) : build_reach_dfa(*body);
        check_well_formed(aut);
        const Truth decisive = fragment == BodyClass::Safety ? Truth::False : Truth::True;
        Letter x = random_letter(rng, 3, 2), y = random_letter(rng, 3, 2);
        for_each_word(x, y, 6, [&](const std::vector<Letter>& word) {
            Truth automaton = accepts(aut, word);
            Truth oracle = eval_word_bounded(*body, word);
            CHECK(automaton != (decisive == Truth::True ? Truth::False : Truth::True));
            if (automaton == decisive)
                CHECK(oracle == decisive);
            if (oracle == decisive)
                CHECK(automaton == decisive);
        });
    }
}

} // namespace

TEST_CASE("property: reachability automata agree with the bounded evaluator")
{
    check_oracle_agreement(BodyClass::Reachability, 21);
}

TEST_CASE("property: safety automata agree with the bounded evaluator")
{
    check_oracle_agreement(BodyClass::Safety, 22);
}

TEST_CASE("property: every constructed automaton is deterministic, total and absorbing")
{
    std::mt19937 rng(23);
    int built = 0;
    for (int iter = 0; iter < 400; ++iter) {
        auto body = gen::random_body(rng, 2, 2, 5);
        auto cls = classify_body(*body);
        if (cls == BodyClass::Neither)
            continue;
        auto aut = cls == BodyClass::Safety ? build_safety_dsa(*body) : build_reach_dfa(*body);
        check_well_formed(aut);
        ++built;
        for (int q = 0; q < aut.num_states(); ++q) {
            if (!aut.marked(q))
                continue;
            for (LetterMask m = 0; m < (LetterMask(1) << aut.alphabet().size()); ++m)
                CHECK(aut.step(q, m) == q);
        }
    }
    CHECK(built > 100);
}
