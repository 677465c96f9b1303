#include "fixtures.hpp"

#include "hyperplan/errors.hpp"
#include "hyperplan/system.hpp"

#include <doctest.h>

#include <random>

using namespace hyperplan;

TEST_CASE("running system parses with the expected structure")
{
    auto ts = fixtures::running_system();
    CHECK(ts.num_locations() == 2);
    CHECK(ts.num_directions() == 2);
    CHECK(ts.locations()[ts.initial()] == "lA");
    const int lA = ts.location_index("lA"), lB = ts.location_index("lB");
    const int dA = ts.direction_index("dA"), dB = ts.direction_index("dB");
    CHECK(ts.next(lA, dA) == lA);
    CHECK(ts.next(lA, dB) == lB);
    CHECK(ts.next(lB, dA) == lA);
    CHECK(ts.next(lB, dB) == lB);
    CHECK(ts.holds(lA, 0));
    CHECK(ts.label(lB).empty());
}

TEST_CASE("smallest legal system")
{
    auto ts = parse_ts("atoms\nlocations l0\ndirections d\ninit l0\ntrans l0 d l0\n");
    CHECK(ts.num_locations() == 1);
    CHECK(ts.num_atoms() == 0);
    CHECK(ts.next(0, 0) == 0);
}

TEST_CASE("missing transition row is rejected")
{
    std::string text = fixtures::kRunningSystem;
    text.erase(text.find("trans lB dA lA\n"), std::string("trans lB dA lA\n").size());
    try {
        parse_ts(text);
        FAIL("expected a semantic error");
    } catch (const SemanticError& e) {
        CHECK(std::string(e.what()).find("transition function not total") != std::string::npos);
    }
}

TEST_CASE("parse errors carry positions and semantic errors name the culprit")
{
    CHECK_THROWS_AS(parse_ts("atoms a\nbogus x\n"), ParseError);
    try {
        parse_ts("atoms a\nlocations l\ndirections d\ninit l\ntrans l d l\ntrans l d l\n");
        FAIL("expected duplicate error");
    } catch (const SemanticError& e) {
        CHECK(std::string(e.what()).find("duplicate transition") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_ts("atoms a\nlocations l\ndirections d\ninit m\ntrans l d l\n"), SemanticError);
    CHECK_THROWS_AS(parse_ts("atoms a\nlocations l\ndirections d\ninit l\nlabel l b\ntrans l d l\n"),
                    SemanticError);
    CHECK_THROWS_AS(parse_ts("atoms a\nlocations l\ndirections d\ntrans l d l\n"), SemanticError);
    CHECK_THROWS_AS(parse_ts("atoms a\nlocations l\nlocations m\ndirections d\ninit l\ntrans l d l\n"),
                    SemanticError);
    CHECK_THROWS_AS(parse_ts("atoms a\nlocations 1x\ndirections d\ninit 1x\n"), ParseError);
    try {
        parse_ts("atoms a\nlocations l\ndirections d\n  init\n");
        FAIL("expected parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 4);
        CHECK(e.column() == 3);
    }
}

TEST_CASE("run_prefix follows the transition function")
{
    auto ts = fixtures::running_system();
    std::vector<std::string> dirs{"dB", "dA"};
    CHECK(run_prefix(ts, std::span<const std::string>(dirs)) == std::vector<std::string>{"lA", "lB", "lA"});
    std::vector<std::string> none;
    CHECK(run_prefix(ts, std::span<const std::string>(none)) == std::vector<std::string>{"lA"});
    std::vector<std::string> loops{"dA", "dA", "dA"};
    CHECK(run_prefix(ts, std::span<const std::string>(loops)) ==
          std::vector<std::string>{"lA", "lA", "lA", "lA"});
    std::vector<std::string> bad{"dC"};
    CHECK_THROWS_AS(run_prefix(ts, std::span<const std::string>(bad)), SemanticError);
}

namespace {

TransitionSystem random_system(std::mt19937& rng)
{
    std::uniform_int_distribution<int> size(1, 4);
    const int nl = size(rng), nd = size(rng), na = size(rng) - 1;
    std::vector<std::string> atoms, locs, dirs;
    for (int i = 0; i < na; ++i)
        atoms.push_back("a" + std::to_string(i));
    for (int i = 0; i < nl; ++i)
        locs.push_back("L" + std::to_string(i));
    for (int i = 0; i < nd; ++i)
        dirs.push_back("d_" + std::to_string(i));
    std::vector<std::vector<int>> succ(nl, std::vector<int>(nd));
    std::vector<std::vector<int>> labels(nl);
    for (int l = 0; l < nl; ++l) {
        for (int d = 0; d < nd; ++d)
            succ[l][d] = std::uniform_int_distribution<int>(0, nl - 1)(rng);
        for (int a = 0; a < na; ++a)
            if (rng() % 2)
                labels[l].push_back(a);
    }
    return TransitionSystem(atoms, locs, dirs, std::uniform_int_distribution<int>(0, nl - 1)(rng), succ, labels);
}

} // namespace

TEST_CASE("property: run_prefix is a prefix of a path and serialization round-trips")
{
    std::mt19937 rng(7);
    for (int iter = 0; iter < 200; ++iter) {
        auto ts = random_system(rng);
        std::vector<int> dirs(rng() % 8);
        for (int& d : dirs)
            d = std::uniform_int_distribution<int>(0, ts.num_directions() - 1)(rng);
        auto run = run_prefix(ts, std::span<const int>(dirs));
        REQUIRE(run.size() == dirs.size() + 1);
        CHECK(run[0] == ts.initial());
        for (std::size_t j = 0; j + 1 < run.size(); ++j) {
            bool some_direction = false;
            for (int d = 0; d < ts.num_directions(); ++d)
                some_direction |= ts.next(run[j], d) == run[j + 1];
            CHECK(some_direction);
        }

        auto back = parse_ts(serialize_ts(ts));
        CHECK(back.atoms() == ts.atoms());
        CHECK(back.locations() == ts.locations());
        CHECK(back.directions() == ts.directions());
        CHECK(back.initial() == ts.initial());
        for (int l = 0; l < ts.num_locations(); ++l) {
            CHECK(back.label(l) == ts.label(l));
            for (int d = 0; d < ts.num_directions(); ++d)
                CHECK(back.next(l, d) == ts.next(l, d));
        }
    }
}
