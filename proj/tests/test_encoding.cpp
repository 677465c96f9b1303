#include "fixtures.hpp"
#include "generators.hpp"

#include "hyperplan/encoding.hpp"
#include "hyperplan/errors.hpp"
#include "hyperplan/semantics.hpp"

#include <doctest.h>

#include <json.hpp>

#include <set>

using namespace hyperplan;

namespace {

PlanningState product(std::vector<int> locs, int q) { return {PlanningState::Kind::Product, std::move(locs), q}; }

struct Running {
    TransitionSystem ts = fixtures::running_system();
    HyperFormula f = fixtures::running_formula();
    DetAutomaton dsa = build_safety_dsa(f.body());
    QDecPomdp enc = encode_safe(ts, f, dsa);
    int lA = ts.location_index("lA"), lB = ts.location_index("lB");
    int dA = ts.direction_index("dA"), dB = ts.direction_index("dB");
};

// Every n-tuple of directions, first path most significant.
std::vector<std::vector<int>> all_tuples(int n, int nd)
{
    std::vector<std::vector<int>> out{{}};
    for (int i = 0; i < n; ++i) {
        std::vector<std::vector<int>> next;
        for (const auto& t : out)
            for (int d = 0; d < nd; ++d) {
                auto u = t;
                u.push_back(d);
                next.push_back(u);
            }
        out = std::move(next);
    }
    return out;
}

// Independent successor computation straight from the definition: all full
// direction tuples that agree with the joint action on existential paths.
std::set<PlanningState> oracle_image(const TransitionSystem& ts, const HyperFormula& f, const DetAutomaton& aut,
                                     Variant variant, const PlanningState& s, const JointAction& ja)
{
    if (!s.is_product())
        return {s};
    if (variant == Variant::Safe && aut.marked(s.q))
        return {PlanningState::lose()};
    const int q_next = aut.step(s.q, letter_of(ts, s.locs));
    const auto ex = f.existential_vars();
    std::set<PlanningState> out;
    for (const auto& dirs : all_tuples(f.num_paths(), ts.num_directions())) {
        bool agrees = true;
        for (std::size_t i = 0; i < ex.size(); ++i)
            agrees &= dirs[ex[i] - 1] == ja[i];
        if (!agrees)
            continue;
        PlanningState t = product(std::vector<int>(f.num_paths()), q_next);
        for (int p = 0; p < f.num_paths(); ++p)
            t.locs[p] = ts.next(s.locs[p], dirs[p]);
        out.insert(t);
    }
    if (variant == Variant::Safe)
        out.insert(PlanningState::win());
    return out;
}

void check_against_oracle(const TransitionSystem& ts, const HyperFormula& f, const DetAutomaton& aut,
                          const QDecPomdp& enc)
{
    // the materialized set is closed under images and contains the initial state
    CHECK(enc.state(0) == product(std::vector<int>(f.num_paths(), ts.initial()), aut.initial()));
    for (int s = 0; s < enc.num_states(); ++s) {
        for (int a = 0; a < enc.num_actions(); ++a) {
            std::set<PlanningState> got;
            for (int t : enc.image(s, a))
                got.insert(enc.state(t));
            CHECK(got == oracle_image(ts, f, aut, enc.variant(), enc.state(s), enc.action(a)));
        }
    }
    // everything materialized is reachable
    std::set<int> seen{0};
    std::vector<int> stack{0};
    while (!stack.empty()) {
        int s = stack.back();
        stack.pop_back();
        for (int a = 0; a < enc.num_actions(); ++a)
            for (int t : enc.image(s, a))
                if (seen.insert(t).second)
                    stack.push_back(t);
    }
    CHECK(static_cast<int>(seen.size()) == enc.num_states());
    CHECK(static_cast<std::uint64_t>(enc.num_states()) <= enc.state_space_size());
}

} // namespace

TEST_CASE("running example safe encoding")
{
    Running r;
    CHECK(r.enc.variant() == Variant::Safe);
    // 16 product tuples + 2 sinks before pruning; q0 is only the initial state
    CHECK(r.enc.state_space_size() == 18);
    CHECK(r.enc.num_states() == 15);
    int products = 0;
    for (const auto& s : reachable_states(r.enc))
        products += s.is_product();
    CHECK(products == 13);
    CHECK(r.enc.win().has_value());
    CHECK(r.enc.lose().has_value());
    CHECK(r.enc.state(0) == product({r.lA, r.lA}, 0));
    CHECK(r.enc.num_actions() == 2);

    const auto& img = r.enc.image(0, r.enc.action_index({r.dA}));
    std::set<PlanningState> got;
    for (int t : img)
        got.insert(r.enc.state(t));
    CHECK(got.count(product({r.lA, r.lA}, 1)));
    CHECK(got.count(product({r.lB, r.lA}, 1)));
    CHECK(got.count(PlanningState::win()));
    CHECK(got.size() == 3);

    for (int s = 0; s < r.enc.num_states(); ++s) {
        const auto& st = r.enc.state(s);
        if (st.is_product() && st.q == 3)
            for (int a = 0; a < r.enc.num_actions(); ++a)
                CHECK(r.enc.image(s, a) == std::vector<int>{*r.enc.lose()});
    }
    CHECK(r.enc.goal(*r.enc.win()));
    CHECK_FALSE(r.enc.goal(0));
    check_against_oracle(r.ts, r.f, r.dsa, r.enc);
}

TEST_CASE("observations are location prefixes and hide the automaton state")
{
    Running r;
    auto s = *r.enc.find(product({r.lB, r.lA}, 1));
    CHECK(r.enc.observe(1, s).locs == std::vector<int>{r.lB});
    CHECK(r.enc.observe(2, s).locs == std::vector<int>{r.lB, r.lA});
    CHECK(r.enc.observe(2, *r.enc.win()).kind == Observation::Kind::Win);
    CHECK(r.enc.observe(2, *r.enc.lose()).kind == Observation::Kind::Lose);
    CHECK_THROWS_AS(r.enc.observe(3, s), SemanticError);
}

TEST_CASE("existential-only reach encoding is deterministic")
{
    auto ts = fixtures::running_system();
    auto f = parse_formula("exists p1. exists p2. F (a_p1 & !a_p2)");
    auto dfa = build_reach_dfa(f.body());
    auto enc = encode_reach(ts, f, dfa);
    CHECK(enc.num_actions() == 4);
    for (int s = 0; s < enc.num_states(); ++s)
        for (int a = 0; a < enc.num_actions(); ++a)
            CHECK(enc.image(s, a).size() == 1);
    CHECK(static_cast<std::uint64_t>(enc.num_states()) <= enc.state_space_size());
    CHECK(enc.state_space_size() == 4 * 2);
    CHECK(enc.action(2) == JointAction{1, 0});
    CHECK(enc.action_index({1, 0}) == 2);
    check_against_oracle(ts, f, dfa, enc);
}

TEST_CASE("forall-exists reach images have one successor per universal direction")
{
    auto ts = fixtures::running_system();
    auto f = parse_formula("forall p1. exists p2. F (a_p1 & !a_p2)");
    auto dfa = build_reach_dfa(f.body());
    auto enc = encode_reach(ts, f, dfa);
    for (int a = 0; a < enc.num_actions(); ++a)
        CHECK(enc.image(0, a).size() == 2);
}

TEST_CASE("one-location system reaches one product state per automaton state")
{
    auto ts = parse_ts("atoms a\nlocations l\ndirections d\ninit l\nlabel l a\ntrans l d l\n");
    auto f = parse_formula("exists p. F a_p");
    auto dfa = build_reach_dfa(f.body());
    auto enc = encode_reach(ts, f, dfa);
    CHECK(enc.num_states() <= dfa.num_states());
    CHECK(enc.num_states() == 2);
}

TEST_CASE("encoding rejects mismatched inputs")
{
    Running r;
    auto other = parse_formula("forall p1. exists p2. G a_p1");
    CHECK_THROWS_AS(encode_safe(r.ts, other, r.dsa), SemanticError);
    CHECK_THROWS_AS(encode_reach(r.ts, r.f, r.dsa), SemanticError);
    auto unknown = parse_formula("forall p1. exists p2. G (b_p1 <-> a_p2)");
    CHECK_THROWS_AS(encode_safe(r.ts, unknown, build_safety_dsa(unknown.body())), SemanticError);
    auto reach = parse_formula("exists p. F a_p");
    CHECK_THROWS_AS(encode_safe(r.ts, reach, build_reach_dfa(reach.body())), SemanticError);
}

TEST_CASE("json dump lists every state and image")
{
    Running r;
    auto doc = nlohmann::json::parse(encoding_to_json(r.enc, r.ts, r.f));
    CHECK(doc["format"] == "hyperplan-encoding");
    CHECK(doc["states"].size() == 15);
    CHECK(doc["delta"][0].size() == 2);
    CHECK(doc["states"][0]["locs"] == nlohmann::json::array({"lA", "lA"}));
    CHECK(doc["actions"][1] == nlohmann::json::array({"dB"}));
}

TEST_CASE("property: encodings match the definition on random instances")
{
    std::mt19937 rng(31);
    for (int iter = 0; iter < 150; ++iter) {
        auto ts = gen::random_system(rng, 3, 2, 2);
        static const char* words[] = {"AE", "EE", "AEA", "E", "EA", "AAE"};
        const std::string word = words[iter % 6];
        const bool safe = iter % 2 == 0;
        auto body = gen::random_body_of_class(rng, safe ? BodyClass::Safety : BodyClass::Reachability, 2,
                                              static_cast<int>(word.size()), 4);
        auto f = gen::formula_of(word, body);
        auto aut = safe ? build_safety_dsa(f.body()) : build_reach_dfa(f.body());
        auto enc = safe ? encode_safe(ts, f, aut) : encode_reach(ts, f, aut);
        check_against_oracle(ts, f, aut, enc);

        // observations grow with the agent index
        for (int s = 0; s < enc.num_states(); ++s) {
            if (!enc.state(s).is_product())
                continue;
            for (int i = 1; i < f.num_paths(); ++i) {
                auto small = enc.observe(i, s).locs, big = enc.observe(i + 1, s).locs;
                CHECK(std::equal(small.begin(), small.end(), big.begin()));
                CHECK(big.size() == small.size() + 1);
            }
        }
        // safe trichotomy
        if (safe) {
            for (int s = 0; s < enc.num_states(); ++s) {
                const auto& st = enc.state(s);
                if (!st.is_product())
                    continue;
                for (int a = 0; a < enc.num_actions(); ++a) {
                    const auto& img = enc.image(s, a);
                    if (aut.marked(st.q))
                        CHECK(img == std::vector<int>{*enc.lose()});
                    else
                        CHECK(std::find(img.begin(), img.end(), *enc.win()) != img.end());
                }
            }
        }
    }
}
