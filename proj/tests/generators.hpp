#pragma once

// Seeded random instance generators shared by the property and acceptance tests.

#include "hyperplan/formula.hpp"
#include "hyperplan/system.hpp"

#include <random>
#include <string>
#include <vector>

namespace gen {

using namespace hyperplan;

inline int uniform(std::mt19937& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

/// Random body over atoms a0..a{atoms-1} and paths 1..paths, depth <= max_depth.
inline BodyPtr random_body(std::mt19937& rng, int atoms, int paths, int max_depth)
{
    if (max_depth <= 1 || uniform(rng, 0, 9) < 2) {
        if (uniform(rng, 0, 15) == 0)
            return uniform(rng, 0, 1) ? ltl::tt() : ltl::ff();
        return ltl::atom("a" + std::to_string(uniform(rng, 0, atoms - 1)), uniform(rng, 1, paths));
    }
    auto sub = [&] { return random_body(rng, atoms, paths, max_depth - 1); };
    switch (uniform(rng, 0, 10)) {
    case 0: return ltl::neg(sub());
    case 1: return ltl::conj(sub(), sub());
    case 2: return ltl::disj(sub(), sub());
    case 3: return ltl::implies(sub(), sub());
    case 4: return ltl::iff(sub(), sub());
    case 5:
    case 6: return ltl::next(sub());
    case 7: return ltl::until(sub(), sub());
    case 8: return ltl::eventually(sub());
    default: return ltl::globally(sub());
    }
}

/// Rejection-samples a body of the requested class. Safety samples must use G
/// so that they are not also reachability bodies.
inline BodyPtr random_body_of_class(std::mt19937& rng, BodyClass wanted, int atoms, int paths, int max_depth)
{
    for (;;) {
        BodyPtr b = random_body(rng, atoms, paths, max_depth);
        if (classify_body(*b) == wanted)
            return b;
    }
}

inline std::vector<QuantifiedVar> prefix_of(const std::string& word)
{
    std::vector<QuantifiedVar> prefix;
    for (std::size_t i = 0; i < word.size(); ++i)
        prefix.push_back({word[i] == 'A' ? Quantifier::Forall : Quantifier::Exists,
                          PathVar{"p" + std::to_string(i + 1), static_cast<int>(i) + 1}});
    return prefix;
}

inline HyperFormula formula_of(const std::string& word, BodyPtr body) { return HyperFormula(prefix_of(word), body); }

/// Random system with the given number of atoms named a0, a1, ...
inline TransitionSystem random_system(std::mt19937& rng, int max_locations, int directions, int atoms)
{
    const int nl = uniform(rng, 1, max_locations);
    std::vector<std::string> atom_names, locs, dirs;
    for (int i = 0; i < atoms; ++i)
        atom_names.push_back("a" + std::to_string(i));
    for (int i = 0; i < nl; ++i)
        locs.push_back("l" + std::to_string(i));
    for (int i = 0; i < directions; ++i)
        dirs.push_back("d" + std::to_string(i));
    std::vector<std::vector<int>> succ(nl, std::vector<int>(directions));
    std::vector<std::vector<int>> labels(nl);
    for (int l = 0; l < nl; ++l) {
        for (int d = 0; d < directions; ++d)
            succ[l][d] = uniform(rng, 0, nl - 1);
        for (int a = 0; a < atoms; ++a)
            if (uniform(rng, 0, 1))
                labels[l].push_back(a);
    }
    return TransitionSystem(atom_names, locs, dirs, 0, succ, labels);
}

} // namespace gen
