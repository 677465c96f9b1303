#pragma once

#include "hyperplan/factored.hpp"
#include "hyperplan/formula.hpp"
#include "hyperplan/policy.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace hyperplan {

/// Domain and problem texts plus the JSON manifest mapping every emitted
/// object and action name back to path variables, locations, automaton
/// states and direction tuples.
struct PddlDocuments {
    std::string domain;
    std::string problem;
    std::string manifest;
};

/// Objects: `path-<p>`, `loc-<p>-<l>`, `q-<i>`, all domain constants.
/// Predicates: (at ?p ?l), (autstate ?q) and the variant's flags.
/// One action `move-<d...>` per existential direction tuple; its effect is a
/// single `oneof` when it has several outcomes, a plain conjunction otherwise.
/// Throws UnsupportedError unless `cls` is ExistsOnly or ForallExists.
PddlDocuments emit_pddl(const FactoredEncoding& fenc, PrefixClass cls);

/// Reads back exactly the fragment emit_pddl writes (grammar in
/// docs/pddl-fragment.md). Throws ParseError on malformed text,
/// UnsupportedError on constructs outside the fragment and SemanticError on
/// names the manifest does not explain.
FactoredEncoding parse_pddl(const PddlDocuments& docs);

/// ground_factored(parse_pddl(docs)).
GroundedStructure ground_pddl(const PddlDocuments& docs, std::size_t max_states = 1'000'000);

/// Standalone well-formedness check: balanced s-expressions, declared
/// predicates, types and objects only, correct arities and argument types.
/// Returns one message per problem found; empty means well-formed.
std::vector<std::string> pddl_problems(std::string_view domain, std::string_view problem);

/// Controller JSON whose actions must all be actions of the manifest.
Controller ingest_policy(std::string_view controller_json, const PddlDocuments& docs, const TransitionSystem& ts,
                         const HyperFormula& f);

} // namespace hyperplan
