#pragma once

#include "hyperplan/formula.hpp"
#include "hyperplan/system.hpp"

#include <string>

namespace fixtures {

// Two locations, a holds only in lA; dA always leads to lA, dB to lB.
inline const char* const kRunningSystem = R"(# running example
atoms a
locations lA lB
directions dA dB
init lA
label lA a
trans lA dA lA
trans lA dB lB
trans lB dA lA
trans lB dB lB
)";

inline const char* const kRunningFormula = "forall p1. exists p2. G (a_p1 <-> X a_p2)";

// Output o copies the secret h chosen in the first step; l holds initially.
inline const char* const kLeakySystem = R"(atoms l h o
locations start sec0 sec1
directions d0 d1
init start
label start l
label sec1 h o
trans start d0 sec0
trans start d1 sec1
trans sec0 d0 sec0
trans sec0 d1 sec0
trans sec1 d0 sec1
trans sec1 d1 sec1
)";

inline const char* const kObservationalDeterminism = "forall p1. forall p2. (l_p1 <-> l_p2) -> G (o_p1 <-> o_p2)";

inline hyperplan::TransitionSystem running_system() { return hyperplan::parse_ts(kRunningSystem); }
inline hyperplan::HyperFormula running_formula() { return hyperplan::parse_formula(kRunningFormula); }

} // namespace fixtures
