#pragma once

#include "hyperplan/formula.hpp"
#include "hyperplan/system.hpp"

#include <map>
#include <span>
#include <vector>

namespace hyperplan {

enum class Truth { False, True, Unknown };

const char* name(Truth t);

/// Three-valued evaluation of `body` at position 0 of a finite word.
///
/// Every subformula is evaluated position by position with Kleene connectives;
/// positions past the end of the word carry unknown atoms. A determined answer
/// holds on every infinite extension of the word; Unknown is returned whenever
/// the prefix alone does not settle the value under this evaluation.
Truth eval_word_bounded(const Body& body, std::span<const Letter> word);

/// Path index (1-based) to a finite location sequence.
using PathAssignment = std::map<int, std::vector<int>>;

/// Bounded evaluation over location prefixes: letters are read off the labels
/// of `ts`. All sequences must have the same length >= 1 and every variable
/// used by `body` must be assigned (SemanticError otherwise).
Truth eval_prefix_bounded(const TransitionSystem& ts, const PathAssignment& assignment, const Body& body);

/// Letter built from one location per path (index i-1 holds path i).
Letter letter_of(const TransitionSystem& ts, std::span<const int> locations);

} // namespace hyperplan
