#pragma once

#include <optional>
#include <vector>

#include "minivc/ast.hpp"

namespace minivc {

/// Guesses a termination metric for a loop from its guard:
///   A < B, A <= B   =>  B - A
///   A > B, A >= B   =>  A - B
///   A != B          =>  B - A
/// A conjunction contributes its first (leftmost) comparison. Returns
/// nothing when no rule applies.
std::optional<ExprPtr> guess_loop_metric(const ExprPtr &guard);

/// Default metric for a recursive callable: the tuple of its int- and
/// datatype-typed in-parameters, in declaration order. May be empty.
std::vector<ExprPtr> guess_callable_metric(const std::vector<Param> &ins);

/// Builds the strict lexicographic-decrease formula "newM < oldM" over
/// metric tuples in VC vocabulary. `types` gives the static type of each
/// position (parallel to the shorter tuple). Unequal lengths compare the
/// common prefix and require a strict decrease within it. Boundedness
/// (old >= 0 for ints; ranks and lengths are nonnegative by construction)
/// is folded into the strict conjunct.
ExprPtr lex_less(const std::vector<ExprPtr> &newM,
                 const std::vector<ExprPtr> &oldM,
                 const std::vector<TypePtr> &types);

} // namespace minivc
