#pragma once

#include "minivc/vcgen.hpp"

namespace minivc {

/// Preprocesses an obligation before SMT lowering:
///   - splits conjunctive hypotheses and drops trivially true ones,
///   - propagates literal equalities (x == 3) into the other formulas,
///   - tightens integer bounds (k >= 1 together with k <= 1 pins k to 1),
///   - constant-folds arithmetic, comparisons, conditionals, and calls of
///     user functions on all-literal arguments via the reference interpreter.
///
/// If a hypothesis folds to false or the goal folds to true the result has
/// goal `true` and no hypotheses; callers can skip the solver entirely.
/// The transformation is validity-preserving in both directions.
Obligation simplify_obligation(const ResolvedProgram &rp, const Obligation &ob);

} // namespace minivc
