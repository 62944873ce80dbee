#pragma once

#include <string>
#include <vector>

#include "minivc/resolver.hpp"
#include "minivc/vcgen.hpp"

namespace minivc {

/// One obligation lowered to SMT-LIB2. `text` declares the obligation's free
/// variables, asserts the hypotheses and the negated goal, and ends with
/// (check-sat)(get-model); it is meant to run inside (push 1)/(pop 1) after
/// the shared preamble. `quantified` is true when a sat answer cannot be
/// trusted as a genuine countermodel (quantifiers or axiomatized symbols
/// occur in the query).
struct SmtQuery {
  std::string text;
  bool quantified = false;
  std::vector<std::string> freeVars; // source-level names, for model display
};

/// Deterministic lowering of a resolved program to SMT-LIB2: heap as
/// Array Int (Array Int Int) with null = 0, monomorphized datatypes
/// (type variables become Int), sequence/multiset/rank axioms, and
/// fuel-guarded defining axioms for functions.
class SmtLowering {
public:
  SmtLowering(const ResolvedProgram &rp, int fuel = 2);

  /// Shared sorts, declarations and axioms for every query of the program.
  const std::string &preamble() const { return preamble_; }

  SmtQuery lower(const Obligation &ob) const;

private:
  struct Impl;
  std::shared_ptr<Impl> impl_;
  std::string preamble_;
};

} // namespace minivc
