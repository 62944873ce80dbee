#pragma once

#include <map>
#include <string>
#include <vector>

#include "minivc/ast.hpp"
#include "minivc/diag.hpp"
#include "minivc/resolver.hpp"

namespace minivc {

/// One proof obligation: valid(hypotheses ==> goal) must hold. Formulas are
/// in VC vocabulary: the heap is explicit (variables "$heap" for the entry
/// state — substituted to "$heap!old" in methods — and fresh "$heap!k"
/// symbols after havocs), and internal operators appear as $-prefixed
/// function calls:
///   $read(h,a,i)    array element        $store(h,a,i,v)  heap update
///   $length(a)      array length (heap-independent)
///   $slice(h,a,lo,hi) -> seq             $seqindex(s,i), $seqlen(s)
///   $ms(s)          multiset of a seq    $heaplet(h,a)    one array's cells
///   $rank(d)        datatype rank        $is$C(d)         constructor test
/// Free variables are implicitly universally quantified.
struct Obligation {
  std::vector<ExprPtr> hypotheses;
  ExprPtr goal;
  DiagKind kind = DiagKind::Assertion;
  SourceSpan span;
  std::string label;    // human description, e.g. "loop invariant ... on entry"
  std::string declName; // enclosing method/function/lemma
};

/// Termination metric attached to a loop or callable, for --show-decreases.
struct MetricInfo {
  SourceSpan span;
  std::vector<ExprPtr> metric; // surface syntax
  bool guessed = false;
};

struct DeclVCs {
  std::string name;
  SourceSpan span;
  bool bodiless = false;
  std::vector<Obligation> obligations;
  std::vector<MetricInfo> metrics; // callable metric (if recursive) + loops
};

struct VcResult {
  std::vector<DeclVCs> decls;
  std::vector<Diagnostic> diagnostics;

  bool ok() const {
    for (const auto &d : diagnostics)
      if (d.severity == Severity::Error)
        return false;
    return true;
  }
};

VcResult generate_vcs(const ResolvedProgram &rp);

/// Capture-free substitution of variables by terms (VC vocabulary; all
/// binders introduced by translation are fresh).
ExprPtr subst_vars(const ExprPtr &e, const std::map<std::string, ExprPtr> &m);

/// Translates a one-state expression (function body or requires clause,
/// with `declName` as the enclosing declaration) into VC vocabulary. The
/// heap appears as the free variable "$heap"; parameters stay free.
ExprPtr translate_one_state(const ResolvedProgram &rp,
                            const std::string &declName, const ExprPtr &e);

/// Functions whose value depends on the heap (nonempty reads, transitively).
std::set<std::string> heap_reading_functions(const ResolvedProgram &rp);

} // namespace minivc
