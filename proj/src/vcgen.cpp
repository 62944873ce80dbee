#include "minivc/vcgen.hpp"

#include <algorithm>
#include <cassert>
#include <set>

#include "minivc/pretty.hpp"
#include "minivc/termination.hpp"

namespace minivc {

namespace {

// ---------------------------------------------------------------------------
// Formula builders
// ---------------------------------------------------------------------------

ExprPtr typed(ExprPtr e, TypePtr t) {
  const_cast<Expr &>(*e).type = std::move(t);
  return e;
}

ExprPtr varT(const std::string &n, TypePtr t) {
  return typed(mk_var(n), std::move(t));
}

ExprPtr bbin(BinOp op, ExprPtr a, ExprPtr b) {
  return typed(mk_binary(op, std::move(a), std::move(b)), Type::boolType());
}

ExprPtr conj(ExprPtr a, ExprPtr b) { return bbin(BinOp::And, a, b); }
ExprPtr impl(ExprPtr a, ExprPtr b) { return bbin(BinOp::Implies, a, b); }
ExprPtr notE(ExprPtr a) {
  return typed(mk_unary(UnOp::Not, std::move(a)), Type::boolType());
}

ExprPtr conjAll(const std::vector<ExprPtr> &es) {
  if (es.empty())
    return typed(mk_bool(true), Type::boolType());
  ExprPtr r = es[0];
  for (size_t i = 1; i < es.size(); ++i)
    r = conj(r, es[i]);
  return r;
}

ExprPtr icall(const std::string &f, std::vector<ExprPtr> args, TypePtr t) {
  return typed(mk_fncall(f, std::move(args)), std::move(t));
}

bool isHeapVar(const ExprPtr &e) {
  return e->kind == ExprKind::Var && e->name.rfind("$heap", 0) == 0;
}

// ---------------------------------------------------------------------------
// Substitution
// ---------------------------------------------------------------------------

ExprPtr substRec(const ExprPtr &e, const std::map<std::string, ExprPtr> &m) {
  switch (e->kind) {
  case ExprKind::IntLit:
  case ExprKind::BoolLit:
  case ExprKind::NullLit:
    return e;
  case ExprKind::Var: {
    auto it = m.find(e->name);
    return it == m.end() ? e : it->second;
  }
  case ExprKind::Forall: {
    std::map<std::string, ExprPtr> inner = m;
    for (const auto &b : e->bound)
      inner.erase(b.name);
    if (inner.empty())
      return e;
    ExprPtr body = substRec(e->args[0], inner);
    if (body == e->args[0])
      return e;
    auto r = std::make_shared<Expr>(*e);
    r->args = {body};
    return r;
  }
  default: {
    bool changed = false;
    std::vector<ExprPtr> args;
    args.reserve(e->args.size());
    for (const auto &a : e->args) {
      args.push_back(substRec(a, m));
      changed |= args.back() != a;
    }
    if (!changed)
      return e;
    auto r = std::make_shared<Expr>(*e);
    r->args = std::move(args);
    return r;
  }
  }
}

bool exprListEqual(const std::vector<ExprPtr> &a,
                   const std::vector<ExprPtr> &b) {
  if (a.size() != b.size())
    return false;
  for (size_t i = 0; i < a.size(); ++i)
    if (!expr_equal(a[i], b[i]))
      return false;
  return true;
}

// ---------------------------------------------------------------------------
// The generator
// ---------------------------------------------------------------------------

struct Ob {
  int id;
  DiagKind kind;
  SourceSpan span;
  std::string label;
  std::vector<ExprPtr> hyps;
  ExprPtr goal;

  ExprPtr folded() const {
    ExprPtr g = goal;
    for (size_t i = hyps.size(); i-- > 0;)
      g = impl(hyps[i], g);
    return g;
  }
};

class Gen {
public:
  Gen(const ResolvedProgram &rp, VcResult &out) : rp_(rp), out_(out) {
    computeHeapReaders();
  }

  ExprPtr translateOneState(const std::string &declName, const ExprPtr &e) {
    curDecl_ = declName;
    return tr(e, heapVar(), heapVar());
  }

  const std::set<std::string> &heapReaders() const { return heapReaders_; }

  void run() {
    for (const auto &d : rp_.program.decls) {
      if (const auto *m = std::get_if<MethodDecl>(&d))
        genMethod(*m);
      else if (const auto *f = std::get_if<FunctionDecl>(&d))
        genFunction(*f);
    }
  }

private:
  const ResolvedProgram &rp_;
  VcResult &out_;
  std::set<std::string> heapReaders_; // functions whose value depends on heap

  // per-declaration state
  std::string curDecl_;
  int fresh_ = 0;
  std::vector<ExprPtr> curMetric_; // translated; for intra-SCC calls
  std::vector<TypePtr> curMetricTypes_;
  DeclVCs *vcs_ = nullptr;

  std::string freshName(const std::string &base) {
    return base + "!" + std::to_string(fresh_++);
  }

  void computeHeapReaders() {
    for (const auto &[n, f] : rp_.functions)
      if (!f->reads_.empty())
        heapReaders_.insert(n);
    bool changed = true;
    while (changed) {
      changed = false;
      for (const auto &[n, f] : rp_.functions) {
        if (heapReaders_.count(n))
          continue;
        auto cg = rp_.callGraph.find(n);
        if (cg == rp_.callGraph.end())
          continue;
        for (const auto &callee : cg->second)
          if (heapReaders_.count(callee)) {
            heapReaders_.insert(n);
            changed = true;
            break;
          }
      }
    }
  }

  static size_t paramIndex(const std::vector<Param> &ps,
                           const std::string &n) {
    for (size_t i = 0; i < ps.size(); ++i)
      if (ps[i].name == n)
        return i;
    return ps.size();
  }

  TypePtr fieldType(const ExprPtr &value, const std::string &field) {
    auto it = rp_.fields.find(field);
    if (it == rp_.fields.end())
      return Type::intType();
    TypePtr ft = it->second.ctor->fields[it->second.index].type;
    // instantiate the datatype's parameters from the value's static type
    const DatatypeDecl *dt = it->second.dt;
    std::map<std::string, TypePtr> su;
    if (value->type && value->type->kind == TypeKind::Datatype)
      for (size_t i = 0;
           i < dt->typeParams.size() && i < value->type->args.size(); ++i)
        su[dt->typeParams[i]] = value->type->args[i];
    return instantiate(ft, su);
  }

  static TypePtr instantiate(const TypePtr &t,
                             const std::map<std::string, TypePtr> &su) {
    if (!t)
      return t;
    if (t->kind == TypeKind::TypeVar) {
      auto it = su.find(t->name);
      return it == su.end() ? t : it->second;
    }
    if (t->args.empty())
      return t;
    std::vector<TypePtr> args;
    for (const auto &a : t->args)
      args.push_back(instantiate(a, su));
    auto r = std::make_shared<Type>(*t);
    r->args = std::move(args);
    return r;
  }

  // -------------------------------------------------------------------------
  // Surface-to-VC translation. `heap` is the term for the current heap,
  // `oldHeap` the one old(..) refers to. Quantifier binders are renamed to
  // fresh names so substitution never captures.
  // -------------------------------------------------------------------------

  ExprPtr tr(const ExprPtr &e, const ExprPtr &heap, const ExprPtr &oldHeap,
             std::map<std::string, ExprPtr> &ren) {
    switch (e->kind) {
    case ExprKind::IntLit:
    case ExprKind::BoolLit:
      return e;
    case ExprKind::NullLit:
      return typed(mk_int(0, e->span), e->type);
    case ExprKind::Var: {
      auto it = ren.find(e->name);
      return it == ren.end() ? e : it->second;
    }
    case ExprKind::Old:
      return tr(e->args[0], oldHeap, oldHeap, ren);
    case ExprKind::ArrayIndex: {
      ExprPtr a = tr(e->args[0], heap, oldHeap, ren);
      ExprPtr i = tr(e->args[1], heap, oldHeap, ren);
      if (e->args[0]->type && e->args[0]->type->kind == TypeKind::Seq)
        return icall("$seqindex", {a, i}, e->type);
      return icall("$read", {heap, a, i}, e->type);
    }
    case ExprKind::ArrayLength:
      return icall("$length", {tr(e->args[0], heap, oldHeap, ren)},
                   Type::intType());
    case ExprKind::SeqSlice: {
      ExprPtr a = tr(e->args[0], heap, oldHeap, ren);
      size_t k = 1;
      ExprPtr lo = e->hasLo ? tr(e->args[k++], heap, oldHeap, ren)
                            : typed(mk_int(0), Type::intType());
      ExprPtr hi = e->hasHi ? tr(e->args[k++], heap, oldHeap, ren)
                            : icall("$length", {a}, Type::intType());
      return icall("$slice", {heap, a, lo, hi}, e->type);
    }
    case ExprKind::MultisetOf:
      return icall("$ms", {tr(e->args[0], heap, oldHeap, ren)}, e->type);
    case ExprKind::Forall: {
      auto r = std::make_shared<Expr>(*e);
      std::map<std::string, ExprPtr> inner = ren;
      for (auto &b : r->bound) {
        std::string fn = freshName(b.name);
        inner[b.name] = varT(fn, b.type);
        b.name = fn;
      }
      r->args = {tr(e->args[0], heap, oldHeap, inner)};
      return r;
    }
    case ExprKind::FnCall: {
      std::vector<ExprPtr> args;
      if (heapReaders_.count(e->name))
        args.push_back(heap);
      for (const auto &a : e->args)
        args.push_back(tr(a, heap, oldHeap, ren));
      auto r = std::make_shared<Expr>(*e);
      r->args = std::move(args);
      return r;
    }
    default: { // Binary, Unary, CtorCall, DtorAccess, IfThenElse
      auto r = std::make_shared<Expr>(*e);
      for (auto &a : r->args)
        a = tr(a, heap, oldHeap, ren);
      return r;
    }
    }
  }

  ExprPtr tr(const ExprPtr &e, const ExprPtr &heap, const ExprPtr &oldHeap) {
    std::map<std::string, ExprPtr> ren;
    return tr(e, heap, oldHeap, ren);
  }

  ExprPtr heapVar() { return mk_var("$heap"); }
  ExprPtr oldHeapVar() { return mk_var("$heap!old"); }

  ExprPtr trCur(const ExprPtr &e) { return tr(e, heapVar(), oldHeapVar()); }

  // -------------------------------------------------------------------------
  // Well-formedness obligations (bounds, null, division, function
  // preconditions, recursive-call decreases) with short-circuit path
  // conditions: in A && B the checks of B assume A, and so on.
  // -------------------------------------------------------------------------

  int nextId_ = 0;
  Ob mkOb(DiagKind k, SourceSpan sp, std::string label,
          std::vector<ExprPtr> hyps, ExprPtr goal) {
    return Ob{nextId_++, k, sp, std::move(label), std::move(hyps),
              std::move(goal)};
  }

  void wf(const ExprPtr &e, const ExprPtr &heap, const ExprPtr &oldHeap,
          std::map<std::string, ExprPtr> &ren, std::vector<ExprPtr> &path,
          std::vector<Ob> &out) {
    auto emit = [&](DiagKind k, SourceSpan sp, std::string label,
                    ExprPtr goal) {
      out.push_back(mkOb(k, sp, std::move(label), path, std::move(goal)));
    };
    switch (e->kind) {
    case ExprKind::IntLit:
    case ExprKind::BoolLit:
    case ExprKind::NullLit:
    case ExprKind::Var:
      return;
    case ExprKind::Old: {
      wf(e->args[0], oldHeap, oldHeap, ren, path, out);
      return;
    }
    case ExprKind::Binary: {
      switch (e->bop) {
      case BinOp::And:
      case BinOp::Implies: {
        wf(e->args[0], heap, oldHeap, ren, path, out);
        path.push_back(tr(e->args[0], heap, oldHeap, ren));
        wf(e->args[1], heap, oldHeap, ren, path, out);
        path.pop_back();
        return;
      }
      case BinOp::Or: {
        wf(e->args[0], heap, oldHeap, ren, path, out);
        path.push_back(notE(tr(e->args[0], heap, oldHeap, ren)));
        wf(e->args[1], heap, oldHeap, ren, path, out);
        path.pop_back();
        return;
      }
      case BinOp::Explies: {
        wf(e->args[1], heap, oldHeap, ren, path, out);
        path.push_back(tr(e->args[1], heap, oldHeap, ren));
        wf(e->args[0], heap, oldHeap, ren, path, out);
        path.pop_back();
        return;
      }
      case BinOp::Div:
      case BinOp::Mod: {
        wf(e->args[0], heap, oldHeap, ren, path, out);
        wf(e->args[1], heap, oldHeap, ren, path, out);
        emit(DiagKind::Division, e->span, "divisor is nonzero",
             bbin(BinOp::Ne, tr(e->args[1], heap, oldHeap, ren), mk_int(0)));
        return;
      }
      default:
        wf(e->args[0], heap, oldHeap, ren, path, out);
        wf(e->args[1], heap, oldHeap, ren, path, out);
        return;
      }
    }
    case ExprKind::Unary:
      wf(e->args[0], heap, oldHeap, ren, path, out);
      return;
    case ExprKind::IfThenElse: {
      wf(e->args[0], heap, oldHeap, ren, path, out);
      ExprPtr c = tr(e->args[0], heap, oldHeap, ren);
      path.push_back(c);
      wf(e->args[1], heap, oldHeap, ren, path, out);
      path.back() = notE(c);
      wf(e->args[2], heap, oldHeap, ren, path, out);
      path.pop_back();
      return;
    }
    case ExprKind::ArrayIndex: {
      wf(e->args[0], heap, oldHeap, ren, path, out);
      wf(e->args[1], heap, oldHeap, ren, path, out);
      ExprPtr a = tr(e->args[0], heap, oldHeap, ren);
      ExprPtr i = tr(e->args[1], heap, oldHeap, ren);
      if (e->args[0]->type && e->args[0]->type->kind == TypeKind::Seq) {
        emit(DiagKind::IndexBounds, e->span, "index is within bounds",
             conj(bbin(BinOp::Le, mk_int(0), i),
                  bbin(BinOp::Lt, i,
                       icall("$seqlen", {a}, Type::intType()))));
        return;
      }
      emit(DiagKind::NullDeref, e->span, "array is non-null",
           bbin(BinOp::Ne, a, mk_int(0)));
      emit(DiagKind::IndexBounds, e->span, "index is within bounds",
           conj(bbin(BinOp::Le, mk_int(0), i),
                bbin(BinOp::Lt, i, icall("$length", {a}, Type::intType()))));
      return;
    }
    case ExprKind::ArrayLength: {
      wf(e->args[0], heap, oldHeap, ren, path, out);
      emit(DiagKind::NullDeref, e->span, "array is non-null",
           bbin(BinOp::Ne, tr(e->args[0], heap, oldHeap, ren), mk_int(0)));
      return;
    }
    case ExprKind::SeqSlice: {
      wf(e->args[0], heap, oldHeap, ren, path, out);
      for (size_t i = 1; i < e->args.size(); ++i)
        wf(e->args[i], heap, oldHeap, ren, path, out);
      ExprPtr a = tr(e->args[0], heap, oldHeap, ren);
      size_t k = 1;
      ExprPtr lo = e->hasLo ? tr(e->args[k++], heap, oldHeap, ren)
                            : typed(mk_int(0), Type::intType());
      ExprPtr hi = e->hasHi ? tr(e->args[k++], heap, oldHeap, ren)
                            : icall("$length", {a}, Type::intType());
      emit(DiagKind::NullDeref, e->span, "array is non-null",
           bbin(BinOp::Ne, a, mk_int(0)));
      emit(DiagKind::IndexBounds, e->span, "slice bounds are within range",
           conj(conj(bbin(BinOp::Le, mk_int(0), lo),
                     bbin(BinOp::Le, lo, hi)),
                bbin(BinOp::Le, hi, icall("$length", {a}, Type::intType()))));
      return;
    }
    case ExprKind::MultisetOf:
      wf(e->args[0], heap, oldHeap, ren, path, out);
      return;
    case ExprKind::Forall: {
      // checks inside the body become quantified obligations
      std::map<std::string, ExprPtr> inner = ren;
      std::vector<BoundVar> bs = e->bound;
      for (auto &b : bs) {
        std::string fn = freshName(b.name);
        inner[b.name] = varT(fn, b.type);
        b.name = fn;
      }
      std::vector<ExprPtr> innerPath;
      std::vector<Ob> innerObs;
      wf(e->args[0], heap, oldHeap, inner, innerPath, innerObs);
      for (auto &ob : innerObs) {
        auto q = std::make_shared<Expr>();
        q->kind = ExprKind::Forall;
        q->span = e->span;
        q->bound = bs;
        q->args = {ob.folded()};
        q->type = Type::boolType();
        out.push_back(mkOb(ob.kind, ob.span, ob.label, path, q));
      }
      return;
    }
    case ExprKind::DtorAccess: {
      wf(e->args[0], heap, oldHeap, ren, path, out);
      auto it = rp_.fields.find(e->name);
      if (it != rp_.fields.end()) {
        const DatatypeDecl *dt = it->second.dt;
        if (dt->ctors.size() > 1)
          emit(DiagKind::Assertion, e->span,
               "value is a " + it->second.ctor->name,
               icall("$is$" + it->second.ctor->name,
                     {tr(e->args[0], heap, oldHeap, ren)}, Type::boolType()));
      }
      return;
    }
    case ExprKind::CtorCall: {
      for (const auto &a : e->args)
        wf(a, heap, oldHeap, ren, path, out);
      return;
    }
    case ExprKind::FnCall: {
      for (const auto &a : e->args)
        wf(a, heap, oldHeap, ren, path, out);
      auto fit = rp_.functions.find(e->name);
      if (fit == rp_.functions.end())
        return;
      const FunctionDecl *f = fit->second;
      std::map<std::string, ExprPtr> argMap;
      for (size_t i = 0; i < f->params.size() && i < e->args.size(); ++i)
        argMap[f->params[i].name] = tr(e->args[i], heap, oldHeap, ren);
      std::vector<ExprPtr> reqs;
      for (const auto &r : f->requires_)
        reqs.push_back(subst_vars(tr(r.expr, heap, heap), argMap));
      bool recursive = rp_.sameScc(curDecl_, e->name);
      if (reqs.empty() && !recursive)
        return;
      ExprPtr goal = reqs.empty() ? nullptr : conjAll(reqs);
      std::string label = "precondition of " + e->name + " holds";
      if (recursive) {
        auto [calleeM, calleeT] = calleeMetric(f);
        std::vector<ExprPtr> newM;
        for (const auto &c : calleeM)
          newM.push_back(subst_vars(c, argMap));
        ExprPtr dec = lex_less(newM, curMetric_, curMetricTypes_);
        goal = goal ? conj(goal, dec) : dec;
        label = "precondition and termination of recursive call to " +
                e->name;
      }
      emit(DiagKind::FunctionPrecondition, e->span, label, goal);
      return;
    }
    }
  }

  void wfTop(const ExprPtr &e, const ExprPtr &heap, const ExprPtr &oldHeap,
             std::vector<Ob> &out) {
    std::map<std::string, ExprPtr> ren;
    std::vector<ExprPtr> path;
    wf(e, heap, oldHeap, ren, path, out);
  }

  // metric of a callable (declared or guessed), translated, with types
  std::pair<std::vector<ExprPtr>, std::vector<TypePtr>>
  calleeMetric(const FunctionDecl *f) {
    std::vector<ExprPtr> src =
        f->hasDecreases ? f->decreases_ : guess_callable_metric(f->params);
    return translateMetric(src);
  }
  std::pair<std::vector<ExprPtr>, std::vector<TypePtr>>
  calleeMetric(const MethodDecl *m) {
    std::vector<ExprPtr> src =
        m->hasDecreases ? m->decreases_ : guess_callable_metric(m->ins);
    return translateMetric(src);
  }
  std::pair<std::vector<ExprPtr>, std::vector<TypePtr>>
  translateMetric(const std::vector<ExprPtr> &src) {
    std::vector<ExprPtr> m;
    std::vector<TypePtr> t;
    for (const auto &e : src) {
      m.push_back(trCur(e));
      t.push_back(e->type ? e->type : Type::intType());
    }
    return {m, t};
  }

  // -------------------------------------------------------------------------
  // Backward weakest-precondition pass. `pending` holds the obligations of
  // everything downstream; each statement transforms them (substitution for
  // assignments, extra hypotheses for assumptions and branch guards) and
  // contributes its own.
  // -------------------------------------------------------------------------

  void applySubst(std::vector<Ob> &pending,
                  const std::map<std::string, ExprPtr> &m) {
    if (m.empty())
      return;
    for (auto &ob : pending) {
      for (auto &h : ob.hyps)
        h = substRec(h, m);
      ob.goal = substRec(ob.goal, m);
    }
  }

  void addHyp(std::vector<Ob> &pending, const ExprPtr &h) {
    for (auto &ob : pending)
      ob.hyps.insert(ob.hyps.begin(), h);
  }

  void wpStmts(const std::vector<StmtPtr> &stmts, std::vector<Ob> &pending) {
    for (size_t i = stmts.size(); i-- > 0;)
      wpStmt(stmts[i], pending);
  }

  void wpStmt(const StmtPtr &s, std::vector<Ob> &pending) {
    switch (s->kind) {
    case StmtKind::Assert: {
      ExprPtr e = trCur(s->exprs[0]);
      addHyp(pending, e);
      pending.push_back(mkOb(DiagKind::Assertion, s->span,
                             "assertion " + pretty_print(s->exprs[0]), {}, e));
      wfTop(s->exprs[0], heapVar(), oldHeapVar(), pending);
      return;
    }
    case StmtKind::Assume: {
      addHyp(pending, trCur(s->exprs[0]));
      wfTop(s->exprs[0], heapVar(), oldHeapVar(), pending);
      return;
    }
    case StmtKind::VarDecl: {
      for (size_t i = std::min(s->names.size(), s->exprs.size()); i-- > 0;) {
        applySubst(pending, {{s->names[i], trCur(s->exprs[i])}});
        wfTop(s->exprs[i], heapVar(), oldHeapVar(), pending);
      }
      return;
    }
    case StmtKind::Assign: {
      // simultaneous: all rhs and index terms read the pre-state
      std::map<std::string, ExprPtr> m;
      ExprPtr h; // updated heap, if any array target
      for (size_t i = 0; i < s->lhs.size(); ++i) {
        const ExprPtr &l = s->lhs[i];
        ExprPtr rhs = trCur(s->exprs[i]);
        if (l->kind == ExprKind::Var) {
          m[l->name] = rhs;
        } else {
          ExprPtr a = trCur(l->args[0]);
          ExprPtr ix = trCur(l->args[1]);
          h = icall("$store", {h ? h : heapVar(), a, ix, rhs}, nullptr);
        }
      }
      if (h)
        m["$heap"] = h;
      applySubst(pending, m);
      for (size_t i = 0; i < s->lhs.size(); ++i) {
        wfTop(s->exprs[i], heapVar(), oldHeapVar(), pending);
        if (s->lhs[i]->kind != ExprKind::Var)
          wfTop(s->lhs[i], heapVar(), oldHeapVar(), pending);
      }
      return;
    }
    case StmtKind::ArrayAlloc: {
      TypePtr at = Type::array(s->allocElemType ? s->allocElemType
                                                : Type::intType());
      ExprPtr fresh = varT(freshName(s->names[0]), at);
      applySubst(pending, {{s->names[0], fresh}});
      addHyp(pending, bbin(BinOp::Eq,
                           icall("$length", {fresh}, Type::intType()),
                           trCur(s->exprs[0])));
      addHyp(pending, bbin(BinOp::Ne, fresh, mk_int(0)));
      wfTop(s->exprs[0], heapVar(), oldHeapVar(), pending);
      return;
    }
    case StmtKind::If: {
      ExprPtr g = trCur(s->exprs[0]);
      branchMerge(pending, {{g, &s->body}, {notE(g), &s->elseBody}});
      wfTop(s->exprs[0], heapVar(), oldHeapVar(), pending);
      return;
    }
    case StmtKind::Match: {
      wpMatch(s, pending);
      return;
    }
    case StmtKind::Block:
    case StmtKind::ProofBlock: {
      if (s->kind == StmtKind::ProofBlock) {
        std::vector<Ob> sub;
        wpStmts(s->body, sub);
        for (auto &ob : sub)
          pending.push_back(std::move(ob));
      } else {
        wpStmts(s->body, pending);
      }
      return;
    }
    case StmtKind::Calc: {
      wpCalc(s, pending);
      return;
    }
    case StmtKind::While: {
      wpWhile(s, pending);
      return;
    }
    case StmtKind::Call: {
      wpCall(s, pending);
      return;
    }
    }
  }

  // Processes several guarded alternatives against the same downstream
  // pending set and merges the results per obligation.
  void branchMerge(
      std::vector<Ob> &pending,
      const std::vector<std::pair<ExprPtr, const std::vector<StmtPtr> *>>
          &branches) {
    std::set<int> origIds;
    for (const auto &ob : pending)
      origIds.insert(ob.id);
    struct BranchOut {
      ExprPtr guard;
      std::map<int, const Ob *> orig;
      std::vector<Ob> all;
    };
    std::vector<BranchOut> outs;
    outs.reserve(branches.size());
    for (const auto &[g, body] : branches) {
      BranchOut bo;
      bo.guard = g;
      bo.all = pending; // copy
      wpStmts(*body, bo.all);
      outs.push_back(std::move(bo));
    }
    std::vector<Ob> merged;
    // original obligations: keep if untouched by every branch, otherwise
    // fold each branch's version under its guard
    for (const auto &orig : pending) {
      std::vector<const Ob *> versions;
      for (auto &bo : outs)
        for (const auto &ob : bo.all)
          if (ob.id == orig.id)
            versions.push_back(&ob);
      bool same = true;
      for (const auto *v : versions)
        same = same && expr_equal(v->goal, orig.goal) &&
               exprListEqual(v->hyps, orig.hyps);
      if (same) {
        merged.push_back(orig);
        continue;
      }
      Ob m = orig;
      m.hyps.clear();
      ExprPtr g;
      for (size_t bi = 0; bi < outs.size(); ++bi) {
        ExprPtr part = impl(outs[bi].guard, versions[bi]->folded());
        g = g ? conj(g, part) : part;
      }
      m.goal = g;
      merged.push_back(std::move(m));
    }
    // branch-local obligations get the guard as a hypothesis
    for (auto &bo : outs)
      for (auto &ob : bo.all)
        if (!origIds.count(ob.id)) {
          ob.hyps.insert(ob.hyps.begin(), bo.guard);
          merged.push_back(std::move(ob));
        }
    pending = std::move(merged);
  }

  void wpMatch(const StmtPtr &s, std::vector<Ob> &pending) {
    ExprPtr scrut = trCur(s->exprs[0]);
    std::set<int> origIds;
    for (const auto &ob : pending)
      origIds.insert(ob.id);
    std::vector<std::pair<ExprPtr, const std::vector<StmtPtr> *>> branches;
    std::vector<std::map<std::string, ExprPtr>> binderSubsts;
    for (const auto &mc : s->cases) {
      ExprPtr g = icall("$is$" + mc.ctor, {scrut}, Type::boolType());
      branches.push_back({g, &mc.body});
      auto ct = rp_.ctors.find(mc.ctor);
      std::map<std::string, ExprPtr> bs;
      if (ct != rp_.ctors.end())
        for (size_t i = 0;
             i < mc.binders.size() && i < ct->second.second->fields.size();
             ++i) {
          const auto &fld = ct->second.second->fields[i];
          auto d = std::make_shared<Expr>();
          d->kind = ExprKind::DtorAccess;
          d->span = mc.span;
          d->name = fld.name;
          d->args = {scrut};
          d->type = fieldType(scrut, fld.name);
          bs[mc.binders[i].name] = d;
        }
      binderSubsts.push_back(std::move(bs));
    }
    // like branchMerge, but each case's results are rewritten to express
    // binders as destructor applications on the scrutinee
    struct BranchOut {
      ExprPtr guard;
      std::vector<Ob> all;
    };
    std::vector<BranchOut> outs;
    for (size_t c = 0; c < branches.size(); ++c) {
      BranchOut bo;
      bo.guard = branches[c].first;
      bo.all = pending;
      wpStmts(*branches[c].second, bo.all);
      applySubst(bo.all, binderSubsts[c]);
      outs.push_back(std::move(bo));
    }
    std::vector<Ob> merged;
    for (const auto &orig : pending) {
      std::vector<const Ob *> versions;
      for (auto &bo : outs)
        for (const auto &ob : bo.all)
          if (ob.id == orig.id)
            versions.push_back(&ob);
      bool same = true;
      for (const auto *v : versions)
        same = same && expr_equal(v->goal, orig.goal) &&
               exprListEqual(v->hyps, orig.hyps);
      if (same) {
        merged.push_back(orig);
        continue;
      }
      Ob m = orig;
      m.hyps.clear();
      ExprPtr g;
      for (size_t bi = 0; bi < outs.size(); ++bi) {
        ExprPtr part = impl(outs[bi].guard, versions[bi]->folded());
        g = g ? conj(g, part) : part;
      }
      m.goal = g;
      merged.push_back(std::move(m));
    }
    for (auto &bo : outs)
      for (auto &ob : bo.all)
        if (!origIds.count(ob.id)) {
          ob.hyps.insert(ob.hyps.begin(), bo.guard);
          merged.push_back(std::move(ob));
        }
    pending = std::move(merged);
    wfTop(s->exprs[0], heapVar(), oldHeapVar(), pending);
  }

  static ExprPtr relOf(CalcOp op, const ExprPtr &a, const ExprPtr &b) {
    BinOp bo;
    switch (op) {
    case CalcOp::Eq: bo = BinOp::Eq; break;
    case CalcOp::Ne: bo = BinOp::Ne; break;
    case CalcOp::Lt: bo = BinOp::Lt; break;
    case CalcOp::Le: bo = BinOp::Le; break;
    case CalcOp::Gt: bo = BinOp::Gt; break;
    case CalcOp::Ge: bo = BinOp::Ge; break;
    case CalcOp::Implies: bo = BinOp::Implies; break;
    case CalcOp::Explies: bo = BinOp::Explies; break;
    case CalcOp::Iff: bo = BinOp::Iff; break;
    }
    return typed(mk_binary(bo, a, b), Type::boolType());
  }

  static CalcOp composeOps(const std::vector<CalcOp> &ops) {
    auto has = [&](CalcOp o) {
      return std::find(ops.begin(), ops.end(), o) != ops.end();
    };
    if (has(CalcOp::Lt)) return CalcOp::Lt;
    if (has(CalcOp::Le)) return CalcOp::Le;
    if (has(CalcOp::Gt)) return CalcOp::Gt;
    if (has(CalcOp::Ge)) return CalcOp::Ge;
    if (has(CalcOp::Implies)) return CalcOp::Implies;
    if (has(CalcOp::Iff)) return CalcOp::Iff;
    if (has(CalcOp::Explies)) return CalcOp::Explies;
    return CalcOp::Eq;
  }

  void wpCalc(const StmtPtr &s, std::vector<Ob> &pending) {
    size_t n = s->calcLines.size();
    if (n == 0)
      return;
    // the established relation is assumed downstream
    if (n >= 2) {
      CalcOp comp = composeOps(s->calcOps);
      ExprPtr concl =
          relOf(comp, trCur(s->calcLines.front()), trCur(s->calcLines.back()));
      addHyp(pending, concl);
    }
    // each step is its own proof scope: its hints, then the step relation
    for (size_t i = 1; i < n; ++i) {
      ExprPtr step = relOf(s->calcOps[i - 1], trCur(s->calcLines[i - 1]),
                           trCur(s->calcLines[i]));
      std::vector<Ob> sub;
      sub.push_back(mkOb(
          DiagKind::CalcStep, s->calcOpSpans[i - 1],
          "calc step " + pretty_print(s->calcLines[i - 1]) + " to " +
              pretty_print(s->calcLines[i]),
          {}, step));
      if (i - 1 < s->calcHints.size())
        wpStmts(s->calcHints[i - 1], sub);
      for (auto &ob : sub)
        pending.push_back(std::move(ob));
    }
    for (const auto &line : s->calcLines)
      wfTop(line, heapVar(), oldHeapVar(), pending);
  }

  // ---- loops ---------------------------------------------------------------

  void collectAssigned(const std::vector<StmtPtr> &stmts,
                       std::map<std::string, TypePtr> &vars,
                       bool &heapWritten) {
    for (const auto &s : stmts) {
      switch (s->kind) {
      case StmtKind::Assign:
        for (size_t i = 0; i < s->lhs.size(); ++i) {
          if (s->lhs[i]->kind == ExprKind::Var)
            vars[s->lhs[i]->name] = s->lhs[i]->type;
          else
            heapWritten = true;
        }
        break;
      case StmtKind::Call: {
        auto it = rp_.methods.find(s->callee);
        if (it != rp_.methods.end()) {
          for (size_t i = 0;
               i < s->names.size() && i < it->second->outs.size(); ++i)
            vars[s->names[i]] = it->second->outs[i].type;
          if (!it->second->modifies_.empty())
            heapWritten = true;
        }
        break;
      }
      case StmtKind::ArrayAlloc:
        vars[s->names[0]] = Type::array(
            s->allocElemType ? s->allocElemType : Type::intType());
        heapWritten = true;
        break;
      case StmtKind::If:
        collectAssigned(s->body, vars, heapWritten);
        collectAssigned(s->elseBody, vars, heapWritten);
        break;
      case StmtKind::While:
      case StmtKind::Block:
        collectAssigned(s->body, vars, heapWritten);
        break;
      case StmtKind::Match:
        for (const auto &mc : s->cases)
          collectAssigned(mc.body, vars, heapWritten);
        break;
      default:
        break;
      }
    }
  }

  void wpWhile(const StmtPtr &s, std::vector<Ob> &pending) {
    ExprPtr g = trCur(s->exprs[0]);
    std::vector<ExprPtr> invs;
    for (const auto &inv : s->invariants)
      invs.push_back(trCur(inv));

    // termination metric: declared, or guessed from the guard
    std::vector<ExprPtr> metricSrc = s->decreases;
    bool guessed = false;
    if (!s->hasDecreases) {
      if (auto m = guess_loop_metric(s->exprs[0])) {
        metricSrc = {*m};
        guessed = true;
      } else {
        metricSrc.clear();
        out_.diagnostics.push_back(Diagnostic{
            s->span, Severity::Error, DiagKind::TerminationMetricMissing,
            "cannot infer a termination metric for this loop; add a "
            "decreases clause"});
      }
    }
    if (!metricSrc.empty() && vcs_)
      vcs_->metrics.push_back(MetricInfo{s->span, metricSrc, guessed});
    auto [metric, metricTypes] = translateMetric(metricSrc);

    // skolemize everything the body may change
    std::map<std::string, TypePtr> assigned;
    bool heapWritten = false;
    collectAssigned(s->body, assigned, heapWritten);
    std::map<std::string, ExprPtr> sigma;
    for (const auto &[n, t] : assigned)
      sigma[n] = varT(freshName(n), t ? t : Type::intType());
    if (heapWritten)
      sigma["$heap"] = mk_var(freshName("$heap"));

    // body obligations: invariant maintenance per clause + metric decrease
    std::vector<Ob> bodyPending;
    for (size_t j = 0; j < invs.size(); ++j)
      bodyPending.push_back(mkOb(
          DiagKind::InvariantMaintenance,
          j < s->invariantSpans.size() ? s->invariantSpans[j] : s->span,
          "loop invariant " + pretty_print(s->invariants[j]) +
              " is maintained",
          {}, invs[j]));
    std::vector<ExprPtr> snaps;
    int decId = -1;
    if (!metric.empty()) {
      for (size_t i = 0; i < metric.size(); ++i)
        snaps.push_back(varT(freshName("$snap"), metricTypes[i]));
      Ob dec = mkOb(DiagKind::DecreasesDecrease, s->span,
                    "loop termination metric decreases", {},
                    lex_less(metric, snaps, metricTypes));
      decId = dec.id;
      bodyPending.push_back(std::move(dec));
    }
    wpStmts(s->body, bodyPending);
    applySubst(bodyPending, sigma);
    std::vector<ExprPtr> invSig;
    for (const auto &i : invs)
      invSig.push_back(substRec(i, sigma));
    ExprPtr gSig = substRec(g, sigma);
    for (auto &ob : bodyPending) {
      std::vector<ExprPtr> hyps = invSig;
      hyps.push_back(gSig);
      if (ob.id == decId)
        for (size_t i = 0; i < snaps.size(); ++i)
          hyps.push_back(
              bbin(BinOp::Eq, snaps[i], substRec(metric[i], sigma)));
      hyps.insert(hyps.end(), ob.hyps.begin(), ob.hyps.end());
      ob.hyps = std::move(hyps);
    }

    // well-formedness of invariants (under earlier clauses) and the guard
    std::vector<Ob> wfObs;
    for (size_t j = 0; j < s->invariants.size(); ++j) {
      std::vector<Ob> w;
      wfTop(s->invariants[j], heapVar(), oldHeapVar(), w);
      applySubst(w, sigma);
      for (auto &ob : w) {
        std::vector<ExprPtr> hyps(invSig.begin(), invSig.begin() + j);
        hyps.insert(hyps.end(), ob.hyps.begin(), ob.hyps.end());
        ob.hyps = std::move(hyps);
        wfObs.push_back(std::move(ob));
      }
    }
    {
      std::vector<Ob> w;
      wfTop(s->exprs[0], heapVar(), oldHeapVar(), w);
      applySubst(w, sigma);
      for (auto &ob : w) {
        std::vector<ExprPtr> hyps = invSig;
        hyps.insert(hyps.end(), ob.hyps.begin(), ob.hyps.end());
        ob.hyps = std::move(hyps);
        wfObs.push_back(std::move(ob));
      }
    }

    // downstream obligations hold in the post-loop state
    applySubst(pending, sigma);
    for (const auto &i : invSig)
      addHyp(pending, i);
    addHyp(pending, notE(gSig));

    // invariants hold on entry
    std::vector<Ob> entry;
    for (size_t j = 0; j < invs.size(); ++j)
      entry.push_back(mkOb(
          DiagKind::InvariantEntry,
          j < s->invariantSpans.size() ? s->invariantSpans[j] : s->span,
          "loop invariant " + pretty_print(s->invariants[j]) +
              " holds on entry",
          {}, invs[j]));

    for (auto &ob : bodyPending)
      pending.push_back(std::move(ob));
    for (auto &ob : wfObs)
      pending.push_back(std::move(ob));
    for (auto &ob : entry)
      pending.push_back(std::move(ob));
  }

  // ---- method and lemma calls ----------------------------------------------

  void wpCall(const StmtPtr &s, std::vector<Ob> &pending) {
    auto it = rp_.methods.find(s->callee);
    if (it == rp_.methods.end())
      return;
    const MethodDecl *m = it->second;

    std::map<std::string, ExprPtr> argMap;
    for (size_t i = 0; i < m->ins.size() && i < s->exprs.size(); ++i)
      argMap[m->ins[i].name] = trCur(s->exprs[i]);

    std::vector<ExprPtr> reqs;
    for (const auto &r : m->requires_)
      reqs.push_back(subst_vars(tr(r.expr, heapVar(), heapVar()), argMap));

    // havoc the call's effects: out targets, and the heap if it writes
    std::map<std::string, ExprPtr> havoc;
    std::vector<ExprPtr> outVars;
    for (size_t i = 0; i < s->names.size(); ++i) {
      TypePtr t = i < m->outs.size() ? m->outs[i].type : Type::intType();
      ExprPtr fresh = varT(freshName(s->names[i]), t);
      havoc[s->names[i]] = fresh;
      outVars.push_back(fresh);
    }
    bool heapMod = !m->modifies_.empty();
    ExprPtr postHeap = heapVar();
    if (heapMod) {
      postHeap = mk_var(freshName("$heap"));
      havoc["$heap"] = postHeap;
    }
    applySubst(pending, havoc);

    // the caller learns the precondition (it is proved below)...
    for (const auto &r : reqs)
      addHyp(pending, r);
    // ...the postcondition, with old(..) meaning the pre-call heap...
    std::map<std::string, ExprPtr> ensMap = argMap;
    for (size_t i = 0; i < m->outs.size() && i < outVars.size(); ++i)
      ensMap[m->outs[i].name] = outVars[i];
    for (const auto &en : m->ensures_)
      addHyp(pending,
             subst_vars(tr(en.expr, postHeap, heapVar()), ensMap));
    // ...and that arrays outside the callee's frame are untouched
    if (heapMod) {
      std::string rn = freshName("$r");
      auto q = std::make_shared<Expr>();
      q->kind = ExprKind::Forall;
      q->bound = {BoundVar{rn, Type::intType(), s->span}};
      ExprPtr rv = varT(rn, Type::intType());
      ExprPtr notModified;
      for (const auto &fc : m->modifies_) {
        size_t pi = paramIndex(m->ins, fc.name);
        if (pi >= s->exprs.size())
          continue;
        ExprPtr ne = bbin(BinOp::Ne, rv, trCur(s->exprs[pi]));
        notModified = notModified ? conj(notModified, ne) : ne;
      }
      ExprPtr same =
          bbin(BinOp::Eq, icall("$heaplet", {postHeap, rv}, nullptr),
               icall("$heaplet", {heapVar(), rv}, nullptr));
      q->args = {notModified ? impl(notModified, same) : same};
      q->type = Type::boolType();
      addHyp(pending, q);
    }

    // obligations at the call site: argument well-formedness, preconditions,
    // and -- within a recursive cycle -- metric decrease
    for (size_t i = 0; i < m->requires_.size(); ++i)
      pending.push_back(mkOb(
          DiagKind::PreconditionAtCall, s->span,
          "precondition " + pretty_print(m->requires_[i].expr) + " of " +
              s->callee + " holds",
          {}, reqs[i]));
    if (rp_.sameScc(curDecl_, s->callee)) {
      auto [calleeM, calleeT] = calleeMetric(m);
      std::vector<ExprPtr> newM;
      for (const auto &c : calleeM)
        newM.push_back(subst_vars(c, argMap));
      pending.push_back(mkOb(
          DiagKind::DecreasesDecrease, s->span,
          "termination metric decreases on recursive call to " + s->callee,
          {}, lex_less(newM, curMetric_, curMetricTypes_)));
    }
    for (const auto &a : s->exprs)
      wfTop(a, heapVar(), oldHeapVar(), pending);
  }

  // -------------------------------------------------------------------------
  // Declarations
  // -------------------------------------------------------------------------

  void beginDecl(const std::string &name, SourceSpan sp) {
    curDecl_ = name;
    fresh_ = 0;
    curMetric_.clear();
    curMetricTypes_.clear();
    out_.decls.push_back(DeclVCs{name, sp, false, {}, {}});
    vcs_ = &out_.decls.back();
  }

  void setupCallableMetric(const std::vector<ExprPtr> &declared,
                           bool hasDeclared, const std::vector<Param> &ins,
                           SourceSpan sp, SourceSpan declSpan) {
    if (!rp_.recursive.count(curDecl_))
      return;
    std::vector<ExprPtr> src =
        hasDeclared ? declared : guess_callable_metric(ins);
    if (src.empty()) {
      out_.diagnostics.push_back(Diagnostic{
          declSpan, Severity::Error, DiagKind::TerminationMetricMissing,
          "cannot infer a termination metric for '" + curDecl_ +
              "'; add a decreases clause"});
      return;
    }
    vcs_->metrics.push_back(
        MetricInfo{hasDeclared ? sp : declSpan, src, !hasDeclared});
    std::tie(curMetric_, curMetricTypes_) = translateMetric(src);
  }

  void finishDecl(const std::vector<SpecClause> &requires_,
                  std::vector<Ob> pending, bool toOldHeap) {
    // requires are hypotheses of everything, and are well-formed under the
    // clauses before them
    std::vector<ExprPtr> reqTr;
    for (const auto &r : requires_)
      reqTr.push_back(tr(r.expr, heapVar(), heapVar()));
    for (size_t j = requires_.size(); j-- > 0;) {
      std::vector<Ob> w;
      wfTop(requires_[j].expr, heapVar(), heapVar(), w);
      for (auto &ob : w) {
        std::vector<ExprPtr> hyps(reqTr.begin(), reqTr.begin() + j);
        hyps.insert(hyps.end(), ob.hyps.begin(), ob.hyps.end());
        ob.hyps = std::move(hyps);
        pending.push_back(std::move(ob));
      }
    }
    for (auto &ob : pending)
      ob.hyps.insert(ob.hyps.begin(), reqTr.begin(), reqTr.end());
    // at entry the current heap *is* the old heap
    if (toOldHeap)
      applySubst(pending, {{"$heap", oldHeapVar()}});
    for (auto &ob : pending)
      vcs_->obligations.push_back(Obligation{
          std::move(ob.hyps), std::move(ob.goal), ob.kind, ob.span,
          std::move(ob.label), curDecl_});
  }

  void genMethod(const MethodDecl &m) {
    beginDecl(m.name, m.span);
    setupCallableMetric(m.decreases_, m.hasDecreases, m.ins, m.decreasesSpan,
                        m.span);

    std::vector<Ob> pending;
    if (!m.body) {
      vcs_->bodiless = true;
      out_.diagnostics.push_back(Diagnostic{
          m.span, Severity::Warning, DiagKind::AssumedLemma,
          std::string(m.isLemma ? "lemma" : "method") + " '" + m.name +
              "' has no body; its contract is assumed"});
      // only the specification's own well-formedness is checked
      for (const auto &en : m.ensures_)
        wfTop(en.expr, heapVar(), oldHeapVar(), pending);
      finishDecl(m.requires_, std::move(pending), true);
      return;
    }
    for (const auto &en : m.ensures_) {
      pending.push_back(mkOb(DiagKind::Postcondition, en.span,
                             "postcondition " + pretty_print(en.expr) +
                                 " on exit of " + m.name,
                             {}, tr(en.expr, heapVar(), oldHeapVar())));
      wfTop(en.expr, heapVar(), oldHeapVar(), pending);
    }
    wpStmts(*m.body, pending);
    finishDecl(m.requires_, std::move(pending), true);
  }

  void genFunction(const FunctionDecl &f) {
    beginDecl(f.name, f.span);
    setupCallableMetric(f.decreases_, f.hasDecreases, f.params,
                        f.decreasesSpan, f.span);
    std::vector<Ob> pending;
    if (f.body)
      wfTop(f.body, heapVar(), heapVar(), pending);
    finishDecl(f.requires_, std::move(pending), false);
  }
};

} // namespace

ExprPtr subst_vars(const ExprPtr &e, const std::map<std::string, ExprPtr> &m) {
  return substRec(e, m);
}

VcResult generate_vcs(const ResolvedProgram &rp) {
  VcResult out;
  Gen g(rp, out);
  g.run();
  return out;
}

ExprPtr translate_one_state(const ResolvedProgram &rp,
                            const std::string &declName, const ExprPtr &e) {
  VcResult scratch;
  Gen g(rp, scratch);
  return g.translateOneState(declName, e);
}

std::set<std::string> heap_reading_functions(const ResolvedProgram &rp) {
  VcResult scratch;
  Gen g(rp, scratch);
  return g.heapReaders();
}

} // namespace minivc
