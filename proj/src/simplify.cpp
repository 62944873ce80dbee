#include "minivc/simplify.hpp"

#include <map>
#include <optional>

#include "minivc/euclid.hpp"
#include "minivc/interp.hpp"
#include "minivc/pretty.hpp"

namespace minivc {

namespace {

ExprPtr intLit(int64_t v) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::IntLit;
  e->intVal = v;
  e->type = Type::intType();
  return e;
}

ExprPtr boolLit(bool v) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::BoolLit;
  e->boolVal = v;
  e->type = Type::boolType();
  return e;
}

bool isTrue(const ExprPtr &e) {
  return e->kind == ExprKind::BoolLit && e->boolVal;
}
bool isFalse(const ExprPtr &e) {
  return e->kind == ExprKind::BoolLit && !e->boolVal;
}
bool isInt(const ExprPtr &e) { return e->kind == ExprKind::IntLit; }

ExprPtr mkBin(BinOp op, ExprPtr a, ExprPtr b, TypePtr t) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::Binary;
  e->bop = op;
  e->args = {std::move(a), std::move(b)};
  e->type = std::move(t);
  return e;
}

// flips a comparison under negation, so bounds facts stay visible
std::optional<BinOp> negated(BinOp op) {
  switch (op) {
  case BinOp::Lt: return BinOp::Ge;
  case BinOp::Le: return BinOp::Gt;
  case BinOp::Gt: return BinOp::Le;
  case BinOp::Ge: return BinOp::Lt;
  case BinOp::Eq: return BinOp::Ne;
  case BinOp::Ne: return BinOp::Eq;
  default: return std::nullopt;
  }
}

void splitConj(const ExprPtr &h, std::vector<ExprPtr> &out);

struct Bound {
  std::optional<int64_t> lo, hi;
};

void noteBound(std::map<std::string, Bound> &bounds, const ExprPtr &h) {
  if (h->kind != ExprKind::Binary)
    return;
  const ExprPtr &a = h->args[0], &b = h->args[1];
  auto upd = [&](const std::string &v, std::optional<int64_t> lo,
                 std::optional<int64_t> hi) {
    auto &bd = bounds[v];
    if (lo && (!bd.lo || *lo > *bd.lo))
      bd.lo = lo;
    if (hi && (!bd.hi || *hi < *bd.hi))
      bd.hi = hi;
  };
  if (a->kind == ExprKind::Var && isInt(b)) {
    int64_t c = b->intVal;
    switch (h->bop) {
    case BinOp::Ge: upd(a->name, c, std::nullopt); return;
    case BinOp::Gt: upd(a->name, c + 1, std::nullopt); return;
    case BinOp::Le: upd(a->name, std::nullopt, c); return;
    case BinOp::Lt: upd(a->name, std::nullopt, c - 1); return;
    default: return;
    }
  }
  if (isInt(a) && b->kind == ExprKind::Var) {
    int64_t c = a->intVal;
    switch (h->bop) {
    case BinOp::Le: upd(b->name, c, std::nullopt); return;
    case BinOp::Lt: upd(b->name, c + 1, std::nullopt); return;
    case BinOp::Ge: upd(b->name, std::nullopt, c); return;
    case BinOp::Gt: upd(b->name, std::nullopt, c - 1); return;
    default: return;
    }
  }
}

class Folder {
public:
  Folder(const ResolvedProgram &rp)
      : rp_(rp), interp_(rp, /*checkContracts=*/true, /*stepBudget=*/200'000) {}

  ExprPtr fold(const ExprPtr &e) {
    std::vector<ExprPtr> args;
    args.reserve(e->args.size());
    bool changed = false;
    for (const auto &a : e->args) {
      args.push_back(fold(a));
      changed = changed || args.back() != a;
    }
    ExprPtr cur = e;
    if (changed) {
      auto copy = std::make_shared<Expr>(*e);
      copy->args = std::move(args);
      cur = copy;
    }
    return foldNode(cur);
  }

  // bounds known from the hypotheses; lets implication antecedents pin
  // variables (e.g. hyp k >= 1 plus antecedent k <= 1 pins k to 1)
  void setAmbient(std::map<std::string, Bound> bounds) {
    ambient_ = std::move(bounds);
  }

private:
  const ResolvedProgram &rp_;
  Interp interp_;
  std::map<std::string, Bound> ambient_;

  ExprPtr foldNode(const ExprPtr &e) {
    switch (e->kind) {
    case ExprKind::Unary: {
      const ExprPtr &a = e->args[0];
      if (e->uop == UnOp::Not) {
        if (a->kind == ExprKind::BoolLit)
          return boolLit(!a->boolVal);
        if (a->kind == ExprKind::Unary && a->uop == UnOp::Not)
          return a->args[0];
        if (a->kind == ExprKind::Binary)
          if (auto flip = negated(a->bop))
            return foldNode(mkBin(*flip, a->args[0], a->args[1], e->type));
      } else if (a->kind == ExprKind::IntLit) {
        return intLit(-a->intVal);
      }
      return e;
    }
    case ExprKind::Binary:
      return foldBinary(e);
    case ExprKind::IfThenElse:
      if (isTrue(e->args[0]))
        return e->args[1];
      if (isFalse(e->args[0]))
        return e->args[2];
      return e;
    case ExprKind::FnCall:
      return foldCall(e);
    default:
      return e;
    }
  }

  ExprPtr foldBinary(const ExprPtr &e) {
    const ExprPtr &a = e->args[0], &b = e->args[1];
    // boolean short circuits on one literal side
    switch (e->bop) {
    case BinOp::And:
      if (isTrue(a)) return b;
      if (isTrue(b)) return a;
      if (isFalse(a) || isFalse(b)) return boolLit(false);
      break;
    case BinOp::Or:
      if (isFalse(a)) return b;
      if (isFalse(b)) return a;
      if (isTrue(a) || isTrue(b)) return boolLit(true);
      break;
    case BinOp::Implies:
      if (isFalse(a) || isTrue(b)) return boolLit(true);
      if (isTrue(a)) return b;
      break;
    case BinOp::Explies:
      if (isFalse(b) || isTrue(a)) return boolLit(true);
      if (isTrue(b)) return a;
      break;
    case BinOp::Iff:
      if (isTrue(a)) return b;
      if (isTrue(b)) return a;
      break;
    default:
      break;
    }
    if (isInt(a) && isInt(b)) {
      int64_t x = a->intVal, y = b->intVal;
      switch (e->bop) {
      case BinOp::Add: return intLit(x + y);
      case BinOp::Sub: return intLit(x - y);
      case BinOp::Mul: return intLit(x * y);
      case BinOp::Div: return y == 0 ? e : intLit(euclid_div(x, y));
      case BinOp::Mod: return y == 0 ? e : intLit(euclid_mod(x, y));
      case BinOp::Eq: return boolLit(x == y);
      case BinOp::Ne: return boolLit(x != y);
      case BinOp::Lt: return boolLit(x < y);
      case BinOp::Le: return boolLit(x <= y);
      case BinOp::Gt: return boolLit(x > y);
      case BinOp::Ge: return boolLit(x >= y);
      default: break;
      }
    }
    if (a->kind == ExprKind::BoolLit && b->kind == ExprKind::BoolLit &&
        (e->bop == BinOp::Eq || e->bop == BinOp::Iff))
      return boolLit(a->boolVal == b->boolVal);
    if (a->kind == ExprKind::BoolLit && b->kind == ExprKind::BoolLit &&
        e->bop == BinOp::Ne)
      return boolLit(a->boolVal != b->boolVal);
    if ((e->bop == BinOp::Eq || e->bop == BinOp::Le || e->bop == BinOp::Ge) &&
        expr_equal(a, b) && a->kind == ExprKind::Var)
      return boolLit(true);
    // propagate literal equalities from an antecedent into the consequent,
    // so branch-guarded goals like `k == 1 ==> P(k)` fold under the guard
    if (e->bop == BinOp::Implies) {
      std::vector<ExprPtr> parts;
      splitConj(a, parts);
      std::map<std::string, ExprPtr> eqs;
      std::map<std::string, Bound> bounds = ambient_;
      for (const auto &p : parts) {
        noteBound(bounds, p);
        if (p->kind == ExprKind::Binary && p->bop == BinOp::Eq) {
          if (p->args[0]->kind == ExprKind::Var &&
              (p->args[1]->kind == ExprKind::IntLit ||
               p->args[1]->kind == ExprKind::BoolLit))
            eqs.emplace(p->args[0]->name, p->args[1]);
          else if (p->args[1]->kind == ExprKind::Var &&
                   (p->args[0]->kind == ExprKind::IntLit ||
                    p->args[0]->kind == ExprKind::BoolLit))
            eqs.emplace(p->args[1]->name, p->args[0]);
        }
      }
      for (const auto &[v, bd] : bounds)
        if (bd.lo && bd.hi && *bd.lo == *bd.hi)
          eqs.emplace(v, intLit(*bd.lo));
      if (!eqs.empty()) {
        ExprPtr nb = subst_vars(b, eqs);
        if (nb != b)
          return foldNode(mkBin(BinOp::Implies, a, fold(nb), e->type));
      }
    }
    return e;
  }

  ExprPtr foldCall(const ExprPtr &e) {
    if (!e->name.empty() && e->name[0] == '$')
      return e;
    auto it = rp_.functions.find(e->name);
    if (it == rp_.functions.end())
      return e;
    // heap-reading functions carry a heap argument; never foldable
    if (it->second->params.size() != e->args.size())
      return e;
    std::vector<Value> vals;
    for (const auto &a : e->args) {
      if (a->kind == ExprKind::IntLit && std::llabs(a->intVal) <= 1'000'000)
        vals.push_back(Value::mkInt(a->intVal));
      else if (a->kind == ExprKind::BoolLit)
        vals.push_back(Value::mkBool(a->boolVal));
      else
        return e;
    }
    auto r = interp_.evalCall(e->name, vals);
    if (!r)
      return e;
    if (r->k == Value::K::Int)
      return intLit(r->i);
    if (r->k == Value::K::Bool)
      return boolLit(r->i != 0);
    return e;
  }
};

void splitConj(const ExprPtr &h, std::vector<ExprPtr> &out) {
  if (h->kind == ExprKind::Binary && h->bop == BinOp::And) {
    splitConj(h->args[0], out);
    splitConj(h->args[1], out);
    return;
  }
  out.push_back(h);
}

} // namespace

Obligation simplify_obligation(const ResolvedProgram &rp,
                               const Obligation &ob) {
  Folder folder(rp);
  Obligation res = ob;
  auto trivial = [&]() {
    res.hypotheses.clear();
    res.goal = boolLit(true);
    return res;
  };

  for (int round = 0; round < 8; ++round) {
    // fold and flatten hypotheses
    std::vector<ExprPtr> hyps;
    for (const auto &h : res.hypotheses)
      splitConj(folder.fold(h), hyps);
    {
      std::map<std::string, Bound> ambient;
      for (const auto &h : hyps)
        noteBound(ambient, h);
      folder.setAmbient(std::move(ambient));
    }
    res.goal = folder.fold(res.goal);
    if (isTrue(res.goal))
      return trivial();

    std::vector<ExprPtr> kept;
    for (const auto &h : hyps) {
      if (isTrue(h))
        continue;
      if (isFalse(h))
        return trivial(); // hypotheses are contradictory
      kept.push_back(h);
    }
    res.hypotheses = std::move(kept);

    // literal equalities and pinned-down bounds become substitutions
    std::map<std::string, ExprPtr> subst;
    std::map<std::string, Bound> bounds;
    for (const auto &h : res.hypotheses) {
      if (h->kind == ExprKind::Binary && h->bop == BinOp::Eq) {
        const ExprPtr &a = h->args[0], &b = h->args[1];
        if (a->kind == ExprKind::Var &&
            (b->kind == ExprKind::IntLit || b->kind == ExprKind::BoolLit))
          subst.emplace(a->name, b);
        else if (b->kind == ExprKind::Var &&
                 (a->kind == ExprKind::IntLit || a->kind == ExprKind::BoolLit))
          subst.emplace(b->name, a);
      }
      noteBound(bounds, h);
    }
    for (const auto &[v, bd] : bounds) {
      if (bd.lo && bd.hi && *bd.lo > *bd.hi)
        return trivial(); // empty range: contradictory hypotheses
      if (bd.lo && bd.hi && *bd.lo == *bd.hi)
        subst.emplace(v, intLit(*bd.lo));
    }
    if (subst.empty())
      break;

    bool changed = false;
    for (auto &h : res.hypotheses) {
      ExprPtr n = subst_vars(h, subst);
      changed = changed || n != h;
      h = std::move(n);
    }
    ExprPtr g = subst_vars(res.goal, subst);
    changed = changed || g != res.goal;
    res.goal = std::move(g);
    if (!changed)
      break;
  }

  // a hypothesis identical to the goal closes the obligation
  for (const auto &h : res.hypotheses)
    if (expr_equal(h, res.goal))
      return Obligation{{},
                        boolLit(true),
                        ob.kind,
                        ob.span,
                        ob.label,
                        ob.declName};
  return res;
}

} // namespace minivc
