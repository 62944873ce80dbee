#include "minivc/termination.hpp"

namespace minivc {

namespace {

ExprPtr typed(ExprPtr e, TypePtr t) {
  const_cast<Expr &>(*e).type = std::move(t);
  return e;
}

ExprPtr intBin(BinOp op, ExprPtr a, ExprPtr b) {
  return typed(mk_binary(op, std::move(a), std::move(b)), Type::intType());
}

ExprPtr boolBin(BinOp op, ExprPtr a, ExprPtr b) {
  return typed(mk_binary(op, std::move(a), std::move(b)), Type::boolType());
}

ExprPtr call1(const std::string &f, ExprPtr a) {
  return typed(mk_fncall(f, {std::move(a)}), Type::intType());
}

} // namespace

std::optional<ExprPtr> guess_loop_metric(const ExprPtr &guard) {
  if (guard->kind != ExprKind::Binary)
    return std::nullopt;
  switch (guard->bop) {
  case BinOp::And: {
    if (auto m = guess_loop_metric(guard->args[0]))
      return m;
    return guess_loop_metric(guard->args[1]);
  }
  case BinOp::Lt:
  case BinOp::Le:
  case BinOp::Ne:
    return intBin(BinOp::Sub, guard->args[1], guard->args[0]);
  case BinOp::Gt:
  case BinOp::Ge:
    return intBin(BinOp::Sub, guard->args[0], guard->args[1]);
  default:
    return std::nullopt;
  }
}

std::vector<ExprPtr> guess_callable_metric(const std::vector<Param> &ins) {
  std::vector<ExprPtr> m;
  for (const auto &p : ins)
    if (p.type && (p.type->kind == TypeKind::Int ||
                   p.type->kind == TypeKind::Datatype))
      m.push_back(typed(mk_var(p.name, p.span), p.type));
  return m;
}

ExprPtr lex_less(const std::vector<ExprPtr> &newM,
                 const std::vector<ExprPtr> &oldM,
                 const std::vector<TypePtr> &types) {
  size_t n = std::min(newM.size(), oldM.size());
  // strict decrease at position p (boundedness folded in)
  auto strictAt = [&](size_t p) -> ExprPtr {
    TypePtr t = p < types.size() ? types[p] : Type::intType();
    switch (t ? t->kind : TypeKind::Int) {
    case TypeKind::Datatype:
      return boolBin(BinOp::Lt, call1("$rank", newM[p]),
                     call1("$rank", oldM[p]));
    case TypeKind::Seq:
      return boolBin(BinOp::Lt, call1("$seqlen", newM[p]),
                     call1("$seqlen", oldM[p]));
    default:
      return boolBin(BinOp::And, boolBin(BinOp::Lt, newM[p], oldM[p]),
                     boolBin(BinOp::Ge, oldM[p], mk_int(0)));
    }
  };
  auto eqAt = [&](size_t p) -> ExprPtr {
    TypePtr t = p < types.size() ? types[p] : Type::intType();
    switch (t ? t->kind : TypeKind::Int) {
    case TypeKind::Datatype:
      return boolBin(BinOp::Eq, call1("$rank", newM[p]),
                     call1("$rank", oldM[p]));
    case TypeKind::Seq:
      return boolBin(BinOp::Eq, call1("$seqlen", newM[p]),
                     call1("$seqlen", oldM[p]));
    default:
      return boolBin(BinOp::Eq, newM[p], oldM[p]);
    }
  };
  ExprPtr result;
  for (size_t p = 0; p < n; ++p) {
    ExprPtr disjunct = strictAt(p);
    for (size_t q = p; q-- > 0;)
      disjunct = boolBin(BinOp::And, eqAt(q), disjunct);
    result = result ? boolBin(BinOp::Or, result, disjunct) : disjunct;
  }
  if (!result)
    return typed(mk_bool(false), Type::boolType());
  return result;
}

} // namespace minivc
