#include "minivc/ast.hpp"

namespace minivc {

TypePtr Type::intType() {
  static TypePtr t = std::make_shared<Type>(Type{TypeKind::Int, "", {}});
  return t;
}
TypePtr Type::boolType() {
  static TypePtr t = std::make_shared<Type>(Type{TypeKind::Bool, "", {}});
  return t;
}
TypePtr Type::typeVar(std::string n) {
  return std::make_shared<Type>(Type{TypeKind::TypeVar, std::move(n), {}});
}
TypePtr Type::array(TypePtr elem) {
  return std::make_shared<Type>(Type{TypeKind::Array, "", {std::move(elem)}});
}
TypePtr Type::seq(TypePtr elem) {
  return std::make_shared<Type>(Type{TypeKind::Seq, "", {std::move(elem)}});
}
TypePtr Type::multiset(TypePtr elem) {
  return std::make_shared<Type>(
      Type{TypeKind::Multiset, "", {std::move(elem)}});
}
TypePtr Type::datatype(std::string n, std::vector<TypePtr> args) {
  return std::make_shared<Type>(
      Type{TypeKind::Datatype, std::move(n), std::move(args)});
}

bool type_equal(const TypePtr &a, const TypePtr &b) {
  if (!a || !b)
    return false;
  if (a->kind != b->kind || a->name != b->name ||
      a->args.size() != b->args.size())
    return false;
  for (size_t i = 0; i < a->args.size(); ++i)
    if (!type_equal(a->args[i], b->args[i]))
      return false;
  return true;
}

std::string type_str(const TypePtr &t) {
  if (!t)
    return "<unresolved>";
  switch (t->kind) {
  case TypeKind::Int:
    return "int";
  case TypeKind::Bool:
    return "bool";
  case TypeKind::TypeVar:
    return t->name;
  case TypeKind::Array:
    return "array<" + type_str(t->args[0]) + ">";
  case TypeKind::Seq:
    return "seq<" + type_str(t->args[0]) + ">";
  case TypeKind::Multiset:
    return "multiset<" + type_str(t->args[0]) + ">";
  case TypeKind::Datatype: {
    std::string s = t->name;
    if (!t->args.empty()) {
      s += "<";
      for (size_t i = 0; i < t->args.size(); ++i) {
        if (i)
          s += ",";
        s += type_str(t->args[i]);
      }
      s += ">";
    }
    return s;
  }
  }
  return "?";
}

ExprPtr mk_int(int64_t v, SourceSpan sp) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::IntLit;
  e->intVal = v;
  e->span = sp;
  return e;
}
ExprPtr mk_bool(bool v, SourceSpan sp) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::BoolLit;
  e->boolVal = v;
  e->span = sp;
  return e;
}
ExprPtr mk_var(std::string name, SourceSpan sp) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::Var;
  e->name = std::move(name);
  e->span = sp;
  return e;
}
ExprPtr mk_binary(BinOp op, ExprPtr a, ExprPtr b, SourceSpan sp) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::Binary;
  e->bop = op;
  e->args = {std::move(a), std::move(b)};
  e->span = sp;
  return e;
}
ExprPtr mk_unary(UnOp op, ExprPtr a, SourceSpan sp) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::Unary;
  e->uop = op;
  e->args = {std::move(a)};
  e->span = sp;
  return e;
}
ExprPtr mk_fncall(std::string name, std::vector<ExprPtr> args, SourceSpan sp) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::FnCall;
  e->name = std::move(name);
  e->args = std::move(args);
  e->span = sp;
  return e;
}

const std::string &decl_name(const Declaration &d) {
  return std::visit([](const auto &x) -> const std::string & { return x.name; },
                    d);
}
const SourceSpan &decl_span(const Declaration &d) {
  return std::visit(
      [](const auto &x) -> const SourceSpan & { return x.span; }, d);
}

} // namespace minivc
