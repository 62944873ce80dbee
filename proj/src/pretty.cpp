#include "minivc/pretty.hpp"

#include <functional>
#include <sstream>

namespace minivc {

namespace {

int binop_prec(BinOp op) {
  switch (op) {
  case BinOp::Iff: return 1;
  case BinOp::Implies: case BinOp::Explies: return 2;
  case BinOp::Or: return 3;
  case BinOp::And: return 4;
  case BinOp::Eq: case BinOp::Ne: case BinOp::Lt: case BinOp::Le:
  case BinOp::Gt: case BinOp::Ge: return 5;
  case BinOp::Add: case BinOp::Sub: return 6;
  case BinOp::Mul: case BinOp::Div: case BinOp::Mod: return 7;
  }
  return 0;
}

const char *binop_str(BinOp op) {
  switch (op) {
  case BinOp::Add: return "+";
  case BinOp::Sub: return "-";
  case BinOp::Mul: return "*";
  case BinOp::Div: return "/";
  case BinOp::Mod: return "%";
  case BinOp::Eq: return "==";
  case BinOp::Ne: return "!=";
  case BinOp::Lt: return "<";
  case BinOp::Le: return "<=";
  case BinOp::Gt: return ">";
  case BinOp::Ge: return ">=";
  case BinOp::And: return "&&";
  case BinOp::Or: return "||";
  case BinOp::Implies: return "==>";
  case BinOp::Explies: return "<==";
  case BinOp::Iff: return "<==>";
  }
  return "?";
}

const char *calcop_str(CalcOp op) {
  switch (op) {
  case CalcOp::Eq: return "==";
  case CalcOp::Ne: return "!=";
  case CalcOp::Lt: return "<";
  case CalcOp::Le: return "<=";
  case CalcOp::Gt: return ">";
  case CalcOp::Ge: return ">=";
  case CalcOp::Implies: return "==>";
  case CalcOp::Explies: return "<==";
  case CalcOp::Iff: return "<==>";
  }
  return "?";
}

void print_expr(std::ostringstream &os, const ExprPtr &e, int parentPrec);

void print_paren(std::ostringstream &os, const ExprPtr &e, int myPrec,
                 int parentPrec, const std::function<void()> &body) {
  (void)e;
  bool paren = myPrec < parentPrec;
  if (paren)
    os << "(";
  body();
  if (paren)
    os << ")";
}

void print_expr(std::ostringstream &os, const ExprPtr &e, int parentPrec) {
  switch (e->kind) {
  case ExprKind::IntLit:
    os << e->intVal;
    return;
  case ExprKind::BoolLit:
    os << (e->boolVal ? "true" : "false");
    return;
  case ExprKind::NullLit:
    os << "null";
    return;
  case ExprKind::Var:
    os << e->name;
    return;
  case ExprKind::Binary: {
    int p = binop_prec(e->bop);
    // Left-associative at its level; right operand printed at p+1 to force
    // parens for same-precedence right nesting (except ==> which is
    // right-associative).
    bool rightAssoc = e->bop == BinOp::Implies || e->bop == BinOp::Explies;
    print_paren(os, e, p, parentPrec, [&] {
      print_expr(os, e->args[0], rightAssoc ? p + 1 : p);
      os << " " << binop_str(e->bop) << " ";
      print_expr(os, e->args[1], rightAssoc ? p : p + 1);
    });
    return;
  }
  case ExprKind::Unary:
    print_paren(os, e, 8, parentPrec, [&] {
      os << (e->uop == UnOp::Not ? "!" : "-");
      print_expr(os, e->args[0], 8);
    });
    return;
  case ExprKind::FnCall:
  case ExprKind::CtorCall: {
    os << e->name;
    if (e->kind == ExprKind::FnCall || !e->args.empty()) {
      os << "(";
      for (size_t i = 0; i < e->args.size(); ++i) {
        if (i)
          os << ", ";
        print_expr(os, e->args[i], 0);
      }
      os << ")";
    }
    return;
  }
  case ExprKind::ArrayIndex:
    print_expr(os, e->args[0], 9);
    os << "[";
    print_expr(os, e->args[1], 0);
    os << "]";
    return;
  case ExprKind::ArrayLength:
    print_expr(os, e->args[0], 9);
    os << ".Length";
    return;
  case ExprKind::SeqSlice: {
    print_expr(os, e->args[0], 9);
    os << "[";
    size_t ix = 1;
    if (e->hasLo)
      print_expr(os, e->args[ix++], 0);
    os << "..";
    if (e->hasHi)
      print_expr(os, e->args[ix], 0);
    os << "]";
    return;
  }
  case ExprKind::MultisetOf:
    os << "multiset(";
    print_expr(os, e->args[0], 0);
    os << ")";
    return;
  case ExprKind::Old:
    os << "old(";
    print_expr(os, e->args[0], 0);
    os << ")";
    return;
  case ExprKind::Forall: {
    print_paren(os, e, 0, parentPrec, [&] {
      os << "forall ";
      for (size_t i = 0; i < e->bound.size(); ++i) {
        if (i)
          os << ", ";
        os << e->bound[i].name;
        if (e->bound[i].type)
          os << ": " << type_str(e->bound[i].type);
      }
      os << " :: ";
      print_expr(os, e->args[0], 0);
    });
    return;
  }
  case ExprKind::DtorAccess:
    print_expr(os, e->args[0], 9);
    os << "." << e->name;
    return;
  case ExprKind::IfThenElse:
    print_paren(os, e, 0, parentPrec, [&] {
      os << "if ";
      print_expr(os, e->args[0], 0);
      os << " then ";
      print_expr(os, e->args[1], 0);
      os << " else ";
      print_expr(os, e->args[2], 0);
    });
    return;
  }
}

std::string ind(int n) { return std::string(2 * n, ' '); }

void print_stmt(std::ostringstream &os, const StmtPtr &s, int indent);

void print_block(std::ostringstream &os, const std::vector<StmtPtr> &body,
                 int indent) {
  os << "{\n";
  for (const auto &st : body)
    print_stmt(os, st, indent + 1);
  os << ind(indent) << "}";
}

void print_stmt(std::ostringstream &os, const StmtPtr &s, int indent) {
  os << ind(indent);
  switch (s->kind) {
  case StmtKind::VarDecl: {
    if (s->ghost)
      os << "ghost ";
    os << "var ";
    for (size_t i = 0; i < s->names.size(); ++i) {
      if (i)
        os << ", ";
      os << s->names[i];
      if (s->declTypes[i])
        os << ": " << type_str(s->declTypes[i]);
    }
    if (!s->exprs.empty()) {
      os << " := ";
      for (size_t i = 0; i < s->exprs.size(); ++i) {
        if (i)
          os << ", ";
        os << pretty_print(s->exprs[i]);
      }
    }
    os << ";\n";
    return;
  }
  case StmtKind::Assign: {
    for (size_t i = 0; i < s->lhs.size(); ++i) {
      if (i)
        os << ", ";
      os << pretty_print(s->lhs[i]);
    }
    os << " := ";
    for (size_t i = 0; i < s->exprs.size(); ++i) {
      if (i)
        os << ", ";
      os << pretty_print(s->exprs[i]);
    }
    os << ";\n";
    return;
  }
  case StmtKind::ArrayAlloc:
    os << s->names[0] << " := new " << type_str(s->allocElemType) << "["
       << pretty_print(s->exprs[0]) << "];\n";
    return;
  case StmtKind::If:
    os << "if " << pretty_print(s->exprs[0]) << " ";
    print_block(os, s->body, indent);
    if (!s->elseBody.empty()) {
      if (s->elseBody.size() == 1 && s->elseBody[0]->kind == StmtKind::If) {
        os << " else ";
        std::ostringstream sub;
        print_stmt(sub, s->elseBody[0], indent);
        std::string text = sub.str();
        os << text.substr(2 * indent); // strip duplicate indent
        return;
      }
      os << " else ";
      print_block(os, s->elseBody, indent);
    }
    os << "\n";
    return;
  case StmtKind::While:
    os << "while " << pretty_print(s->exprs[0]) << "\n";
    for (const auto &inv : s->invariants)
      os << ind(indent + 1) << "invariant " << pretty_print(inv) << ";\n";
    if (s->hasDecreases) {
      os << ind(indent + 1) << "decreases ";
      for (size_t i = 0; i < s->decreases.size(); ++i) {
        if (i)
          os << ", ";
        os << pretty_print(s->decreases[i]);
      }
      os << ";\n";
    }
    os << ind(indent);
    print_block(os, s->body, indent);
    os << "\n";
    return;
  case StmtKind::Call: {
    for (size_t i = 0; i < s->names.size(); ++i) {
      if (i)
        os << ", ";
      os << s->names[i];
    }
    if (!s->names.empty())
      os << " := ";
    os << s->callee << "(";
    for (size_t i = 0; i < s->exprs.size(); ++i) {
      if (i)
        os << ", ";
      os << pretty_print(s->exprs[i]);
    }
    os << ");\n";
    return;
  }
  case StmtKind::Assert:
    os << "assert " << pretty_print(s->exprs[0]) << ";\n";
    return;
  case StmtKind::Assume:
    os << "assume " << pretty_print(s->exprs[0]) << ";\n";
    return;
  case StmtKind::Calc: {
    os << "calc {\n";
    os << ind(indent + 1) << pretty_print(s->calcLines[0]) << ";\n";
    for (size_t i = 0; i + 1 < s->calcLines.size(); ++i) {
      os << ind(indent + 1) << calcop_str(s->calcOps[i]);
      if (!s->calcHints[i].empty()) {
        os << " ";
        print_block(os, s->calcHints[i], indent + 1);
      }
      os << "\n";
      os << ind(indent + 1) << pretty_print(s->calcLines[i + 1]) << ";\n";
    }
    os << ind(indent) << "}\n";
    return;
  }
  case StmtKind::Match: {
    os << "match " << pretty_print(s->exprs[0]) << " {\n";
    for (const auto &mc : s->cases) {
      os << ind(indent + 1) << "case " << mc.ctor;
      if (!mc.binders.empty()) {
        os << "(";
        for (size_t i = 0; i < mc.binders.size(); ++i) {
          if (i)
            os << ", ";
          os << mc.binders[i].name;
        }
        os << ")";
      }
      os << " => ";
      print_block(os, mc.body, indent + 1);
      os << "\n";
    }
    os << ind(indent) << "}\n";
    return;
  }
  case StmtKind::Block:
  case StmtKind::ProofBlock:
    print_block(os, s->body, indent);
    os << "\n";
    return;
  }
}

void print_spec(std::ostringstream &os, const char *kw,
                const std::vector<SpecClause> &clauses) {
  for (const auto &c : clauses)
    os << "  " << kw << " " << pretty_print(c.expr) << "\n";
}

} // namespace

std::string pretty_print(const ExprPtr &e) {
  std::ostringstream os;
  print_expr(os, e, 0);
  return os.str();
}

std::string pretty_print(const StmtPtr &s, int indent) {
  std::ostringstream os;
  print_stmt(os, s, indent);
  return os.str();
}

std::string pretty_print(const Declaration &d) {
  std::ostringstream os;
  if (const auto *f = std::get_if<FunctionDecl>(&d)) {
    os << (f->isPredicate ? "predicate" : "function");
    if (f->isCompiled)
      os << " method";
    os << " " << f->name;
    if (!f->typeParams.empty()) {
      os << "<";
      for (size_t i = 0; i < f->typeParams.size(); ++i)
        os << (i ? "," : "") << f->typeParams[i];
      os << ">";
    }
    os << "(";
    for (size_t i = 0; i < f->params.size(); ++i) {
      if (i)
        os << ", ";
      os << f->params[i].name << ": " << type_str(f->params[i].type);
    }
    os << ")";
    if (!f->isPredicate)
      os << ": " << type_str(f->resultType);
    os << "\n";
    print_spec(os, "requires", f->requires_);
    for (const auto &r : f->reads_)
      os << "  reads " << r.name << "\n";
    if (f->hasDecreases) {
      os << "  decreases ";
      for (size_t i = 0; i < f->decreases_.size(); ++i)
        os << (i ? ", " : "") << pretty_print(f->decreases_[i]);
      os << "\n";
    }
    if (f->body)
      os << "{ " << pretty_print(f->body) << " }\n";
  } else if (const auto *m = std::get_if<MethodDecl>(&d)) {
    os << (m->isLemma ? "lemma" : "method") << " " << m->name;
    if (!m->typeParams.empty()) {
      os << "<";
      for (size_t i = 0; i < m->typeParams.size(); ++i)
        os << (i ? "," : "") << m->typeParams[i];
      os << ">";
    }
    os << "(";
    for (size_t i = 0; i < m->ins.size(); ++i) {
      if (i)
        os << ", ";
      os << m->ins[i].name << ": " << type_str(m->ins[i].type);
    }
    os << ")";
    if (!m->outs.empty()) {
      os << " returns (";
      for (size_t i = 0; i < m->outs.size(); ++i) {
        if (i)
          os << ", ";
        os << m->outs[i].name << ": " << type_str(m->outs[i].type);
      }
      os << ")";
    }
    os << "\n";
    print_spec(os, "requires", m->requires_);
    for (const auto &fc : m->modifies_)
      os << "  modifies " << fc.name << "\n";
    print_spec(os, "ensures", m->ensures_);
    if (m->hasDecreases) {
      os << "  decreases ";
      for (size_t i = 0; i < m->decreases_.size(); ++i)
        os << (i ? ", " : "") << pretty_print(m->decreases_[i]);
      os << "\n";
    }
    if (m->body) {
      os << "{\n";
      for (const auto &s : *m->body)
        os << pretty_print(s, 1);
      os << "}\n";
    }
  } else if (const auto *dt = std::get_if<DatatypeDecl>(&d)) {
    os << "datatype " << dt->name;
    if (!dt->typeParams.empty()) {
      os << "<";
      for (size_t i = 0; i < dt->typeParams.size(); ++i)
        os << (i ? "," : "") << dt->typeParams[i];
      os << ">";
    }
    os << " = ";
    for (size_t i = 0; i < dt->ctors.size(); ++i) {
      if (i)
        os << " | ";
      os << dt->ctors[i].name;
      if (!dt->ctors[i].fields.empty()) {
        os << "(";
        for (size_t j = 0; j < dt->ctors[i].fields.size(); ++j) {
          if (j)
            os << ", ";
          os << dt->ctors[i].fields[j].name << ": "
             << type_str(dt->ctors[i].fields[j].type);
        }
        os << ")";
      }
    }
    os << "\n";
  }
  return os.str();
}

std::string pretty_print(const Program &p) {
  std::string out;
  for (const auto &d : p.decls) {
    out += pretty_print(d);
    out += "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// structural equality
// ---------------------------------------------------------------------------

bool expr_equal(const ExprPtr &a, const ExprPtr &b) {
  if (!a || !b)
    return a == b;
  if (a->kind != b->kind || a->name != b->name || a->intVal != b->intVal ||
      a->boolVal != b->boolVal || a->args.size() != b->args.size() ||
      a->bound.size() != b->bound.size() || a->hasLo != b->hasLo ||
      a->hasHi != b->hasHi)
    return false;
  if (a->kind == ExprKind::Binary && a->bop != b->bop)
    return false;
  if (a->kind == ExprKind::Unary && a->uop != b->uop)
    return false;
  for (size_t i = 0; i < a->bound.size(); ++i)
    if (a->bound[i].name != b->bound[i].name)
      return false;
  for (size_t i = 0; i < a->args.size(); ++i)
    if (!expr_equal(a->args[i], b->args[i]))
      return false;
  return true;
}

namespace {
bool exprs_equal(const std::vector<ExprPtr> &a, const std::vector<ExprPtr> &b) {
  if (a.size() != b.size())
    return false;
  for (size_t i = 0; i < a.size(); ++i)
    if (!expr_equal(a[i], b[i]))
      return false;
  return true;
}
bool stmts_equal(const std::vector<StmtPtr> &a, const std::vector<StmtPtr> &b) {
  if (a.size() != b.size())
    return false;
  for (size_t i = 0; i < a.size(); ++i)
    if (!stmt_equal(a[i], b[i]))
      return false;
  return true;
}
} // namespace

bool stmt_equal(const StmtPtr &a, const StmtPtr &b) {
  if (!a || !b)
    return a == b;
  if (a->kind != b->kind || a->ghost != b->ghost || a->names != b->names ||
      a->callee != b->callee || a->hasDecreases != b->hasDecreases)
    return false;
  if (!exprs_equal(a->lhs, b->lhs) || !exprs_equal(a->exprs, b->exprs) ||
      !exprs_equal(a->invariants, b->invariants) ||
      !exprs_equal(a->decreases, b->decreases) ||
      !exprs_equal(a->calcLines, b->calcLines))
    return false;
  if (a->calcOps != b->calcOps)
    return false;
  if (a->calcHints.size() != b->calcHints.size())
    return false;
  for (size_t i = 0; i < a->calcHints.size(); ++i)
    if (!stmts_equal(a->calcHints[i], b->calcHints[i]))
      return false;
  if (!stmts_equal(a->body, b->body) || !stmts_equal(a->elseBody, b->elseBody))
    return false;
  if (a->cases.size() != b->cases.size())
    return false;
  for (size_t i = 0; i < a->cases.size(); ++i) {
    if (a->cases[i].ctor != b->cases[i].ctor ||
        a->cases[i].binders.size() != b->cases[i].binders.size() ||
        !stmts_equal(a->cases[i].body, b->cases[i].body))
      return false;
    for (size_t j = 0; j < a->cases[i].binders.size(); ++j)
      if (a->cases[i].binders[j].name != b->cases[i].binders[j].name)
        return false;
  }
  return true;
}

namespace {
bool clauses_equal(const std::vector<SpecClause> &a,
                   const std::vector<SpecClause> &b) {
  if (a.size() != b.size())
    return false;
  for (size_t i = 0; i < a.size(); ++i)
    if (!expr_equal(a[i].expr, b[i].expr))
      return false;
  return true;
}
} // namespace

bool program_equal(const Program &a, const Program &b) {
  if (a.decls.size() != b.decls.size())
    return false;
  for (size_t i = 0; i < a.decls.size(); ++i) {
    const auto &da = a.decls[i];
    const auto &db = b.decls[i];
    if (da.index() != db.index())
      return false;
    if (const auto *ma = std::get_if<MethodDecl>(&da)) {
      const auto *mb = std::get_if<MethodDecl>(&db);
      if (ma->name != mb->name || ma->isLemma != mb->isLemma ||
          ma->ins.size() != mb->ins.size() ||
          ma->outs.size() != mb->outs.size() ||
          !clauses_equal(ma->requires_, mb->requires_) ||
          !clauses_equal(ma->ensures_, mb->ensures_) ||
          ma->modifies_.size() != mb->modifies_.size() ||
          ma->hasDecreases != mb->hasDecreases ||
          !exprs_equal(ma->decreases_, mb->decreases_) ||
          ma->body.has_value() != mb->body.has_value())
        return false;
      if (ma->body && !stmts_equal(*ma->body, *mb->body))
        return false;
    } else if (const auto *fa = std::get_if<FunctionDecl>(&da)) {
      const auto *fb = std::get_if<FunctionDecl>(&db);
      if (fa->name != fb->name || fa->isPredicate != fb->isPredicate ||
          fa->isCompiled != fb->isCompiled ||
          fa->params.size() != fb->params.size() ||
          !clauses_equal(fa->requires_, fb->requires_) ||
          fa->reads_.size() != fb->reads_.size() ||
          !expr_equal(fa->body, fb->body))
        return false;
    } else if (const auto *ta = std::get_if<DatatypeDecl>(&da)) {
      const auto *tb = std::get_if<DatatypeDecl>(&db);
      if (ta->name != tb->name || ta->ctors.size() != tb->ctors.size())
        return false;
      for (size_t j = 0; j < ta->ctors.size(); ++j)
        if (ta->ctors[j].name != tb->ctors[j].name ||
            ta->ctors[j].fields.size() != tb->ctors[j].fields.size())
          return false;
    }
  }
  return true;
}

} // namespace minivc
