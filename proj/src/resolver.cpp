#include "minivc/resolver.hpp"

#include <algorithm>
#include <cassert>
#include <functional>

namespace minivc {

namespace {

// The parser produces uniquely-owned trees, so in-place annotation through
// the const pointers is safe here (and only here).
Expr &mut(const ExprPtr &e) { return const_cast<Expr &>(*e); }
Stmt &mut(const StmtPtr &s) { return const_cast<Stmt &>(*s); }

struct VarInfo {
  TypePtr type;
  bool ghost = false;
  bool mutable_ = false;   // locals and out-params
  bool freshArray = false; // assigned from `new`, exempt from modifies
  SourceSpan span;
};

class Resolver {
public:
  explicit Resolver(ResolvedProgram &out) : out_(out) {}

  void run() {
    collectDecls();
    if (!out_.ok())
      return;
    for (auto &d : out_.program.decls) {
      if (auto *f = std::get_if<FunctionDecl>(&d))
        checkFunction(*f);
      else if (auto *m = std::get_if<MethodDecl>(&d))
        checkMethod(*m);
    }
    buildCallGraph();
    if (out_.ok())
      checkFramesTransitive();
  }

private:
  ResolvedProgram &out_;

  // per-declaration state
  std::vector<std::map<std::string, VarInfo>> scopes_;
  std::set<std::string> typeParams_;
  std::set<std::string> readsSet_;    // current function's reads
  std::set<std::string> modifiesSet_; // current method's modifies
  const FunctionDecl *curFn_ = nullptr;
  const MethodDecl *curMethod_ = nullptr;
  bool twoState_ = false; // old() legal (ensures / method body)

  void error(SourceSpan sp, DiagKind k, std::string msg) {
    out_.diagnostics.push_back(
        Diagnostic{sp, Severity::Error, k, std::move(msg)});
  }

  // ---- declaration collection -------------------------------------------

  void collectDecls() {
    std::set<std::string> names;
    for (auto &d : out_.program.decls) {
      const std::string &n = decl_name(d);
      if (!names.insert(n).second) {
        error(decl_span(d), DiagKind::Resolve, "duplicate declaration '" + n + "'");
        continue;
      }
      if (auto *f = std::get_if<FunctionDecl>(&d))
        out_.functions[n] = f;
      else if (auto *m = std::get_if<MethodDecl>(&d))
        out_.methods[n] = m;
      else if (auto *dt = std::get_if<DatatypeDecl>(&d)) {
        out_.datatypes[n] = dt;
        for (auto &c : dt->ctors) {
          if (out_.ctors.count(c.name)) {
            error(c.span, DiagKind::Resolve,
                  "duplicate constructor '" + c.name + "'");
            continue;
          }
          out_.ctors[c.name] = {dt, &c};
          for (size_t i = 0; i < c.fields.size(); ++i)
            out_.fields.emplace(c.fields[i].name,
                                ResolvedProgram::FieldInfo{dt, &c, i});
        }
      }
    }
  }

  // ---- types --------------------------------------------------------------

  // The parser leaves every named type as Datatype; split off type variables
  // and validate datatype references.
  TypePtr normType(const TypePtr &t, SourceSpan sp) {
    if (!t)
      return t;
    switch (t->kind) {
    case TypeKind::Int:
    case TypeKind::Bool:
    case TypeKind::TypeVar:
      return t;
    case TypeKind::Array:
      return Type::array(normType(t->args[0], sp));
    case TypeKind::Seq:
      return Type::seq(normType(t->args[0], sp));
    case TypeKind::Multiset:
      return Type::multiset(normType(t->args[0], sp));
    case TypeKind::Datatype: {
      if (t->args.empty() && typeParams_.count(t->name))
        return Type::typeVar(t->name);
      auto it = out_.datatypes.find(t->name);
      if (it == out_.datatypes.end()) {
        error(sp, DiagKind::Resolve, "unknown type '" + t->name + "'");
        return Type::intType();
      }
      if (it->second->typeParams.size() != t->args.size()) {
        error(sp, DiagKind::TypeError,
              "wrong number of type arguments for '" + t->name + "'");
        return Type::intType();
      }
      std::vector<TypePtr> args;
      for (auto &a : t->args)
        args.push_back(normType(a, sp));
      return Type::datatype(t->name, std::move(args));
    }
    }
    return t;
  }

  static TypePtr substType(const TypePtr &t,
                           const std::map<std::string, TypePtr> &su) {
    if (!t)
      return t;
    switch (t->kind) {
    case TypeKind::TypeVar: {
      auto it = su.find(t->name);
      return it != su.end() ? it->second : t;
    }
    case TypeKind::Array:
      return Type::array(substType(t->args[0], su));
    case TypeKind::Seq:
      return Type::seq(substType(t->args[0], su));
    case TypeKind::Multiset:
      return Type::multiset(substType(t->args[0], su));
    case TypeKind::Datatype: {
      std::vector<TypePtr> args;
      for (auto &a : t->args)
        args.push_back(substType(a, su));
      return Type::datatype(t->name, std::move(args));
    }
    default:
      return t;
    }
  }

  static bool unify(const TypePtr &pat, const TypePtr &actual,
                    std::map<std::string, TypePtr> &su) {
    if (!pat || !actual)
      return false;
    if (pat->kind == TypeKind::TypeVar) {
      auto it = su.find(pat->name);
      if (it != su.end())
        return type_equal(it->second, actual);
      su[pat->name] = actual;
      return true;
    }
    if (pat->kind != actual->kind)
      return false;
    if (pat->name != actual->name || pat->args.size() != actual->args.size())
      return false;
    for (size_t i = 0; i < pat->args.size(); ++i)
      if (!unify(pat->args[i], actual->args[i], su))
        return false;
    return true;
  }

  // ---- scopes -------------------------------------------------------------

  void pushScope() { scopes_.emplace_back(); }
  void popScope() { scopes_.pop_back(); }

  VarInfo *lookup(const std::string &n) {
    for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
      auto f = it->find(n);
      if (f != it->end())
        return &f->second;
    }
    return nullptr;
  }

  // noShadow: statement-level names (locals, match binders) may not shadow
  // anything in scope — substitution-based WP relies on it. Quantifier
  // binders are alpha-renamed downstream and may shadow.
  void declare(const std::string &n, VarInfo info, SourceSpan sp,
               bool noShadow = false) {
    if (noShadow ? lookup(n) != nullptr : scopes_.back().count(n) != 0) {
      error(sp, DiagKind::Resolve, "redeclaration of '" + n + "'");
      return;
    }
    scopes_.back()[n] = std::move(info);
  }

  // ---- expression checking ------------------------------------------------

  // ghostOk: ghost variables and ghost functions may be read
  TypePtr checkExpr(const ExprPtr &e, bool ghostOk) {
    TypePtr t = checkExprInner(e, ghostOk);
    mut(e).type = t;
    return t;
  }

  TypePtr err(const ExprPtr &e, DiagKind k, std::string msg) {
    error(e->span, k, std::move(msg));
    return Type::intType();
  }

  TypePtr checkExprInner(const ExprPtr &e, bool ghostOk) {
    switch (e->kind) {
    case ExprKind::IntLit:
      return Type::intType();
    case ExprKind::BoolLit:
      return Type::boolType();
    case ExprKind::NullLit:
      // typed at the enclosing ==/!= against an array operand
      return Type::array(Type::intType());
    case ExprKind::Var: {
      if (VarInfo *v = lookup(e->name)) {
        if (v->ghost && !ghostOk)
          error(e->span, DiagKind::GhostFlow,
                "ghost variable '" + e->name + "' used in compiled code");
        return v->type;
      }
      auto ct = out_.ctors.find(e->name);
      if (ct != out_.ctors.end()) {
        if (!ct->second.second->fields.empty())
          return err(e, DiagKind::TypeError,
                     "constructor '" + e->name + "' expects arguments");
        if (!ct->second.first->typeParams.empty())
          return err(e, DiagKind::TypeError,
                     "cannot infer type arguments for '" + e->name + "'");
        mut(e).kind = ExprKind::CtorCall;
        return Type::datatype(ct->second.first->name, {});
      }
      return err(e, DiagKind::Resolve, "unresolved name '" + e->name + "'");
    }
    case ExprKind::Binary:
      return checkBinary(e, ghostOk);
    case ExprKind::Unary: {
      TypePtr a = checkExpr(e->args[0], ghostOk);
      if (e->uop == UnOp::Not) {
        if (a->kind != TypeKind::Bool)
          return err(e, DiagKind::TypeError, "'!' expects bool");
        return Type::boolType();
      }
      if (a->kind != TypeKind::Int)
        return err(e, DiagKind::TypeError, "unary '-' expects int");
      return Type::intType();
    }
    case ExprKind::FnCall:
      return checkCallExpr(e, ghostOk);
    case ExprKind::CtorCall:
      return checkCtorCall(e, ghostOk);
    case ExprKind::ArrayIndex: {
      TypePtr a = checkExpr(e->args[0], ghostOk);
      TypePtr i = checkExpr(e->args[1], ghostOk);
      if (i->kind != TypeKind::Int)
        error(e->args[1]->span, DiagKind::TypeError, "index must be int");
      if (a->kind == TypeKind::Array || a->kind == TypeKind::Seq) {
        if (a->kind == TypeKind::Array)
          noteHeapRead(e->args[0], e->span);
        return a->args[0];
      }
      return err(e, DiagKind::TypeError, "indexing a non-array value");
    }
    case ExprKind::ArrayLength: {
      TypePtr a = checkExpr(e->args[0], ghostOk);
      if (a->kind != TypeKind::Array)
        return err(e, DiagKind::TypeError, ".Length expects an array");
      return Type::intType();
    }
    case ExprKind::SeqSlice: {
      TypePtr a = checkExpr(e->args[0], ghostOk);
      for (size_t i = 1; i < e->args.size(); ++i)
        if (checkExpr(e->args[i], ghostOk)->kind != TypeKind::Int)
          error(e->args[i]->span, DiagKind::TypeError,
                "slice bound must be int");
      if (a->kind != TypeKind::Array)
        return err(e, DiagKind::TypeError, "slice expects an array");
      noteHeapRead(e->args[0], e->span);
      return Type::seq(a->args[0]);
    }
    case ExprKind::MultisetOf: {
      TypePtr a = checkExpr(e->args[0], ghostOk);
      if (a->kind != TypeKind::Seq)
        return err(e, DiagKind::TypeError, "multiset(..) expects a sequence");
      return Type::multiset(a->args[0]);
    }
    case ExprKind::Old: {
      if (!twoState_)
        error(e->span, DiagKind::Resolve,
              "old(..) is only allowed in two-state contexts");
      return checkExpr(e->args[0], ghostOk);
    }
    case ExprKind::Forall: {
      pushScope();
      for (auto &b : e->bound) {
        TypePtr bt = b.type ? normType(b.type, b.span) : Type::intType();
        const_cast<BoundVar &>(b).type = bt;
        declare(b.name, VarInfo{bt, true, false, false, b.span}, b.span);
      }
      TypePtr body = checkExpr(e->args[0], true);
      popScope();
      if (body->kind != TypeKind::Bool)
        return err(e, DiagKind::TypeError, "quantifier body must be bool");
      return Type::boolType();
    }
    case ExprKind::DtorAccess: {
      TypePtr a = checkExpr(e->args[0], ghostOk);
      if (a->kind != TypeKind::Datatype)
        return err(e, DiagKind::TypeError,
                   "field access on a non-datatype value");
      const DatatypeDecl *dt = out_.datatypes.at(a->name);
      std::map<std::string, TypePtr> su;
      for (size_t i = 0; i < dt->typeParams.size(); ++i)
        su[dt->typeParams[i]] = a->args[i];
      for (auto &c : dt->ctors)
        for (auto &f : c.fields)
          if (f.name == e->name)
            return substType(normTypeIn(dt, f.type, f.span), su);
      return err(e, DiagKind::Resolve,
                 "'" + a->name + "' has no field '" + e->name + "'");
    }
    case ExprKind::IfThenElse: {
      TypePtr c = checkExpr(e->args[0], ghostOk);
      if (c->kind != TypeKind::Bool)
        error(e->args[0]->span, DiagKind::TypeError, "condition must be bool");
      TypePtr a = checkExpr(e->args[1], ghostOk);
      TypePtr b = checkExpr(e->args[2], ghostOk);
      if (!type_equal(a, b))
        error(e->span, DiagKind::TypeError,
              "branches have different types: " + type_str(a) + " vs " +
                  type_str(b));
      return a;
    }
    }
    return Type::intType();
  }

  // Normalizes a field type in the scope of its datatype's parameters.
  TypePtr normTypeIn(const DatatypeDecl *dt, const TypePtr &t, SourceSpan sp) {
    std::set<std::string> saved = typeParams_;
    typeParams_.insert(dt->typeParams.begin(), dt->typeParams.end());
    TypePtr r = normType(t, sp);
    typeParams_ = std::move(saved);
    return r;
  }

  TypePtr checkBinary(const ExprPtr &e, bool ghostOk) {
    // == / != admit null on either side against an array
    if (e->bop == BinOp::Eq || e->bop == BinOp::Ne) {
      bool ln = e->args[0]->kind == ExprKind::NullLit;
      bool rn = e->args[1]->kind == ExprKind::NullLit;
      if (ln || rn) {
        TypePtr other = checkExpr(e->args[ln ? 1 : 0], ghostOk);
        if (other->kind != TypeKind::Array)
          error(e->span, DiagKind::TypeError,
                "null compares only against arrays");
        mut(e->args[ln ? 0 : 1]).type = other;
        return Type::boolType();
      }
      // a bare nullary constructor of a generic datatype (e.g. Nil) takes
      // its type arguments from the other operand
      auto bareGenericCtor = [&](const ExprPtr &x) -> const DatatypeDecl * {
        if (x->kind != ExprKind::Var || lookup(x->name))
          return nullptr;
        auto it = out_.ctors.find(x->name);
        if (it == out_.ctors.end() || !it->second.second->fields.empty() ||
            it->second.first->typeParams.empty())
          return nullptr;
        return it->second.first;
      };
      size_t ci = bareGenericCtor(e->args[0])   ? 0
                  : bareGenericCtor(e->args[1]) ? 1
                                                : 2;
      if (ci < 2) {
        const DatatypeDecl *dt = bareGenericCtor(e->args[ci]);
        TypePtr other = checkExpr(e->args[1 - ci], ghostOk);
        if (other->kind != TypeKind::Datatype || other->name != dt->name) {
          error(e->span, DiagKind::TypeError,
                "cannot infer type arguments for '" + e->args[ci]->name + "'");
          return Type::boolType();
        }
        mut(e->args[ci]).kind = ExprKind::CtorCall;
        mut(e->args[ci]).type = other;
        return Type::boolType();
      }
      TypePtr a = checkExpr(e->args[0], ghostOk);
      TypePtr b = checkExpr(e->args[1], ghostOk);
      if (!type_equal(a, b))
        error(e->span, DiagKind::TypeError,
              "comparing values of different types: " + type_str(a) + " vs " +
                  type_str(b));
      return Type::boolType();
    }
    TypePtr a = checkExpr(e->args[0], ghostOk);
    TypePtr b = checkExpr(e->args[1], ghostOk);
    switch (e->bop) {
    case BinOp::Add: case BinOp::Sub: case BinOp::Mul:
    case BinOp::Div: case BinOp::Mod:
      if (a->kind != TypeKind::Int || b->kind != TypeKind::Int)
        return err(e, DiagKind::TypeError, "arithmetic expects int operands");
      return Type::intType();
    case BinOp::Lt: case BinOp::Le: case BinOp::Gt: case BinOp::Ge:
      if (a->kind != TypeKind::Int || b->kind != TypeKind::Int)
        return err(e, DiagKind::TypeError, "comparison expects int operands");
      return Type::boolType();
    case BinOp::And: case BinOp::Or: case BinOp::Implies:
    case BinOp::Explies: case BinOp::Iff:
      if (a->kind != TypeKind::Bool || b->kind != TypeKind::Bool)
        return err(e, DiagKind::TypeError,
                   "logical operator expects bool operands");
      return Type::boolType();
    default:
      return Type::boolType();
    }
  }

  TypePtr checkCallExpr(const ExprPtr &e, bool ghostOk) {
    // datatype constructor application?
    auto ct = out_.ctors.find(e->name);
    if (ct != out_.ctors.end()) {
      mut(e).kind = ExprKind::CtorCall;
      return checkCtorCall(e, ghostOk);
    }
    auto fn = out_.functions.find(e->name);
    if (fn == out_.functions.end()) {
      if (out_.methods.count(e->name))
        return err(e, DiagKind::Resolve,
                   "method '" + e->name +
                       "' cannot be called in an expression");
      return err(e, DiagKind::Resolve, "unresolved function '" + e->name + "'");
    }
    const FunctionDecl *f = fn->second;
    if (!f->isCompiled && !ghostOk)
      error(e->span, DiagKind::GhostFlow,
            "ghost function '" + e->name + "' called in compiled code");
    if (e->args.size() != f->params.size())
      return err(e, DiagKind::TypeError,
                 "'" + e->name + "' expects " +
                     std::to_string(f->params.size()) + " argument(s)");
    std::map<std::string, TypePtr> su;
    for (size_t i = 0; i < e->args.size(); ++i) {
      TypePtr at = checkExpr(e->args[i], ghostOk);
      TypePtr pt = normTypeOf(f, f->params[i].type, f->params[i].span);
      if (!unify(pt, at, su))
        error(e->args[i]->span, DiagKind::TypeError,
              "argument " + std::to_string(i + 1) + " of '" + e->name +
                  "': expected " + type_str(pt) + ", got " + type_str(at));
    }
    recordCall(e->name);
    // reads coverage: callee's reads must map to arrays the caller may read
    for (const auto &rc : f->reads_) {
      size_t pi = paramIndex(f->params, rc.name);
      if (pi < e->args.size())
        noteHeapRead(e->args[pi], e->span);
    }
    return substType(normTypeOf(f, f->resultType, f->span), su);
  }

  TypePtr checkCtorCall(const ExprPtr &e, bool ghostOk) {
    auto ct = out_.ctors.find(e->name);
    if (ct == out_.ctors.end())
      return err(e, DiagKind::Resolve, "unresolved constructor '" + e->name + "'");
    const DatatypeDecl *dt = ct->second.first;
    const DatatypeCtor *c = ct->second.second;
    if (e->args.size() != c->fields.size())
      return err(e, DiagKind::TypeError,
                 "constructor '" + e->name + "' expects " +
                     std::to_string(c->fields.size()) + " argument(s)");
    std::map<std::string, TypePtr> su;
    for (size_t i = 0; i < e->args.size(); ++i) {
      TypePtr at = checkExpr(e->args[i], ghostOk);
      TypePtr ft = normTypeIn(dt, c->fields[i].type, c->fields[i].span);
      if (!unify(ft, at, su))
        error(e->args[i]->span, DiagKind::TypeError,
              "field '" + c->fields[i].name + "': expected " + type_str(ft) +
                  ", got " + type_str(at));
    }
    std::vector<TypePtr> targs;
    for (auto &tp : dt->typeParams) {
      auto it = su.find(tp);
      if (it == su.end())
        return err(e, DiagKind::TypeError,
                   "cannot infer type arguments for '" + e->name + "'");
      targs.push_back(it->second);
    }
    return Type::datatype(dt->name, std::move(targs));
  }

  TypePtr normTypeOf(const FunctionDecl *f, const TypePtr &t, SourceSpan sp) {
    std::set<std::string> saved = typeParams_;
    typeParams_.insert(f->typeParams.begin(), f->typeParams.end());
    TypePtr r = normType(t, sp);
    typeParams_ = std::move(saved);
    return r;
  }

  static size_t paramIndex(const std::vector<Param> &ps,
                           const std::string &n) {
    for (size_t i = 0; i < ps.size(); ++i)
      if (ps[i].name == n)
        return i;
    return ps.size();
  }

  // ---- frame bookkeeping ----------------------------------------------------

  // Heap reads inside a function body must be covered by its reads clause.
  void noteHeapRead(const ExprPtr &arrayExpr, SourceSpan sp) {
    if (!curFn_)
      return; // methods may read freely
    if (arrayExpr->kind == ExprKind::Var && readsSet_.count(arrayExpr->name))
      return;
    error(sp, DiagKind::ReadsViolation,
          "function '" + curFn_->name +
              "' reads the heap outside its reads clause");
  }

  void recordCall(const std::string &callee) {
    std::string caller =
        curFn_ ? curFn_->name : (curMethod_ ? curMethod_->name : "");
    if (!caller.empty())
      out_.callGraph[caller].insert(callee);
  }

  // ---- function declarations -----------------------------------------------

  void checkFunction(FunctionDecl &f) {
    curFn_ = &f;
    curMethod_ = nullptr;
    twoState_ = false;
    typeParams_ = std::set<std::string>(f.typeParams.begin(),
                                        f.typeParams.end());
    readsSet_.clear();
    out_.callGraph[f.name]; // ensure node exists
    scopes_.clear();
    pushScope();
    for (auto &p : f.params) {
      const_cast<Param &>(p).type = normType(p.type, p.span);
      declare(p.name, VarInfo{p.type, false, false, false, p.span}, p.span);
    }
    f.resultType = f.isPredicate ? Type::boolType()
                                 : normType(f.resultType, f.span);
    for (auto &rc : f.reads_) {
      VarInfo *v = lookup(rc.name);
      if (!v || v->type->kind != TypeKind::Array)
        error(rc.span, DiagKind::Resolve,
              "reads clause names a non-array parameter");
      readsSet_.insert(rc.name);
    }
    for (auto &rq : f.requires_) {
      // requires may read the heap without a reads clause restriction? No:
      // keep the same discipline as the body.
      if (checkExpr(rq.expr, true)->kind != TypeKind::Bool)
        error(rq.span, DiagKind::TypeError, "requires clause must be bool");
    }
    for (auto &d : f.decreases_)
      checkExpr(d, true);
    if (!f.body) {
      error(f.span, DiagKind::Resolve,
            "function '" + f.name + "' has no body");
    } else {
      TypePtr bt = checkExpr(f.body, true);
      if (!type_equal(bt, f.resultType))
        error(f.body->span, DiagKind::TypeError,
              "body has type " + type_str(bt) + ", expected " +
                  type_str(f.resultType));
    }
    popScope();
    curFn_ = nullptr;
  }

  // ---- method declarations ---------------------------------------------------

  void checkMethod(MethodDecl &m) {
    curFn_ = nullptr;
    curMethod_ = &m;
    typeParams_ = std::set<std::string>(m.typeParams.begin(),
                                        m.typeParams.end());
    modifiesSet_.clear();
    out_.callGraph[m.name];
    scopes_.clear();
    pushScope();
    bool ghostCtx = m.isLemma;
    for (auto &p : m.ins) {
      const_cast<Param &>(p).type = normType(p.type, p.span);
      declare(p.name, VarInfo{p.type, ghostCtx, false, false, p.span}, p.span);
    }
    for (auto &p : m.outs) {
      const_cast<Param &>(p).type = normType(p.type, p.span);
      declare(p.name, VarInfo{p.type, ghostCtx, true, false, p.span}, p.span);
    }
    for (auto &fc : m.modifies_) {
      VarInfo *v = lookup(fc.name);
      if (!v || v->type->kind != TypeKind::Array)
        error(fc.span, DiagKind::Resolve,
              "modifies clause names a non-array parameter");
      modifiesSet_.insert(fc.name);
    }
    twoState_ = false;
    for (auto &rq : m.requires_)
      if (checkExpr(rq.expr, true)->kind != TypeKind::Bool)
        error(rq.span, DiagKind::TypeError, "requires clause must be bool");
    twoState_ = true;
    for (auto &en : m.ensures_)
      if (checkExpr(en.expr, true)->kind != TypeKind::Bool)
        error(en.span, DiagKind::TypeError, "ensures clause must be bool");
    twoState_ = false;
    for (auto &d : m.decreases_)
      checkExpr(d, true);
    if (m.body) {
      twoState_ = true; // old() in asserts/invariants refers to entry state
      pushScope();
      std::set<std::string> assigned;
      checkStmts(*m.body, ghostCtx, assigned);
      for (auto &p : m.outs)
        if (!assigned.count(p.name))
          error(p.span, DiagKind::DefiniteAssignment,
                "out-parameter '" + p.name +
                    "' may be unassigned at method exit");
      popScope();
      twoState_ = false;
    } else if (!m.isLemma) {
      error(m.span, DiagKind::Resolve,
            "method '" + m.name + "' has no body");
    }
    popScope();
    curMethod_ = nullptr;
  }

  // ---- statements --------------------------------------------------------------

  // `assigned` accumulates variables definitely assigned on every path.
  void checkStmts(const std::vector<StmtPtr> &body, bool ghostCtx,
                  std::set<std::string> &assigned) {
    for (auto &s : body)
      checkStmt(s, ghostCtx, assigned);
  }

  void markAssigned(const std::string &n, std::set<std::string> &assigned) {
    assigned.insert(n);
  }

  bool isGhostVar(const std::string &n) {
    VarInfo *v = lookup(n);
    return v && v->ghost;
  }

  void checkAssignTarget(const ExprPtr &lhsE, bool rhsGhost, bool ghostCtx,
                         std::set<std::string> &assigned, SourceSpan sp) {
    if (lhsE->kind == ExprKind::Var) {
      VarInfo *v = lookup(lhsE->name);
      if (!v) {
        error(sp, DiagKind::Resolve, "unresolved name '" + lhsE->name + "'");
        return;
      }
      if (!v->mutable_)
        error(sp, DiagKind::Resolve,
              "cannot assign to in-parameter '" + lhsE->name + "'");
      if (rhsGhost && !v->ghost)
        error(sp, DiagKind::GhostFlow,
              "ghost value assigned to compiled variable '" + lhsE->name + "'");
      mut(lhsE).type = v->type;
      markAssigned(lhsE->name, assigned);
      return;
    }
    if (lhsE->kind == ExprKind::ArrayIndex) {
      if (ghostCtx)
        error(sp, DiagKind::GhostFlow, "heap update in ghost context");
      TypePtr at = checkExpr(lhsE->args[0], true);
      checkExpr(lhsE->args[1], ghostCtx ? true : false);
      if (at->kind != TypeKind::Array) {
        error(sp, DiagKind::TypeError, "assignment target is not an array");
        return;
      }
      mut(lhsE).type = at->args[0];
      // modifies discipline: named array must be modifiable or fresh
      if (lhsE->args[0]->kind == ExprKind::Var) {
        const std::string &an = lhsE->args[0]->name;
        VarInfo *v = lookup(an);
        if (v && !v->freshArray && !modifiesSet_.count(an))
          error(sp, DiagKind::ModifiesViolation,
                "array '" + an + "' is not in the modifies clause");
      }
      return;
    }
    error(sp, DiagKind::Resolve, "invalid assignment target");
  }

  // Does the expression read anything ghost? (used to classify assignments)
  bool exprIsGhost(const ExprPtr &e) {
    if (e->kind == ExprKind::Var && isGhostVar(e->name))
      return true;
    if (e->kind == ExprKind::FnCall) {
      auto it = out_.functions.find(e->name);
      if (it != out_.functions.end() && !it->second->isCompiled)
        return true;
    }
    if (e->kind == ExprKind::Old || e->kind == ExprKind::Forall ||
        e->kind == ExprKind::MultisetOf || e->kind == ExprKind::SeqSlice)
      return true;
    for (auto &a : e->args)
      if (exprIsGhost(a))
        return true;
    return false;
  }

  void checkStmt(const StmtPtr &s, bool ghostCtx, std::set<std::string> &assigned) {
    switch (s->kind) {
    case StmtKind::VarDecl: {
      bool g = ghostCtx || s->ghost;
      std::vector<TypePtr> initTypes;
      for (auto &init : s->exprs)
        initTypes.push_back(checkExpr(init, g || exprGhostOk(init, g)));
      if (!s->exprs.empty() && s->exprs.size() != s->names.size()) {
        error(s->span, DiagKind::Resolve,
              "mismatched counts in variable initialization");
        return;
      }
      for (size_t i = 0; i < s->names.size(); ++i) {
        TypePtr declared = i < s->declTypes.size() && s->declTypes[i]
                               ? normType(s->declTypes[i], s->span)
                               : nullptr;
        TypePtr t = declared;
        if (i < initTypes.size()) {
          if (declared && !type_equal(declared, initTypes[i]))
            error(s->span, DiagKind::TypeError,
                  "initializer has type " + type_str(initTypes[i]) +
                      ", expected " + type_str(declared));
          if (!t)
            t = initTypes[i];
        }
        if (!t) {
          error(s->span, DiagKind::TypeError,
                "cannot infer type of '" + s->names[i] + "'");
          t = Type::intType();
        }
        mut(s).declTypes.resize(s->names.size());
        mut(s).declTypes[i] = t;
        declare(s->names[i], VarInfo{t, g, true, false, s->span}, s->span,
                /*noShadow=*/true);
        if (i < initTypes.size())
          markAssigned(s->names[i], assigned);
        if (!g && i < s->exprs.size() && exprIsGhost(s->exprs[i]))
          error(s->exprs[i]->span, DiagKind::GhostFlow,
                "compiled variable initialized from a ghost expression");
      }
      return;
    }
    case StmtKind::Assign: {
      // method call parsed as assignment (`x := m(..)` or `x, y := m(..)`)?
      if (s->lhs.size() >= 1 && s->exprs.size() == 1 &&
          s->exprs[0]->kind == ExprKind::FnCall &&
          out_.methods.count(s->exprs[0]->name) &&
          !out_.functions.count(s->exprs[0]->name) &&
          !out_.ctors.count(s->exprs[0]->name)) {
        Stmt &ms = mut(s);
        ms.kind = StmtKind::Call;
        ms.names.clear();
        ms.nameSpans.clear();
        for (const auto &t : s->lhs) {
          if (t->kind != ExprKind::Var) {
            error(s->span, DiagKind::Resolve,
                  "method results must be assigned to variables");
            return;
          }
          ms.names.push_back(t->name);
          ms.nameSpans.push_back(t->span);
        }
        ms.callee = s->exprs[0]->name;
        ms.exprs = s->exprs[0]->args;
        ms.lhs.clear();
        checkStmt(s, ghostCtx, assigned);
        return;
      }
      if (s->lhs.size() != s->exprs.size()) {
        error(s->span, DiagKind::Resolve,
              "mismatched counts in assignment");
        return;
      }
      for (size_t i = 0; i < s->lhs.size(); ++i) {
        bool rhsGhost = !ghostCtx && exprIsGhost(s->exprs[i]);
        bool lhsGhost =
            s->lhs[i]->kind == ExprKind::Var && isGhostVar(s->lhs[i]->name);
        bool g = ghostCtx || lhsGhost;
        TypePtr rt = checkExpr(s->exprs[i], g);
        checkAssignTarget(s->lhs[i], rhsGhost, ghostCtx, assigned, s->span);
        if (s->lhs[i]->type && !type_equal(s->lhs[i]->type, rt))
          error(s->span, DiagKind::TypeError,
                "assigning " + type_str(rt) + " to " +
                    type_str(s->lhs[i]->type));
        // track freshness loss: assigning a non-new rhs clears fresh flag
        if (s->lhs[i]->kind == ExprKind::Var) {
          VarInfo *v = lookup(s->lhs[i]->name);
          if (v)
            v->freshArray = false;
        }
      }
      return;
    }
    case StmtKind::ArrayAlloc: {
      VarInfo *v = lookup(s->names[0]);
      TypePtr elem = normType(s->allocElemType, s->span);
      mut(s).allocElemType = elem;
      if (!v) {
        error(s->span, DiagKind::Resolve,
              "unresolved name '" + s->names[0] + "'");
        return;
      }
      if (!v->mutable_)
        error(s->span, DiagKind::Resolve,
              "cannot assign to in-parameter '" + s->names[0] + "'");
      if (!type_equal(v->type, Type::array(elem)))
        error(s->span, DiagKind::TypeError,
              "'" + s->names[0] + "' has type " + type_str(v->type) +
                  ", new array has type " + type_str(Type::array(elem)));
      if (checkExpr(s->exprs[0], ghostCtx)->kind != TypeKind::Int)
        error(s->exprs[0]->span, DiagKind::TypeError,
              "array length must be int");
      if (ghostCtx)
        error(s->span, DiagKind::GhostFlow, "allocation in ghost context");
      v->freshArray = true;
      markAssigned(s->names[0], assigned);
      return;
    }
    case StmtKind::If: {
      TypePtr c = checkExpr(s->exprs[0], ghostCtx);
      if (c->kind != TypeKind::Bool)
        error(s->exprs[0]->span, DiagKind::TypeError, "condition must be bool");
      if (!ghostCtx && exprIsGhost(s->exprs[0]))
        error(s->exprs[0]->span, DiagKind::GhostFlow,
              "ghost expression controls compiled code");
      std::set<std::string> at = assigned, ae = assigned;
      pushScope();
      checkStmts(s->body, ghostCtx, at);
      popScope();
      pushScope();
      checkStmts(s->elseBody, ghostCtx, ae);
      popScope();
      // definitely assigned ⇔ assigned in both branches
      for (const auto &n : at)
        if (ae.count(n))
          assigned.insert(n);
      return;
    }
    case StmtKind::While: {
      TypePtr c = checkExpr(s->exprs[0], ghostCtx);
      if (c->kind != TypeKind::Bool)
        error(s->exprs[0]->span, DiagKind::TypeError, "guard must be bool");
      if (!ghostCtx && exprIsGhost(s->exprs[0]))
        error(s->exprs[0]->span, DiagKind::GhostFlow,
              "ghost expression controls compiled code");
      for (auto &inv : s->invariants)
        if (checkExpr(inv, true)->kind != TypeKind::Bool)
          error(inv->span, DiagKind::TypeError, "invariant must be bool");
      for (auto &d : s->decreases)
        checkExpr(d, true);
      std::set<std::string> ab = assigned;
      pushScope();
      checkStmts(s->body, ghostCtx, ab);
      popScope();
      // the loop may run zero times: contributes nothing to `assigned`
      return;
    }
    case StmtKind::Call:
      checkCallStmt(s, ghostCtx, assigned);
      return;
    case StmtKind::Assert:
    case StmtKind::Assume:
      if (checkExpr(s->exprs[0], true)->kind != TypeKind::Bool)
        error(s->exprs[0]->span, DiagKind::TypeError,
              "asserted condition must be bool");
      return;
    case StmtKind::Calc: {
      TypePtr lineType;
      for (auto &l : s->calcLines) {
        TypePtr t = checkExpr(l, true);
        if (!lineType)
          lineType = t;
        else if (!type_equal(lineType, t))
          error(l->span, DiagKind::TypeError,
                "calc lines have different types");
      }
      for (size_t i = 0; i < s->calcOps.size(); ++i) {
        CalcOp op = s->calcOps[i];
        bool needsInt = op == CalcOp::Lt || op == CalcOp::Le ||
                        op == CalcOp::Gt || op == CalcOp::Ge;
        bool needsBool = op == CalcOp::Implies || op == CalcOp::Explies ||
                         op == CalcOp::Iff;
        if (needsInt && lineType && lineType->kind != TypeKind::Int)
          error(s->calcOpSpans[i], DiagKind::TypeError,
                "ordered calc step over non-int lines");
        if (needsBool && lineType && lineType->kind != TypeKind::Bool)
          error(s->calcOpSpans[i], DiagKind::TypeError,
                "propositional calc step over non-bool lines");
      }
      for (auto &hint : s->calcHints) {
        std::set<std::string> ah = assigned;
        pushScope();
        checkStmts(hint, true, ah);
        popScope();
      }
      return;
    }
    case StmtKind::Match: {
      TypePtr st = checkExpr(s->exprs[0], ghostCtx);
      if (st->kind != TypeKind::Datatype) {
        error(s->exprs[0]->span, DiagKind::TypeError,
              "match scrutinee must be a datatype value");
        return;
      }
      const DatatypeDecl *dt = out_.datatypes.at(st->name);
      std::map<std::string, TypePtr> su;
      for (size_t i = 0; i < dt->typeParams.size(); ++i)
        su[dt->typeParams[i]] = st->args[i];
      std::set<std::string> seen;
      std::vector<std::set<std::string>> branchAssigned;
      for (auto &mc : s->cases) {
        const DatatypeCtor *c = nullptr;
        for (auto &cand : dt->ctors)
          if (cand.name == mc.ctor)
            c = &cand;
        if (!c) {
          error(mc.span, DiagKind::Resolve,
                "'" + st->name + "' has no constructor '" + mc.ctor + "'");
          continue;
        }
        if (!seen.insert(mc.ctor).second)
          error(mc.span, DiagKind::Resolve,
                "duplicate case '" + mc.ctor + "'");
        if (mc.binders.size() != c->fields.size()) {
          error(mc.span, DiagKind::TypeError,
                "case '" + mc.ctor + "' expects " +
                    std::to_string(c->fields.size()) + " binder(s)");
          continue;
        }
        pushScope();
        for (size_t i = 0; i < mc.binders.size(); ++i) {
          TypePtr ft =
              substType(normTypeIn(dt, c->fields[i].type, c->fields[i].span), su);
          const_cast<BoundVar &>(mc.binders[i]).type = ft;
          declare(mc.binders[i].name,
                  VarInfo{ft, ghostCtx, false, false, mc.binders[i].span},
                  mc.binders[i].span, /*noShadow=*/true);
        }
        std::set<std::string> ab = assigned;
        checkStmts(mc.body, ghostCtx, ab);
        branchAssigned.push_back(std::move(ab));
        popScope();
      }
      for (auto &c : dt->ctors)
        if (!seen.count(c.name))
          error(s->span, DiagKind::Resolve,
                "match is missing case '" + c.name + "'");
      if (!branchAssigned.empty() && seen.size() == dt->ctors.size()) {
        for (const auto &n : branchAssigned[0]) {
          bool all = true;
          for (auto &ba : branchAssigned)
            all = all && ba.count(n);
          if (all)
            assigned.insert(n);
        }
      }
      return;
    }
    case StmtKind::Block:
    case StmtKind::ProofBlock: {
      pushScope();
      checkStmts(s->body, ghostCtx, assigned);
      popScope();
      return;
    }
    }
  }

  // Initializers of compiled variables must not read ghost state; this
  // returns whether ghost reads are permissible for the given init.
  bool exprGhostOk(const ExprPtr &, bool declGhost) { return declGhost; }

  void checkCallStmt(const StmtPtr &s, bool ghostCtx,
                     std::set<std::string> &assigned) {
    auto it = out_.methods.find(s->callee);
    if (it == out_.methods.end()) {
      error(s->span, DiagKind::Resolve,
            "unresolved method '" + s->callee + "'");
      return;
    }
    const MethodDecl *callee = it->second;
    if (callee->isLemma && !s->names.empty())
      error(s->span, DiagKind::Resolve, "lemmas have no out-parameters");
    if (!callee->isLemma && ghostCtx)
      error(s->span, DiagKind::GhostFlow,
            "compiled method called from ghost context");
    if (s->exprs.size() != callee->ins.size()) {
      error(s->span, DiagKind::TypeError,
            "'" + s->callee + "' expects " +
                std::to_string(callee->ins.size()) + " argument(s)");
      return;
    }
    bool ghostArgsOk = ghostCtx || callee->isLemma;
    std::map<std::string, TypePtr> su;
    for (size_t i = 0; i < s->exprs.size(); ++i) {
      TypePtr at = checkExpr(s->exprs[i], ghostArgsOk);
      TypePtr pt = normTypeOfM(callee, callee->ins[i].type,
                               callee->ins[i].span);
      if (!unify(pt, at, su))
        error(s->exprs[i]->span, DiagKind::TypeError,
              "argument " + std::to_string(i + 1) + " of '" + s->callee +
                  "': expected " + type_str(pt) + ", got " + type_str(at));
      if (!ghostArgsOk && exprIsGhost(s->exprs[i]))
        error(s->exprs[i]->span, DiagKind::GhostFlow,
              "ghost argument passed to compiled method");
    }
    if (!callee->isLemma) {
      if (s->names.size() != callee->outs.size()) {
        error(s->span, DiagKind::TypeError,
              "'" + s->callee + "' returns " +
                  std::to_string(callee->outs.size()) + " value(s)");
        return;
      }
      for (size_t i = 0; i < s->names.size(); ++i) {
        VarInfo *v = lookup(s->names[i]);
        if (!v) {
          error(s->nameSpans[i], DiagKind::Resolve,
                "unresolved name '" + s->names[i] + "'");
          continue;
        }
        if (!v->mutable_)
          error(s->nameSpans[i], DiagKind::Resolve,
                "cannot assign to in-parameter '" + s->names[i] + "'");
        TypePtr ot = substType(
            normTypeOfM(callee, callee->outs[i].type, callee->outs[i].span),
            su);
        if (!type_equal(v->type, ot))
          error(s->nameSpans[i], DiagKind::TypeError,
                "target '" + s->names[i] + "' has type " + type_str(v->type) +
                    ", method returns " + type_str(ot));
        v->freshArray = false;
        markAssigned(s->names[i], assigned);
      }
      // callee's modifies, mapped through actuals, must be writable here
      for (const auto &fc : callee->modifies_) {
        size_t pi = paramIndexM(callee->ins, fc.name);
        if (pi >= s->exprs.size())
          continue;
        const ExprPtr &actual = s->exprs[pi];
        if (actual->kind == ExprKind::Var) {
          VarInfo *v = lookup(actual->name);
          if (v && !v->freshArray && !modifiesSet_.count(actual->name))
            error(s->span, DiagKind::ModifiesViolation,
                  "call may modify '" + actual->name +
                      "', which is not in the modifies clause");
        }
      }
    }
    recordCall(s->callee);
  }

  TypePtr normTypeOfM(const MethodDecl *m, const TypePtr &t, SourceSpan sp) {
    std::set<std::string> saved = typeParams_;
    typeParams_.insert(m->typeParams.begin(), m->typeParams.end());
    TypePtr r = normType(t, sp);
    typeParams_ = std::move(saved);
    return r;
  }

  static size_t paramIndexM(const std::vector<Param> &ps,
                            const std::string &n) {
    return paramIndex(ps, n);
  }

  // ---- call graph / SCCs -------------------------------------------------------

  void buildCallGraph() {
    // Tarjan
    std::map<std::string, int> index, low;
    std::vector<std::string> stack;
    std::set<std::string> onStack;
    int counter = 0, sccCounter = 0;
    std::function<void(const std::string &)> strongconnect =
        [&](const std::string &v) {
          index[v] = low[v] = counter++;
          stack.push_back(v);
          onStack.insert(v);
          auto it = out_.callGraph.find(v);
          if (it != out_.callGraph.end()) {
            for (const auto &w : it->second) {
              if (!out_.callGraph.count(w))
                continue;
              if (!index.count(w)) {
                strongconnect(w);
                low[v] = std::min(low[v], low[w]);
              } else if (onStack.count(w)) {
                low[v] = std::min(low[v], index[w]);
              }
            }
          }
          if (low[v] == index[v]) {
            int id = sccCounter++;
            size_t sz = 0;
            std::vector<std::string> members;
            while (true) {
              std::string w = stack.back();
              stack.pop_back();
              onStack.erase(w);
              out_.sccId[w] = id;
              members.push_back(w);
              ++sz;
              if (w == v)
                break;
            }
            if (sz > 1)
              for (auto &m : members)
                out_.recursive.insert(m);
          }
        };
    for (auto &kv : out_.callGraph)
      if (!index.count(kv.first))
        strongconnect(kv.first);
    // self-loops
    for (auto &kv : out_.callGraph)
      if (kv.second.count(kv.first))
        out_.recursive.insert(kv.first);
  }

  // Transitive reads coverage: if f reads through a call to g, the per-call
  // checks in checkCallExpr already flagged uncovered actuals, so nothing
  // further is needed; this hook validates modifies transitivity the same
  // way (also handled per call). Kept for clarity.
  void checkFramesTransitive() {}
};

} // namespace

ResolvedProgram resolve(Program program) {
  ResolvedProgram out;
  out.program = std::move(program);
  Resolver r(out);
  r.run();
  std::stable_sort(out.diagnostics.begin(), out.diagnostics.end(), diag_less);
  return out;
}

} // namespace minivc
