#include "minivc/interp.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <set>

#include "minivc/euclid.hpp"
#include "minivc/pretty.hpp"

namespace minivc {

// ---------------------------------------------------------------------------
// Value
// ---------------------------------------------------------------------------

Value Value::mkInt(int64_t v) {
  Value r;
  r.k = K::Int;
  r.i = v;
  return r;
}
Value Value::mkBool(bool v) {
  Value r;
  r.k = K::Bool;
  r.i = v ? 1 : 0;
  return r;
}
Value Value::mkNull() {
  Value r;
  r.k = K::Array;
  return r;
}
Value Value::mkArray(std::vector<Value> elems) {
  Value r;
  r.k = K::Array;
  r.arr = std::make_shared<std::vector<Value>>(std::move(elems));
  return r;
}
Value Value::mkSeq(std::vector<Value> elems) {
  Value r;
  r.k = K::Seq;
  r.elems = std::move(elems);
  return r;
}
Value Value::mkMultiset(std::vector<Value> elems) {
  Value r;
  r.k = K::Multiset;
  r.elems = std::move(elems);
  std::sort(r.elems.begin(), r.elems.end());
  return r;
}
Value Value::mkDatatype(std::string ctor, std::vector<Value> fields) {
  Value r;
  r.k = K::Datatype;
  r.ctor = std::move(ctor);
  r.elems = std::move(fields);
  return r;
}

bool Value::operator==(const Value &o) const {
  if (k != o.k)
    return false;
  switch (k) {
  case K::Int:
  case K::Bool:
    return i == o.i;
  case K::Array:
    return arr == o.arr; // reference identity; null == null
  case K::Seq:
  case K::Multiset:
    return elems == o.elems;
  case K::Datatype:
    return ctor == o.ctor && elems == o.elems;
  }
  return false;
}

bool Value::operator<(const Value &o) const {
  if (k != o.k)
    return k < o.k;
  switch (k) {
  case K::Int:
  case K::Bool:
    return i < o.i;
  case K::Array:
    return arr.get() < o.arr.get();
  case K::Seq:
  case K::Multiset:
    return elems < o.elems;
  case K::Datatype:
    if (ctor != o.ctor)
      return ctor < o.ctor;
    return elems < o.elems;
  }
  return false;
}

std::string Value::str() const {
  switch (k) {
  case K::Int:
    return std::to_string(i);
  case K::Bool:
    return i ? "true" : "false";
  case K::Array: {
    if (!arr)
      return "null";
    std::string s = "[";
    for (size_t j = 0; j < arr->size(); ++j)
      s += (j ? ", " : "") + (*arr)[j].str();
    return s + "]";
  }
  case K::Seq: {
    std::string s = "[";
    for (size_t j = 0; j < elems.size(); ++j)
      s += (j ? ", " : "") + elems[j].str();
    return s + "]";
  }
  case K::Multiset: {
    std::string s = "multiset{";
    for (size_t j = 0; j < elems.size(); ++j)
      s += (j ? ", " : "") + elems[j].str();
    return s + "}";
  }
  case K::Datatype: {
    if (elems.empty())
      return ctor;
    std::string s = ctor + "(";
    for (size_t j = 0; j < elems.size(); ++j)
      s += (j ? ", " : "") + elems[j].str();
    return s + ")";
  }
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Evaluator
// ---------------------------------------------------------------------------

namespace {

struct Binding {
  Value value;
  bool ghost = false;
};

struct Frame {
  std::vector<std::map<std::string, Binding>> scopes;

  Binding *lookup(const std::string &n) {
    for (auto it = scopes.rbegin(); it != scopes.rend(); ++it) {
      auto f = it->find(n);
      if (f != it->end())
        return &f->second;
    }
    return nullptr;
  }
  void declare(const std::string &n, Value v, bool ghost) {
    scopes.back()[n] = Binding{std::move(v), ghost};
  }
};

class Eval {
public:
  Eval(const ResolvedProgram &p, bool check, int64_t &budget)
      : p_(p), check_(check), budget_(budget) {}

  InterpResult runMethod(const MethodDecl &m, std::vector<Value> args) {
    InterpResult res;
    try {
      res.outs = execMethod(m, std::move(args));
    } catch (RuntimeFault &f) {
      res.fault = std::move(f);
    }
    return res;
  }

  Value evalExprTop(const ExprPtr &e, Frame &fr) { return eval(e, fr, false); }

  Value callFn(const FunctionDecl &f, const std::vector<Value> &args,
               SourceSpan sp) {
    spend(sp);
    if (args.size() != f.params.size())
      throw RuntimeFault{RuntimeFault::Kind::Unevaluable, sp,
                         "arity mismatch calling '" + f.name + "'"};
    Frame fr;
    fr.scopes.emplace_back();
    for (size_t i = 0; i < args.size(); ++i)
      fr.declare(f.params[i].name, args[i], false);
    for (const auto &rq : f.requires_)
      if (!truth(eval(rq.expr, fr, false), rq.span))
        throw RuntimeFault{RuntimeFault::Kind::Precondition, sp,
                           "precondition of '" + f.name + "' violated"};
    return eval(f.body, fr, false);
  }

private:
  const ResolvedProgram &p_;
  bool check_;
  int64_t &budget_;
  // array snapshots taken at entry of the innermost contract-checked method
  std::map<const std::vector<Value> *, std::vector<Value>> oldHeap_;

  void spend(SourceSpan sp) {
    if (--budget_ <= 0)
      throw RuntimeFault{RuntimeFault::Kind::Budget, sp, "step budget exhausted"};
  }

  bool truth(const Value &v, SourceSpan sp) {
    if (v.k != Value::K::Bool)
      throw RuntimeFault{RuntimeFault::Kind::Unevaluable, sp, "expected bool"};
    return v.i != 0;
  }

  int64_t num(const Value &v, SourceSpan sp) {
    if (v.k != Value::K::Int)
      throw RuntimeFault{RuntimeFault::Kind::Unevaluable, sp, "expected int"};
    return v.i;
  }

  // ---- methods ------------------------------------------------------------

  std::vector<Value> execMethod(const MethodDecl &m, std::vector<Value> args) {
    if (!m.body)
      throw RuntimeFault{RuntimeFault::Kind::Unevaluable, m.span,
                         "'" + m.name + "' has no body"};
    if (args.size() != m.ins.size())
      throw RuntimeFault{RuntimeFault::Kind::Unevaluable, m.span,
                         "arity mismatch calling '" + m.name + "'"};
    Frame fr;
    fr.scopes.emplace_back();
    for (size_t i = 0; i < args.size(); ++i)
      fr.declare(m.ins[i].name, args[i], false);
    for (const auto &o : m.outs)
      fr.declare(o.name, defaultValue(o.type), false);

    auto savedOld = std::move(oldHeap_);
    oldHeap_.clear();
    if (check_) {
      for (const auto &rq : m.requires_)
        if (!truth(eval(rq.expr, fr, false), rq.span))
          throw RuntimeFault{RuntimeFault::Kind::Precondition, rq.span,
                             "precondition of '" + m.name + "' violated"};
      for (const auto &a : args)
        if (a.k == Value::K::Array && a.arr)
          oldHeap_.emplace(a.arr.get(), *a.arr);
    }

    execStmts(*m.body, fr);

    if (check_) {
      for (const auto &en : m.ensures_)
        if (!truth(eval(en.expr, fr, false), en.span))
          throw RuntimeFault{RuntimeFault::Kind::Postcondition, en.span,
                             "postcondition of '" + m.name + "' violated"};
    }
    std::vector<Value> outs;
    for (const auto &o : m.outs)
      outs.push_back(fr.lookup(o.name)->value);
    oldHeap_ = std::move(savedOld);
    return outs;
  }

  Value defaultValue(const TypePtr &t) {
    switch (t->kind) {
    case TypeKind::Bool:
      return Value::mkBool(false);
    case TypeKind::Array:
      return Value::mkNull();
    case TypeKind::Seq:
      return Value::mkSeq({});
    case TypeKind::Multiset:
      return Value::mkMultiset({});
    case TypeKind::Datatype: {
      // first nullary constructor if any; out-params are definitely
      // assigned before exit, so this placeholder is never observed
      auto it = p_.datatypes.find(t->name);
      if (it != p_.datatypes.end())
        for (const auto &c : it->second->ctors)
          if (c.fields.empty())
            return Value::mkDatatype(c.name, {});
      return Value::mkInt(0);
    }
    default:
      return Value::mkInt(0);
    }
  }

  // ---- statements -----------------------------------------------------------

  void execStmts(const std::vector<StmtPtr> &body, Frame &fr) {
    for (const auto &s : body)
      execStmt(s, fr);
  }

  void execStmt(const StmtPtr &s, Frame &fr) {
    spend(s->span);
    switch (s->kind) {
    case StmtKind::VarDecl: {
      if (s->ghost && !check_)
        return;
      for (size_t i = 0; i < s->names.size(); ++i) {
        Value v = i < s->exprs.size() ? eval(s->exprs[i], fr, false)
                                      : defaultValue(s->declTypes[i]);
        fr.declare(s->names[i], std::move(v), s->ghost);
      }
      return;
    }
    case StmtKind::Assign: {
      // simultaneous semantics: evaluate all rhs and lhs indices first
      struct Slot {
        Binding *var = nullptr;
        std::vector<Value> *store = nullptr;
        int64_t index = 0;
        bool skip = false;
      };
      std::vector<Slot> slots;
      std::vector<Value> rhs;
      for (size_t i = 0; i < s->lhs.size(); ++i) {
        Slot slot;
        const ExprPtr &l = s->lhs[i];
        if (l->kind == ExprKind::Var) {
          Binding *b = fr.lookup(l->name);
          // ghost-erased variables have no binding in plain runs
          if (!b || (b->ghost && !check_)) {
            slot.skip = true;
          } else {
            slot.var = b;
          }
          if (!slot.skip)
            rhs.push_back(eval(s->exprs[i], fr, false));
          else
            rhs.emplace_back();
        } else { // array element
          Value av = eval(l->args[0], fr, false);
          if (!av.arr)
            throw RuntimeFault{RuntimeFault::Kind::Null, l->span,
                               "null dereference"};
          int64_t ix = num(eval(l->args[1], fr, false), l->span);
          if (ix < 0 || ix >= (int64_t)av.arr->size())
            throw RuntimeFault{RuntimeFault::Kind::Bounds, l->span,
                               "index " + std::to_string(ix) +
                                   " out of range"};
          slot.store = av.arr.get();
          slot.index = ix;
          rhs.push_back(eval(s->exprs[i], fr, false));
        }
        slots.push_back(slot);
      }
      for (size_t i = 0; i < slots.size(); ++i) {
        if (slots[i].skip)
          continue;
        if (slots[i].var)
          slots[i].var->value = std::move(rhs[i]);
        else
          (*slots[i].store)[slots[i].index] = std::move(rhs[i]);
      }
      return;
    }
    case StmtKind::ArrayAlloc: {
      int64_t n = num(eval(s->exprs[0], fr, false), s->span);
      if (n < 0)
        throw RuntimeFault{RuntimeFault::Kind::Bounds, s->span,
                           "negative array length"};
      std::vector<Value> elems((size_t)n, defaultValue(s->allocElemType));
      fr.lookup(s->names[0])->value = Value::mkArray(std::move(elems));
      return;
    }
    case StmtKind::If: {
      bool c = truth(eval(s->exprs[0], fr, false), s->exprs[0]->span);
      fr.scopes.emplace_back();
      execStmts(c ? s->body : s->elseBody, fr);
      fr.scopes.pop_back();
      return;
    }
    case StmtKind::While: {
      auto checkInvs = [&] {
        if (!check_)
          return;
        for (const auto &inv : s->invariants)
          if (!truth(eval(inv, fr, false), inv->span))
            throw RuntimeFault{RuntimeFault::Kind::Invariant, inv->span,
                               "loop invariant violated"};
      };
      checkInvs();
      while (truth(eval(s->exprs[0], fr, false), s->exprs[0]->span)) {
        spend(s->span);
        fr.scopes.emplace_back();
        execStmts(s->body, fr);
        fr.scopes.pop_back();
        checkInvs();
      }
      return;
    }
    case StmtKind::Call: {
      auto it = p_.methods.find(s->callee);
      const MethodDecl *callee = it->second;
      if (callee->isLemma)
        return; // proofs have no runtime effect
      std::vector<Value> args;
      for (const auto &a : s->exprs)
        args.push_back(eval(a, fr, false));
      std::vector<Value> outs = execMethod(*callee, std::move(args));
      for (size_t i = 0; i < s->names.size(); ++i)
        fr.lookup(s->names[i])->value = outs[i];
      return;
    }
    case StmtKind::Assert:
      if (check_ && !truth(eval(s->exprs[0], fr, false), s->span))
        throw RuntimeFault{RuntimeFault::Kind::Assert, s->span,
                           "assertion violated"};
      return;
    case StmtKind::Assume:
      return; // assumptions hold by fiat at runtime
    case StmtKind::Calc:
    case StmtKind::ProofBlock:
      return; // proof text only
    case StmtKind::Match: {
      Value v = eval(s->exprs[0], fr, false);
      for (const auto &mc : s->cases) {
        if (mc.ctor != v.ctor)
          continue;
        fr.scopes.emplace_back();
        for (size_t i = 0; i < mc.binders.size(); ++i)
          fr.declare(mc.binders[i].name, v.elems[i], false);
        execStmts(mc.body, fr);
        fr.scopes.pop_back();
        return;
      }
      throw RuntimeFault{RuntimeFault::Kind::Unevaluable, s->span,
                         "no matching case"};
    }
    case StmtKind::Block: {
      fr.scopes.emplace_back();
      execStmts(s->body, fr);
      fr.scopes.pop_back();
      return;
    }
    }
  }

  // ---- expressions -----------------------------------------------------------

  Value eval(const ExprPtr &e, Frame &fr, bool old) {
    spend(e->span);
    switch (e->kind) {
    case ExprKind::IntLit:
      return Value::mkInt(e->intVal);
    case ExprKind::BoolLit:
      return Value::mkBool(e->boolVal);
    case ExprKind::NullLit:
      return Value::mkNull();
    case ExprKind::Var: {
      Binding *b = fr.lookup(e->name);
      if (!b)
        throw RuntimeFault{RuntimeFault::Kind::Unevaluable, e->span,
                           "unbound variable '" + e->name + "'"};
      return b->value;
    }
    case ExprKind::Binary:
      return evalBinary(e, fr, old);
    case ExprKind::Unary: {
      Value a = eval(e->args[0], fr, old);
      if (e->uop == UnOp::Not)
        return Value::mkBool(!truth(a, e->span));
      return Value::mkInt(-num(a, e->span));
    }
    case ExprKind::FnCall: {
      const FunctionDecl *f = p_.functions.at(e->name);
      std::vector<Value> args;
      for (const auto &a : e->args)
        args.push_back(eval(a, fr, old));
      return callFn(*f, args, e->span);
    }
    case ExprKind::CtorCall: {
      std::vector<Value> fields;
      for (const auto &a : e->args)
        fields.push_back(eval(a, fr, old));
      return Value::mkDatatype(e->name, std::move(fields));
    }
    case ExprKind::ArrayIndex: {
      Value a = eval(e->args[0], fr, old);
      int64_t ix = num(eval(e->args[1], fr, old), e->span);
      if (a.k == Value::K::Seq) {
        if (ix < 0 || ix >= (int64_t)a.elems.size())
          throw RuntimeFault{RuntimeFault::Kind::Bounds, e->span,
                             "index out of range"};
        return a.elems[ix];
      }
      if (!a.arr)
        throw RuntimeFault{RuntimeFault::Kind::Null, e->span,
                           "null dereference"};
      const std::vector<Value> &store = heapView(a, old);
      if (ix < 0 || ix >= (int64_t)store.size())
        throw RuntimeFault{RuntimeFault::Kind::Bounds, e->span,
                           "index " + std::to_string(ix) + " out of range"};
      return store[ix];
    }
    case ExprKind::ArrayLength: {
      Value a = eval(e->args[0], fr, old);
      if (!a.arr)
        throw RuntimeFault{RuntimeFault::Kind::Null, e->span,
                           "null dereference"};
      return Value::mkInt((int64_t)a.arr->size());
    }
    case ExprKind::SeqSlice: {
      Value a = eval(e->args[0], fr, old);
      if (!a.arr)
        throw RuntimeFault{RuntimeFault::Kind::Null, e->span,
                           "null dereference"};
      const std::vector<Value> &store = heapView(a, old);
      size_t argIx = 1;
      int64_t lo = e->hasLo ? num(eval(e->args[argIx++], fr, old), e->span) : 0;
      int64_t hi = e->hasHi ? num(eval(e->args[argIx], fr, old), e->span)
                            : (int64_t)store.size();
      if (lo < 0 || hi < lo || hi > (int64_t)store.size())
        throw RuntimeFault{RuntimeFault::Kind::Bounds, e->span,
                           "slice bounds out of range"};
      return Value::mkSeq(
          std::vector<Value>(store.begin() + lo, store.begin() + hi));
    }
    case ExprKind::MultisetOf: {
      Value sv = eval(e->args[0], fr, old);
      return Value::mkMultiset(sv.elems);
    }
    case ExprKind::Old:
      return eval(e->args[0], fr, true);
    case ExprKind::Forall:
      return evalForall(e, fr, old);
    case ExprKind::DtorAccess: {
      Value v = eval(e->args[0], fr, old);
      auto it = p_.ctors.find(v.ctor);
      if (it == p_.ctors.end())
        throw RuntimeFault{RuntimeFault::Kind::Unevaluable, e->span,
                           "bad datatype value"};
      const DatatypeCtor *c = it->second.second;
      for (size_t i = 0; i < c->fields.size(); ++i)
        if (c->fields[i].name == e->name)
          return v.elems[i];
      throw RuntimeFault{RuntimeFault::Kind::Unevaluable, e->span,
                         "value '" + v.ctor + "' has no field '" + e->name +
                             "'"};
    }
    case ExprKind::IfThenElse:
      return truth(eval(e->args[0], fr, old), e->span)
                 ? eval(e->args[1], fr, old)
                 : eval(e->args[2], fr, old);
    }
    throw RuntimeFault{RuntimeFault::Kind::Unevaluable, e->span,
                       "unevaluable expression"};
  }

  const std::vector<Value> &heapView(const Value &a, bool old) {
    if (old) {
      auto it = oldHeap_.find(a.arr.get());
      if (it != oldHeap_.end())
        return it->second;
    }
    return *a.arr;
  }

  Value evalBinary(const ExprPtr &e, Frame &fr, bool old) {
    switch (e->bop) {
    case BinOp::And:
      return Value::mkBool(truth(eval(e->args[0], fr, old), e->span) &&
                           truth(eval(e->args[1], fr, old), e->span));
    case BinOp::Or:
      return Value::mkBool(truth(eval(e->args[0], fr, old), e->span) ||
                           truth(eval(e->args[1], fr, old), e->span));
    case BinOp::Implies:
      return Value::mkBool(!truth(eval(e->args[0], fr, old), e->span) ||
                           truth(eval(e->args[1], fr, old), e->span));
    case BinOp::Explies:
      return Value::mkBool(truth(eval(e->args[0], fr, old), e->span) ||
                           !truth(eval(e->args[1], fr, old), e->span));
    case BinOp::Iff:
      return Value::mkBool(truth(eval(e->args[0], fr, old), e->span) ==
                           truth(eval(e->args[1], fr, old), e->span));
    default:
      break;
    }
    Value a = eval(e->args[0], fr, old);
    Value b = eval(e->args[1], fr, old);
    switch (e->bop) {
    case BinOp::Add:
      return Value::mkInt(num(a, e->span) + num(b, e->span));
    case BinOp::Sub:
      return Value::mkInt(num(a, e->span) - num(b, e->span));
    case BinOp::Mul:
      return Value::mkInt(num(a, e->span) * num(b, e->span));
    case BinOp::Div: {
      int64_t d = num(b, e->span);
      if (d == 0)
        throw RuntimeFault{RuntimeFault::Kind::Division, e->span,
                           "division by zero"};
      return Value::mkInt(euclid_div(num(a, e->span), d));
    }
    case BinOp::Mod: {
      int64_t d = num(b, e->span);
      if (d == 0)
        throw RuntimeFault{RuntimeFault::Kind::Division, e->span,
                           "division by zero"};
      return Value::mkInt(euclid_mod(num(a, e->span), d));
    }
    case BinOp::Eq:
      return Value::mkBool(a == b);
    case BinOp::Ne:
      return Value::mkBool(a != b);
    case BinOp::Lt:
      return Value::mkBool(num(a, e->span) < num(b, e->span));
    case BinOp::Le:
      return Value::mkBool(num(a, e->span) <= num(b, e->span));
    case BinOp::Gt:
      return Value::mkBool(num(a, e->span) > num(b, e->span));
    case BinOp::Ge:
      return Value::mkBool(num(a, e->span) >= num(b, e->span));
    default:
      throw RuntimeFault{RuntimeFault::Kind::Unevaluable, e->span,
                         "unevaluable operator"};
    }
  }

  // Quantifiers are decided by finite enumeration: gather every evaluable
  // comparison endpoint facing a bound variable, widen by 1 on both sides,
  // and test all tuples in the box. Corpus quantifiers bound their variables
  // by array indices, so the antecedent is false outside the box.
  Value evalForall(const ExprPtr &e, Frame &fr, bool old) {
    std::set<std::string> bvs;
    for (const auto &b : e->bound)
      bvs.insert(b.name);
    std::vector<int64_t> endpoints;
    collectEndpoints(e->args[0], bvs, fr, old, endpoints);
    if (endpoints.empty())
      throw RuntimeFault{RuntimeFault::Kind::Unevaluable, e->span,
                         "unevaluable quantifier (no finite bounds)"};
    int64_t lo = *std::min_element(endpoints.begin(), endpoints.end()) - 1;
    int64_t hi = *std::max_element(endpoints.begin(), endpoints.end()) + 1;
    int64_t width = hi - lo + 1;
    double tuples = 1;
    for (size_t i = 0; i < e->bound.size(); ++i)
      tuples *= (double)width;
    if (tuples > 4e6)
      throw RuntimeFault{RuntimeFault::Kind::Unevaluable, e->span,
                         "quantifier range too large"};
    fr.scopes.emplace_back();
    for (const auto &b : e->bound)
      fr.declare(b.name, Value::mkInt(lo), true);
    std::vector<int64_t> cur(e->bound.size(), lo);
    bool ok = true;
    while (ok) {
      for (size_t i = 0; i < e->bound.size(); ++i)
        fr.lookup(e->bound[i].name)->value = Value::mkInt(cur[i]);
      if (!truth(eval(e->args[0], fr, old), e->span)) {
        ok = false;
        break;
      }
      // advance odometer
      size_t i = 0;
      for (; i < cur.size(); ++i) {
        if (++cur[i] <= hi)
          break;
        cur[i] = lo;
      }
      if (i == cur.size())
        break;
    }
    fr.scopes.pop_back();
    return Value::mkBool(ok);
  }

  static bool mentionsAny(const ExprPtr &e, const std::set<std::string> &vars) {
    if (e->kind == ExprKind::Var && vars.count(e->name))
      return true;
    for (const auto &a : e->args)
      if (mentionsAny(a, vars))
        return true;
    return false;
  }

  void collectEndpoints(const ExprPtr &e, const std::set<std::string> &bvs,
                        Frame &fr, bool old, std::vector<int64_t> &out) {
    if (e->kind == ExprKind::Binary) {
      switch (e->bop) {
      case BinOp::Lt: case BinOp::Le: case BinOp::Gt: case BinOp::Ge:
      case BinOp::Eq: case BinOp::Ne: {
        bool l = mentionsAny(e->args[0], bvs);
        bool r = mentionsAny(e->args[1], bvs);
        if (l != r) {
          const ExprPtr &free = l ? e->args[1] : e->args[0];
          try {
            Value v = eval(free, fr, old);
            if (v.k == Value::K::Int)
              out.push_back(v.i);
          } catch (RuntimeFault &) {
            // not evaluable here; other comparisons may still bound the box
          }
        }
        break;
      }
      default:
        break;
      }
    }
    if (e->kind == ExprKind::Forall)
      return; // nested quantifier endpoints use their own binders
    for (const auto &a : e->args)
      collectEndpoints(a, bvs, fr, old, out);
  }
};

} // namespace

// ---------------------------------------------------------------------------
// public API
// ---------------------------------------------------------------------------

Interp::Interp(const ResolvedProgram &prog, bool checkContracts,
               int64_t stepBudget)
    : prog_(prog), check_(checkContracts), budget_(stepBudget) {}

InterpResult Interp::runMethod(const std::string &name,
                               std::vector<Value> args) {
  auto it = prog_.methods.find(name);
  if (it == prog_.methods.end())
    return InterpResult{{},
                        RuntimeFault{RuntimeFault::Kind::Unevaluable, {},
                                     "no such method '" + name + "'"}};
  int64_t budget = budget_;
  Eval ev(prog_, check_, budget);
  return ev.runMethod(*it->second, std::move(args));
}

std::optional<Value> Interp::evalCall(const std::string &fn,
                                      const std::vector<Value> &args) {
  auto it = prog_.functions.find(fn);
  if (it == prog_.functions.end())
    return std::nullopt;
  int64_t budget = budget_;
  Eval ev(prog_, check_, budget);
  try {
    return ev.callFn(*it->second, args, it->second->span);
  } catch (RuntimeFault &) {
    return std::nullopt;
  }
}

std::optional<Value> Interp::evalClosed(const ExprPtr &e) {
  int64_t budget = budget_;
  Eval ev(prog_, check_, budget);
  Frame fr;
  fr.scopes.emplace_back();
  try {
    return ev.evalExprTop(e, fr);
  } catch (RuntimeFault &) {
    return std::nullopt;
  }
}

std::optional<Value> parse_value(const std::string &text) {
  size_t pos = 0;
  std::function<std::optional<Value>()> parse = [&]() -> std::optional<Value> {
    while (pos < text.size() && isspace((unsigned char)text[pos]))
      ++pos;
    if (pos >= text.size())
      return std::nullopt;
    if (text.compare(pos, 4, "true") == 0) {
      pos += 4;
      return Value::mkBool(true);
    }
    if (text.compare(pos, 5, "false") == 0) {
      pos += 5;
      return Value::mkBool(false);
    }
    if (text.compare(pos, 4, "null") == 0) {
      pos += 4;
      return Value::mkNull();
    }
    if (text[pos] == '[') {
      ++pos;
      std::vector<Value> elems;
      while (true) {
        while (pos < text.size() && (isspace((unsigned char)text[pos]) ||
                                     text[pos] == ','))
          ++pos;
        if (pos < text.size() && text[pos] == ']') {
          ++pos;
          return Value::mkArray(std::move(elems));
        }
        auto v = parse();
        if (!v)
          return std::nullopt;
        elems.push_back(*v);
      }
    }
    size_t start = pos;
    if (text[pos] == '-')
      ++pos;
    while (pos < text.size() && isdigit((unsigned char)text[pos]))
      ++pos;
    if (pos == start || (text[start] == '-' && pos == start + 1))
      return std::nullopt;
    return Value::mkInt(std::stoll(text.substr(start, pos - start)));
  };
  auto v = parse();
  while (pos < text.size() && isspace((unsigned char)text[pos]))
    ++pos;
  if (pos != text.size())
    return std::nullopt;
  return v;
}

} // namespace minivc
