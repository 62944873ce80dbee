#include "minivc/smtlower.hpp"

#include <cctype>
#include <set>
#include <sstream>

#include "minivc/pretty.hpp"

namespace minivc {

namespace {

bool simpleSymbol(const std::string &s) {
  static const std::string extra = "~!@$%^&*_-+=<>.?/";
  if (s.empty() || isdigit((unsigned char)s[0]))
    return false;
  for (char c : s)
    if (!isalnum((unsigned char)c) && extra.find(c) == std::string::npos)
      return false;
  return true;
}

bool reservedWord(const std::string &s) {
  static const std::set<std::string> kw = {
      "select", "store", "div",    "mod",   "abs",  "ite",   "let",
      "and",    "or",    "not",    "xor",   "true", "false", "distinct",
      "as",     "is",    "forall", "exists", "assert", "par", "match",
      "Int",    "Bool",  "Array",  "_"};
  return kw.count(s) != 0;
}

/// SMT rendering of a source-level name.
std::string sym(const std::string &name) {
  std::string n = reservedWord(name) ? name + "!k" : name;
  if (simpleSymbol(n))
    return n;
  return "|" + n + "|";
}

} // namespace

struct SmtLowering::Impl {
  const ResolvedProgram &rp;
  int fuel;
  std::set<std::string> heapReaders;
  // mangled suffix ("List!Int") -> instantiated datatype type
  std::map<std::string, TypePtr> instances;

  // Quantified axioms are not asserted globally: z3's model finder gives up
  // ("unknown") on satisfiable queries whenever unrelated recursive-function
  // or slice axioms are in scope. Each query pulls in only the groups whose
  // trigger symbols it mentions, transitively through function definitions.
  struct AxiomGroup {
    std::string marker; // substring whose presence makes the group relevant
    std::string text;
  };
  std::vector<AxiomGroup> groups;
  std::map<std::string, std::string> fnAxioms; // function name -> its axioms

  Impl(const ResolvedProgram &r, int f)
      : rp(r), fuel(f), heapReaders(heap_reading_functions(r)) {}

  // ---- types ---------------------------------------------------------------

  TypePtr mono(const TypePtr &t) const {
    if (!t)
      return Type::intType();
    if (t->kind == TypeKind::TypeVar)
      return Type::intType();
    // unresolved names in stored datatype field types are type parameters
    if (t->kind == TypeKind::Datatype && !rp.datatypes.count(t->name))
      return Type::intType();
    if (t->args.empty())
      return t;
    std::vector<TypePtr> args;
    for (const auto &a : t->args)
      args.push_back(mono(a));
    auto r = std::make_shared<Type>(*t);
    r->args = std::move(args);
    return r;
  }

  std::string piece(const TypePtr &t0) const {
    TypePtr t = mono(t0);
    switch (t->kind) {
    case TypeKind::Int: return "Int";
    case TypeKind::Bool: return "Bool";
    case TypeKind::Array: return "Arr";
    case TypeKind::Seq: return "Seq";
    case TypeKind::Multiset: return "Ms";
    case TypeKind::Datatype: {
      std::string p = t->name;
      for (const auto &a : t->args)
        p += "!" + piece(a);
      return p;
    }
    default: return "Int";
    }
  }

  // suffix appended to constructor/selector names for a datatype instance
  std::string ctorSuffix(const TypePtr &t0) const {
    TypePtr t = mono(t0);
    std::string p;
    if (t && t->kind == TypeKind::Datatype)
      for (const auto &a : t->args)
        p += "!" + piece(a);
    return p;
  }

  std::string sortOf(const TypePtr &t0) const {
    TypePtr t = mono(t0);
    switch (t->kind) {
    case TypeKind::Bool: return "Bool";
    case TypeKind::Seq: return "SeqInt";
    case TypeKind::Multiset: return "(Array Int Int)";
    case TypeKind::Datatype: return "dt!" + piece(t);
    default: return "Int"; // Int, Array (reference), TypeVar
    }
  }

  void registerType(const TypePtr &t0) {
    if (!t0)
      return;
    TypePtr t = mono(t0);
    if (t->kind == TypeKind::Datatype) {
      std::string key = piece(t);
      if (!instances.count(key)) {
        instances[key] = t;
        auto dd = rp.datatypes.find(t->name);
        if (dd != rp.datatypes.end()) {
          std::map<std::string, TypePtr> su;
          for (size_t i = 0; i < dd->second->typeParams.size(); ++i)
            su[dd->second->typeParams[i]] =
                i < t->args.size() ? t->args[i] : Type::intType();
          for (const auto &c : dd->second->ctors)
            for (const auto &fld : c.fields)
              registerType(substTP(fld.type, su));
        }
      }
    }
    for (const auto &a : t->args)
      registerType(a);
  }

  TypePtr substTP(const TypePtr &t,
                  const std::map<std::string, TypePtr> &su) const {
    if (!t)
      return Type::intType();
    if (t->kind == TypeKind::TypeVar ||
        (t->kind == TypeKind::Datatype && !rp.datatypes.count(t->name))) {
      auto it = su.find(t->name);
      return it == su.end() ? Type::intType() : it->second;
    }
    if (t->args.empty())
      return t;
    std::vector<TypePtr> args;
    for (const auto &a : t->args)
      args.push_back(substTP(a, su));
    auto r = std::make_shared<Type>(*t);
    r->args = std::move(args);
    return r;
  }

  // ---- expression lowering --------------------------------------------------

  struct Ctx {
    std::string fnName;  // enclosing function when lowering its axiom body
    std::string fuelVar; // fuel binder for same-SCC calls
  };

  std::string lower(const ExprPtr &e, const Ctx &ctx) const {
    switch (e->kind) {
    case ExprKind::IntLit:
      return e->intVal < 0 ? "(- " + std::to_string(-e->intVal) + ")"
                           : std::to_string(e->intVal);
    case ExprKind::BoolLit:
      return e->boolVal ? "true" : "false";
    case ExprKind::NullLit:
      return "0";
    case ExprKind::Var:
      return sym(e->name);
    case ExprKind::Unary:
      return (e->uop == UnOp::Not ? "(not " : "(- ") + lower(e->args[0], ctx) +
             ")";
    case ExprKind::Binary: {
      std::string a = lower(e->args[0], ctx), b = lower(e->args[1], ctx);
      switch (e->bop) {
      case BinOp::Add: return "(+ " + a + " " + b + ")";
      case BinOp::Sub: return "(- " + a + " " + b + ")";
      case BinOp::Mul: return "(* " + a + " " + b + ")";
      case BinOp::Div: return "(div " + a + " " + b + ")";
      case BinOp::Mod: return "(mod " + a + " " + b + ")";
      case BinOp::Eq: return "(= " + a + " " + b + ")";
      case BinOp::Ne: return "(not (= " + a + " " + b + "))";
      case BinOp::Lt: return "(< " + a + " " + b + ")";
      case BinOp::Le: return "(<= " + a + " " + b + ")";
      case BinOp::Gt: return "(> " + a + " " + b + ")";
      case BinOp::Ge: return "(>= " + a + " " + b + ")";
      case BinOp::And: return "(and " + a + " " + b + ")";
      case BinOp::Or: return "(or " + a + " " + b + ")";
      case BinOp::Implies: return "(=> " + a + " " + b + ")";
      case BinOp::Explies: return "(=> " + b + " " + a + ")";
      case BinOp::Iff: return "(= " + a + " " + b + ")";
      }
      return a;
    }
    case ExprKind::IfThenElse:
      return "(ite " + lower(e->args[0], ctx) + " " + lower(e->args[1], ctx) +
             " " + lower(e->args[2], ctx) + ")";
    case ExprKind::Forall: {
      std::string out = "(forall (";
      for (size_t i = 0; i < e->bound.size(); ++i) {
        if (i)
          out += " ";
        out += "(" + sym(e->bound[i].name) + " " + sortOf(e->bound[i].type) +
               ")";
      }
      out += ") " + lower(e->args[0], ctx) + ")";
      return out;
    }
    case ExprKind::CtorCall: {
      std::string c = sym(e->name + ctorSuffix(e->type));
      if (e->args.empty())
        return c;
      std::string out = "(" + c;
      for (const auto &a : e->args)
        out += " " + lower(a, ctx);
      return out + ")";
    }
    case ExprKind::DtorAccess:
      return "(" + sym(e->name + ctorSuffix(e->args[0]->type)) + " " +
             lower(e->args[0], ctx) + ")";
    case ExprKind::FnCall:
      return lowerCall(e, ctx);
    default:
      // surface-only nodes never reach the lowering
      return "0";
    }
  }

  // (select h a) with select-over-store collapse on syntactically identical
  // array references, so stored rows stay visible to axiom triggers
  std::string selectHeap(const ExprPtr &h, const ExprPtr &a,
                         const Ctx &ctx) const {
    if (h->kind == ExprKind::FnCall && h->name == "$store" &&
        expr_equal(h->args[1], a))
      return "(store " + selectHeap(h->args[0], a, ctx) + " " +
             lower(h->args[2], ctx) + " " + lower(h->args[3], ctx) + ")";
    return "(select " + lower(h, ctx) + " " + lower(a, ctx) + ")";
  }

  std::string lowerCall(const ExprPtr &e, const Ctx &ctx) const {
    const std::string &n = e->name;
    if (n == "$read")
      return "(select " + selectHeap(e->args[0], e->args[1], ctx) + " " +
             lower(e->args[2], ctx) + ")";
    if (n == "$store")
      return "(store " + lower(e->args[0], ctx) + " " +
             lower(e->args[1], ctx) + " (store " +
             selectHeap(e->args[0], e->args[1], ctx) + " " +
             lower(e->args[2], ctx) + " " + lower(e->args[3], ctx) + "))";
    if (n == "$heaplet")
      return selectHeap(e->args[0], e->args[1], ctx);
    if (n == "$length")
      return "($length " + lower(e->args[0], ctx) + ")";
    if (n == "$slice")
      return "($slicem " + selectHeap(e->args[0], e->args[1], ctx) + " " +
             lower(e->args[2], ctx) + " " + lower(e->args[3], ctx) + ")";
    if (n == "$seqindex")
      return "(select (seq-map " + lower(e->args[0], ctx) + ") " +
             lower(e->args[1], ctx) + ")";
    if (n == "$seqlen")
      return "(seq-len " + lower(e->args[0], ctx) + ")";
    if (n == "$ms")
      return "($ms " + lower(e->args[0], ctx) + ")";
    if (n == "$rank")
      return "($rank!" + piece(e->args[0]->type) + " " +
             lower(e->args[0], ctx) + ")";
    if (n.rfind("$is$", 0) == 0)
      return "((_ is " +
             sym(n.substr(4) + ctorSuffix(e->args[0]->type)) + ") " +
             lower(e->args[0], ctx) + ")";
    // user function: fuel first, then the heap when it reads one
    std::string fuelTerm = "fuel!" + n;
    if (!ctx.fnName.empty() && rp.sameScc(ctx.fnName, n))
      fuelTerm = ctx.fuelVar;
    std::string out = "(fn!" + n + " " + fuelTerm;
    for (const auto &a : e->args)
      out += " " + lower(a, ctx);
    return out + ")";
  }

  // ---- preamble -------------------------------------------------------------

  void collectTypesIn(const ExprPtr &e) {
    if (!e)
      return;
    registerType(e->type);
    for (const auto &b : e->bound)
      registerType(b.type);
    for (const auto &a : e->args)
      collectTypesIn(a);
  }

  std::string buildPreamble() {
    // instances from every signature and body in the program
    for (const auto &[n, f] : rp.functions) {
      for (const auto &p : f->params)
        registerType(p.type);
      registerType(f->resultType);
      collectTypesIn(f->body);
      for (const auto &r : f->requires_)
        collectTypesIn(r.expr);
    }
    for (const auto &[n, m] : rp.methods) {
      for (const auto &p : m->ins)
        registerType(p.type);
      for (const auto &p : m->outs)
        registerType(p.type);
    }
    for (const auto &[n, d] : rp.datatypes) {
      std::vector<TypePtr> args(d->typeParams.size(), Type::intType());
      registerType(Type::datatype(n, args));
    }

    std::ostringstream s;
    s << "(set-option :produce-models true)\n";
    // pattern-based instantiation only: fuel must throttle unfolding depth.
    // Model-based instantiation sees through the fuel guard, and auto-config
    // preprocessing (the macro finder) can eliminate the fuel argument via
    // the synonym axiom, so both are turned off.
    s << "(set-option :auto_config false)\n";
    s << "(set-option :smt.mbqi false)\n";
    s << "(define-sort Heap () (Array Int (Array Int Int)))\n";
    s << "(declare-datatype Fuel ((FZ) (FS (fpred Fuel))))\n";
    s << "(declare-datatype SeqInt ((mk-seq (seq-map (Array Int Int)) "
         "(seq-len Int))))\n";

    if (!instances.empty()) {
      s << "(declare-datatypes (";
      bool first = true;
      for (const auto &[key, t] : instances) {
        s << (first ? "" : " ") << "(dt!" << key << " 0)";
        first = false;
      }
      s << ") (";
      first = true;
      for (const auto &[key, t] : instances) {
        const DatatypeDecl *dd = rp.datatypes.at(t->name);
        std::map<std::string, TypePtr> su;
        for (size_t i = 0; i < dd->typeParams.size(); ++i)
          su[dd->typeParams[i]] =
              i < t->args.size() ? t->args[i] : Type::intType();
        s << (first ? "(" : " (");
        first = false;
        std::string suffix = ctorSuffix(t);
        for (size_t ci = 0; ci < dd->ctors.size(); ++ci) {
          const auto &c = dd->ctors[ci];
          s << (ci ? " (" : "(") << sym(c.name + suffix);
          for (const auto &fld : c.fields)
            s << " (" << sym(fld.name + suffix) << " "
              << sortOf(substTP(fld.type, su)) << ")";
          s << ")";
        }
        s << ")";
      }
      s << "))\n";
    }

    // ranks: nonnegative, and structurally decreasing into datatype fields
    for (const auto &[key, t] : instances) {
      std::string rk = "$rank!" + key, srt = "dt!" + key;
      s << "(declare-fun " << rk << " (" << srt << ") Int)\n";
      std::ostringstream ax;
      ax << "(assert (forall ((x " << srt << ")) (! (>= (" << rk
         << " x) 0) :pattern ((" << rk << " x)))))\n";
      const DatatypeDecl *dd = rp.datatypes.at(t->name);
      std::map<std::string, TypePtr> su;
      for (size_t i = 0; i < dd->typeParams.size(); ++i)
        su[dd->typeParams[i]] =
            i < t->args.size() ? t->args[i] : Type::intType();
      std::string suffix = ctorSuffix(t);
      for (const auto &c : dd->ctors)
        for (const auto &fld : c.fields) {
          TypePtr ft = mono(substTP(fld.type, su));
          if (ft->kind != TypeKind::Datatype)
            continue;
          std::string frk = "$rank!" + piece(ft);
          ax << "(assert (forall ((x " << srt << ")) (! (=> ((_ is "
             << sym(c.name + suffix) << ") x) (< (" << frk << " ("
             << sym(fld.name + suffix) << " x)) (" << rk
             << " x))) :pattern ((" << rk << " x)))))\n";
        }
      groups.push_back({"(" + rk + " ", ax.str()});
    }

    // array lengths are heap-independent and nonnegative
    s << "(declare-fun $length (Int) Int)\n";
    groups.push_back({"($length ",
                      "(assert (forall ((r Int)) (! (>= ($length r) 0) "
                      ":pattern (($length r)))))\n"});

    // slices of one array row
    s << "(declare-fun $slicem ((Array Int Int) Int Int) SeqInt)\n";
    groups.push_back(
        {"($slicem ",
         "(assert (forall ((m (Array Int Int)) (lo Int) (hi Int)) (! (= "
         "(seq-len ($slicem m lo hi)) (ite (>= hi lo) (- hi lo) 0)) "
         ":pattern (($slicem m lo hi)))))\n"
         "(assert (forall ((m (Array Int Int)) (lo Int) (hi Int) (j Int)) "
         "(! (= (select (seq-map ($slicem m lo hi)) j) (select m (+ lo j))) "
         ":pattern ((select (seq-map ($slicem m lo hi)) j)))))\n"});

    // multisets as count maps: counts are nonnegative; a point store moves
    // one count down and one up; swapping two in-range cells is a no-op
    s << "(declare-fun $ms (SeqInt) (Array Int Int))\n";
    groups.push_back(
        {"($ms ",
         "(assert (forall ((q SeqInt) (v Int)) (! (>= (select ($ms q) v) 0) "
         ":pattern ((select ($ms q) v)))))\n"
         "(assert (forall ((m (Array Int Int)) (lo Int) (hi Int) (p Int) "
         "(v Int)) (! (=> (and (<= lo p) (< p hi)) (= ($ms ($slicem (store "
         "m p v) lo hi)) (let ((c0 ($ms ($slicem m lo hi))) (o (select m "
         "p))) (let ((c1 (store c0 o (- (select c0 o) 1)))) (store c1 v (+ "
         "(select c1 v) 1)))))) :pattern (($ms ($slicem (store m p v) lo "
         "hi))))))\n"
         "(assert (forall ((m (Array Int Int)) (lo Int) (hi Int) (p Int) "
         "(q Int)) (! (=> (and (<= lo p) (< p hi) (<= lo q) (< q hi)) (= "
         "($ms ($slicem (store (store m p (select m q)) q (select m p)) lo "
         "hi)) ($ms ($slicem m lo hi)))) :pattern (($ms ($slicem (store "
         "(store m p (select m q)) q (select m p)) lo hi))))))\n"});

    // functions: declarations, start fuel, guarded definitions
    std::string fuelTerm = "FZ";
    for (int i = 0; i < fuel; ++i)
      fuelTerm = "(FS " + fuelTerm + ")";
    for (const auto &[n, f] : rp.functions) {
      bool hr = heapReaders.count(n) != 0;
      s << "(declare-fun fn!" << n << " (Fuel";
      if (hr)
        s << " Heap";
      for (const auto &p : f->params)
        s << " " << sortOf(p.type);
      s << ") " << sortOf(f->resultType) << ")\n";
      s << "(declare-const fuel!" << n << " Fuel)\n";
      s << "(assert (= fuel!" << n << " " << fuelTerm << "))\n";
      if (!f->body)
        continue;
      std::ostringstream ax;

      std::string binders = "(($fuel Fuel)";
      if (hr)
        binders += " ($heap Heap)";
      for (const auto &p : f->params)
        binders += " (" + sym(p.name) + " " + sortOf(p.type) + ")";
      binders += ")";
      std::string callFS = "(fn!" + n + " (FS $fuel)";
      std::string callF = "(fn!" + n + " $fuel";
      if (hr) {
        callFS += " $heap";
        callF += " $heap";
      }
      for (const auto &p : f->params) {
        callFS += " " + sym(p.name);
        callF += " " + sym(p.name);
      }
      callFS += ")";
      callF += ")";

      Ctx ctx{n, "$fuel"};
      std::string req;
      for (const auto &r : f->requires_) {
        std::string c = lower(translate_one_state(rp, n, r.expr), ctx);
        req = req.empty() ? c : "(and " + req + " " + c + ")";
      }
      std::string body = lower(translate_one_state(rp, n, f->body), ctx);
      std::string defn = "(= " + callFS + " " + body + ")";
      if (!req.empty())
        defn = "(=> " + req + " " + defn + ")";
      ax << "(assert (forall " << binders << " (! " << defn << " :pattern ("
         << callFS << "))))\n";
      // fuel synonym: values agree across fuel levels
      ax << "(assert (forall " << binders << " (! (= " << callFS << " "
         << callF << ") :pattern (" << callFS << "))))\n";
      fnAxioms[n] = ax.str();
    }
    return s.str();
  }

  // ---- obligations ----------------------------------------------------------

  void freeVars(const ExprPtr &e, std::set<std::string> &bound,
                std::map<std::string, TypePtr> &out) const {
    switch (e->kind) {
    case ExprKind::Var:
      if (!bound.count(e->name)) {
        auto it = out.find(e->name);
        if (it == out.end() || !it->second)
          out[e->name] = e->type;
      }
      return;
    case ExprKind::Forall: {
      std::vector<std::string> added;
      for (const auto &b : e->bound)
        if (bound.insert(b.name).second)
          added.push_back(b.name);
      freeVars(e->args[0], bound, out);
      for (const auto &n : added)
        bound.erase(n);
      return;
    }
    default:
      for (const auto &a : e->args)
        freeVars(a, bound, out);
      return;
    }
  }

  static void scanShape(const ExprPtr &e, bool &quantified) {
    if (e->kind == ExprKind::Forall)
      quantified = true;
    if (e->kind == ExprKind::FnCall && e->name != "$read" &&
        e->name != "$store" && e->name != "$heaplet" &&
        e->name != "$seqindex" && e->name != "$seqlen" &&
        e->name.rfind("$is$", 0) != 0)
      quantified = true;
    for (const auto &a : e->args)
      scanShape(a, quantified);
  }

  SmtQuery lowerOb(const Obligation &ob) const {
    SmtQuery q;
    std::map<std::string, TypePtr> fv;
    std::set<std::string> bound;
    for (const auto &h : ob.hypotheses)
      freeVars(h, bound, fv);
    freeVars(ob.goal, bound, fv);

    std::ostringstream s;
    for (const auto &[n, t] : fv) {
      if (n.rfind("$heap", 0) == 0) {
        s << "(declare-const " << sym(n) << " Heap)\n";
        continue;
      }
      TypePtr mt = mono(t ? t : Type::intType());
      s << "(declare-const " << sym(n) << " " << sortOf(mt) << ")\n";
      if (mt->kind == TypeKind::Seq)
        s << "(assert (>= (seq-len " << sym(n) << ") 0))\n";
      if (n.find('$') == std::string::npos &&
          mt->kind != TypeKind::Seq && mt->kind != TypeKind::Multiset)
        q.freeVars.push_back(n);
    }
    Ctx ctx;
    for (const auto &h : ob.hypotheses)
      s << "(assert " << lower(h, ctx) << ")\n";
    s << "(assert (not " << lower(ob.goal, ctx) << "))\n";
    std::string body = s.str();

    // pull in exactly the axiom groups the query mentions, to fixpoint
    std::string scan = body;
    std::set<size_t> usedGroups;
    std::set<std::string> usedFns;
    std::string axioms;
    for (bool changed = true; changed;) {
      changed = false;
      for (size_t i = 0; i < groups.size(); ++i)
        if (!usedGroups.count(i) &&
            scan.find(groups[i].marker) != std::string::npos) {
          usedGroups.insert(i);
          scan += groups[i].text;
          changed = true;
        }
      for (const auto &[n, ax] : fnAxioms)
        if (!usedFns.count(n) &&
            scan.find("(fn!" + n + " ") != std::string::npos) {
          usedFns.insert(n);
          scan += ax;
          changed = true;
        }
    }
    for (size_t i = 0; i < groups.size(); ++i)
      if (usedGroups.count(i))
        axioms += groups[i].text;
    for (const auto &n : usedFns)
      axioms += fnAxioms.at(n);
    q.text = axioms + body + "(check-sat)\n(get-model)\n";

    bool quant = !usedGroups.empty() || !usedFns.empty();
    for (const auto &h : ob.hypotheses)
      scanShape(h, quant);
    scanShape(ob.goal, quant);
    q.quantified = quant;
    return q;
  }
};

SmtLowering::SmtLowering(const ResolvedProgram &rp, int fuel)
    : impl_(std::make_shared<Impl>(rp, fuel)) {
  preamble_ = impl_->buildPreamble();
}

SmtQuery SmtLowering::lower(const Obligation &ob) const {
  return impl_->lowerOb(ob);
}

} // namespace minivc
