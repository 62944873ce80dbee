#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "minivc/source.hpp"

namespace minivc {

// ---------------------------------------------------------------------------
// Types
// ---------------------------------------------------------------------------

enum class TypeKind { Int, Bool, TypeVar, Array, Seq, Multiset, Datatype };

struct Type;
using TypePtr = std::shared_ptr<const Type>;

struct Type {
  TypeKind kind;
  std::string name;          // TypeVar / Datatype
  std::vector<TypePtr> args; // element / instantiation types

  static TypePtr intType();
  static TypePtr boolType();
  static TypePtr typeVar(std::string n);
  static TypePtr array(TypePtr elem);
  static TypePtr seq(TypePtr elem);
  static TypePtr multiset(TypePtr elem);
  static TypePtr datatype(std::string n, std::vector<TypePtr> args);
};

bool type_equal(const TypePtr &a, const TypePtr &b);
std::string type_str(const TypePtr &t);

// ---------------------------------------------------------------------------
// Expressions
// ---------------------------------------------------------------------------

enum class BinOp {
  Add, Sub, Mul, Div, Mod,
  Eq, Ne, Lt, Le, Gt, Ge,
  And, Or, Implies, Explies, Iff,
};

enum class UnOp { Not, Neg };

enum class ExprKind {
  IntLit,
  BoolLit,
  NullLit,
  Var,
  Binary,
  Unary,
  FnCall,
  ArrayIndex,   // args[0][args[1]]
  ArrayLength,  // args[0].Length
  SeqSlice,     // args[0][lo..hi]; missing bounds mean 0 / Length
  MultisetOf,   // multiset(args[0])
  Old,          // old(args[0])
  Forall,
  CtorCall,        // datatype constructor application
  DtorAccess,      // args[0].field
  IfThenElse,      // if args[0] then args[1] else args[2]
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct BoundVar {
  std::string name;
  TypePtr type; // may be null before resolution
  SourceSpan span;
};

struct Expr {
  ExprKind kind;
  SourceSpan span;
  BinOp bop = BinOp::Add;
  UnOp uop = UnOp::Not;
  int64_t intVal = 0;
  bool boolVal = false;
  std::string name; // Var / FnCall / CtorCall / DtorAccess field
  std::vector<ExprPtr> args;
  std::vector<BoundVar> bound; // Forall
  bool hasLo = false;          // SeqSlice
  bool hasHi = false;
  TypePtr type; // filled in by the resolver
};

ExprPtr mk_int(int64_t v, SourceSpan sp = {});
ExprPtr mk_bool(bool v, SourceSpan sp = {});
ExprPtr mk_var(std::string name, SourceSpan sp = {});
ExprPtr mk_binary(BinOp op, ExprPtr a, ExprPtr b, SourceSpan sp = {});
ExprPtr mk_unary(UnOp op, ExprPtr a, SourceSpan sp = {});
ExprPtr mk_fncall(std::string name, std::vector<ExprPtr> args,
                  SourceSpan sp = {});

// ---------------------------------------------------------------------------
// Statements
// ---------------------------------------------------------------------------

enum class StmtKind {
  VarDecl,
  Assign,
  If,
  While,
  Call,
  Assert,
  Assume,
  Calc,
  Match,
  ArrayAlloc,
  Block,
  // Verification-only scope introduced by calc desugaring: the statements
  // are checked in place but contribute nothing to the continuation.
  ProofBlock,
};

enum class CalcOp { Eq, Ne, Lt, Le, Gt, Ge, Implies, Explies, Iff };

struct Stmt;
using StmtPtr = std::shared_ptr<const Stmt>;

struct MatchCase {
  std::string ctor;
  std::vector<BoundVar> binders;
  std::vector<StmtPtr> body;
  SourceSpan span;
};

struct Stmt {
  StmtKind kind;
  SourceSpan span;
  bool ghost = false;

  // VarDecl / Assign / Call targets
  std::vector<std::string> names;
  std::vector<SourceSpan> nameSpans;

  // VarDecl init / Assign lhs+rhs / If cond / While guard / Call args /
  // Assert / Assume / ArrayAlloc length
  std::vector<ExprPtr> lhs;
  std::vector<ExprPtr> exprs;

  std::string callee;        // Call
  TypePtr allocElemType;     // ArrayAlloc
  std::vector<TypePtr> declTypes; // VarDecl explicit types (may be null)

  std::vector<ExprPtr> invariants;
  std::vector<SourceSpan> invariantSpans;
  std::vector<ExprPtr> decreases;
  bool hasDecreases = false;

  std::vector<StmtPtr> body;
  std::vector<StmtPtr> elseBody;

  // Calc
  std::vector<ExprPtr> calcLines;
  std::vector<CalcOp> calcOps;
  std::vector<SourceSpan> calcOpSpans;
  std::vector<std::vector<StmtPtr>> calcHints;

  std::vector<MatchCase> cases;
};

// ---------------------------------------------------------------------------
// Declarations
// ---------------------------------------------------------------------------

struct Param {
  std::string name;
  TypePtr type;
  SourceSpan span;
};

struct SpecClause {
  ExprPtr expr;
  SourceSpan span;
};

struct FrameClause {
  std::string name; // array-typed parameter name
  SourceSpan span;
};

struct MethodDecl {
  std::string name;
  SourceSpan span;
  bool isLemma = false;
  std::vector<std::string> typeParams;
  std::vector<Param> ins;
  std::vector<Param> outs;
  std::vector<SpecClause> requires_;
  std::vector<SpecClause> ensures_;
  std::vector<FrameClause> modifies_;
  std::vector<ExprPtr> decreases_;
  bool hasDecreases = false;
  SourceSpan decreasesSpan;
  std::optional<std::vector<StmtPtr>> body;
};

struct FunctionDecl {
  std::string name;
  SourceSpan span;
  bool isPredicate = false;
  bool isCompiled = false; // "function method" / "predicate method"
  std::vector<std::string> typeParams;
  std::vector<Param> params;
  TypePtr resultType;
  std::vector<SpecClause> requires_;
  std::vector<FrameClause> reads_;
  std::vector<ExprPtr> decreases_;
  bool hasDecreases = false;
  SourceSpan decreasesSpan;
  ExprPtr body; // may be null (bodiless functions are rejected in resolve)
};

struct DatatypeCtor {
  std::string name;
  std::vector<Param> fields;
  SourceSpan span;
};

struct DatatypeDecl {
  std::string name;
  SourceSpan span;
  std::vector<std::string> typeParams;
  std::vector<DatatypeCtor> ctors;
};

using Declaration = std::variant<MethodDecl, FunctionDecl, DatatypeDecl>;

struct Program {
  std::vector<Declaration> decls;
};

const std::string &decl_name(const Declaration &d);
const SourceSpan &decl_span(const Declaration &d);

} // namespace minivc
