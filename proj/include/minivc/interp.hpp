#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "minivc/resolver.hpp"

namespace minivc {

/// Runtime values. Arrays have reference identity (shared store); null is an
/// Array value with an empty store pointer. Multisets keep their elements
/// sorted so equality is structural.
struct Value {
  enum class K { Int, Bool, Array, Seq, Multiset, Datatype };
  K k = K::Int;
  int64_t i = 0; // Int payload, Bool payload (0/1)
  std::shared_ptr<std::vector<Value>> arr;
  std::vector<Value> elems; // Seq / Multiset elements, Datatype fields
  std::string ctor;         // Datatype

  static Value mkInt(int64_t v);
  static Value mkBool(bool v);
  static Value mkNull();
  static Value mkArray(std::vector<Value> elems);
  static Value mkSeq(std::vector<Value> elems);
  static Value mkMultiset(std::vector<Value> elems); // sorts
  static Value mkDatatype(std::string ctor, std::vector<Value> fields);

  bool operator==(const Value &o) const;
  bool operator!=(const Value &o) const { return !(*this == o); }
  bool operator<(const Value &o) const; // total order (for multisets)
  std::string str() const;
};

struct RuntimeFault {
  enum class Kind {
    Precondition,
    Postcondition,
    Invariant,
    Assert,
    Bounds,
    Null,
    Division,
    Budget,
    Unevaluable,
  };
  Kind kind;
  SourceSpan span;
  std::string message;
};

struct InterpResult {
  std::vector<Value> outs;
  std::optional<RuntimeFault> fault;
  bool ok() const { return !fault.has_value(); }
};

class Interp {
public:
  explicit Interp(const ResolvedProgram &prog, bool checkContracts = false,
                  int64_t stepBudget = 10'000'000);

  InterpResult runMethod(const std::string &name, std::vector<Value> args);

  /// Evaluates a function application on concrete arguments, checking the
  /// function's precondition. Returns nullopt on any fault (including budget
  /// exhaustion) — used as a constant folder by the simplifier.
  std::optional<Value> evalCall(const std::string &fn,
                                const std::vector<Value> &args);

  /// Evaluates a closed expression (no free variables beyond functions and
  /// constructors). Returns nullopt on any fault.
  std::optional<Value> evalClosed(const ExprPtr &e);

private:
  struct Impl;
  const ResolvedProgram &prog_;
  bool check_;
  int64_t budget_;
};

/// Parses a CLI value literal: integers, true/false, [1,2,3] arrays.
std::optional<Value> parse_value(const std::string &text);

} // namespace minivc
