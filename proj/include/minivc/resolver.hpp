#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "minivc/ast.hpp"
#include "minivc/diag.hpp"

namespace minivc {

/// Output of name/type/ghost/frame resolution. The AST inside `program` is
/// annotated in place: every expression carries its type, nullary datatype
/// constructors are reclassified from Var to CtorCall, and single-target
/// method calls parsed as assignments become Call statements.
struct ResolvedProgram {
  Program program;
  std::vector<Diagnostic> diagnostics;

  std::map<std::string, const FunctionDecl *> functions;
  std::map<std::string, const MethodDecl *> methods;
  std::map<std::string, const DatatypeDecl *> datatypes;
  // ctor name -> (datatype, ctor)
  std::map<std::string, std::pair<const DatatypeDecl *, const DatatypeCtor *>>
      ctors;
  // dtor field name -> (datatype, ctor, field index)
  struct FieldInfo {
    const DatatypeDecl *dt;
    const DatatypeCtor *ctor;
    size_t index;
  };
  std::map<std::string, FieldInfo> fields;

  // callable name -> callees (functions, methods, lemmas alike)
  std::map<std::string, std::set<std::string>> callGraph;
  // callable name -> SCC id; two callables share an id iff mutually recursive
  std::map<std::string, int> sccId;
  // callables that sit on a call-graph cycle (including self-loops)
  std::set<std::string> recursive;

  bool ok() const {
    for (const auto &d : diagnostics)
      if (d.severity == Severity::Error)
        return false;
    return true;
  }

  bool sameScc(const std::string &a, const std::string &b) const {
    auto ia = sccId.find(a), ib = sccId.find(b);
    return ia != sccId.end() && ib != sccId.end() && ia->second == ib->second;
  }
};

ResolvedProgram resolve(Program program);

} // namespace minivc
