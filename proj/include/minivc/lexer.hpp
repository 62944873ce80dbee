#pragma once

#include <string>
#include <vector>

#include "minivc/source.hpp"

namespace minivc {

enum class Tok {
  Eof,
  Ident,
  IntLit,
  // punctuation
  LParen, RParen, LBrace, RBrace, LBracket, RBracket,
  Comma, Semi, Colon, Assign /* := */, Arrow /* => */, Eq /* = */,
  DotDot, Dot, Pipe,
  // operators
  Plus, Minus, Star, Slash, Percent,
  EqEq, Neq, Lt, Le, Gt, Ge,
  AndAnd, OrOr, Not, Implies /* ==> */, Explies /* <== */, Iff /* <==> */,
  // type brackets share Lt/Gt
};

struct Token {
  Tok kind = Tok::Eof;
  std::string text;
  int64_t intVal = 0;
  SourceSpan span;
};

/// Tokenizes the whole input. Lexical errors are reported as tokens of
/// kind Ident with empty text plus an entry in `errors`.
std::vector<Token> lex(const std::string &text, const std::string &file,
                       std::vector<std::string> *errors = nullptr);

} // namespace minivc
