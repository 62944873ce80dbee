#include "minivc/lexer.hpp"

#include <cctype>

namespace minivc {

namespace {
bool ident_start(char c) { return std::isalpha((unsigned char)c) || c == '_'; }
bool ident_char(char c) {
  return std::isalnum((unsigned char)c) || c == '_' || c == '\'' || c == '?';
}
} // namespace

std::vector<Token> lex(const std::string &text, const std::string &file,
                       std::vector<std::string> *errors) {
  std::vector<Token> out;
  size_t i = 0;
  int line = 1, col = 1;

  auto advance = [&](size_t n) {
    for (size_t k = 0; k < n && i < text.size(); ++k) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  auto push = [&](Tok kind, size_t len, std::string txt = "") {
    Token t;
    t.kind = kind;
    t.text = txt.empty() ? text.substr(i, len) : std::move(txt);
    t.span = {file, line, col, (int)len};
    out.push_back(t);
    advance(len);
  };

  while (i < text.size()) {
    char c = text[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      advance(1);
      continue;
    }
    if (c == '/' && i + 1 < text.size() && text[i + 1] == '/') {
      while (i < text.size() && text[i] != '\n')
        advance(1);
      continue;
    }
    if (std::isdigit((unsigned char)c)) {
      size_t j = i;
      while (j < text.size() && std::isdigit((unsigned char)text[j]))
        ++j;
      Token t;
      t.kind = Tok::IntLit;
      t.text = text.substr(i, j - i);
      t.intVal = std::stoll(t.text);
      t.span = {file, line, col, (int)(j - i)};
      out.push_back(t);
      advance(j - i);
      continue;
    }
    if (ident_start(c)) {
      size_t j = i;
      while (j < text.size() && ident_char(text[j]))
        ++j;
      push(Tok::Ident, j - i);
      continue;
    }
    auto two = text.substr(i, 2);
    auto three = text.substr(i, 3);
    auto four = text.substr(i, 4);
    if (four == "<==>") { push(Tok::Iff, 4); continue; }
    if (three == "==>") { push(Tok::Implies, 3); continue; }
    if (three == "<==") { push(Tok::Explies, 3); continue; }
    if (two == "==") { push(Tok::EqEq, 2); continue; }
    if (c == '=' && two != "=>") { push(Tok::Eq, 1); continue; }
    if (two == "!=") { push(Tok::Neq, 2); continue; }
    if (two == "<=") { push(Tok::Le, 2); continue; }
    if (two == ">=") { push(Tok::Ge, 2); continue; }
    if (two == "&&") { push(Tok::AndAnd, 2); continue; }
    if (two == "||") { push(Tok::OrOr, 2); continue; }
    if (two == ":=") { push(Tok::Assign, 2); continue; }
    if (two == "=>") { push(Tok::Arrow, 2); continue; }
    if (two == "..") { push(Tok::DotDot, 2); continue; }
    switch (c) {
    case '(': push(Tok::LParen, 1); continue;
    case ')': push(Tok::RParen, 1); continue;
    case '{': push(Tok::LBrace, 1); continue;
    case '}': push(Tok::RBrace, 1); continue;
    case '[': push(Tok::LBracket, 1); continue;
    case ']': push(Tok::RBracket, 1); continue;
    case ',': push(Tok::Comma, 1); continue;
    case ';': push(Tok::Semi, 1); continue;
    case ':': push(Tok::Colon, 1); continue;
    case '.': push(Tok::Dot, 1); continue;
    case '|': push(Tok::Pipe, 1); continue;
    case '+': push(Tok::Plus, 1); continue;
    case '-': push(Tok::Minus, 1); continue;
    case '*': push(Tok::Star, 1); continue;
    case '/': push(Tok::Slash, 1); continue;
    case '%': push(Tok::Percent, 1); continue;
    case '<': push(Tok::Lt, 1); continue;
    case '>': push(Tok::Gt, 1); continue;
    case '!': push(Tok::Not, 1); continue;
    default:
      if (errors)
        errors->push_back(file + ":" + std::to_string(line) + ":" +
                          std::to_string(col) + ": unexpected character '" +
                          std::string(1, c) + "'");
      advance(1);
      continue;
    }
  }
  Token eof;
  eof.kind = Tok::Eof;
  eof.span = {file, line, col, 0};
  out.push_back(eof);
  return out;
}

} // namespace minivc
