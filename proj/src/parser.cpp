#include "minivc/parser.hpp"

#include <functional>
#include <set>

#include "minivc/lexer.hpp"

namespace minivc {

namespace {

const std::set<std::string> kKeywords = {
    "method",   "function", "predicate", "lemma",    "datatype", "ghost",
    "var",      "if",       "else",      "while",    "invariant", "decreases",
    "requires", "ensures",  "reads",     "modifies", "returns",  "assert",
    "assume",   "calc",     "match",     "case",     "new",      "old",
    "forall",   "multiset", "true",      "false",    "null",     "int",
    "bool",     "array",    "seq",       "then",     "returns"};

struct ParseError {
  SourceSpan span;
  std::string message;
};

class Parser {
public:
  Parser(std::vector<Token> toks, std::string file, ParseResult &res)
      : toks_(std::move(toks)), file_(std::move(file)), res_(res) {}

  Program parseProgram() {
    Program p;
    while (!at(Tok::Eof)) {
      size_t before = pos_;
      try {
        auto d = parseDeclaration();
        p.decls.push_back(std::move(d));
      } catch (const ParseError &e) {
        error(e.span, e.message);
        // Recover: skip to the next declaration keyword at brace depth 0.
        if (pos_ == before)
          ++pos_;
        skipToNextDecl();
      }
    }
    return p;
  }

  ExprPtr parseExprPublic() { return parseExpr(); }

private:
  std::vector<Token> toks_;
  std::string file_;
  ParseResult &res_;
  size_t pos_ = 0;

  const Token &cur() const { return toks_[pos_]; }
  const Token &peek(size_t n = 1) const {
    return toks_[std::min(pos_ + n, toks_.size() - 1)];
  }
  bool at(Tok k) const { return cur().kind == k; }
  bool atKw(const char *kw) const {
    return cur().kind == Tok::Ident && cur().text == kw;
  }
  Token take() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

  [[noreturn]] void fail(const std::string &msg) {
    throw ParseError{cur().span, msg};
  }
  void error(SourceSpan sp, const std::string &msg) {
    Diagnostic d;
    d.span = sp;
    d.severity = Severity::Error;
    d.kind = DiagKind::Syntax;
    d.message = msg;
    res_.diagnostics.push_back(std::move(d));
  }

  Token expect(Tok k, const char *what) {
    if (!at(k))
      fail(std::string("expected ") + what);
    return take();
  }
  Token expectKw(const char *kw) {
    if (!atKw(kw))
      fail(std::string("expected '") + kw + "'");
    return take();
  }
  bool eat(Tok k) {
    if (at(k)) {
      take();
      return true;
    }
    return false;
  }
  bool eatKw(const char *kw) {
    if (atKw(kw)) {
      take();
      return true;
    }
    return false;
  }

  std::string expectIdent() {
    if (!at(Tok::Ident) || kKeywords.count(cur().text))
      fail("expected identifier");
    return take().text;
  }

  void skipToNextDecl() {
    int depth = 0;
    while (!at(Tok::Eof)) {
      if (at(Tok::LBrace))
        ++depth;
      else if (at(Tok::RBrace))
        depth = std::max(0, depth - 1);
      else if (depth == 0 &&
               (atKw("method") || atKw("function") || atKw("predicate") ||
                atKw("lemma") || atKw("datatype")))
        return;
      take();
    }
  }

  // ---- types ------------------------------------------------------------

  TypePtr parseType() {
    if (eatKw("int"))
      return Type::intType();
    if (eatKw("bool"))
      return Type::boolType();
    if (atKw("array") || atKw("seq") || atKw("multiset")) {
      std::string which = take().text;
      expect(Tok::Lt, "'<'");
      TypePtr elem = parseType();
      expect(Tok::Gt, "'>'");
      if (which == "array")
        return Type::array(elem);
      if (which == "seq")
        return Type::seq(elem);
      return Type::multiset(elem);
    }
    std::string name = expectIdent();
    std::vector<TypePtr> args;
    if (eat(Tok::Lt)) {
      args.push_back(parseType());
      while (eat(Tok::Comma))
        args.push_back(parseType());
      expect(Tok::Gt, "'>'");
      return Type::datatype(name, std::move(args));
    }
    // A bare name is a type variable or a nullary datatype; resolution
    // decides which.
    return Type::datatype(name, {});
  }

  // ---- declarations -----------------------------------------------------

  Declaration parseDeclaration() {
    if (atKw("datatype"))
      return parseDatatype();
    if (atKw("function") || atKw("predicate"))
      return parseFunction();
    if (atKw("method") || atKw("lemma"))
      return parseMethod();
    fail("expected declaration");
  }

  std::vector<std::string> parseTypeParams() {
    std::vector<std::string> tps;
    if (eat(Tok::Lt)) {
      tps.push_back(expectIdent());
      while (eat(Tok::Comma))
        tps.push_back(expectIdent());
      expect(Tok::Gt, "'>'");
    }
    return tps;
  }

  std::vector<Param> parseParams() {
    std::vector<Param> ps;
    expect(Tok::LParen, "'('");
    if (!at(Tok::RParen)) {
      do {
        Param p;
        p.span = cur().span;
        p.name = expectIdent();
        expect(Tok::Colon, "':'");
        p.type = parseType();
        ps.push_back(std::move(p));
      } while (eat(Tok::Comma));
    }
    expect(Tok::RParen, "')'");
    return ps;
  }

  Declaration parseDatatype() {
    DatatypeDecl d;
    d.span = cur().span;
    expectKw("datatype");
    d.name = expectIdent();
    d.typeParams = parseTypeParams();
    expect(Tok::Eq, "'='");
    do {
      DatatypeCtor c;
      c.span = cur().span;
      c.name = expectIdent();
      if (eat(Tok::LParen)) {
        if (!at(Tok::RParen)) {
          do {
            Param f;
            f.span = cur().span;
            f.name = expectIdent();
            expect(Tok::Colon, "':'");
            f.type = parseType();
            c.fields.push_back(std::move(f));
          } while (eat(Tok::Comma));
        }
        expect(Tok::RParen, "')'");
      }
      d.ctors.push_back(std::move(c));
    } while (eat(Tok::Pipe));
    return d;
  }

  Declaration parseFunction() {
    FunctionDecl f;
    f.span = cur().span;
    f.isPredicate = eatKw("predicate");
    if (!f.isPredicate)
      expectKw("function");
    f.isCompiled = eatKw("method");
    f.name = expectIdent();
    f.typeParams = parseTypeParams();
    f.params = parseParams();
    if (f.isPredicate) {
      f.resultType = Type::boolType();
    } else {
      expect(Tok::Colon, "':'");
      f.resultType = parseType();
    }
    parseFunctionSpec(f);
    if (at(Tok::LBrace)) {
      take();
      f.body = parseExpr();
      expect(Tok::RBrace, "'}'");
    }
    return f;
  }

  void parseFunctionSpec(FunctionDecl &f) {
    for (;;) {
      if (atKw("requires")) {
        SourceSpan sp = take().span;
        f.requires_.push_back({parseExpr(), sp});
        eat(Tok::Semi);
      } else if (atKw("reads")) {
        take();
        do {
          FrameClause fc;
          fc.span = cur().span;
          fc.name = expectIdent();
          f.reads_.push_back(std::move(fc));
        } while (eat(Tok::Comma));
        eat(Tok::Semi);
      } else if (atKw("decreases")) {
        f.decreasesSpan = take().span;
        f.hasDecreases = true;
        f.decreases_.push_back(parseExpr());
        while (eat(Tok::Comma))
          f.decreases_.push_back(parseExpr());
        eat(Tok::Semi);
      } else {
        break;
      }
    }
  }

  Declaration parseMethod() {
    MethodDecl m;
    m.span = cur().span;
    m.isLemma = eatKw("lemma");
    if (!m.isLemma)
      expectKw("method");
    m.name = expectIdent();
    m.typeParams = parseTypeParams();
    m.ins = parseParams();
    if (eatKw("returns"))
      m.outs = parseParams();
    for (;;) {
      if (atKw("requires")) {
        SourceSpan sp = take().span;
        m.requires_.push_back({parseExpr(), sp});
        eat(Tok::Semi);
      } else if (atKw("ensures")) {
        SourceSpan sp = take().span;
        m.ensures_.push_back({parseExpr(), sp});
        eat(Tok::Semi);
      } else if (atKw("modifies")) {
        take();
        do {
          FrameClause fc;
          fc.span = cur().span;
          fc.name = expectIdent();
          m.modifies_.push_back(std::move(fc));
        } while (eat(Tok::Comma));
        eat(Tok::Semi);
      } else if (atKw("decreases")) {
        m.decreasesSpan = take().span;
        m.hasDecreases = true;
        m.decreases_.push_back(parseExpr());
        while (eat(Tok::Comma))
          m.decreases_.push_back(parseExpr());
        eat(Tok::Semi);
      } else {
        break;
      }
    }
    if (at(Tok::LBrace))
      m.body = parseBlock();
    return m;
  }

  // ---- statements ---------------------------------------------------------

  std::vector<StmtPtr> parseBlock() {
    expect(Tok::LBrace, "'{'");
    std::vector<StmtPtr> stmts;
    while (!at(Tok::RBrace) && !at(Tok::Eof))
      stmts.push_back(parseStmt());
    expect(Tok::RBrace, "'}'");
    return stmts;
  }

  StmtPtr parseStmt() {
    auto s = std::make_shared<Stmt>();
    s->span = cur().span;
    if (at(Tok::LBrace)) {
      s->kind = StmtKind::Block;
      s->body = parseBlock();
      return s;
    }
    if (atKw("ghost") || atKw("var"))
      return parseVarDecl();
    if (atKw("if"))
      return parseIf();
    if (atKw("while"))
      return parseWhile();
    if (atKw("assert")) {
      take();
      s->kind = StmtKind::Assert;
      s->exprs.push_back(parseExpr());
      expect(Tok::Semi, "';'");
      return s;
    }
    if (atKw("assume")) {
      take();
      s->kind = StmtKind::Assume;
      s->exprs.push_back(parseExpr());
      expect(Tok::Semi, "';'");
      return s;
    }
    if (atKw("calc"))
      return parseCalc();
    if (atKw("match"))
      return parseMatch();
    return parseAssignOrCall();
  }

  StmtPtr parseVarDecl() {
    auto s = std::make_shared<Stmt>();
    s->span = cur().span;
    s->kind = StmtKind::VarDecl;
    s->ghost = eatKw("ghost");
    expectKw("var");
    do {
      s->nameSpans.push_back(cur().span);
      s->names.push_back(expectIdent());
      if (eat(Tok::Colon))
        s->declTypes.push_back(parseType());
      else
        s->declTypes.push_back(nullptr);
    } while (eat(Tok::Comma));
    if (eat(Tok::Assign)) {
      do
        s->exprs.push_back(parseExpr());
      while (eat(Tok::Comma));
      if (s->exprs.size() != s->names.size())
        fail("mismatched counts in var initialization");
    }
    expect(Tok::Semi, "';'");
    return s;
  }

  StmtPtr parseIf() {
    auto s = std::make_shared<Stmt>();
    s->span = cur().span;
    s->kind = StmtKind::If;
    expectKw("if");
    s->exprs.push_back(parseExpr());
    s->body = parseBlock();
    if (eatKw("else")) {
      if (atKw("if"))
        s->elseBody.push_back(parseIf());
      else
        s->elseBody = parseBlock();
    }
    return s;
  }

  StmtPtr parseWhile() {
    auto s = std::make_shared<Stmt>();
    s->span = cur().span;
    s->kind = StmtKind::While;
    expectKw("while");
    s->exprs.push_back(parseExpr());
    for (;;) {
      if (atKw("invariant")) {
        SourceSpan sp = take().span;
        s->invariantSpans.push_back(sp);
        s->invariants.push_back(parseExpr());
        eat(Tok::Semi);
      } else if (atKw("decreases")) {
        take();
        s->hasDecreases = true;
        s->decreases.push_back(parseExpr());
        while (eat(Tok::Comma))
          s->decreases.push_back(parseExpr());
        eat(Tok::Semi);
      } else {
        break;
      }
    }
    s->body = parseBlock();
    return s;
  }

  StmtPtr parseCalc() {
    auto s = std::make_shared<Stmt>();
    s->span = cur().span;
    s->kind = StmtKind::Calc;
    expectKw("calc");
    expect(Tok::LBrace, "'{'");
    s->calcLines.push_back(parseExpr());
    expect(Tok::Semi, "';'");
    while (!at(Tok::RBrace)) {
      SourceSpan opSp = cur().span;
      CalcOp op = CalcOp::Eq;
      if (at(Tok::EqEq)) { take(); op = CalcOp::Eq; }
      else if (at(Tok::Neq)) { take(); op = CalcOp::Ne; }
      else if (at(Tok::Lt)) { take(); op = CalcOp::Lt; }
      else if (at(Tok::Le)) { take(); op = CalcOp::Le; }
      else if (at(Tok::Gt)) { take(); op = CalcOp::Gt; }
      else if (at(Tok::Ge)) { take(); op = CalcOp::Ge; }
      else if (at(Tok::Implies)) { take(); op = CalcOp::Implies; }
      else if (at(Tok::Explies)) { take(); op = CalcOp::Explies; }
      else if (at(Tok::Iff)) { take(); op = CalcOp::Iff; }
      // else: default relation (equality), nothing consumed
      s->calcOps.push_back(op);
      s->calcOpSpans.push_back(opSp);
      std::vector<StmtPtr> hint;
      if (at(Tok::LBrace))
        hint = parseBlock();
      s->calcHints.push_back(std::move(hint));
      s->calcLines.push_back(parseExpr());
      expect(Tok::Semi, "';'");
    }
    expect(Tok::RBrace, "'}'");
    return s;
  }

  StmtPtr parseMatch() {
    auto s = std::make_shared<Stmt>();
    s->span = cur().span;
    s->kind = StmtKind::Match;
    expectKw("match");
    s->exprs.push_back(parseExpr());
    bool braced = eat(Tok::LBrace);
    while (atKw("case")) {
      MatchCase mc;
      mc.span = take().span;
      mc.ctor = expectIdent();
      if (eat(Tok::LParen)) {
        if (!at(Tok::RParen)) {
          do {
            BoundVar bv;
            bv.span = cur().span;
            bv.name = expectIdent();
            if (eat(Tok::Colon))
              bv.type = parseType();
            mc.binders.push_back(std::move(bv));
          } while (eat(Tok::Comma));
        }
        expect(Tok::RParen, "')'");
      }
      expect(Tok::Arrow, "'=>'");
      if (at(Tok::LBrace)) {
        mc.body = parseBlock();
      } else {
        while (!atKw("case") && !at(Tok::RBrace) && !at(Tok::Eof))
          mc.body.push_back(parseStmt());
      }
      s->cases.push_back(std::move(mc));
    }
    if (braced)
      expect(Tok::RBrace, "'}'");
    return s;
  }

  StmtPtr parseAssignOrCall() {
    auto s = std::make_shared<Stmt>();
    s->span = cur().span;
    std::vector<ExprPtr> lhs;
    lhs.push_back(parsePostfix());
    while (eat(Tok::Comma))
      lhs.push_back(parsePostfix());
    if (eat(Tok::Assign)) {
      // `x := new T[n];`
      if (atKw("new")) {
        if (lhs.size() != 1 || lhs[0]->kind != ExprKind::Var)
          fail("array allocation target must be a single variable");
        take();
        s->kind = StmtKind::ArrayAlloc;
        s->names.push_back(lhs[0]->name);
        s->allocElemType = parseType();
        expect(Tok::LBracket, "'['");
        s->exprs.push_back(parseExpr());
        expect(Tok::RBracket, "']'");
        expect(Tok::Semi, "';'");
        return s;
      }
      std::vector<ExprPtr> rhs;
      do
        rhs.push_back(parseExpr());
      while (eat(Tok::Comma));
      expect(Tok::Semi, "';'");
      // `x, y := m(...)` with a single method-call rhs is a call statement.
      if (rhs.size() == 1 && rhs[0]->kind == ExprKind::FnCall &&
          (lhs.size() > 1 || rhs.size() == lhs.size())) {
        bool allVars = true;
        for (const auto &l : lhs)
          allVars = allVars && l->kind == ExprKind::Var;
        if (allVars && lhs.size() > 1) {
          s->kind = StmtKind::Call;
          for (const auto &l : lhs) {
            s->names.push_back(l->name);
            s->nameSpans.push_back(l->span);
          }
          s->callee = rhs[0]->name;
          s->exprs = rhs[0]->args;
          return s;
        }
      }
      if (rhs.size() != lhs.size())
        fail("mismatched assignment counts");
      s->kind = StmtKind::Assign;
      s->lhs = std::move(lhs);
      s->exprs = std::move(rhs);
      for (const auto &l : s->lhs)
        if (l->kind != ExprKind::Var && l->kind != ExprKind::ArrayIndex)
          fail("assignment target must be a variable or array element");
      return s;
    }
    // Bare call statement `m(args);`
    if (lhs.size() == 1 && lhs[0]->kind == ExprKind::FnCall) {
      expect(Tok::Semi, "';'");
      s->kind = StmtKind::Call;
      s->callee = lhs[0]->name;
      s->exprs = lhs[0]->args;
      return s;
    }
    fail("expected statement");
  }

  // ---- expressions --------------------------------------------------------

  ExprPtr parseExpr() { return parseIfThenElse(); }

  ExprPtr parseIfThenElse() {
    if (atKw("if")) {
      SourceSpan sp = take().span;
      ExprPtr c = parseExpr();
      expectKw("then");
      ExprPtr a = parseExpr();
      expectKw("else");
      ExprPtr b = parseExpr();
      auto e = std::make_shared<Expr>();
      e->kind = ExprKind::IfThenElse;
      e->span = sp;
      e->args = {c, a, b};
      return e;
    }
    return parseIff();
  }

  ExprPtr parseIff() {
    ExprPtr e = parseImplies();
    while (at(Tok::Iff)) {
      SourceSpan sp = take().span;
      e = mk_binary(BinOp::Iff, e, parseImplies(), sp);
    }
    return e;
  }

  ExprPtr parseImplies() {
    ExprPtr e = parseOr();
    if (at(Tok::Implies)) {
      SourceSpan sp = take().span;
      return mk_binary(BinOp::Implies, e, parseImplies(), sp); // right-assoc
    }
    if (at(Tok::Explies)) {
      SourceSpan sp = take().span;
      return mk_binary(BinOp::Explies, e, parseImplies(), sp);
    }
    return e;
  }

  ExprPtr parseOr() {
    ExprPtr e = parseAnd();
    while (at(Tok::OrOr)) {
      SourceSpan sp = take().span;
      e = mk_binary(BinOp::Or, e, parseAnd(), sp);
    }
    return e;
  }

  ExprPtr parseAnd() {
    ExprPtr e = parseRel();
    while (at(Tok::AndAnd)) {
      SourceSpan sp = take().span;
      e = mk_binary(BinOp::And, e, parseRel(), sp);
    }
    return e;
  }

  static bool isRelTok(Tok k) {
    return k == Tok::EqEq || k == Tok::Neq || k == Tok::Lt || k == Tok::Le ||
           k == Tok::Gt || k == Tok::Ge;
  }
  static BinOp relOp(Tok k) {
    switch (k) {
    case Tok::EqEq: return BinOp::Eq;
    case Tok::Neq: return BinOp::Ne;
    case Tok::Lt: return BinOp::Lt;
    case Tok::Le: return BinOp::Le;
    case Tok::Gt: return BinOp::Gt;
    default: return BinOp::Ge;
    }
  }

  // Relational chains `a <= b < c` parse as conjunctions; ascending and
  // descending chains may not be mixed, and `!=` does not chain.
  ExprPtr parseRel() {
    ExprPtr first = parseAddSub();
    if (!isRelTok(cur().kind))
      return first;
    struct Link {
      BinOp op;
      ExprPtr rhs;
      SourceSpan sp;
    };
    std::vector<Link> links;
    while (isRelTok(cur().kind)) {
      Tok k = cur().kind;
      SourceSpan sp = take().span;
      links.push_back({relOp(k), parseAddSub(), sp});
    }
    if (links.size() == 1)
      return mk_binary(links[0].op, first, links[0].rhs, links[0].sp);
    auto cls = [](BinOp op) {
      switch (op) {
      case BinOp::Eq: return 0;
      case BinOp::Lt: case BinOp::Le: return 1;
      case BinOp::Gt: case BinOp::Ge: return 2;
      default: return 3; // != — never chains
      }
    };
    int chainClass = 0;
    for (const auto &l : links) {
      int c = cls(l.op);
      if (c == 3)
        throw ParseError{l.sp, "'!=' cannot appear in a relational chain"};
      if (c != 0) {
        if (chainClass != 0 && chainClass != c)
          throw ParseError{l.sp, "mixed directions in relational chain"};
        chainClass = c;
      }
    }
    ExprPtr conj;
    ExprPtr prev = first;
    for (const auto &l : links) {
      ExprPtr atom = mk_binary(l.op, prev, l.rhs, l.sp);
      conj = conj ? mk_binary(BinOp::And, conj, atom, l.sp) : atom;
      prev = l.rhs;
    }
    return conj;
  }

  ExprPtr parseAddSub() {
    ExprPtr e = parseMul();
    while (at(Tok::Plus) || at(Tok::Minus)) {
      Tok k = cur().kind;
      SourceSpan sp = take().span;
      e = mk_binary(k == Tok::Plus ? BinOp::Add : BinOp::Sub, e, parseMul(),
                    sp);
    }
    return e;
  }

  ExprPtr parseMul() {
    ExprPtr e = parseUnary();
    while (at(Tok::Star) || at(Tok::Slash) || at(Tok::Percent)) {
      Tok k = cur().kind;
      SourceSpan sp = take().span;
      BinOp op = k == Tok::Star    ? BinOp::Mul
                 : k == Tok::Slash ? BinOp::Div
                                   : BinOp::Mod;
      e = mk_binary(op, e, parseUnary(), sp);
    }
    return e;
  }

  ExprPtr parseUnary() {
    if (at(Tok::Not)) {
      SourceSpan sp = take().span;
      return mk_unary(UnOp::Not, parseUnary(), sp);
    }
    if (at(Tok::Minus)) {
      SourceSpan sp = take().span;
      return mk_unary(UnOp::Neg, parseUnary(), sp);
    }
    return parsePostfix();
  }

  ExprPtr parsePostfix() {
    ExprPtr e = parseAtom();
    for (;;) {
      if (at(Tok::LBracket)) {
        SourceSpan sp = take().span;
        if (at(Tok::DotDot)) { // a[..] or a[..hi]
          take();
          auto s = std::make_shared<Expr>();
          s->kind = ExprKind::SeqSlice;
          s->span = sp;
          s->args = {e};
          if (!at(Tok::RBracket)) {
            s->args.push_back(parseExpr());
            s->hasHi = true;
          }
          expect(Tok::RBracket, "']'");
          e = s;
          continue;
        }
        ExprPtr idx = parseExpr();
        if (at(Tok::DotDot)) { // a[lo..] / a[lo..hi]
          take();
          auto s = std::make_shared<Expr>();
          s->kind = ExprKind::SeqSlice;
          s->span = sp;
          s->args = {e, idx};
          s->hasLo = true;
          if (!at(Tok::RBracket)) {
            s->args.push_back(parseExpr());
            s->hasHi = true;
          }
          expect(Tok::RBracket, "']'");
          e = s;
          continue;
        }
        expect(Tok::RBracket, "']'");
        auto s = std::make_shared<Expr>();
        s->kind = ExprKind::ArrayIndex;
        s->span = sp;
        s->args = {e, idx};
        e = s;
        continue;
      }
      if (at(Tok::Dot)) {
        SourceSpan sp = take().span;
        std::string field = take().text;
        if (field == "Length") {
          auto s = std::make_shared<Expr>();
          s->kind = ExprKind::ArrayLength;
          s->span = sp;
          s->args = {e};
          e = s;
        } else {
          auto s = std::make_shared<Expr>();
          s->kind = ExprKind::DtorAccess;
          s->span = sp;
          s->name = field;
          s->args = {e};
          e = s;
        }
        continue;
      }
      break;
    }
    return e;
  }

  ExprPtr parseAtom() {
    SourceSpan sp = cur().span;
    if (at(Tok::IntLit)) {
      return mk_int(take().intVal, sp);
    }
    if (atKw("true")) { take(); return mk_bool(true, sp); }
    if (atKw("false")) { take(); return mk_bool(false, sp); }
    if (atKw("null")) {
      take();
      auto e = std::make_shared<Expr>();
      e->kind = ExprKind::NullLit;
      e->span = sp;
      return e;
    }
    if (atKw("old")) {
      take();
      expect(Tok::LParen, "'('");
      ExprPtr inner = parseExpr();
      expect(Tok::RParen, "')'");
      auto e = std::make_shared<Expr>();
      e->kind = ExprKind::Old;
      e->span = sp;
      e->args = {inner};
      return e;
    }
    if (atKw("multiset")) {
      take();
      expect(Tok::LParen, "'('");
      ExprPtr inner = parseExpr();
      expect(Tok::RParen, "')'");
      auto e = std::make_shared<Expr>();
      e->kind = ExprKind::MultisetOf;
      e->span = sp;
      e->args = {inner};
      return e;
    }
    if (atKw("forall")) {
      take();
      auto e = std::make_shared<Expr>();
      e->kind = ExprKind::Forall;
      e->span = sp;
      do {
        BoundVar bv;
        bv.span = cur().span;
        bv.name = expectIdent();
        // A single ':' introduces a type; '::' ends the binder list.
        if (at(Tok::Colon) && peek().kind != Tok::Colon) {
          take();
          bv.type = parseType();
        }
        e->bound.push_back(std::move(bv));
      } while (eat(Tok::Comma));
      expect(Tok::Colon, "'::'");
      expect(Tok::Colon, "'::'");
      e->args.push_back(parseExpr());
      return e;
    }
    if (at(Tok::LParen)) {
      take();
      ExprPtr e = parseExpr();
      expect(Tok::RParen, "')'");
      return e;
    }
    if (at(Tok::Ident) && !kKeywords.count(cur().text)) {
      std::string name = take().text;
      if (at(Tok::LParen)) {
        take();
        std::vector<ExprPtr> args;
        if (!at(Tok::RParen)) {
          do
            args.push_back(parseExpr());
          while (eat(Tok::Comma));
        }
        expect(Tok::RParen, "')'");
        // Constructor vs function call is decided during resolution; an
        // initial upper-case letter is recorded as a constructor candidate.
        return mk_fncall(name, std::move(args), sp);
      }
      return mk_var(name, sp);
    }
    fail("expected expression");
  }

  friend ParseResult minivc::parse(const std::string &, const std::string &);
};

} // namespace

ParseResult parse(const std::string &text, const std::string &file) {
  ParseResult res;
  std::vector<std::string> lexErrors;
  auto toks = lex(text, file, &lexErrors);
  for (const auto &msg : lexErrors) {
    Diagnostic d;
    d.kind = DiagKind::Syntax;
    d.severity = Severity::Error;
    d.message = msg;
    res.diagnostics.push_back(std::move(d));
  }
  Parser p(std::move(toks), file, res);
  res.program = p.parseProgram();
  return res;
}

ExprPtr parse_expression(const std::string &text,
                         std::vector<Diagnostic> *diags) {
  ParseResult res;
  auto toks = lex(text, "<expr>");
  Parser p(std::move(toks), "<expr>", res);
  ExprPtr e;
  try {
    e = p.parseExprPublic();
  } catch (const ParseError &err) {
    res.diagnostics.push_back(Diagnostic{err.span, Severity::Error,
                                         DiagKind::Syntax, err.message});
    e = nullptr;
  }
  if (diags)
    *diags = res.diagnostics;
  return e;
}

} // namespace minivc
