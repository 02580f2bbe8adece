#include <cctype>
#include <charconv>
#include <set>

#include "trim/syntax.hpp"

namespace trim {

namespace {

enum class Tok { Ident, Int, Punct, End };

struct Token {
  Tok kind;
  std::string text;
  int line;
  int column;
};

const std::set<std::string> kKeywords = {"proc",   "call",   "malloc", "nondet", "assert",
                                         "assume", "if",     "else",   "true",   "false",
                                         "drf",    "forall", "exists"};

std::vector<Token> lex(std::string_view src, const std::string& file) {
  static const char* const kLong[] = {":=", "==", "!=", "<=", ">=", "&&", "||", "=>"};
  static const std::string kShort = "(){};:,*+-<>=!.";
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    int l = line, cl = col;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      out.push_back({Tok::Ident, std::string(src.substr(i, j - i)), l, cl});
      advance(j - i);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      out.push_back({Tok::Int, std::string(src.substr(i, j - i)), l, cl});
      advance(j - i);
      continue;
    }
    bool matched = false;
    for (const char* op : kLong) {
      if (src.substr(i, 2) == op) {
        out.push_back({Tok::Punct, op, l, cl});
        advance(2);
        matched = true;
        break;
      }
    }
    if (matched) continue;
    if (kShort.find(c) != std::string::npos) {
      out.push_back({Tok::Punct, std::string(1, c), l, cl});
      advance(1);
      continue;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", SourceSpan{file, l, cl, l, cl + 1});
  }
  out.push_back({Tok::End, "", line, col});
  return out;
}

bool isTempName(const std::string& s, long& index) {
  if (s.size() < 3 || s.compare(0, 2, "_t") != 0) return false;
  long v = 0;
  auto [p, ec] = std::from_chars(s.data() + 2, s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) return false;
  index = v;
  return true;
}

class Parser {
 public:
  Parser(std::string_view text, std::string file, bool formulaMode)
      : file_(std::move(file)), formulaMode_(formulaMode), toks_(lex(text, file_)) {}

  Program program() {
    Program p;
    while (peek().kind != Tok::End) p.procedures.push_back(procedure());
    if (p.procedures.empty()) fail("expected at least one procedure");
    return p;
  }

  Formula formulaOnly() {
    Formula f = impl(nullptr);
    if (peek().kind != Tok::End) fail("unexpected '" + peek().text + "' after formula");
    return f;
  }

  Term termOnly() {
    Term t = expr(nullptr);
    if (peek().kind != Tok::End) fail("unexpected '" + peek().text + "' after term");
    return t;
  }

 private:
  std::string file_;
  bool formulaMode_;
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  long nextTemp_ = 1;

  const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }

  SourceSpan spanFrom(const Token& start) const {
    const Token& last = toks_[pos_ == 0 ? 0 : pos_ - 1];
    return {file_, start.line, start.column, last.line,
            last.column + static_cast<int>(last.text.size())};
  }

  [[noreturn]] void fail(const std::string& msg) const {
    const Token& t = peek();
    throw ParseError(msg, {file_, t.line, t.column, t.line, t.column + static_cast<int>(t.text.size())});
  }

  bool isPunct(const char* p, std::size_t k = 0) const {
    return peek(k).kind == Tok::Punct && peek(k).text == p;
  }
  bool isKeyword(const char* w, std::size_t k = 0) const {
    return peek(k).kind == Tok::Ident && peek(k).text == w;
  }
  bool accept(const char* p) {
    if (!isPunct(p)) return false;
    ++pos_;
    return true;
  }
  bool acceptKeyword(const char* w) {
    if (!isKeyword(w)) return false;
    ++pos_;
    return true;
  }
  void expect(const char* p) {
    if (!accept(p)) fail(std::string("expected '") + p + "' but found '" + describe(peek()) + "'");
  }
  void expectKeyword(const char* w) {
    if (!acceptKeyword(w)) fail(std::string("expected '") + w + "' but found '" + describe(peek()) + "'");
  }
  static std::string describe(const Token& t) { return t.kind == Tok::End ? "end of input" : t.text; }

  std::string ident() {
    const Token& t = peek();
    if (t.kind != Tok::Ident || kKeywords.count(t.text))
      fail("expected an identifier but found '" + describe(t) + "'");
    ++pos_;
    return t.text;
  }

  std::string freshTemp() { return "_t" + std::to_string(nextTemp_++); }

  // Temporaries start above any `_tN` already used inside the procedure.
  void resetTemps(std::size_t bodyStart) {
    long maxIndex = 0;
    int depth = 0;
    for (std::size_t k = bodyStart; k < toks_.size(); ++k) {
      const Token& t = toks_[k];
      if (t.kind == Tok::Punct && t.text == "{") ++depth;
      if (t.kind == Tok::Punct && t.text == "}" && --depth == 0) break;
      long idx;
      if (t.kind == Tok::Ident && isTempName(t.text, idx)) maxIndex = std::max(maxIndex, idx);
    }
    nextTemp_ = maxIndex + 1;
  }

  Procedure procedure() {
    const Token& start = peek();
    expectKeyword("proc");
    Procedure p;
    p.name = ident();
    expect("(");
    if (!isPunct(")")) {
      do p.params.push_back(ident());
      while (accept(","));
    }
    expect(")");
    expect(":");
    p.ret = ident();
    p.span = spanFrom(start);
    resetTemps(pos_);
    p.body = block();
    return p;
  }

  Block block() {
    expect("{");
    Block b;
    while (!isPunct("}")) {
      if (peek().kind == Tok::End) fail("unterminated block");
      statement(b);
    }
    expect("}");
    return b;
  }

  void statement(Block& out) {
    const Token start = peek();
    Block pre;
    auto emit = [&](Stmt s) {
      out.insert(out.end(), pre.begin(), pre.end());
      out.push_back(s.withSpan(spanFrom(start)));
    };

    if (accept("*")) {
      std::string ptr = ident();
      expect(":=");
      Term e = expr(&pre);
      expect(";");
      return emit(Stmt::store(ptr, e));
    }
    if (acceptKeyword("assert") || acceptKeyword("assume")) {
      Formula p = impl(&pre);
      expect(";");
      return emit(start.text == "assert" ? Stmt::assertion(p) : Stmt::assumption(p));
    }
    if (isKeyword("if")) return ifStatement(out);
    if (isKeyword("call")) return emit(callRest("", pre));

    std::string v = ident();
    expect(":=");
    if (isPunct("*") && peek(1).kind == Tok::Ident && peek(2).kind == Tok::Punct && peek(2).text == ";") {
      ++pos_;
      std::string ptr = ident();
      expect(";");
      return emit(Stmt::load(v, ptr));
    }
    if (acceptKeyword("malloc")) {
      expect("(");
      Term size = expr(&pre);
      expect(")");
      expect(";");
      return emit(Stmt::malloc(v, size));
    }
    if (acceptKeyword("nondet")) {
      expect("(");
      expect(")");
      expect(";");
      return emit(Stmt::havoc(v));
    }
    if (isKeyword("call")) return emit(callRest(v, pre));
    Term e = expr(&pre);
    expect(";");
    emit(Stmt::assign(v, e));
  }

  Stmt callRest(const std::string& target, Block& pre) {
    expectKeyword("call");
    std::string callee = ident();
    expect("(");
    std::vector<std::string> args;
    if (!isPunct(")")) {
      do {
        const Token argStart = peek();
        Term a = expr(&pre);
        if (a.isVar()) {
          args.push_back(a.name());
        } else {
          std::string t = freshTemp();
          pre.push_back(Stmt::assign(t, a).withSpan(spanFrom(argStart)));
          args.push_back(t);
        }
      } while (accept(","));
    }
    expect(")");
    expect(";");
    return Stmt::call(target, callee, args);
  }

  void ifStatement(Block& out) {
    const Token start = peek();
    expectKeyword("if");
    expect("(");
    Block pre;
    std::optional<Formula> cond;
    if (isPunct("*") && peek(1).kind == Tok::Punct && peek(1).text == ")") {
      ++pos_;
    } else {
      cond = impl(&pre);
    }
    expect(")");
    SourceSpan headSpan = spanFrom(start);
    Block thenB = block();
    Block elseB;
    if (acceptKeyword("else")) {
      if (isKeyword("if"))
        ifStatement(elseB);
      else
        elseB = block();
    }
    if (cond) {
      thenB.insert(thenB.begin(), Stmt::assumption(*cond).withSpan(headSpan));
      elseB.insert(elseB.begin(), Stmt::assumption(Formula::negation(*cond)).withSpan(headSpan));
    }
    out.insert(out.end(), pre.begin(), pre.end());
    out.push_back(Stmt::nondetIf(std::move(thenB), std::move(elseB)).withSpan(headSpan));
  }

  // Formulas. `pre` collects hoisted heap reads; null in formula mode.

  Formula impl(Block* pre) {
    Formula lhs = disj(pre);
    if (formulaMode_ && accept("=>")) return Formula::implication(lhs, impl(pre));
    return lhs;
  }

  Formula disj(Block* pre) {
    std::vector<Formula> kids{conj(pre)};
    while (accept("||")) kids.push_back(conj(pre));
    return kids.size() == 1 ? kids.front() : Formula::disjunction(std::move(kids));
  }

  Formula conj(Block* pre) {
    std::vector<Formula> kids{unary(pre)};
    while (accept("&&")) kids.push_back(unary(pre));
    return kids.size() == 1 ? kids.front() : Formula::conjunction(std::move(kids));
  }

  bool atOperator() const {
    static const std::set<std::string> ops = {"<", ">", "=", "==", "!=", "<=", ">=", "+", "-", "*"};
    return peek().kind == Tok::Punct && ops.count(peek().text);
  }

  Formula unary(Block* pre) {
    if (accept("!")) return Formula::negation(unary(pre));
    if (isKeyword("true") || isKeyword("false")) {
      bool value = peek().text == "true";
      ++pos_;
      return Formula::boolean(value);
    }
    if (formulaMode_ && (isKeyword("forall") || isKeyword("exists"))) {
      FormulaKind k = peek().text == "forall" ? FormulaKind::Forall : FormulaKind::Exists;
      ++pos_;
      std::string v = ident();
      expect(".");
      return Formula::quantifier(k, v, impl(pre));
    }
    if (isPunct("(")) {
      std::size_t savedPos = pos_;
      std::size_t savedPre = pre ? pre->size() : 0;
      long savedTemp = nextTemp_;
      try {
        ++pos_;
        Formula f = impl(pre);
        expect(")");
        if (!atOperator()) return f;
      } catch (const ParseError&) {
      }
      pos_ = savedPos;
      nextTemp_ = savedTemp;
      if (pre) pre->resize(savedPre);
    }
    return comparison(pre);
  }

  Formula comparison(Block* pre) {
    Term lhs = expr(pre);
    const Token op = peek();
    if (op.kind != Tok::Punct) fail("expected a comparison operator but found '" + describe(op) + "'");
    ++pos_;
    if (op.text == "<") return Formula::lt(lhs, expr(pre));
    if (op.text == ">") return Formula::gt(lhs, expr(pre));
    if (op.text == "=" || op.text == "==") return Formula::eq(lhs, expr(pre));
    if (op.text == "!=") return Formula::negation(Formula::eq(lhs, expr(pre)));
    if (op.text == "<=") return Formula::negation(Formula::gt(lhs, expr(pre)));
    if (op.text == ">=") return Formula::negation(Formula::lt(lhs, expr(pre)));
    --pos_;
    fail("expected a comparison operator but found '" + op.text + "'");
  }

  Term expr(Block* pre) {
    Term lhs = product(pre);
    while (isPunct("+") || isPunct("-")) {
      TermKind k = peek().text == "+" ? TermKind::Add : TermKind::Sub;
      ++pos_;
      lhs = Term::binary(k, lhs, product(pre));
    }
    return lhs;
  }

  Term product(Block* pre) {
    Term lhs = negation(pre);
    while (accept("*")) lhs = Term::mul(lhs, negation(pre));
    return lhs;
  }

  Term negation(Block* pre) {
    if (!accept("-")) return primary(pre);
    if (peek().kind == Tok::Int) return Term::constant(integer("-"));
    return Term::sub(Term::constant(0), negation(pre));
  }

  Int integer(const std::string& sign) {
    std::string digits = sign + peek().text;
    Int v = 0;
    auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v);
    if (ec != std::errc() || p != digits.data() + digits.size()) fail("integer literal out of range");
    ++pos_;
    return v;
  }

  Term primary(Block* pre) {
    if (peek().kind == Tok::Int) return Term::constant(integer(""));
    if (accept("(")) {
      Term t = expr(pre);
      expect(")");
      return t;
    }
    if (formulaMode_ && acceptKeyword("drf")) {
      expect("(");
      Term t = expr(pre);
      expect(")");
      return Term::drf(t);
    }
    if (pre && isPunct("*")) {
      const Token start = peek();
      ++pos_;
      std::string ptr = ident();
      std::string t = freshTemp();
      pre->push_back(Stmt::load(t, ptr).withSpan(spanFrom(start)));
      return Term::var(t);
    }
    return Term::var(ident());
  }
};

}  // namespace

Program parseProgram(std::string_view text, const std::string& file,
                     const std::optional<std::string>& entry) {
  Program p = Parser(text, file, false).program();
  p.entry = entry ? *entry : defaultEntry(p);
  validate(p);
  return p;
}

Formula parseFormula(std::string_view text) { return Parser(text, "", true).formulaOnly(); }

Term parseTerm(std::string_view text) { return Parser(text, "", true).termOnly(); }

}  // namespace trim
