#pragma once

#include <cctype>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "syntax.hpp"

namespace pcfl {

class SyntaxError : public std::runtime_error {
 public:
  SyntaxError(const std::string& msg, int line, int col)
      : std::runtime_error(std::to_string(line) + ":" + std::to_string(col) + ": " + msg), line_(line), col_(col) {}
  int line() const { return line_; }
  int column() const { return col_; }

 private:
  int line_, col_;
};

namespace detail {

struct Token {
  enum class Kind { Ident, Number, Symbol, End };
  Kind kind;
  std::string text;
  int line, col;
};

inline std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else if ((static_cast<unsigned char>(src[i]) & 0xC0) != 0x80) {
        ++col;
      }
    }
  };
  auto starts = [&](std::string_view s) { return src.substr(i, s.size()) == s; };
  // Longest symbols first; UTF-8 spellings map onto their ASCII forms.
  static const std::pair<std::string_view, std::string_view> symbols[] = {
      {"(+)", "(+)"}, {"[.]", "[.]"}, {"\xE2\x8A\x95", "(+)"}, {"\xCE\xBB", "\\"}, {"\xE2\x86\x92", "->"},
      {"->", "->"},   {"::", "::"},   {"<=", "<="},           {"==", "=="},        {"\\", "\\"},
      {".", "."},     {":", ":"},     {"(", "("},             {")", ")"},          {",", ","},
      {"*", "*"},     {"[", "["},     {"]", "]"},             {"{", "{"},          {"}", "}"},
      {"|", "|"},     {"+", "+"},     {"<", "<"},             {">", ">"},          {"=", "=="}};
  while (i < src.size()) {
    char c = src[i];
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    int l = line, cl = col;
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      out.push_back({Token::Kind::Number, std::string(src.substr(i, j - i)), l, cl});
      advance(j - i);
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_' || src[j] == '\''))
        ++j;
      out.push_back({Token::Kind::Ident, std::string(src.substr(i, j - i)), l, cl});
      advance(j - i);
      continue;
    }
    bool matched = false;
    for (const auto& [spelling, canon] : symbols) {
      if (starts(spelling)) {
        out.push_back({Token::Kind::Symbol, std::string(canon), l, cl});
        advance(spelling.size());
        matched = true;
        break;
      }
    }
    if (!matched) throw SyntaxError(std::string("unexpected character '") + c + "'", l, cl);
  }
  out.push_back({Token::Kind::End, "", line, col});
  return out;
}

inline bool is_keyword(const std::string& s) {
  static const char* kws[] = {"true", "false", "nil", "fix", "if", "then", "else", "case",
                              "of",   "fst",   "snd", "bool", "int"};
  for (const char* k : kws)
    if (s == k) return true;
  return false;
}

}  // namespace detail

/// Recursive-descent parser over the surface syntax of types and terms.
/// Test syntax is layered on top in testing.hpp.
class Parser {
 public:
  explicit Parser(std::string_view src) : toks_(detail::lex(src)) {}

  Type type() {
    Type dom = prod_type();
    if (accept("->")) return Type::arrow(dom, type());
    return dom;
  }

  Term term() {
    if (is_sym("\\")) {
      next();
      std::string x = ident("binder");
      expect(":");
      Type a = type();
      expect(".");
      return Term::lam(x, a, term());
    }
    if (is_kw("fix")) {
      next();
      std::string x = ident("binder");
      expect(":");
      Type a = type();
      expect(".");
      return Term::fix(x, a, term());
    }
    if (is_kw("if")) {
      next();
      Term c = term();
      expect_kw("then");
      Term a = term();
      expect_kw("else");
      return Term::ite(c, a, term());
    }
    return choice();
  }

  void expect_end() {
    if (peek().kind != detail::Token::Kind::End) fail("unexpected '" + peek().text + "'");
  }

  // Token-level helpers, shared with the test parser.
  const detail::Token& peek() const { return toks_[pos_]; }
  const detail::Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
  bool is_sym(std::string_view s) const {
    return peek().kind == detail::Token::Kind::Symbol && peek().text == s;
  }
  bool is_kw(std::string_view s) const {
    return peek().kind == detail::Token::Kind::Ident && peek().text == s;
  }
  bool accept(std::string_view s) {
    if (!is_sym(s)) return false;
    next();
    return true;
  }
  void expect(std::string_view s) {
    if (!accept(s)) fail("expected '" + std::string(s) + "'");
  }
  void expect_kw(std::string_view s) {
    if (!is_kw(s)) fail("expected '" + std::string(s) + "'");
    next();
  }
  std::string ident(const char* what) {
    const auto& t = peek();
    if (t.kind != detail::Token::Kind::Ident || detail::is_keyword(t.text))
      fail(std::string("expected ") + what);
    return next().text;
  }
  std::uint64_t number() {
    const auto& t = peek();
    if (t.kind != detail::Token::Kind::Number) fail("expected a natural number");
    try {
      std::size_t used = 0;
      unsigned long long v = std::stoull(t.text, &used);
      next();
      return v;
    } catch (const std::out_of_range&) {
      fail("numeral out of range");
    }
  }
  [[noreturn]] void fail(const std::string& msg) const {
    const auto& t = peek();
    std::string m = msg;
    if (t.kind == detail::Token::Kind::End) m += " at end of input";
    throw SyntaxError(m, t.line, t.col);
  }

 private:
  Type prod_type() {
    Type t = atom_type();
    while (accept("*")) t = Type::prod(t, atom_type());
    return t;
  }

  Type atom_type() {
    if (is_kw("bool")) {
      next();
      return Type::boolean();
    }
    if (is_kw("int")) {
      next();
      return Type::integer();
    }
    if (accept("[")) {
      Type e = type();
      expect("]");
      return Type::list(e);
    }
    if (accept("(")) {
      Type t = type();
      expect(")");
      return t;
    }
    fail("expected a type");
  }

  bool starts_binder() const { return is_sym("\\") || is_kw("fix") || is_kw("if"); }

  // An operand position that may also hold a trailing binder form.
  Term operand(Term (Parser::*lvl)()) {
    if (starts_binder()) return term();
    return (this->*lvl)();
  }

  Term choice() {
    Term t = cons();
    while (accept("(+)")) t = Term::choice(t, operand(&Parser::cons));
    return t;
  }

  Term cons() {
    Term h = cmp();
    if (accept("::")) return Term::cons(h, operand(&Parser::cons));
    return h;
  }

  Term cmp() {
    Term a = add();
    if (accept("<=")) return Term::op(Op::Leq, a, operand(&Parser::add));
    if (accept("==")) return Term::op(Op::Eq, a, operand(&Parser::add));
    return a;
  }

  Term add() {
    Term a = app();
    while (accept("+")) a = Term::op(Op::Add, a, operand(&Parser::app));
    return a;
  }

  bool starts_atom() const {
    const auto& t = peek();
    if (t.kind == detail::Token::Kind::Number) return true;
    if (t.kind == detail::Token::Kind::Ident)
      return !detail::is_keyword(t.text) || t.text == "true" || t.text == "false" || t.text == "nil" ||
             t.text == "case" || t.text == "fst" || t.text == "snd";
    return is_sym("(") || is_sym("[.]");
  }

  Term app() {
    if (starts_binder()) return term();
    Term f = prefix();
    while (true) {
      if (starts_binder()) return Term::app(f, term());
      if (!starts_atom()) return f;
      f = Term::app(f, prefix());
    }
  }

  Term prefix() {
    if (is_kw("fst")) {
      next();
      return Term::fst(operand_atom());
    }
    if (is_kw("snd")) {
      next();
      return Term::snd(operand_atom());
    }
    return atom();
  }

  Term operand_atom() {
    if (starts_binder()) return term();
    if (is_kw("fst") || is_kw("snd")) return prefix();
    return atom();
  }

  Term atom() {
    const auto& t = peek();
    if (t.kind == detail::Token::Kind::Number) return Term::num(number());
    if (is_kw("true")) {
      next();
      return Term::boolean(true);
    }
    if (is_kw("false")) {
      next();
      return Term::boolean(false);
    }
    if (is_kw("nil")) {
      next();
      expect("[");
      Type e = type();
      expect("]");
      return Term::nil(e);
    }
    if (is_kw("case")) {
      next();
      Term l = term();
      expect_kw("of");
      expect("{");
      expect_kw("nil");
      expect("->");
      Term n = term();
      expect("|");
      std::string h = ident("head binder");
      expect("::");
      std::string tl = ident("tail binder");
      if (h == tl) fail("case binders must differ");
      expect("->");
      Term c = term();
      expect("}");
      return Term::case_of(l, n, h, tl, c);
    }
    if (accept("[.]")) return Term::hole();
    if (accept("(")) {
      Term a = term();
      if (accept(",")) {
        Term b = term();
        expect(")");
        return Term::pair(a, b);
      }
      expect(")");
      return a;
    }
    if (t.kind == detail::Token::Kind::Ident && !detail::is_keyword(t.text)) return Term::var(next().text);
    if (t.kind == detail::Token::Kind::End) fail("unexpected end of input");
    fail("unexpected '" + t.text + "'");
  }

  std::vector<detail::Token> toks_;
  std::size_t pos_ = 0;
};

inline Term parse_term(std::string_view src) {
  Parser p(src);
  Term t = p.term();
  p.expect_end();
  return t;
}

inline Type parse_type(std::string_view src) {
  Parser p(src);
  Type t = p.type();
  p.expect_end();
  return t;
}

/// Parses a context; exactly one `[.]` must occur.
inline Context parse_context(std::string_view src) {
  Term t = parse_term(src);
  if (t.hole_count() != 1) throw SyntaxError("context must contain exactly one [.]", 1, 1);
  return Context(t);
}

}  // namespace pcfl
