#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include "ast.hpp"
#include "rulesynth/error.hpp"

namespace rulesynth::frontend {

namespace {

enum class Tok { Ident, Int, Long, Double, String, Char, Punct, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  int line = 1;
  int column = 1;
};

// Longest operators first so the scanner is greedy.
constexpr std::string_view kPuncts[] = {
    ">>>=", "<<=", ">>=", ">>>", "...", "->", "::", "++", "--", "&&", "||", "==", "!=", "<=", ">=", "+=", "-=",
    "*=",   "/=",  "%=",  "&=",  "|=",  "^=", "<<", ">>", "(",  ")",  "{",  "}",  "[",  "]",  ";",  ",",
    ".",    "=",   "<",   ">",   "!",   "~",  "?",  ":",  "+",  "-",  "*",  "/",  "%",  "&",  "|",  "^", "@"};

std::vector<Token> lex(const std::string& src) {
  std::vector<Token> out;
  std::size_t i = 0;
  int line = 1;
  int col = 1;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < src.size()) {
    const char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (src.compare(i, 2, "//") == 0) {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    if (src.compare(i, 2, "/*") == 0) {
      const int l = line, cc = col;
      auto end = src.find("*/", i + 2);
      if (end == std::string::npos) throw ParseError("unterminated comment", l, cc);
      advance(end + 2 - i);
      continue;
    }
    Token t;
    t.line = line;
    t.column = col;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_' || src[j] == '$')) ++j;
      t.kind = Tok::Ident;
      t.text = src.substr(i, j - i);
      advance(j - i);
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      bool real = false;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_' ||
                                (src[j] == '.' && j + 1 < src.size() && std::isdigit(static_cast<unsigned char>(src[j + 1]))))) {
        if (src[j] == '.') real = true;
        ++j;
      }
      t.text = src.substr(i, j - i);
      const char last = static_cast<char>(std::tolower(static_cast<unsigned char>(t.text.back())));
      const bool hex = t.text.size() > 1 && (t.text[1] == 'x' || t.text[1] == 'X');
      if (last == 'l') {
        t.kind = Tok::Long;
      } else if (!hex && (real || last == 'd' || last == 'f' || t.text.find_first_of("eE") != std::string::npos)) {
        t.kind = Tok::Double;
      } else {
        t.kind = Tok::Int;
      }
      advance(j - i);
    } else if (c == '"' || c == '\'') {
      std::size_t j = i + 1;
      while (j < src.size() && src[j] != c) {
        if (src[j] == '\\') ++j;
        if (j < src.size() && src[j] == '\n') throw ParseError("unterminated literal", t.line, t.column);
        ++j;
      }
      if (j >= src.size()) throw ParseError("unterminated literal", t.line, t.column);
      t.kind = c == '"' ? Tok::String : Tok::Char;
      t.text = src.substr(i, j + 1 - i);
      advance(j + 1 - i);
    } else {
      bool found = false;
      for (std::string_view p : kPuncts) {
        if (src.compare(i, p.size(), p) == 0) {
          t.kind = Tok::Punct;
          t.text = std::string(p);
          advance(p.size());
          found = true;
          break;
        }
      }
      if (!found) throw ParseError(std::string("unexpected character '") + c + "'", line, col);
    }
    out.push_back(std::move(t));
  }
  Token end;
  end.line = line;
  end.column = col;
  out.push_back(end);
  return out;
}

bool is_modifier(std::string_view s) {
  return s == "public" || s == "private" || s == "protected" || s == "static" || s == "final" ||
         s == "synchronized" || s == "abstract" || s == "native" || s == "strictfp";
}

bool is_keyword(std::string_view s) {
  static constexpr std::string_view kws[] = {"if",  "else",   "while", "do",       "for",   "return", "try",
                                             "catch", "finally", "throw", "new",     "break", "continue",
                                             "true",  "false",   "null",  "this",    "switch", "case",
                                             "default", "class", "instanceof", "super", "throws", "void"};
  for (auto k : kws)
    if (s == k) return true;
  return false;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  Method method() {
    Method m;
    while (peek().kind == Tok::Punct && peek().text == "@") unsupported("annotations");
    while (peek().kind == Tok::Ident && is_modifier(peek().text)) ++pos_;
    if (peek_is("<")) unsupported("generic methods");
    m.line = peek().line;
    if (peek_is("void")) {
      ++pos_;
      m.return_type = "void";
    } else {
      m.return_type = type();
    }
    m.name = ident("method name");
    expect("(");
    if (!peek_is(")")) {
      do {
        while (peek_is("final")) ++pos_;
        Param p;
        p.type = type();
        if (peek_is("...")) unsupported("varargs parameters");
        p.name = ident("parameter name");
        m.params.push_back(std::move(p));
      } while (accept(","));
    }
    expect(")");
    if (accept("throws")) {
      do type();
      while (accept(","));
    }
    m.body = block();
    if (peek().kind != Tok::End) fail("expected end of input after the method body");
    return m;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  bool peek_is(std::string_view text, std::size_t ahead = 0) const {
    const Token& t = peek(ahead);
    return (t.kind == Tok::Punct || t.kind == Tok::Ident) && t.text == text;
  }
  bool accept(std::string_view text) {
    if (!peek_is(text)) return false;
    ++pos_;
    return true;
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg, peek().line, peek().column);
  }
  [[noreturn]] void unsupported(const std::string& what) const {
    throw UnsupportedConstruct("unsupported construct: " + what + " (line " + std::to_string(peek().line) +
                               ", column " + std::to_string(peek().column) + ")");
  }
  void expect(std::string_view text) {
    if (!accept(text)) {
      const Token& t = peek();
      fail("expected '" + std::string(text) + "' but found " +
           (t.kind == Tok::End ? std::string("end of input") : "'" + t.text + "'"));
    }
  }
  std::string ident(const char* what) {
    const Token& t = peek();
    if (t.kind != Tok::Ident || is_keyword(t.text)) fail(std::string("expected ") + what);
    ++pos_;
    return t.text;
  }

  // Type := Ident ('.' Ident)* ('[' ']')*, with generics rejected.
  std::string type() {
    std::string t = ident("type name");
    while (peek_is(".") && peek(1).kind == Tok::Ident) {
      pos_ += 2;
      t += "." + toks_[pos_ - 1].text;
    }
    if (peek_is("<")) unsupported("generic type arguments");
    if (peek_is("[")) unsupported("arrays");
    return t;
  }

  // Looks ahead for `Type Ident` followed by '=' or ';' at the current position.
  bool at_declaration() const {
    std::size_t k = 0;
    while (peek(k).kind == Tok::Ident && peek(k).text == "final") ++k;
    if (peek(k).kind != Tok::Ident || is_keyword(peek(k).text)) return false;
    ++k;
    while (peek_is(".", k) && peek(k + 1).kind == Tok::Ident) k += 2;
    if (peek_is("<", k) || peek_is("[", k)) {
      // `List<String> xs` or `int[] a`: only a declaration if an identifier
      // eventually follows the closing bracket.
      std::size_t j = k;
      int depth = 0;
      do {
        if (peek_is("<", j) || peek_is("[", j)) ++depth;
        if (peek_is(">", j) || peek_is("]", j)) --depth;
        if (peek_is(">>", j)) depth -= 2;
        if (peek(j).kind == Tok::End || peek_is(";", j) || peek_is("(", j)) return false;
        ++j;
      } while (depth > 0);
      return peek(j).kind == Tok::Ident && !is_keyword(peek(j).text);
    }
    if (peek(k).kind != Tok::Ident || is_keyword(peek(k).text)) return false;
    return peek_is("=", k + 1) || peek_is(";", k + 1) || peek_is(",", k + 1) || peek_is(":", k + 1);
  }

  StmtPtr make(Stmt::Kind kind, const Token& at) {
    auto s = std::make_unique<Stmt>();
    s->kind = kind;
    s->line = at.line;
    s->column = at.column;
    return s;
  }

  StmtPtr block() {
    const Token at = peek();
    expect("{");
    auto s = make(Stmt::Kind::Block, at);
    while (!peek_is("}")) {
      if (peek().kind == Tok::End) fail("expected '}' before end of input");
      s->body.push_back(statement());
    }
    expect("}");
    return s;
  }

  StmtPtr declaration() {
    const Token at = peek();
    while (accept("final")) {
    }
    auto s = make(Stmt::Kind::Decl, at);
    s->type = type();
    s->name = ident("variable name");
    if (peek_is(",")) unsupported("multiple declarators in one declaration");
    if (peek_is(":")) unsupported("enhanced for loops");
    if (accept("=")) s->value = expression();
    return s;
  }

  // Assignment or expression statement, without the trailing ';'.
  StmtPtr simple_statement() {
    const Token at = peek();
    if (at_declaration()) return declaration();
    if (peek().kind == Tok::Ident && !is_keyword(peek().text)) {
      const Token& op = peek(1);
      if (op.kind == Tok::Punct &&
          (op.text == "=" || op.text == "+=" || op.text == "-=" || op.text == "*=" || op.text == "/=" ||
           op.text == "%=")) {
        auto s = make(Stmt::Kind::Assign, at);
        s->name = at.text;
        pos_ += 2;
        if (op.text != "=") s->op = op.text.substr(0, 1);
        s->value = expression();
        return s;
      }
      if (op.kind == Tok::Punct && (op.text == "++" || op.text == "--")) {
        auto s = make(Stmt::Kind::Assign, at);
        s->name = at.text;
        pos_ += 2;
        s->op = op.text.substr(0, 1);
        s->value = literal_expr("1", "int", at);
        return s;
      }
      if (op.kind == Tok::Punct && (op.text == "&=" || op.text == "|=" || op.text == "^=" || op.text == "<<=" ||
                                    op.text == ">>=" || op.text == ">>>="))
        unsupported("bitwise compound assignment");
    }
    if (peek_is("++") || peek_is("--")) {
      const std::string op = peek().text.substr(0, 1);
      ++pos_;
      const Token name_tok = peek();
      auto s = make(Stmt::Kind::Assign, at);
      s->name = ident("variable name");
      s->op = op;
      s->value = literal_expr("1", "int", name_tok);
      return s;
    }
    auto s = make(Stmt::Kind::Expr, at);
    s->value = expression();
    if (peek_is("=")) unsupported("field or array writes");
    const auto k = s->value->kind;
    if (k != Expr::Kind::Call && k != Expr::Kind::New)
      throw ParseError("not a statement", at.line, at.column);
    return s;
  }

  StmtPtr statement() {
    const Token at = peek();
    if (peek_is("{")) return block();
    if (accept(";")) return make(Stmt::Kind::Nothing, at);
    if (peek_is("if")) {
      ++pos_;
      auto s = make(Stmt::Kind::If, at);
      expect("(");
      s->value = expression();
      expect(")");
      s->body.push_back(statement());
      if (accept("else")) s->body.push_back(statement());
      return s;
    }
    if (peek_is("while")) {
      ++pos_;
      auto s = make(Stmt::Kind::While, at);
      expect("(");
      s->value = expression();
      expect(")");
      s->body.push_back(statement());
      return s;
    }
    if (peek_is("do")) {
      ++pos_;
      auto s = make(Stmt::Kind::DoWhile, at);
      s->body.push_back(statement());
      expect("while");
      expect("(");
      s->value = expression();
      expect(")");
      expect(";");
      return s;
    }
    if (peek_is("for")) {
      ++pos_;
      auto s = make(Stmt::Kind::For, at);
      expect("(");
      if (!peek_is(";")) s->init = simple_statement();
      expect(";");
      if (!peek_is(";")) s->value = expression();
      expect(";");
      if (!peek_is(")")) s->update = simple_statement();
      expect(")");
      s->body.push_back(statement());
      return s;
    }
    if (peek_is("return")) {
      ++pos_;
      auto s = make(Stmt::Kind::Return, at);
      if (!peek_is(";")) s->value = expression();
      expect(";");
      return s;
    }
    if (peek_is("throw")) {
      ++pos_;
      auto s = make(Stmt::Kind::Throw, at);
      s->value = expression();
      expect(";");
      return s;
    }
    if (peek_is("try")) {
      ++pos_;
      auto s = make(Stmt::Kind::Try, at);
      if (peek_is("(")) unsupported("try-with-resources");
      s->body.push_back(block());
      while (peek_is("catch")) {
        CatchClause c;
        c.line = peek().line;
        ++pos_;
        expect("(");
        while (accept("final")) {
        }
        c.type = type();
        if (peek_is("|")) unsupported("multi-catch");
        c.name = ident("exception variable name");
        expect(")");
        c.body = block();
        s->catches.push_back(std::move(c));
      }
      if (accept("finally")) s->finally_block = block();
      if (s->catches.empty() && !s->finally_block) fail("expected 'catch' or 'finally'");
      return s;
    }
    if (peek_is("break") || peek_is("continue")) {
      ++pos_;
      if (peek().kind == Tok::Ident) unsupported("labeled jumps");
      expect(";");
      return make(Stmt::Kind::Nothing, at);
    }
    if (peek_is("switch")) unsupported("switch statements");
    if (peek_is("class")) unsupported("local classes");
    if (peek_is("synchronized")) unsupported("synchronized blocks");
    auto s = simple_statement();
    expect(";");
    return s;
  }

  ExprPtr make_expr(Expr::Kind kind, const Token& at) {
    auto e = std::make_unique<Expr>();
    e->kind = kind;
    e->line = at.line;
    e->column = at.column;
    return e;
  }

  ExprPtr literal_expr(std::string value, std::string type, const Token& at) {
    auto e = make_expr(Expr::Kind::Literal, at);
    e->text = std::move(value);
    e->type = std::move(type);
    return e;
  }

  ExprPtr binary(const Token& at, std::string op, ExprPtr l, ExprPtr r) {
    auto e = make_expr(Expr::Kind::Binary, at);
    e->text = std::move(op);
    e->args.push_back(std::move(l));
    e->args.push_back(std::move(r));
    return e;
  }

  ExprPtr expression() {
    auto e = logical_or();
    if (peek_is("?")) unsupported("conditional expressions");
    if (peek_is("->")) unsupported("lambda expressions");
    if (peek_is("=") || peek_is("+=") || peek_is("-=")) {
      if (e->kind == Expr::Kind::Field) unsupported("field writes");
      if (e->kind != Expr::Kind::Name) fail("invalid assignment target");
    }
    return e;
  }

  ExprPtr logical_or() {
    auto l = logical_and();
    while (peek_is("||")) {
      const Token at = peek();
      ++pos_;
      l = binary(at, "||", std::move(l), logical_and());
    }
    return l;
  }

  ExprPtr logical_and() {
    auto l = equality();
    while (peek_is("&&")) {
      const Token at = peek();
      ++pos_;
      l = binary(at, "&&", std::move(l), equality());
    }
    if (peek_is("&") || peek_is("|") || peek_is("^")) unsupported("bitwise operators");
    return l;
  }

  ExprPtr equality() {
    auto l = relational();
    while (peek_is("==") || peek_is("!=")) {
      const Token at = peek();
      ++pos_;
      l = binary(at, at.text, std::move(l), relational());
    }
    return l;
  }

  ExprPtr relational() {
    auto l = additive();
    while (peek_is("<") || peek_is("<=") || peek_is(">") || peek_is(">=")) {
      const Token at = peek();
      ++pos_;
      l = binary(at, at.text, std::move(l), additive());
    }
    if (peek_is("instanceof")) unsupported("instanceof");
    if (peek_is("<<") || peek_is(">>") || peek_is(">>>")) unsupported("shift operators");
    return l;
  }

  ExprPtr additive() {
    auto l = multiplicative();
    while (peek_is("+") || peek_is("-")) {
      const Token at = peek();
      ++pos_;
      l = binary(at, at.text, std::move(l), multiplicative());
    }
    return l;
  }

  ExprPtr multiplicative() {
    auto l = unary();
    while (peek_is("*") || peek_is("/") || peek_is("%")) {
      const Token at = peek();
      ++pos_;
      l = binary(at, at.text, std::move(l), unary());
    }
    return l;
  }

  ExprPtr unary() {
    const Token at = peek();
    if (accept("!")) {
      auto e = make_expr(Expr::Kind::Unary, at);
      e->text = "!";
      e->args.push_back(unary());
      return e;
    }
    if (accept("-")) {
      const Token& n = peek();
      if (n.kind == Tok::Int || n.kind == Tok::Long || n.kind == Tok::Double) {
        auto lit = postfix();
        if (lit->kind == Expr::Kind::Literal) {
          lit->text = "-" + lit->text;
          return lit;
        }
        auto e = make_expr(Expr::Kind::Unary, at);
        e->text = "-";
        e->args.push_back(std::move(lit));
        return e;
      }
      auto e = make_expr(Expr::Kind::Unary, at);
      e->text = "-";
      e->args.push_back(unary());
      return e;
    }
    if (peek_is("+")) {
      ++pos_;
      return unary();
    }
    if (peek_is("~")) unsupported("bitwise operators");
    if (peek_is("++") || peek_is("--")) unsupported("increment inside an expression");
    return postfix();
  }

  std::vector<ExprPtr> arguments() {
    std::vector<ExprPtr> args;
    expect("(");
    if (!peek_is(")")) {
      do {
        if (peek().kind == Tok::Ident && peek_is("->", 1)) unsupported("lambda expressions");
        args.push_back(expression());
      } while (accept(","));
    }
    expect(")");
    return args;
  }

  ExprPtr postfix() {
    auto e = primary();
    for (;;) {
      if (peek_is(".")) {
        const Token at = peek();
        ++pos_;
        if (peek_is("<")) unsupported("explicit generic method calls");
        std::string name = ident("member name");
        if (peek_is("(")) {
          auto call = make_expr(Expr::Kind::Call, at);
          call->text = std::move(name);
          call->receiver = std::move(e);
          call->args = arguments();
          e = std::move(call);
        } else {
          auto field = make_expr(Expr::Kind::Field, at);
          field->text = std::move(name);
          field->receiver = std::move(e);
          e = std::move(field);
        }
        continue;
      }
      if (peek_is("[")) unsupported("array access");
      if (peek_is("::")) unsupported("method references");
      if (peek_is("++") || peek_is("--")) unsupported("increment inside an expression");
      return e;
    }
  }

  ExprPtr primary() {
    const Token at = peek();
    switch (at.kind) {
      case Tok::Int:
        ++pos_;
        return literal_expr(at.text, "int", at);
      case Tok::Long:
        ++pos_;
        return literal_expr(at.text, "long", at);
      case Tok::Double:
        ++pos_;
        return literal_expr(at.text, "double", at);
      case Tok::String:
        ++pos_;
        return literal_expr(at.text, "String", at);
      case Tok::Char:
        ++pos_;
        return literal_expr(at.text, "char", at);
      case Tok::End:
        fail("unexpected end of input in expression");
      default:
        break;
    }
    if (at.kind == Tok::Ident) {
      if (at.text == "true" || at.text == "false") {
        ++pos_;
        return literal_expr(at.text, "boolean", at);
      }
      if (at.text == "null") {
        ++pos_;
        return literal_expr("null", "", at);
      }
      if (at.text == "this") {
        ++pos_;
        auto e = make_expr(Expr::Kind::Name, at);
        e->text = "this";
        return e;
      }
      if (at.text == "super") unsupported("super references");
      if (at.text == "new") {
        ++pos_;
        auto e = make_expr(Expr::Kind::New, at);
        e->text = type();
        if (peek_is("[")) unsupported("array creation");
        if (!peek_is("(")) fail("expected '(' after constructor type");
        e->args = arguments();
        if (peek_is("{")) unsupported("anonymous classes");
        return e;
      }
      if (is_keyword(at.text)) fail("unexpected keyword '" + at.text + "'");
      ++pos_;
      if (peek_is("->")) unsupported("lambda expressions");
      if (peek_is("(")) {
        auto e = make_expr(Expr::Kind::Call, at);
        e->text = at.text;
        e->args = arguments();
        return e;
      }
      auto e = make_expr(Expr::Kind::Name, at);
      e->text = at.text;
      return e;
    }
    if (at.text == "(") {
      // `(Type) expr` is a cast; `(a) -> ...` and `() -> ...` are lambdas.
      if (peek_is(")", 1)) unsupported("lambda expressions");
      if (peek(1).kind == Tok::Ident && peek_is(")", 2)) {
        const Token& after = peek(3);
        if (after.kind == Tok::Punct && after.text == "->") unsupported("lambda expressions");
        const bool castable = after.kind == Tok::Ident || after.kind == Tok::Int || after.kind == Tok::Long ||
                              after.kind == Tok::Double || after.kind == Tok::String || after.kind == Tok::Char ||
                              (after.kind == Tok::Punct && (after.text == "(" || after.text == "!"));
        if (castable && !is_keyword(peek(1).text)) unsupported("casts");
      }
      ++pos_;
      auto e = expression();
      expect(")");
      return e;
    }
    if (at.text == "@") unsupported("annotations");
    if (at.text == "{") unsupported("array initializers");
    fail("unexpected '" + at.text + "' in expression");
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

}  // namespace

Method parse_method(const std::string& source) { return Parser(lex(source)).method(); }

}  // namespace rulesynth::frontend
