#pragma once

#include "mcp/lie.hpp"

#include <charconv>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mcp {

struct Location {
  std::size_t line = 1;
  std::size_t column = 1;
};

/// Lexical, syntactic and reference errors in instance files, all located.
class ParseError : public std::runtime_error {
 public:
  enum class Kind { lexical, syntax, reference, semantic };

  ParseError(Kind kind, Location where, std::string message, std::vector<std::string> expected = {})
      : std::runtime_error(format(kind, where, message, expected)),
        kind(kind), where(where), message(std::move(message)), expected(std::move(expected)) {}

  Kind kind;
  Location where;
  std::string message;
  std::vector<std::string> expected;

 private:
  static std::string format(Kind kind, Location where, const std::string& msg, const std::vector<std::string>& expected) {
    static constexpr const char* names[] = {"lexical error", "syntax error", "reference error", "semantic error"};
    std::ostringstream os;
    os << "line " << where.line << ", column " << where.column << ": " << names[static_cast<int>(kind)] << ": " << msg;
    if (!expected.empty()) {
      os << " (expected ";
      for (std::size_t i = 0; i < expected.size(); ++i) os << (i ? ", " : "") << expected[i];
      os << ')';
    }
    return os.str();
  }
};

struct InstanceConfig {
  std::optional<Rational> kappa;
  std::optional<double> tol;
  friend bool operator==(const InstanceConfig&, const InstanceConfig&) = default;
};

/// Parsed `.cps` instance: an algebra with its structure equations, and
/// optionally a pair, a metric, a structure tensor and configuration.
struct InstanceSpec {
  std::string name;
  std::vector<std::string> basis;       // coframe names
  std::vector<Form> differentials;      // dω_k for every k
  std::optional<std::pair<Form, Form>> pair;
  std::optional<QMatrix> metric;
  std::optional<QMatrix> phi;           // column i is φ(X_i)
  InstanceConfig config;

  std::size_t dim() const { return basis.size(); }
  friend bool operator==(const InstanceSpec&, const InstanceSpec&) = default;
};

inline std::vector<std::string> frame_names(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back("X" + std::to_string(i + 1));
  return out;
}

/// "X1", "1/2 X5 - X6", or "0".
inline std::string render_vector(const Vector& v) {
  Form f(v.size(), 1);
  for (std::size_t i = 0; i < v.size(); ++i) f.accumulate({i}, v[i]);
  return render(f, frame_names(v.size()));
}

namespace dsl {

inline constexpr std::size_t max_dimension = 20;

enum class Tok { ident, integer, floating, symbol, arrow, end };

struct Token {
  Tok kind = Tok::end;
  std::string text;
  Location loc;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  Token next() {
    skip_space();
    Token t;
    t.loc = here();
    if (pos_ >= src_.size()) return t;
    char c = src_[pos_];
    if (is_alpha(c)) {
      std::size_t start = pos_;
      while (pos_ < src_.size() && (is_alpha(src_[pos_]) || is_digit(src_[pos_]))) advance();
      t.kind = Tok::ident;
      t.text = std::string(src_.substr(start, pos_ - start));
      return t;
    }
    if (is_digit(c) || (c == '.' && pos_ + 1 < src_.size() && is_digit(src_[pos_ + 1]))) {
      std::size_t start = pos_;
      bool fractional = false;
      while (pos_ < src_.size() && is_digit(src_[pos_])) advance();
      if (pos_ < src_.size() && src_[pos_] == '.') {
        fractional = true;
        advance();
        while (pos_ < src_.size() && is_digit(src_[pos_])) advance();
      }
      if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
        std::size_t save = pos_;
        Location save_loc = here();
        advance();
        if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) advance();
        if (pos_ < src_.size() && is_digit(src_[pos_])) {
          fractional = true;
          while (pos_ < src_.size() && is_digit(src_[pos_])) advance();
        } else {
          pos_ = save;
          line_ = save_loc.line;
          col_ = save_loc.column;
        }
      }
      if (pos_ < src_.size() && is_alpha(src_[pos_]))
        throw ParseError(ParseError::Kind::lexical, here(), "malformed number");
      t.kind = fractional ? Tok::floating : Tok::integer;
      t.text = std::string(src_.substr(start, pos_ - start));
      return t;
    }
    if (c == '-' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '>') {
      advance();
      advance();
      t.kind = Tok::arrow;
      t.text = "->";
      return t;
    }
    static constexpr std::string_view symbols = "{};=+-^*/()";
    if (symbols.find(c) != std::string_view::npos) {
      advance();
      t.kind = Tok::symbol;
      t.text = std::string(1, c);
      return t;
    }
    std::string shown = (static_cast<unsigned char>(c) < 0x20 || static_cast<unsigned char>(c) >= 0x7f)
                            ? "byte 0x" + hex(static_cast<unsigned char>(c))
                            : "'" + std::string(1, c) + "'";
    throw ParseError(ParseError::Kind::lexical, here(), "unexpected character " + shown);
  }

  /// Raw instance name: letters, digits, '_', '-', '.'.
  Token name() {
    skip_space();
    Token t;
    t.loc = here();
    std::size_t start = pos_;
    while (pos_ < src_.size() && (is_alpha(src_[pos_]) || is_digit(src_[pos_]) || src_[pos_] == '-' || src_[pos_] == '.'))
      advance();
    if (pos_ == start) throw ParseError(ParseError::Kind::syntax, t.loc, "missing algebra name", {"name"});
    t.kind = Tok::ident;
    t.text = std::string(src_.substr(start, pos_ - start));
    return t;
  }

 private:
  static bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }
  static bool is_digit(char c) { return c >= '0' && c <= '9'; }
  static std::string hex(unsigned char c) {
    static constexpr char digits[] = "0123456789abcdef";
    return {digits[c >> 4], digits[c & 15]};
  }

  Location here() const { return {line_, col_}; }
  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }
  void skip_space() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else {
        break;
      }
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1, col_ = 1;
};

struct Expr {
  enum class Op { number, name, neg, add, sub, mul, sym, wedge };
  Op op = Op::number;
  Location loc;
  Rational value;
  std::string name;
  std::unique_ptr<Expr> lhs, rhs;
};

using ExprPtr = std::unique_ptr<Expr>;

/// Value of an elaborated expression.
struct Value {
  enum class Kind { scalar, form, sym2, vector };
  Kind kind = Kind::scalar;
  Rational scalar;
  Form form;
  QMatrix sym2;
  Vector vec;
};

inline const char* describe(const Value& v) {
  switch (v.kind) {
    case Value::Kind::scalar: return "a scalar";
    case Value::Kind::form:
      switch (v.form.degree()) {
        case 0: return "a 0-form";
        case 1: return "a 1-form";
        case 2: return "a 2-form";
        default: return "a higher-degree form";
      }
    case Value::Kind::sym2: return "a symmetric 2-tensor";
    case Value::Kind::vector: return "a frame vector";
  }
  return "a value";
}

class Parser {
 public:
  explicit Parser(std::string_view src) : lex_(src) { tok_ = lex_.next(); }

  InstanceSpec parse() {
    InstanceSpec spec;
    std::set<std::string> seen;
    bool have_algebra = false;
    while (tok_.kind != Tok::end) {
      if (tok_.kind != Tok::ident) syntax("expected a block keyword", {"algebra", "pair", "metric", "phi", "config"});
      std::string kw = tok_.text;
      Location kw_loc = tok_.loc;
      if (kw != "algebra" && kw != "pair" && kw != "metric" && kw != "phi" && kw != "config")
        syntax("unknown block '" + kw + "'", {"algebra", "pair", "metric", "phi", "config"});
      if (!seen.insert(kw).second) throw ParseError(ParseError::Kind::semantic, kw_loc, "duplicate '" + kw + "' block");
      if (kw != "algebra" && !have_algebra)
        throw ParseError(ParseError::Kind::reference, kw_loc, "'" + kw + "' block before the algebra is declared");
      if (kw == "algebra") {
        // the name is scanned raw, before the keyword token is consumed
        Token name = lex_.name();
        spec.name = name.text;
        tok_ = lex_.next();
        parse_algebra(spec);
        have_algebra = true;
      } else {
        advance();
        if (kw == "pair") parse_pair(spec);
        else if (kw == "metric") parse_metric(spec);
        else if (kw == "phi") parse_phi(spec);
        else parse_config(spec);
      }
    }
    if (!have_algebra) throw ParseError(ParseError::Kind::syntax, tok_.loc, "missing algebra block", {"algebra"});
    return spec;
  }

 private:
  // ---- token helpers -----------------------------------------------------

  void advance() {
    prev_line_ = tok_.loc.line;
    tok_ = lex_.next();
  }
  bool is_sym(const char* s) const { return tok_.kind == Tok::symbol && tok_.text == s; }
  [[noreturn]] void syntax(const std::string& msg, std::vector<std::string> expected = {}) const {
    throw ParseError(ParseError::Kind::syntax, tok_.loc, msg + ", found " + show(tok_), std::move(expected));
  }
  static std::string show(const Token& t) {
    if (t.kind == Tok::end) return "end of input";
    return "'" + t.text + "'";
  }
  void expect_sym(const char* s) {
    if (!is_sym(s)) syntax(std::string("expected '") + s + "'", {std::string("'") + s + "'"});
    advance();
  }
  Token expect_ident(const std::string& what) {
    if (tok_.kind != Tok::ident) syntax("expected " + what, {what});
    Token t = tok_;
    advance();
    return t;
  }

  /// Runs `stmt` for each statement of a `{ ... }` block; statements are
  /// separated by ';' and a trailing ';' is optional.
  template <class F>
  void statements(F&& stmt) {
    expect_sym("{");
    while (true) {
      while (is_sym(";")) advance();
      if (is_sym("}")) {
        advance();
        return;
      }
      if (tok_.kind == Tok::end) syntax("unterminated block", {"'}'"});
      stmt();
      if (is_sym("}")) continue;
      if (!is_sym(";")) syntax("expected ';' or '}' after statement", {"';'", "'}'"});
    }
  }

  // ---- blocks ------------------------------------------------------------

  void parse_algebra(InstanceSpec& spec) {
    std::optional<std::size_t> dim;
    Location dim_loc;
    std::vector<std::optional<Form>> eqs;
    statements([&] {
      Token kw = expect_ident("'dim', 'basis' or 'd'");
      if (kw.text == "dim") {
        if (dim) throw ParseError(ParseError::Kind::semantic, kw.loc, "duplicate 'dim'");
        if (tok_.kind != Tok::integer) syntax("expected a positive integer dimension", {"integer"});
        dim_loc = tok_.loc;
        std::size_t n = 0;
        auto [p, ec] = std::from_chars(tok_.text.data(), tok_.text.data() + tok_.text.size(), n);
        if (ec != std::errc() || n == 0 || n > max_dimension)
          throw ParseError(ParseError::Kind::semantic, tok_.loc,
                           "dimension must be between 1 and " + std::to_string(max_dimension));
        dim = n;
        advance();
      } else if (kw.text == "basis") {
        if (!dim) throw ParseError(ParseError::Kind::reference, kw.loc, "'basis' before 'dim'");
        if (!spec.basis.empty()) throw ParseError(ParseError::Kind::semantic, kw.loc, "duplicate 'basis'");
        while (tok_.kind == Tok::ident) {
          const std::string& nm = tok_.text;
          if (nm == "dim" || nm == "basis" || nm == "d" || is_frame_name(nm))
            throw ParseError(ParseError::Kind::semantic, tok_.loc, "'" + nm + "' cannot be used as a coframe name");
          for (const auto& b : spec.basis)
            if (b == nm) throw ParseError(ParseError::Kind::semantic, tok_.loc, "duplicate coframe name '" + nm + "'");
          spec.basis.push_back(nm);
          advance();
        }
        if (spec.basis.size() != *dim)
          throw ParseError(ParseError::Kind::semantic, kw.loc,
                           "basis lists " + std::to_string(spec.basis.size()) + " names but dim is " + std::to_string(*dim));
        eqs.assign(*dim, std::nullopt);
        coframe_ = spec.basis;
      } else if (kw.text == "d") {
        if (spec.basis.empty()) throw ParseError(ParseError::Kind::reference, kw.loc, "structure equation before 'basis'");
        Token target = expect_ident("coframe name");
        std::size_t k = coframe_index(target);
        if (eqs[k]) throw ParseError(ParseError::Kind::semantic, target.loc, "second equation for d " + target.text);
        expect_sym("=");
        Location at = tok_.loc;
        eqs[k] = as_form(eval(*expression(), false), 2, at);
      } else {
        throw ParseError(ParseError::Kind::syntax, kw.loc, "unknown algebra statement '" + kw.text + "'",
                         {"dim", "basis", "d"});
      }
    });
    if (!dim) throw ParseError(ParseError::Kind::syntax, tok_.loc, "algebra block has no 'dim'", {"dim"});
    if (spec.basis.empty()) throw ParseError(ParseError::Kind::syntax, tok_.loc, "algebra block has no 'basis'", {"basis"});
    for (std::size_t k = 0; k < *dim; ++k) spec.differentials.push_back(eqs[k] ? *eqs[k] : Form(*dim, 2));
  }

  void parse_pair(InstanceSpec& spec) {
    std::optional<Form> a1, a2;
    Location open = tok_.loc;
    statements([&] {
      Token kw = expect_ident("'alpha1' or 'alpha2'");
      std::optional<Form>* slot = kw.text == "alpha1" ? &a1 : kw.text == "alpha2" ? &a2 : nullptr;
      if (!slot) throw ParseError(ParseError::Kind::syntax, kw.loc, "unknown pair statement '" + kw.text + "'", {"alpha1", "alpha2"});
      if (*slot) throw ParseError(ParseError::Kind::semantic, kw.loc, "duplicate " + kw.text);
      expect_sym("=");
      Location at = tok_.loc;
      *slot = as_form(eval(*expression(), false), 1, at);
    });
    if (!a1 || !a2) throw ParseError(ParseError::Kind::syntax, open, "pair block needs both alpha1 and alpha2", {"alpha1", "alpha2"});
    spec.pair = std::pair{*a1, *a2};
  }

  void parse_metric(InstanceSpec& spec) {
    bool done = false;
    statements([&] {
      if (done) syntax("metric block holds a single expression", {"'}'"});
      Location at = tok_.loc;
      Value v = eval(*expression(), false);
      if (v.kind != Value::Kind::sym2)
        throw ParseError(ParseError::Kind::semantic, at,
                         std::string("metric must be a sum of q wi*wj terms, got ") + describe(v));
      spec.metric = v.sym2;
      done = true;
    });
    if (!done) throw ParseError(ParseError::Kind::syntax, tok_.loc, "empty metric block");
  }

  void parse_phi(InstanceSpec& spec) {
    const std::size_t n = coframe_.size();
    QMatrix phi(n, n);
    std::vector<bool> set(n, false);
    statements([&] {
      Token src = expect_ident("frame vector X<i>");
      std::size_t i = frame_index(src);
      if (set[i]) throw ParseError(ParseError::Kind::semantic, src.loc, "second image for " + src.text);
      set[i] = true;
      if (tok_.kind != Tok::arrow) syntax("expected '->'", {"'->'"});
      advance();
      Location at = tok_.loc;
      Value v = eval(*expression(), true);
      Vector img(n);
      if (v.kind == Value::Kind::vector) img = v.vec;
      else if (!(v.kind == Value::Kind::scalar && v.scalar == 0))
        throw ParseError(ParseError::Kind::semantic, at, std::string("phi image must be a frame vector, got ") + describe(v));
      for (std::size_t r = 0; r < n; ++r) phi(r, i) = img[r];
    });
    spec.phi = phi;
  }

  void parse_config(InstanceSpec& spec) {
    statements([&] {
      Token kw = expect_ident("'kappa' or 'tol'");
      if (kw.text == "kappa") {
        if (spec.config.kappa) throw ParseError(ParseError::Kind::semantic, kw.loc, "duplicate kappa");
        expect_sym("=");
        Location at = tok_.loc;
        Value v = eval(*expression(), false);
        if (v.kind != Value::Kind::scalar) throw ParseError(ParseError::Kind::semantic, at, "kappa must be a rational number");
        if (v.scalar <= 0) throw ParseError(ParseError::Kind::semantic, at, "kappa must be positive");
        spec.config.kappa = v.scalar;
      } else if (kw.text == "tol") {
        if (spec.config.tol) throw ParseError(ParseError::Kind::semantic, kw.loc, "duplicate tol");
        expect_sym("=");
        if (tok_.kind != Tok::floating && tok_.kind != Tok::integer) syntax("expected a number", {"number"});
        double t = 0;
        auto [p, ec] = std::from_chars(tok_.text.data(), tok_.text.data() + tok_.text.size(), t);
        if (ec != std::errc() || !(t > 0))
          throw ParseError(ParseError::Kind::semantic, tok_.loc, "tol must be a positive number");
        spec.config.tol = t;
        advance();
      } else {
        throw ParseError(ParseError::Kind::syntax, kw.loc, "unknown config key '" + kw.text + "'", {"kappa", "tol"});
      }
    });
  }

  // ---- expressions -------------------------------------------------------

  ExprPtr node(Expr::Op op, Location loc, ExprPtr l = nullptr, ExprPtr r = nullptr) {
    auto e = std::make_unique<Expr>();
    e->op = op;
    e->loc = loc;
    e->lhs = std::move(l);
    e->rhs = std::move(r);
    return e;
  }

  // expr := term (('+' | '-') term)*
  ExprPtr expression() {
    ExprPtr left = term();
    while (is_sym("+") || is_sym("-")) {
      Expr::Op op = is_sym("+") ? Expr::Op::add : Expr::Op::sub;
      Location at = tok_.loc;
      advance();
      left = node(op, at, std::move(left), term());
    }
    return left;
  }

  bool starts_factor() const {
    return tok_.kind == Tok::ident || tok_.kind == Tok::integer || tok_.kind == Tok::floating || is_sym("(");
  }

  // term := factor (('^' | '*' | juxtaposition) factor)*; juxtaposition only on the same line
  ExprPtr term() {
    ExprPtr left = factor();
    while (true) {
      Location at = tok_.loc;
      if (is_sym("^")) {
        advance();
        left = node(Expr::Op::wedge, at, std::move(left), factor());
      } else if (is_sym("*")) {
        advance();
        left = node(Expr::Op::sym, at, std::move(left), factor());
      } else if (starts_factor() && tok_.loc.line == prev_line_) {
        left = node(Expr::Op::mul, at, std::move(left), factor());
      } else {
        return left;
      }
    }
  }

  // factor := '-' factor | integer ['/' integer] | name | '(' expr ')'
  ExprPtr factor() {
    Location at = tok_.loc;
    if (is_sym("-")) {
      advance();
      return node(Expr::Op::neg, at, factor());
    }
    if (tok_.kind == Tok::floating)
      throw ParseError(ParseError::Kind::lexical, at, "floating-point literal '" + tok_.text + "' not allowed; use a rational like 1/2");
    if (tok_.kind == Tok::integer) {
      std::string num = tok_.text;
      advance();
      std::string den = "1";
      if (is_sym("/")) {
        advance();
        if (tok_.kind != Tok::integer) syntax("expected an integer denominator", {"integer"});
        den = tok_.text;
        if (Integer(den) == 0) throw ParseError(ParseError::Kind::semantic, tok_.loc, "zero denominator");
        advance();
      }
      auto e = node(Expr::Op::number, at);
      e->value = Rational(Integer(num), Integer(den));
      return e;
    }
    if (tok_.kind == Tok::ident) {
      auto e = node(Expr::Op::name, at);
      e->name = tok_.text;
      advance();
      return e;
    }
    if (is_sym("(")) {
      advance();
      ExprPtr inner = expression();
      expect_sym(")");
      return inner;
    }
    syntax("expected a number, a name or '('", {"number", "name", "'('"});
  }

  // ---- elaboration -------------------------------------------------------

  static bool is_frame_name(const std::string& s) {
    if (s.size() < 2 || s[0] != 'X') return false;
    for (std::size_t i = 1; i < s.size(); ++i)
      if (s[i] < '0' || s[i] > '9') return false;
    return true;
  }

  std::size_t coframe_index(const Token& t) const {
    for (std::size_t i = 0; i < coframe_.size(); ++i)
      if (coframe_[i] == t.text) return i;
    throw ParseError(ParseError::Kind::reference, t.loc, "undeclared coframe name '" + t.text + "'");
  }

  std::size_t frame_index(const Token& t) const {
    if (is_frame_name(t.text)) {
      std::size_t i = 0;
      auto [p, ec] = std::from_chars(t.text.data() + 1, t.text.data() + t.text.size(), i);
      if (ec == std::errc() && i >= 1 && i <= coframe_.size()) return i - 1;
    }
    throw ParseError(ParseError::Kind::reference, t.loc,
                     "undeclared frame vector '" + t.text + "' (frame is X1..X" + std::to_string(coframe_.size()) + ")");
  }

  static Value scalar(Rational r) {
    Value v;
    v.kind = Value::Kind::scalar;
    v.scalar = std::move(r);
    return v;
  }

  static void scale(Value& v, const Rational& s) {
    switch (v.kind) {
      case Value::Kind::scalar: v.scalar *= s; break;
      case Value::Kind::form: v.form *= s; break;
      case Value::Kind::sym2: v.sym2 *= s; break;
      case Value::Kind::vector: v.vec *= s; break;
    }
  }

  Value eval(const Expr& e, bool vectors) const {
    using Op = Expr::Op;
    const std::size_t n = coframe_.size();
    auto bad = [&](const std::string& msg) { return ParseError(ParseError::Kind::semantic, e.loc, msg); };
    switch (e.op) {
      case Op::number: return scalar(e.value);
      case Op::name: {
        Value v;
        Token t{Tok::ident, e.name, e.loc};
        if (vectors) {
          v.kind = Value::Kind::vector;
          v.vec = Vector::unit(n, frame_index(t));
        } else {
          v.kind = Value::Kind::form;
          v.form = Form::basis(n, coframe_index(t));
        }
        return v;
      }
      case Op::neg: {
        Value v = eval(*e.lhs, vectors);
        scale(v, -1);
        return v;
      }
      case Op::add:
      case Op::sub: {
        Value a = eval(*e.lhs, vectors), b = eval(*e.rhs, vectors);
        if (e.op == Op::sub) scale(b, -1);
        if (a.kind == Value::Kind::scalar && a.scalar == 0 && b.kind != Value::Kind::scalar) return b;
        if (b.kind == Value::Kind::scalar && b.scalar == 0 && a.kind != Value::Kind::scalar) return a;
        bool same = a.kind == b.kind && (a.kind != Value::Kind::form || a.form.degree() == b.form.degree());
        if (!same) throw bad(std::string("cannot add ") + describe(a) + " and " + describe(b));
        switch (a.kind) {
          case Value::Kind::scalar: a.scalar += b.scalar; break;
          case Value::Kind::form: a.form += b.form; break;
          case Value::Kind::sym2: a.sym2 += b.sym2; break;
          case Value::Kind::vector: a.vec += b.vec; break;
        }
        return a;
      }
      case Op::mul:
      case Op::sym:
      case Op::wedge: {
        Value a = eval(*e.lhs, vectors), b = eval(*e.rhs, vectors);
        if (a.kind == Value::Kind::scalar) {
          scale(b, a.scalar);
          return b;
        }
        if (b.kind == Value::Kind::scalar) {
          scale(a, b.scalar);
          return a;
        }
        if (e.op == Op::wedge && a.kind == Value::Kind::form && b.kind == Value::Kind::form) {
          if (a.form.degree() + b.form.degree() > n)
            throw bad("wedge of degree " + std::to_string(a.form.degree() + b.form.degree()) + " exceeds dimension " +
                      std::to_string(n));
          Value v;
          v.kind = Value::Kind::form;
          v.form = wedge(a.form, b.form);
          return v;
        }
        if (e.op == Op::sym && a.kind == Value::Kind::form && b.kind == Value::Kind::form && a.form.degree() == 1 &&
            b.form.degree() == 1) {
          Vector x = coefficients(a.form), y = coefficients(b.form);
          QMatrix m = QMatrix::outer(x, y);
          m += m.transpose();
          m *= make_rational(1, 2);
          Value v;
          v.kind = Value::Kind::sym2;
          v.sym2 = std::move(m);
          return v;
        }
        if (e.op == Op::mul) throw bad(std::string("missing operator between ") + describe(a) + " and " + describe(b));
        throw bad(std::string("operator '") + (e.op == Op::wedge ? "^" : "*") + "' cannot combine " + describe(a) +
                  " and " + describe(b));
      }
    }
    throw bad("unsupported expression");
  }

  Form as_form(const Value& v, std::size_t degree, Location at) const {
    const std::size_t n = coframe_.size();
    if (v.kind == Value::Kind::scalar && v.scalar == 0) return Form(n, degree);
    if (v.kind == Value::Kind::form && v.form.degree() == degree) return v.form;
    throw ParseError(ParseError::Kind::semantic, at,
                     "expected a " + std::to_string(degree) + "-form, got " + describe(v));
  }

  Lexer lex_;
  Token tok_;
  std::size_t prev_line_ = 0;
  std::vector<std::string> coframe_;
};

inline std::string render_double(double x) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, p);
}

inline std::string render_metric(const QMatrix& g, const std::vector<std::string>& names) {
  std::ostringstream os;
  bool first = true;
  for (std::size_t i = 0; i < g.rows(); ++i)
    for (std::size_t j = i; j < g.cols(); ++j) {
      Rational c = i == j ? g(i, j) : Rational(2 * g(i, j));
      if (c == 0) continue;
      Rational mag = c < 0 ? Rational(-c) : c;
      if (first) os << (c < 0 ? "-" : "");
      else os << (c < 0 ? " - " : " + ");
      first = false;
      if (mag != 1) os << to_string(mag) << ' ';
      os << names[i] << '*' << names[j];
    }
  if (first) os << '0';
  return os.str();
}

}  // namespace dsl

/// Parses a `.cps` instance. Throws ParseError with line and column.
inline InstanceSpec parse_instance(std::string_view text) { return dsl::Parser(text).parse(); }

/// Canonical `.cps` text; parse_instance(render_instance(s)) == s.
inline std::string render_instance(const InstanceSpec& s) {
  std::ostringstream os;
  os << "algebra " << s.name << " {\n";
  os << "  dim " << s.dim() << ";\n";
  os << "  basis";
  for (const auto& b : s.basis) os << ' ' << b;
  os << ";\n";
  for (std::size_t k = 0; k < s.dim(); ++k) os << "  d " << s.basis[k] << " = " << render(s.differentials[k], s.basis) << ";\n";
  os << "}\n";
  if (s.pair) {
    os << "pair {\n";
    os << "  alpha1 = " << render(s.pair->first, s.basis) << ";\n";
    os << "  alpha2 = " << render(s.pair->second, s.basis) << ";\n";
    os << "}\n";
  }
  if (s.metric) os << "metric {\n  " << dsl::render_metric(*s.metric, s.basis) << "\n}\n";
  if (s.phi) {
    os << "phi {\n";
    for (std::size_t i = 0; i < s.dim(); ++i) {
      Vector img = s.phi->column(i);
      if (!img.is_zero()) os << "  X" << i + 1 << " -> " << render_vector(img) << ";\n";
    }
    os << "}\n";
  }
  if (s.config.kappa || s.config.tol) {
    os << "config {\n";
    if (s.config.kappa) os << "  kappa = " << to_string(*s.config.kappa) << ";\n";
    if (s.config.tol) os << "  tol = " << dsl::render_double(*s.config.tol) << ";\n";
    os << "}\n";
  }
  return os.str();
}

/// Builds the certified Lie algebra; throws JacobiError.
inline LieAlgebra build_algebra(const InstanceSpec& s) {
  return LieAlgebra::from_structure_equations(s.basis, s.differentials);
}

}  // namespace mcp
