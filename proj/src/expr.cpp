#include "lightlike/expr.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>

namespace lightlike {

namespace {

struct Token {
  enum Kind { num, ident, plus, minus, star, slash, caret, lparen, rparen, end };
  Kind kind;
  std::string text;
  double value = 0.0;
  std::size_t offset = 0;  // 0-based
};

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return is_ident_start(c) || std::isdigit(static_cast<unsigned char>(c)); }

std::vector<Token> lex(const std::string& s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) { ++i; continue; }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      if (j < s.size() && s[j] == '.') {
        ++j;
        while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      }
      if (j < s.size() && (s[j] == 'e' || s[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < s.size() && (s[k] == '+' || s[k] == '-')) ++k;
        if (k < s.size() && std::isdigit(static_cast<unsigned char>(s[k]))) {
          ++k;
          while (k < s.size() && std::isdigit(static_cast<unsigned char>(s[k]))) ++k;
          j = k;
        }
      }
      Token t{Token::num, s.substr(i, j - i), 0.0, i};
      t.value = std::stod(t.text);
      out.push_back(std::move(t));
      i = j;
      continue;
    }
    if (is_ident_start(c)) {
      std::size_t j = i;
      while (j < s.size() && is_ident_char(s[j])) ++j;
      out.push_back({Token::ident, s.substr(i, j - i), 0.0, i});
      i = j;
      continue;
    }
    Token::Kind k;
    switch (c) {
      case '+': k = Token::plus; break;
      case '-': k = Token::minus; break;
      case '*': k = Token::star; break;
      case '/': k = Token::slash; break;
      case '^': k = Token::caret; break;
      case '(': k = Token::lparen; break;
      case ')': k = Token::rparen; break;
      default:
        throw ParseError(std::string("unknown token '") + c + "'", i + 1);
    }
    out.push_back({k, s.substr(i, 1), 0.0, i});
    ++i;
  }
  out.push_back({Token::end, "", 0.0, s.size()});
  return out;
}

ExprPtr make_node(Expr e) { return std::make_shared<const Expr>(std::move(e)); }

ExprPtr make_bin(Expr::Kind k, ExprPtr a, ExprPtr b) {
  Expr e;
  e.kind = k;
  e.begin = a->begin;
  e.end = b->end;
  e.a = std::move(a);
  e.b = std::move(b);
  return make_node(std::move(e));
}

ExprPtr make_const(double v, std::size_t begin = 0, std::size_t end = 0) {
  Expr e;
  e.kind = Expr::Kind::constant;
  e.value = v;
  e.begin = begin;
  e.end = end;
  return make_node(std::move(e));
}

std::optional<double> const_fold(const ExprPtr& e) {
  using K = Expr::Kind;
  switch (e->kind) {
    case K::constant: return e->value;
    case K::variable: return std::nullopt;
    case K::neg:
      if (auto a = const_fold(e->a)) return -*a;
      return std::nullopt;
    case K::add: case K::sub: case K::mul: case K::div: {
      auto a = const_fold(e->a), b = const_fold(e->b);
      if (!a || !b) return std::nullopt;
      switch (e->kind) {
        case K::add: return *a + *b;
        case K::sub: return *a - *b;
        case K::mul: return *a * *b;
        default:     return *b == 0.0 ? std::nullopt : std::optional<double>(*a / *b);
      }
    }
    case K::pow: {
      auto a = const_fold(e->a);
      if (!a) return std::nullopt;
      return std::pow(*a, double(e->pow_num) / double(e->pow_den));
    }
    case K::sqrt_fn: {
      auto a = const_fold(e->a);
      if (!a || *a < 0) return std::nullopt;
      return std::sqrt(*a);
    }
    case K::sin: case K::cos: case K::sinh: case K::cosh: {
      auto a = const_fold(e->a);
      if (!a) return std::nullopt;
      switch (e->kind) {
        case K::sin: return std::sin(*a);
        case K::cos: return std::cos(*a);
        case K::sinh: return std::sinh(*a);
        default: return std::cosh(*a);
      }
    }
  }
  return std::nullopt;
}

// Vector-mode value: a scalar part and/or coordinate-field components.
struct VecVal {
  ExprPtr scalar;               // may be null
  std::map<int, ExprPtr> comp;  // coord index -> coefficient AST

  bool is_scalar() const { return comp.empty(); }
};

class Parser {
 public:
  Parser(const std::string& src, const std::vector<std::string>& vars,
         const std::vector<std::string>* coords)
      : src_(src), vars_(vars), coords_(coords), toks_(lex(src)) {}

  ExprPtr parse_scalar_all() {
    ExprPtr e = expr();
    expect_end();
    return e;
  }

  VecVal parse_vector_all() {
    VecVal v = vexpr();
    expect_end();
    return v;
  }

 private:
  const std::string& src_;
  const std::vector<std::string>& vars_;
  const std::vector<std::string>* coords_;  // non-null in vector mode
  std::vector<Token> toks_;
  std::size_t pos_ = 0;

  const Token& peek() const { return toks_[pos_]; }
  Token take() { return toks_[pos_++]; }
  bool at(Token::Kind k) const { return peek().kind == k; }
  bool accept(Token::Kind k) {
    if (at(k)) { ++pos_; return true; }
    return false;
  }
  void expect_end() {
    if (!at(Token::end))
      throw ParseError("parse error: unexpected token '" + peek().text + "'",
                       peek().offset + 1);
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError("parse error: " + msg +
                         (at(Token::end) ? " at end of input"
                                         : " near '" + peek().text + "'"),
                     peek().offset + 1);
  }

  int var_index(const std::string& name) const {
    auto it = std::find(vars_.begin(), vars_.end(), name);
    return it == vars_.end() ? -1 : int(it - vars_.begin());
  }
  int coord_index(const std::string& name) const {
    if (!coords_) return -1;
    auto it = std::find(coords_->begin(), coords_->end(), name);
    return it == coords_->end() ? -1 : int(it - coords_->begin());
  }

  // ---- scalar grammar ----
  ExprPtr expr() {
    ExprPtr e = term();
    for (;;) {
      if (accept(Token::plus)) e = make_bin(Expr::Kind::add, e, term());
      else if (accept(Token::minus)) e = make_bin(Expr::Kind::sub, e, term());
      else return e;
    }
  }

  ExprPtr term() {
    ExprPtr e = unary();
    for (;;) {
      if (accept(Token::star)) e = make_bin(Expr::Kind::mul, e, unary());
      else if (accept(Token::slash)) e = make_bin(Expr::Kind::div, e, unary());
      else return e;
    }
  }

  ExprPtr unary() {
    if (at(Token::minus)) {
      Token t = take();
      ExprPtr a = unary();
      Expr e;
      e.kind = Expr::Kind::neg;
      e.begin = t.offset;
      e.end = a->end;
      e.a = std::move(a);
      return make_node(std::move(e));
    }
    return power();
  }

  ExprPtr power() {
    ExprPtr base = primary();
    if (!accept(Token::caret)) return base;
    const Token& et = peek();
    ExprPtr esub = unary();  // allow -2, (3/2), 2^3 ...
    auto folded = const_fold(esub);
    if (!folded)
      throw ParseError("parse error: exponent must be a constant", et.offset + 1);
    const double tw = 2.0 * *folded;
    const double rn = std::round(tw);
    if (std::abs(tw - rn) > 1e-9 * std::max(1.0, std::abs(tw)))
      throw ParseError("parse error: exponent must be an integer or half-integer",
                       et.offset + 1);
    Expr e;
    e.kind = Expr::Kind::pow;
    const long num2 = long(rn);
    if (num2 % 2 == 0) { e.pow_num = num2 / 2; e.pow_den = 1; }
    else { e.pow_num = num2; e.pow_den = 2; }
    e.begin = base->begin;
    e.end = esub->end;
    e.a = std::move(base);
    return make_node(std::move(e));
  }

  ExprPtr primary() {
    if (at(Token::num)) {
      Token t = take();
      return make_const(t.value, t.offset, t.offset + t.text.size());
    }
    if (at(Token::lparen)) {
      take();
      ExprPtr e = expr();
      if (!accept(Token::rparen)) fail("expected ')'");
      return e;
    }
    if (at(Token::ident)) {
      Token t = take();
      if (at(Token::lparen)) {
        static const std::map<std::string, Expr::Kind> funcs = {
            {"sin", Expr::Kind::sin},   {"cos", Expr::Kind::cos},
            {"sinh", Expr::Kind::sinh}, {"cosh", Expr::Kind::cosh},
            {"sqrt", Expr::Kind::sqrt_fn}};
        auto it = funcs.find(t.text);
        if (it == funcs.end())
          throw ParseError("parse error: unknown function '" + t.text + "'",
                           t.offset + 1);
        take();  // (
        ExprPtr a = expr();
        if (!at(Token::rparen)) fail("expected ')'");
        Token rp = take();
        Expr e;
        e.kind = it->second;
        e.begin = t.offset;
        e.end = rp.offset + 1;
        e.a = std::move(a);
        return make_node(std::move(e));
      }
      const int vi = var_index(t.text);
      if (vi < 0)
        throw ParseError("unknown variable '" + t.text + "'", t.offset + 1);
      Expr e;
      e.kind = Expr::Kind::variable;
      e.var = vi;
      e.name = t.text;
      e.begin = t.offset;
      e.end = t.offset + t.text.size();
      return make_node(std::move(e));
    }
    fail("expected a value");
  }

  // ---- vector grammar (shares the scalar one for coefficients) ----
  VecVal vexpr() {
    VecVal v = vterm();
    for (;;) {
      if (accept(Token::plus)) v = vcombine(std::move(v), vterm(), +1);
      else if (accept(Token::minus)) v = vcombine(std::move(v), vterm(), -1);
      else return v;
    }
  }

  VecVal vterm() {
    VecVal v = vunary();
    for (;;) {
      if (at(Token::star) || at(Token::slash)) {
        const bool mul = at(Token::star);
        Token op = take();
        VecVal w = vunary();
        if (!mul && !w.is_scalar())
          throw ParseError("parse error: cannot divide by a vector", op.offset + 1);
        if (!v.is_scalar() && !w.is_scalar())
          throw ParseError("parse error: cannot multiply two vectors", op.offset + 1);
        v = vscale(std::move(v), std::move(w), mul);
      } else {
        return v;
      }
    }
  }

  VecVal vunary() {
    if (at(Token::minus)) {
      take();
      VecVal v = vunary();
      return vnegate(std::move(v));
    }
    return vpower();
  }

  VecVal vpower() {
    VecVal base = vprimary();
    if (!at(Token::caret)) return base;
    if (!base.is_scalar())
      throw ParseError("parse error: cannot raise a vector to a power",
                       peek().offset + 1);
    // Re-run the scalar power tail on the scalar part.
    take();  // ^
    const Token& et = peek();
    ExprPtr esub = unary();
    auto folded = const_fold(esub);
    if (!folded)
      throw ParseError("parse error: exponent must be a constant", et.offset + 1);
    const double tw = 2.0 * *folded;
    const double rn = std::round(tw);
    if (std::abs(tw - rn) > 1e-9 * std::max(1.0, std::abs(tw)))
      throw ParseError("parse error: exponent must be an integer or half-integer",
                       et.offset + 1);
    Expr e;
    e.kind = Expr::Kind::pow;
    const long num2 = long(rn);
    if (num2 % 2 == 0) { e.pow_num = num2 / 2; e.pow_den = 1; }
    else { e.pow_num = num2; e.pow_den = 2; }
    e.a = base.scalar;
    e.begin = base.scalar->begin;
    e.end = esub->end;
    VecVal out;
    out.scalar = make_node(std::move(e));
    return out;
  }

  VecVal vprimary() {
    if (at(Token::ident) && peek().text == "d") {
      Token t = take();
      if (!accept(Token::lparen)) fail("expected '(' after d");
      if (!at(Token::ident)) fail("expected a coordinate name");
      Token c = take();
      const int ci = coord_index(c.text);
      if (ci < 0)
        throw ParseError("unknown coordinate '" + c.text + "'", c.offset + 1);
      if (!accept(Token::rparen)) fail("expected ')'");
      VecVal v;
      v.comp[ci] = make_const(1.0, t.offset, c.offset + c.text.size());
      return v;
    }
    if (at(Token::lparen)) {
      take();
      VecVal v = vexpr();
      if (!accept(Token::rparen)) fail("expected ')'");
      return v;
    }
    // Fall back to a scalar primary (number, variable, function call).
    VecVal v;
    v.scalar = primary();
    return v;
  }

  static VecVal vnegate(VecVal v) {
    auto neg = [](ExprPtr a) {
      Expr e;
      e.kind = Expr::Kind::neg;
      e.begin = a->begin;
      e.end = a->end;
      e.a = std::move(a);
      return make_node(std::move(e));
    };
    VecVal out;
    if (v.scalar) out.scalar = neg(v.scalar);
    for (auto& [i, c] : v.comp) out.comp[i] = neg(c);
    return out;
  }

  static VecVal vcombine(VecVal a, VecVal b, int sign) {
    const Expr::Kind k = sign > 0 ? Expr::Kind::add : Expr::Kind::sub;
    VecVal out = std::move(a);
    if (b.scalar) {
      out.scalar = out.scalar ? make_bin(k, out.scalar, b.scalar)
                              : (sign > 0 ? b.scalar : vnegate(VecVal{b.scalar, {}}).scalar);
    }
    for (auto& [i, c] : b.comp) {
      auto it = out.comp.find(i);
      if (it == out.comp.end()) {
        out.comp[i] = sign > 0 ? c : vnegate(VecVal{c, {}}).scalar;
      } else {
        it->second = make_bin(k, it->second, c);
      }
    }
    return out;
  }

  static VecVal vscale(VecVal a, VecVal b, bool mul) {
    const Expr::Kind k = mul ? Expr::Kind::mul : Expr::Kind::div;
    if (a.is_scalar() && b.is_scalar()) {
      VecVal out;
      out.scalar = make_bin(k, a.scalar, b.scalar);
      return out;
    }
    // Exactly one side is a vector; division already validated by caller.
    VecVal& vec = a.is_scalar() ? b : a;
    ExprPtr s = a.is_scalar() ? a.scalar : b.scalar;
    VecVal out;
    for (auto& [i, c] : vec.comp) {
      out.comp[i] = a.is_scalar() ? make_bin(k, s, c) : make_bin(k, c, s);
    }
    return out;
  }
};

// ---- evaluation ------------------------------------------------------------

template <class S> double value_of(const S& s);
template <> double value_of<double>(const double& s) { return s; }
template <> double value_of<Dual>(const Dual& s) { return s.v; }
template <> double value_of<Jet2>(const Jet2& s) { return s.v; }

template <class S> S make_const_like(double v, const S& like);
template <> double make_const_like<double>(double v, const double&) { return v; }
template <> Dual make_const_like<Dual>(double v, const Dual& like) {
  return Dual::constant(v, like.vars());
}
template <> Jet2 make_const_like<Jet2>(double v, const Jet2& like) {
  return Jet2::constant(v, like.vars());
}

template <class S>
S apply_chain(double f, double df, double ddf, const S& u);
template <> double apply_chain<double>(double f, double, double, const double&) { return f; }
template <> Dual apply_chain<Dual>(double f, double df, double, const Dual& u) {
  return jet_chain(f, df, u);
}
template <> Jet2 apply_chain<Jet2>(double f, double df, double ddf, const Jet2& u) {
  return jet_chain(f, df, ddf, u);
}

std::string span_text(const ScalarExpr& f, const Expr& e) {
  if (e.end > e.begin && e.end <= f.source.size())
    return f.source.substr(e.begin, e.end - e.begin);
  return f.source;
}

template <class S>
S eval_node(const ScalarExpr& f, const Expr& e, const std::vector<S>& env) {
  using K = Expr::Kind;
  switch (e.kind) {
    case K::constant: return make_const_like<S>(e.value, env.front());
    case K::variable: return env[std::size_t(e.var)];
    case K::add: return eval_node(f, *e.a, env) + eval_node(f, *e.b, env);
    case K::sub: return eval_node(f, *e.a, env) - eval_node(f, *e.b, env);
    case K::mul: return eval_node(f, *e.a, env) * eval_node(f, *e.b, env);
    case K::div: {
      S a = eval_node(f, *e.a, env);
      S b = eval_node(f, *e.b, env);
      if (value_of(b) == 0.0) throw DomainError("division by zero", span_text(f, e));
      return a / b;
    }
    case K::neg: return -eval_node(f, *e.a, env);
    case K::sin: {
      S u = eval_node(f, *e.a, env);
      const double v = value_of(u);
      return apply_chain(std::sin(v), std::cos(v), -std::sin(v), u);
    }
    case K::cos: {
      S u = eval_node(f, *e.a, env);
      const double v = value_of(u);
      return apply_chain(std::cos(v), -std::sin(v), -std::cos(v), u);
    }
    case K::sinh: {
      S u = eval_node(f, *e.a, env);
      const double v = value_of(u);
      return apply_chain(std::sinh(v), std::cosh(v), std::sinh(v), u);
    }
    case K::cosh: {
      S u = eval_node(f, *e.a, env);
      const double v = value_of(u);
      return apply_chain(std::cosh(v), std::sinh(v), std::cosh(v), u);
    }
    case K::sqrt_fn: {
      S u = eval_node(f, *e.a, env);
      const double v = value_of(u);
      if (v <= 0.0) throw DomainError("sqrt of a non-positive value", span_text(f, e));
      const double r = std::sqrt(v);
      return apply_chain(r, 0.5 / r, -0.25 / (v * r), u);
    }
    case K::pow: {
      S u = eval_node(f, *e.a, env);
      const double v = value_of(u);
      if (e.pow_den == 2) {
        if (v <= 0.0)
          throw DomainError("half-integer power of a non-positive value", span_text(f, e));
        const double ex = 0.5 * double(e.pow_num);
        const double p = std::pow(v, ex);
        return apply_chain(p, ex * p / v, ex * (ex - 1.0) * p / (v * v), u);
      }
      const long k = e.pow_num;
      if (v == 0.0 && k < 0)
        throw DomainError("negative power of zero", span_text(f, e));
      const double p0 = std::pow(v, double(k));
      const double p1 = (k == 0) ? 0.0 : double(k) * std::pow(v, double(k - 1));
      const double p2 =
          (k == 0 || k == 1) ? 0.0 : double(k) * double(k - 1) * std::pow(v, double(k - 2));
      return apply_chain(p0, p1, p2, u);
    }
  }
  throw Error("corrupt expression tree");
}

template <class S>
S eval_any(const ScalarExpr& f, const std::vector<S>& env) {
  if (!f.root) throw Error("evaluating an empty expression");
  if (env.size() != f.vars.size())
    throw Error("expression expects " + std::to_string(f.vars.size()) +
                " variables, got " + std::to_string(env.size()));
  if (env.empty()) throw Error("expression environment is empty");
  return eval_node(f, *f.root, env);
}

}  // namespace

ScalarExpr parse_scalar(const std::string& source, const std::vector<std::string>& vars) {
  if (source.empty()) throw ParseError("empty expression", 1);
  Parser p(source, vars, nullptr);
  ScalarExpr out;
  out.root = p.parse_scalar_all();
  out.vars = vars;
  out.source = source;
  return out;
}

ScalarExpr make_constant(double value, const std::vector<std::string>& vars) {
  ScalarExpr out;
  out.root = make_const(value);
  out.vars = vars;
  out.source = "0";
  return out;
}

ScalarExpr expr_add(const ScalarExpr& a, const ScalarExpr& b) {
  if (a.vars != b.vars) throw Error("expr_add: mismatched variable lists");
  ScalarExpr out;
  out.root = make_bin(Expr::Kind::add, a.root, b.root);
  out.vars = a.vars;
  out.source = "(" + a.source + ") + (" + b.source + ")";
  return out;
}

ScalarExpr expr_mul(const ScalarExpr& a, const ScalarExpr& b) {
  if (a.vars != b.vars) throw Error("expr_mul: mismatched variable lists");
  ScalarExpr out;
  out.root = make_bin(Expr::Kind::mul, a.root, b.root);
  out.vars = a.vars;
  out.source = "(" + a.source + ") * (" + b.source + ")";
  return out;
}

bool is_zero_constant(const ScalarExpr& a) {
  return a.root && a.root->kind == Expr::Kind::constant && a.root->value == 0.0;
}

double eval_value(const ScalarExpr& f, const std::vector<double>& env) {
  return eval_any(f, env);
}
Dual eval_dual(const ScalarExpr& f, const std::vector<Dual>& env) {
  return eval_any(f, env);
}
Jet2 eval_jet2(const ScalarExpr& f, const std::vector<Jet2>& env) {
  return eval_any(f, env);
}

Jet2 eval_jet2(const ScalarExpr& f, const Eigen::VectorXd& p) {
  const Eigen::Index n = p.size();
  if (std::size_t(n) != f.vars.size())
    throw Error("point dimension does not match the variable list");
  std::vector<Jet2> env;
  env.reserve(std::size_t(n));
  for (Eigen::Index k = 0; k < n; ++k) env.push_back(Jet2::seed(p[k], n, k));
  return eval_any(f, env);
}

VectorField parse_vector_field(const std::string& source,
                               const std::vector<std::string>& scalar_vars,
                               const std::vector<std::string>& coords) {
  if (source.empty()) throw ParseError("empty vector field", 1);
  Parser p(source, scalar_vars, &coords);
  VecVal v = p.parse_vector_all();
  if (v.scalar) {
    auto folded = const_fold(v.scalar);
    if (!folded || *folded != 0.0)
      throw ParseError("expected a vector field (a scalar term remains)", 1);
  }
  VectorField out;
  out.source = source;
  out.comps.reserve(coords.size());
  for (std::size_t i = 0; i < coords.size(); ++i) {
    auto it = v.comp.find(int(i));
    if (it == v.comp.end()) {
      out.comps.push_back(make_constant(0.0, scalar_vars));
    } else {
      ScalarExpr se;
      se.root = it->second;
      se.vars = scalar_vars;
      se.source = source;
      out.comps.push_back(std::move(se));
    }
  }
  return out;
}

}  // namespace lightlike
