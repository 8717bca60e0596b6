#ifndef LIGHTLIKE_EXPR_HPP
#define LIGHTLIKE_EXPR_HPP

#include <memory>
#include <string>
#include <vector>

#include "lightlike/dual.hpp"
#include "lightlike/errors.hpp"

namespace lightlike {

// AST of a smooth real function of named variables. Nodes are immutable and
// shared; evaluation is deterministic (same tree, same point -> bit-identical
// output).
struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  enum class Kind {
    constant, variable,
    add, sub, mul, div, neg, pow,
    sin, cos, sinh, cosh, sqrt_fn,
  };
  Kind kind;
  double value = 0.0;              // constant
  int var = -1;                    // variable index into the parse-time name list
  std::string name;                // variable name, for diagnostics
  long pow_num = 0;                // exponent = pow_num / pow_den
  long pow_den = 1;                // 1 (integer) or 2 (half-integer)
  ExprPtr a, b;
  std::size_t begin = 0, end = 0;  // source span (0-based, half-open)
};

struct ScalarExpr {
  ExprPtr root;
  std::vector<std::string> vars;
  std::string source;

  bool valid() const { return root != nullptr; }
};

// Grammar: standard precedence  ^  >  unary-  >  *,/  >  +,-  with ^ taking a
// constant integer or half-integer exponent. Functions: sin cos sinh cosh
// sqrt. Implicit multiplication is not supported. Errors carry 1-based byte
// offsets.
ScalarExpr parse_scalar(const std::string& source, const std::vector<std::string>& vars);

ScalarExpr make_constant(double value, const std::vector<std::string>& vars);

// AST combinators over the same variable list.
ScalarExpr expr_add(const ScalarExpr& a, const ScalarExpr& b);
ScalarExpr expr_mul(const ScalarExpr& a, const ScalarExpr& b);
bool is_zero_constant(const ScalarExpr& a);

double eval_value(const ScalarExpr& f, const std::vector<double>& env);
Dual   eval_dual(const ScalarExpr& f, const std::vector<Dual>& env);
Jet2   eval_jet2(const ScalarExpr& f, const std::vector<Jet2>& env);

// Evaluate with every variable seeded as an independent direction.
Jet2 eval_jet2(const ScalarExpr& f, const Eigen::VectorXd& p);

// A vector field written as a linear combination of coordinate fields d(name)
// with scalar-expression coefficients, e.g. "x3*d(x3) + y3*d(y3) + z*d(z)".
// Returns one coefficient expression per coordinate (zero where absent).
struct VectorField {
  std::vector<ScalarExpr> comps;
  std::string source;
};

VectorField parse_vector_field(const std::string& source,
                               const std::vector<std::string>& scalar_vars,
                               const std::vector<std::string>& coords);

}  // namespace lightlike

#endif
