#ifndef DELSARTE_EXPR_HPP
#define DELSARTE_EXPR_HPP

#include <complex>
#include <memory>
#include <string>
#include <vector>

namespace delsarte
{

using Complex = std::complex<double>;

/// Variable bindings for expression evaluation, looked up by name.
using VarMap = std::vector<std::pair<std::string, double>>;

class ExprNode;
using ExprPtr = std::shared_ptr<const ExprNode>;

/// Minimal arithmetic grammar over named real variables with functions
/// exp, sin, cos, sinh, cosh, sech, tanh, the imaginary unit `i`, and
/// integer powers via `^`. Expressions are immutable trees; differentiation
/// and conjugation are symbolic.
class ExprNode
{
public:
   enum class Kind { Const, Var, Add, Sub, Mul, Div, Neg, Pow, Call };

   virtual ~ExprNode() = default;
   virtual Complex eval(const VarMap &vars) const = 0;
   virtual ExprPtr diff(const std::string &var) const = 0;
   virtual ExprPtr conjugate() const = 0;
   virtual std::string to_string() const = 0;
   virtual Kind kind() const = 0;
   virtual bool is_const(Complex *value = nullptr) const { (void)value; return false; }
};

ExprPtr expr_const(Complex c);
ExprPtr expr_var(std::string name);
ExprPtr expr_add(ExprPtr a, ExprPtr b);
ExprPtr expr_sub(ExprPtr a, ExprPtr b);
ExprPtr expr_mul(ExprPtr a, ExprPtr b);
ExprPtr expr_div(ExprPtr a, ExprPtr b);
ExprPtr expr_neg(ExprPtr a);
ExprPtr expr_pow(ExprPtr a, int n);
ExprPtr expr_call(const std::string &fn, ExprPtr a);

/// Throws Error("parse", ...) on malformed input.
ExprPtr parse_expr(const std::string &text);

} // namespace delsarte

#endif
