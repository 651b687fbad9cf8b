#include "delsarte/expr.hpp"

#include <cctype>
#include <cmath>
#include <sstream>

#include "delsarte/errors.hpp"

namespace delsarte
{

namespace
{

class ConstNode : public ExprNode
{
public:
   explicit ConstNode(Complex v) : v_(v) {}
   Complex eval(const VarMap &) const override { return v_; }
   ExprPtr diff(const std::string &) const override { return expr_const(0.0); }
   ExprPtr conjugate() const override { return expr_const(std::conj(v_)); }
   std::string to_string() const override
   {
      std::ostringstream os;
      if (v_.imag() == 0.0) { os << v_.real(); }
      else { os << "(" << v_.real() << "+" << v_.imag() << "i)"; }
      return os.str();
   }
   Kind kind() const override { return Kind::Const; }
   bool is_const(Complex *value) const override
   {
      if (value) { *value = v_; }
      return true;
   }

private:
   Complex v_;
};

class VarNode : public ExprNode
{
public:
   explicit VarNode(std::string name) : name_(std::move(name)) {}
   Complex eval(const VarMap &vars) const override
   {
      for (const auto &[n, v] : vars)
      {
         if (n == name_) { return v; }
      }
      throw Error("parse", "unbound variable '" + name_ + "'");
   }
   ExprPtr diff(const std::string &var) const override
   {
      return expr_const(var == name_ ? 1.0 : 0.0);
   }
   ExprPtr conjugate() const override { return expr_var(name_); } // variables are real
   std::string to_string() const override { return name_; }
   Kind kind() const override { return Kind::Var; }

private:
   std::string name_;
};

class BinNode : public ExprNode
{
public:
   BinNode(Kind k, ExprPtr a, ExprPtr b) : k_(k), a_(std::move(a)), b_(std::move(b)) {}
   Complex eval(const VarMap &vars) const override
   {
      const Complex x = a_->eval(vars), y = b_->eval(vars);
      switch (k_)
      {
         case Kind::Add: return x + y;
         case Kind::Sub: return x - y;
         case Kind::Mul: return x * y;
         default: return x / y;
      }
   }
   ExprPtr diff(const std::string &v) const override
   {
      switch (k_)
      {
         case Kind::Add: return expr_add(a_->diff(v), b_->diff(v));
         case Kind::Sub: return expr_sub(a_->diff(v), b_->diff(v));
         case Kind::Mul:
            return expr_add(expr_mul(a_->diff(v), b_), expr_mul(a_, b_->diff(v)));
         default: // quotient rule
            return expr_sub(expr_div(a_->diff(v), b_),
                            expr_div(expr_mul(a_, b_->diff(v)), expr_mul(b_, b_)));
      }
   }
   ExprPtr conjugate() const override
   {
      switch (k_)
      {
         case Kind::Add: return expr_add(a_->conjugate(), b_->conjugate());
         case Kind::Sub: return expr_sub(a_->conjugate(), b_->conjugate());
         case Kind::Mul: return expr_mul(a_->conjugate(), b_->conjugate());
         default: return expr_div(a_->conjugate(), b_->conjugate());
      }
   }
   std::string to_string() const override
   {
      const char *op = k_ == Kind::Add ? "+" : k_ == Kind::Sub ? "-"
                       : k_ == Kind::Mul ? "*" : "/";
      return "(" + a_->to_string() + op + b_->to_string() + ")";
   }
   Kind kind() const override { return k_; }

private:
   Kind k_;
   ExprPtr a_, b_;
};

class NegNode : public ExprNode
{
public:
   explicit NegNode(ExprPtr a) : a_(std::move(a)) {}
   Complex eval(const VarMap &vars) const override { return -a_->eval(vars); }
   ExprPtr diff(const std::string &v) const override { return expr_neg(a_->diff(v)); }
   ExprPtr conjugate() const override { return expr_neg(a_->conjugate()); }
   std::string to_string() const override { return "(-" + a_->to_string() + ")"; }
   Kind kind() const override { return Kind::Neg; }

private:
   ExprPtr a_;
};

class PowNode : public ExprNode
{
public:
   PowNode(ExprPtr a, int n) : a_(std::move(a)), n_(n) {}
   Complex eval(const VarMap &vars) const override
   {
      return std::pow(a_->eval(vars), n_);
   }
   ExprPtr diff(const std::string &v) const override
   {
      if (n_ == 0) { return expr_const(0.0); }
      return expr_mul(expr_mul(expr_const((double)n_), expr_pow(a_, n_ - 1)),
                      a_->diff(v));
   }
   ExprPtr conjugate() const override { return expr_pow(a_->conjugate(), n_); }
   std::string to_string() const override
   {
      return a_->to_string() + "^" + std::to_string(n_);
   }
   Kind kind() const override { return Kind::Pow; }

private:
   ExprPtr a_;
   int n_;
};

class CallNode : public ExprNode
{
public:
   CallNode(std::string fn, ExprPtr a) : fn_(std::move(fn)), a_(std::move(a)) {}
   Complex eval(const VarMap &vars) const override
   {
      const Complex x = a_->eval(vars);
      if (fn_ == "exp") { return std::exp(x); }
      if (fn_ == "sin") { return std::sin(x); }
      if (fn_ == "cos") { return std::cos(x); }
      if (fn_ == "sinh") { return std::sinh(x); }
      if (fn_ == "cosh") { return std::cosh(x); }
      if (fn_ == "tanh") { return std::tanh(x); }
      if (fn_ == "sech") { return 1.0 / std::cosh(x); }
      throw Error("parse", "unknown function '" + fn_ + "'");
   }
   ExprPtr diff(const std::string &v) const override
   {
      ExprPtr inner = a_->diff(v);
      ExprPtr outer;
      if (fn_ == "exp") { outer = expr_call("exp", a_); }
      else if (fn_ == "sin") { outer = expr_call("cos", a_); }
      else if (fn_ == "cos") { outer = expr_neg(expr_call("sin", a_)); }
      else if (fn_ == "sinh") { outer = expr_call("cosh", a_); }
      else if (fn_ == "cosh") { outer = expr_call("sinh", a_); }
      else if (fn_ == "tanh") { outer = expr_pow(expr_call("sech", a_), 2); }
      else if (fn_ == "sech")
      {
         outer = expr_neg(expr_mul(expr_call("sech", a_), expr_call("tanh", a_)));
      }
      else { throw Error("parse", "unknown function '" + fn_ + "'"); }
      return expr_mul(outer, inner);
   }
   ExprPtr conjugate() const override { return expr_call(fn_, a_->conjugate()); }
   std::string to_string() const override { return fn_ + "(" + a_->to_string() + ")"; }
   Kind kind() const override { return Kind::Call; }

private:
   std::string fn_;
   ExprPtr a_;
};

bool const_value(const ExprPtr &e, Complex &v) { return e->is_const(&v); }

} // namespace

ExprPtr expr_const(Complex c) { return std::make_shared<ConstNode>(c); }
ExprPtr expr_var(std::string name) { return std::make_shared<VarNode>(std::move(name)); }

ExprPtr expr_add(ExprPtr a, ExprPtr b)
{
   Complex x, y;
   if (const_value(a, x) && const_value(b, y)) { return expr_const(x + y); }
   if (const_value(a, x) && x == Complex(0.0)) { return b; }
   if (const_value(b, y) && y == Complex(0.0)) { return a; }
   return std::make_shared<BinNode>(ExprNode::Kind::Add, std::move(a), std::move(b));
}

ExprPtr expr_sub(ExprPtr a, ExprPtr b)
{
   Complex x, y;
   if (const_value(a, x) && const_value(b, y)) { return expr_const(x - y); }
   if (const_value(b, y) && y == Complex(0.0)) { return a; }
   if (const_value(a, x) && x == Complex(0.0)) { return expr_neg(std::move(b)); }
   return std::make_shared<BinNode>(ExprNode::Kind::Sub, std::move(a), std::move(b));
}

ExprPtr expr_mul(ExprPtr a, ExprPtr b)
{
   Complex x, y;
   if (const_value(a, x) && const_value(b, y)) { return expr_const(x * y); }
   if (const_value(a, x))
   {
      if (x == Complex(0.0)) { return expr_const(0.0); }
      if (x == Complex(1.0)) { return b; }
   }
   if (const_value(b, y))
   {
      if (y == Complex(0.0)) { return expr_const(0.0); }
      if (y == Complex(1.0)) { return a; }
   }
   return std::make_shared<BinNode>(ExprNode::Kind::Mul, std::move(a), std::move(b));
}

ExprPtr expr_div(ExprPtr a, ExprPtr b)
{
   Complex x, y;
   if (const_value(a, x) && x == Complex(0.0)) { return expr_const(0.0); }
   if (const_value(b, y) && y == Complex(1.0)) { return a; }
   if (const_value(a, x) && const_value(b, y) && y != Complex(0.0))
   {
      return expr_const(x / y);
   }
   return std::make_shared<BinNode>(ExprNode::Kind::Div, std::move(a), std::move(b));
}

ExprPtr expr_neg(ExprPtr a)
{
   Complex x;
   if (const_value(a, x)) { return expr_const(-x); }
   return std::make_shared<NegNode>(std::move(a));
}

ExprPtr expr_pow(ExprPtr a, int n)
{
   if (n == 0) { return expr_const(1.0); }
   if (n == 1) { return a; }
   Complex x;
   if (const_value(a, x)) { return expr_const(std::pow(x, n)); }
   return std::make_shared<PowNode>(std::move(a), n);
}

ExprPtr expr_call(const std::string &fn, ExprPtr a)
{
   return std::make_shared<CallNode>(fn, std::move(a));
}

namespace
{

class Parser
{
public:
   explicit Parser(const std::string &s) : s_(s) {}

   ExprPtr parse()
   {
      ExprPtr e = expr();
      skip_ws();
      if (pos_ != s_.size())
      {
         throw Error("parse", "trailing input at position " + std::to_string(pos_) +
                     " in '" + s_ + "'");
      }
      return e;
   }

private:
   ExprPtr expr()
   {
      ExprPtr e = term();
      while (true)
      {
         skip_ws();
         if (accept('+')) { e = expr_add(e, term()); }
         else if (accept('-')) { e = expr_sub(e, term()); }
         else { return e; }
      }
   }

   ExprPtr term()
   {
      ExprPtr e = unary();
      while (true)
      {
         skip_ws();
         if (accept('*')) { e = expr_mul(e, unary()); }
         else if (accept('/')) { e = expr_div(e, unary()); }
         else { return e; }
      }
   }

   ExprPtr unary()
   {
      skip_ws();
      if (accept('-')) { return expr_neg(unary()); }
      if (accept('+')) { return unary(); }
      return power();
   }

   ExprPtr power()
   {
      ExprPtr e = atom();
      skip_ws();
      if (accept('^'))
      {
         skip_ws();
         bool neg = accept('-');
         size_t start = pos_;
         while (pos_ < s_.size() && std::isdigit((unsigned char)s_[pos_])) { ++pos_; }
         if (start == pos_) { throw Error("parse", "integer exponent expected"); }
         int n = std::stoi(s_.substr(start, pos_ - start));
         e = expr_pow(e, neg ? -n : n);
      }
      return e;
   }

   ExprPtr atom()
   {
      skip_ws();
      if (pos_ >= s_.size()) { throw Error("parse", "unexpected end of expression"); }
      char c = s_[pos_];
      if (c == '(')
      {
         ++pos_;
         ExprPtr e = expr();
         skip_ws();
         if (!accept(')')) { throw Error("parse", "missing ')'"); }
         return e;
      }
      if (std::isdigit((unsigned char)c) || c == '.')
      {
         size_t used = 0;
         double v = std::stod(s_.substr(pos_), &used);
         pos_ += used;
         if (pos_ < s_.size() && s_[pos_] == 'i')
         {
            ++pos_;
            return expr_const(Complex(0.0, v));
         }
         return expr_const(v);
      }
      if (std::isalpha((unsigned char)c) || c == '_')
      {
         size_t start = pos_;
         while (pos_ < s_.size() &&
                (std::isalnum((unsigned char)s_[pos_]) || s_[pos_] == '_'))
         {
            ++pos_;
         }
         std::string name = s_.substr(start, pos_ - start);
         if (name == "i") { return expr_const(Complex(0.0, 1.0)); }
         if (name == "pi") { return expr_const(3.14159265358979323846); }
         skip_ws();
         if (accept('('))
         {
            ExprPtr arg = expr();
            skip_ws();
            if (!accept(')')) { throw Error("parse", "missing ')' after function call"); }
            return expr_call(name, arg);
         }
         return expr_var(name);
      }
      throw Error("parse", std::string("unexpected character '") + c + "'");
   }

   void skip_ws()
   {
      while (pos_ < s_.size() && std::isspace((unsigned char)s_[pos_])) { ++pos_; }
   }

   bool accept(char c)
   {
      if (pos_ < s_.size() && s_[pos_] == c)
      {
         ++pos_;
         return true;
      }
      return false;
   }

   const std::string &s_;
   size_t pos_ = 0;
};

} // namespace

ExprPtr parse_expr(const std::string &text) { return Parser(text).parse(); }

} // namespace delsarte
