#include <cmath>

#include "doctest.h"

#include "delsarte/errors.hpp"
#include "delsarte/expr.hpp"

using namespace delsarte;

TEST_CASE("expression parsing and evaluation")
{
   ExprPtr e = parse_expr("2*x^2 - sin(x) + exp(-x)/3");
   const double x = 0.7;
   const double expect = 2.0 * x * x - std::sin(x) + std::exp(-x) / 3.0;
   CHECK(std::abs(e->eval({{"x", x}}) - Complex(expect)) < 1e-14);
}

TEST_CASE("expression with the imaginary unit")
{
   ExprPtr e = parse_expr("i*cos(x) + 2");
   Complex v = e->eval({{"x", 0.3}});
   CHECK(v.real() == doctest::Approx(2.0));
   CHECK(v.imag() == doctest::Approx(std::cos(0.3)));
}

TEST_CASE("symbolic derivative matches finite differences")
{
   ExprPtr e = parse_expr("x^3*cosh(x) + tanh(2*x)");
   ExprPtr d = e->diff("x");
   const double x = 0.4, h = 1e-6;
   const Complex fd = (e->eval({{"x", x + h}}) - e->eval({{"x", x - h}})) / (2.0 * h);
   CHECK(std::abs(d->eval({{"x", x}}) - fd) < 1e-8);
}

TEST_CASE("sech derivative and identity sech = 1/cosh")
{
   ExprPtr s = parse_expr("sech(x)");
   ExprPtr d = s->diff("x");
   const double x = 1.1;
   CHECK(std::abs(s->eval({{"x", x}}) - Complex(1.0 / std::cosh(x))) < 1e-15);
   const double expect = -std::tanh(x) / std::cosh(x);
   CHECK(std::abs(d->eval({{"x", x}}) - Complex(expect)) < 1e-14);
}

TEST_CASE("conjugation flips the imaginary unit")
{
   ExprPtr e = parse_expr("(1 + i)*exp(x)");
   Complex v = e->conjugate()->eval({{"x", 0.2}});
   CHECK(v.real() == doctest::Approx(std::exp(0.2)));
   CHECK(v.imag() == doctest::Approx(-std::exp(0.2)));
}

TEST_CASE("malformed input raises a parse error")
{
   CHECK_THROWS_AS(parse_expr("2*(x +"), Error);
   // unknown function names surface on evaluation
   CHECK_THROWS_AS(parse_expr("frob(x)")->eval({{"x", 1.0}}), Error);
   try
   {
      parse_expr("x +* 2");
      FAIL("expected a parse error");
   }
   catch (const Error &err)
   {
      CHECK(err.kind() == "parse");
   }
}
