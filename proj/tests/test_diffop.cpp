#include <cmath>

#include "doctest.h"

#include "delsarte/diffop.hpp"
#include "delsarte/errors.hpp"
#include "delsarte/expr.hpp"
#include "delsarte/numgrid.hpp"

using namespace delsarte;

namespace
{

Grid line_grid(int n, double lo = -8.0, double hi = 8.0)
{
   return make_uniform_grid({{"x", lo, hi, n, AxisRole::Spatial}});
}

GridFunction bump(const Grid &g, double center, double width)
{
   GridFunction f(g, 1);
   f.sample([center, width](const std::vector<double> &c, int) -> Complex
   { return std::exp(-std::pow((c[0] - center) / width, 2)); });
   return f;
}

double sup_diff(const GridFunction &a, const GridFunction &b)
{
   GridFunction d = a;
   d -= b;
   return d.sup_norm();
}

} // namespace

TEST_CASE("adjoint of the first derivative is its negative")
{
   Grid g = line_grid(257);
   DifferentialExpression L(1, {"x"});
   L.add_term({1}, CoefficientField::constant_scalar(1.0));
   DifferentialExpression Ls = L.formal_adjoint();
   GridFunction f = bump(g, 0.7, 1.2);
   GridFunction lhs = Ls.apply(f);
   GridFunction rhs = L.scaled(Complex(-1.0)).apply(f);
   CHECK(sup_diff(lhs, rhs) < 1e-12);
}

TEST_CASE("adjoint of a(x) d is -a d - a'")
{
   Grid g = line_grid(513);
   DifferentialExpression L(1, {"x"});
   L.add_term({1}, CoefficientField::scalar(parse_expr("sin(x)")));
   DifferentialExpression Ls = L.formal_adjoint();

   // reference: -sin(x) f' - cos(x) f
   DifferentialExpression R(1, {"x"});
   R.add_term({1}, CoefficientField::scalar(parse_expr("0 - sin(x)")));
   R.add_term({0}, CoefficientField::scalar(parse_expr("0 - cos(x)")));
   GridFunction f = bump(g, -0.4, 0.9);
   CHECK(sup_diff(Ls.apply(f), R.apply(f)) < 1e-11);
}

TEST_CASE("double adjoint returns the original action")
{
   Grid g = line_grid(513);
   DifferentialExpression L(1, {"x"});
   L.add_term({2}, CoefficientField::constant_scalar(-1.0));
   L.add_term({1}, CoefficientField::scalar(parse_expr("cos(x)")));
   L.add_term({0}, CoefficientField::scalar(parse_expr("sech(x)^2")));
   DifferentialExpression Lss = L.formal_adjoint().formal_adjoint();
   GridFunction f = bump(g, 0.3, 1.5);
   CHECK(sup_diff(Lss.apply(f), L.apply(f)) < 1e-10);
}

TEST_CASE("matrix coefficients transpose-conjugate in the adjoint")
{
   Grid g = line_grid(513);
   DifferentialExpression L(2, {"x"});
   L.add_term({1}, CoefficientField::constant(2, {Complex(1.0), Complex(0.0, 0.3),
                                                 Complex(0.0), Complex(-1.0)}));
   DifferentialExpression Ls = L.formal_adjoint();
   // constant matrix A d has adjoint -A^H d
   DifferentialExpression R(2, {"x"});
   R.add_term({1}, CoefficientField::constant(2, {Complex(-1.0), Complex(0.0),
                                                  Complex(0.0, 0.3), Complex(1.0)}));
   GridFunction f(g, 2);
   f.sample([](const std::vector<double> &c, int ch) -> Complex
   { return std::exp(-c[0] * c[0]) * Complex(1.0 + ch, -0.5 * ch); });
   CHECK(sup_diff(Ls.apply(f), R.apply(f)) < 1e-12);
}

TEST_CASE("adjoint defect vanishes for interior-supported data")
{
   Grid g = line_grid(1025, -10.0, 10.0);
   DifferentialExpression L(1, {"x"});
   L.add_term({2}, CoefficientField::constant_scalar(-1.0));
   L.add_term({0}, CoefficientField::scalar(parse_expr("sech(x)^2")));
   GridFunction phi = bump(g, -1.0, 1.3);
   GridFunction psi = bump(g, 1.4, 1.1);
   AdjointDefect d = adjoint_defect(L, phi, psi);
   CHECK(std::abs(d.value) < 1e-7);
   CHECK(!d.boundary_warning);
}

TEST_CASE("evolution operator residual vanishes on an exact solution")
{
   // d psi/dt = -psi'' with psi = e^{t} sin(x): -psi'' = psi, dpsi/dt = psi
   Grid g = make_uniform_grid({{"t", 0.0, 0.5, 9, AxisRole::Evolution},
                               {"x", -3.141592653589793, 3.141592653589793, 257,
                                AxisRole::Spatial}});
   DifferentialExpression L(1, {"x"});
   L.add_term({2}, CoefficientField::constant_scalar(-1.0));
   GridFunction psi(g, 1);
   psi.sample([](const std::vector<double> &c, int) -> Complex
   { return std::exp(c[0]) * std::sin(c[1]); });
   EvolutionOperator op{"t", 1.0, L};
   GridFunction r = evolution_apply(op, psi);
   const double h = g.axis(1).spacing(), dt = g.axis(0).spacing();
   CHECK(r.sup_norm() < 10.0 * (h * h + dt * dt));
}

TEST_CASE("operator description files parse to the expected action")
{
   DifferentialExpression L = operator_from_json_text(R"({
      "m": 1, "N": 1,
      "terms": [ { "alpha": [2], "coeff": "-1" },
                 { "alpha": [0], "coeff": "x^2 - 1" } ] })");
   CHECK(L.order() == 2);
   CHECK(L.channels() == 1);
   Grid g = line_grid(257, -5.0, 5.0);
   // ground state of the shifted oscillator: L e^{-x^2/2} = 0
   GridFunction psi(g, 1);
   psi.sample([](const std::vector<double> &c, int) -> Complex
   { return std::exp(-c[0] * c[0] / 2.0); });
   CHECK(L.apply(psi).sup_norm() < 1e-2);
}

TEST_CASE("bad operator descriptions raise config errors")
{
   CHECK_THROWS_AS(operator_from_json_text("{ not json"), Error);
   CHECK_THROWS_AS(operator_from_json_text(R"({"m":0,"N":1,"terms":[]})"), Error);
}
