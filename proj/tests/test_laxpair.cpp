#include <cmath>

#include "doctest.h"

#include "delsarte/diffop.hpp"
#include "delsarte/errors.hpp"
#include "delsarte/expr.hpp"
#include "delsarte/laxpair.hpp"
#include "delsarte/numgrid.hpp"

using namespace delsarte;

namespace
{

double sech2(double z)
{
   const double c = std::cosh(z);
   return 1.0 / (c * c);
}

} // namespace

TEST_CASE("kdv companion operator has the expected terms")
{
   DifferentialExpression M = kdv_m_operator(CoefficientField::scalar(parse_expr("sech(x)^2")));
   CHECK(M.order() == 3);
   Grid g = make_uniform_grid({{"x", -8.0, 8.0, 1025, AxisRole::Spatial}});
   GridFunction f(g, 1);
   f.sample([](const std::vector<double> &c, int) -> Complex
   { return std::exp(-c[0] * c[0] / 4.0); });
   GridFunction Mf = M.apply(f);
   // reference assembled from plain derivatives
   GridFunction d1 = fd_partial(f, "x", 1);
   GridFunction d3 = fd_partial(fd_partial(f, "x", 2), "x", 1);
   double worst = 0.0;
   for (int n = 4; n < g.axis(0).count - 4; ++n)
   {
      const double x = g.axis(0).coord(n);
      const double u = sech2(x);
      const double ux = -2.0 * sech2(x) * std::tanh(x);
      const Complex expect = -4.0 * d3.at(n, 0) + 6.0 * u * d1.at(n, 0) +
                             3.0 * ux * f.at(n, 0);
      worst = std::max(worst, std::abs(Mf.at(n, 0) - expect));
   }
   const double h = g.axis(0).spacing();
   CHECK(worst < 100.0 * h * h);
}

TEST_CASE("single soliton profile, residual, and mass")
{
   Grid g = make_uniform_grid({{"t", -0.2, 0.2, 9, AxisRole::Evolution},
                               {"x", -25.0, 25.0, 6401, AxisRole::Spatial}});
   SolitonSolution sol = kdv_soliton({1.0}, {0.0}, g);
   // closed form -2 sech^2(x - 4t)
   double worst = 0.0;
   for (long n = 0; n < g.node_count(); ++n)
   {
      const std::vector<int> idx = g.unflatten(n);
      const double t = g.axis(0).coord(idx[0]);
      const double x = g.axis(1).coord(idx[1]);
      if (idx[1] < 3 || idx[1] > g.axis(1).count - 4) { continue; }
      worst = std::max(worst,
                       std::abs(sol.u.at(n, 0) - Complex(-2.0 * sech2(x - 4.0 * t))));
   }
   CHECK(worst < 1e-4);

   const double h = g.axis(1).spacing(), dt = g.axis(0).spacing();
   CHECK(kdv_residual(sol.u) < 300.0 * (h * h + dt * dt));

   for (double m : kdv_mass(sol.u))
   {
      CHECK(std::abs(m + 4.0) < 1e-4); // int -2 sech^2 = -4 kappa with kappa = 1
   }
}

TEST_CASE("soliton fit recovers a known phase")
{
   Grid g = make_uniform_grid({{"x", -20.0, 20.0, 4097, AxisRole::Spatial}});
   GridFunction slice(g, 1);
   const double kappa = 1.25, phase = 2.3;
   slice.sample([kappa, phase](const std::vector<double> &c, int) -> Complex
   { return -2.0 * kappa * kappa * sech2(kappa * (c[0] - phase)); });
   SolitonFit fit = fit_single_soliton(slice, kappa, -8.0, 12.0);
   CHECK(std::abs(fit.phase - phase) < 1e-3);
   CHECK(fit.err < 1e-6);
}

TEST_CASE("flat Lax pair commutes to roundoff")
{
   Grid g = make_uniform_grid({{"t", 0.0, 0.2, 5, AxisRole::Evolution},
                               {"y", 0.0, 0.2, 5, AxisRole::Evolution},
                               {"x", -12.0, 12.0, 769, AxisRole::Spatial}});
   LaxPair pair = kdv_pair(CoefficientField::constant_scalar(0.0));
   std::vector<GridFunction> battery;
   GridFunction f(g, 1);
   f.sample([](const std::vector<double> &c, int) -> Complex
   {
      // the x-profile must vanish to rounding at the box edge; otherwise the
      // one-sided boundary closures contaminate the commutator
      return std::exp(-std::pow(c[2] / 1.5, 2)) * std::cos(0.7 * c[2]) *
             std::exp(0.4 * c[0] - 0.3 * c[1]);
   });
   battery.push_back(f);
   const double h = g.axis(2).spacing();
   CHECK(zs_residual(pair, battery) < 50.0 * 2.2e-16 / std::pow(h, 5));
}

TEST_CASE("zs commutator vanishes on the soliton potential")
{
   Grid g = make_uniform_grid({{"t", 0.0, 0.2, 5, AxisRole::Evolution},
                               {"y", 0.0, 0.2, 9, AxisRole::Evolution},
                               {"x", -15.0, 15.0, 1537, AxisRole::Spatial}});
   // u(y, x) = -2 sech^2(x - 4y): a KdV solution in the (y; x) variables
   GridFunction u(g, 1);
   u.sample([](const std::vector<double> &c, int) -> Complex
   { return -2.0 * sech2(c[2] - 4.0 * c[1]); });
   LaxPair pair = kdv_pair(CoefficientField::sampled(u, 1));
   std::vector<GridFunction> battery;
   GridFunction f(g, 1);
   f.sample([](const std::vector<double> &c, int) -> Complex
   {
      return std::exp(-std::pow((c[2] - 1.0) / 2.5, 2)) *
             std::exp(0.3 * c[0] - 0.2 * c[1]);
   });
   battery.push_back(f);
   const double h = g.axis(2).spacing();
   const double dy = g.axis(1).spacing(), dt = g.axis(0).spacing();
   CHECK(zs_residual(pair, battery) < 300.0 * (h * h + dy * dy + dt * dt));
}

TEST_CASE("stale joint families are rejected")
{
   Grid g = make_uniform_grid({{"t", 0.0, 0.2, 5, AxisRole::Evolution},
                               {"y", 0.0, 0.2, 9, AxisRole::Evolution},
                               {"x", -14.0, 14.0, 1793, AxisRole::Spatial}});
   GridFunction u0(g, 1);
   u0.sample([](const std::vector<double> &, int) -> Complex { return 0.0; });
   // wrong group speed: x - 2y instead of x - 4y
   GridFunction psi(g, 1), phi(g, 1);
   psi.sample([](const std::vector<double> &c, int) -> Complex
   { return std::exp(-c[0]) * std::exp(c[2] - 2.0 * c[1] + 4.0); });
   phi.sample([](const std::vector<double> &c, int) -> Complex
   { return std::exp(c[0]) * std::exp(c[2] - 2.0 * c[1] + 4.0); });
   std::vector<JointDatum> fam{{Complex(-1.0), 2.0, psi, phi}};
   std::vector<GridFunction> battery;
   GridFunction f(g, 1);
   f.sample([](const std::vector<double> &c, int) -> Complex
   { return std::exp(-std::pow(c[2] / 3.0, 2)); });
   battery.push_back(f);
   CHECK_THROWS_AS(
      transformed_zs_residual(u0, fam, g.axis(2).lo, battery), Error);
}
