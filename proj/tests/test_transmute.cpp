#include <cmath>
#include <string>

#include "doctest.h"

#include "delsarte/diffop.hpp"
#include "delsarte/errors.hpp"
#include "delsarte/expr.hpp"
#include "delsarte/laxpair.hpp"
#include "delsarte/numgrid.hpp"
#include "delsarte/transmute.hpp"

using namespace delsarte;

namespace
{

Grid line_grid(int n, double lo, double hi)
{
   return make_uniform_grid({{"x", lo, hi, n, AxisRole::Spatial}});
}

SpectralFamily gaussian_family(const Grid &g)
{
   GridFunction psi(g, 1);
   psi.sample([](const std::vector<double> &c, int) -> Complex
   { return std::exp(-c[0] * c[0] / 2.0); });
   SpectralFamily fam;
   fam.entries.push_back({Complex(0.0), 1.0, psi, psi});
   fam.x0 = g.axis(0).lo;
   fam.t0 = 0.0;
   return fam;
}

} // namespace

TEST_CASE("cycle matrix of the Gaussian family matches the erf oracle")
{
   Grid g = line_grid(4001, -10.0, 10.0);
   SpectralFamily fam = gaussian_family(g);
   // Omega(0) = 1 + int_{-10}^{0} e^{-y^2} dy = 1 + (sqrt(pi)/2) erf(10)
   CycleMatrix cm = cycle_matrix(fam, 0.0);
   const double expect = 1.0 + 0.5 * std::sqrt(M_PI); // erf(10) = 1 to 1e-44
   CHECK(std::abs(cm.omega(0, 0) - Complex(expect)) < 1e-4);
   CycleMatrix base = cycle_matrix(fam, -10.0);
   CHECK(std::abs(base.omega(0, 0) - Complex(1.0)) < 1e-14);
}

TEST_CASE("family residual flags stale eigenfunctions")
{
   Grid g = line_grid(2049, -8.0, 8.0);
   DifferentialExpression L =
      schrodinger_operator(CoefficientField::scalar(parse_expr("x^2 - 1")));
   SpectralFamily fam = gaussian_family(g);
   CHECK(family_residual(L, fam) < 1e-4);
   SpectralFamily bad = fam;
   bad.entries[0].lambda = Complex(0.5); // wrong eigenvalue
   CHECK_THROWS_AS(check_family(L, bad, 1e-6), Error);
}

TEST_CASE("exponential seed dresses the free operator into one soliton")
{
   // seed psi = e^{x}, lambda = -1, weight 2 on L = -d^2 produces
   // u-tilde = -2 sech^2(x) up to an O(e^{2 lo}) tail from the base point
   Grid g = line_grid(8193, -16.0, 16.0);
   GridFunction psi(g, 1);
   psi.sample([](const std::vector<double> &c, int) -> Complex
   { return std::exp(c[0]); });
   SpectralFamily fam;
   fam.entries.push_back({Complex(-1.0), 2.0, psi, psi});
   fam.x0 = g.axis(0).lo;
   GridFunction u(g, 1);
   u.sample([](const std::vector<double> &, int) -> Complex { return 0.0; });
   TransformedPotential tp = transformed_potential_schrodinger(fam, u);
   double worst = 0.0;
   for (int n = 3; n < g.axis(0).count - 3; ++n)
   {
      const double x = g.axis(0).coord(n);
      const double expect = -2.0 / std::pow(std::cosh(x), 2);
      worst = std::max(worst, std::abs(tp.u_K.at(n, 0) - Complex(expect)));
   }
   CHECK(worst < 1e-4);
   CHECK(tp.mismatch < 1e-4);
}

TEST_CASE("forward and inverse dressings compose to the identity")
{
   Grid g = line_grid(4097, -10.0, 10.0);
   SpectralFamily fam = gaussian_family(g);
   DelsarteOperator fwd = forward_operator(fam);
   DelsarteOperator inv = inverse_operator(fam);
   std::vector<GridFunction> battery = test_battery(g, 1, 4, 2024);
   for (const GridFunction &f : battery)
   {
      GridFunction r = apply_delsarte(inv, apply_delsarte(fwd, f));
      r -= f;
      CHECK(r.sup_norm() / f.sup_norm() < 1e-6);
   }
}

TEST_CASE("dressing acts as the identity left of a right-sided seed support")
{
   // kernel K(x,y) = sum left(x) right(y): with the Gaussian seed both
   // factors decay, so Omega f - f is negligible when f sits near the base
   Grid g = line_grid(4097, -10.0, 10.0);
   SpectralFamily fam = gaussian_family(g);
   DelsarteOperator fwd = forward_operator(fam);
   GridFunction f(g, 1);
   f.sample([](const std::vector<double> &c, int) -> Complex
   { return std::exp(-std::pow((c[0] + 8.0) / 0.4, 2)); });
   GridFunction r = apply_delsarte(fwd, f);
   r -= f;
   CHECK(r.sup_norm() < 1e-10);
}

TEST_CASE("kernel samples agree with the separable factors")
{
   Grid g = line_grid(513, -10.0, 10.0);
   SpectralFamily fam = gaussian_family(g);
   TransmutationKernel K = build_kernel(fam);
   CHECK(K.channels() == 1);
   const int ix = 300, iy = 120;
   Complex expect = 0.0;
   for (size_t k = 0; k < K.left.size(); ++k)
   {
      expect += K.left[k].at(ix, 0) * K.right[k].at(iy, 0);
   }
   CHECK(std::abs(K.sample(ix, iy)(0, 0) - expect) < 1e-14);
}

TEST_CASE("propagate reproduces the heat evolution of a sine mode")
{
   // d psi/dt = psi'' with psi = e^{-t} sin(x); the forward heat sign keeps
   // the explicit stepping well posed
   Grid g = line_grid(129, -M_PI, M_PI);
   DifferentialExpression L(1, {"x"});
   L.add_term({2}, CoefficientField::constant_scalar(1.0));
   GridFunction psi0(g, 1);
   psi0.sample([](const std::vector<double> &c, int) -> Complex
   { return std::sin(c[0]); });
   Axis taxis{"t", 0.0, 0.05, 6, AxisRole::Evolution};
   GridFunction traj = propagate(L, psi0, taxis);
   const Grid &tg = traj.grid();
   double worst = 0.0;
   for (long n = 0; n < tg.node_count(); ++n)
   {
      const std::vector<int> idx = tg.unflatten(n);
      const double t = tg.axis(0).coord(idx[0]);
      const double x = tg.axis(1).coord(idx[1]);
      worst = std::max(worst,
                       std::abs(traj.at(n, 0) - Complex(std::exp(-t) * std::sin(x))));
   }
   const double h = g.axis(0).spacing();
   CHECK(worst < 50.0 * h * h);
}

TEST_CASE("reading operator and family files reproduces the in-memory setup")
{
   const std::string dir = DELSARTE_TEST_DATA_DIR;
   DifferentialExpression L = read_operator(dir + "/operator_shifted_oscillator.json");
   Grid g = line_grid(4097, -10.0, 10.0);
   SpectralFamily fam = read_family(dir + "/family_ground_state.json", g);
   CHECK(fam.entries.size() == 1);
   CHECK(fam.x0 == doctest::Approx(-10.0));
   CHECK(family_residual(L, fam) < 1e-5);
}

TEST_CASE("locality holds for the dressed operator, not the raw dressing")
{
   Grid g = line_grid(4097, -10.0, 10.0);
   SpectralFamily fam = gaussian_family(g);
   DelsarteOperator fwd = forward_operator(fam);
   DifferentialExpression L =
      schrodinger_operator(CoefficientField::scalar(parse_expr("x^2 - 1")));
   GridFunction ones(g, 1);
   ones.sample([](const std::vector<double> &, int) -> Complex { return 1.0; });
   GridFunction u = L.apply(ones);
   TransformedPotential tp = transformed_potential_schrodinger(fam, u);
   GridFunction delta = tp.u_K;
   delta -= u;
   DifferentialExpression corr(1, {"x"});
   corr.add_term({0}, CoefficientField::sampled(delta, 1));
   DifferentialExpression Lt = L.plus(corr);
   const double local = locality_check(
      [&Lt](const GridFunction &f) { return Lt.apply(f); }, g, 1, 48, 4, 99);
   CHECK(local < 1e-8);
}
