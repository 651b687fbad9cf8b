#include <cmath>
#include <cstdio>
#include <filesystem>

#include "doctest.h"

#include "delsarte/concomitant.hpp"
#include "delsarte/diffop.hpp"
#include "delsarte/errors.hpp"
#include "delsarte/numgrid.hpp"

using namespace delsarte;

namespace
{

Grid plane_grid(int nt, int nx)
{
   return make_uniform_grid({{"t", 0.0, 0.5, nt, AxisRole::Evolution},
                             {"x", -6.0, 6.0, nx, AxisRole::Spatial}});
}

GridFunction bump2(const Grid &g, double c0, double c1)
{
   GridFunction f(g, 1);
   f.sample([c0, c1](const std::vector<double> &c, int) -> Complex
   {
      return std::exp(-std::pow(c[0] - c0, 2) - std::pow((c[1] - c1) / 1.5, 2));
   });
   return f;
}

} // namespace

TEST_CASE("boundary of a boundary is empty")
{
   Grid g = make_uniform_grid({{"t", 0.0, 1.0, 5, AxisRole::Evolution},
                               {"x", 0.0, 1.0, 6, AxisRole::Spatial},
                               {"y", 0.0, 1.0, 4, AxisRole::Spatial}});
   Chain vol = cube_chain(g, {0, 1, 0}, {3, 4, 2}, {0, 1, 2});
   CHECK(!vol.empty());
   Chain b = boundary(vol);
   CHECK(!b.empty());
   CHECK(boundary(b).empty());
   check_in_grid(b, g);
}

TEST_CASE("chain negation flips orientation in integrals")
{
   Grid g = plane_grid(9, 65);
   MForm Z(g, 1);
   GridFunction w(g, 1);
   w.sample([](const std::vector<double> &c, int) -> Complex
   { return std::sin(c[1]) + c[0]; });
   Z.add_wedge_term({1}, w);
   Chain path = path_chain(g, {2, 10}, {{"x", 17}});
   const Complex fwd = chain_integral(Z, path);
   CHECK(std::abs(fwd) > 1e-3);
   CHECK(std::abs(chain_integral(Z, chain_negate(path)) + fwd) < 1e-14);
}

TEST_CASE("wedge terms fold permutation parity into the sign")
{
   Grid g = make_uniform_grid({{"t", 0.0, 1.0, 4, AxisRole::Evolution},
                               {"x", 0.0, 1.0, 4, AxisRole::Spatial}});
   GridFunction w(g, 1);
   w.sample([](const std::vector<double> &, int) -> Complex { return 1.0; });
   MForm A(g, 2), B(g, 2);
   A.add_wedge_term({0, 1}, w);
   B.add_wedge_term({1, 0}, w);
   A += B; // dt^dx + dx^dt = 0
   CHECK(A.sup_norm() < 1e-15);
}

TEST_CASE("exterior derivative of an exact form vanishes")
{
   Grid g = plane_grid(17, 129);
   // Z = df for f = exp(-t) cos(x): Z_t = -f, Z_x = -exp(-t) sin(x)
   MForm Z(g, 1);
   GridFunction zt(g, 1), zx(g, 1);
   zt.sample([](const std::vector<double> &c, int) -> Complex
   { return -std::exp(-c[0]) * std::cos(c[1]); });
   zx.sample([](const std::vector<double> &c, int) -> Complex
   { return -std::exp(-c[0]) * std::sin(c[1]); });
   Z.add_wedge_term({0}, zt);
   Z.add_wedge_term({1}, zx);
   MForm dZ = dform(Z);
   const double h = g.axis(1).spacing(), dt = g.axis(0).spacing();
   CHECK(dZ.sup_norm_interior(1) < 5.0 * (h * h + dt * dt));
}

TEST_CASE("concomitant of the first derivative is the plain density")
{
   Grid g = plane_grid(5, 257);
   DifferentialExpression L(1, {"x"});
   L.add_term({1}, CoefficientField::constant_scalar(1.0));
   GridFunction phi = bump2(g, 0.2, -0.7), psi = bump2(g, 0.3, 0.4);
   GridFunction Z = concomitant_axis(L, phi, psi, "x");
   GridFunction ref(g, 1);
   for (long n = 0; n < g.node_count(); ++n)
   {
      ref.at(n, 0) = std::conj(phi.at(n, 0)) * psi.at(n, 0);
   }
   ref -= Z;
   CHECK(ref.sup_norm() < 1e-12);
}

TEST_CASE("concomitant of -d^2 is the Wronskian-type density")
{
   Grid g = plane_grid(5, 513);
   DifferentialExpression L(1, {"x"});
   L.add_term({2}, CoefficientField::constant_scalar(-1.0));
   GridFunction phi = bump2(g, 0.2, -0.7), psi = bump2(g, 0.3, 0.4);
   GridFunction Z = concomitant_axis(L, phi, psi, "x");
   GridFunction dpsi = fd_partial(psi, "x", 1);
   GridFunction dphi = fd_partial(phi, "x", 1);
   // Z = -(conj(phi) psi' - conj(phi)' psi) for L = -d^2
   GridFunction ref(g, 1);
   for (long n = 0; n < g.node_count(); ++n)
   {
      ref.at(n, 0) = -(std::conj(phi.at(n, 0)) * dpsi.at(n, 0) -
                       std::conj(dphi.at(n, 0)) * psi.at(n, 0));
   }
   ref -= Z;
   const double h = g.axis(1).spacing();
   CHECK(ref.sup_norm() < 10.0 * h * h);
}

TEST_CASE("closedness residual is second order for a true solution pair")
{
   Grid g = plane_grid(17, 513);
   DifferentialExpression L(1, {"x"});
   L.add_term({2}, CoefficientField::constant_scalar(-1.0));
   EvolutionOperator Lt{"t", 1.0, L};
   // psi = e^{4t} sin(2x) solves psi_t = -psi'' ; phi = e^{-t} cos(x) solves
   // phi_t = -(-phi'') since (-d^2)* = -d^2
   GridFunction psi(g, 1), phi(g, 1);
   psi.sample([](const std::vector<double> &c, int) -> Complex
   { return std::exp(4.0 * c[0]) * std::sin(2.0 * c[1]); });
   phi.sample([](const std::vector<double> &c, int) -> Complex
   { return std::exp(-c[0]) * std::cos(c[1]); });
   const double r = closedness_residual(Lt, phi, psi);
   const double h = g.axis(1).spacing(), dt = g.axis(0).spacing();
   CHECK(r < 600.0 * (h * h + dt * dt));
}

TEST_CASE("closedness guard rejects non-solutions")
{
   Grid g = plane_grid(17, 513);
   DifferentialExpression L(1, {"x"});
   L.add_term({2}, CoefficientField::constant_scalar(-1.0));
   EvolutionOperator Lt{"t", 1.0, L};
   GridFunction psi = bump2(g, 0.25, 0.0), phi = bump2(g, 0.2, 1.0);
   CHECK_THROWS_AS(closedness_residual(Lt, phi, psi), Error);
}

namespace
{

// degree-1 "surface": an edge path whose boundary cycles are its endpoints
SurfaceChain path_surface(const Grid &g, std::vector<int> start,
                          const std::vector<std::pair<std::string, int>> &legs)
{
   std::vector<int> end;
   SurfaceChain s;
   s.cells = path_chain(g, start, legs, &end);
   s.minus_cycle = Cycle{{OrientedCell{Cell{start, {}}, 1}}, start};
   s.plus_cycle = Cycle{{OrientedCell{Cell{end, {}}, 1}}, end};
   return s;
}

} // namespace

TEST_CASE("surface chain io round-trip and validation")
{
   Grid g = plane_grid(9, 33);
   SurfaceChain s = path_surface(g, {1, 4}, {{"t", 5}, {"x", 20}});
   s.validate(g);
   const std::string path =
      (std::filesystem::temp_directory_path() / "delsarte_surface.json").string();
   write_surface_chain(s, path);
   SurfaceChain back = read_surface_chain(path, g);
   back.validate(g);
   CHECK(chains_equal(back.cells, s.cells));
   CHECK(chains_equal(back.plus_cycle.cells, s.plus_cycle.cells));
   CHECK(chains_equal(back.minus_cycle.cells, s.minus_cycle.cells));
   std::remove(path.c_str());
}

TEST_CASE("equal-boundary paths integrate a closed form identically")
{
   Grid g = plane_grid(17, 129);
   MForm Z(g, 1);
   GridFunction zt(g, 1), zx(g, 1);
   zt.sample([](const std::vector<double> &c, int) -> Complex
   { return -std::exp(-c[0]) * std::cos(c[1]); });
   zx.sample([](const std::vector<double> &c, int) -> Complex
   { return -std::exp(-c[0]) * std::sin(c[1]); });
   Z.add_wedge_term({0}, zt);
   Z.add_wedge_term({1}, zx);
   SurfaceChain sa = path_surface(g, {2, 20}, {{"t", 9}, {"x", 70}});
   SurfaceChain sb = path_surface(g, {2, 20}, {{"x", 70}, {"t", 9}});
   const double h = g.axis(1).spacing(), dt = g.axis(0).spacing();
   CHECK(path_independence_gap(Z, sa, sb) < 50.0 * (h * h + dt * dt));
}

TEST_CASE("mismatched boundaries raise a homology error")
{
   Grid g = plane_grid(9, 33);
   SurfaceChain s1 = path_surface(g, {1, 4}, {{"t", 5}, {"x", 20}});
   SurfaceChain s2 = path_surface(g, {1, 5}, {{"t", 5}, {"x", 20}});
   MForm Z(g, 1);
   GridFunction w(g, 1);
   w.sample([](const std::vector<double> &, int) -> Complex { return 1.0; });
   Z.add_wedge_term({0}, w);
   Z.add_wedge_term({1}, w);
   CHECK_THROWS_AS(path_independence_gap(Z, s1, s2), Error);
}
