#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>

#include "doctest.h"

#include "delsarte/errors.hpp"
#include "delsarte/numgrid.hpp"

using namespace delsarte;

namespace
{

Grid line_grid(int n, double lo = -1.0, double hi = 1.0)
{
   return make_uniform_grid({{"x", lo, hi, n, AxisRole::Spatial}});
}

} // namespace

TEST_CASE("grid flatten and unflatten round-trip")
{
   Grid g = make_uniform_grid({{"t", 0.0, 1.0, 4, AxisRole::Evolution},
                               {"x", -1.0, 1.0, 5, AxisRole::Spatial}});
   CHECK(g.node_count() == 20);
   for (long n = 0; n < g.node_count(); ++n)
   {
      CHECK(g.flatten(g.unflatten(n)) == n);
   }
   CHECK(g.spatial_axes() == std::vector<int>{1});
   CHECK(g.evolution_axes() == std::vector<int>{0});
}

TEST_CASE("degenerate grids are rejected")
{
   CHECK_THROWS_AS(make_uniform_grid({{"x", 0.0, 1.0, 2, AxisRole::Spatial}}), Error);
   CHECK_THROWS_AS(make_uniform_grid({{"x", 1.0, 1.0, 9, AxisRole::Spatial}}), Error);
}

TEST_CASE("non-finite samples are rejected")
{
   GridFunction f(line_grid(9), 1);
   f.sample([](const std::vector<double> &, int) -> Complex { return 1.0; });
   f.at(3, 0) = std::numeric_limits<double>::quiet_NaN();
   CHECK_THROWS_AS(f.check_finite(), Error);
}

TEST_CASE("first derivative is exact on quadratics, including boundaries")
{
   GridFunction f(line_grid(17), 1);
   f.sample([](const std::vector<double> &c, int) -> Complex
   { return 3.0 * c[0] * c[0] - 2.0 * c[0] + 5.0; });
   GridFunction df = fd_partial(f, "x", 1);
   const Grid &g = df.grid();
   for (long n = 0; n < g.node_count(); ++n)
   {
      const double x = g.axis(0).coord((int)n);
      CHECK(std::abs(df.at(n, 0) - Complex(6.0 * x - 2.0)) < 1e-12);
   }
}

TEST_CASE("second derivative is exact on cubics in the interior")
{
   GridFunction f(line_grid(17), 1);
   f.sample([](const std::vector<double> &c, int) -> Complex
   { return c[0] * c[0] * c[0] + c[0] * c[0]; });
   GridFunction d2 = fd_partial(f, "x", 2);
   const Grid &g = d2.grid();
   for (int n = 1; n < g.axis(0).count - 1; ++n)
   {
      const double x = g.axis(0).coord(n);
      CHECK(std::abs(d2.at(n, 0) - Complex(6.0 * x + 2.0)) < 1e-11);
   }
}

TEST_CASE("Fornberg weights reproduce the classical central stencils")
{
   std::vector<double> w1 = fd_weights(0.0, {-1.0, 0.0, 1.0}, 1);
   CHECK(w1[0] == doctest::Approx(-0.5));
   CHECK(w1[1] == doctest::Approx(0.0));
   CHECK(w1[2] == doctest::Approx(0.5));
   std::vector<double> w2 = fd_weights(0.0, {-1.0, 0.0, 1.0}, 2);
   CHECK(w2[0] == doctest::Approx(1.0));
   CHECK(w2[1] == doctest::Approx(-2.0));
   CHECK(w2[2] == doctest::Approx(1.0));
}

TEST_CASE("trapezoid quadrature is exact on affine integrands")
{
   GridFunction f(line_grid(33, 0.0, 2.0), 1);
   f.sample([](const std::vector<double> &c, int) -> Complex
   { return 3.0 * c[0] + 1.0; });
   // int_0^2 (3x + 1) dx = 8
   CHECK(std::abs(quad(f) - Complex(8.0)) < 1e-13);
}

TEST_CASE("quadrature over a sub-box")
{
   Grid g = line_grid(9, 0.0, 2.0); // h = 0.25
   GridFunction f(g, 1);
   f.sample([](const std::vector<double> &c, int) -> Complex { return c[0]; });
   SubBox box{{2}, {6}}; // [0.5, 1.5]
   CHECK(std::abs(quad(f, box) - Complex(1.0)) < 1e-13);
}

TEST_CASE("pairing is conjugate-linear in the first slot")
{
   Grid g = line_grid(65);
   GridFunction phi(g, 2), psi(g, 2);
   phi.sample([](const std::vector<double> &c, int ch) -> Complex
   { return Complex(std::cos(c[0]), ch + 1.0); });
   psi.sample([](const std::vector<double> &c, int ch) -> Complex
   { return Complex(c[0], std::sin((ch + 1) * c[0])); });
   const Complex a(0.3, -0.8);
   GridFunction aphi = phi;
   aphi *= a;
   CHECK(std::abs(pairing(aphi, psi) - std::conj(a) * pairing(phi, psi)) < 1e-12);
}

TEST_CASE("dense LU solves to near machine accuracy")
{
   const int n = 12;
   std::mt19937 rng(31);
   std::uniform_real_distribution<double> uni(-1.0, 1.0);
   DenseMatrix A(n, n);
   std::vector<Complex> xstar(n);
   for (int i = 0; i < n; ++i)
   {
      xstar[i] = Complex(uni(rng), uni(rng));
      for (int j = 0; j < n; ++j) { A(i, j) = Complex(uni(rng), uni(rng)); }
      A(i, i) += 4.0; // keep it comfortably nonsingular
   }
   std::vector<Complex> b(n, 0.0);
   for (int i = 0; i < n; ++i)
   {
      for (int j = 0; j < n; ++j) { b[i] += A(i, j) * xstar[j]; }
   }
   std::vector<Complex> x = solve_dense(A, b);
   for (int i = 0; i < n; ++i) { CHECK(std::abs(x[i] - xstar[i]) < 1e-12); }

   DenseMatrix Ainv = invert_dense(A);
   DenseMatrix P = A * Ainv;
   P -= DenseMatrix::identity(n);
   CHECK(P.norm_max() < 1e-12);
}

TEST_CASE("singular systems raise the dedicated error")
{
   DenseMatrix A(2, 2);
   A(0, 0) = 1.0;
   A(0, 1) = 2.0;
   A(1, 0) = 2.0;
   A(1, 1) = 4.0;
   CHECK_THROWS_AS(solve_dense(A, {1.0, 1.0}), SingularMatrixError);
}

TEST_CASE("csv round-trip preserves values bit-for-bit within print precision")
{
   Grid g = make_uniform_grid({{"t", 0.0, 0.5, 3, AxisRole::Evolution},
                               {"x", -2.0, 2.0, 7, AxisRole::Spatial}});
   GridFunction f(g, 2);
   f.sample([](const std::vector<double> &c, int ch) -> Complex
   { return Complex(std::sin(c[0] + c[1]), 0.1 * ch - c[1]); });
   const std::string path =
      (std::filesystem::temp_directory_path() / "delsarte_roundtrip.csv").string();
   write_csv(f, path);
   GridFunction back = read_csv(path, g);
   GridFunction diff = back - f;
   CHECK(diff.sup_norm() < 1e-12);
   std::remove(path.c_str());
}
