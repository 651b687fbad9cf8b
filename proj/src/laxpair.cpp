#include "delsarte/laxpair.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "json.hpp"

namespace delsarte
{

DifferentialExpression schrodinger_operator(const CoefficientField &u)
{
   DifferentialExpression L(1, {"x"});
   L.add_term({2}, CoefficientField::constant_scalar(-1.0));
   L.add_term({0}, u);
   return L;
}

DifferentialExpression kdv_m_operator(const CoefficientField &u)
{
   DifferentialExpression M(1, {"x"});
   M.add_term({3}, CoefficientField::constant_scalar(-4.0));
   M.add_term({1}, u.scaled(6.0));
   M.add_term({0}, u.derivative("x").scaled(3.0));
   return M;
}

LaxPair kdv_pair(const CoefficientField &u)
{
   LaxPair pair;
   pair.Lt.axis = "t";
   pair.Lt.spatial = schrodinger_operator(u);
   pair.My.axis = "y";
   pair.My.spatial = kdv_m_operator(u);
   return pair;
}

double zs_residual(const LaxPair &pair, const std::vector<GridFunction> &battery)
{
   double worst = 0.0;
   for (const GridFunction &f : battery)
   {
      GridFunction r = evolution_apply(pair.Lt, evolution_apply(pair.My, f));
      r -= evolution_apply(pair.My, evolution_apply(pair.Lt, f));
      worst = std::max(worst, r.sup_norm() / std::max(f.sup_norm(), 1e-300));
   }
   return worst;
}

namespace
{

GridFunction take_slice(const GridFunction &f, const Grid &xgrid, int xa,
                        long start, long inner)
{
   GridFunction out(xgrid, f.channels());
   const int n = xgrid.axis(0).count;
   for (int j = 0; j < n; ++j)
   {
      for (int c = 0; c < f.channels(); ++c)
      {
         out.at(j, c) = f.at(start + (long)j * inner, c);
      }
   }
   (void)xa;
   return out;
}

/// u-tilde = u + 2 d/dx K(x,x) for a 1-D slice family (trace route only).
GridFunction dressed_potential_slice(const SpectralFamily &fam,
                                     const GridFunction &u_slice)
{
   const TransmutationKernel K = build_kernel(fam);
   const Grid &g = u_slice.grid();
   GridFunction diag(g, 1);
   const int n = g.axis(0).count;
   for (int j = 0; j < n; ++j)
   {
      Complex acc = 0.0;
      for (size_t k = 0; k < K.left.size(); ++k)
      {
         acc += K.left[k].at(j, 0) * K.right[k].at(j, 0);
      }
      diag.at(j, 0) = acc;
   }
   GridFunction dd = fd_partial(diag, g.axis(0).name, 1);
   dd *= Complex(2.0);
   return u_slice + dd;
}

} // namespace

double transformed_zs_residual(const GridFunction &u,
                               const std::vector<JointDatum> &family, double x0,
                               const std::vector<GridFunction> &battery,
                               double pre_tol)
{
   const Grid &g = u.grid();
   for (const char *name : {"t", "y", "x"})
   {
      if (!g.has_axis(name))
      {
         throw Error("shape", std::string("joint grid lacks axis '") + name + "'");
      }
   }
   const LaxPair seed = kdv_pair(CoefficientField::sampled(u, 1));

   double scale = 1e-300, hmax = 0.0;
   for (int a = 0; a < g.dim(); ++a)
   {
      if (g.axis(a).count > 1) { hmax = std::max(hmax, g.axis(a).spacing()); }
   }
   for (const auto &e : family) { scale = std::max(scale, e.psi.sup_norm()); }
   if (pre_tol < 0.0) { pre_tol = 50.0 * hmax * hmax * scale; }

   EvolutionOperator adjL, adjM;
   adjL.axis = "t";
   adjL.spatial = seed.Lt.spatial.formal_adjoint().scaled(Complex(-1.0));
   adjM.axis = "y";
   adjM.spatial = seed.My.spatial.formal_adjoint().scaled(Complex(-1.0));
   for (const auto &e : family)
   {
      const double r =
         std::max({evolution_apply(seed.Lt, e.psi).sup_norm(),
                   evolution_apply(seed.My, e.psi).sup_norm(),
                   evolution_apply(adjL, e.phi).sup_norm(),
                   evolution_apply(adjM, e.phi).sup_norm()});
      if (r > 10.0 * pre_tol)
      {
         std::ostringstream ss;
         ss << "family entry misses the joint kernel: residual " << r
            << " exceeds 10 * " << pre_tol;
         throw Error("precondition-violation", ss.str());
      }
   }

   // dress slice-wise in (t, y)
   const int xa = g.axis_index("x");
   const Grid xgrid = make_uniform_grid({g.axis(xa)});
   const long inner = g.stride(xa);
   const int n = g.axis(xa).count;
   const long block = inner * n;
   GridFunction ut(g, 1);
   for (long b0 = 0; b0 < g.node_count(); b0 += block)
   {
      for (long i0 = 0; i0 < inner; ++i0)
      {
         const long start = b0 + i0;
         SpectralFamily fam;
         fam.x0 = x0;
         for (const auto &e : family)
         {
            SpectralDatum d;
            d.lambda = e.lambda;
            d.weight = e.weight;
            d.psi = take_slice(e.psi, xgrid, xa, start, inner);
            d.phi = take_slice(e.phi, xgrid, xa, start, inner);
            fam.entries.push_back(std::move(d));
         }
         const GridFunction us = take_slice(u, xgrid, xa, start, inner);
         const GridFunction uts = dressed_potential_slice(fam, us);
         for (int j = 0; j < n; ++j)
         {
            ut.at(start + (long)j * inner, 0) = uts.at(j, 0);
         }
      }
   }
   const LaxPair dressed = kdv_pair(CoefficientField::sampled(ut, 1));
   return zs_residual(dressed, battery);
}

double backlund_residual(const DifferentialExpression &L,
                         const DifferentialExpression &Ltilde,
                         const DelsarteOperator &fwd, const DelsarteOperator &inv,
                         const std::vector<GridFunction> &battery,
                         const std::string &t_axis)
{
   EvolutionOperator A;
   A.axis = t_axis;
   A.spatial = L;
   double worst = 0.0;
   for (const GridFunction &f : battery)
   {
      const GridFunction g0 = apply_delsarte(inv, f);
      GridFunction r = Ltilde.apply(f);
      r -= L.apply(f);
      r += apply_delsarte(fwd, evolution_apply(A, g0));
      r -= evolution_apply(A, apply_delsarte(fwd, g0));
      worst = std::max(worst, r.sup_norm() / std::max(f.sup_norm(), 1e-300));
   }
   return worst;
}

SolitonSolution kdv_soliton(std::vector<double> kappa, std::vector<double> phase,
                            const Grid &txgrid)
{
   if (kappa.size() != phase.size())
   {
      throw Error("config", "kappa and phase lists must have equal length");
   }
   if (txgrid.dim() != 2 || txgrid.evolution_axes().size() != 1)
   {
      throw Error("shape", "soliton grid must be (t; x)");
   }
   const int ta = txgrid.evolution_axes()[0];
   const int sx = txgrid.spatial_axes()[0];
   std::vector<size_t> order(kappa.size());
   std::iota(order.begin(), order.end(), 0);
   std::sort(order.begin(), order.end(),
             [&](size_t a, size_t b) { return kappa[a] < kappa[b]; });
   SolitonSolution sol;
   for (size_t k : order)
   {
      if (!(kappa[k] > 0.0)) { throw Error("config", "kappa values must be positive"); }
      sol.kappa.push_back(kappa[k]);
      sol.phase.push_back(phase[k]);
   }
   for (size_t k = 1; k < sol.kappa.size(); ++k)
   {
      if (sol.kappa[k] - sol.kappa[k - 1] < 1e-6)
      {
         throw Error("config", "kappa values must be distinct (gap >= 1e-6)");
      }
   }

   const Grid xgrid = make_uniform_grid({txgrid.axis(sx)});
   const int n = xgrid.axis(0).count;
   const int N = (int)sol.kappa.size();
   sol.u = GridFunction(txgrid, 1);
   const long inner = txgrid.stride(sx);

   for (int it = 0; it < txgrid.axis(ta).count; ++it)
   {
      const double t = txgrid.axis(ta).coord(it);
      std::vector<GridFunction> seeds;
      for (int s = 0; s < N; ++s)
      {
         const double kp = sol.kappa[s];
         const double c0 = 4.0 * kp * kp * t + sol.phase[s];
         GridFunction psi(xgrid, 1);
         psi.sample([&](const std::vector<double> &x, int) -> Complex
         {
            return std::exp(kp * (x[0] - c0));
         });
         seeds.push_back(std::move(psi));
      }
      GridFunction u1(xgrid, 1);
      for (int s = 0; s < N; ++s)
      {
         SpectralFamily fam;
         fam.x0 = xgrid.axis(0).lo;
         SpectralDatum d;
         d.lambda = -sol.kappa[s] * sol.kappa[s];
         d.weight = 2.0 * sol.kappa[s];
         d.psi = seeds[s];
         d.phi = seeds[s];
         fam.entries.push_back(std::move(d));
         try
         {
            const DelsarteOperator fwd = forward_operator(fam);
            u1 = dressed_potential_slice(fam, u1);
            for (int r = s + 1; r < N; ++r)
            {
               seeds[r] = apply_delsarte(fwd, seeds[r]);
            }
         }
         catch (const Error &e)
         {
            if (e.kind() != "singular-cycle-matrix") { throw; }
            std::ostringstream ss;
            ss << "singular cycle matrix in dressing step " << s + 1;
            throw Error("singular-dressing", ss.str());
         }
      }
      const long t_stride = txgrid.stride(ta);
      for (int j = 0; j < n; ++j)
      {
         sol.u.at((long)it * t_stride + (long)j * inner, 0) = u1.at(j, 0);
      }
   }
   return sol;
}

double kdv_residual(const GridFunction &u)
{
   const Grid &g = u.grid();
   if (g.dim() != 2 || g.evolution_axes().size() != 1)
   {
      throw Error("shape", "kdv_residual expects a (t; x) profile");
   }
   const int ta = g.evolution_axes()[0];
   const int sx = g.spatial_axes()[0];
   if (g.axis(ta).count < 2)
   {
      throw Error("shape", "time axis too short for the t-derivative");
   }
   const std::string &tn = g.axis(ta).name;
   const std::string &xn = g.axis(sx).name;
   const GridFunction ut = fd_partial(u, tn, 1);
   const GridFunction ux = fd_partial(u, xn, 1);
   const GridFunction uxxx = fd_partial(u, xn, 3);
   double worst = 0.0;
   for (long node = 0; node < g.node_count(); ++node)
   {
      const std::vector<int> idx = g.unflatten(node);
      if (idx[sx] < 3 || idx[sx] >= g.axis(sx).count - 3) { continue; }
      if (g.axis(ta).count > 2 &&
          (idx[ta] < 1 || idx[ta] >= g.axis(ta).count - 1))
      {
         continue;
      }
      const Complex r = ut.at(node, 0) -
                        6.0 * u.at(node, 0) * ux.at(node, 0) + uxxx.at(node, 0);
      worst = std::max(worst, std::abs(r));
   }
   return worst;
}

std::vector<double> kdv_mass(const GridFunction &u)
{
   const Grid &g = u.grid();
   const int ta = g.evolution_axes().at(0);
   const int sx = g.spatial_axes().at(0);
   const double h = g.axis(sx).spacing();
   const long inner = g.stride(sx);
   const long t_stride = g.stride(ta);
   const int n = g.axis(sx).count;
   std::vector<double> mass;
   for (int it = 0; it < g.axis(ta).count; ++it)
   {
      double acc = 0.0;
      for (int j = 0; j < n; ++j)
      {
         const double w = (j == 0 || j == n - 1) ? 0.5 : 1.0;
         acc += w * u.at((long)it * t_stride + (long)j * inner, 0).real();
      }
      mass.push_back(acc * h);
   }
   return mass;
}

SolitonFit fit_single_soliton(const GridFunction &slice, double kappa,
                              double window_lo, double window_hi)
{
   const Grid &g = slice.grid();
   if (g.dim() != 1) { throw Error("shape", "soliton fit expects a 1-D slice"); }
   const Axis &ax = g.axis(0);
   const int ja = std::max(0, (int)std::ceil((window_lo - ax.lo) / ax.spacing()));
   const int jb = std::min(ax.count - 1,
                           (int)std::floor((window_hi - ax.lo) / ax.spacing()));
   if (jb <= ja) { throw Error("config", "empty soliton fit window"); }

   auto err_at = [&](double p)
   {
      double e = 0.0;
      for (int j = ja; j <= jb; ++j)
      {
         const double x = ax.coord(j);
         const double c = std::cosh(kappa * (x - p));
         const double model = -2.0 * kappa * kappa / (c * c);
         e = std::max(e, std::abs(slice.at(j, 0).real() - model));
      }
      return e;
   };

   int jmin = ja;
   for (int j = ja; j <= jb; ++j)
   {
      if (slice.at(j, 0).real() < slice.at(jmin, 0).real()) { jmin = j; }
   }
   double lo = ax.coord(jmin) - 1.0, hi = ax.coord(jmin) + 1.0;
   for (int iter = 0; iter < 200; ++iter)
   {
      const double m1 = lo + (hi - lo) / 3.0;
      const double m2 = hi - (hi - lo) / 3.0;
      if (err_at(m1) < err_at(m2)) { hi = m2; }
      else { lo = m1; }
   }
   SolitonFit fit;
   fit.phase = 0.5 * (lo + hi);
   fit.err = err_at(fit.phase);
   return fit;
}

void write_soliton_csv(const SolitonSolution &sol, const std::string &path)
{
   std::ofstream os(path);
   if (!os) { throw Error("io", "cannot write soliton CSV '" + path + "'"); }
   os.precision(17);
   os << "t,x,u\n";
   const Grid &g = sol.u.grid();
   const int ta = g.evolution_axes().at(0);
   const int sx = g.spatial_axes().at(0);
   for (long node = 0; node < g.node_count(); ++node)
   {
      const std::vector<int> idx = g.unflatten(node);
      os << g.axis(ta).coord(idx[ta]) << "," << g.axis(sx).coord(idx[sx]) << ","
         << sol.u.at(node, 0).real() << "\n";
   }
}

void write_soliton_summary(const SolitonSolution &sol, double residual,
                           const std::vector<double> &mass, const std::string &path)
{
   nlohmann::json j;
   j["kappas"] = sol.kappa;
   j["phases"] = sol.phase;
   j["residual"] = residual;
   j["mass"] = mass;
   j["convention"] = sol.convention;
   std::ofstream os(path);
   if (!os) { throw Error("io", "cannot write soliton summary '" + path + "'"); }
   os << j.dump(2) << "\n";
}

} // namespace delsarte
