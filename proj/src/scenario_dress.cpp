#include <cmath>

#include "delsarte/diffop.hpp"
#include "delsarte/errors.hpp"
#include "delsarte/laxpair.hpp"
#include "delsarte/numgrid.hpp"
#include "delsarte/transmute.hpp"
#include "scenario_util.hpp"

namespace delsarte
{

using namespace scn;

namespace
{

struct DressSetup
{
   std::string name;
   Grid xg;
   DifferentialExpression L;
   SpectralFamily fam;
   bool controls = false; // run locality and the sign-flip control here
};

DressSetup gaussian_setup(const Options &o)
{
   DressSetup s;
   s.name = "gaussian";
   s.controls = true;
   const auto [lo, hi] = pick_box(o, -10.0, 10.0);
   const int n = pick(o.nx, 20481);
   s.xg = make_uniform_grid({{"x", lo, hi, n, AxisRole::Spatial}});
   // harmonic oscillator shifted so the ground state sits at lambda = 0
   s.L = schrodinger_operator(CoefficientField::scalar(parse_expr("x^2 - 1")));
   GridFunction psi(s.xg, 1);
   psi.sample([](const std::vector<double> &c, int) -> Complex
   { return std::exp(-c[0] * c[0] / 2.0); });
   s.fam.entries.push_back({Complex(0.0), 1.0, psi, psi});
   s.fam.x0 = lo;
   s.fam.t0 = 0.0;
   return s;
}

DressSetup cosh_setup(const Options &o)
{
   DressSetup s;
   s.name = "cosh";
   const auto [lo, hi] = pick_box(o, -4.0, 4.0);
   const int n = pick(o.nx, 16385);
   s.xg = make_uniform_grid({{"x", lo, hi, n, AxisRole::Spatial}});
   s.L = DifferentialExpression(1, {"x"});
   s.L.add_term({2}, CoefficientField::constant_scalar(-1.0));
   GridFunction psi(s.xg, 1);
   psi.sample([](const std::vector<double> &c, int) -> Complex
   { return std::cosh(c[0]); });
   // weight chosen so Omega stays within [1, ~1.5] across the box
   const double w = 0.5 / std::pow(std::cosh(std::max(std::abs(lo), std::abs(hi))), 2);
   s.fam.entries.push_back({Complex(-1.0), w, psi, psi});
   s.fam.x0 = lo;
   s.fam.t0 = 0.0;
   return s;
}

DressSetup config_setup(const Options &o)
{
   DressSetup s;
   s.name = "config";
   s.controls = true;
   const auto [lo, hi] = pick_box(o, -10.0, 10.0);
   const int n = pick(o.nx, 10241);
   s.xg = make_uniform_grid({{"x", lo, hi, n, AxisRole::Spatial}});
   s.L = read_operator(o.dress_operator);
   if (s.L.channels() != 1 || s.L.spatial_dim() != 1 || s.L.order() != 2)
   {
      throw Error("config",
                  "dress requires a one-channel second-order operator in one variable");
   }
   s.fam = read_family(o.dress_family, s.xg);
   return s;
}

void dress_core(const DressSetup &s, const Options &o, bool sweep_mode,
                std::vector<Record> &recs)
{
   const double ts = tol_scale(o);
   const double h = s.xg.axis(0).spacing();
   const int n = s.xg.axis(0).count;
   const std::string gs = describe(s.xg);
   const std::string tag = "-" + s.name;

   {
      Stopwatch sw;
      const double r = family_residual(s.L, s.fam);
      recs.push_back(make_record("dress-family-eigen" + tag, r,
                                 1e-6 * std::max(1.0, ts), gs,
                                 "relative eigen-residual of the seed family",
                                 sw.lap()));
   }

   Stopwatch sw_setup;
   DelsarteOperator fwd = forward_operator(s.fam);
   DelsarteOperator inv = inverse_operator(s.fam);
   GridFunction ones(s.xg, 1);
   ones.sample([](const std::vector<double> &, int) -> Complex { return 1.0; });
   GridFunction u = s.L.apply(ones);
   TransformedPotential tp = transformed_potential_schrodinger(s.fam, u);
   GridFunction delta = tp.u_K;
   delta -= u;
   DifferentialExpression corr(1, {"x"});
   corr.add_term({0}, CoefficientField::sampled(delta, 1));
   DifferentialExpression Ltilde = s.L.plus(corr);
   const double setup_seconds = sw_setup.lap();

   {
      recs.push_back(make_record("dress-dual-route-potential" + tag, tp.mismatch,
                                 2000.0 * h * h * ts, gs,
                                 "kernel-trace vs eigen-ratio potential, tolerance "
                                 "2000 h^2",
                                 setup_seconds));
   }

   // the homotopy ratio is a bound, not an h^2 residual; skip it in sweeps
   if (!sweep_mode)
   {
      // the cycle matrix must leave the identity at the prescribed linear rate
      Stopwatch sw;
      double cb = 0.0;
      for (const SpectralDatum &dxi : s.fam.entries)
      {
         for (const SpectralDatum &deta : s.fam.entries)
         {
            double sup = 0.0;
            for (long node = 0; node < s.xg.node_count(); ++node)
            {
               Complex v = 0.0;
               for (int c = 0; c < dxi.phi.channels(); ++c)
               {
                  v += std::conj(dxi.phi.at(node, c)) * deta.psi.at(node, c);
               }
               sup = std::max(sup, std::abs(v));
            }
            cb = std::max(cb, dxi.weight * sup);
         }
      }
      double worst = 0.0;
      const int K = (int)s.fam.entries.size();
      DenseMatrix I = DenseMatrix::identity(K);
      for (int i = 0; i <= 20; ++i)
      {
         const int j = (int)std::lround((double)i * (n - 1) / 20.0);
         const double x = s.xg.axis(0).coord(j);
         DenseMatrix B = cycle_matrix(s.fam, x).omega;
         B -= I;
         const double dist = std::abs(x - s.fam.x0) + h;
         worst = std::max(worst, B.norm_max() / (cb * dist + 1e-300));
      }
      recs.push_back(make_record("dress-cycle-homotopy" + tag, worst, 1.05, gs,
                                 "||Omega(x) - 1|| against the weight-sup bound",
                                 sw.lap()));
   }

   {
      Stopwatch sw;
      const double r = kernel_pde_residual(s.L, Ltilde, fwd.kernel, 3);
      double sk = 0.0;
      for (size_t k = 0; k < fwd.kernel.left.size(); ++k)
      {
         sk = std::max(sk, fwd.kernel.left[k].sup_norm() *
                           fwd.kernel.right[k].sup_norm());
      }
      const double tol = 100.0 * h * h * std::max(1.0, sk) *
                         (1.0 + u.sup_norm() + tp.u_K.sup_norm()) * ts;
      recs.push_back(make_record("dress-kernel-pde" + tag, r, tol, gs,
                                 "tolerance 100 h^2 scale", sw.lap()));
   }

   std::vector<GridFunction> battery = test_battery(s.xg, 1, 8, o.seed);
   {
      Stopwatch sw;
      const double r = intertwining_residual(s.L, Ltilde, fwd, battery);
      recs.push_back(make_record("dress-intertwining" + tag, r,
                                 1e-4 * std::max(1.0, ts), gs,
                                 "sup residual of Omega L - Ltilde Omega, "
                                 "normalized per profile",
                                 sw.lap()));
   }
   {
      Stopwatch sw;
      double r = 0.0;
      for (const GridFunction &f : battery)
      {
         GridFunction g2 = apply_delsarte(inv, apply_delsarte(fwd, f));
         g2 -= f;
         r = std::max(r, g2.sup_norm() / std::max(f.sup_norm(), 1e-300));
      }
      recs.push_back(make_record("dress-round-trip" + tag, r,
                                 1e-6 * std::max(1.0, ts), gs,
                                 "inverse after forward on the battery", sw.lap()));
   }

   if (sweep_mode) { return; }

   if (s.controls)
   {
      Stopwatch sw;
      const double loc_diff = locality_check(
         [&Ltilde](const GridFunction &f) { return Ltilde.apply(f); },
         s.xg, 1, 48, 6, o.seed);
      // integral control: well separated bumps across the kernel support
      const double mid = 0.5 * (s.xg.axis(0).lo + s.xg.axis(0).hi);
      const double span = s.xg.axis(0).hi - s.xg.axis(0).lo;
      const double cf = mid - span / 10.0, ch = mid + span / 10.0, w = span / 40.0;
      GridFunction fb(s.xg, 1), hb(s.xg, 1);
      fb.sample([cf, w](const std::vector<double> &c, int) -> Complex
      { return std::exp(-std::pow((c[0] - cf) / w, 2)); });
      hb.sample([ch, w](const std::vector<double> &c, int) -> Complex
      { return std::exp(-std::pow((c[0] - ch) / w, 2)); });
      GridFunction kf = apply_delsarte(fwd, fb);
      kf -= fb;
      const double loc_int = std::abs(pairing(hb, kf));
      const double tol = 1e-8 * std::max(1.0, ts);
      recs.push_back(custom_record(
         "dress-locality" + tag, loc_diff, tol,
         loc_diff <= tol && loc_int >= 1e-3, gs,
         "differential action on separated bumps; integral control " +
            num(loc_int) + " must reach 1e-03",
         sw.lap()));
   }

   {
      Stopwatch sw;
      const double T = 0.2;
      const int ntp = 1 + (int)std::lround(T / h);
      Axis taxis{"t", 0.0, T, ntp, AxisRole::Evolution};
      double maxlam = 0.0;
      for (const SpectralDatum &d : s.fam.entries)
      {
         maxlam = std::max(maxlam, std::abs(d.lambda));
      }
      const double r31 = dressed_family_residual(Ltilde, s.fam, taxis);
      const double tol = 200.0 * h * h * (1.0 + std::pow(maxlam, 3)) * ts;
      recs.push_back(make_record("dress-transformed-family" + tag, r31, tol, gs,
                                 "dressed pairs stay eigen-solutions, tolerance "
                                 "200 h^2 (1 + |lambda|^3)",
                                 sw.lap()));
      if (s.controls)
      {
         Stopwatch sw2;
         DifferentialExpression Lflip = s.L.plus(corr.scaled(Complex(-1.0)));
         const double rflip = dressed_family_residual(Lflip, s.fam, taxis);
         recs.push_back(custom_record(
            "dress-potential-flip-control" + tag, rflip, 0.0,
            rflip >= 10.0 * std::max(r31, 1e-12), gs,
            "sign-flipped potential update; must exceed 10x the dressed "
            "residual " + num(r31),
            sw2.lap()));
      }
   }

   {
      const int stride = std::max(1, (n - 1) / 128);
      write_kernel_csv(fwd.kernel, o.out + "/kernel_" + s.name + ".csv", stride);
      write_csv(tp.u_K, o.out + "/potential_" + s.name + ".csv");
   }
}

} // namespace

std::vector<Record> detail_run_dress(const Options &o, bool sweep_mode)
{
   std::vector<Record> recs;
   if (!o.dress_operator.empty() || !o.dress_family.empty())
   {
      if (o.dress_operator.empty() || o.dress_family.empty())
      {
         throw Error("config", "dress config needs both operator and family files");
      }
      dress_core(config_setup(o), o, sweep_mode, recs);
      return recs;
   }
   dress_core(gaussian_setup(o), o, sweep_mode, recs);
   if (!sweep_mode) { dress_core(cosh_setup(o), o, sweep_mode, recs); }
   return recs;
}

} // namespace delsarte
