#include "delsarte/transmute.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "json.hpp"

namespace delsarte
{

namespace
{

const Grid &family_grid_or(const SpectralFamily &fam, const Grid &fallback)
{
   return fam.entries.empty() ? fallback : fam.grid();
}

void require_1d(const Grid &g)
{
   if (g.dim() != 1)
   {
      throw Error("shape", "this dressing operation needs a one-dimensional grid");
   }
}

GridFunction conj_gf(const GridFunction &f)
{
   GridFunction out = f;
   for (auto &v : out.values()) { v = std::conj(v); }
   return out;
}

/// Trapezoid antiderivative along a 1-D sample vector, zero at index base.
void cumulative_from(const std::vector<Complex> &f, double h, int base,
                     std::vector<Complex> &out)
{
   const int n = (int)f.size();
   out.assign(n, Complex(0.0));
   for (int j = base + 1; j < n; ++j)
   {
      out[j] = out[j - 1] + 0.5 * h * (f[j - 1] + f[j]);
   }
   for (int j = base - 1; j >= 0; --j)
   {
      out[j] = out[j + 1] - 0.5 * h * (f[j] + f[j + 1]);
   }
}

/// Entrywise cumulative coupling integrals C_{xi eta}(j) =
/// int_{x0}^{x_j} conj(phi_xi)^T psi_eta.
std::vector<std::vector<Complex>> coupling_integrals(const SpectralFamily &fam)
{
   const Grid &g = fam.grid();
   const int K = (int)fam.entries.size();
   const int n = g.axis(0).count;
   const int nc = fam.channels();
   const double h = g.axis(0).spacing();
   const int base = fam.base_index();

   std::vector<std::vector<Complex>> C(K * K);
   std::vector<Complex> density(n), cum;
   for (int xi = 0; xi < K; ++xi)
   {
      for (int eta = 0; eta < K; ++eta)
      {
         const GridFunction &phi = fam.entries[xi].phi;
         const GridFunction &psi = fam.entries[eta].psi;
         for (int j = 0; j < n; ++j)
         {
            Complex acc = 0.0;
            for (int c = 0; c < nc; ++c)
            {
               acc += std::conj(phi.at(j, c)) * psi.at(j, c);
            }
            density[j] = acc;
         }
         cumulative_from(density, h, base, cum);
         C[xi * K + eta] = cum;
      }
   }
   return C;
}

DenseMatrix cycle_matrix_at(const SpectralFamily &fam,
                            const std::vector<std::vector<Complex>> &C, int j)
{
   const int K = (int)fam.entries.size();
   DenseMatrix B = DenseMatrix::identity(K);
   for (int xi = 0; xi < K; ++xi)
   {
      for (int eta = 0; eta < K; ++eta)
      {
         B(xi, eta) += fam.entries[xi].weight * C[xi * K + eta][j];
      }
   }
   return B;
}

DenseMatrix star_matrix_at(const SpectralFamily &fam,
                           const std::vector<std::vector<Complex>> &C, int j)
{
   const int K = (int)fam.entries.size();
   DenseMatrix B = DenseMatrix::identity(K);
   for (int xi = 0; xi < K; ++xi)
   {
      for (int eta = 0; eta < K; ++eta)
      {
         B(xi, eta) += fam.entries[xi].weight * std::conj(C[eta * K + xi][j]);
      }
   }
   return B;
}

} // namespace

const Grid &SpectralFamily::grid() const
{
   if (entries.empty()) { throw Error("stale-family", "spectral family is empty"); }
   return entries.front().psi.grid();
}

int SpectralFamily::channels() const
{
   return entries.empty() ? 0 : entries.front().psi.channels();
}

int SpectralFamily::base_index() const
{
   const Grid &g = grid();
   require_1d(g);
   const Axis &ax = g.axis(0);
   const double pos = (x0 - ax.lo) / ax.spacing();
   const int j = (int)std::lround(pos);
   if (j < 0 || j >= ax.count || std::abs(pos - j) > 1e-9)
   {
      throw Error("config", "base point x0 must lie on a grid node");
   }
   return j;
}

double family_residual(const DifferentialExpression &L, const SpectralFamily &fam)
{
   const DifferentialExpression Ls = L.formal_adjoint();
   double worst = 0.0;
   for (const auto &e : fam.entries)
   {
      GridFunction rp = L.apply(e.psi);
      rp -= e.lambda * e.psi;
      GridFunction rq = Ls.apply(e.phi);
      rq -= std::conj(e.lambda) * e.phi;
      worst = std::max(worst, rp.sup_norm() / std::max(e.psi.sup_norm(), 1e-300));
      worst = std::max(worst, rq.sup_norm() / std::max(e.phi.sup_norm(), 1e-300));
   }
   return worst;
}

void check_family(const DifferentialExpression &L, const SpectralFamily &fam,
                  double tol)
{
   if (fam.entries.empty()) { throw Error("stale-family", "spectral family is empty"); }
   const double r = family_residual(L, fam);
   if (r > tol)
   {
      std::ostringstream ss;
      ss << "family eigen-residual " << r << " exceeds " << tol;
      throw Error("stale-family", ss.str());
   }
   for (const auto &e : fam.entries)
   {
      if (!(e.weight > 0.0)) { throw Error("config", "family weights must be positive"); }
   }
}

namespace
{

GridFunction function_from_json(const nlohmann::json &spec, const Grid &g)
{
   if (spec.is_object())
   {
      return read_csv(spec.at("csv").get<std::string>(), g);
   }
   std::vector<ExprPtr> exprs;
   if (spec.is_string()) { exprs.push_back(parse_expr(spec.get<std::string>())); }
   else
   {
      for (const auto &e : spec) { exprs.push_back(parse_expr(e.get<std::string>())); }
   }
   GridFunction f(g, (int)exprs.size());
   VarMap vars;
   for (int a = 0; a < g.dim(); ++a) { vars.emplace_back(g.axis(a).name, 0.0); }
   for (long node = 0; node < g.node_count(); ++node)
   {
      const std::vector<int> idx = g.unflatten(node);
      for (int a = 0; a < g.dim(); ++a) { vars[a].second = g.axis(a).coord(idx[a]); }
      for (size_t c = 0; c < exprs.size(); ++c)
      {
         f.at(node, (int)c) = exprs[c]->eval(vars);
      }
   }
   return f;
}

Complex complex_from_json(const nlohmann::json &j)
{
   if (j.is_array()) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }
   return {j.get<double>(), 0.0};
}

} // namespace

SpectralFamily read_family(const std::string &path, const Grid &grid)
{
   std::ifstream is(path);
   if (!is) { throw Error("config", "cannot open family file '" + path + "'"); }
   nlohmann::json j;
   try { is >> j; }
   catch (const std::exception &e)
   {
      throw Error("config", std::string("family file: ") + e.what());
   }
   SpectralFamily fam;
   fam.x0 = j.at("x0").get<double>();
   fam.t0 = j.value("t0", 0.0);
   for (const auto &e : j.at("entries"))
   {
      SpectralDatum d;
      d.lambda = complex_from_json(e.at("lambda"));
      d.weight = e.at("weight").get<double>();
      d.psi = function_from_json(e.at("psi"), grid);
      d.phi = function_from_json(e.at("phi"), grid);
      fam.entries.push_back(std::move(d));
   }
   if (fam.entries.empty())
   {
      throw Error("config", "family file lists no entries");
   }
   return fam;
}

SeparablePair separable_solutions(const SpectralDatum &d, const Grid &txgrid,
                                  const std::string &t_axis)
{
   const int ta = txgrid.axis_index(t_axis);
   const Grid &xg = d.psi.grid();
   require_1d(xg);
   const int xa = txgrid.axis_index(xg.axis(0).name);
   if (txgrid.axis(xa).count != xg.axis(0).count)
   {
      throw Error("shape", "spatial axis of the extension grid does not match");
   }
   SeparablePair out{GridFunction(txgrid, d.psi.channels()),
                     GridFunction(txgrid, d.phi.channels())};
   for (long node = 0; node < txgrid.node_count(); ++node)
   {
      const std::vector<int> idx = txgrid.unflatten(node);
      const double t = txgrid.axis(ta).coord(idx[ta]);
      const Complex ep = std::exp(d.lambda * t);
      const Complex eq = std::exp(-std::conj(d.lambda) * t);
      for (int c = 0; c < d.psi.channels(); ++c)
      {
         out.psi.at(node, c) = ep * d.psi.at(idx[xa], c);
      }
      for (int c = 0; c < d.phi.channels(); ++c)
      {
         out.phi.at(node, c) = eq * d.phi.at(idx[xa], c);
      }
   }
   return out;
}

GridFunction propagate(const DifferentialExpression &L, const GridFunction &psi0,
                       const Axis &t_axis, long max_substeps)
{
   const Grid &xg = psi0.grid();
   double h = 1e300;
   for (int a = 0; a < xg.dim(); ++a)
   {
      if (xg.axis(a).count > 1) { h = std::min(h, xg.axis(a).spacing()); }
   }
   const int order = std::max(L.order(), 0);
   const double step_cap = 0.25 * std::pow(h, order);
   const double dt_out = t_axis.spacing();
   const long sub = std::max<long>(1, (long)std::ceil(std::abs(dt_out) / step_cap));
   const long total = (long)(t_axis.count - 1) * sub;
   if (total > max_substeps)
   {
      std::ostringstream ss;
      ss << "stability bound step <= 0.25*h^" << order << " needs " << total
         << " substeps (cap " << max_substeps << ")";
      throw Error("stability", ss.str());
   }

   std::vector<Axis> axes;
   Axis ta = t_axis;
   ta.role = AxisRole::Evolution;
   axes.push_back(ta);
   for (const Axis &a : xg.axes()) { axes.push_back(a); }
   const Grid tx = make_uniform_grid(axes);

   GridFunction out(tx, psi0.channels());
   GridFunction y = psi0;
   const long slice = xg.node_count() * psi0.channels();
   auto store = [&](int it)
   {
      std::copy(y.values().begin(), y.values().end(),
                out.values().begin() + (long)it * slice);
   };
   store(0);
   const double dt = dt_out / (double)sub;
   for (int it = 1; it < t_axis.count; ++it)
   {
      for (long s = 0; s < sub; ++s)
      {
         const GridFunction k1 = L.apply(y);
         const GridFunction k2 = L.apply(y + Complex(0.5 * dt) * k1);
         const GridFunction k3 = L.apply(y + Complex(0.5 * dt) * k2);
         const GridFunction k4 = L.apply(y + Complex(dt) * k3);
         GridFunction incr = k1;
         incr += Complex(2.0) * k2;
         incr += Complex(2.0) * k3;
         incr += k4;
         incr *= Complex(dt / 6.0);
         y += incr;
      }
      y.check_finite();
      store(it);
   }
   return out;
}

CycleMatrix cycle_matrix(const SpectralFamily &fam, double x)
{
   const Grid &g = fam.grid();
   require_1d(g);
   const Axis &ax = g.axis(0);
   const double pos = (x - ax.lo) / ax.spacing();
   const int j = (int)std::lround(pos);
   if (j < 0 || j >= ax.count || std::abs(pos - j) > 1e-9)
   {
      throw Error("config", "cycle matrix target point must lie on a grid node");
   }
   const auto C = coupling_integrals(fam);
   CycleMatrix out{cycle_matrix_at(fam, C, j), ax.coord(j)};
   try { (void)invert_dense(out.omega); }
   catch (const SingularMatrixError &)
   {
      std::ostringstream ss;
      ss << "cycle matrix singular at x = " << out.x;
      throw Error("singular-cycle-matrix", ss.str());
   }
   return out;
}

TransformedFamily transformed_family(const SpectralFamily &fam)
{
   const Grid &g = fam.grid();
   require_1d(g);
   const int K = (int)fam.entries.size();
   const int nc = fam.channels();
   const int n = g.axis(0).count;
   const auto C = coupling_integrals(fam);

   TransformedFamily out;
   out.psi.assign(K, GridFunction(g, nc));
   out.phi.assign(K, GridFunction(g, nc));
   for (int j = 0; j < n; ++j)
   {
      DenseMatrix Binv, Sinv;
      try
      {
         Binv = invert_dense(cycle_matrix_at(fam, C, j));
         Sinv = invert_dense(star_matrix_at(fam, C, j));
      }
      catch (const SingularMatrixError &)
      {
         std::ostringstream ss;
         ss << "cycle matrix singular at x = " << g.axis(0).coord(j);
         throw Error("singular-cycle-matrix", ss.str());
      }
      for (int eta = 0; eta < K; ++eta)
      {
         for (int c = 0; c < nc; ++c)
         {
            Complex ap = 0.0, aq = 0.0;
            for (int xi = 0; xi < K; ++xi)
            {
               ap += fam.entries[xi].psi.at(j, c) * Binv(xi, eta);
               aq += fam.entries[xi].phi.at(j, c) * Sinv(xi, eta);
            }
            out.psi[eta].at(j, c) = ap;
            out.phi[eta].at(j, c) = aq;
         }
      }
   }
   return out;
}

int TransmutationKernel::channels() const
{
   return left.empty() ? 0 : left.front().channels();
}

DenseMatrix TransmutationKernel::sample(int ix, int iy) const
{
   const int nc = channels();
   DenseMatrix out(nc, nc);
   for (size_t k = 0; k < left.size(); ++k)
   {
      for (int a = 0; a < nc; ++a)
      {
         for (int b = 0; b < nc; ++b)
         {
            out(a, b) += left[k].at(ix, a) * right[k].at(iy, b);
         }
      }
   }
   return out;
}

TransmutationKernel build_kernel(const SpectralFamily &fam)
{
   const Grid &g = fam.grid();
   require_1d(g);
   TransmutationKernel K;
   K.grid = g;
   K.base = fam.base_index();
   const TransformedFamily tf = transformed_family(fam);
   for (size_t k = 0; k < fam.entries.size(); ++k)
   {
      GridFunction lft = tf.psi[k];
      lft *= Complex(-fam.entries[k].weight);
      K.left.push_back(std::move(lft));
      K.right.push_back(conj_gf(fam.entries[k].phi));
   }
   return K;
}

void write_kernel_csv(const TransmutationKernel &K, const std::string &path,
                      int stride)
{
   std::ofstream os(path);
   if (!os) { throw Error("io", "cannot write kernel CSV '" + path + "'"); }
   os.precision(17);
   const int nc = K.channels();
   os << "x,y";
   for (int a = 0; a < nc; ++a)
   {
      for (int b = 0; b < nc; ++b)
      {
         os << ",re_K" << a << b << ",im_K" << a << b;
      }
   }
   os << "\n";
   const Axis &ax = K.grid.axis(0);
   for (int ix = 0; ix < ax.count; ix += stride)
   {
      for (int iy = 0; iy < ax.count; iy += stride)
      {
         const DenseMatrix M = K.sample(ix, iy);
         os << ax.coord(ix) << "," << ax.coord(iy);
         for (int a = 0; a < nc; ++a)
         {
            for (int b = 0; b < nc; ++b)
            {
               os << "," << M(a, b).real() << "," << M(a, b).imag();
            }
         }
         os << "\n";
      }
   }
}

DelsarteOperator forward_operator(const SpectralFamily &fam)
{
   DelsarteOperator op;
   op.kernel = build_kernel(fam);
   op.direction = DelsarteOperator::Direction::Forward;
   return op;
}

DelsarteOperator inverse_operator(const SpectralFamily &fam)
{
   const Grid &g = fam.grid();
   require_1d(g);
   const TransformedFamily tf = transformed_family(fam);
   DelsarteOperator op;
   op.direction = DelsarteOperator::Direction::Inverse;
   op.kernel.grid = g;
   op.kernel.base = fam.base_index();
   for (size_t k = 0; k < fam.entries.size(); ++k)
   {
      GridFunction lft = fam.entries[k].psi;
      lft *= Complex(fam.entries[k].weight);
      op.kernel.left.push_back(std::move(lft));
      op.kernel.right.push_back(conj_gf(tf.phi[k]));
   }
   return op;
}

GridFunction apply_delsarte(const DelsarteOperator &op, const GridFunction &f)
{
   const TransmutationKernel &K = op.kernel;
   if (K.left.empty()) { return f; }
   const Grid &fg = f.grid();
   const std::string &xname = K.grid.axis(0).name;
   if (!fg.has_axis(xname))
   {
      throw Error("shape", "operand grid lacks the kernel axis '" + xname + "'");
   }
   const int a = fg.axis_index(xname);
   const Axis &ax = fg.axis(a);
   const Axis &kx = K.grid.axis(0);
   if (ax.count != kx.count || std::abs(ax.lo - kx.lo) > 1e-12 ||
       std::abs(ax.hi - kx.hi) > 1e-12)
   {
      throw Error("shape", "operand axis does not match the kernel grid");
   }
   if (f.channels() != K.channels())
   {
      throw Error("shape", "operand channel count does not match the kernel");
   }
   const int nc = f.channels();
   const int n = ax.count;
   const double h = ax.spacing();
   const long inner = fg.stride(a);
   const long block = inner * n;
   const long total = fg.node_count();

   GridFunction out = f;
   std::vector<Complex> density(n), cum(n);
   for (long b0 = 0; b0 < total; b0 += block)
   {
      for (long i0 = 0; i0 < inner; ++i0)
      {
         const long start = b0 + i0;
         for (size_t k = 0; k < K.left.size(); ++k)
         {
            for (int j = 0; j < n; ++j)
            {
               Complex acc = 0.0;
               for (int c = 0; c < nc; ++c)
               {
                  acc += K.right[k].at(j, c) * f.at(start + j * inner, c);
               }
               density[j] = acc;
            }
            cumulative_from(density, h, K.base, cum);
            for (int j = 0; j < n; ++j)
            {
               for (int c = 0; c < nc; ++c)
               {
                  out.at(start + j * inner, c) += K.left[k].at(j, c) * cum[j];
               }
            }
         }
      }
   }
   return out;
}

TransformedPotential transformed_potential_schrodinger(const SpectralFamily &fam,
                                                       const GridFunction &u)
{
   const Grid &g = family_grid_or(fam, u.grid());
   require_1d(g);
   if (u.channels() != 1)
   {
      throw Error("shape", "scalar potential expected");
   }
   TransformedPotential out;
   out.masked.assign(g.axis(0).count, 0);
   if (fam.entries.empty())
   {
      out.u_K = u;
      out.u_psi = u;
      return out;
   }
   if (fam.channels() != 1)
   {
      throw Error("shape", "single-channel family expected");
   }
   const int n = g.axis(0).count;
   const std::string &xname = g.axis(0).name;

   const TransmutationKernel K = build_kernel(fam);
   GridFunction diag(g, 1);
   for (int j = 0; j < n; ++j)
   {
      Complex acc = 0.0;
      for (size_t k = 0; k < K.left.size(); ++k)
      {
         acc += K.left[k].at(j, 0) * K.right[k].at(j, 0);
      }
      diag.at(j, 0) = acc;
   }
   // lower-limit Volterra convention: u~ = u + 2 d/dx K(x,x)
   GridFunction dd = fd_partial(diag, xname, 1);
   dd *= Complex(2.0);
   out.u_K = u + dd;

   const TransformedFamily tf = transformed_family(fam);
   const GridFunction &pt = tf.psi.front();
   const Complex lambda = fam.entries.front().lambda;
   const GridFunction ptxx = fd_partial(pt, xname, 2);
   const double floor = 1e-8 * std::max(pt.sup_norm(), 1e-300);
   std::vector<char> seed(n, 0);
   for (int j = 0; j < n; ++j)
   {
      if (std::abs(pt.at(j, 0)) < floor) { seed[j] = 1; }
   }
   for (int j = 0; j < n; ++j)
   {
      for (int k = std::max(0, j - 3); k <= std::min(n - 1, j + 3); ++k)
      {
         if (seed[k]) { out.masked[j] = 1; }
      }
   }
   out.u_psi = GridFunction(g, 1);
   for (int j = 0; j < n; ++j)
   {
      if (out.masked[j]) { out.u_psi.at(j, 0) = out.u_K.at(j, 0); }
      else { out.u_psi.at(j, 0) = lambda + ptxx.at(j, 0) / pt.at(j, 0); }
   }
   double mm = 0.0;
   for (int j = 3; j < n - 3; ++j)
   {
      if (out.masked[j]) { continue; }
      mm = std::max(mm, std::abs(out.u_K.at(j, 0) - out.u_psi.at(j, 0)));
   }
   out.mismatch = mm;
   return out;
}

std::vector<GridFunction> test_battery(const Grid &g, int channels, int count,
                                       unsigned seed)
{
   std::mt19937 rng(seed);
   std::uniform_real_distribution<double> unit(0.0, 1.0);
   std::vector<GridFunction> out;
   for (int k = 0; k < count; ++k)
   {
      std::vector<double> center(g.dim()), width(g.dim());
      for (int a = 0; a < g.dim(); ++a)
      {
         const Axis &ax = g.axis(a);
         const double span = ax.hi - ax.lo;
         center[a] = ax.lo + span * (0.35 + 0.3 * unit(rng));
         width[a] = span * (0.04 + 0.04 * unit(rng));
      }
      const double freq = (k % 2 == 1) ? 1.0 + 4.0 * unit(rng) : 0.0;
      std::vector<Complex> amp(channels);
      for (int c = 0; c < channels; ++c)
      {
         amp[c] = Complex(0.5 + unit(rng), 0.0) * (unit(rng) < 0.5 ? 1.0 : -1.0);
      }
      GridFunction f(g, channels);
      f.sample([&](const std::vector<double> &x, int c) -> Complex
      {
         double r2 = 0.0, phase = 0.0;
         for (size_t a = 0; a < x.size(); ++a)
         {
            const double d = (x[a] - center[a]) / width[a];
            r2 += d * d;
            phase += freq * (x[a] - center[a]);
         }
         return amp[c] * std::exp(-r2) * std::cos(phase);
      });
      out.push_back(std::move(f));
   }
   return out;
}

double intertwining_residual(const DifferentialExpression &L,
                             const DifferentialExpression &Ltilde,
                             const DelsarteOperator &op,
                             const std::vector<GridFunction> &battery)
{
   double worst = 0.0;
   for (const GridFunction &f : battery)
   {
      GridFunction r = apply_delsarte(op, L.apply(f));
      r -= Ltilde.apply(apply_delsarte(op, f));
      worst = std::max(worst, r.sup_norm() / std::max(f.sup_norm(), 1e-300));
   }
   return worst;
}

double kernel_pde_residual(const DifferentialExpression &L,
                           const DifferentialExpression &Ltilde,
                           const TransmutationKernel &K, int margin)
{
   if (K.left.empty()) { return 0.0; }
   const Grid &g = K.grid;
   const int n = g.axis(0).count;
   if (n < L.order() + 5 || n < Ltilde.order() + 5)
   {
      throw Error("insufficient-support", "kernel support too thin for the stencils");
   }
   const DifferentialExpression Ltc = Ltilde.conjugate();
   const DifferentialExpression Ls = L.formal_adjoint();
   const int nc = K.channels();
   const size_t Kn = K.left.size();

   std::vector<GridFunction> a(Kn), A(Kn), b(Kn), C(Kn);
   for (size_t k = 0; k < Kn; ++k)
   {
      a[k] = conj_gf(K.left[k]);
      A[k] = Ltc.apply(a[k]);
      b[k] = conj_gf(K.right[k]);
      C[k] = Ls.apply(b[k]);
   }
   double worst = 0.0;
   for (int ix = margin; ix < n - margin; ++ix)
   {
      for (int iy = margin; iy < n - margin; ++iy)
      {
         for (int ca = 0; ca < nc; ++ca)
         {
            for (int cb = 0; cb < nc; ++cb)
            {
               Complex r = 0.0;
               for (size_t k = 0; k < Kn; ++k)
               {
                  r += A[k].at(ix, ca) * b[k].at(iy, cb) -
                       a[k].at(ix, ca) * C[k].at(iy, cb);
               }
               worst = std::max(worst, std::abs(r));
            }
         }
      }
   }
   return worst;
}

double locality_check(const OpAction &T, const Grid &g, int channels,
                      int separation_cells, int pairs, unsigned seed)
{
   require_1d(g);
   if (separation_cells <= 4)
   {
      throw Error("invalid-separation",
                  "separation must exceed the stencil half-width of 4 cells");
   }
   const int n = g.axis(0).count;
   const int radius = std::max(4, std::min(12, (n - separation_cells - 6) / 4));
   if (2 * radius + separation_cells + 2 * radius + 2 >= n)
   {
      throw Error("invalid-separation", "grid too small for the requested separation");
   }
   std::mt19937 rng(seed);
   std::uniform_real_distribution<double> unit(0.0, 1.0);

   auto bump = [&](int center, const std::vector<double> &amp)
   {
      GridFunction f(g, channels);
      for (int j = std::max(0, center - radius + 1);
           j <= std::min(n - 1, center + radius - 1); ++j)
      {
         const double r = (double)(j - center) / (double)radius;
         const double v = std::exp(1.0 - 1.0 / (1.0 - r * r));
         for (int c = 0; c < channels; ++c) { f.at(j, c) = amp[c] * v; }
      }
      return f;
   };

   double worst = 0.0;
   for (int p = 0; p < pairs; ++p)
   {
      const int span = n - 2 - (4 * radius + separation_cells);
      const int left = 1 + (int)(unit(rng) * std::max(1, span));
      int cf = left + radius;
      int ch = cf + radius + separation_cells + radius;
      if (p % 2 == 1) { std::swap(cf, ch); }
      std::vector<double> af(channels), ah(channels);
      for (int c = 0; c < channels; ++c)
      {
         af[c] = 0.5 + unit(rng);
         ah[c] = 0.5 + unit(rng);
      }
      const GridFunction f = bump(cf, af);
      const GridFunction hfun = bump(ch, ah);
      worst = std::max(worst, std::abs(pairing(hfun, T(f))));
   }
   return worst;
}

double dressed_family_residual(const DifferentialExpression &Ltilde,
                       const SpectralFamily &fam, const Axis &t_axis)
{
   const Grid &xg = fam.grid();
   require_1d(xg);
   Axis ta = t_axis;
   ta.role = AxisRole::Evolution;
   const Grid tx = make_uniform_grid({ta, xg.axis(0)});

   const TransformedFamily tf = transformed_family(fam);
   EvolutionOperator fwd;
   fwd.axis = ta.name;
   fwd.spatial = Ltilde;
   EvolutionOperator adj;
   adj.axis = ta.name;
   adj.spatial = Ltilde.formal_adjoint().scaled(Complex(-1.0));

   double worst = 0.0;
   for (size_t k = 0; k < fam.entries.size(); ++k)
   {
      SpectralDatum td;
      td.lambda = fam.entries[k].lambda;
      td.psi = tf.psi[k];
      td.phi = tf.phi[k];
      const SeparablePair ext = separable_solutions(td, tx, ta.name);
      const GridFunction rp = evolution_apply(fwd, ext.psi);
      const GridFunction rq = evolution_apply(adj, ext.phi);
      worst = std::max(worst, rp.sup_norm() / std::max(ext.psi.sup_norm(), 1e-300));
      worst = std::max(worst, rq.sup_norm() / std::max(ext.phi.sup_norm(), 1e-300));
   }
   return worst;
}

} // namespace delsarte
