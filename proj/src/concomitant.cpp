#include "delsarte/concomitant.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"

namespace delsarte
{

namespace
{

void check_cell(const Cell &c, int expected_dim = -1)
{
   for (size_t k = 1; k < c.dirs.size(); ++k)
   {
      if (c.dirs[k] <= c.dirs[k - 1])
      {
         throw Error("shape", "cell direction axes must be strictly ascending");
      }
   }
   if (expected_dim >= 0 && c.dim() != expected_dim)
   {
      throw Error("shape", "cell dimension mismatch in chain");
   }
}

} // namespace

Chain canonical_chain(Chain c)
{
   std::map<Cell, int> acc;
   for (const auto &oc : c) { acc[oc.cell] += oc.sign; }
   Chain out;
   for (const auto &[cell, sign] : acc)
   {
      if (sign != 0) { out.push_back({cell, sign}); }
   }
   return out;
}

Chain chain_sum(const Chain &a, const Chain &b)
{
   Chain c = a;
   c.insert(c.end(), b.begin(), b.end());
   return canonical_chain(std::move(c));
}

Chain chain_negate(Chain c)
{
   for (auto &oc : c) { oc.sign = -oc.sign; }
   return c;
}

bool chains_equal(const Chain &a, const Chain &b)
{
   return canonical_chain(a) == canonical_chain(b) ? true : false;
}

Chain boundary(const Chain &c)
{
   Chain out;
   for (const auto &oc : c)
   {
      check_cell(oc.cell);
      const Cell &cell = oc.cell;
      for (int k = 0; k < cell.dim(); ++k)
      {
         std::vector<int> dirs = cell.dirs;
         dirs.erase(dirs.begin() + k);
         Cell lo{cell.base, dirs};
         Cell hi{cell.base, dirs};
         hi.base[cell.dirs[k]] += 1;
         const int s = (k % 2 == 0 ? 1 : -1) * oc.sign;
         out.push_back({hi, s});
         out.push_back({lo, -s});
      }
   }
   return canonical_chain(std::move(out));
}

void check_in_grid(const Chain &c, const Grid &g)
{
   for (const auto &oc : c)
   {
      check_cell(oc.cell);
      if ((int)oc.cell.base.size() != g.dim())
      {
         throw Error("out-of-domain", "cell index dimension differs from grid");
      }
      for (int a = 0; a < g.dim(); ++a)
      {
         int hi = oc.cell.base[a];
         if (std::find(oc.cell.dirs.begin(), oc.cell.dirs.end(), a) !=
             oc.cell.dirs.end())
         {
            hi += 1;
         }
         if (oc.cell.base[a] < 0 || hi >= g.axis(a).count)
         {
            throw Error("out-of-domain", "chain cell leaves the grid");
         }
      }
   }
}

Chain cube_chain(const Grid &g, const std::vector<int> &lo, const std::vector<int> &hi,
                 const std::vector<int> &dirs)
{
   Chain out;
   std::vector<int> base = lo;
   while (true)
   {
      out.push_back({Cell{base, dirs}, 1});
      int k = (int)dirs.size() - 1;
      while (k >= 0)
      {
         if (++base[dirs[k]] < hi[dirs[k]]) { break; }
         base[dirs[k]] = lo[dirs[k]];
         --k;
      }
      if (k < 0) { break; }
   }
   check_in_grid(out, g);
   return out;
}

Chain path_chain(const Grid &g, std::vector<int> start,
                 const std::vector<std::pair<std::string, int>> &legs,
                 std::vector<int> *end)
{
   Chain out;
   std::vector<int> cur = std::move(start);
   for (const auto &[axis, steps] : legs)
   {
      const int a = g.axis_index(axis);
      const int dir = steps >= 0 ? 1 : -1;
      for (int k = 0; k < std::abs(steps); ++k)
      {
         if (dir > 0)
         {
            out.push_back({Cell{cur, {a}}, 1});
            cur[a] += 1;
         }
         else
         {
            cur[a] -= 1;
            out.push_back({Cell{cur, {a}}, -1});
         }
      }
   }
   check_in_grid(out, g);
   if (end) { *end = cur; }
   return out;
}

void Cycle::validate(const Grid &g) const
{
   check_in_grid(cells, g);
   if (!boundary(cells).empty())
   {
      throw Error("homology", "cycle has a nonempty boundary");
   }
}

void SurfaceChain::validate(const Grid &g) const
{
   check_in_grid(cells, g);
   plus_cycle.validate(g);
   minus_cycle.validate(g);
   const Chain want = chain_sum(plus_cycle.cells, chain_negate(minus_cycle.cells));
   if (!chains_equal(boundary(cells), want))
   {
      throw Error("homology", "surface boundary differs from its boundary cycles");
   }
}

namespace
{

nlohmann::json cell_to_json(const Cell &c)
{
   nlohmann::json corners = nlohmann::json::array();
   const int d = c.dim();
   for (int bits = 0; bits < (1 << d); ++bits)
   {
      std::vector<int> corner = c.base;
      for (int k = 0; k < d; ++k)
      {
         if (bits & (1 << k)) { corner[c.dirs[k]] += 1; }
      }
      corners.push_back(corner);
   }
   return corners;
}

Cell cell_from_json(const nlohmann::json &corners)
{
   if (!corners.is_array() || corners.empty())
   {
      throw Error("config", "surface chain: cell needs a corner list");
   }
   std::vector<std::vector<int>> pts;
   for (const auto &p : corners) { pts.push_back(p.get<std::vector<int>>()); }
   Cell c;
   c.base = pts[0];
   for (const auto &p : pts)
   {
      if (p.size() != c.base.size())
      {
         throw Error("config", "surface chain: ragged corner list");
      }
      for (size_t a = 0; a < p.size(); ++a) { c.base[a] = std::min(c.base[a], p[a]); }
   }
   for (size_t a = 0; a < c.base.size(); ++a)
   {
      for (const auto &p : pts)
      {
         const int d = p[a] - c.base[a];
         if (d < 0 || d > 1)
         {
            throw Error("config", "surface chain: corners do not span a unit cell");
         }
         if (d == 1 && (c.dirs.empty() || c.dirs.back() != (int)a))
         {
            c.dirs.push_back((int)a);
         }
      }
   }
   if ((size_t)(1 << c.dim()) != pts.size())
   {
      throw Error("config", "surface chain: corner count does not match cell rank");
   }
   return c;
}

nlohmann::json chain_to_json(const Chain &c)
{
   nlohmann::json out = nlohmann::json::array();
   for (const auto &oc : c)
   {
      out.push_back({{"cell", cell_to_json(oc.cell)}, {"sign", oc.sign}});
   }
   return out;
}

Chain chain_from_json(const nlohmann::json &j)
{
   Chain out;
   for (const auto &e : j)
   {
      out.push_back({cell_from_json(e.at("cell")), e.at("sign").get<int>()});
   }
   return out;
}

} // namespace

void write_surface_chain(const SurfaceChain &s, const std::string &path)
{
   nlohmann::json j;
   j["dim"] = s.cells.empty() ? 0 : s.cells.front().cell.dim();
   j["cells"] = chain_to_json(s.cells);
   j["plus"] = {{"marker", s.plus_cycle.marker}, {"cells", chain_to_json(s.plus_cycle.cells)}};
   j["minus"] = {{"marker", s.minus_cycle.marker},
                 {"cells", chain_to_json(s.minus_cycle.cells)}};
   std::ofstream os(path);
   if (!os) { throw Error("io", "cannot write surface chain '" + path + "'"); }
   os << j.dump(2) << "\n";
}

SurfaceChain read_surface_chain(const std::string &path, const Grid &g)
{
   std::ifstream is(path);
   if (!is) { throw Error("io", "cannot open surface chain '" + path + "'"); }
   nlohmann::json j;
   try { is >> j; }
   catch (const std::exception &e)
   {
      throw Error("config", std::string("surface chain: ") + e.what());
   }
   SurfaceChain s;
   s.cells = chain_from_json(j.at("cells"));
   s.plus_cycle.cells = chain_from_json(j.at("plus").at("cells"));
   s.plus_cycle.marker = j.at("plus").at("marker").get<std::vector<int>>();
   s.minus_cycle.cells = chain_from_json(j.at("minus").at("cells"));
   s.minus_cycle.marker = j.at("minus").at("marker").get<std::vector<int>>();
   s.validate(g);
   return s;
}

MForm::MForm(Grid grid, int degree) : grid_(std::move(grid)), degree_(degree)
{
   if (degree_ < 0 || degree_ > grid_.dim())
   {
      throw Error("shape", "form degree outside [0, dim]");
   }
}

GridFunction &MForm::component(std::vector<int> axes)
{
   if ((int)axes.size() != degree_)
   {
      throw Error("shape", "component tuple length differs from form degree");
   }
   auto it = components_.find(axes);
   if (it == components_.end())
   {
      it = components_.emplace(std::move(axes), GridFunction(grid_, 1)).first;
   }
   return it->second;
}

const GridFunction *MForm::find_component(const std::vector<int> &axes) const
{
   auto it = components_.find(axes);
   return it == components_.end() ? nullptr : &it->second;
}

void MForm::add_wedge_term(const std::vector<int> &axes_in_order,
                           const GridFunction &coeff)
{
   std::vector<int> axes = axes_in_order;
   int swaps = 0;
   for (size_t i = 0; i < axes.size(); ++i)
   {
      for (size_t j = i + 1; j < axes.size(); ++j)
      {
         if (axes[j] < axes[i])
         {
            std::swap(axes[i], axes[j]);
            ++swaps;
         }
         else if (axes[j] == axes[i])
         {
            return; // repeated axis, wedge vanishes
         }
      }
   }
   GridFunction &dst = component(std::move(axes));
   if (swaps % 2 == 0) { dst += coeff; }
   else { dst -= coeff; }
}

MForm &MForm::operator+=(const MForm &other)
{
   for (const auto &[axes, f] : other.components_) { component(axes) += f; }
   return *this;
}

MForm &MForm::operator-=(const MForm &other)
{
   for (const auto &[axes, f] : other.components_) { component(axes) -= f; }
   return *this;
}

MForm &MForm::operator*=(Complex a)
{
   for (auto &[axes, f] : components_) { f *= a; }
   return *this;
}

double MForm::sup_norm() const
{
   double m = 0.0;
   for (const auto &[axes, f] : components_) { m = std::max(m, f.sup_norm()); }
   return m;
}

double MForm::sup_norm_interior(int margin) const
{
   double m = 0.0;
   for (const auto &[axes, f] : components_)
   {
      for (long node = 0; node < grid_.node_count(); ++node)
      {
         const std::vector<int> idx = grid_.unflatten(node);
         bool interior = true;
         for (int a = 0; a < grid_.dim(); ++a)
         {
            if (grid_.axis(a).count <= 2 * margin) { continue; }
            if (idx[a] < margin || idx[a] >= grid_.axis(a).count - margin)
            {
               interior = false;
               break;
            }
         }
         if (interior) { m = std::max(m, std::abs(f.at(node, 0))); }
      }
   }
   return m;
}

GridFunction concomitant_axis(const DifferentialExpression &L, const GridFunction &phi,
                              const GridFunction &psi, const std::string &axis)
{
   const Grid &g = psi.grid();
   if (!phi.grid().same_shape(g) || phi.channels() != psi.channels() ||
       phi.channels() != L.channels())
   {
      throw Error("shape", "concomitant operands must share grid and channels");
   }
   const auto &axes = L.axes();
   const auto it_ax = std::find(axes.begin(), axes.end(), axis);
   if (it_ax == axes.end())
   {
      throw Error("shape", "axis '" + axis + "' is not a spatial axis of the operator");
   }
   const int pos = (int)(it_ax - axes.begin());
   const int n = L.channels();

   GridFunction Z(g, 1);
   VarMap vars;
   for (int a = 0; a < g.dim(); ++a) { vars.emplace_back(g.axis(a).name, 0.0); }
   std::vector<Complex> coeff(n * n);

   for (const auto &[alpha, field] : L.terms())
   {
      if (alpha[pos] == 0) { continue; }

      // G = conj(phi)^T a with all lower-axis derivatives already applied
      GridFunction G(g, n);
      std::vector<int> idx(g.dim(), 0);
      for (long node = 0; node < g.node_count(); ++node)
      {
         for (int a = 0; a < g.dim(); ++a) { vars[a].second = g.axis(a).coord(idx[a]); }
         field.eval(g, idx, vars, coeff.data());
         for (int c = 0; c < n; ++c)
         {
            Complex acc = 0.0;
            for (int r = 0; r < n; ++r)
            {
               acc += std::conj(phi.at(node, r)) * coeff[r * n + c];
            }
            G.at(node, c) = acc;
         }
         for (int a = g.dim() - 1; a >= 0; --a)
         {
            if (++idx[a] < g.axis(a).count) { break; }
            idx[a] = 0;
         }
      }
      int lower = 0;
      for (int j = 0; j < pos; ++j)
      {
         lower += alpha[j];
         if (alpha[j] > 0) { G = fd_partial(G, axes[j], alpha[j]); }
      }

      // psi with the higher-axis derivatives applied
      GridFunction P = psi;
      for (int j = pos + 1; j < (int)axes.size(); ++j)
      {
         if (alpha[j] > 0) { P = fd_partial(P, axes[j], alpha[j]); }
      }

      const double s0 = (lower % 2 == 0) ? 1.0 : -1.0;
      const int p = alpha[pos];
      for (int j = 0; j < p; ++j)
      {
         const GridFunction Gj = (j == 0) ? G : fd_partial(G, axis, j);
         const int k = p - 1 - j;
         const GridFunction Pk = (k == 0) ? P : fd_partial(P, axis, k);
         const double s = s0 * ((j % 2 == 0) ? 1.0 : -1.0);
         for (long node = 0; node < g.node_count(); ++node)
         {
            Complex acc = 0.0;
            for (int c = 0; c < n; ++c) { acc += Gj.at(node, c) * Pk.at(node, c); }
            Z.at(node, 0) += s * acc;
         }
      }
   }

   // divergence convention sum_i (-1)^{i+1} d_i Z_i, i 1-based
   if (pos % 2 == 1) { Z *= Complex(-1.0); }
   return Z;
}

namespace
{

GridFunction pair_density(const GridFunction &phi, const GridFunction &psi)
{
   GridFunction out(psi.grid(), 1);
   for (long node = 0; node < psi.grid().node_count(); ++node)
   {
      Complex acc = 0.0;
      for (int c = 0; c < psi.channels(); ++c)
      {
         acc += std::conj(phi.at(node, c)) * psi.at(node, c);
      }
      out.at(node, 0) = acc;
   }
   return out;
}

// Components sum_i (-1)^i Z_i dx_1 ^ .. ^ d(evo) [slot i] ^ .. ^ dx_m for one
// evolution operator; the pure-dx term is handled by the callers.
void add_evolution_components(MForm &Z, const EvolutionOperator &op,
                              const GridFunction &phi, const GridFunction &psi)
{
   const Grid &g = psi.grid();
   const auto &axes = op.spatial.axes();
   const int m = (int)axes.size();
   const int evo = g.axis_index(op.axis);
   for (int i = 0; i < m; ++i)
   {
      GridFunction Zi = concomitant_axis(op.spatial, phi, psi, axes[i]);
      if ((i + 1) % 2 == 1) { Zi *= Complex(-1.0); }
      std::vector<int> order;
      for (int j = 0; j < m; ++j)
      {
         order.push_back(j == i ? evo : g.axis_index(axes[j]));
      }
      Z.add_wedge_term(order, Zi);
   }
}

} // namespace

MForm assemble_Zm(const EvolutionOperator &Lt, const GridFunction &phi,
                  const GridFunction &psi)
{
   const Grid &g = psi.grid();
   if (!g.has_axis(Lt.axis))
   {
      throw Error("shape", "grid lacks evolution axis '" + Lt.axis + "'");
   }
   const auto &axes = Lt.spatial.axes();
   MForm Z(g, (int)axes.size());
   add_evolution_components(Z, Lt, phi, psi);

   GridFunction pp = pair_density(phi, psi);
   pp *= Complex(-1.0);
   std::vector<int> spatial;
   for (const auto &ax : axes) { spatial.push_back(g.axis_index(ax)); }
   Z.add_wedge_term(spatial, pp);
   return Z;
}

MForm assemble_extended_Zm(const EvolutionOperator &Lt, const EvolutionOperator &My,
                           const GridFunction &phi, const GridFunction &psi)
{
   const Grid &g = psi.grid();
   if (!g.has_axis(Lt.axis) || !g.has_axis(My.axis))
   {
      throw Error("shape", "grid lacks an evolution axis of the pair");
   }
   if (My.spatial.axes() != Lt.spatial.axes())
   {
      throw Error("shape", "evolution pair must share spatial axes");
   }
   MForm Z = assemble_Zm(Lt, phi, psi);
   add_evolution_components(Z, My, phi, psi);
   return Z;
}

MForm dform(const MForm &Z)
{
   const Grid &g = Z.grid();
   MForm out(g, Z.degree() + 1);
   for (const auto &[axes, f] : Z.components())
   {
      for (int a = 0; a < g.dim(); ++a)
      {
         if (std::find(axes.begin(), axes.end(), a) != axes.end()) { continue; }
         if (g.axis(a).count < 2) { continue; }
         GridFunction df = fd_partial(f, g.axis(a).name, 1);
         std::vector<int> order{a};
         order.insert(order.end(), axes.begin(), axes.end());
         out.add_wedge_term(order, df);
      }
   }
   return out;
}

double closedness_residual(const EvolutionOperator &Lt, const GridFunction &phi,
                           const GridFunction &psi, double solve_tol)
{
   const Grid &g = psi.grid();
   const double scale = std::max({phi.sup_norm(), psi.sup_norm(), 1e-300});
   if (solve_tol < 0.0)
   {
      double h = 0.0;
      for (int a = 0; a < g.dim(); ++a)
      {
         if (g.axis(a).count > 1) { h = std::max(h, g.axis(a).spacing()); }
      }
      solve_tol = 100.0 * h * h * scale;
   }
   const GridFunction rpsi = evolution_apply(Lt, psi);
   EvolutionOperator adj;
   adj.axis = Lt.axis;
   adj.sign = Lt.sign;
   adj.spatial = Lt.spatial.formal_adjoint().scaled(Complex(-1.0));
   const GridFunction rphi = evolution_apply(adj, phi);
   const double res = std::max(rpsi.sup_norm(), rphi.sup_norm());
   if (res > 10.0 * solve_tol)
   {
      std::ostringstream ss;
      ss << "evolution residual " << res << " exceeds 10 * " << solve_tol;
      throw Error("precondition-violation", ss.str());
   }
   return dform(assemble_Zm(Lt, phi, psi)).sup_norm_interior(2);
}

Complex chain_integral(const MForm &Z, const Chain &cells)
{
   const Grid &g = Z.grid();
   check_in_grid(cells, g);
   Complex total = 0.0;
   for (const auto &oc : cells)
   {
      check_cell(oc.cell, Z.degree());
      const GridFunction *comp = Z.find_component(oc.cell.dirs);
      if (!comp) { continue; }
      const int d = oc.cell.dim();
      double vol = 1.0;
      for (int a : oc.cell.dirs) { vol *= g.axis(a).spacing(); }
      Complex mean = 0.0;
      for (int bits = 0; bits < (1 << d); ++bits)
      {
         std::vector<int> idx = oc.cell.base;
         for (int k = 0; k < d; ++k)
         {
            if (bits & (1 << k)) { idx[oc.cell.dirs[k]] += 1; }
         }
         mean += comp->at(g.flatten(idx), 0);
      }
      mean /= (double)(1 << d);
      total += (double)oc.sign * vol * mean;
   }
   return total;
}

Complex surface_integral(const MForm &Z, const SurfaceChain &s)
{
   check_in_grid(s.cells, Z.grid());
   return chain_integral(Z, s.cells);
}

double path_independence_gap(const MForm &Z, const SurfaceChain &s1,
                             const SurfaceChain &s2)
{
   if (!chains_equal(boundary(s1.cells), boundary(s2.cells)))
   {
      throw Error("homology", "surfaces do not share a boundary");
   }
   return std::abs(surface_integral(Z, s1) - surface_integral(Z, s2));
}

} // namespace delsarte
