#ifndef DELSARTE_CONCOMITANT_HPP
#define DELSARTE_CONCOMITANT_HPP

#include <map>
#include <string>
#include <vector>

#include "delsarte/diffop.hpp"
#include "delsarte/numgrid.hpp"

namespace delsarte
{

/// Axis-aligned grid cell: the cube spanned from the base node by one step
/// along each axis in dirs (strictly ascending axis indices). dim() = 0
/// gives a point, 1 an edge, 2 a plaquette, 3 a volume cell.
struct Cell
{
   std::vector<int> base;
   std::vector<int> dirs;

   int dim() const { return (int)dirs.size(); }
   bool operator<(const Cell &o) const
   {
      if (base != o.base) { return base < o.base; }
      return dirs < o.dirs;
   }
   bool operator==(const Cell &o) const { return base == o.base && dirs == o.dirs; }
};

struct OrientedCell
{
   Cell cell;
   int sign = 1;

   bool operator==(const OrientedCell &o) const
   {
      return cell == o.cell && sign == o.sign;
   }
};

using Chain = std::vector<OrientedCell>;

/// Sort cells, merge repeated ones, drop zero-signed entries.
Chain canonical_chain(Chain c);
Chain chain_sum(const Chain &a, const Chain &b);
Chain chain_negate(Chain c);
bool chains_equal(const Chain &a, const Chain &b);

/// Cubical boundary operator; satisfies boundary(boundary(c)) == {} exactly.
Chain boundary(const Chain &c);

/// Throws Error("out-of-domain") when a cell leaves the grid index box.
void check_in_grid(const Chain &c, const Grid &g);

/// All dim(dirs)-cells tiling the index box [lo, hi] along the dirs axes
/// (base fixed at lo on the remaining axes), sign +1.
Chain cube_chain(const Grid &g, const std::vector<int> &lo, const std::vector<int> &hi,
                 const std::vector<int> &dirs);

/// Edge path from start following legs (axis name, signed step count).
/// Returns the 1-chain; end receives the final node index when non-null.
Chain path_chain(const Grid &g, std::vector<int> start,
                 const std::vector<std::pair<std::string, int>> &legs,
                 std::vector<int> *end = nullptr);

/// (m-1)-cycle with its marker point pinning the evaluation node.
struct Cycle
{
   Chain cells;
   std::vector<int> marker;

   void validate(const Grid &g) const; // closed and inside the grid
};

/// Degree-m surface chain spanning two boundary cycles.
struct SurfaceChain
{
   Chain cells;
   Cycle plus_cycle, minus_cycle;

   /// boundary(cells) must equal plus_cycle - minus_cycle exactly.
   void validate(const Grid &g) const;
};

void write_surface_chain(const SurfaceChain &s, const std::string &path);
SurfaceChain read_surface_chain(const std::string &path, const Grid &g);

/// Differential form of the given degree over an ambient grid. Components
/// are scalar grid functions keyed by the ascending axis-index tuple of the
/// corresponding coordinate basis form; absent components are zero.
class MForm
{
public:
   MForm() = default;
   MForm(Grid grid, int degree);

   const Grid &grid() const { return grid_; }
   int degree() const { return degree_; }

   /// Mutable access; creates a zero component on first use.
   GridFunction &component(std::vector<int> axes);
   const GridFunction *find_component(const std::vector<int> &axes) const;
   const std::map<std::vector<int>, GridFunction> &components() const
   {
      return components_;
   }

   /// Accumulate coeff dx_{a1} ^ ... ^ dx_{ad} with the axes in any order;
   /// the permutation parity folds into the sign.
   void add_wedge_term(const std::vector<int> &axes_in_order, const GridFunction &coeff);

   MForm &operator+=(const MForm &other);
   MForm &operator-=(const MForm &other);
   MForm &operator*=(Complex a);

   double sup_norm() const;
   /// Sup over nodes at least margin cells from every boundary face.
   double sup_norm_interior(int margin) const;

private:
   Grid grid_;
   int degree_ = 0;
   std::map<std::vector<int>, GridFunction> components_;
};

/// Bilinear concomitant Z_i[phi,psi] along the named spatial axis of L,
/// via integration-by-parts peeling in ascending axis order. Satisfies
/// sum_i (-1)^{i+1} d_i Z_i = conj(phi)^T (L psi) - conj(L* phi)^T psi
/// pointwise to O(h^2).
GridFunction concomitant_axis(const DifferentialExpression &L, const GridFunction &phi,
                              const GridFunction &psi, const std::string &axis);

/// The closed m-form built from a solution pair of the evolution equations
/// d psi/dt = L psi, d phi/dt = -L* phi. Sign convention: the pure-dx
/// component is -conj(phi)^T psi.
MForm assemble_Zm(const EvolutionOperator &Lt, const GridFunction &phi,
                  const GridFunction &psi);

/// Two-parameter variant carrying both evolution axes.
MForm assemble_extended_Zm(const EvolutionOperator &Lt, const EvolutionOperator &My,
                           const GridFunction &phi, const GridFunction &psi);

/// Numerical exterior derivative (degree m -> m+1).
MForm dform(const MForm &Z);

/// Interior sup-norm of dform(assemble_Zm(Lt, phi, psi)). Checks the
/// evolution equations first; residuals beyond 10x solve_tol raise a
/// precondition-violation error. solve_tol < 0 picks an h^2-scaled default.
double closedness_residual(const EvolutionOperator &Lt, const GridFunction &phi,
                           const GridFunction &psi, double solve_tol = -1.0);

/// Oriented trapezoid integral of Z over the cells of the chain/surface.
Complex chain_integral(const MForm &Z, const Chain &cells);
Complex surface_integral(const MForm &Z, const SurfaceChain &s);

/// |surface_integral(Z,s1) - surface_integral(Z,s2)| for two surfaces with
/// identical boundary cycles; mismatched boundaries raise a homology error.
double path_independence_gap(const MForm &Z, const SurfaceChain &s1,
                             const SurfaceChain &s2);

} // namespace delsarte

#endif
