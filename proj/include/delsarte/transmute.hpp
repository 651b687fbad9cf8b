#ifndef DELSARTE_TRANSMUTE_HPP
#define DELSARTE_TRANSMUTE_HPP

#include <functional>
#include <string>
#include <vector>

#include "delsarte/diffop.hpp"
#include "delsarte/numgrid.hpp"

namespace delsarte
{

/// One atom of the discrete spectral measure: an eigenvalue, the eigenpair
/// (psi for L, phi for L*), and the measure weight.
struct SpectralDatum
{
   Complex lambda;
   double weight = 1.0;
   GridFunction psi, phi;
};

/// Finite spectral family over a one-dimensional spatial grid, with the
/// Volterra base point x0 (a grid node) and reference time t0.
struct SpectralFamily
{
   std::vector<SpectralDatum> entries;
   double x0 = 0.0;
   double t0 = 0.0;

   const Grid &grid() const;
   int channels() const;
   /// Node index of x0 on the spatial axis; x0 must lie on a node.
   int base_index() const;
};

/// Largest relative eigen-residual max ||L psi - lambda psi|| / ||psi|| and
/// the adjoint analogue; beyond tol raises a stale-family error.
double family_residual(const DifferentialExpression &L, const SpectralFamily &fam);
void check_family(const DifferentialExpression &L, const SpectralFamily &fam,
                  double tol = 1e-6);

/// Family file { "x0":, "t0":, "entries": [ { "lambda": [re, im],
/// "weight":, "psi": expr | [exprs] | {"csv": path}, "phi": ... } ] },
/// expressions in the spatial axis variable.
SpectralFamily read_family(const std::string &path, const Grid &grid);

/// Separable extension psi(t,x) = e^{lambda t} psi(x),
/// phi(t,x) = e^{-conj(lambda) t} phi(x) onto a (t;x) grid.
struct SeparablePair
{
   GridFunction psi, phi;
};
SeparablePair separable_solutions(const SpectralDatum &d, const Grid &txgrid,
                                  const std::string &t_axis = "t");

/// RK4 time stepping of d psi/dt = L psi from the slice psi0, returning the
/// solution over (t_axis; x). The explicit step obeys step <= c * h^order
/// with c = 0.25; exceeding max_substeps raises a stability error.
GridFunction propagate(const DifferentialExpression &L, const GridFunction &psi0,
                       const Axis &t_axis, long max_substeps = 2000000);

/// Omega_(x) of the cycle-matrix construction, entrywise
/// delta_{xi eta} + w_xi * int_{x0}^{x} conj(phi_xi)^T psi_eta dy.
struct CycleMatrix
{
   DenseMatrix omega;
   double x = 0.0;
};
CycleMatrix cycle_matrix(const SpectralFamily &fam, double x);

/// psi-tilde and phi-tilde over the whole grid: psi_tilde_eta =
/// sum_xi psi_xi [Omega_(x)^{-1} Omega_(x0)]_{xi eta} with Omega_(x0) = I,
/// and the starred analogue for phi. A singular cycle matrix anywhere on the
/// path is a hard error naming the point.
struct TransformedFamily
{
   std::vector<GridFunction> psi, phi;
};
TransformedFamily transformed_family(const SpectralFamily &fam);

/// Separable realization of K(x,y) = sum_xi left_xi(x) right_xi(y)^T; for
/// the forward operator left_xi = -w_xi psi_tilde_xi and
/// right_xi = conj(phi_xi). Dense samples exist only on demand.
struct TransmutationKernel
{
   Grid grid; // one-dimensional spatial grid
   int base = 0;
   std::vector<GridFunction> left, right;

   int channels() const;
   /// K(x_ix, y_iy) as an N x N matrix.
   DenseMatrix sample(int ix, int iy) const;
};

TransmutationKernel build_kernel(const SpectralFamily &fam);
/// CSV export with columns x, y, re K_ij..., im K_ij..., sampling every
/// stride-th node in each direction.
void write_kernel_csv(const TransmutationKernel &K, const std::string &path,
                      int stride = 1);

/// Omega = 1 + Volterra integral against a separable kernel. direction
/// records whether this is the forward dressing or the inverse built from
/// the tilde family.
struct DelsarteOperator
{
   enum class Direction { Forward, Inverse };
   TransmutationKernel kernel;
   Direction direction = Direction::Forward;
};

DelsarteOperator forward_operator(const SpectralFamily &fam);
DelsarteOperator inverse_operator(const SpectralFamily &fam);

/// f(x) + int_{x0}^{x} K(x,y) f(y) dy along the spatial axis, applied
/// slice-wise over any other axes of f's grid.
GridFunction apply_delsarte(const DelsarteOperator &op, const GridFunction &f);

/// Both reconstructions of the dressed Schroedinger potential for N = 1,
/// m = 1, L = -d^2 + u: the kernel-trace route and the eigen-ratio route,
/// plus the node mask where psi-tilde vanishes (exclusion radius 3 cells)
/// and the sup-norm mismatch between the routes on unmasked interior nodes.
struct TransformedPotential
{
   GridFunction u_K, u_psi;
   std::vector<char> masked;
   double mismatch = 0.0;
};
TransformedPotential transformed_potential_schrodinger(const SpectralFamily &fam,
                                                       const GridFunction &u);

/// Reproducible battery of smooth interior-supported test profiles
/// (Gaussians and modulated Gaussians).
std::vector<GridFunction> test_battery(const Grid &g, int channels, int count,
                                       unsigned seed);

/// max_f ||Omega(L f) - Ltilde(Omega f)||_sup / ||f||_sup over the battery.
double intertwining_residual(const DifferentialExpression &L,
                             const DifferentialExpression &Ltilde,
                             const DelsarteOperator &op,
                             const std::vector<GridFunction> &battery);

/// Sup over interior (x,y) pairs of the kernel PDE residual
/// Ltilde-bar_x Kbar - (L*_y Kbar^T)^T, using the separable structure.
double kernel_pde_residual(const DifferentialExpression &L,
                           const DifferentialExpression &Ltilde,
                           const TransmutationKernel &K, int margin = 2);

/// Black-box operator action on grid functions.
using OpAction = std::function<GridFunction(const GridFunction &)>;

/// max |pairing(h, T f)| over pairs of bump functions whose supports are
/// separated by at least separation_cells grid cells (> stencil width).
double locality_check(const OpAction &T, const Grid &g, int channels,
                      int separation_cells, int pairs, unsigned seed);

/// max over the tilde family of the normalized residuals of
/// d psi~/dt = Ltilde psi~ and d phi~/dt = -Ltilde* phi~ under the
/// separable t-extension with the (unchanged) eigenvalues.
double dressed_family_residual(const DifferentialExpression &Ltilde,
                       const SpectralFamily &fam, const Axis &t_axis);

} // namespace delsarte

#endif
