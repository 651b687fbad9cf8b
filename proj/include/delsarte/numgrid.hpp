#ifndef DELSARTE_NUMGRID_HPP
#define DELSARTE_NUMGRID_HPP

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "delsarte/errors.hpp"

namespace delsarte
{

using Complex = std::complex<double>;

enum class AxisRole { Evolution, Spatial };

struct Axis
{
   std::string name;
   double lo = 0.0, hi = 1.0;
   int count = 0;
   AxisRole role = AxisRole::Spatial;

   double spacing() const { return count > 1 ? (hi - lo) / (count - 1) : 0.0; }
   double coord(int i) const { return lo + i * spacing(); }
};

/// Tensor grid with uniform spacing per axis. Axis 0 is the slowest index in
/// the flattened node ordering (lexicographic over axes).
class Grid
{
public:
   Grid() = default;
   explicit Grid(std::vector<Axis> axes);

   int dim() const { return (int)axes_.size(); }
   const Axis &axis(int i) const { return axes_[i]; }
   const std::vector<Axis> &axes() const { return axes_; }
   int axis_index(const std::string &name) const;
   bool has_axis(const std::string &name) const;

   long node_count() const { return node_count_; }
   long stride(int axis) const { return strides_[axis]; }

   std::vector<int> unflatten(long node) const;
   long flatten(const std::vector<int> &idx) const;
   std::vector<double> coords(const std::vector<int> &idx) const;

   /// Indices of spatial axes, in declaration order.
   std::vector<int> spatial_axes() const;
   std::vector<int> evolution_axes() const;

   bool same_shape(const Grid &other) const;

private:
   std::vector<Axis> axes_;
   std::vector<long> strides_;
   long node_count_ = 0;
};

Grid make_uniform_grid(std::vector<Axis> axes);

/// C^N-valued samples over a Grid. Values are stored node-major with the
/// channel index contiguous. NaN/Inf entries are rejected at construction
/// and by assign().
class GridFunction
{
public:
   GridFunction() = default;
   GridFunction(Grid grid, int channels);
   GridFunction(Grid grid, int channels, std::vector<Complex> values);

   const Grid &grid() const { return grid_; }
   int channels() const { return channels_; }

   Complex &at(long node, int c) { return values_[node * channels_ + c]; }
   const Complex &at(long node, int c) const { return values_[node * channels_ + c]; }
   std::vector<Complex> &values() { return values_; }
   const std::vector<Complex> &values() const { return values_; }

   /// Fill from a callback taking the node coordinate vector; channel c.
   void sample(const std::function<Complex(const std::vector<double> &, int)> &f);

   void check_finite() const;

   double sup_norm() const;
   /// sqrt of the quadrature of |f|^2 over the full grid.
   double l2_norm() const;

   GridFunction &operator+=(const GridFunction &other);
   GridFunction &operator-=(const GridFunction &other);
   GridFunction &operator*=(Complex a);
   friend GridFunction operator+(GridFunction a, const GridFunction &b) { return a += b; }
   friend GridFunction operator-(GridFunction a, const GridFunction &b) { return a -= b; }
   friend GridFunction operator*(Complex a, GridFunction f) { return f *= a; }

private:
   Grid grid_;
   int channels_ = 0;
   std::vector<Complex> values_;
};

/// Stencil weights for the k-th derivative at evaluation point x0 over the
/// given node positions (Fornberg's recursion).
std::vector<double> fd_weights(double x0, const std::vector<double> &pts, int order);

/// Second-order partial derivative along the named axis: central stencils in
/// the interior, one-sided second-order closures at the boundary.
GridFunction fd_partial(const GridFunction &f, const std::string &axis, int order);

struct SubBox
{
   std::vector<int> lo, hi; // inclusive node index ranges, one pair per axis
};

/// Tensor-product trapezoidal rule over a node-aligned sub-box (whole grid by
/// default). Scalar (single-channel) functions only.
Complex quad(const GridFunction &f);
Complex quad(const GridFunction &f, const SubBox &box);

/// Semi-linear pairing (conjugate-linear in the first slot): quadrature of
/// conj(phi)^T psi over the full grid.
Complex pairing(const GridFunction &phi, const GridFunction &psi);

class DenseMatrix
{
public:
   DenseMatrix() = default;
   DenseMatrix(int rows, int cols);
   static DenseMatrix identity(int n);

   int rows() const { return rows_; }
   int cols() const { return cols_; }
   Complex &operator()(int i, int j) { return data_[(long)i * cols_ + j]; }
   const Complex &operator()(int i, int j) const { return data_[(long)i * cols_ + j]; }

   DenseMatrix &operator+=(const DenseMatrix &other);
   DenseMatrix &operator-=(const DenseMatrix &other);
   DenseMatrix &operator*=(Complex a);
   friend DenseMatrix operator*(const DenseMatrix &a, const DenseMatrix &b);

   double norm_inf() const; // max row sum
   double norm_max() const; // max entry magnitude

private:
   int rows_ = 0, cols_ = 0;
   std::vector<Complex> data_;
};

/// LU with partial pivoting. Throws SingularMatrixError when the selected
/// pivot falls below 1e-12 * ||A||.
std::vector<Complex> solve_dense(const DenseMatrix &A, const std::vector<Complex> &b);
DenseMatrix invert_dense(const DenseMatrix &A);

/// CSV exchange format: header "axis names..., re_0, im_0, ...", one node per
/// row, rows in lexicographic node order.
void write_csv(const GridFunction &f, const std::string &path);
GridFunction read_csv(const std::string &path, const Grid &grid);

} // namespace delsarte

#endif
