#include "delsarte/numgrid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace delsarte
{

Grid::Grid(std::vector<Axis> axes) : axes_(std::move(axes))
{
   if (axes_.empty())
   {
      throw Error("invalid-grid", "grid needs at least one axis");
   }
   for (const Axis &a : axes_)
   {
      if (a.count < 3)
      {
         throw Error("invalid-grid", "axis '" + a.name + "' has fewer than 3 points");
      }
      if (!(a.lo < a.hi))
      {
         throw Error("invalid-grid", "axis '" + a.name + "' has zero or negative length");
      }
   }
   strides_.assign(axes_.size(), 1);
   node_count_ = 1;
   for (int i = (int)axes_.size() - 1; i >= 0; --i)
   {
      strides_[i] = node_count_;
      node_count_ *= axes_[i].count;
   }
}

int Grid::axis_index(const std::string &name) const
{
   for (int i = 0; i < (int)axes_.size(); ++i)
   {
      if (axes_[i].name == name) { return i; }
   }
   throw Error("shape", "axis '" + name + "' not in grid");
}

bool Grid::has_axis(const std::string &name) const
{
   for (const Axis &a : axes_)
   {
      if (a.name == name) { return true; }
   }
   return false;
}

std::vector<int> Grid::unflatten(long node) const
{
   std::vector<int> idx(axes_.size());
   for (size_t i = 0; i < axes_.size(); ++i)
   {
      idx[i] = (int)(node / strides_[i]);
      node -= idx[i] * strides_[i];
   }
   return idx;
}

long Grid::flatten(const std::vector<int> &idx) const
{
   long node = 0;
   for (size_t i = 0; i < axes_.size(); ++i) { node += idx[i] * strides_[i]; }
   return node;
}

std::vector<double> Grid::coords(const std::vector<int> &idx) const
{
   std::vector<double> x(axes_.size());
   for (size_t i = 0; i < axes_.size(); ++i) { x[i] = axes_[i].coord(idx[i]); }
   return x;
}

std::vector<int> Grid::spatial_axes() const
{
   std::vector<int> out;
   for (int i = 0; i < (int)axes_.size(); ++i)
   {
      if (axes_[i].role == AxisRole::Spatial) { out.push_back(i); }
   }
   return out;
}

std::vector<int> Grid::evolution_axes() const
{
   std::vector<int> out;
   for (int i = 0; i < (int)axes_.size(); ++i)
   {
      if (axes_[i].role == AxisRole::Evolution) { out.push_back(i); }
   }
   return out;
}

bool Grid::same_shape(const Grid &other) const
{
   if (axes_.size() != other.axes_.size()) { return false; }
   for (size_t i = 0; i < axes_.size(); ++i)
   {
      const Axis &a = axes_[i], &b = other.axes_[i];
      if (a.name != b.name || a.count != b.count ||
          std::abs(a.lo - b.lo) > 1e-14 * (1 + std::abs(a.lo)) ||
          std::abs(a.hi - b.hi) > 1e-14 * (1 + std::abs(a.hi)))
      {
         return false;
      }
   }
   return true;
}

Grid make_uniform_grid(std::vector<Axis> axes)
{
   return Grid(std::move(axes));
}

GridFunction::GridFunction(Grid grid, int channels)
   : grid_(std::move(grid)), channels_(channels)
{
   if (channels < 1) { throw Error("shape", "channel dimension must be >= 1"); }
   values_.assign(grid_.node_count() * channels_, Complex(0.0));
}

GridFunction::GridFunction(Grid grid, int channels, std::vector<Complex> values)
   : grid_(std::move(grid)), channels_(channels), values_(std::move(values))
{
   if (channels < 1) { throw Error("shape", "channel dimension must be >= 1"); }
   if ((long)values_.size() != grid_.node_count() * channels_)
   {
      throw Error("shape", "value array does not match grid node count x channels");
   }
   check_finite();
}

void GridFunction::sample(const std::function<Complex(const std::vector<double> &, int)> &f)
{
   for (long node = 0; node < grid_.node_count(); ++node)
   {
      std::vector<double> x = grid_.coords(grid_.unflatten(node));
      for (int c = 0; c < channels_; ++c) { at(node, c) = f(x, c); }
   }
   check_finite();
}

void GridFunction::check_finite() const
{
   for (const Complex &v : values_)
   {
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      {
         throw Error("shape", "non-finite value in grid function");
      }
   }
}

double GridFunction::sup_norm() const
{
   double m = 0.0;
   for (const Complex &v : values_) { m = std::max(m, std::abs(v)); }
   return m;
}

double GridFunction::l2_norm() const
{
   // quadrature weights: trapezoid factor per axis
   double sum = 0.0;
   for (long node = 0; node < grid_.node_count(); ++node)
   {
      std::vector<int> idx = grid_.unflatten(node);
      double w = 1.0;
      for (int a = 0; a < grid_.dim(); ++a)
      {
         const Axis &ax = grid_.axis(a);
         if (ax.count < 2) { continue; }
         w *= ax.spacing() * ((idx[a] == 0 || idx[a] == ax.count - 1) ? 0.5 : 1.0);
      }
      for (int c = 0; c < channels_; ++c) { sum += w * std::norm(at(node, c)); }
   }
   return std::sqrt(sum);
}

GridFunction &GridFunction::operator+=(const GridFunction &other)
{
   if (!grid_.same_shape(other.grid_) || channels_ != other.channels_)
   {
      throw Error("shape", "grid function mismatch in addition");
   }
   for (size_t i = 0; i < values_.size(); ++i) { values_[i] += other.values_[i]; }
   return *this;
}

GridFunction &GridFunction::operator-=(const GridFunction &other)
{
   if (!grid_.same_shape(other.grid_) || channels_ != other.channels_)
   {
      throw Error("shape", "grid function mismatch in subtraction");
   }
   for (size_t i = 0; i < values_.size(); ++i) { values_[i] -= other.values_[i]; }
   return *this;
}

GridFunction &GridFunction::operator*=(Complex a)
{
   for (Complex &v : values_) { v *= a; }
   return *this;
}

std::vector<double> fd_weights(double x0, const std::vector<double> &pts, int order)
{
   // Fornberg's recursion, weights for derivatives 0..order; returns row `order`.
   const int n = (int)pts.size() - 1;
   const int m = order;
   std::vector<std::vector<std::vector<double>>> d(
      n + 1, std::vector<std::vector<double>>(n + 1, std::vector<double>(m + 1, 0.0)));
   d[0][0][0] = 1.0;
   double c1 = 1.0;
   for (int i = 1; i <= n; ++i)
   {
      double c2 = 1.0;
      for (int j = 0; j < i; ++j)
      {
         double c3 = pts[i] - pts[j];
         c2 *= c3;
         for (int k = 0; k <= std::min(i, m); ++k)
         {
            d[i][j][k] = ((pts[i] - x0) * d[i - 1][j][k] -
                          (k > 0 ? k * d[i - 1][j][k - 1] : 0.0)) / c3;
         }
      }
      for (int k = 0; k <= std::min(i, m); ++k)
      {
         d[i][i][k] = c1 / c2 * ((k > 0 ? k * d[i - 1][i - 1][k - 1] : 0.0) -
                                 (pts[i - 1] - x0) * d[i - 1][i - 1][k]);
      }
      c1 = c2;
   }
   std::vector<double> w(n + 1);
   for (int j = 0; j <= n; ++j) { w[j] = d[n][j][m]; }
   return w;
}

GridFunction fd_partial(const GridFunction &f, const std::string &axis, int order)
{
   if (order < 1 || order > 4)
   {
      throw Error("unsupported-order", "fd_partial supports derivative orders 1..4");
   }
   const Grid &g = f.grid();
   const int ax = g.axis_index(axis);
   const int n = g.axis(ax).count;
   if (n < order + 2)
   {
      throw Error("invalid-grid", "axis '" + axis + "' too short for order " +
                  std::to_string(order));
   }
   const double h = g.axis(ax).spacing();
   const int radius = (order + 1) / 2;
   const int wide = order + 2; // one-sided window, second-order accurate

   // Per-node stencils along the axis: (start index, weights)
   std::vector<std::pair<int, std::vector<double>>> stencil(n);
   for (int i = 0; i < n; ++i)
   {
      int start, size;
      if (i - radius >= 0 && i + radius <= n - 1)
      {
         start = i - radius;
         size = 2 * radius + 1;
      }
      else
      {
         size = std::min(wide, n);
         start = std::clamp(i - wide / 2, 0, n - size);
      }
      std::vector<double> pts(size);
      for (int j = 0; j < size; ++j) { pts[j] = (start + j - i) * h; }
      stencil[i] = {start, fd_weights(0.0, pts, order)};
   }

   const long inner = g.stride(ax);
   const long outer = g.node_count() / (inner * n);
   const int nc = f.channels();
   GridFunction out(g, nc);
   for (long o = 0; o < outer; ++o)
   {
      for (long in = 0; in < inner; ++in)
      {
         const long base = o * n * inner + in;
         for (int i = 0; i < n; ++i)
         {
            const auto &[start, w] = stencil[i];
            for (int c = 0; c < nc; ++c)
            {
               Complex acc = 0.0;
               for (size_t j = 0; j < w.size(); ++j)
               {
                  acc += w[j] * f.at(base + (start + (long)j) * inner, c);
               }
               out.at(base + (long)i * inner, c) = acc;
            }
         }
      }
   }
   return out;
}

Complex quad(const GridFunction &f)
{
   SubBox box;
   for (int a = 0; a < f.grid().dim(); ++a)
   {
      box.lo.push_back(0);
      box.hi.push_back(f.grid().axis(a).count - 1);
   }
   return quad(f, box);
}

Complex quad(const GridFunction &f, const SubBox &box)
{
   const Grid &g = f.grid();
   if (f.channels() != 1) { throw Error("shape", "quad expects a scalar grid function"); }
   if ((int)box.lo.size() != g.dim() || (int)box.hi.size() != g.dim())
   {
      throw Error("invalid-region", "sub-box rank does not match grid");
   }
   for (int a = 0; a < g.dim(); ++a)
   {
      if (box.lo[a] < 0 || box.hi[a] >= g.axis(a).count || box.lo[a] > box.hi[a])
      {
         throw Error("invalid-region", "empty or out-of-range sub-box");
      }
   }
   // Trapezoid weights relative to the sub-box edges; axes collapsed to a
   // single node contribute no measure factor only if the box is degenerate
   // there, which we treat as integrating over the remaining axes.
   std::vector<int> idx = box.lo;
   Complex sum = 0.0;
   while (true)
   {
      double w = 1.0;
      for (int a = 0; a < g.dim(); ++a)
      {
         if (box.hi[a] == box.lo[a]) { continue; }
         w *= g.axis(a).spacing() *
              ((idx[a] == box.lo[a] || idx[a] == box.hi[a]) ? 0.5 : 1.0);
      }
      sum += w * f.at(g.flatten(idx), 0);
      int a = g.dim() - 1;
      while (a >= 0)
      {
         if (++idx[a] <= box.hi[a]) { break; }
         idx[a] = box.lo[a];
         --a;
      }
      if (a < 0) { break; }
   }
   return sum;
}

Complex pairing(const GridFunction &phi, const GridFunction &psi)
{
   const Grid &g = phi.grid();
   if (!g.same_shape(psi.grid()) || phi.channels() != psi.channels())
   {
      throw Error("shape", "pairing requires matching grids and channel dimensions");
   }
   GridFunction prod(g, 1);
   for (long node = 0; node < g.node_count(); ++node)
   {
      Complex acc = 0.0;
      for (int c = 0; c < phi.channels(); ++c)
      {
         acc += std::conj(phi.at(node, c)) * psi.at(node, c);
      }
      prod.at(node, 0) = acc;
   }
   return quad(prod);
}

DenseMatrix::DenseMatrix(int rows, int cols) : rows_(rows), cols_(cols)
{
   if (rows < 0 || cols < 0) { throw Error("shape", "negative matrix dimension"); }
   data_.assign((long)rows * cols, Complex(0.0));
}

DenseMatrix DenseMatrix::identity(int n)
{
   DenseMatrix I(n, n);
   for (int i = 0; i < n; ++i) { I(i, i) = 1.0; }
   return I;
}

DenseMatrix &DenseMatrix::operator+=(const DenseMatrix &other)
{
   if (rows_ != other.rows_ || cols_ != other.cols_)
   {
      throw Error("shape", "matrix shape mismatch");
   }
   for (size_t i = 0; i < data_.size(); ++i) { data_[i] += other.data_[i]; }
   return *this;
}

DenseMatrix &DenseMatrix::operator-=(const DenseMatrix &other)
{
   if (rows_ != other.rows_ || cols_ != other.cols_)
   {
      throw Error("shape", "matrix shape mismatch");
   }
   for (size_t i = 0; i < data_.size(); ++i) { data_[i] -= other.data_[i]; }
   return *this;
}

DenseMatrix &DenseMatrix::operator*=(Complex a)
{
   for (Complex &v : data_) { v *= a; }
   return *this;
}

DenseMatrix operator*(const DenseMatrix &a, const DenseMatrix &b)
{
   if (a.cols() != b.rows()) { throw Error("shape", "matrix product shape mismatch"); }
   DenseMatrix c(a.rows(), b.cols());
   for (int i = 0; i < a.rows(); ++i)
   {
      for (int k = 0; k < a.cols(); ++k)
      {
         const Complex aik = a(i, k);
         if (aik == Complex(0.0)) { continue; }
         for (int j = 0; j < b.cols(); ++j) { c(i, j) += aik * b(k, j); }
      }
   }
   return c;
}

double DenseMatrix::norm_inf() const
{
   double m = 0.0;
   for (int i = 0; i < rows_; ++i)
   {
      double s = 0.0;
      for (int j = 0; j < cols_; ++j) { s += std::abs((*this)(i, j)); }
      m = std::max(m, s);
   }
   return m;
}

double DenseMatrix::norm_max() const
{
   double m = 0.0;
   for (const Complex &v : data_) { m = std::max(m, std::abs(v)); }
   return m;
}

std::vector<Complex> solve_dense(const DenseMatrix &A, const std::vector<Complex> &b)
{
   if (A.rows() != A.cols()) { throw Error("shape", "solver requires a square matrix"); }
   const int n = A.rows();
   if ((int)b.size() != n) { throw Error("shape", "right-hand side length mismatch"); }

   DenseMatrix lu = A;
   std::vector<Complex> x = b;
   const double tol = 1e-12 * std::max(A.norm_max(), 1e-300);
   for (int k = 0; k < n; ++k)
   {
      int p = k;
      for (int i = k + 1; i < n; ++i)
      {
         if (std::abs(lu(i, k)) > std::abs(lu(p, k))) { p = i; }
      }
      const double pivot = std::abs(lu(p, k));
      if (pivot < tol)
      {
         throw SingularMatrixError("pivot below threshold at column " +
                                   std::to_string(k), pivot);
      }
      if (p != k)
      {
         for (int j = k; j < n; ++j) { std::swap(lu(p, j), lu(k, j)); }
         std::swap(x[p], x[k]);
      }
      for (int i = k + 1; i < n; ++i)
      {
         const Complex m = lu(i, k) / lu(k, k);
         lu(i, k) = m;
         for (int j = k + 1; j < n; ++j) { lu(i, j) -= m * lu(k, j); }
         x[i] -= m * x[k];
      }
   }
   for (int i = n - 1; i >= 0; --i)
   {
      for (int j = i + 1; j < n; ++j) { x[i] -= lu(i, j) * x[j]; }
      x[i] /= lu(i, i);
   }
   return x;
}

DenseMatrix invert_dense(const DenseMatrix &A)
{
   const int n = A.rows();
   DenseMatrix inv(n, n);
   std::vector<Complex> e(n, Complex(0.0));
   for (int j = 0; j < n; ++j)
   {
      e.assign(n, Complex(0.0));
      e[j] = 1.0;
      std::vector<Complex> col = solve_dense(A, e);
      for (int i = 0; i < n; ++i) { inv(i, j) = col[i]; }
   }
   return inv;
}

void write_csv(const GridFunction &f, const std::string &path)
{
   std::ofstream os(path);
   if (!os) { throw Error("config", "cannot open '" + path + "' for writing"); }
   const Grid &g = f.grid();
   for (int a = 0; a < g.dim(); ++a) { os << g.axis(a).name << ","; }
   for (int c = 0; c < f.channels(); ++c)
   {
      os << "re_" << c << ",im_" << c << (c + 1 < f.channels() ? "," : "");
   }
   os << "\n";
   os.precision(17);
   for (long node = 0; node < g.node_count(); ++node)
   {
      std::vector<double> x = g.coords(g.unflatten(node));
      for (double xi : x) { os << xi << ","; }
      for (int c = 0; c < f.channels(); ++c)
      {
         os << f.at(node, c).real() << "," << f.at(node, c).imag()
            << (c + 1 < f.channels() ? "," : "");
      }
      os << "\n";
   }
}

GridFunction read_csv(const std::string &path, const Grid &grid)
{
   std::ifstream is(path);
   if (!is) { throw Error("config", "cannot open '" + path + "'"); }
   std::string header;
   std::getline(is, header);
   int cols = 1;
   for (char ch : header) { cols += (ch == ','); }
   const int nc = (cols - grid.dim()) / 2;
   if (nc < 1 || grid.dim() + 2 * nc != cols)
   {
      throw Error("config", "CSV header does not match grid layout");
   }
   GridFunction f(grid, nc);
   std::string line;
   for (long node = 0; node < grid.node_count(); ++node)
   {
      if (!std::getline(is, line))
      {
         throw Error("config", "CSV ends before all grid nodes are covered");
      }
      std::stringstream ss(line);
      std::string tok;
      for (int a = 0; a < grid.dim(); ++a) { std::getline(ss, tok, ','); }
      for (int c = 0; c < nc; ++c)
      {
         double re, im;
         std::getline(ss, tok, ',');
         re = std::stod(tok);
         std::getline(ss, tok, ',');
         im = std::stod(tok);
         f.at(node, c) = Complex(re, im);
      }
   }
   f.check_finite();
   return f;
}

} // namespace delsarte
