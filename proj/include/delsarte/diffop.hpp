#ifndef DELSARTE_DIFFOP_HPP
#define DELSARTE_DIFFOP_HPP

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "delsarte/expr.hpp"
#include "delsarte/numgrid.hpp"

namespace delsarte
{

/// alpha = (alpha_1, ..., alpha_m), one entry per spatial axis.
using MultiIndex = std::vector<int>;

int multi_order(const MultiIndex &alpha);
long binomial(int n, int k);

namespace detail { class FieldImpl; }

/// N x N matrix coefficient of a differential-expression term. Backed either
/// by symbolic expressions over the grid axis names (analytic derivatives) or
/// by grid samples (second-order numeric-difference derivative fallback,
/// flagged). Sums of both arise during adjoint expansion.
class CoefficientField
{
public:
   CoefficientField() = default; // zero field

   static CoefficientField symbolic(int channels, std::vector<ExprPtr> entries);
   static CoefficientField scalar(ExprPtr entry);
   static CoefficientField constant(int channels, std::vector<Complex> entries);
   static CoefficientField constant_scalar(Complex value);
   /// data carries N*N channels, row-major matrix entries per node.
   static CoefficientField sampled(GridFunction data, int channels);

   int channels() const;
   bool zero() const { return impl_ == nullptr; }
   bool analytic() const;
   /// true once a sampled leaf has been differentiated numerically
   bool numeric_fallback() const;

   CoefficientField derivative(const std::string &axis) const;
   CoefficientField conj_transpose() const;
   CoefficientField conjugate() const;
   CoefficientField scaled(Complex a) const;
   CoefficientField plus(const CoefficientField &other) const;

   /// Evaluate the N x N matrix (row-major into out) at a node of grid g.
   /// vars carries the axis-name -> coordinate bindings for that node.
   void eval(const Grid &g, const std::vector<int> &idx, const VarMap &vars,
             Complex *out) const;

private:
   explicit CoefficientField(std::shared_ptr<const detail::FieldImpl> impl)
      : impl_(std::move(impl)) {}
   std::shared_ptr<const detail::FieldImpl> impl_;
};

/// L = sum_alpha a_alpha(t;x) d^alpha, |alpha| <= n. Spatial axes are
/// referred to by name so expressions and grids stay consistent.
class DifferentialExpression
{
public:
   DifferentialExpression() = default;
   DifferentialExpression(int channels, std::vector<std::string> spatial_axes);

   void add_term(MultiIndex alpha, CoefficientField coeff);

   int spatial_dim() const { return (int)axes_.size(); }
   int channels() const { return channels_; }
   int order() const;
   const std::vector<std::string> &axes() const { return axes_; }
   const std::map<MultiIndex, CoefficientField> &terms() const { return terms_; }

   /// Sum_alpha a_alpha d^alpha f via fd_partial; coefficients at nodes.
   GridFunction apply(const GridFunction &f) const;

   /// Leibniz expansion of sum (-1)^{|alpha|} d^alpha (conj(a)^T .) into
   /// coefficient-times-derivative normal form.
   DifferentialExpression formal_adjoint(bool allow_numeric_fallback = true) const;

   DifferentialExpression scaled(Complex a) const;
   /// Entrywise complex conjugation of all coefficients.
   DifferentialExpression conjugate() const;
   DifferentialExpression plus(const DifferentialExpression &other) const;

   bool numeric_fallback() const;

private:
   int channels_ = 1;
   std::vector<std::string> axes_;
   std::map<MultiIndex, CoefficientField> terms_;
};

struct AdjointDefect
{
   Complex value;
   bool boundary_warning = false;
};

/// pairing(phi, L psi) - pairing(L* phi, psi); O(h^2) small for data
/// supported away from the spatial boundary.
AdjointDefect adjoint_defect(const DifferentialExpression &L,
                             const GridFunction &phi, const GridFunction &psi);

/// sigma * d/d(axis) - L, the evolution-type operator on (t[,y];x) grids.
struct EvolutionOperator
{
   std::string axis = "t";
   double sign = 1.0;
   DifferentialExpression spatial;
};

/// Nodewise residual sigma * dpsi/d(axis) - L psi.
GridFunction evolution_apply(const EvolutionOperator &op, const GridFunction &psi);

/// Operator description file: { "m":, "N":, "terms": [ { "alpha": [...],
/// "coeff": "expr" | [["e11",...],...] } ] }.
DifferentialExpression read_operator(const std::string &path);
DifferentialExpression operator_from_json_text(const std::string &text);

/// Default spatial axis names: {"x"} for m = 1, else {"x1", ..., "xm"}.
std::vector<std::string> default_spatial_axes(int m);

} // namespace delsarte

#endif
