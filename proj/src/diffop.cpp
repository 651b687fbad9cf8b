#include "delsarte/diffop.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace delsarte
{

int multi_order(const MultiIndex &alpha)
{
   int n = 0;
   for (int a : alpha) { n += a; }
   return n;
}

long binomial(int n, int k)
{
   if (k < 0 || k > n) { return 0; }
   long r = 1;
   for (int i = 1; i <= k; ++i) { r = r * (n - k + i) / i; }
   return r;
}

namespace detail
{

class FieldImpl
{
public:
   explicit FieldImpl(int channels) : channels_(channels) {}
   virtual ~FieldImpl() = default;
   int channels() const { return channels_; }
   virtual void eval(const Grid &g, const std::vector<int> &idx, const VarMap &vars,
                     Complex *out) const = 0;
   virtual std::shared_ptr<const FieldImpl> derivative(const std::string &axis) const = 0;
   virtual std::shared_ptr<const FieldImpl> conj_transpose() const = 0;
   virtual std::shared_ptr<const FieldImpl> conjugate() const = 0;
   virtual std::shared_ptr<const FieldImpl> scaled(Complex a) const = 0;
   virtual bool analytic() const = 0;
   virtual bool fallback() const { return false; }

private:
   int channels_;
};

class SymbolicImpl : public FieldImpl
{
public:
   SymbolicImpl(int channels, std::vector<ExprPtr> entries)
      : FieldImpl(channels), entries_(std::move(entries))
   {
      // constant fast path
      const_values_.resize(entries_.size());
      all_const_ = true;
      for (size_t i = 0; i < entries_.size(); ++i)
      {
         Complex v;
         if (entries_[i]->is_const(&v)) { const_values_[i] = v; }
         else { all_const_ = false; break; }
      }
   }

   void eval(const Grid &, const std::vector<int> &, const VarMap &vars,
             Complex *out) const override
   {
      if (all_const_)
      {
         std::copy(const_values_.begin(), const_values_.end(), out);
         return;
      }
      for (size_t i = 0; i < entries_.size(); ++i) { out[i] = entries_[i]->eval(vars); }
   }

   std::shared_ptr<const FieldImpl> derivative(const std::string &axis) const override
   {
      std::vector<ExprPtr> d(entries_.size());
      for (size_t i = 0; i < entries_.size(); ++i) { d[i] = entries_[i]->diff(axis); }
      return std::make_shared<SymbolicImpl>(channels(), std::move(d));
   }

   std::shared_ptr<const FieldImpl> conj_transpose() const override
   {
      const int n = channels();
      std::vector<ExprPtr> t(entries_.size());
      for (int i = 0; i < n; ++i)
      {
         for (int j = 0; j < n; ++j) { t[j * n + i] = entries_[i * n + j]->conjugate(); }
      }
      return std::make_shared<SymbolicImpl>(n, std::move(t));
   }

   std::shared_ptr<const FieldImpl> conjugate() const override
   {
      std::vector<ExprPtr> t(entries_.size());
      for (size_t i = 0; i < entries_.size(); ++i) { t[i] = entries_[i]->conjugate(); }
      return std::make_shared<SymbolicImpl>(channels(), std::move(t));
   }

   std::shared_ptr<const FieldImpl> scaled(Complex a) const override
   {
      std::vector<ExprPtr> t(entries_.size());
      for (size_t i = 0; i < entries_.size(); ++i)
      {
         t[i] = expr_mul(expr_const(a), entries_[i]);
      }
      return std::make_shared<SymbolicImpl>(channels(), std::move(t));
   }

   bool analytic() const override { return true; }

private:
   std::vector<ExprPtr> entries_; // N*N, row-major
   std::vector<Complex> const_values_;
   bool all_const_ = false;
};

class SampledImpl : public FieldImpl
{
public:
   SampledImpl(GridFunction data, int channels, bool fallback)
      : FieldImpl(channels), data_(std::move(data)), fallback_(fallback)
   {
      if (data_.channels() != channels * channels)
      {
         throw Error("shape", "sampled coefficient needs N*N channels");
      }
   }

   void eval(const Grid &g, const std::vector<int> &idx, const VarMap &,
             Complex *out) const override
   {
      const Grid &dg = data_.grid();
      long node = 0;
      for (int a = 0; a < dg.dim(); ++a)
      {
         const int ga = g.axis_index(dg.axis(a).name);
         if (g.axis(ga).count != dg.axis(a).count)
         {
            throw Error("shape", "sampled coefficient grid does not align with target");
         }
         node += (long)idx[ga] * dg.stride(a);
      }
      for (int c = 0; c < data_.channels(); ++c) { out[c] = data_.at(node, c); }
   }

   std::shared_ptr<const FieldImpl> derivative(const std::string &axis) const override
   {
      return std::make_shared<SampledImpl>(fd_partial(data_, axis, 1), channels(), true);
   }

   std::shared_ptr<const FieldImpl> conj_transpose() const override
   {
      const int n = channels();
      GridFunction t(data_.grid(), n * n);
      for (long node = 0; node < data_.grid().node_count(); ++node)
      {
         for (int i = 0; i < n; ++i)
         {
            for (int j = 0; j < n; ++j)
            {
               t.at(node, j * n + i) = std::conj(data_.at(node, i * n + j));
            }
         }
      }
      return std::make_shared<SampledImpl>(std::move(t), n, fallback_);
   }

   std::shared_ptr<const FieldImpl> conjugate() const override
   {
      GridFunction t(data_.grid(), data_.channels());
      for (size_t i = 0; i < t.values().size(); ++i)
      {
         t.values()[i] = std::conj(data_.values()[i]);
      }
      return std::make_shared<SampledImpl>(std::move(t), channels(), fallback_);
   }

   std::shared_ptr<const FieldImpl> scaled(Complex a) const override
   {
      GridFunction t = data_;
      t *= a;
      return std::make_shared<SampledImpl>(std::move(t), channels(), fallback_);
   }

   bool analytic() const override { return false; }
   bool fallback() const override { return fallback_; }

private:
   GridFunction data_;
   bool fallback_;
};

class SumImpl : public FieldImpl
{
public:
   SumImpl(int channels, std::vector<std::shared_ptr<const FieldImpl>> parts)
      : FieldImpl(channels), parts_(std::move(parts)) {}

   void eval(const Grid &g, const std::vector<int> &idx, const VarMap &vars,
             Complex *out) const override
   {
      const int nn = channels() * channels();
      std::fill(out, out + nn, Complex(0.0));
      std::vector<Complex> buf(nn);
      for (const auto &p : parts_)
      {
         p->eval(g, idx, vars, buf.data());
         for (int i = 0; i < nn; ++i) { out[i] += buf[i]; }
      }
   }

   std::shared_ptr<const FieldImpl> derivative(const std::string &axis) const override
   {
      std::vector<std::shared_ptr<const FieldImpl>> d;
      for (const auto &p : parts_) { d.push_back(p->derivative(axis)); }
      return std::make_shared<SumImpl>(channels(), std::move(d));
   }

   std::shared_ptr<const FieldImpl> conj_transpose() const override
   {
      std::vector<std::shared_ptr<const FieldImpl>> d;
      for (const auto &p : parts_) { d.push_back(p->conj_transpose()); }
      return std::make_shared<SumImpl>(channels(), std::move(d));
   }

   std::shared_ptr<const FieldImpl> conjugate() const override
   {
      std::vector<std::shared_ptr<const FieldImpl>> d;
      for (const auto &p : parts_) { d.push_back(p->conjugate()); }
      return std::make_shared<SumImpl>(channels(), std::move(d));
   }

   std::shared_ptr<const FieldImpl> scaled(Complex a) const override
   {
      std::vector<std::shared_ptr<const FieldImpl>> d;
      for (const auto &p : parts_) { d.push_back(p->scaled(a)); }
      return std::make_shared<SumImpl>(channels(), std::move(d));
   }

   bool analytic() const override
   {
      for (const auto &p : parts_)
      {
         if (!p->analytic()) { return false; }
      }
      return true;
   }

   bool fallback() const override
   {
      for (const auto &p : parts_)
      {
         if (p->fallback()) { return true; }
      }
      return false;
   }

private:
   std::vector<std::shared_ptr<const FieldImpl>> parts_;
};

} // namespace detail

CoefficientField CoefficientField::symbolic(int channels, std::vector<ExprPtr> entries)
{
   if ((int)entries.size() != channels * channels)
   {
      throw Error("shape", "symbolic coefficient needs N*N entries");
   }
   return CoefficientField(std::make_shared<detail::SymbolicImpl>(channels,
                                                                  std::move(entries)));
}

CoefficientField CoefficientField::scalar(ExprPtr entry)
{
   return symbolic(1, {std::move(entry)});
}

CoefficientField CoefficientField::constant(int channels, std::vector<Complex> entries)
{
   std::vector<ExprPtr> e(entries.size());
   for (size_t i = 0; i < entries.size(); ++i) { e[i] = expr_const(entries[i]); }
   return symbolic(channels, std::move(e));
}

CoefficientField CoefficientField::constant_scalar(Complex value)
{
   return constant(1, {value});
}

CoefficientField CoefficientField::sampled(GridFunction data, int channels)
{
   return CoefficientField(std::make_shared<detail::SampledImpl>(std::move(data),
                                                                 channels, false));
}

int CoefficientField::channels() const { return impl_ ? impl_->channels() : 0; }

bool CoefficientField::analytic() const { return !impl_ || impl_->analytic(); }

bool CoefficientField::numeric_fallback() const { return impl_ && impl_->fallback(); }

CoefficientField CoefficientField::derivative(const std::string &axis) const
{
   if (!impl_) { return CoefficientField(); }
   return CoefficientField(impl_->derivative(axis));
}

CoefficientField CoefficientField::conj_transpose() const
{
   if (!impl_) { return CoefficientField(); }
   return CoefficientField(impl_->conj_transpose());
}

CoefficientField CoefficientField::conjugate() const
{
   if (!impl_) { return CoefficientField(); }
   return CoefficientField(impl_->conjugate());
}

CoefficientField CoefficientField::scaled(Complex a) const
{
   if (!impl_) { return CoefficientField(); }
   return CoefficientField(impl_->scaled(a));
}

CoefficientField CoefficientField::plus(const CoefficientField &other) const
{
   if (!impl_) { return other; }
   if (!other.impl_) { return *this; }
   if (channels() != other.channels())
   {
      throw Error("shape", "coefficient channel mismatch in sum");
   }
   std::vector<std::shared_ptr<const detail::FieldImpl>> parts{impl_, other.impl_};
   return CoefficientField(std::make_shared<detail::SumImpl>(channels(),
                                                             std::move(parts)));
}

void CoefficientField::eval(const Grid &g, const std::vector<int> &idx,
                            const VarMap &vars, Complex *out) const
{
   if (!impl_) { throw Error("shape", "evaluating empty coefficient field"); }
   impl_->eval(g, idx, vars, out);
}

DifferentialExpression::DifferentialExpression(int channels,
                                               std::vector<std::string> spatial_axes)
   : channels_(channels), axes_(std::move(spatial_axes))
{
   if (channels_ < 1) { throw Error("shape", "channel dimension must be >= 1"); }
}

void DifferentialExpression::add_term(MultiIndex alpha, CoefficientField coeff)
{
   if ((int)alpha.size() != spatial_dim())
   {
      throw Error("shape", "multi-index length must equal spatial dimension");
   }
   for (int a : alpha)
   {
      if (a < 0) { throw Error("shape", "negative multi-index entry"); }
   }
   if (coeff.zero()) { return; }
   if (coeff.channels() != channels_)
   {
      throw Error("shape", "coefficient channel dimension mismatch");
   }
   auto it = terms_.find(alpha);
   if (it == terms_.end()) { terms_.emplace(std::move(alpha), std::move(coeff)); }
   else { it->second = it->second.plus(coeff); }
}

int DifferentialExpression::order() const
{
   int n = 0;
   for (const auto &[alpha, coeff] : terms_) { n = std::max(n, multi_order(alpha)); }
   return n;
}

GridFunction DifferentialExpression::apply(const GridFunction &f) const
{
   const Grid &g = f.grid();
   if (f.channels() != channels_)
   {
      throw Error("shape", "operand channel dimension mismatch");
   }
   for (const std::string &ax : axes_)
   {
      if (!g.has_axis(ax))
      {
         throw Error("shape", "grid lacks spatial axis '" + ax + "'");
      }
   }

   GridFunction out(g, channels_);
   VarMap vars;
   for (int a = 0; a < g.dim(); ++a) { vars.emplace_back(g.axis(a).name, 0.0); }

   const int n = channels_;
   std::vector<Complex> coeff(n * n);
   for (const auto &[alpha, field] : terms_)
   {
      GridFunction df = f;
      for (int i = 0; i < spatial_dim(); ++i)
      {
         if (alpha[i] > 0) { df = fd_partial(df, axes_[i], alpha[i]); }
      }
      std::vector<int> idx(g.dim(), 0);
      for (long node = 0; node < g.node_count(); ++node)
      {
         for (int a = 0; a < g.dim(); ++a) { vars[a].second = g.axis(a).coord(idx[a]); }
         field.eval(g, idx, vars, coeff.data());
         for (int i = 0; i < n; ++i)
         {
            Complex acc = 0.0;
            for (int j = 0; j < n; ++j) { acc += coeff[i * n + j] * df.at(node, j); }
            out.at(node, i) += acc;
         }
         // lexicographic increment
         for (int a = g.dim() - 1; a >= 0; --a)
         {
            if (++idx[a] < g.axis(a).count) { break; }
            idx[a] = 0;
         }
      }
   }
   return out;
}

DifferentialExpression
DifferentialExpression::formal_adjoint(bool allow_numeric_fallback) const
{
   DifferentialExpression adj(channels_, axes_);
   for (const auto &[alpha, field] : terms_)
   {
      if (multi_order(alpha) > 0 && !field.analytic() && !allow_numeric_fallback)
      {
         throw Error("missing-derivative",
                     "coefficient lacks an analytic derivative oracle");
      }
      CoefficientField at = field.conj_transpose();
      const double sign = (multi_order(alpha) % 2 == 0) ? 1.0 : -1.0;

      // Leibniz: d^alpha (A f) = sum_{gamma <= alpha} C(alpha,gamma)
      //          (d^{alpha-gamma} A) d^gamma f, axes peeled in ascending order.
      MultiIndex gamma(alpha.size(), 0);
      while (true)
      {
         long c = 1;
         for (size_t i = 0; i < alpha.size(); ++i) { c *= binomial(alpha[i], gamma[i]); }
         CoefficientField part = at;
         for (size_t i = 0; i < alpha.size(); ++i)
         {
            for (int k = 0; k < alpha[i] - gamma[i]; ++k)
            {
               part = part.derivative(axes_[i]);
            }
         }
         adj.add_term(gamma, part.scaled(sign * (double)c));

         int i = (int)alpha.size() - 1;
         while (i >= 0)
         {
            if (++gamma[i] <= alpha[i]) { break; }
            gamma[i] = 0;
            --i;
         }
         if (i < 0) { break; }
      }
   }
   return adj;
}

DifferentialExpression DifferentialExpression::scaled(Complex a) const
{
   DifferentialExpression out(channels_, axes_);
   for (const auto &[alpha, field] : terms_) { out.add_term(alpha, field.scaled(a)); }
   return out;
}

DifferentialExpression DifferentialExpression::conjugate() const
{
   DifferentialExpression out(channels_, axes_);
   for (const auto &[alpha, field] : terms_) { out.add_term(alpha, field.conjugate()); }
   return out;
}

DifferentialExpression
DifferentialExpression::plus(const DifferentialExpression &other) const
{
   DifferentialExpression out = *this;
   for (const auto &[alpha, field] : other.terms_) { out.add_term(alpha, field); }
   return out;
}

bool DifferentialExpression::numeric_fallback() const
{
   for (const auto &[alpha, field] : terms_)
   {
      if (field.numeric_fallback()) { return true; }
   }
   return false;
}

namespace
{

double boundary_layer_sup(const GridFunction &f, int layers)
{
   const Grid &g = f.grid();
   const std::vector<int> spatial = g.spatial_axes();
   double m = 0.0;
   for (long node = 0; node < g.node_count(); ++node)
   {
      std::vector<int> idx = g.unflatten(node);
      bool near = false;
      for (int a : spatial)
      {
         if (idx[a] < layers || idx[a] >= g.axis(a).count - layers) { near = true; }
      }
      if (!near) { continue; }
      for (int c = 0; c < f.channels(); ++c)
      {
         m = std::max(m, std::abs(f.at(node, c)));
      }
   }
   return m;
}

} // namespace

AdjointDefect adjoint_defect(const DifferentialExpression &L,
                             const GridFunction &phi, const GridFunction &psi)
{
   AdjointDefect d;
   const double edge = std::max(boundary_layer_sup(phi, 3), boundary_layer_sup(psi, 3));
   const double scale = std::max(phi.sup_norm(), psi.sup_norm());
   d.boundary_warning = edge > 1e-12 * std::max(scale, 1e-300);
   const DifferentialExpression Lstar = L.formal_adjoint();
   d.value = pairing(phi, L.apply(psi)) - pairing(Lstar.apply(phi), psi);
   return d;
}

GridFunction evolution_apply(const EvolutionOperator &op, const GridFunction &psi)
{
   if (!psi.grid().has_axis(op.axis))
   {
      throw Error("shape", "grid lacks evolution axis '" + op.axis + "'");
   }
   GridFunction dpsi = fd_partial(psi, op.axis, 1);
   dpsi *= op.sign;
   dpsi -= op.spatial.apply(psi);
   return dpsi;
}

std::vector<std::string> default_spatial_axes(int m)
{
   if (m == 1) { return {"x"}; }
   std::vector<std::string> axes;
   for (int i = 1; i <= m; ++i) { axes.push_back("x" + std::to_string(i)); }
   return axes;
}

DifferentialExpression operator_from_json_text(const std::string &text)
{
   nlohmann::json j;
   try { j = nlohmann::json::parse(text); }
   catch (const std::exception &e)
   {
      throw Error("config", std::string("operator description: ") + e.what());
   }
   const int m = j.at("m").get<int>();
   const int n = j.at("N").get<int>();
   if (m < 1 || n < 1) { throw Error("config", "operator description: m, N must be >= 1"); }
   DifferentialExpression L(n, default_spatial_axes(m));
   for (const auto &term : j.at("terms"))
   {
      MultiIndex alpha = term.at("alpha").get<std::vector<int>>();
      const auto &coeff = term.at("coeff");
      std::vector<ExprPtr> entries(n * n, expr_const(0.0));
      if (coeff.is_string())
      {
         // scalar expression: multiple of the identity for N > 1
         ExprPtr e = parse_expr(coeff.get<std::string>());
         for (int i = 0; i < n; ++i) { entries[i * n + i] = e; }
      }
      else
      {
         for (int i = 0; i < n; ++i)
         {
            for (int jj = 0; jj < n; ++jj)
            {
               entries[i * n + jj] = parse_expr(coeff.at(i).at(jj).get<std::string>());
            }
         }
      }
      L.add_term(std::move(alpha), CoefficientField::symbolic(n, std::move(entries)));
   }
   return L;
}

DifferentialExpression read_operator(const std::string &path)
{
   std::ifstream is(path);
   if (!is) { throw Error("config", "cannot open operator file '" + path + "'"); }
   std::stringstream ss;
   ss << is.rdbuf();
   return operator_from_json_text(ss.str());
}

} // namespace delsarte
