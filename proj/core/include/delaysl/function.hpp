#pragma once

// Real-valued function descriptors on a closed interval. Each supports point
// evaluation, first derivative, and exact (or table-exact) definite integrals.

#include <concepts>
#include <memory>
#include <span>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "delaysl/numerics.hpp"

namespace delaysl {

/// f(x) = sum_k c_k cos(omega_k u + phi_k), u = (x - lo) / (hi - lo).
class TrigSeries {
 public:
  struct Term {
    double coef;
    double freq;
    double phase;
  };

  TrigSeries(double lo, double hi, std::vector<Term> terms, std::string label = {});

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  const std::vector<Term>& terms() const { return terms_; }
  const std::string& label() const { return label_; }

  double value(double x) const;
  double derivative(double x) const;
  double integral(double x0, double x1) const;
  TrigSeries scaled(double c) const;

 private:
  double lo_, hi_;
  std::vector<Term> terms_;
  std::string label_;
};

/// Piecewise polynomial interpolant of samples taken at composite
/// Gauss-Legendre nodes, stored as per-panel Legendre series.
class SampledFunction {
 public:
  /// `values` are samples at the nodes of make_composite_gauss(breaks, m).
  SampledFunction(std::vector<double> breaks, int points_per_panel, std::vector<double> values);

  template <class F>
  static SampledFunction from_function(F&& f, std::vector<double> breaks, int points_per_panel) {
    const QuadratureRule rule = make_composite_gauss(breaks, points_per_panel);
    std::vector<double> v(rule.size());
    for (std::size_t i = 0; i < rule.size(); ++i) v[i] = f(rule.nodes[i]);
    return SampledFunction(std::move(breaks), points_per_panel, std::move(v));
  }

  double lo() const { return breaks_.front(); }
  double hi() const { return breaks_.back(); }
  const std::vector<double>& breaks() const { return breaks_; }
  int points_per_panel() const { return m_; }
  const std::vector<double>& values() const { return values_; }
  QuadratureRule rule() const { return make_composite_gauss(breaks_, m_); }

  double value(double x) const;
  double derivative(double x) const;
  double integral(double x0, double x1) const;
  SampledFunction scaled(double c) const;
  /// Same Legendre data on an affinely mapped interval [lo, hi].
  SampledFunction remapped(double lo, double hi) const;

 private:
  std::size_t panel_of(double x) const;
  double antiderivative(double x) const;  // from lo()

  std::vector<double> breaks_;
  int m_;
  std::vector<double> values_;
  std::vector<double> coef_;   // Legendre coefficients, m_ per panel
  std::vector<double> dcoef_;  // derivative series, m_ per panel
  std::vector<double> icoef_;  // antiderivative series from panel start, m_ + 1 per panel
  std::vector<double> cumulative_;
};

/// Straight line through (lo, v_lo) and (hi, v_hi).
class LinearFunction {
 public:
  LinearFunction(double lo, double hi, double v_lo, double v_hi);
  double lo() const { return lo_; }
  double hi() const { return hi_; }
  double v_lo() const { return vlo_; }
  double v_hi() const { return vhi_; }
  double value(double x) const;
  double derivative(double) const { return (vhi_ - vlo_) / (hi_ - lo_); }
  double integral(double x0, double x1) const;
  LinearFunction scaled(double c) const { return {lo_, hi_, c * vlo_, c * vhi_}; }

 private:
  double lo_, hi_, vlo_, vhi_;
};

class RealFunction;

/// G(x) = K_h(x + shift) * int_{e.lo}^{x - shift} e(t) dt on
/// [e.lo + shift, e.hi + shift], with K_h(s) = int_s^{h.hi} h.
class ProductIntegralFunction {
 public:
  ProductIntegralFunction(std::shared_ptr<const RealFunction> h, std::shared_ptr<const RealFunction> e,
                          double shift);

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  double shift() const { return shift_; }
  const RealFunction& h() const { return *h_; }
  const RealFunction& e() const { return *e_; }
  double scale() const { return scale_; }
  std::shared_ptr<const RealFunction> h_ptr() const { return h_; }
  std::shared_ptr<const RealFunction> e_ptr() const { return e_; }

  double value(double x) const;
  double derivative(double x) const;
  double integral(double x0, double x1) const;
  ProductIntegralFunction scaled(double c) const;

 private:
  std::shared_ptr<const RealFunction> h_, e_;
  double shift_, lo_, hi_;
  double scale_ = 1.0;
  std::shared_ptr<const SampledFunction> table_;  // for integrals
};

/// Value-semantic sum type over the descriptor kinds.
class RealFunction {
 public:
  using Variant = std::variant<TrigSeries, SampledFunction, LinearFunction, ProductIntegralFunction>;

  template <class T>
    requires(!std::same_as<std::decay_t<T>, RealFunction> && std::constructible_from<Variant, T>)
  RealFunction(T f) : f_(std::move(f)) {}

  const Variant& variant() const { return f_; }
  double lo() const;
  double hi() const;
  double value(double x) const;
  double operator()(double x) const { return value(x); }
  double derivative(double x) const;
  double integral(double x0, double x1) const;
  RealFunction scaled(double c) const;
  /// Interior points where the function may be non-smooth (panel breaks).
  std::vector<double> breaks() const;

 private:
  Variant f_;
};

}  // namespace delaysl
