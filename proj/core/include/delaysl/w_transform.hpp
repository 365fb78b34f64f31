#pragma once

// The quadratic transform w_nu of a potential vanishing on (0, a):
//
//   w_nu = q                on (a, 3a/2) and (pi - a/2, pi),
//   w_nu = q + Q_nu         on (3a/2, pi - a/2),
//   Q_nu(x) = int_a^{x-a/2} q * int_{x+a/2}^pi q
//             - (-1)^nu int_a^{pi-x+a/2} q(t) int_{x+t-a/2}^pi q(tau) dtau dt.

#include <vector>

#include "delaysl/delay_operator.hpp"
#include "delaysl/potential.hpp"

namespace delaysl {

/// Samples of w_nu at the nodes of a composite 16-point Gauss rule over (a, pi).
class WFunction {
 public:
  WFunction(int nu, double a, std::vector<double> breaks, std::vector<cplx> samples);

  int nu() const { return nu_; }
  double a() const { return a_; }
  double lo() const { return breaks_.front(); }
  double hi() const { return breaks_.back(); }
  const std::vector<double>& breaks() const { return breaks_; }
  const QuadratureRule& rule() const { return rule_; }
  const std::vector<cplx>& samples() const { return samples_; }
  static constexpr int points_per_panel = 16;

  /// Interpolated value; panels are aligned with every non-smooth point.
  cplx value(double x) const;
  cplx integral(double x0, double x1) const;
  cplx integral() const { return integral(lo(), hi()); }

  /// sup |w - other| over the nodes of both grids.
  double sup_distance(const WFunction& other) const;

 private:
  int nu_;
  double a_;
  std::vector<double> breaks_;
  std::vector<cplx> samples_;
  QuadratureRule rule_;
  SampledFunction re_, im_;
};

/// Panel breaks for w over [a, pi]: the non-smooth points of q and their
/// images under the shifts appearing in Q_nu, with width at most 0.25.
std::vector<double> w_grid(const PiecewisePotential& q);

cplx compute_Q(int nu, const PiecewisePotential& q, double x);

WFunction compute_w(int nu, const PiecewisePotential& q);

/// Six-branch form for q vanishing on (0, 3a/2) with h = q on (5a/2, pi).
WFunction compute_w_specialized(int nu, const PiecewisePotential& q, const KernelOperator& op);

struct OmegaIdentity {
  cplx omega;
  cplx integral_w0;
  double gap = 0.0;
};

/// omega against int_a^pi w_nu (an identity for nu = 0 only).
OmegaIdentity check_omega_identity(const PiecewisePotential& q, int nu = 0);

}  // namespace delaysl
