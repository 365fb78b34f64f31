#pragma once

// Characteristic functions Delta_{nu,j}(lambda) = y_{1-nu}^{(j)}(pi, lambda) of
//
//   -y''(x) + q(x) y(x - a) = lambda y(x),   y^{(nu)}(0) = y^{(j)}(pi) = 0,
//
// by the method of steps (ode) and by the representation through w_nu and
// omega (repr).

#include <optional>
#include <vector>

#include "delaysl/potential.hpp"
#include "delaysl/w_transform.hpp"

namespace delaysl {

struct ProblemSpec {
  int nu = 0;
  int j = 0;
  PiecewisePotential q;

  ProblemSpec(int nu, int j, PiecewisePotential q);
  double a() const { return q.a(); }
};

/// sqrt(lambda) on the branch Im rho >= 0.
cplx rho_of(cplx lambda);
/// cosh(|Im rho| pi), the growth scale of every Delta.
double normalization(cplx lambda);

/// y(pi) and y'(pi) of y_{1-nu} (y(0) = nu, y'(0) = 1 - nu), by variation of
/// parameters layer by layer.
struct EndState {
  cplx y;
  cplx dy;
};
EndState solve_to_pi(int nu, const PiecewisePotential& q, cplx lambda);

cplx char_fn_ode(const ProblemSpec& spec, cplx lambda);

/// Evaluates the representation for one (nu, j) with precomputed w and omega.
class RepresentationEvaluator {
 public:
  RepresentationEvaluator(const ProblemSpec& spec, WFunction w, cplx omega);
  /// Computes w_nu and omega from spec.q.
  explicit RepresentationEvaluator(const ProblemSpec& spec);

  cplx operator()(cplx lambda) const;

  const WFunction& w() const { return w_; }
  cplx omega() const { return omega_; }
  /// |omega - int w| for nu = 0 (the 1/lambda coefficient of the nu = nu
  /// line), zero otherwise.
  double identity_gap() const { return gap_; }
  /// False when identity_gap exceeds 1e-8 (1 + |omega|) for nu = j = 0; the
  /// near-zero series then drops a nonvanishing 1/lambda term.
  bool cancellation_ok() const { return cancellation_ok_; }

  static constexpr double series_radius = 1e-2;

 private:
  cplx trig_integral(cplx rho, bool sine) const;

  int nu_, j_;
  double a_;
  WFunction w_;
  cplx omega_;
  std::vector<cplx> moments_;  // int w (pi - 2x + a)^{2k}
  double gap_ = 0.0;
  bool cancellation_ok_ = true;
};

cplx char_fn_repr(const ProblemSpec& spec, cplx lambda, const WFunction& w, cplx omega);

enum class Method { ode, repr, both };
Method method_from_string(const std::string& s);
const char* to_string(Method m);

struct CharFnSample {
  cplx lambda;
  std::optional<cplx> ode;
  std::optional<cplx> repr;
  double normalization = 1.0;
  /// |ode - repr| / normalization when both were computed.
  std::optional<double> discrepancy;

  cplx value() const { return ode ? *ode : *repr; }
};

std::vector<CharFnSample> char_fn_grid(const ProblemSpec& spec, const std::vector<cplx>& lambdas, Method method);

}  // namespace delaysl
