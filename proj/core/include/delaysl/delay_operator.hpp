#pragma once

// The Hankel-type integral operator
//
//   (M f)(x) = int_lo^{lo+L} K~(x + t - 2 lo + k_lo) f(t) dt,   x in [lo, lo+L],
//
// with K(s) = int_s^{k_lo+L} h and K~ the extension of K by zero past k_lo+L.
// In physical coordinates lo = 3a/2, k_lo = 5a/2, L = pi - 5a/2, so the
// argument is x + t - a/2. In unit coordinates lo = k_lo = 0 and L = 1.

#include <complex>
#include <functional>
#include <optional>
#include <vector>

#include "delaysl/function.hpp"
#include "delaysl/numerics.hpp"

namespace delaysl {

/// Delays admitted by the iso-bispectral constructions: [pi/3, 2pi/5).
bool delay_in_range(double a);
void require_delay_in_range(double a);

class KernelOperator {
 public:
  /// h on (5a/2, pi); a in [pi/3, 2pi/5).
  static KernelOperator physical(double a, RealFunction h);
  /// chi on (0, 1).
  static KernelOperator unit(RealFunction chi);

  bool is_unit() const { return unit_; }
  /// Delay, NaN for unit-interval operators.
  double a() const { return a_; }
  double lo() const { return lo_; }
  double hi() const { return lo_ + len_; }
  double length() const { return len_; }
  double kernel_lo() const { return klo_; }
  double kernel_hi() const { return klo_ + len_; }
  const RealFunction& h() const { return h_; }

  /// K(s), zero for s >= kernel_hi(); constant below kernel_lo().
  double kernel_extended(double s) const;
  /// Argument of K for the pair (x, t).
  double kernel_argument(double x, double t) const { return x + t - 2.0 * lo_ + klo_; }
  /// Upper integration limit t* where the kernel argument reaches kernel_hi().
  double cutoff(double x) const { return 2.0 * lo_ + len_ - x; }

  KernelOperator scaled(double c) const;
  double h_l1_norm() const;

 private:
  KernelOperator(bool unit, double a, double lo, double klo, double len, RealFunction h);

  bool unit_;
  double a_, lo_, klo_, len_;
  RealFunction h_;
};

/// K_h(x) = int_x^pi h. Domain [a, pi] (physical) or [0, 1] (unit).
double kernel_K(const KernelOperator& op, double x);

/// (M f)(x) with the row integral split at the kernel kink t*.
double apply_M(const KernelOperator& op, const RealFunction& f, double x);
std::complex<double> apply_M(const KernelOperator& op, const std::function<std::complex<double>(double)>& f,
                             double x, const std::vector<double>& f_breaks = {});

/// Grid used by nystrom/eigenpairs: 16-point panels when n is a multiple of
/// 16, otherwise a single n-point panel.
std::vector<double> nystrom_breaks(const KernelOperator& op, int n, int& points_per_panel);

struct NystromSystem {
  SymMatrix matrix;
  QuadratureRule grid;
  std::vector<double> panel_breaks;
  int points_per_panel = 0;
};

/// A[i][j] = sqrt(w_i w_j) K~(x_i + x_j + shift).
NystromSystem nystrom(const KernelOperator& op, int n);

struct EigenPair {
  double eta = 0.0;
  RealFunction e;             // sup-normalized, value of largest magnitude positive
  double mean = 0.0;          // int of e over the operator interval
  double residual = 0.0;      // sup |M e - eta e| / sup |e| on a check grid
  double tolerance = 1e-8;
  int multiplicity = 1;       // discrete multiplicity in the Nystrom spectrum

  bool verified() const { return residual <= tolerance; }
};

struct EigenOptions {
  double tolerance = 1e-8;
  int refine_iterations = 4;
};

/// Top-k eigenpairs by |eta| with kink-aware refinement and re-verification.
std::vector<EigenPair> eigenpairs(const KernelOperator& op, int n, int k, const EigenOptions& opt = {});

/// Residual sup |M e - eta e| / sup |e| over the nodes of an n-point grid.
double eigen_residual(const KernelOperator& op, const RealFunction& e, double eta, int n = 256);

/// Wraps a known (closed-form or sampled) eigenfunction as a verified pair.
EigenPair make_pair(const KernelOperator& op, const RealFunction& e, double eta, int n = 256,
                    double tolerance = 1e-8);

/// int of f over the operator interval, by composite Gauss quadrature.
double mean_value(const KernelOperator& op, const RealFunction& f);
double mean_value(const EigenPair& p);

/// Rescales op (normalized so that the eigenvalue of p becomes (-1)^nu) and
/// p to the unit interval; the unit relation is re-verified.
struct UnitPair {
  RealFunction chi;
  RealFunction epsilon;
  int nu = 0;
  double residual = 0.0;
};
UnitPair rescale_to_unit(const KernelOperator& op, const EigenPair& p, int nu, double tolerance = 1e-8);

/// h_nu := (-1)^nu h / eta so that M_{h_nu} e = (-1)^nu e.
struct NormalizedPair {
  KernelOperator op;
  EigenPair pair;
};
NormalizedPair normalize_for(int nu, const KernelOperator& op, const EigenPair& p);

/// Closed-form pairs: h0 = h1 and M_{h1} e1 = -e1, M_{h0} e0 = e0.
struct BuiltinPairs {
  RealFunction h1, e1, h0, e0;
};
BuiltinPairs builtin_pairs(double a);

/// Inverse of the unit rescaling: h(x) = chi(theta(x)) / L^2, e(x) = eps(xi(x)).
RealFunction unit_to_physical_h(const RealFunction& chi, double a);
RealFunction unit_to_physical_e(const RealFunction& epsilon, double a);

}  // namespace delaysl
