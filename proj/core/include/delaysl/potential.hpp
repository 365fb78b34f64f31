#pragma once

// Complex piecewise potentials on [0, pi] and the iso-bispectral families
// built from an eigenpair of M_h.

#include <complex>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "delaysl/delay_operator.hpp"
#include "delaysl/function.hpp"

namespace delaysl {

enum class SegmentRole { zero, eigenfunction, product_integral, bridge, kernel, samples };

const char* to_string(SegmentRole r);
SegmentRole segment_role_from_string(const std::string& s);

/// One interval [lo, hi) carrying sum_k factor_k * f_k(x).
struct Segment {
  struct Term {
    cplx factor;
    RealFunction f;
  };

  double lo = 0.0;
  double hi = 0.0;
  SegmentRole role = SegmentRole::zero;
  std::vector<Term> terms;

  cplx value(double x) const;
  cplx derivative(double x) const;
  cplx integral(double x0, double x1) const;
  /// Interior points where some term is not smooth.
  std::vector<double> interior_breaks() const;
};

struct BridgeFunction {
  RealFunction g;
  double value_lo = 0.0;  // g(pi - a/2)
  double value_hi = 0.0;  // g(5a/2)
};

/// Data shared by every member of a family, independent of alpha.
struct FamilyInfo {
  std::string name;  // "B0", "B1", "B0-smooth"
  int nu = 0;
  KernelOperator op;  // normalized so that M e = (-1)^nu e
  EigenPair pair;
  std::optional<BridgeFunction> bridge;
};

class PiecewisePotential {
 public:
  /// Segments must tile [0, pi] in order; empty segments are dropped.
  PiecewisePotential(double a, std::vector<Segment> segments, cplx alpha = 0.0, std::string family = "custom");

  static PiecewisePotential zero(double a);

  double a() const { return a_; }
  cplx alpha() const { return alpha_; }
  const std::string& family() const { return family_; }
  const std::vector<Segment>& segments() const { return segments_; }
  const std::optional<FamilyInfo>& info() const { return info_; }
  void set_info(FamilyInfo info);

  /// Segment boundaries, including 0 and pi.
  std::vector<double> breakpoints() const;
  /// All points in (0, pi) where q may fail to be smooth.
  std::vector<double> singular_points() const;

  /// Right-continuous at segment boundaries; q(pi) from the last segment.
  cplx value(double x) const;
  cplx operator()(double x) const { return value(x); }
  cplx left_limit(double x) const;
  cplx right_limit(double x) const;
  cplx derivative(double x) const;
  cplx integral(double x0, double x1) const;

  double sup_norm() const;
  double l1_norm() const;
  bool is_real() const;

 private:
  std::size_t segment_index(double x) const;

  double a_;
  std::vector<Segment> segments_;
  cplx alpha_;
  std::string family_;
  std::optional<FamilyInfo> info_;
};

/// q_{alpha,nu}: zero on (0, 3a/2), alpha e on (3a/2, pi - a), zero on
/// (pi - a, 2a), -alpha K_h(x + a/2) int_{3a/2}^{x - a/2} e on (2a, pi - a/2),
/// zero on (pi - a/2, 5a/2), h on (5a/2, pi). Requires M_h e = (-1)^nu e.
PiecewisePotential build_family(int nu, cplx alpha, const KernelOperator& op, const EigenPair& p);

/// As build_family with nu = 0 but g on (pi - a/2, 5a/2). a in (pi/3, 2pi/5).
PiecewisePotential build_smooth_family(cplx alpha, const BridgeFunction& g, const KernelOperator& op,
                                       const EigenPair& p0);

/// Same family structure at another alpha.
PiecewisePotential with_alpha(const PiecewisePotential& q, cplx alpha);

/// Validates g(pi - a/2) = 0 and g(5a/2) = h0(5a/2) of the built-in kernel.
BridgeFunction make_bridge(double a, RealFunction g);
/// Linear interpolant of the mandated endpoint values.
BridgeFunction default_bridge(double a);

/// omega = int_a^pi q.
cplx omega(const PiecewisePotential& q);

struct JunctionGap {
  double x;
  double gap;
};

struct W21Report {
  bool continuous = true;
  std::vector<JunctionGap> junction_gaps;
  double derivative_l2 = 0.0;  // infinity when q jumps
};

W21Report check_w21(const PiecewisePotential& q);

/// q restricted to (5a/2, pi) as a real descriptor (the h of the
/// six-branch w formula). Throws if q is complex there.
RealFunction tail_function(const PiecewisePotential& q);

/// Real potential vanishing on (0, 3a/2), trigonometric on each piece, with
/// sup norm at most max_abs and both signs present.
PiecewisePotential random_admissible_potential(double a, std::mt19937_64& rng, double max_abs = 3.0);

}  // namespace delaysl
