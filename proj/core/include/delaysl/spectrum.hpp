#pragma once

// Eigenvalue location, alpha-invariance verdicts and the checks behind them.

#include <functional>
#include <string>
#include <vector>

#include "delaysl/charfn.hpp"

namespace delaysl {

struct RhoZero {
  cplx rho;
  int multiplicity = 1;
};

struct Eigenvalue {
  cplx lambda;
  int multiplicity = 1;  // as a zero of Delta(lambda)
  double residual = 0.0;  // |Delta(lambda)| / cosh(|Im rho| pi)
};

struct SpectralReport {
  int nu = 0;
  int j = 0;
  Method method = Method::ode;
  Rectangle window{0.0, 1.0, -1.0, 1.0};  // as requested, rho-plane
  Rectangle search{0.0, 1.0, -1.0, 1.0};  // contour actually used
  int rho_count = 0;                      // winding number over `search`
  std::vector<RhoZero> rho_zeros;         // zeros found inside `search`
  std::vector<Eigenvalue> eigenvalues;    // distinct lambda, sorted

  int located_rho_multiplicity() const;
  bool count_consistent() const { return located_rho_multiplicity() == rho_count; }
};

struct LocateOptions {
  double tolerance = 1e-13;  // Newton step, relative
  double min_cell = 1e-5;    // below this a multi-zero cell is a cluster
  int boundary_samples = 64;
  double residual_tolerance = 1e-8;
};

/// Zeros of rho -> Delta(rho^2) in `window`. A window whose left edge lies on
/// the imaginary axis is closed there: the contour is moved slightly left and
/// the mirrored zeros rho, -rho are merged into one lambda.
SpectralReport locate_spectrum(const ProblemSpec& spec, const Rectangle& window, Method method = Method::ode,
                               const LocateOptions& opt = {});

/// {-4, -1, 0.3, 1.7, 5, 10.1, 25.6, 50, 100}: away from n^2 and (n - 1/2)^2.
const std::vector<double>& default_lambda_grid();

struct IsospecSample {
  cplx alpha;
  int j = 0;
  double lambda = 0.0;
  double normalization = 1.0;
  std::optional<cplx> ode;   // normalized
  std::optional<cplx> repr;  // normalized
};

struct PointDeviation {
  int j = 0;
  double lambda = 0.0;
  double deviation = 0.0;  // max over alpha and method
};

struct InvarianceVerdict {
  std::string family;
  int nu = 0;
  Method method = Method::both;
  std::vector<cplx> alphas;
  std::vector<double> grid;
  std::vector<IsospecSample> samples;
  std::vector<PointDeviation> deviations;
  double max_deviation = 0.0;
  double method_discrepancy = 0.0;  // max |ode - repr| over samples, normalized
  double threshold = 1e-6;
  bool verdict = true;
};

using FamilyMember = std::function<PiecewisePotential(cplx alpha)>;

/// Deviation of normalized Delta_{nu,j}, j = 0, 1, against alphas.front():
/// |D(alpha) - D(alpha_0)| / (1 + |D(alpha_0)|).
InvarianceVerdict isospec_check(const FamilyMember& member, int nu, const std::vector<cplx>& alphas,
                                const std::vector<double>& grid, double threshold = 1e-6,
                                Method method = Method::both, std::string family = "custom");
/// Same, varying alpha of a built family member.
InvarianceVerdict isospec_check(const PiecewisePotential& member, const std::vector<cplx>& alphas,
                                const std::vector<double>& grid, double threshold = 1e-6,
                                Method method = Method::both);

struct NegativeControlReport {
  double a = 0.0;
  double eta = 0.0;            // top eigenvalue of the h = 1 operator
  double mean_of_e = 0.0;
  double proof_integral = 0.0;  // int M e over (3a/2, pi - a), M normalized
  double w1_invariance = 0.0;
  double delta_deviation = 0.0;
  std::vector<cplx> omega_differences;  // omega(alpha) - omega(alpha_0)
  double omega_gap = 0.0;  // max |difference - (alpha - alpha_0)(mean - proof_integral)|
  InvarianceVerdict verdict;
};

/// Constant kernel h = 1 on (5a/2, pi), top Nystrom pair rescaled so that
/// M e = -e, nu = 1 family at each alpha.
NegativeControlReport negative_control(double a, const std::vector<cplx>& alphas, const std::vector<double>& grid,
                                       int n = 256);
/// The nu = 1 family used by negative_control.
PiecewisePotential negative_control_family(double a, cplx alpha, int n = 256);

enum class LinkStatus { pass, fail, not_required };
const char* to_string(LinkStatus s);

struct ChainLink {
  std::string name;
  LinkStatus status = LinkStatus::pass;
  double value = 0.0;
  double threshold = 0.0;
};

struct TheoremChainReport {
  std::string family;
  int nu = 0;
  cplx alpha;
  std::vector<ChainLink> links;  // eigen-relation, zero-mean, w-invariance, omega-invariance, delta-invariance

  bool all_required_pass() const;
};

/// Checks each hypothesis of the invariance argument for `member` against
/// alpha = 0 of the same family.
TheoremChainReport verify_theorem_chain(const PiecewisePotential& member,
                                        const std::vector<double>& grid = default_lambda_grid());

}  // namespace delaysl
