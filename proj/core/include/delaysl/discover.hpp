#pragma once

// Search for zero-mean eigenpairs of the unit-interval operator m_chi.

#include <vector>

#include "delaysl/delay_operator.hpp"

namespace delaysl {

/// chi(s) = sum_k c_k cos(freq_k s + phase_k) on (0, 1).
struct CosineBasis {
  struct Mode {
    double freq;
    double phase = 0.0;
  };
  std::vector<Mode> modes;

  /// cos(k pi s), k = 0 .. dim - 1.
  static CosineBasis standard(int dim);
  std::size_t size() const { return modes.size(); }
  /// Throws InvalidInput for a wrong length or an all-zero vector.
  RealFunction kernel(const std::vector<double>& coefficients) const;
};

struct Candidate {
  std::vector<double> coefficients;
  RealFunction chi;
  double eta = 0.0;
  RealFunction epsilon;  // sup-normalized
  double mean = 0.0;     // int_0^1 epsilon (= |mean| / sup for sup-normalized epsilon)
  double residual = 0.0;
  int index = 0;  // position in the |eta| ordering of its kernel
};

struct ScanOptions {
  int nodes = 64;
  int pairs_per_kernel = 4;
  double min_abs_eta = 1e-6;
};

/// Every eigenpair with |eta| > min_abs_eta of every kernel, sorted by |mean|.
std::vector<Candidate> scan_kernels(const CosineBasis& basis, const std::vector<std::vector<double>>& coefficients,
                                    const ScanOptions& opt = {});

/// All vectors with entries on `levels` equispaced points of [lo, hi],
/// the zero vector excluded.
std::vector<std::vector<double>> coefficient_grid(int dim, int levels, double lo = -2.0, double hi = 2.0);

struct PolishStep {
  int iteration = 0;
  double objective = 0.0;
  double step = 0.0;
};

struct PolishOptions {
  int nodes = 64;
  int max_iterations = 200;
  double initial_step = 0.1;
  double target = 1e-12;
  int stagnation_limit = 20;
};

struct PolishResult {
  Candidate candidate;
  std::vector<PolishStep> log;
  bool converged = false;
  bool stagnated = false;
};

/// Coordinate descent on |mean(epsilon)|, following the eigenpair with the
/// largest overlap across steps; each coordinate also tries a secant step on
/// the signed mean. A sweep that does not lower the objective
/// halves the step; `stagnation_limit` such sweeps in a row stop the search.
PolishResult polish_candidate(const Candidate& seed, const CosineBasis& basis, const PolishOptions& opt = {});

/// (h, e) on the physical interval of delay a, re-verified at `tolerance`.
struct PhysicalCandidate {
  KernelOperator op;
  EigenPair pair;
};
PhysicalCandidate to_physical(const Candidate& c, double a, int n = 256, double tolerance = 1e-6);

}  // namespace delaysl
