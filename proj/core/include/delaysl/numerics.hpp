#pragma once

// Foundation layer: composite Gauss-Legendre quadrature, a dense symmetric
// eigensolver, a small dense LU, and complex-plane zero tools.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "delaysl/error.hpp"

namespace delaysl {

using cplx = std::complex<double>;

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  double lo = 0.0;
  double hi = 0.0;

  std::size_t size() const { return nodes.size(); }
};

/// m-point Gauss-Legendre rule on [-1, 1]; m in [1, 128]. Cached.
const QuadratureRule& gauss_legendre(int m);

/// Concatenated Gauss-Legendre rule, one panel per consecutive pair of breaks.
QuadratureRule make_composite_gauss(std::span<const double> panel_breaks, int points_per_panel);

/// Sorted, de-duplicated panel breaks for [lo, hi]: the endpoints, every
/// interior break, and uniform subdivision so no panel exceeds max_width.
std::vector<double> panel_breaks(double lo, double hi, std::span<const double> interior,
                                 double max_width = std::numeric_limits<double>::infinity());

/// Composite Gauss-Legendre integral of f over [lo, hi] with panels aligned
/// to `breaks` (points outside (lo, hi) are ignored).
template <class F>
auto integrate(F&& f, double lo, double hi, std::span<const double> breaks, int m = 16,
               double max_width = std::numeric_limits<double>::infinity()) -> decltype(f(lo)) {
  using R = decltype(f(lo));
  R sum{};
  if (!(hi > lo)) return sum;
  const QuadratureRule& g = gauss_legendre(m);
  const std::vector<double> pb = panel_breaks(lo, hi, breaks, max_width);
  for (std::size_t p = 0; p + 1 < pb.size(); ++p) {
    const double c = 0.5 * (pb[p] + pb[p + 1]);
    const double r = 0.5 * (pb[p + 1] - pb[p]);
    R panel{};
    for (std::size_t i = 0; i < g.size(); ++i) panel += g.weights[i] * f(c + r * g.nodes[i]);
    sum += r * panel;
  }
  return sum;
}

/// Real symmetric matrix, row-major. Symmetrized on construction.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(std::size_t n) : n_(n), data_(n * n, 0.0) {}
  SymMatrix(std::size_t n, std::vector<double> entries);

  std::size_t order() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
  /// Sets both (i, j) and (j, i).
  void set(std::size_t i, std::size_t j, double v) {
    data_[i * n_ + j] = v;
    data_[j * n_ + i] = v;
  }
  double frobenius() const;
  double trace() const;
  std::span<const double> data() const { return data_; }

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

struct SymEigenPair {
  double value = 0.0;
  std::vector<double> vector;  // unit 2-norm
};

/// Cyclic Jacobi eigen-decomposition, sorted by descending |eigenvalue|.
std::vector<SymEigenPair> sym_eig(const SymMatrix& m);

/// Dense LU with partial pivoting for general square systems.
class DenseLU {
 public:
  DenseLU(std::size_t n, std::vector<double> a);
  std::vector<double> solve(std::span<const double> b) const;
  bool singular() const { return singular_; }

 private:
  std::size_t n_;
  std::vector<double> lu_;
  std::vector<std::size_t> piv_;
  bool singular_ = false;
};

/// Axis-aligned rectangle in the complex plane.
struct Rectangle {
  double lo_re, hi_re, lo_im, hi_im;

  Rectangle(double lo_re, double hi_re, double lo_im, double hi_im);
  static Rectangle centered(cplx c, double half_width, double half_height);

  cplx center() const { return {0.5 * (lo_re + hi_re), 0.5 * (lo_im + hi_im)}; }
  double width() const { return hi_re - lo_re; }
  double height() const { return hi_im - lo_im; }
  bool contains(cplx z, double margin = 0.0) const {
    return z.real() >= lo_re - margin && z.real() <= hi_re + margin && z.imag() >= lo_im - margin &&
           z.imag() <= hi_im + margin;
  }
};

using ComplexFn = std::function<cplx(cplx)>;

/// Winding number of f along the boundary of rect (argument principle).
/// Doubles the sample count (at most 6 times) until every consecutive phase
/// increment is below pi/2.
int count_zeros(const ComplexFn& f, const Rectangle& rect, int boundary_samples = 64);

/// Newton iteration with a central-difference derivative (step
/// 1e-6 * (1 + |z|)). `multiplicity` > 1 selects the modified Newton step.
/// If `bounds` is given, a result outside it is a divergence.
cplx refine_zero(const ComplexFn& f, cplx seed, double tol, int multiplicity = 1,
                 const Rectangle* bounds = nullptr);

/// sin(rho z) / rho, entire in rho; Taylor series below |rho| = 1e-3.
cplx sinc_scaled(cplx rho, double z);

}  // namespace delaysl
