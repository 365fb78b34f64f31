#include "delaysl/numerics.hpp"

#include <array>
#include <mutex>
#include <numbers>
#include <numeric>
#include <string>

namespace delaysl {

namespace {

constexpr int kMaxGaussPoints = 128;

QuadratureRule build_gauss_legendre(int m) {
  QuadratureRule r;
  r.lo = -1.0;
  r.hi = 1.0;
  r.nodes.assign(m, 0.0);
  r.weights.assign(m, 0.0);
  if (m == 1) {
    r.weights[0] = 2.0;
    return r;
  }
  // Legendre P_m and its derivative at x by the three-term recurrence.
  auto legendre = [m](double x, double& dp) {
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= m; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = m * (x * p1 - p0) / (x * x - 1.0);
    return p1;
  };
  for (int i = 0; i < m / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (m + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      const double dx = legendre(x, dp) / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    legendre(x, dp);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.nodes[i] = -x;
    r.nodes[m - 1 - i] = x;
    r.weights[i] = w;
    r.weights[m - 1 - i] = w;
  }
  if (m % 2 == 1) {
    double dp = 0.0;
    legendre(0.0, dp);
    r.weights[m / 2] = 2.0 / (dp * dp);
  }
  return r;
}

}  // namespace

const QuadratureRule& gauss_legendre(int m) {
  if (m < 1 || m > kMaxGaussPoints)
    throw InvalidInput("gauss_legendre: points must be in [1, 128], got " + std::to_string(m));
  static std::array<QuadratureRule, kMaxGaussPoints + 1> table;
  static std::array<std::once_flag, kMaxGaussPoints + 1> flags;
  std::call_once(flags[m], [m] { table[m] = build_gauss_legendre(m); });
  return table[m];
}

QuadratureRule make_composite_gauss(std::span<const double> breaks, int points_per_panel) {
  if (points_per_panel < 1) throw InvalidInput("make_composite_gauss: points_per_panel must be >= 1");
  if (breaks.size() < 2) throw InvalidInput("make_composite_gauss: need at least two breaks");
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i)
    if (!(breaks[i + 1] > breaks[i]))
      throw InvalidInput("make_composite_gauss: breaks must be strictly increasing");
  const QuadratureRule& g = gauss_legendre(points_per_panel);
  QuadratureRule r;
  r.lo = breaks.front();
  r.hi = breaks.back();
  r.nodes.reserve((breaks.size() - 1) * g.size());
  r.weights.reserve((breaks.size() - 1) * g.size());
  for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
    const double c = 0.5 * (breaks[p] + breaks[p + 1]);
    const double h = 0.5 * (breaks[p + 1] - breaks[p]);
    for (std::size_t i = 0; i < g.size(); ++i) {
      r.nodes.push_back(c + h * g.nodes[i]);
      r.weights.push_back(h * g.weights[i]);
    }
  }
  return r;
}

std::vector<double> panel_breaks(double lo, double hi, std::span<const double> interior, double max_width) {
  std::vector<double> pts;
  pts.reserve(interior.size() + 2);
  pts.push_back(lo);
  const double tol = 1e-13 * std::max(1.0, std::abs(hi) + std::abs(lo));
  for (double b : interior)
    if (b > lo + tol && b < hi - tol) pts.push_back(b);
  pts.push_back(hi);
  std::sort(pts.begin() + 1, pts.end() - 1);
  std::vector<double> merged;
  merged.reserve(pts.size());
  for (double b : pts) {
    if (!merged.empty() && b - merged.back() <= tol) {
      if (b == hi) merged.back() = hi;
      continue;
    }
    merged.push_back(b);
  }
  if (merged.size() == 1) merged.push_back(hi);
  if (!std::isfinite(max_width) || max_width <= 0.0) return merged;
  std::vector<double> out;
  out.reserve(merged.size());
  out.push_back(merged.front());
  for (std::size_t p = 0; p + 1 < merged.size(); ++p) {
    const double w = merged[p + 1] - merged[p];
    const int k = std::max(1, static_cast<int>(std::ceil(w / max_width)));
    for (int s = 1; s < k; ++s) out.push_back(merged[p] + w * s / k);
    out.push_back(merged[p + 1]);
  }
  return out;
}

SymMatrix::SymMatrix(std::size_t n, std::vector<double> entries) : n_(n), data_(std::move(entries)) {
  if (data_.size() != n * n) throw InvalidInput("SymMatrix: entries size mismatch");
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = 0.5 * (data_[i * n + j] + data_[j * n + i]);
      data_[i * n + j] = v;
      data_[j * n + i] = v;
    }
}

double SymMatrix::frobenius() const {
  double s = 0.0;
  for (double v : data_) s += v * v;
  return std::sqrt(s);
}

double SymMatrix::trace() const {
  double s = 0.0;
  for (std::size_t i = 0; i < n_; ++i) s += data_[i * n_ + i];
  return s;
}

std::vector<SymEigenPair> sym_eig(const SymMatrix& m) {
  const std::size_t n = m.order();
  for (double v : m.data())
    if (!std::isfinite(v)) throw InvalidInput("sym_eig: non-finite matrix entry");
  std::vector<double> a(m.data().begin(), m.data().end());
  std::vector<double> v(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;
  auto A = [&](std::size_t i, std::size_t j) -> double& { return a[i * n + j]; };

  std::vector<double> d(n), b(n), z(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) d[i] = b[i] = A(i, i);

  // Cyclic Jacobi with the threshold strategy of the classical Rutishauser code.
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += std::abs(A(p, q));
    if (off == 0.0) break;
    const double thresh = sweep < 3 ? 0.2 * off / static_cast<double>(n * n) : 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = A(p, q);
        const double g = 100.0 * std::abs(apq);
        if (sweep > 3 && std::abs(d[p]) + g == std::abs(d[p]) && std::abs(d[q]) + g == std::abs(d[q])) {
          A(p, q) = 0.0;
          continue;
        }
        if (std::abs(apq) <= thresh) continue;
        const double h = d[q] - d[p];
        double t;
        if (std::abs(h) + g == std::abs(h)) {
          t = apq / h;
        } else {
          const double theta = 0.5 * h / apq;
          t = 1.0 / (std::abs(theta) + std::sqrt(1.0 + theta * theta));
          if (theta < 0.0) t = -t;
        }
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        const double tau = s / (1.0 + c);
        const double hh = t * apq;
        z[p] -= hh;
        z[q] += hh;
        d[p] -= hh;
        d[q] += hh;
        A(p, q) = 0.0;
        auto rotate = [&](double& x, double& y) {
          const double gx = x, hy = y;
          x = gx - s * (hy + gx * tau);
          y = hy + s * (gx - hy * tau);
        };
        for (std::size_t j = 0; j < p; ++j) rotate(A(j, p), A(j, q));
        for (std::size_t j = p + 1; j < q; ++j) rotate(A(p, j), A(j, q));
        for (std::size_t j = q + 1; j < n; ++j) rotate(A(p, j), A(q, j));
        for (std::size_t j = 0; j < n; ++j) rotate(v[j * n + p], v[j * n + q]);
      }
    }
    for (std::size_t p = 0; p < n; ++p) {
      b[p] += z[p];
      d[p] = b[p];
      z[p] = 0.0;
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return std::abs(d[x]) > std::abs(d[y]); });
  std::vector<SymEigenPair> out;
  out.reserve(n);
  for (std::size_t k : order) {
    SymEigenPair e;
    e.value = d[k];
    e.vector.resize(n);
    for (std::size_t i = 0; i < n; ++i) e.vector[i] = v[i * n + k];
    out.push_back(std::move(e));
  }
  return out;
}

DenseLU::DenseLU(std::size_t n, std::vector<double> a) : n_(n), lu_(std::move(a)), piv_(n) {
  if (lu_.size() != n * n) throw InvalidInput("DenseLU: size mismatch");
  std::iota(piv_.begin(), piv_.end(), 0);
  double scale = 0.0;
  for (double x : lu_) scale = std::max(scale, std::abs(x));
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    double best = std::abs(lu_[k * n + k]);
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(lu_[i * n + k]) > best) best = std::abs(lu_[i * n + k]), p = i;
    if (best <= 1e-300 + 1e-17 * scale) {
      singular_ = true;
      lu_[k * n + k] = (scale > 0 ? scale : 1.0) * 1e-16;
    }
    if (p != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(lu_[k * n + j], lu_[p * n + j]);
      std::swap(piv_[k], piv_[p]);
    }
    const double pivot = lu_[k * n + k];
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = lu_[i * n + k] / pivot;
      lu_[i * n + k] = f;
      if (f == 0.0) continue;
      for (std::size_t j = k + 1; j < n; ++j) lu_[i * n + j] -= f * lu_[k * n + j];
    }
  }
}

std::vector<double> DenseLU::solve(std::span<const double> b) const {
  std::vector<double> x(n_);
  for (std::size_t i = 0; i < n_; ++i) x[i] = b[piv_[i]];
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < i; ++j) x[i] -= lu_[i * n_ + j] * x[j];
  for (std::size_t i = n_; i-- > 0;) {
    for (std::size_t j = i + 1; j < n_; ++j) x[i] -= lu_[i * n_ + j] * x[j];
    x[i] /= lu_[i * n_ + i];
  }
  return x;
}

Rectangle::Rectangle(double lr, double hr, double li, double hi) : lo_re(lr), hi_re(hr), lo_im(li), hi_im(hi) {
  if (!(lr < hr) || !(li < hi)) throw InvalidInput("Rectangle: require lo_re < hi_re and lo_im < hi_im");
}

Rectangle Rectangle::centered(cplx c, double hw, double hh) {
  return Rectangle(c.real() - hw, c.real() + hw, c.imag() - hh, c.imag() + hh);
}

namespace {

// Counter-clockwise boundary points, corners included, no duplicate closing point.
std::vector<cplx> boundary_points(const Rectangle& r, int samples) {
  const double perim = 2.0 * (r.width() + r.height());
  auto per_side = [&](double len) { return std::max(4, static_cast<int>(std::ceil(samples * len / perim))); };
  const std::array<cplx, 4> corners{cplx(r.lo_re, r.lo_im), cplx(r.hi_re, r.lo_im), cplx(r.hi_re, r.hi_im),
                                    cplx(r.lo_re, r.hi_im)};
  const std::array<int, 4> counts{per_side(r.width()), per_side(r.height()), per_side(r.width()),
                                  per_side(r.height())};
  std::vector<cplx> pts;
  for (int s = 0; s < 4; ++s) {
    const cplx z0 = corners[s], z1 = corners[(s + 1) % 4];
    for (int k = 0; k < counts[s]; ++k) pts.push_back(z0 + (z1 - z0) * (static_cast<double>(k) / counts[s]));
  }
  return pts;
}

}  // namespace

int count_zeros(const ComplexFn& f, const Rectangle& rect, int boundary_samples) {
  int samples = std::max(8, boundary_samples);
  for (int doubling = 0; doubling <= 6; ++doubling, samples *= 2) {
    const std::vector<cplx> pts = boundary_points(rect, samples);
    std::vector<cplx> vals(pts.size());
    double maxmod = 0.0, minmod = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pts.size(); ++i) {
      vals[i] = f(pts[i]);
      if (!std::isfinite(vals[i].real()) || !std::isfinite(vals[i].imag()))
        throw InvalidInput("count_zeros: non-finite function value on the boundary");
      maxmod = std::max(maxmod, std::abs(vals[i]));
      minmod = std::min(minmod, std::abs(vals[i]));
    }
    if (!(minmod > 1e-12 * maxmod)) throw ZeroOnBoundary("count_zeros: function vanishes on the rectangle boundary");
    double total = 0.0;
    bool resolved = true;
    for (std::size_t i = 0; i < vals.size(); ++i) {
      const double dphi = std::arg(vals[(i + 1) % vals.size()] / vals[i]);
      if (std::abs(dphi) >= 0.5 * std::numbers::pi) {
        resolved = false;
        break;
      }
      total += dphi;
    }
    if (!resolved) continue;
    const double winding = total / (2.0 * std::numbers::pi);
    const double rounded = std::round(winding);
    if (std::abs(winding - rounded) > 1e-3)
      throw ResolutionError("count_zeros: non-integer winding number");
    return static_cast<int>(rounded);
  }
  throw ResolutionError("count_zeros: phase not resolved after 6 doublings");
}

cplx refine_zero(const ComplexFn& f, cplx seed, double tol, int multiplicity, const Rectangle* bounds) {
  cplx z = seed;
  const double m = std::max(1, multiplicity);
  for (int it = 0; it < 60; ++it) {
    const cplx fz = f(z);
    if (fz == cplx(0.0)) return z;
    const double h = 1e-6 * (1.0 + std::abs(z));
    const cplx df = (f(z + h) - f(z - h)) / (2.0 * h);
    if (df == cplx(0.0) || !std::isfinite(std::abs(df)))
      throw DivergenceError("refine_zero: vanishing or non-finite derivative");
    const cplx step = m * fz / df;
    z -= step;
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw DivergenceError("refine_zero: iterate diverged");
    if (bounds && !bounds->contains(z, 1e-9 * (1.0 + std::abs(z))))
      throw DivergenceError("refine_zero: iterate left the search rectangle");
    if (std::abs(step) <= tol * (1.0 + std::abs(z))) return z;
  }
  throw DivergenceError("refine_zero: no convergence after 60 iterations");
}

cplx sinc_scaled(cplx rho, double z) {
  if (std::abs(rho) < 1e-3) {
    // z * sum_k (-1)^k (rho z)^{2k} / (2k+1)!
    const cplx u = rho * z * (rho * z);
    cplx term = z, sum = z;
    for (int k = 1; k < 6; ++k) {
      term *= -u / static_cast<double>((2 * k) * (2 * k + 1));
      sum += term;
    }
    return sum;
  }
  return std::sin(rho * z) / rho;
}

}  // namespace delaysl
