#include "delaysl/delay_operator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace delaysl {

namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

// Same function on [lo, hi] after the affine change of variable that maps
// the old interval onto the new one.
RealFunction remap(const RealFunction& f, double lo, double hi) {
  if (const auto* t = std::get_if<TrigSeries>(&f.variant())) return TrigSeries(lo, hi, t->terms(), t->label());
  if (const auto* s = std::get_if<SampledFunction>(&f.variant())) return s->remapped(lo, hi);
  if (const auto* l = std::get_if<LinearFunction>(&f.variant()))
    return LinearFunction(lo, hi, l->v_lo(), l->v_hi());
  const double l0 = f.lo(), l1 = f.hi();
  auto g = [&](double x) { return f.value(l0 + (l1 - l0) * (x - lo) / (hi - lo)); };
  return SampledFunction::from_function(g, panel_breaks(lo, hi, {}, (hi - lo) / 16.0), 20);
}

// Barycentric weights of the reference Gauss nodes.
std::vector<double> barycentric_weights(const QuadratureRule& g) {
  const std::size_t m = g.size();
  std::vector<double> lam(m, 1.0);
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t k = 0; k < m; ++k)
      if (k != j) lam[j] *= (g.nodes[j] - g.nodes[k]);
    lam[j] = 1.0 / lam[j];
  }
  return lam;
}

}  // namespace

bool delay_in_range(double a) { return a >= kPi / 3.0 * (1.0 - 1e-14) && a < 2.0 * kPi / 5.0; }

void require_delay_in_range(double a) {
  if (!delay_in_range(a)) throw DomainError("delay a = " + fmt(a) + " outside [pi/3, 2pi/5)");
}

// ------------------------------------------------------------ KernelOperator

KernelOperator::KernelOperator(bool unit, double a, double lo, double klo, double len, RealFunction h)
    : unit_(unit), a_(a), lo_(lo), klo_(klo), len_(len), h_(std::move(h)) {}

KernelOperator KernelOperator::physical(double a, RealFunction h) {
  require_delay_in_range(a);
  const double klo = 2.5 * a, len = kPi - 2.5 * a;
  if (std::abs(h.lo() - klo) > 1e-12 || std::abs(h.hi() - kPi) > 1e-12)
    throw InvalidInput("KernelOperator: h must be given on (5a/2, pi)");
  return KernelOperator(false, a, 1.5 * a, klo, len, std::move(h));
}

KernelOperator KernelOperator::unit(RealFunction chi) {
  if (std::abs(chi.lo()) > 1e-14 || std::abs(chi.hi() - 1.0) > 1e-14)
    throw InvalidInput("KernelOperator: chi must be given on (0, 1)");
  return KernelOperator(true, std::numeric_limits<double>::quiet_NaN(), 0.0, 0.0, 1.0, std::move(chi));
}

double KernelOperator::kernel_extended(double s) const {
  const double khi = klo_ + len_;
  if (s >= khi) return 0.0;
  return h_.integral(std::max(s, klo_), khi);
}

KernelOperator KernelOperator::scaled(double c) const {
  return KernelOperator(unit_, a_, lo_, klo_, len_, h_.scaled(c));
}

double KernelOperator::h_l1_norm() const {
  const std::vector<double> b = h_.breaks();
  return integrate([this](double x) { return std::abs(h_.value(x)); }, klo_, klo_ + len_, b, 24, len_ / 8.0);
}

double kernel_K(const KernelOperator& op, double x) {
  const double lo = op.is_unit() ? 0.0 : op.a();
  const double hi = op.kernel_hi();
  if (x < lo - 1e-14 || x > hi + 1e-14) throw DomainError("kernel_K: x = " + fmt(x) + " outside the kernel domain");
  return op.kernel_extended(x);
}

// ------------------------------------------------------------------- apply_M

namespace {

std::vector<double> row_breaks(const KernelOperator& op, double x, std::vector<double> extra) {
  for (double b : op.h().breaks()) extra.push_back(b - x + 2.0 * op.lo() - op.kernel_lo());
  return extra;
}

void require_in_interval(const KernelOperator& op, double x) {
  const double tol = 1e-12 * (1.0 + std::abs(x));
  if (x < op.lo() - tol || x > op.hi() + tol)
    throw DomainError("apply_M: x = " + fmt(x) + " outside the operator interval");
}

}  // namespace

double apply_M(const KernelOperator& op, const RealFunction& f, double x) {
  require_in_interval(op, x);
  const double upper = std::min(op.hi(), op.cutoff(x));
  if (upper <= op.lo()) return 0.0;
  const std::vector<double> brk = row_breaks(op, x, f.breaks());
  return integrate([&](double t) { return op.kernel_extended(op.kernel_argument(x, t)) * f.value(t); }, op.lo(),
                   upper, brk, 24, op.length() / 4.0);
}

std::complex<double> apply_M(const KernelOperator& op, const std::function<std::complex<double>(double)>& f,
                             double x, const std::vector<double>& f_breaks) {
  require_in_interval(op, x);
  const double upper = std::min(op.hi(), op.cutoff(x));
  if (upper <= op.lo()) return 0.0;
  const std::vector<double> brk = row_breaks(op, x, f_breaks);
  return integrate(
      [&](double t) -> std::complex<double> { return op.kernel_extended(op.kernel_argument(x, t)) * f(t); },
      op.lo(), upper, brk, 24, op.length() / 4.0);
}

// ------------------------------------------------------------------- Nystrom

std::vector<double> nystrom_breaks(const KernelOperator& op, int n, int& m) {
  if (n < 8) throw InvalidInput("nystrom: need n >= 8");
  int panels = 1;
  m = n;
  if (n % 16 == 0) {
    panels = n / 16;
    m = 16;
  }
  if (m > 128) throw InvalidInput("nystrom: n must be a multiple of 16 when above 128");
  std::vector<double> b(panels + 1);
  for (int p = 0; p <= panels; ++p) b[p] = op.lo() + op.length() * p / panels;
  b.back() = op.hi();
  return b;
}

NystromSystem nystrom(const KernelOperator& op, int n) {
  NystromSystem sys;
  sys.panel_breaks = nystrom_breaks(op, n, sys.points_per_panel);
  sys.grid = make_composite_gauss(sys.panel_breaks, sys.points_per_panel);
  const std::size_t N = sys.grid.size();
  std::vector<double> sw(N);
  for (std::size_t i = 0; i < N; ++i) sw[i] = std::sqrt(sys.grid.weights[i]);
  SymMatrix a(N);
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = i; j < N; ++j)
      a.set(i, j, sw[i] * sw[j] * op.kernel_extended(op.kernel_argument(sys.grid.nodes[i], sys.grid.nodes[j])));
  sys.matrix = std::move(a);
  return sys;
}

namespace {

// Product-integration matrix: B[i][j] = int K~(x_i + t + shift) l_j(t) dt
// with l_j the Lagrange basis of node j's panel and each row split at t*.
std::vector<double> product_matrix(const KernelOperator& op, const NystromSystem& sys) {
  const std::size_t N = sys.grid.size();
  const int m = sys.points_per_panel;
  const QuadratureRule& ref = gauss_legendre(m);
  const std::vector<double> lam = barycentric_weights(ref);
  const std::size_t panels = sys.panel_breaks.size() - 1;
  std::vector<double> B(N * N, 0.0);
  const QuadratureRule& g = gauss_legendre(std::min(128, m + 12));
  std::vector<double> ell(m);
  for (std::size_t i = 0; i < N; ++i) {
    const double x = sys.grid.nodes[i];
    const double tstar = std::min(op.hi(), op.cutoff(x));
    const std::vector<double> hb = row_breaks(op, x, {});
    for (std::size_t p = 0; p < panels; ++p) {
      const double P0 = sys.panel_breaks[p], P1 = sys.panel_breaks[p + 1];
      if (P0 >= tstar) break;
      const double upper = std::min(P1, tstar);
      const std::vector<double> sub = panel_breaks(P0, upper, hb);
      const double pc = 0.5 * (P0 + P1), pr = 0.5 * (P1 - P0);
      for (std::size_t s = 0; s + 1 < sub.size(); ++s) {
        const double c = 0.5 * (sub[s] + sub[s + 1]), r = 0.5 * (sub[s + 1] - sub[s]);
        for (std::size_t q = 0; q < g.size(); ++q) {
          const double t = c + r * g.nodes[q];
          const double kw = r * g.weights[q] * op.kernel_extended(op.kernel_argument(x, t));
          if (kw == 0.0) continue;
          const double tr = (t - pc) / pr;
          double denom = 0.0;
          int hit = -1;
          for (int j = 0; j < m; ++j) {
            const double d = tr - ref.nodes[j];
            if (d == 0.0) {
              hit = j;
              break;
            }
            ell[j] = lam[j] / d;
            denom += ell[j];
          }
          double* row = &B[i * N + p * m];
          if (hit >= 0) {
            row[hit] += kw;
          } else {
            for (int j = 0; j < m; ++j) row[j] += kw * ell[j] / denom;
          }
        }
      }
    }
  }
  return B;
}

// Value of largest magnitude of the interpolant, located by dense sampling
// and a golden-section search around the best sample.
double signed_sup(const SampledFunction& f) {
  const std::vector<double>& b = f.breaks();
  const int per = 4 * f.points_per_panel();
  double xbest = b.front(), vbest = f.value(b.front());
  double step = 0.0;
  for (std::size_t p = 0; p + 1 < b.size(); ++p) {
    const double h = (b[p + 1] - b[p]) / per;
    for (int k = 1; k <= per; ++k) {
      const double x = b[p] + h * k;
      const double v = f.value(x);
      if (std::abs(v) > std::abs(vbest)) {
        xbest = x;
        vbest = v;
        step = h;
      }
    }
  }
  if (step == 0.0) step = (b[1] - b[0]) / per;
  double lo = std::max(b.front(), xbest - step), hi = std::min(b.back(), xbest + step);
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  auto mag = [&](double x) { return std::abs(f.value(x)); };
  double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
  double f1 = mag(x1), f2 = mag(x2);
  for (int it = 0; it < 80 && hi - lo > 1e-15 * (1.0 + std::abs(hi)); ++it) {
    if (f1 > f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - g * (hi - lo);
      f1 = mag(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + g * (hi - lo);
      f2 = mag(x2);
    }
  }
  const double v = f.value(0.5 * (lo + hi));
  return std::abs(v) > std::abs(vbest) ? v : vbest;
}

}  // namespace

double eigen_residual(const KernelOperator& op, const RealFunction& e, double eta, int n) {
  int m = 0;
  const std::vector<double> b = nystrom_breaks(op, n, m);
  const QuadratureRule grid = make_composite_gauss(b, m);
  double num = 0.0, den = 0.0;
  for (double x : grid.nodes) {
    const double ex = e.value(x);
    num = std::max(num, std::abs(apply_M(op, e, x) - eta * ex));
    den = std::max(den, std::abs(ex));
  }
  if (den == 0.0) throw InvalidInput("eigen_residual: zero eigenfunction");
  return num / den;
}

double mean_value(const KernelOperator& op, const RealFunction& f) {
  return integrate([&](double x) { return f.value(x); }, op.lo(), op.hi(), f.breaks(), 24, op.length() / 8.0);
}

double mean_value(const EigenPair& p) { return p.mean; }

EigenPair make_pair(const KernelOperator& op, const RealFunction& e, double eta, int n, double tolerance) {
  EigenPair p{.eta = eta, .e = e};
  p.mean = mean_value(op, e);
  p.residual = eigen_residual(op, e, eta, n);
  p.tolerance = tolerance;
  return p;
}

std::vector<EigenPair> eigenpairs(const KernelOperator& op, int n, int k, const EigenOptions& opt) {
  if (k < 1) throw InvalidInput("eigenpairs: k must be >= 1");
  const NystromSystem sys = nystrom(op, n);
  const std::size_t N = sys.grid.size();
  double kmax = 0.0;
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) {
      const double w = std::sqrt(sys.grid.weights[i] * sys.grid.weights[j]);
      kmax = std::max(kmax, std::abs(sys.matrix(i, j)) / w);
    }
  const double scale = kmax * op.length();
  const std::vector<SymEigenPair> eig = sym_eig(sys.matrix);
  if (scale == 0.0 || std::abs(eig.front().value) <= 1e-12 * scale)
    throw DegenerateOperator("eigenpairs: all eigenvalues vanish");

  const std::vector<double> B = product_matrix(op, sys);
  const int check_n = 2 * static_cast<int>(N) % 16 == 0 ? 2 * static_cast<int>(N) : 256;
  std::vector<EigenPair> out;
  for (std::size_t idx = 0; idx < eig.size() && out.size() < static_cast<std::size_t>(k); ++idx) {
    const double eta0 = eig[idx].value;
    if (std::abs(eta0) <= 1e-12 * scale) break;
    std::vector<double> e(N);
    for (std::size_t i = 0; i < N; ++i) e[i] = eig[idx].vector[i] / std::sqrt(sys.grid.weights[i]);

    // Inverse iteration on the kink-aware matrix with the Nystrom eigenvalue as shift.
    std::vector<double> shifted = B;
    for (std::size_t i = 0; i < N; ++i) shifted[i * N + i] -= eta0;
    const DenseLU lu(N, std::move(shifted));
    double eta = eta0;
    for (int it = 0; it < opt.refine_iterations; ++it) {
      std::vector<double> z = lu.solve(e);
      double zmax = 0.0;
      for (double v : z) zmax = std::max(zmax, std::abs(v));
      if (!(zmax > 0.0) || !std::isfinite(zmax)) break;
      for (std::size_t i = 0; i < N; ++i) e[i] = z[i] / zmax;
      double num = 0.0, den = 0.0;
      for (std::size_t i = 0; i < N; ++i) {
        double be = 0.0;
        for (std::size_t j = 0; j < N; ++j) be += B[i * N + j] * e[j];
        num += sys.grid.weights[i] * e[i] * be;
        den += sys.grid.weights[i] * e[i] * e[i];
      }
      eta = num / den;
    }

    const double norm = signed_sup(SampledFunction(sys.panel_breaks, sys.points_per_panel, e));
    for (double& v : e) v /= norm;

    RealFunction ef = SampledFunction(sys.panel_breaks, sys.points_per_panel, e);
    EigenPair p{.eta = eta, .e = ef};
    p.mean = 0.0;
    for (std::size_t i = 0; i < N; ++i) p.mean += sys.grid.weights[i] * e[i];
    p.tolerance = opt.tolerance;
    p.residual = eigen_residual(op, p.e, eta, check_n);
    p.multiplicity = 0;
    const double mtol = std::max(1e-6 * std::abs(eta0), 1e-12 * scale);
    for (const SymEigenPair& other : eig)
      if (std::abs(other.value - eta0) <= mtol) ++p.multiplicity;
    out.push_back(std::move(p));
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const EigenPair& x, const EigenPair& y) { return std::abs(x.eta) > std::abs(y.eta); });
  return out;
}

// ----------------------------------------------------------- unit rescaling

NormalizedPair normalize_for(int nu, const KernelOperator& op, const EigenPair& p) {
  if (nu != 0 && nu != 1) throw InvalidInput("normalize_for: nu must be 0 or 1");
  if (p.eta == 0.0) throw InvalidInput("normalize_for: zero eigenvalue");
  const double target = nu == 0 ? 1.0 : -1.0;
  const double c = target / p.eta;
  EigenPair q = p;
  q.eta = target;
  q.residual = p.residual * std::abs(c);
  return {op.scaled(c), q};
}

UnitPair rescale_to_unit(const KernelOperator& op, const EigenPair& p, int nu, double tolerance) {
  if (op.is_unit()) throw InvalidInput("rescale_to_unit: operator is already on the unit interval");
  if (nu != 0 && nu != 1) throw InvalidInput("rescale_to_unit: nu must be 0 or 1");
  const double len = op.length();
  const double target = nu == 0 ? 1.0 : -1.0;
  const RealFunction chi = remap(op.h(), 0.0, 1.0).scaled(len * len * target / p.eta);
  const RealFunction eps = remap(p.e, 0.0, 1.0);
  const KernelOperator unit_op = KernelOperator::unit(chi);
  UnitPair u{.chi = chi, .epsilon = eps, .nu = nu};
  u.residual = eigen_residual(unit_op, eps, target, 256);
  if (!(u.residual <= tolerance))
    throw InconsistentPair("rescale_to_unit: unit relation residual " + fmt(u.residual) + " above tolerance");
  return u;
}

RealFunction unit_to_physical_h(const RealFunction& chi, double a) {
  require_delay_in_range(a);
  const double len = kPi - 2.5 * a;
  return remap(chi, 2.5 * a, kPi).scaled(1.0 / (len * len));
}

RealFunction unit_to_physical_e(const RealFunction& epsilon, double a) {
  require_delay_in_range(a);
  return remap(epsilon, 1.5 * a, kPi - a);
}

BuiltinPairs builtin_pairs(double a) {
  require_delay_in_range(a);
  const double A = 2.0 * kPi - 5.0 * a;
  const double w = kPi * std::sqrt(10.0) / 2.0;
  const double amp = 6.0 * kPi * kPi / (A * A);
  // cos(w (1 - u)) with u = (x - 5a/2) / (pi - 5a/2) equals cos(pi sqrt10 (pi - x) / A).
  TrigSeries h1(2.5 * a, kPi, {{amp, -w, w}}, "h1");
  TrigSeries e1(1.5 * a, kPi - a, {{1.0, 2.0 * kPi, 0.0}, {1.0, kPi, 0.0}}, "e1");
  TrigSeries e0(1.5 * a, kPi - a, {{1.0, 2.0 * kPi, -kPi / 2.0}, {2.0, kPi, -kPi / 2.0}}, "e0");
  TrigSeries h0(2.5 * a, kPi, {{amp, -w, w}}, "h0");
  return {h1, e1, h0, e0};
}

}  // namespace delaysl
