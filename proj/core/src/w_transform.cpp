#include "delaysl/w_transform.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "delaysl/parallel.hpp"

namespace delaysl {

namespace {

constexpr double kPi = std::numbers::pi;

SampledFunction part(const std::vector<double>& breaks, const std::vector<cplx>& v, bool imag) {
  std::vector<double> x(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) x[i] = imag ? v[i].imag() : v[i].real();
  return SampledFunction(breaks, WFunction::points_per_panel, std::move(x));
}

double sign_nu(int nu) {
  if (nu != 0 && nu != 1) throw InvalidInput("w-transform: nu must be 0 or 1");
  return nu == 0 ? 1.0 : -1.0;
}

std::vector<cplx> sample_grid(const QuadratureRule& r, const std::function<cplx(double)>& f) {
  std::vector<cplx> v(r.size());
  parallel_for(r.size(), [&](std::size_t i) { v[i] = f(r.nodes[i]); });
  return v;
}

bool inside(double x, double lo, double hi) { return x > lo && x < hi; }

}  // namespace

// ------------------------------------------------------------------ WFunction

WFunction::WFunction(int nu, double a, std::vector<double> breaks, std::vector<cplx> samples)
    : nu_(nu), a_(a), breaks_(std::move(breaks)), samples_(std::move(samples)),
      rule_(make_composite_gauss(breaks_, points_per_panel)), re_(part(breaks_, samples_, false)),
      im_(part(breaks_, samples_, true)) {}

cplx WFunction::value(double x) const { return {re_.value(x), im_.value(x)}; }

cplx WFunction::integral(double x0, double x1) const { return {re_.integral(x0, x1), im_.integral(x0, x1)}; }

double WFunction::sup_distance(const WFunction& other) const {
  double d = 0.0;
  for (std::size_t i = 0; i < rule_.size(); ++i)
    d = std::max(d, std::abs(samples_[i] - other.value(rule_.nodes[i])));
  for (std::size_t i = 0; i < other.rule_.size(); ++i)
    d = std::max(d, std::abs(other.samples_[i] - value(other.rule_.nodes[i])));
  return d;
}

// -------------------------------------------------------------------- grid

std::vector<double> w_grid(const PiecewisePotential& q) {
  const double a = q.a();
  std::vector<double> structural{a, 1.5 * a, kPi - 0.5 * a, kPi};
  for (double b : q.breakpoints())
    if (b >= a) structural.push_back(b);
  std::vector<double> cand = q.singular_points();
  cand.insert(cand.end(), structural.begin(), structural.end());
  for (double s : structural) {
    cand.push_back(s + 0.5 * a);
    cand.push_back(s - 0.5 * a);
    cand.push_back(kPi + 0.5 * a - s);
    for (double c : structural) cand.push_back(c - s + 0.5 * a);
  }
  std::vector<double> interior;
  for (double c : cand)
    if (inside(c, a, kPi)) interior.push_back(c);
  return panel_breaks(a, kPi, interior, 0.25);
}

// ---------------------------------------------------------------------- Q_nu

cplx compute_Q(int nu, const PiecewisePotential& q, double x) {
  const double s = sign_nu(nu);
  const double a = q.a();
  const double tol = 1e-12 * (1.0 + x);
  if (x < 1.5 * a - tol || x > kPi - 0.5 * a + tol)
    throw DomainError("compute_Q: x outside (3a/2, pi - a/2)");
  const cplx first = q.integral(a, x - 0.5 * a) * q.integral(x + 0.5 * a, kPi);
  const double upper = kPi - x + 0.5 * a;
  if (upper <= a) return first;
  std::vector<double> brk = q.singular_points();
  for (double c : q.singular_points()) brk.push_back(c - x + 0.5 * a);
  const cplx second = integrate(
      [&](double t) -> cplx {
        const cplx qt = q.value(t);
        if (qt == cplx(0.0)) return 0.0;
        return qt * q.integral(x + t - 0.5 * a, kPi);
      },
      a, upper, brk, 16, 0.25);
  return first - s * second;
}

WFunction compute_w(int nu, const PiecewisePotential& q) {
  sign_nu(nu);
  const double a = q.a();
  std::vector<double> b = w_grid(q);
  const QuadratureRule r = make_composite_gauss(b, WFunction::points_per_panel);
  std::vector<cplx> v = sample_grid(r, [&](double x) {
    cplx w = q.value(x);
    if (inside(x, 1.5 * a, kPi - 0.5 * a)) w += compute_Q(nu, q, x);
    return w;
  });
  return WFunction(nu, a, std::move(b), std::move(v));
}

WFunction compute_w_specialized(int nu, const PiecewisePotential& q, const KernelOperator& op) {
  const double s = sign_nu(nu);
  const double a = q.a();
  if (op.is_unit() || std::abs(op.a() - a) > 1e-14 * a)
    throw InvalidInput("compute_w_specialized: operator delay differs from the potential's");
  for (int i = 0; i < 64; ++i) {
    const double x = a + 0.5 * a * (i + 0.5) / 64.0;
    if (q.value(x) != cplx(0.0)) throw InvalidInput("compute_w_specialized: q does not vanish on (a, 3a/2)");
  }
  for (int i = 0; i <= 32; ++i) {
    const double x = 2.5 * a + (kPi - 2.5 * a) * (i + 0.5) / 33.0;
    const double h = op.h().value(x);
    if (std::abs(q.value(x) - h) > 1e-12 * (1.0 + std::abs(h)))
      throw InvalidInput("compute_w_specialized: h differs from q on (5a/2, pi)");
  }

  std::vector<double> q_breaks;
  for (double b : q.singular_points())
    if (inside(b, 1.5 * a, kPi - a)) q_breaks.push_back(b);
  const std::function<cplx(double)> q_mid = [&](double t) { return q.value(t); };

  std::vector<double> b = w_grid(q);
  const QuadratureRule r = make_composite_gauss(b, WFunction::points_per_panel);
  std::vector<cplx> v = sample_grid(r, [&](double x) -> cplx {
    if (x < 1.5 * a) return 0.0;
    if (x < kPi - a) return q.value(x) - s * apply_M(op, q_mid, x, q_breaks);
    if (x < 2.0 * a) return q.value(x);
    if (x < kPi - 0.5 * a) return q.value(x) + kernel_K(op, x + 0.5 * a) * q.integral(1.5 * a, x - 0.5 * a);
    if (x < 2.5 * a) return q.value(x);
    return op.h().value(x);
  });
  return WFunction(nu, a, std::move(b), std::move(v));
}

OmegaIdentity check_omega_identity(const PiecewisePotential& q, int nu) {
  OmegaIdentity r;
  r.omega = omega(q);
  r.integral_w0 = compute_w(nu, q).integral();
  r.gap = std::abs(r.omega - r.integral_w0);
  return r;
}

}  // namespace delaysl
