#include "delaysl/charfn.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "delaysl/parallel.hpp"

namespace delaysl {

namespace {

constexpr double kPi = std::numbers::pi;

void require_index(int v, const char* what) {
  if (v != 0 && v != 1) throw InvalidInput(std::string("problem: ") + what + " must be 0 or 1");
}

// Method of steps for y'' + lambda y = q(x) y(x - a) with q = 0 on (0, a).
class StepSolver {
 public:
  StepSolver(const PiecewisePotential& q, cplx lambda, cplx y0, cplx dy0)
      : q_(q), a_(q.a()), lambda_(lambda), rho_(rho_of(lambda)) {
    const double r = std::abs(rho_);
    max_width_ = r > 0.0 ? std::min(kPi, 4.0 / r) : kPi;
    starts_.push_back({y0, dy0});

    std::vector<double> base = q.singular_points();
    base.push_back(0.0);
    for (double s : base)
      for (double x = s; x < kPi; x += a_)
        if (x > 0.0) breaks_.push_back(x);
    std::sort(breaks_.begin(), breaks_.end());
  }

  EndState at(double x) {
    const int k = layer_of(x);
    const EndState& s = start(k);
    return eval(k, s, x, true);
  }

 private:
  int layer_of(double x) const { return std::max(0, static_cast<int>(std::ceil(x / a_ - 1e-12)) - 1); }

  cplx S(double z) const { return sinc_scaled(rho_, z); }
  cplx C(double z) const { return std::cos(rho_ * z); }

  const EndState& start(int k) {
    while (static_cast<int>(starts_.size()) <= k) {
      const int prev = static_cast<int>(starts_.size()) - 1;
      const EndState s = starts_[prev];
      starts_.push_back(eval(prev, s, a_ * (prev + 1), true));
    }
    return starts_[k];
  }

  // y (and y' when wanted) at x in layer k from that layer's start state.
  EndState eval(int k, const EndState& s, double x, bool want_dy) {
    const double xk = a_ * k;
    const double z = x - xk;
    EndState out{s.y * C(z) + s.dy * S(z), want_dy ? -lambda_ * s.y * S(z) + s.dy * C(z) : cplx(0.0)};
    if (k == 0 || x <= xk) return out;
    const EndState& prev = start(k - 1);
    const std::vector<cplx> acc = integrate(
        [&](double t) -> std::vector<cplx> {
          const cplx qt = q_.value(t);
          if (qt == cplx(0.0)) return {0.0, 0.0};
          const cplx g = qt * eval(k - 1, prev, t - a_, false).y;
          return {S(x - t) * g, want_dy ? C(x - t) * g : cplx(0.0)};
        },
        xk, x);
    out.y += acc[0];
    out.dy += acc[1];
    return out;
  }

  template <class F>
  std::vector<cplx> integrate(F&& f, double lo, double hi) const {
    std::vector<double> inner;
    for (double b : breaks_)
      if (b > lo && b < hi) inner.push_back(b);
    const std::vector<double> pb = panel_breaks(lo, hi, inner, max_width_);
    const QuadratureRule& g = gauss_legendre(16);
    std::vector<cplx> sum{0.0, 0.0};
    for (std::size_t p = 0; p + 1 < pb.size(); ++p) {
      const double c = 0.5 * (pb[p] + pb[p + 1]), r = 0.5 * (pb[p + 1] - pb[p]);
      if (q_.value(c) == cplx(0.0) && q_.value(pb[p] + 0.1 * r) == cplx(0.0) && zero_panel(pb[p], pb[p + 1]))
        continue;
      for (std::size_t i = 0; i < g.size(); ++i) {
        const std::vector<cplx> v = f(c + r * g.nodes[i]);
        sum[0] += r * g.weights[i] * v[0];
        sum[1] += r * g.weights[i] * v[1];
      }
    }
    return sum;
  }

  // Panel lies inside a segment without terms.
  bool zero_panel(double lo, double hi) const {
    for (const Segment& s : q_.segments())
      if (s.lo <= lo && hi <= s.hi) return s.terms.empty();
    return false;
  }

  const PiecewisePotential& q_;
  double a_;
  cplx lambda_, rho_;
  double max_width_;
  std::vector<double> breaks_;
  std::vector<EndState> starts_;
};

}  // namespace

ProblemSpec::ProblemSpec(int nu_, int j_, PiecewisePotential q_) : nu(nu_), j(j_), q(std::move(q_)) {
  require_index(nu, "nu");
  require_index(j, "j");
}

cplx rho_of(cplx lambda) {
  cplx r = std::sqrt(lambda);
  if (r.imag() < 0.0 || (r.imag() == 0.0 && r.real() < 0.0)) r = -r;
  return r;
}

double normalization(cplx lambda) { return std::cosh(std::abs(rho_of(lambda).imag()) * kPi); }

EndState solve_to_pi(int nu, const PiecewisePotential& q, cplx lambda) {
  require_index(nu, "nu");
  if (!std::isfinite(lambda.real()) || !std::isfinite(lambda.imag())) throw InvalidInput("lambda must be finite");
  StepSolver s(q, lambda, nu == 1 ? 1.0 : 0.0, nu == 1 ? 0.0 : 1.0);
  return s.at(kPi);
}

cplx char_fn_ode(const ProblemSpec& spec, cplx lambda) {
  const EndState e = solve_to_pi(spec.nu, spec.q, lambda);
  return spec.j == 0 ? e.y : e.dy;
}

// ------------------------------------------------------------------ repr

RepresentationEvaluator::RepresentationEvaluator(const ProblemSpec& spec, WFunction w, cplx omega)
    : nu_(spec.nu), j_(spec.j), a_(spec.a()), w_(std::move(w)), omega_(omega) {
  if (w_.nu() != nu_) throw InvalidInput("representation: w was computed for the other nu");
  const QuadratureRule& r = w_.rule();
  moments_.assign(24, 0.0);
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double z = kPi - 2.0 * r.nodes[i] + a_;
    const cplx wv = r.weights[i] * w_.samples()[i];
    double zk = 1.0;
    for (cplx& m : moments_) {
      m += wv * zk;
      zk *= z * z;
    }
  }
  if (nu_ == 0) {
    gap_ = std::abs(omega_ - moments_[0]);
    cancellation_ok_ = gap_ <= 1e-8 * (1.0 + std::abs(omega_));
  }
}

RepresentationEvaluator::RepresentationEvaluator(const ProblemSpec& spec)
    : RepresentationEvaluator(spec, compute_w(spec.nu, spec.q), delaysl::omega(spec.q)) {}

cplx RepresentationEvaluator::trig_integral(cplx rho, bool sine) const {
  const double r = std::abs(rho);
  const QuadratureRule& g = gauss_legendre(WFunction::points_per_panel);
  const std::vector<double>& b = w_.breaks();
  const std::size_t m = g.size();
  cplx sum = 0.0;
  auto kernel = [&](double x) -> cplx {
    const double z = kPi - 2.0 * x + a_;
    return sine ? sinc_scaled(rho, z) : std::cos(rho * z);
  };
  for (std::size_t p = 0; p + 1 < b.size(); ++p) {
    const double width = b[p + 1] - b[p];
    const int pieces = r * width > 4.0 ? static_cast<int>(std::ceil(r * width / 4.0)) : 1;
    if (pieces == 1) {
      for (std::size_t i = 0; i < m; ++i) {
        const std::size_t n = p * m + i;
        sum += w_.rule().weights[n] * w_.samples()[n] * kernel(w_.rule().nodes[n]);
      }
      continue;
    }
    const double h = width / pieces;
    for (int s = 0; s < pieces; ++s) {
      const double c = b[p] + h * (s + 0.5), rr = 0.5 * h;
      for (std::size_t i = 0; i < m; ++i) {
        const double x = c + rr * g.nodes[i];
        sum += rr * g.weights[i] * w_.value(x) * kernel(x);
      }
    }
  }
  return sum;
}

cplx RepresentationEvaluator::operator()(cplx lambda) const {
  const cplx rho = rho_of(lambda);
  if (nu_ != j_) {
    const double sj = j_ == 0 ? 1.0 : -1.0;
    return std::cos(rho * kPi) + omega_ * sinc_scaled(rho, kPi - a_) / 2.0 + sj / 2.0 * trig_integral(rho, true);
  }
  if (nu_ == 1) {
    // (-lambda)(sin rho pi / rho) + omega cos rho(pi - a) / 2 + (1/2) int w cos
    return -lambda * sinc_scaled(rho, kPi) + omega_ * std::cos(rho * (kPi - a_)) / 2.0 +
           trig_integral(rho, false) / 2.0;
  }
  if (std::abs(lambda) >= series_radius)
    return sinc_scaled(rho, kPi) - omega_ * std::cos(rho * (kPi - a_)) / (2.0 * lambda) +
           trig_integral(rho, false) / (2.0 * lambda);
  // Entire part of (-omega cos rho(pi - a) + int w cos rho z) / (2 lambda):
  // sum_{k >= 1} (-lambda)^k (m_k - omega (pi - a)^{2k}) / (2k)! / (2 lambda).
  cplx series = 0.0;
  cplx power = 1.0;  // (-lambda)^{k-1}
  double fact = 1.0;
  double pa = 1.0;
  const double L2 = (kPi - a_) * (kPi - a_);
  for (std::size_t k = 1; k < moments_.size(); ++k) {
    fact *= static_cast<double>((2 * k - 1) * (2 * k));
    pa *= L2;
    series += power * (moments_[k] - omega_ * pa) / fact;
    power *= -lambda;
  }
  return sinc_scaled(rho, kPi) - series / 2.0;
}

cplx char_fn_repr(const ProblemSpec& spec, cplx lambda, const WFunction& w, cplx omega) {
  return RepresentationEvaluator(spec, w, omega)(lambda);
}

// ------------------------------------------------------------------ grid

Method method_from_string(const std::string& s) {
  if (s == "ode") return Method::ode;
  if (s == "repr") return Method::repr;
  if (s == "both") return Method::both;
  throw InvalidInput("unknown method '" + s + "' (expected ode, repr or both)");
}

const char* to_string(Method m) {
  switch (m) {
    case Method::ode: return "ode";
    case Method::repr: return "repr";
    case Method::both: return "both";
  }
  return "both";
}

std::vector<CharFnSample> char_fn_grid(const ProblemSpec& spec, const std::vector<cplx>& lambdas, Method method) {
  std::optional<RepresentationEvaluator> rep;
  if (method != Method::ode) rep.emplace(spec);
  std::vector<CharFnSample> out(lambdas.size());
  parallel_for(lambdas.size(), [&](std::size_t i) {
    CharFnSample& s = out[i];
    s.lambda = lambdas[i];
    s.normalization = normalization(s.lambda);
    if (method != Method::repr) s.ode = char_fn_ode(spec, s.lambda);
    if (rep) s.repr = (*rep)(s.lambda);
    if (s.ode && s.repr) s.discrepancy = std::abs(*s.ode - *s.repr) / s.normalization;
  });
  return out;
}

}  // namespace delaysl
