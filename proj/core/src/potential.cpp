#include "delaysl/potential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>

namespace delaysl {

namespace {

constexpr double kPi = std::numbers::pi;

double edge_tol(double x) { return 1e-12 * (1.0 + std::abs(x)); }

void require_target_pair(int nu, const EigenPair& p) {
  if (nu != 0 && nu != 1) throw InvalidInput("family: nu must be 0 or 1");
  const double target = nu == 0 ? 1.0 : -1.0;
  if (!p.verified()) throw InconsistentPair("family: eigenpair residual above its tolerance");
  if (std::abs(p.eta - target) > std::max(p.tolerance, 1e-12))
    throw InconsistentPair("family: eigenvalue must equal (-1)^nu; normalize the kernel first");
}

Segment zero_segment(double lo, double hi) { return Segment{lo, hi, SegmentRole::zero, {}}; }

std::vector<Segment> family_segments(double a, cplx alpha, const KernelOperator& op, const EigenPair& p,
                                     const std::optional<BridgeFunction>& bridge) {
  auto h = std::make_shared<const RealFunction>(op.h());
  auto e = std::make_shared<const RealFunction>(p.e);
  const RealFunction G = ProductIntegralFunction(h, e, 0.5 * a);
  std::vector<Segment> s;
  s.push_back(zero_segment(0.0, a));
  s.push_back(zero_segment(a, 1.5 * a));
  s.push_back(Segment{1.5 * a, kPi - a, SegmentRole::eigenfunction, {{alpha, p.e}}});
  s.push_back(zero_segment(kPi - a, 2.0 * a));
  s.push_back(Segment{2.0 * a, kPi - 0.5 * a, SegmentRole::product_integral, {{-alpha, G}}});
  if (bridge)
    s.push_back(Segment{kPi - 0.5 * a, 2.5 * a, SegmentRole::bridge, {{1.0, bridge->g}}});
  else
    s.push_back(zero_segment(kPi - 0.5 * a, 2.5 * a));
  s.push_back(Segment{2.5 * a, kPi, SegmentRole::kernel, {{1.0, op.h()}}});
  return s;
}

}  // namespace

const char* to_string(SegmentRole r) {
  switch (r) {
    case SegmentRole::zero: return "zero";
    case SegmentRole::eigenfunction: return "eigenfunction";
    case SegmentRole::product_integral: return "product-integral";
    case SegmentRole::bridge: return "bridge";
    case SegmentRole::kernel: return "kernel";
    case SegmentRole::samples: return "samples";
  }
  return "zero";
}

SegmentRole segment_role_from_string(const std::string& s) {
  for (SegmentRole r : {SegmentRole::zero, SegmentRole::eigenfunction, SegmentRole::product_integral,
                        SegmentRole::bridge, SegmentRole::kernel, SegmentRole::samples})
    if (s == to_string(r)) return r;
  throw InvalidInput("unknown segment role '" + s + "'");
}

// ------------------------------------------------------------------- Segment

cplx Segment::value(double x) const {
  cplx s = 0.0;
  for (const Term& t : terms) s += t.factor * t.f.value(x);
  return s;
}

cplx Segment::derivative(double x) const {
  cplx s = 0.0;
  for (const Term& t : terms) s += t.factor * t.f.derivative(x);
  return s;
}

cplx Segment::integral(double x0, double x1) const {
  cplx s = 0.0;
  for (const Term& t : terms) s += t.factor * t.f.integral(x0, x1);
  return s;
}

std::vector<double> Segment::interior_breaks() const {
  std::vector<double> out;
  for (const Term& t : terms)
    for (double b : t.f.breaks())
      if (b > lo + edge_tol(lo) && b < hi - edge_tol(hi)) out.push_back(b);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// -------------------------------------------------------- PiecewisePotential

PiecewisePotential::PiecewisePotential(double a, std::vector<Segment> segments, cplx alpha, std::string family)
    : a_(a), alpha_(alpha), family_(std::move(family)) {
  if (!(a > 0.0 && a < kPi)) throw InvalidInput("potential: delay must lie in (0, pi)");
  double at = 0.0;
  for (Segment& s : segments) {
    if (std::abs(s.lo - at) > edge_tol(at)) throw InvalidInput("potential: segments must tile [0, pi] in order");
    s.lo = at;
    if (s.hi < s.lo - edge_tol(s.lo)) throw InvalidInput("potential: segment with hi < lo");
    at = std::max(s.hi, s.lo);
    if (s.hi - s.lo <= edge_tol(s.lo)) continue;
    if (s.lo < a - edge_tol(a) && !s.terms.empty()) {
      bool all_zero = true;
      for (const auto& t : s.terms) all_zero = all_zero && t.factor == cplx(0.0);
      if (!all_zero) throw InvalidInput("potential: q must vanish on (0, a)");
    }
    segments_.push_back(std::move(s));
  }
  if (segments_.empty() || std::abs(at - kPi) > edge_tol(kPi))
    throw InvalidInput("potential: segments must end at pi");
  segments_.back().hi = kPi;
}

PiecewisePotential PiecewisePotential::zero(double a) {
  return PiecewisePotential(a, {zero_segment(0.0, a), zero_segment(a, kPi)});
}

void PiecewisePotential::set_info(FamilyInfo info) { info_ = std::move(info); }

std::vector<double> PiecewisePotential::breakpoints() const {
  std::vector<double> out{0.0};
  for (const Segment& s : segments_) out.push_back(s.hi);
  return out;
}

std::vector<double> PiecewisePotential::singular_points() const {
  std::vector<double> out;
  for (std::size_t k = 0; k < segments_.size(); ++k) {
    if (k > 0) out.push_back(segments_[k].lo);
    for (double b : segments_[k].interior_breaks()) out.push_back(b);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::size_t PiecewisePotential::segment_index(double x) const {
  const auto it = std::upper_bound(segments_.begin(), segments_.end(), x,
                                   [](double v, const Segment& s) { return v < s.lo; });
  if (it == segments_.begin()) return 0;
  return static_cast<std::size_t>(it - segments_.begin()) - 1;
}

cplx PiecewisePotential::value(double x) const {
  const Segment& s = segments_[segment_index(x)];
  return s.terms.empty() ? cplx(0.0) : s.value(x);
}

cplx PiecewisePotential::right_limit(double x) const { return value(x); }

cplx PiecewisePotential::left_limit(double x) const {
  std::size_t k = segment_index(x);
  if (k > 0 && x <= segments_[k].lo) --k;
  const Segment& s = segments_[k];
  return s.terms.empty() ? cplx(0.0) : s.value(x);
}

cplx PiecewisePotential::derivative(double x) const {
  const Segment& s = segments_[segment_index(x)];
  return s.terms.empty() ? cplx(0.0) : s.derivative(x);
}

cplx PiecewisePotential::integral(double x0, double x1) const {
  if (x1 < x0) return -integral(x1, x0);
  cplx sum = 0.0;
  for (const Segment& s : segments_) {
    const double lo = std::max(x0, s.lo), hi = std::min(x1, s.hi);
    if (hi <= lo || s.terms.empty()) continue;
    sum += s.integral(lo, hi);
  }
  return sum;
}

double PiecewisePotential::sup_norm() const {
  double m = 0.0;
  for (const Segment& s : segments_) {
    if (s.terms.empty()) continue;
    for (int i = 0; i <= 256; ++i) m = std::max(m, std::abs(s.value(s.lo + (s.hi - s.lo) * i / 256.0)));
  }
  return m;
}

double PiecewisePotential::l1_norm() const {
  double sum = 0.0;
  for (const Segment& s : segments_) {
    if (s.terms.empty()) continue;
    sum += integrate([&](double x) { return std::abs(s.value(x)); }, s.lo, s.hi, s.interior_breaks(), 24, 0.125);
  }
  return sum;
}

bool PiecewisePotential::is_real() const {
  for (const Segment& s : segments_)
    for (const auto& t : s.terms)
      if (t.factor.imag() != 0.0) return false;
  return true;
}

// ------------------------------------------------------------------ families

PiecewisePotential build_family(int nu, cplx alpha, const KernelOperator& op, const EigenPair& p) {
  if (op.is_unit()) throw InvalidInput("build_family: operator must be in physical coordinates");
  const double a = op.a();
  require_delay_in_range(a);
  require_target_pair(nu, p);
  PiecewisePotential q(a, family_segments(a, alpha, op, p, std::nullopt), alpha, nu == 0 ? "B0" : "B1");
  q.set_info(FamilyInfo{q.family(), nu, op, p, std::nullopt});
  return q;
}

PiecewisePotential build_smooth_family(cplx alpha, const BridgeFunction& g, const KernelOperator& op,
                                       const EigenPair& p0) {
  if (op.is_unit()) throw InvalidInput("build_smooth_family: operator must be in physical coordinates");
  const double a = op.a();
  if (!(a > kPi / 3.0 && a < 2.0 * kPi / 5.0))
    throw DomainError("build_smooth_family: delay must lie strictly inside (pi/3, 2pi/5)");
  require_target_pair(0, p0);
  const double x0 = kPi - 0.5 * a, x1 = 2.5 * a;
  if (std::abs(g.g.lo() - x0) > edge_tol(x0) || std::abs(g.g.hi() - x1) > edge_tol(x1))
    throw InvalidInput("build_smooth_family: bridge must be given on [pi - a/2, 5a/2]");
  const double h_end = op.h().value(x1);
  if (std::abs(g.g.value(x0)) > 1e-12 || std::abs(g.g.value(x1) - h_end) > 1e-12 * (1.0 + std::abs(h_end)))
    throw InvalidInput("build_smooth_family: bridge endpoint values violate g(pi - a/2) = 0, g(5a/2) = h(5a/2)");
  PiecewisePotential q(a, family_segments(a, alpha, op, p0, g), alpha, "B0-smooth");
  q.set_info(FamilyInfo{q.family(), 0, op, p0, g});
  return q;
}

PiecewisePotential with_alpha(const PiecewisePotential& q, cplx alpha) {
  if (!q.info()) throw InvalidInput("with_alpha: potential is not a family member");
  const FamilyInfo& f = *q.info();
  if (f.bridge) return build_smooth_family(alpha, *f.bridge, f.op, f.pair);
  return build_family(f.nu, alpha, f.op, f.pair);
}

BridgeFunction make_bridge(double a, RealFunction g) {
  if (!(a > kPi / 3.0 && a < 2.0 * kPi / 5.0))
    throw DomainError("bridge: delay must lie strictly inside (pi/3, 2pi/5)");
  const double x0 = kPi - 0.5 * a, x1 = 2.5 * a;
  if (std::abs(g.lo() - x0) > edge_tol(x0) || std::abs(g.hi() - x1) > edge_tol(x1))
    throw InvalidInput("bridge: g must be given on [pi - a/2, 5a/2]");
  const double target = builtin_pairs(a).h0.value(x1);
  BridgeFunction b{g, g.value(x0), g.value(x1)};
  if (std::abs(b.value_lo) > 1e-12 || std::abs(b.value_hi - target) > 1e-12 * (1.0 + std::abs(target)))
    throw InvalidInput("bridge: endpoint values violate g(pi - a/2) = 0, g(5a/2) = h0(5a/2)");
  return b;
}

BridgeFunction default_bridge(double a) {
  if (!(a > kPi / 3.0 && a < 2.0 * kPi / 5.0))
    throw DomainError("bridge: delay must lie strictly inside (pi/3, 2pi/5)");
  const double target = builtin_pairs(a).h0.value(2.5 * a);
  return make_bridge(a, LinearFunction(kPi - 0.5 * a, 2.5 * a, 0.0, target));
}

cplx omega(const PiecewisePotential& q) { return q.integral(q.a(), kPi); }

W21Report check_w21(const PiecewisePotential& q) {
  W21Report r;
  const double tol = 1e-10 * (1.0 + q.sup_norm());
  for (std::size_t k = 1; k < q.segments().size(); ++k) {
    const double x = q.segments()[k].lo;
    const double gap = std::abs(q.right_limit(x) - q.left_limit(x));
    r.junction_gaps.push_back({x, gap});
    if (!(gap < tol)) r.continuous = false;
  }
  if (!r.continuous) {
    r.derivative_l2 = std::numeric_limits<double>::infinity();
    return r;
  }
  double sum = 0.0;
  for (const Segment& s : q.segments()) {
    if (s.terms.empty()) continue;
    sum += integrate([&](double x) { return std::norm(s.derivative(x)); }, s.lo, s.hi, s.interior_breaks(), 24,
                     0.125);
  }
  r.derivative_l2 = std::sqrt(sum);
  return r;
}

RealFunction tail_function(const PiecewisePotential& q) {
  const double lo = 2.5 * q.a();
  std::vector<const Segment*> tail;
  for (const Segment& s : q.segments())
    if (s.hi > lo + edge_tol(lo)) tail.push_back(&s);
  if (tail.size() == 1 && tail.front()->terms.size() == 1 && std::abs(tail.front()->lo - lo) <= edge_tol(lo)) {
    const Segment::Term& t = tail.front()->terms.front();
    if (t.factor.imag() == 0.0 && std::abs(t.f.lo() - lo) <= edge_tol(lo) && std::abs(t.f.hi() - kPi) <= edge_tol(kPi))
      return t.f.scaled(t.factor.real());
  }
  std::vector<double> inner;
  for (double b : q.singular_points())
    if (b > lo) inner.push_back(b);
  auto f = [&](double x) {
    const cplx v = q.value(x);
    if (v.imag() != 0.0) throw InvalidInput("tail_function: q is complex on (5a/2, pi)");
    return v.real();
  };
  return SampledFunction::from_function(f, panel_breaks(lo, kPi, inner, (kPi - lo) / 4.0), 24);
}

PiecewisePotential random_admissible_potential(double a, std::mt19937_64& rng, double max_abs) {
  if (!(max_abs > 0.0)) throw InvalidInput("random potential: max_abs must be positive");
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> cuts{1.5 * a, kPi - a, 2.0 * a, kPi - 0.5 * a, 2.5 * a};
  for (int k = 0; k < 2; ++k) cuts.push_back(1.5 * a + (kPi - 1.5 * a) * (0.05 + 0.9 * u(rng)));
  cuts.push_back(kPi);
  std::sort(cuts.begin(), cuts.end());
  for (int attempt = 0;; ++attempt) {
    std::vector<Segment> segs{zero_segment(0.0, a), zero_segment(a, cuts.front())};
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
      const double lo = cuts[k], hi = cuts[k + 1];
      if (hi - lo <= edge_tol(lo)) continue;
      std::vector<TrigSeries::Term> terms;
      double total = 0.0;
      for (int t = 0; t < 3; ++t) {
        terms.push_back({2.0 * u(rng) - 1.0, 6.0 * u(rng), 2.0 * kPi * u(rng)});
        total += std::abs(terms.back().coef);
      }
      const double amp = max_abs * (0.5 + 0.5 * u(rng)) / total;
      for (auto& t : terms) t.coef *= amp;
      segs.push_back(Segment{lo, hi, SegmentRole::samples, {{1.0, TrigSeries(lo, hi, terms)}}});
    }
    PiecewisePotential q(a, std::move(segs));
    double mn = 0.0, mx = 0.0;
    for (int i = 0; i <= 600; ++i) {
      const double v = q.value(kPi * i / 600.0).real();
      mn = std::min(mn, v);
      mx = std::max(mx, v);
    }
    if ((mn < 0.0 && mx > 0.0) || attempt > 50) return q;
  }
}

}  // namespace delaysl
