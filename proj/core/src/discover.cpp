#include "delaysl/discover.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "delaysl/parallel.hpp"

namespace delaysl {

namespace {

constexpr double kPi = std::numbers::pi;

Candidate make_candidate(std::vector<double> c, RealFunction chi, const EigenPair& p, int index) {
  return Candidate{std::move(c), std::move(chi), p.eta, p.e, p.mean, p.residual, index};
}

double overlap(const RealFunction& f, const RealFunction& g) {
  auto dot = [](const RealFunction& x, const RealFunction& y) {
    return integrate([&](double s) { return x.value(s) * y.value(s); }, 0.0, 1.0, {}, 16, 0.125);
  };
  const double d = dot(f, f) * dot(g, g);
  return d > 0.0 ? std::abs(dot(f, g)) / std::sqrt(d) : 0.0;
}

// Eigenpair of m_chi best aligned with `prev`.
std::optional<Candidate> track(const CosineBasis& basis, const std::vector<double>& c, const RealFunction& prev,
                               int nodes, int pairs) {
  RealFunction chi = basis.kernel(c);
  std::vector<EigenPair> ps;
  try {
    ps = eigenpairs(KernelOperator::unit(chi), nodes, pairs);
  } catch (const DegenerateOperator&) {
    return std::nullopt;
  }
  int best = 0;
  double best_ov = -1.0;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const double ov = overlap(ps[i].e, prev);
    if (ov > best_ov) {
      best_ov = ov;
      best = static_cast<int>(i);
    }
  }
  return make_candidate(c, std::move(chi), ps[best], best);
}

}  // namespace

CosineBasis CosineBasis::standard(int dim) {
  if (dim < 1) throw InvalidInput("cosine basis: dimension must be >= 1");
  CosineBasis b;
  for (int k = 0; k < dim; ++k) b.modes.push_back({k * kPi, 0.0});
  return b;
}

RealFunction CosineBasis::kernel(const std::vector<double>& coefficients) const {
  if (coefficients.size() != modes.size())
    throw InvalidInput("cosine basis: expected " + std::to_string(modes.size()) + " coefficients");
  if (std::all_of(coefficients.begin(), coefficients.end(), [](double c) { return c == 0.0; }))
    throw InvalidInput("cosine basis: the zero coefficient vector gives chi = 0");
  std::vector<TrigSeries::Term> terms;
  for (std::size_t k = 0; k < modes.size(); ++k)
    if (coefficients[k] != 0.0) terms.push_back({coefficients[k], modes[k].freq, modes[k].phase});
  return TrigSeries(0.0, 1.0, std::move(terms), "chi");
}

std::vector<Candidate> scan_kernels(const CosineBasis& basis, const std::vector<std::vector<double>>& coefficients,
                                    const ScanOptions& opt) {
  std::vector<RealFunction> chis;
  for (const auto& c : coefficients) chis.push_back(basis.kernel(c));
  std::vector<std::vector<Candidate>> found(coefficients.size());
  parallel_for(coefficients.size(), [&](std::size_t i) {
    std::vector<EigenPair> ps;
    try {
      ps = eigenpairs(KernelOperator::unit(chis[i]), opt.nodes, opt.pairs_per_kernel);
    } catch (const DegenerateOperator&) {
      return;
    }
    for (std::size_t k = 0; k < ps.size(); ++k)
      if (std::abs(ps[k].eta) > opt.min_abs_eta)
        found[i].push_back(make_candidate(coefficients[i], chis[i], ps[k], static_cast<int>(k)));
  });
  std::vector<Candidate> out;
  for (auto& f : found)
    for (auto& c : f) out.push_back(std::move(c));
  std::stable_sort(out.begin(), out.end(),
                   [](const Candidate& x, const Candidate& y) { return std::abs(x.mean) < std::abs(y.mean); });
  return out;
}

std::vector<std::vector<double>> coefficient_grid(int dim, int levels, double lo, double hi) {
  if (dim < 1 || levels < 2) throw InvalidInput("coefficient grid: need dim >= 1 and levels >= 2");
  std::vector<std::vector<double>> out;
  std::vector<int> idx(dim, 0);
  for (;;) {
    std::vector<double> c(dim);
    for (int k = 0; k < dim; ++k) c[k] = lo + (hi - lo) * idx[k] / (levels - 1);
    if (std::any_of(c.begin(), c.end(), [](double v) { return v != 0.0; })) out.push_back(std::move(c));
    int k = 0;
    while (k < dim && ++idx[k] == levels) idx[k++] = 0;
    if (k == dim) break;
  }
  return out;
}

PolishResult polish_candidate(const Candidate& seed, const CosineBasis& basis, const PolishOptions& opt) {
  if (!(seed.residual < 1e-6)) throw InvalidInput("polish: seed residual must be below 1e-6");
  if (seed.coefficients.size() != basis.size()) throw InvalidInput("polish: seed does not match the basis");
  PolishResult r{seed, {}, false, false};
  const int pairs = std::max(4, seed.index + 2);
  double step = opt.initial_step;
  int failed = 0;
  r.log.push_back({0, std::abs(r.candidate.mean), step});
  for (int it = 1; it <= opt.max_iterations; ++it) {
    if (std::abs(r.candidate.mean) <= opt.target) {
      r.converged = true;
      break;
    }
    bool improved = false;
    for (std::size_t k = 0; k < basis.size(); ++k) {
      auto trial = [&](double delta) -> std::optional<Candidate> {
        std::vector<double> c = r.candidate.coefficients;
        c[k] += delta;
        if (std::all_of(c.begin(), c.end(), [](double v) { return v == 0.0; })) return std::nullopt;
        std::optional<Candidate> t = track(basis, c, r.candidate.epsilon, opt.nodes, pairs);
        if (t && !(t->residual < 1e-6)) return std::nullopt;
        return t;
      };
      const double m0 = r.candidate.mean;
      std::optional<Candidate> best;
      auto consider = [&](std::optional<Candidate> t) {
        if (t && std::abs(t->mean) < std::abs(best ? best->mean : m0)) best = std::move(t);
      };
      const std::optional<Candidate> up = trial(step), down = trial(-step);
      consider(up);
      consider(down);
      // secant step on the signed mean along this coordinate
      if (up && down && up->mean != down->mean) {
        const double delta = -m0 * 2.0 * step / (up->mean - down->mean);
        if (std::abs(delta) <= 4.0 * step) consider(trial(delta));
      }
      if (best) {
        r.candidate = std::move(*best);
        improved = true;
      }
    }
    if (improved) {
      failed = 0;
    } else {
      step *= 0.5;
      if (++failed >= opt.stagnation_limit) {
        r.stagnated = true;
        r.log.push_back({it, std::abs(r.candidate.mean), step});
        break;
      }
    }
    r.log.push_back({it, std::abs(r.candidate.mean), step});
  }
  if (std::abs(r.candidate.mean) <= opt.target) r.converged = true;
  return r;
}

PhysicalCandidate to_physical(const Candidate& c, double a, int n, double tolerance) {
  require_delay_in_range(a);
  const KernelOperator op = KernelOperator::physical(a, unit_to_physical_h(c.chi, a));
  EigenPair p = make_pair(op, unit_to_physical_e(c.epsilon, a), c.eta, n, tolerance);
  if (!p.verified())
    throw InconsistentPair("to_physical: residual " + std::to_string(p.residual) + " exceeds the tolerance");
  return {op, std::move(p)};
}

}  // namespace delaysl
