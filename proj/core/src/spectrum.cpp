#include "delaysl/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "delaysl/parallel.hpp"

namespace delaysl {

namespace {

constexpr double kPi = std::numbers::pi;

// Real part first, ties (conjugate pairs) broken by the imaginary part.
bool complex_less(cplx x, cplx y) {
  if (std::abs(x.real() - y.real()) > 1e-9 * (1.0 + std::abs(x) + std::abs(y))) return x.real() < y.real();
  return x.imag() < y.imag();
}

// Split fractions, off-centre so symmetric zeros do not land on a cut.
constexpr double kSplits[] = {0.5137, 0.4629, 0.5581, 0.4217};

class Locator {
 public:
  // spacing > 0 bounds the boundary sample spacing of every contour.
  Locator(ComplexFn f, const LocateOptions& opt, double spacing) : f_(std::move(f)), opt_(opt), spacing_(spacing) {}

  int count(const Rectangle& r) const {
    int samples = opt_.boundary_samples;
    if (spacing_ > 0.0)
      samples = std::max(samples, static_cast<int>(std::ceil(2.0 * (r.width() + r.height()) / spacing_)));
    return count_zeros(f_, r, samples);
  }

  void process(const Rectangle& cell, int n) {
    if (n <= 0) return;
    const double size = std::max(cell.width(), cell.height());
    const double scale = 1.0 + std::abs(cell.center());
    const bool cluster = size < opt_.min_cell * scale;
    if (n == 1 || cluster) {
      const double pad = 0.1 * size;
      const Rectangle bounds(cell.lo_re - pad, cell.hi_re + pad, cell.lo_im - pad, cell.hi_im + pad);
      try {
        const cplx z = refine_zero(f_, cell.center(), opt_.tolerance, n, &bounds);
        if (cell.contains(z, 1e-9 * scale) || cluster) {
          zeros_.push_back({z, n});
          return;
        }
      } catch (const DivergenceError&) {
        if (cluster) throw;
      }
    }
    split(cell, n);
  }

  std::vector<RhoZero>& zeros() { return zeros_; }

 private:
  void split(const Rectangle& cell, int n) {
    const bool wide = cell.width() >= cell.height();
    for (double frac : kSplits) {
      Rectangle c0 = cell, c1 = cell;
      if (wide) {
        const double m = cell.lo_re + frac * cell.width();
        c0.hi_re = m;
        c1.lo_re = m;
      } else {
        const double m = cell.lo_im + frac * cell.height();
        c0.hi_im = m;
        c1.lo_im = m;
      }
      int n0 = 0, n1 = 0;
      try {
        n0 = count(c0);
        n1 = count(c1);
      } catch (const ZeroOnBoundary&) {
        continue;
      }
      if (n0 + n1 != n) throw ResolutionError("locate_spectrum: child counts do not add up to the parent count");
      process(c0, n0);
      process(c1, n1);
      return;
    }
    throw ResolutionError("locate_spectrum: every split of a cell passes through a zero");
  }

  ComplexFn f_;
  LocateOptions opt_;
  double spacing_;
  std::vector<RhoZero> zeros_;
};

}  // namespace

int SpectralReport::located_rho_multiplicity() const {
  int s = 0;
  for (const RhoZero& z : rho_zeros) s += z.multiplicity;
  return s;
}

SpectralReport locate_spectrum(const ProblemSpec& spec, const Rectangle& window, Method method,
                               const LocateOptions& opt) {
  SpectralReport rep;
  rep.nu = spec.nu;
  rep.j = spec.j;
  rep.method = method;
  rep.window = window;
  rep.search = window;
  const bool closed_axis = window.lo_re == 0.0;
  // A zero of even multiplicity at rho = 0 turns the phase by a full circle
  // within about `margin` of the shifted edge; sample well below that.
  const double margin = std::min(0.25, 0.1 * window.width());
  if (closed_axis) rep.search.lo_re = -margin;

  std::optional<RepresentationEvaluator> repr;
  if (method != Method::ode) repr.emplace(spec);
  const bool use_repr = method == Method::repr;
  auto delta = [&](cplx lambda) { return use_repr ? (*repr)(lambda) : char_fn_ode(spec, lambda); };

  Locator loc([&](cplx rho) { return delta(rho * rho); }, opt, closed_axis ? margin / 8.0 : 0.0);
  rep.rho_count = loc.count(rep.search);
  loc.process(rep.search, rep.rho_count);
  rep.rho_zeros = loc.zeros();
  std::sort(rep.rho_zeros.begin(), rep.rho_zeros.end(), [](const RhoZero& x, const RhoZero& y) { return complex_less(x.rho, y.rho); });

  for (const RhoZero& z : rep.rho_zeros) {
    if (closed_axis && z.rho.real() < 0.0 && !window.contains(-z.rho)) continue;
    const cplx lambda = z.rho * z.rho;
    const bool at_origin = std::abs(z.rho) < opt.min_cell;
    const int mult = at_origin ? (z.multiplicity + 1) / 2 : z.multiplicity;
    auto same = [&](const Eigenvalue& e) { return std::abs(e.lambda - lambda) <= 1e-8 * (1.0 + std::abs(lambda)); };
    if (std::find_if(rep.eigenvalues.begin(), rep.eigenvalues.end(), same) != rep.eigenvalues.end()) continue;
    rep.eigenvalues.push_back({lambda, mult, 0.0});
  }
  for (Eigenvalue& e : rep.eigenvalues) {
    e.residual = std::abs(delta(e.lambda)) / normalization(e.lambda);
    if (method == Method::both) e.residual = std::max(e.residual, std::abs((*repr)(e.lambda)) / normalization(e.lambda));
  }
  std::sort(rep.eigenvalues.begin(), rep.eigenvalues.end(), [](const Eigenvalue& x, const Eigenvalue& y) { return complex_less(x.lambda, y.lambda); });
  return rep;
}

const std::vector<double>& default_lambda_grid() {
  static const std::vector<double> g{-4.0, -1.0, 0.3, 1.7, 5.0, 10.1, 25.6, 50.0, 100.0};
  return g;
}

// ------------------------------------------------------------------ isospec

InvarianceVerdict isospec_check(const FamilyMember& member, int nu, const std::vector<cplx>& alphas,
                                const std::vector<double>& grid, double threshold, Method method,
                                std::string family) {
  if (alphas.empty()) throw InvalidInput("isospec_check: at least one alpha is required");
  InvarianceVerdict v;
  v.family = std::move(family);
  v.nu = nu;
  v.method = method;
  v.alphas = alphas;
  v.grid = grid;
  v.threshold = threshold;

  const std::vector<cplx> lambdas(grid.begin(), grid.end());
  const std::size_t na = alphas.size(), ng = grid.size();
  // samples ordered (alpha, j, lambda)
  v.samples.resize(na * 2 * ng);
  for (std::size_t ia = 0; ia < na; ++ia) {
    const PiecewisePotential q = member(alphas[ia]);
    for (int j : {0, 1}) {
      const std::vector<CharFnSample> s = char_fn_grid(ProblemSpec(nu, j, q), lambdas, method);
      for (std::size_t k = 0; k < ng; ++k) {
        IsospecSample& out = v.samples[(ia * 2 + j) * ng + k];
        out.alpha = alphas[ia];
        out.j = j;
        out.lambda = grid[k];
        out.normalization = s[k].normalization;
        if (s[k].ode) out.ode = *s[k].ode / s[k].normalization;
        if (s[k].repr) out.repr = *s[k].repr / s[k].normalization;
        if (s[k].discrepancy) v.method_discrepancy = std::max(v.method_discrepancy, *s[k].discrepancy);
      }
    }
  }
  auto dev = [](const std::optional<cplx>& x, const std::optional<cplx>& ref) {
    return x && ref ? std::abs(*x - *ref) / (1.0 + std::abs(*ref)) : 0.0;
  };
  for (int j : {0, 1})
    for (std::size_t k = 0; k < ng; ++k) {
      PointDeviation d{j, grid[k], 0.0};
      const IsospecSample& ref = v.samples[j * ng + k];
      for (std::size_t ia = 1; ia < na; ++ia) {
        const IsospecSample& s = v.samples[(ia * 2 + j) * ng + k];
        d.deviation = std::max({d.deviation, dev(s.ode, ref.ode), dev(s.repr, ref.repr)});
      }
      v.max_deviation = std::max(v.max_deviation, d.deviation);
      v.deviations.push_back(d);
    }
  v.verdict = v.max_deviation < threshold;
  return v;
}

InvarianceVerdict isospec_check(const PiecewisePotential& member, const std::vector<cplx>& alphas,
                                const std::vector<double>& grid, double threshold, Method method) {
  if (!member.info()) throw InvalidInput("isospec_check: potential is not a family member");
  return isospec_check([&](cplx alpha) { return with_alpha(member, alpha); }, member.info()->nu, alphas, grid,
                       threshold, method, member.family());
}

// ------------------------------------------------------------------ negative control

namespace {

struct ControlPair {
  double eta;
  NormalizedPair p;
};

ControlPair control_pair(double a, int n) {
  require_delay_in_range(a);
  const KernelOperator op = KernelOperator::physical(a, TrigSeries(2.5 * a, kPi, {{1.0, 0.0, 0.0}}));
  const EigenPair top = eigenpairs(op, n, 1).front();
  return {top.eta, normalize_for(1, op, top)};
}

double max_w_deviation(int nu, const std::vector<PiecewisePotential>& qs) {
  const WFunction ref = compute_w(nu, qs.front());
  double d = 0.0;
  for (std::size_t i = 1; i < qs.size(); ++i) d = std::max(d, compute_w(nu, qs[i]).sup_distance(ref));
  return d;
}

}  // namespace

PiecewisePotential negative_control_family(double a, cplx alpha, int n) {
  const NormalizedPair p = control_pair(a, n).p;
  return build_family(1, alpha, p.op, p.pair);
}

NegativeControlReport negative_control(double a, const std::vector<cplx>& alphas, const std::vector<double>& grid,
                                       int n) {
  if (alphas.empty()) throw InvalidInput("negative_control: at least one alpha is required");
  const ControlPair c = control_pair(a, n);
  const NormalizedPair& p = c.p;
  NegativeControlReport r;
  r.a = a;
  r.eta = c.eta;
  r.mean_of_e = p.pair.mean;
  const RealFunction& e = p.pair.e;
  r.proof_integral = integrate([&](double x) { return apply_M(p.op, e, x); }, p.op.lo(), p.op.hi(), {}, 16, 0.1);

  std::vector<PiecewisePotential> qs;
  for (cplx alpha : alphas) qs.push_back(build_family(1, alpha, p.op, p.pair));
  r.w1_invariance = max_w_deviation(1, qs);
  const cplx om0 = omega(qs.front());
  for (std::size_t i = 0; i < qs.size(); ++i) {
    const cplx d = omega(qs[i]) - om0;
    r.omega_differences.push_back(d);
    const cplx predicted = (alphas[i] - alphas.front()) * (r.mean_of_e - r.proof_integral);
    r.omega_gap = std::max(r.omega_gap, std::abs(d - predicted));
  }
  r.verdict = isospec_check([&](cplx alpha) { return build_family(1, alpha, p.op, p.pair); }, 1, alphas, grid, 1e-6,
                            Method::both, "negative-control");
  r.delta_deviation = r.verdict.max_deviation;
  return r;
}

// ------------------------------------------------------------------ theorem chain

const char* to_string(LinkStatus s) {
  switch (s) {
    case LinkStatus::pass: return "pass";
    case LinkStatus::fail: return "fail";
    case LinkStatus::not_required: return "not-required";
  }
  return "fail";
}

bool TheoremChainReport::all_required_pass() const {
  return std::all_of(links.begin(), links.end(), [](const ChainLink& l) { return l.status != LinkStatus::fail; });
}

TheoremChainReport verify_theorem_chain(const PiecewisePotential& member, const std::vector<double>& grid) {
  if (!member.info()) throw InvalidInput("verify_theorem_chain: potential is not a family member");
  const FamilyInfo& info = *member.info();
  TheoremChainReport r;
  r.family = member.family();
  r.nu = info.nu;
  r.alpha = member.alpha();
  const double sign = info.nu == 0 ? 1.0 : -1.0;
  auto link = [](std::string name, double value, double threshold) {
    return ChainLink{std::move(name), value < threshold ? LinkStatus::pass : LinkStatus::fail, value, threshold};
  };

  r.links.push_back(link("eigen-relation", eigen_residual(info.op, info.pair.e, sign), 1e-8));

  ChainLink mean = link("zero-mean", std::abs(mean_value(info.pair)), 1e-10);
  if (info.nu == 0) mean.status = LinkStatus::not_required;
  r.links.push_back(mean);

  const PiecewisePotential base = with_alpha(member, 0.0);
  const double scale = 1.0 + std::norm(r.alpha);
  r.links.push_back(
      link("w-invariance", compute_w(info.nu, member).sup_distance(compute_w(info.nu, base)), 1e-8 * scale));
  r.links.push_back(
      link("omega-invariance", std::abs(omega(member) - omega(base)), 1e-8 * (1.0 + std::abs(r.alpha))));
  const InvarianceVerdict v = isospec_check(member, {0.0, r.alpha}, grid);
  r.links.push_back(link("delta-invariance", v.max_deviation, v.threshold));
  return r;
}

}  // namespace delaysl
