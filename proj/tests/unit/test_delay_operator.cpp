#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "delaysl/delay_operator.hpp"

using namespace delaysl;
using std::numbers::pi;

namespace {

double A_of(double a) { return 2.0 * pi - 5.0 * a; }

KernelOperator h1_op(double a) { return KernelOperator::physical(a, builtin_pairs(a).h1); }

RealFunction constant(double lo, double hi, double c) { return TrigSeries(lo, hi, {{c, 0.0, 0.0}}); }

double sup_on(const RealFunction& f, int n = 2000) {
  double s = 0.0;
  for (int i = 0; i <= n; ++i) s = std::max(s, std::abs(f.value(f.lo() + (f.hi() - f.lo()) * i / n)));
  return s;
}

// max |p.e - ref / s| with s the signed sup of ref
double match(const EigenPair& p, const RealFunction& ref) {
  double big = 0.0;
  for (int i = 0; i <= 4000; ++i) {
    const double x = ref.lo() + (ref.hi() - ref.lo()) * i / 4000;
    if (std::abs(ref.value(x)) > std::abs(big)) big = ref.value(x);
  }
  double d = 0.0;
  for (int i = 0; i <= 400; ++i) {
    const double x = ref.lo() + (ref.hi() - ref.lo()) * i / 400;
    d = std::max(d, std::abs(p.e.value(x) - ref.value(x) / big));
  }
  return d;
}

const EigenPair* nearest(const std::vector<EigenPair>& ps, double eta) {
  const EigenPair* best = nullptr;
  for (const auto& p : ps)
    if (!best || std::abs(p.eta - eta) < std::abs(best->eta - eta)) best = &p;
  return best;
}

}  // namespace

TEST_CASE("delay range") {
  CHECK(delay_in_range(pi / 3));
  CHECK(delay_in_range(0.39 * pi));
  CHECK_FALSE(delay_in_range(0.4 * pi));
  CHECK_FALSE(delay_in_range(0.3 * pi));
  CHECK_THROWS_AS(builtin_pairs(0.41 * pi), DomainError);
  CHECK_THROWS_AS(KernelOperator::physical(0.35 * pi, constant(0.0, 1.0, 1.0)), InvalidInput);
}

TEST_CASE("builtin pairs: point values") {
  for (double a : {pi / 3, 0.35 * pi, 0.39 * pi}) {
    const BuiltinPairs b = builtin_pairs(a);
    const double A = A_of(a);
    CHECK(std::abs(b.e1.value(1.5 * a) - 2.0) < 1e-14);
    CHECK(std::abs(b.e0.value(pi - a)) < 1e-13);
    for (double x : {1.5 * a, 1.7 * a, pi - 1.1 * a, pi - a}) {
      const double u = 2.0 * x - 3.0 * a;
      CHECK(std::abs(b.e1.value(x) - (std::cos(2 * pi * u / A) + std::cos(pi * u / A))) < 1e-13);
      CHECK(std::abs(b.e0.value(x) - (std::sin(2 * pi * u / A) + 2.0 * std::sin(pi * u / A))) < 1e-13);
    }
    for (double x : {2.5 * a, 0.5 * (2.5 * a + pi), pi}) {
      const double ref = 6 * pi * pi / (A * A) * std::cos(pi * std::sqrt(10.0) * (pi - x) / A);
      CHECK(std::abs(b.h1.value(x) - ref) <= 1e-13 * std::abs(6 * pi * pi / (A * A)));
      CHECK(b.h0.value(x) == b.h1.value(x));
    }
  }
  CHECK(std::abs(builtin_pairs(0.35 * pi).h1.value(pi) - 96.0) < 1e-12);
}

TEST_CASE("kernel_K: closed forms and domain") {
  for (double a : {pi / 3, 0.35 * pi, 0.39 * pi}) {
    const KernelOperator op = h1_op(a);
    const double A = A_of(a);
    CHECK(kernel_K(op, pi) == 0.0);
    for (int i = 0; i <= 50; ++i) {
      const double x = a + (pi - a) * i / 50;
      const double ref = x >= 2.5 * a ? 6 * pi / (std::sqrt(10.0) * A) * std::sin(pi * std::sqrt(10.0) * (pi - x) / A)
                                      : kernel_K(op, 2.5 * a);
      CHECK(std::abs(kernel_K(op, x) - ref) < 1e-12 * std::max(1.0, std::abs(ref)));
    }
    CHECK_THROWS_AS(kernel_K(op, a - 1e-3), DomainError);
    CHECK_THROWS_AS(kernel_K(op, pi + 1e-3), DomainError);

    const KernelOperator one = KernelOperator::physical(a, constant(2.5 * a, pi, 1.0));
    CHECK(std::abs(kernel_K(one, 2.5 * a) - (pi - 2.5 * a)) < 1e-14);
  }
}

TEST_CASE("apply_M: h1 e1 relation and trivial cases") {
  for (double a : {pi / 3, 0.35 * pi, 0.39 * pi}) {
    const KernelOperator op = h1_op(a);
    const BuiltinPairs b = builtin_pairs(a);
    const RealFunction zero = constant(op.lo(), op.hi(), 0.0);
    for (int i = 0; i <= 40; ++i) {
      const double x = op.lo() + op.length() * i / 40;
      CHECK(std::abs(apply_M(op, b.e1, x) + b.e1.value(x)) < 1e-8);
      CHECK(std::abs(apply_M(op, b.e0, x) - b.e0.value(x)) < 1e-8);
      CHECK(apply_M(op, zero, x) == 0.0);
    }
    CHECK(apply_M(op, b.e1, op.hi()) == 0.0);
    CHECK_THROWS_AS(apply_M(op, b.e1, op.lo() - 1e-3), DomainError);
    CHECK_THROWS_AS(apply_M(op, b.e1, op.hi() + 1e-3), DomainError);
  }
}

TEST_CASE("apply_M: complex overload agrees with the real one") {
  const double a = 0.36 * pi;
  const KernelOperator op = h1_op(a);
  const RealFunction e1 = builtin_pairs(a).e1;
  const auto f = [&](double t) { return std::complex<double>(e1.value(t), -2.0 * e1.value(t)); };
  for (double x : {op.lo(), op.lo() + 0.3 * op.length(), op.hi() - 1e-3}) {
    const auto z = apply_M(op, f, x);
    const double r = apply_M(op, e1, x);
    CHECK(std::abs(z - std::complex<double>(r, -2.0 * r)) < 1e-13);
  }
}

TEST_CASE("nystrom: zero kernel and symmetry") {
  const double a = 0.35 * pi;
  const KernelOperator zero = KernelOperator::physical(a, constant(2.5 * a, pi, 0.0));
  const NystromSystem z = nystrom(zero, 32);
  for (double v : z.matrix.data()) CHECK(v == 0.0);
  CHECK_THROWS_AS(eigenpairs(zero, 32, 1), DegenerateOperator);
  CHECK_THROWS_AS(nystrom(zero, 4), InvalidInput);

  const NystromSystem s = nystrom(h1_op(a), 48);
  REQUIRE(s.grid.size() == 48);
  for (std::size_t i = 0; i < 48; ++i)
    for (std::size_t j = 0; j < 48; ++j) CHECK(s.matrix(i, j) == s.matrix(j, i));
  // non-multiple of 16 uses a single panel
  const NystromSystem one = nystrom(h1_op(a), 20);
  CHECK(one.points_per_panel == 20);
  CHECK(one.panel_breaks.size() == 2);
}

TEST_CASE("nystrom: eigenvalue -1 of M_h1 at n = 256") {
  for (double a : {pi / 3, 0.35 * pi, 0.39 * pi}) {
    const auto eig = sym_eig(nystrom(h1_op(a), 256).matrix);
    double best = 1e300;
    for (const auto& p : eig) best = std::min(best, std::abs(p.value + 1.0));
    CHECK(best < 1e-8);
  }
}

TEST_CASE("eigenpairs: closed-form pairs are recovered") {
  for (double a : {pi / 3, 0.35 * pi, 0.39 * pi}) {
    const KernelOperator op = h1_op(a);
    const BuiltinPairs b = builtin_pairs(a);
    const auto ps = eigenpairs(op, 256, 4);
    REQUIRE(ps.size() == 4);
    for (std::size_t k = 0; k + 1 < ps.size(); ++k) CHECK(std::abs(ps[k].eta) >= std::abs(ps[k + 1].eta));

    const EigenPair* m1 = nearest(ps, -1.0);
    const EigenPair* p1 = nearest(ps, 1.0);
    CHECK(std::abs(m1->eta + 1.0) < 1e-8);
    CHECK(std::abs(p1->eta - 1.0) < 1e-8);
    CHECK(m1->verified());
    CHECK(p1->verified());
    CHECK(m1->multiplicity == 1);
    CHECK(match(*m1, b.e1) < 1e-6);
    CHECK(match(*p1, b.e0) < 1e-6);
    CHECK(std::abs(m1->mean) < 1e-8);
    CHECK(std::abs(mean_value(*p1) - mean_value(op, b.e0) / sup_on(b.e0)) < 1e-6 * op.length());
  }
}

TEST_CASE("eigenpairs: sign convention and constant kernel") {
  const double a = 0.35 * pi;
  const KernelOperator op = KernelOperator::physical(a, constant(2.5 * a, pi, 1.0));
  const auto ps = eigenpairs(op, 128, 2);
  REQUIRE(!ps.empty());
  const EigenPair& top = ps.front();
  CHECK(std::abs(top.eta) > 0.0);
  CHECK(top.verified());
  CHECK(std::abs(top.mean) > 0.01 * op.length());
  double big = 0.0;
  for (int i = 0; i <= 20000; ++i) {
    const double v = top.e.value(op.lo() + op.length() * i / 20000);
    if (std::abs(v) > std::abs(big)) big = v;
  }
  CHECK(big > 0.0);
  CHECK(std::abs(big - 1.0) < 1e-8);
  CHECK_THROWS_AS(eigenpairs(op, 128, 0), InvalidInput);
}

TEST_CASE("mean_value examples") {
  for (double a : {pi / 3, 0.35 * pi, 0.39 * pi}) {
    const KernelOperator op = h1_op(a);
    const BuiltinPairs b = builtin_pairs(a);
    CHECK(std::abs(mean_value(op, b.e1)) < 1e-12);
    CHECK(std::abs(mean_value(op, b.e0) - 2.0 * A_of(a) / pi) < 1e-12);
    CHECK(std::abs(mean_value(op, constant(op.lo(), op.hi(), 1.0)) - (pi - 2.5 * a)) < 1e-13);
  }
}

TEST_CASE("rescale_to_unit: closed forms and delay independence") {
  auto unit_of = [](double a) {
    const KernelOperator op = h1_op(a);
    return rescale_to_unit(op, make_pair(op, builtin_pairs(a).e1, -1.0), 1);
  };
  const UnitPair u = unit_of(0.35 * pi);
  CHECK(u.residual < 1e-8);
  for (int i = 0; i <= 100; ++i) {
    const double s = i / 100.0;
    CHECK(std::abs(u.epsilon.value(s) - (std::cos(pi * s) + std::cos(2 * pi * s))) < 1e-12);
    CHECK(std::abs(u.chi.value(s) - 1.5 * pi * pi * std::cos(pi * std::sqrt(10.0) * (1 - s) / 2)) < 1e-11);
  }
  const KernelOperator unit_op = KernelOperator::unit(u.chi);
  CHECK(std::abs(apply_M(unit_op, u.epsilon, 0.0) + 2.0) < 1e-8);

  const UnitPair lo = unit_of(0.34 * pi), hi = unit_of(0.39 * pi);
  for (int i = 0; i < 100; ++i) {
    const double s = (i + 0.5) / 100.0;
    CHECK(std::abs(lo.chi.value(s) - hi.chi.value(s)) < 1e-12 * 1.5 * pi * pi);
    CHECK(std::abs(lo.epsilon.value(s) - hi.epsilon.value(s)) < 1e-12);
  }

  // e0 with nu = 0
  const double a = 0.37 * pi;
  const KernelOperator op = h1_op(a);
  const UnitPair u0 = rescale_to_unit(op, make_pair(op, builtin_pairs(a).e0, 1.0), 0);
  CHECK(u0.residual < 1e-8);

  // a wrong eigenvalue claim is rejected
  CHECK_THROWS_AS(rescale_to_unit(op, make_pair(op, builtin_pairs(a).e1, 1.0), 0), InconsistentPair);
}

TEST_CASE("unit to physical round trip") {
  const double a = 0.36 * pi;
  const KernelOperator op = h1_op(a);
  const UnitPair u = rescale_to_unit(op, make_pair(op, builtin_pairs(a).e1, -1.0), 1);
  const RealFunction h = unit_to_physical_h(u.chi, a);
  const RealFunction e = unit_to_physical_e(u.epsilon, a);
  const BuiltinPairs b = builtin_pairs(a);
  for (int i = 0; i <= 20; ++i) {
    const double x = 2.5 * a + (pi - 2.5 * a) * i / 20;
    CHECK(std::abs(h.value(x) - b.h1.value(x)) < 1e-11 * std::abs(b.h1.value(pi)));
    const double y = 1.5 * a + (pi - 2.5 * a) * i / 20;
    CHECK(std::abs(e.value(y) - b.e1.value(y)) < 1e-12);
  }
}

TEST_CASE("normalize_for rescales the kernel") {
  const double a = 0.35 * pi;
  const KernelOperator op = KernelOperator::physical(a, constant(2.5 * a, pi, 1.0));
  const EigenPair top = eigenpairs(op, 128, 1).front();
  for (int nu : {0, 1}) {
    const NormalizedPair n = normalize_for(nu, op, top);
    CHECK(n.pair.eta == (nu == 0 ? 1.0 : -1.0));
    CHECK(eigen_residual(n.op, n.pair.e, n.pair.eta) < 1e-8 * std::abs(1.0 / top.eta));
  }
  CHECK_THROWS_AS(normalize_for(2, op, top), InvalidInput);
}

TEST_CASE("property: self-adjointness") {
  const double a = 0.37 * pi;
  const KernelOperator op = h1_op(a);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const std::vector<double> br = panel_breaks(op.lo(), op.hi(), {}, op.length() / 4.0);
  const QuadratureRule grid = make_composite_gauss(br, 12);
  double kmax = 0.0;
  for (int i = 0; i <= 200; ++i) kmax = std::max(kmax, std::abs(kernel_K(op, op.a() + (pi - op.a()) * i / 200)));
  for (int trial = 0; trial < 3; ++trial) {
    std::vector<double> fv(grid.size()), gv(grid.size());
    for (auto& v : fv) v = u(rng);
    for (auto& v : gv) v = u(rng);
    const RealFunction f = SampledFunction(br, 12, fv), g = SampledFunction(br, 12, gv);
    double mfg = 0.0, fmg = 0.0, nf = 0.0, ng = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double x = grid.nodes[i], w = grid.weights[i];
      mfg += w * apply_M(op, f, x) * g.value(x);
      fmg += w * f.value(x) * apply_M(op, g, x);
      nf += w * fv[i] * fv[i];
      ng += w * gv[i] * gv[i];
    }
    CHECK(std::abs(mfg - fmg) <= 1e-9 * std::sqrt(nf * ng) * kmax);
  }
}

TEST_CASE("property: linearity in h") {
  const double a = 0.35 * pi;
  const KernelOperator op = h1_op(a);
  const KernelOperator op3 = op.scaled(-3.0);
  const RealFunction e0 = builtin_pairs(a).e0;
  for (double x : {op.lo(), op.lo() + 0.4 * op.length(), op.hi()}) {
    const double v = apply_M(op, e0, x);
    CHECK(std::abs(apply_M(op3, e0, x) + 3.0 * v) <= 1e-14 * (1.0 + std::abs(v)) * 8);
  }
}

TEST_CASE("property: Nystrom convergence and compactness") {
  const double a = 0.35 * pi;
  const KernelOperator op = h1_op(a);
  const auto e128 = sym_eig(nystrom(op, 128).matrix);
  const auto e256 = sym_eig(nystrom(op, 256).matrix);
  CHECK(std::abs(e128.front().value - e256.front().value) <= 1e-6);
  const double ratio = std::abs(e256[19].value) / std::abs(e256[0].value);
  if (ratio >= 1e-2) MESSAGE("compactness surrogate not met (report only): |eta_20|/|eta_1| = " << ratio);
  CHECK(ratio < 1.0);
}

TEST_CASE("property: residual agreement with the unit problem") {
  for (double a : {pi / 3, 0.38 * pi}) {
    const KernelOperator op = h1_op(a);
    const auto ps = eigenpairs(op, 256, 2);
    for (const EigenPair& p : ps) {
      const int nu = p.eta > 0 ? 0 : 1;
      const NormalizedPair n = normalize_for(nu, op, p);
      const double phys = eigen_residual(n.op, n.pair.e, n.pair.eta);
      const UnitPair u = rescale_to_unit(op, p, nu);
      const double lo = std::max(std::min(phys, u.residual), 1e-15);
      CHECK(std::max(phys, u.residual) <= 10.0 * lo + 1e-14);
    }
  }
}
