#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "delaysl/potential.hpp"

using namespace delaysl;
using std::numbers::pi;

namespace {

struct Fixture {
  double a;
  BuiltinPairs b;
  KernelOperator op;
  EigenPair p1, p0;

  explicit Fixture(double a_)
      : a(a_), b(builtin_pairs(a_)), op(KernelOperator::physical(a_, b.h1)),
        p1(make_pair(op, b.e1, -1.0)), p0(make_pair(op, b.e0, 1.0)) {}

  PiecewisePotential B1(cplx alpha) const { return build_family(1, alpha, op, p1); }
  PiecewisePotential B0(cplx alpha) const { return build_family(0, alpha, op, p0); }
  PiecewisePotential smooth(cplx alpha) const { return build_smooth_family(alpha, default_bridge(a), op, p0); }
};

double K1(double a, double x) {
  const double A = 2 * pi - 5 * a;
  return 6 * pi / (std::sqrt(10.0) * A) * std::sin(pi * std::sqrt(10.0) * (pi - x) / A);
}

}  // namespace

TEST_CASE("build_family: alpha = 0 leaves only the kernel tail") {
  const Fixture f(0.35 * pi);
  for (int nu : {0, 1}) {
    const PiecewisePotential q = nu == 1 ? f.B1(0.0) : f.B0(0.0);
    for (int i = 0; i <= 300; ++i) {
      const double x = pi * i / 300;
      const cplx expect = x >= 2.5 * f.a ? cplx(f.b.h1.value(x)) : cplx(0.0);
      CHECK(std::abs(q.value(x) - expect) < 1e-14 * 100);
    }
  }
}

TEST_CASE("build_family: branch values") {
  const Fixture f(0.36 * pi);
  const PiecewisePotential q = f.B1(1.0);
  CHECK(q.value(2.0 * f.a) == cplx(0.0));
  const double mid = 0.5 * (1.5 * f.a + pi - f.a);
  CHECK(std::abs(q.value(mid) - f.b.e1.value(mid)) < 1e-14);
  const double A = 2 * pi - 5 * f.a;
  CHECK(std::abs(q.value(mid) - (std::cos(2 * pi * (2 * mid - 3 * f.a) / A) + std::cos(pi * (2 * mid - 3 * f.a) / A))) <
        1e-14);

  // branch 3 against a direct formula
  const cplx alpha(2.0, -1.0);
  const PiecewisePotential q2 = f.B1(alpha);
  for (double x : {2.1 * f.a, 0.5 * (2 * f.a + pi - 0.5 * f.a), pi - 0.55 * f.a}) {
    const double inner = f.b.e1.integral(1.5 * f.a, x - 0.5 * f.a);
    const cplx expect = -alpha * K1(f.a, x + 0.5 * f.a) * inner;
    CHECK(std::abs(q2.value(x) - expect) < 1e-13);
  }
  CHECK(q2.family() == "B1");
  CHECK(q2.info().has_value());
  CHECK(q2.alpha() == alpha);
}

TEST_CASE("build_family: preconditions") {
  const Fixture f(0.35 * pi);
  CHECK_THROWS_AS(build_family(1, 1.0, f.op, f.p0), InconsistentPair);
  CHECK_THROWS_AS(build_family(0, 1.0, f.op, f.p1), InconsistentPair);
  const EigenPair wrong = make_pair(f.op, f.b.e1, 1.0);
  CHECK_THROWS_AS(build_family(0, 1.0, f.op, wrong), InconsistentPair);
  CHECK_THROWS_AS(build_family(2, 1.0, f.op, f.p1), InvalidInput);
}

TEST_CASE("build_family at a = pi/3 collapses the empty intervals") {
  const Fixture f(pi / 3);
  const PiecewisePotential q = f.B1(cplx(1.0, 1.0));
  for (std::size_t k = 0; k < q.segments().size(); ++k) CHECK(q.segments()[k].hi > q.segments()[k].lo);
  CHECK(q.segments().size() == 5);
  CHECK(std::isfinite(std::abs(omega(q))));
}

TEST_CASE("build_smooth_family: layout and junctions") {
  const Fixture f(0.35 * pi);
  const PiecewisePotential q0 = f.smooth(0.0);
  const BridgeFunction g = default_bridge(f.a);
  for (int i = 0; i <= 300; ++i) {
    const double x = pi * i / 300;
    cplx expect = 0.0;
    if (x >= 2.5 * f.a)
      expect = f.b.h0.value(x);
    else if (x >= pi - 0.5 * f.a)
      expect = g.g.value(x);
    CHECK(std::abs(q0.value(x) - expect) < 1e-12);
  }
  const PiecewisePotential q = f.smooth(cplx(2.0, 1.0));
  const double j1 = pi - 0.5 * f.a, j2 = 2.5 * f.a;
  CHECK(std::abs(q.left_limit(j1)) < 1e-12);
  CHECK(std::abs(q.right_limit(j1)) < 1e-12);
  const double A = 2 * pi - 5 * f.a;
  const double hend = 6 * pi * pi / (A * A) * std::cos(pi * std::sqrt(10.0) / 2);
  CHECK(std::abs(q.left_limit(j2) - hend) < 1e-12 * std::abs(hend) * 10);
  CHECK(std::abs(q.right_limit(j2) - hend) < 1e-12 * std::abs(hend) * 10);

  CHECK_THROWS_AS(build_smooth_family(1.0, g, KernelOperator::physical(pi / 3, builtin_pairs(pi / 3).h1), f.p0),
                  DomainError);
  BridgeFunction bad = g;
  bad.g = LinearFunction(j1, j2, 0.1, hend);
  CHECK_THROWS_AS(build_smooth_family(1.0, bad, f.op, f.p0), InvalidInput);
}

TEST_CASE("default_bridge") {
  for (double a : {0.34 * pi, 0.35 * pi, 0.39 * pi}) {
    const BridgeFunction g = default_bridge(a);
    const double A = 2 * pi - 5 * a;
    const double hend = 6 * pi * pi / (A * A) * std::cos(pi * std::sqrt(10.0) / 2);
    CHECK(std::abs(g.g.value(pi - 0.5 * a)) < 1e-12);
    CHECK(std::abs(g.g.value(2.5 * a) - hend) < 1e-12 * (1 + std::abs(hend)));
    CHECK(std::abs(g.g.value(0.5 * (pi - 0.5 * a + 2.5 * a)) - 0.5 * hend) < 1e-12 * (1 + std::abs(hend)));
  }
  CHECK_THROWS_AS(default_bridge(pi / 3), DomainError);
  CHECK_THROWS_AS(make_bridge(0.35 * pi, LinearFunction(pi - 0.175 * pi, 0.875 * pi, 1.0, 1.0)), InvalidInput);
}

TEST_CASE("omega") {
  CHECK(omega(PiecewisePotential::zero(0.35 * pi)) == cplx(0.0));
  for (double a : {pi / 3, 0.35 * pi, 0.39 * pi}) {
    const Fixture f(a);
    const double norm = f.op.h_l1_norm();
    const cplx w0 = omega(f.B1(0.0));
    CHECK(std::abs(w0 - K1(a, 2.5 * a)) < 1e-12 * (1 + norm));
    for (cplx alpha : {cplx(1.0), cplx(-2.0), cplx(3.0, 4.0)}) {
      CHECK(std::abs(omega(f.B1(alpha)) - w0) <= 1e-9 * (1 + std::abs(alpha)) * norm);
      CHECK(std::abs(omega(f.B0(alpha)) - omega(f.B0(0.0))) <= 1e-9 * (1 + std::abs(alpha)) * norm);
      if (a > pi / 3)
        CHECK(std::abs(omega(f.smooth(alpha)) - omega(f.smooth(0.0))) <= 1e-9 * (1 + std::abs(alpha)) * norm);
    }
  }
}

TEST_CASE("omega: constant-kernel control is not invariant") {
  const double a = 0.35 * pi;
  const KernelOperator op = KernelOperator::physical(a, TrigSeries(2.5 * a, pi, {{1.0, 0.0, 0.0}}));
  const EigenPair top = eigenpairs(op, 128, 1).front();
  const NormalizedPair n = normalize_for(1, op, top);
  const PiecewisePotential q0 = build_family(1, 0.0, n.op, n.pair), q1 = build_family(1, 1.0, n.op, n.pair);
  const cplx d = omega(q1) - omega(q0);
  CHECK(std::abs(d) > 1e-3);
  // d = alpha (mean - I) and I = int M e = -mean
  CHECK(std::abs(d - 2.0 * top.mean) < 1e-8);
}

TEST_CASE("check_w21") {
  const Fixture f(0.35 * pi);
  const W21Report s = check_w21(f.smooth(cplx(2.0, 1.0)));
  CHECK(s.continuous);
  CHECK(s.junction_gaps.size() == 6);
  for (const auto& g : s.junction_gaps) CHECK(g.gap < 1e-10);
  CHECK(std::isfinite(s.derivative_l2));
  CHECK(s.derivative_l2 > 0.0);

  const W21Report d = check_w21(f.B1(1.0));
  CHECK_FALSE(d.continuous);
  CHECK(std::isinf(d.derivative_l2));
  bool found = false;
  for (const auto& g : d.junction_gaps)
    if (std::abs(g.x - 1.5 * f.a) < 1e-12) {
      found = true;
      CHECK(std::abs(g.gap - 2.0) < 1e-12);
    }
  CHECK(found);

  const W21Report z = check_w21(PiecewisePotential::zero(0.35 * pi));
  CHECK(z.continuous);
  CHECK(z.derivative_l2 == 0.0);

  // the bridge interval shrinks as a approaches pi/3
  const Fixture near(pi / 3 + 1e-6);
  const W21Report n = check_w21(near.smooth(1.0));
  CHECK(std::isfinite(n.derivative_l2));
}

TEST_CASE("property: affine in alpha, vanishing prefix") {
  const Fixture f(0.37 * pi);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const PiecewisePotential base = f.B1(0.0), unit = f.B1(1.0);
  for (int i = 0; i < 50; ++i) {
    const double x = pi * u(rng);
    const cplx alpha(6 * u(rng) - 3, 6 * u(rng) - 3);
    const cplx v = f.B1(alpha).value(x);
    CHECK(std::abs(v - (base.value(x) + alpha * (unit.value(x) - base.value(x)))) < 1e-12 * (1 + std::abs(v)));
  }
  for (const PiecewisePotential& q : {f.B1(cplx(1, 2)), f.B0(-3.0), f.smooth(cplx(0, 1))})
    for (int i = 0; i < 100; ++i) CHECK(q.value(1.5 * f.a * i / 100.0) == cplx(0.0));
}

TEST_CASE("custom potentials") {
  const double a = 0.35 * pi;
  CHECK_THROWS_AS(PiecewisePotential(a, {Segment{0.0, pi, SegmentRole::samples, {{1.0, LinearFunction(0, pi, 1, 1)}}}}),
                  InvalidInput);
  CHECK_THROWS_AS(PiecewisePotential(a, {Segment{0.0, 1.0, SegmentRole::zero, {}}}), InvalidInput);
  std::mt19937_64 rng(3);
  for (int k = 0; k < 5; ++k) {
    const PiecewisePotential q = random_admissible_potential(a, rng);
    CHECK(q.sup_norm() <= 3.0);
    CHECK(q.is_real());
    for (int i = 0; i < 50; ++i) CHECK(q.value(1.5 * a * i / 50.0) == cplx(0.0));
    const cplx direct = integrate([&](double x) { return q.value(x); }, a, pi, q.singular_points());
    CHECK(std::abs(omega(q) - direct) < 1e-12);
  }
}
