#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "delaysl/charfn.hpp"

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

const std::vector<cplx> kGrid{-4.0, -1.0, 0.3, 1.7, 5.0, 10.1, 25.6, 50.0, 100.0};

}  // namespace

TEST_CASE("rho branch and normalization") {
  CHECK(std::abs(rho_of(4.0) - cplx(2.0)) < 1e-15);
  CHECK(std::abs(rho_of(-4.0) - cplx(0.0, 2.0)) < 1e-15);
  CHECK(rho_of(cplx(3.0, -4.0)).imag() >= 0.0);
  CHECK(normalization(4.0) == doctest::Approx(1.0));
  CHECK(normalization(-4.0) == doctest::Approx(std::cosh(2.0 * pi)));
}

TEST_CASE("ode: unperturbed closed forms") {
  const PiecewisePotential z = PiecewisePotential::zero(0.35 * pi);
  CHECK(std::abs(char_fn_ode(ProblemSpec(0, 1, z), 0.25)) < 1e-14);
  CHECK(std::abs(char_fn_ode(ProblemSpec(0, 0, z), 0.0) - pi) < 1e-14);
  for (cplx l : {cplx(2.3), cplx(-1.5), cplx(4.0, 3.0), cplx(60.0)}) {
    const cplx r = rho_of(l);
    const double n = normalization(l);
    CHECK(std::abs(char_fn_ode(ProblemSpec(0, 0, z), l) - std::sin(r * pi) / r) < 1e-12 * n);
    CHECK(std::abs(char_fn_ode(ProblemSpec(0, 1, z), l) - std::cos(r * pi)) < 1e-12 * n);
    CHECK(std::abs(char_fn_ode(ProblemSpec(1, 0, z), l) - std::cos(r * pi)) < 1e-12 * n);
    CHECK(std::abs(char_fn_ode(ProblemSpec(1, 1, z), l) + r * std::sin(r * pi)) < 1e-12 * n * (1 + std::abs(r)));
  }
}

TEST_CASE("ode: one active layer against direct quadrature") {
  // q supported on (3a/2, 2a): y(t - a) there is the free solution
  const double a = 0.38 * pi;
  const cplx c(2.0, -1.0);
  const PiecewisePotential q(a, {Segment{0.0, 1.5 * a, SegmentRole::zero, {}},
                                 Segment{1.5 * a, 2.0 * a, SegmentRole::samples,
                                         {{c, TrigSeries(1.5 * a, 2.0 * a, {{1.0, 3.0, 0.2}})}}},
                                 Segment{2.0 * a, pi, SegmentRole::zero, {}}});
  const std::vector<double> none;
  for (cplx l : {cplx(3.1), cplx(-2.0, 1.0)}) {
    const cplx r = rho_of(l);
    auto y = [&](double t) { return std::sin(r * t) / r; };
    const cplx corr =
        integrate([&](double t) { return std::sin(r * (pi - t)) / r * q.value(t) * y(t - a); }, 1.5 * a, 2.0 * a, none, 32, 0.1);
    const cplx dcorr =
        integrate([&](double t) { return std::cos(r * (pi - t)) * q.value(t) * y(t - a); }, 1.5 * a, 2.0 * a, none, 32, 0.1);
    const EndState e = solve_to_pi(0, q, l);
    CHECK(std::abs(e.y - (y(pi) + corr)) < 1e-12 * normalization(l));
    CHECK(std::abs(e.dy - (std::cos(r * pi) + dcorr)) < 1e-12 * normalization(l));
  }
}

TEST_CASE("ode: input validation") {
  const PiecewisePotential z = PiecewisePotential::zero(0.35 * pi);
  CHECK_THROWS_AS(ProblemSpec(2, 0, z), InvalidInput);
  CHECK_THROWS_AS(ProblemSpec(0, -1, z), InvalidInput);
  CHECK_THROWS_AS(solve_to_pi(0, z, cplx(NAN, 0.0)), InvalidInput);
  CHECK(method_from_string("both") == Method::both);
  CHECK(std::string(to_string(Method::repr)) == "repr");
  CHECK_THROWS_AS(method_from_string("fast"), InvalidInput);
}

TEST_CASE("repr: zero potential") {
  const PiecewisePotential z = PiecewisePotential::zero(0.35 * pi);
  for (int nu : {0, 1})
    for (int j : {0, 1}) {
      const ProblemSpec s(nu, j, z);
      const RepresentationEvaluator r(s);
      for (cplx l : {cplx(1.0), cplx(0.0), cplx(1e-3, 1e-3), cplx(-3.0), cplx(7.0, 2.0)})
        CHECK(std::abs(r(l) - char_fn_ode(s, l)) < 1e-12 * normalization(l) * (1 + std::abs(l)));
    }
  CHECK(std::abs(RepresentationEvaluator(ProblemSpec(0, 0, z))(1.0)) < 1e-14);
}

TEST_CASE("repr and ode agree on the families") {
  for (double a : {pi / 3, 0.35 * pi, 0.39 * pi}) {
    const Fixture f(a);
    for (cplx alpha : {cplx(0.0), cplx(1.0), cplx(-2.0), cplx(3.0, 4.0)}) {
      const ProblemSpec s1(1, 1, f.B1(alpha)), s0(0, 0, f.B0(alpha));
      const RepresentationEvaluator r1(s1), r0(s0);
      CHECK(r0.cancellation_ok());
      for (cplx l : kGrid) {
        const double n = normalization(l);
        CHECK(std::abs(char_fn_ode(s1, l) - r1(l)) < 1e-8 * n);
        CHECK(std::abs(char_fn_ode(s0, l) - r0(l)) < 1e-8 * n);
      }
    }
  }
}

TEST_CASE("repr: B1 is alpha-independent") {
  const Fixture f(0.35 * pi);
  for (int j : {0, 1}) {
    const RepresentationEvaluator base(ProblemSpec(1, j, f.B1(0.0)));
    for (cplx alpha : {cplx(1.0), cplx(-2.0), cplx(3.0, 4.0)}) {
      const RepresentationEvaluator r(ProblemSpec(1, j, f.B1(alpha)));
      for (cplx l : kGrid) CHECK(std::abs(r(l) - base(l)) < 1e-8 * normalization(l) * (1 + std::norm(alpha)));
    }
  }
}

TEST_CASE("char_fn_grid") {
  const PiecewisePotential z = PiecewisePotential::zero(0.35 * pi);
  std::vector<cplx> ls;
  for (int n = 1; n <= 6; ++n) ls.push_back((n - 0.5) * (n - 0.5));
  for (const CharFnSample& s : char_fn_grid(ProblemSpec(0, 1, z), ls, Method::ode)) {
    CHECK(std::abs(s.value()) < 1e-12);
    CHECK(!s.repr);
    CHECK(!s.discrepancy);
  }
  const auto g = char_fn_grid(ProblemSpec(0, 1, z), {-4.0}, Method::repr);
  CHECK(std::abs(g[0].value() / g[0].normalization - 1.0) < 1e-2);
  CHECK(!g[0].ode);

  const Fixture f(0.37 * pi);
  for (const CharFnSample& s : char_fn_grid(ProblemSpec(0, 0, f.smooth(cplx(1.0, 2.0))), kGrid, Method::both)) {
    REQUIRE(s.discrepancy);
    CHECK(*s.discrepancy < 1e-8);
  }
}

TEST_CASE("random potentials: ode vs repr") {
  std::mt19937_64 rng(41);
  for (int k = 0; k < 3; ++k) {
    const PiecewisePotential q = random_admissible_potential(0.35 * pi, rng);
    for (int nu : {0, 1})
      for (int j : {0, 1}) {
        const ProblemSpec s(nu, j, q);
        const RepresentationEvaluator r(s);
        for (cplx l : {cplx(-1.0), cplx(0.3), cplx(10.1), cplx(2.0, 3.0)})
          CHECK(std::abs(char_fn_ode(s, l) - r(l)) < 1e-8 * normalization(l));
      }
  }
}

TEST_CASE("property: mean value on a circle around 0") {
  const Fixture f(0.36 * pi);
  const ProblemSpec s(0, 0, f.B0(cplx(1.0, -1.0)));
  const RepresentationEvaluator r(s);
  const int n = 64;
  const double rad = 5e-3;
  cplx mean = 0.0;
  for (int i = 0; i < n; ++i) mean += r(std::polar(rad, 2.0 * pi * i / n));
  mean /= static_cast<double>(n);
  CHECK(std::abs(mean - r(0.0)) < 1e-8);
  CHECK(std::abs(r(0.0) - char_fn_ode(s, 0.0)) < 1e-8);
}

TEST_CASE("property: conjugate symmetry for real q") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> re(-10.0, 60.0), im(-6.0, 6.0);
  const PiecewisePotential q = random_admissible_potential(0.37 * pi, rng);
  std::vector<cplx> ls;
  for (int i = 0; i < 20; ++i) ls.emplace_back(re(rng), im(rng));
  for (int nu : {0, 1})
    for (int j : {0, 1}) {
      const ProblemSpec s(nu, j, q);
      const RepresentationEvaluator r(s);
      for (cplx l : ls) {
        const double n = normalization(l) * (1 + std::abs(l));
        CHECK(std::abs(char_fn_ode(s, std::conj(l)) - std::conj(char_fn_ode(s, l))) < 1e-12 * n);
        CHECK(std::abs(r(std::conj(l)) - std::conj(r(l))) < 1e-12 * n);
      }
    }
}

TEST_CASE("property: continuity in the delay at pi/3") {
  const double a0 = pi / 3, a1 = pi / 3 + 1e-9;
  const Fixture f0(a0), f1(a1);
  const ProblemSpec s0(1, 1, f0.B1(1.0)), s1(1, 1, f1.B1(1.0));
  for (cplx l : kGrid) CHECK(std::abs(char_fn_ode(s0, l) - char_fn_ode(s1, l)) < 1e-7 * normalization(l));
}

TEST_CASE("property: linear in omega with slope sin rho(pi - a) / (2 rho)") {
  const Fixture f(0.35 * pi);
  const ProblemSpec s(0, 1, f.B0(cplx(0.5, 0.5)));
  const WFunction w = compute_w(0, s.q);
  const cplx om = omega(s.q);
  for (cplx l : {cplx(1.7), cplx(-1.0), cplx(3.0, 2.0)}) {
    const cplx d = char_fn_repr(s, l, w, om + 1.0) - char_fn_repr(s, l, w, om);
    CHECK(std::abs(d - sinc_scaled(rho_of(l), pi - f.a) / 2.0) < 1e-12 * normalization(l));
  }
  // nu = j line: (-lambda)^nu (-delta) cos rho(pi - a) / (2 lambda)
  for (int nu : {0, 1}) {
    const ProblemSpec sn(nu, nu, nu == 0 ? f.B0(cplx(0.5, 0.5)) : f.B1(cplx(0.5, 0.5)));
    const WFunction wn = compute_w(nu, sn.q);
    const cplx on = omega(sn.q);
    for (cplx l : {cplx(1.7), cplx(-1.0), cplx(3.0, 2.0)}) {
      const cplx delta(0.25, -0.5);
      const cplx d = char_fn_repr(sn, l, wn, on + delta) - char_fn_repr(sn, l, wn, on);
      const cplx expect = std::pow(-l, nu) * (-delta) * std::cos(rho_of(l) * (pi - f.a)) / (2.0 * l);
      CHECK(std::abs(d - expect) < 1e-12 * normalization(l));
    }
  }
}
