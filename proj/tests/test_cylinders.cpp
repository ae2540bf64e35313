#include <doctest.h>
#include <functional>
#include <algorithm>

#include <cmath>
#include <numbers>
#include <random>

#include "polyglue/grid.hpp"
#include "polyglue/norms.hpp"

using namespace polyglue;

namespace {

constexpr double pi = std::numbers::pi;

CylinderMap sample_scalar(const Grid& g, const std::function<double(double, double)>& f) {
  CylinderMap m(g, 1);
  for (int i = 0; i < g.n_s; ++i)
    for (int j = 0; j < g.n_t; ++j) m.at(i, j, 0) = f(g.s(i), g.t(j));
  return m;
}

CylinderMap random_smooth(const Grid& g, std::mt19937_64& rng, double kappa) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double a0 = u(rng), a1 = u(rng), b1 = u(rng), ph = pi * u(rng);
  return sample_scalar(g, [=](double s, double t) {
    return std::exp(-kappa * std::abs(s)) *
           (a0 + a1 * std::cos(2 * pi * t + ph) + b1 * std::sin(2 * pi * t));
  });
}

}  // namespace

TEST_CASE("grid invariants") {
  CHECK_THROWS(Grid(0.0, 1.0, 3, 8));
  CHECK_THROWS(Grid(0.0, 1.0, 8, 3));
  CHECK_THROWS(Grid(1.0, 0.0, 8, 8));
  const Grid g(0.0, 2.0, 9, 8);
  CHECK(g.ds() == doctest::Approx(0.25));
  CHECK(g.t(7) == doctest::Approx(0.875));
}

TEST_CASE("fd weights reproduce the classical stencils") {
  const auto w1 = fd_weights(1, {-1.0, 0.0, 1.0}, 0.5);
  CHECK(w1[0] == doctest::Approx(-1.0));
  CHECK(w1[1] == doctest::Approx(0.0));
  CHECK(w1[2] == doctest::Approx(1.0));
  const auto w2 = fd_weights(2, {-1.0, 0.0, 1.0}, 1.0);
  CHECK(w2[0] == doctest::Approx(1.0));
  CHECK(w2[1] == doctest::Approx(-2.0));
  CHECK(w2[2] == doctest::Approx(1.0));
  const auto w1s = fd_weights(1, {0.0, 1.0, 2.0}, 1.0);  // one-sided
  CHECK(w1s[0] == doctest::Approx(-1.5));
  CHECK(w1s[1] == doctest::Approx(2.0));
  CHECK(w1s[2] == doctest::Approx(-0.5));
}

TEST_CASE("spectral t-derivative is exact on resolved harmonics") {
  const Grid g(0.0, 1.0, 4, 16);
  const CylinderMap u = sample_scalar(g, [](double, double t) { return std::sin(2 * pi * t); });
  const auto d = derivative_grid(u, 0, 1, DerivScheme::spectral);
  for (int i = 0; i < g.n_s; ++i)
    for (int j = 0; j < g.n_t; ++j)
      CHECK(d[(static_cast<std::size_t>(i) * g.n_t + j)] ==
            doctest::Approx(2 * pi * std::cos(2 * pi * g.t(j))).epsilon(1e-11));
}

TEST_CASE("interpolation: exact at nodes, trigonometric accuracy in t") {
  const Grid g(0.0, 4.0, 17, 16);
  const CylinderMap u = sample_scalar(g, [](double s, double t) {
    return std::cos(2 * pi * t) * (1.0 + 0.5 * s);
  });
  // node point -> stored value
  CHECK(u.evaluate(g.s(5), g.t(3))[0] == doctest::Approx(u.at(5, 3, 0)).epsilon(1e-15));
  // off-node t at node s: trig interpolation exact on resolved harmonics
  for (double t : {0.013, 0.27, 0.683}) {
    CHECK(u.evaluate(g.s(2), t)[0] ==
          doctest::Approx(std::cos(2 * pi * t) * (1.0 + 0.5 * g.s(2))).epsilon(1e-12));
  }
  // constants interpolate exactly anywhere
  CylinderMap c(g, 2, Asympt::constant, {3.0, -1.0});
  for (int i = 0; i < g.n_s; ++i)
    for (int j = 0; j < g.n_t; ++j) {
      c.at(i, j, 0) = 3.0;
      c.at(i, j, 1) = -1.0;
    }
  const auto v = c.evaluate(1.234, 0.567);
  CHECK(v[0] == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(v[1] == doctest::Approx(-1.0).epsilon(1e-12));
  // beyond-grid evaluation clamps to the asymptotic profile
  CHECK(c.evaluate(99.0, 0.3, true)[0] == doctest::Approx(3.0));
  CHECK_THROWS(c.evaluate(99.0, 0.3));
}

TEST_CASE("circle mean") {
  const Grid g(0.0, 2.0, 9, 8);
  // constant
  const CylinderMap c = sample_scalar(g, [](double, double) { return 2.5; });
  CHECK(c.circle_mean(1.0)[0] == doctest::Approx(2.5).epsilon(1e-15));
  // first harmonic integrates to zero exactly at any n_t >= 4
  const CylinderMap h = sample_scalar(g, [](double, double t) { return std::sin(2 * pi * t); });
  CHECK(h.circle_mean(0.5)[0] == doctest::Approx(0.0).epsilon(1e-15));
  // u(s,t) = s has mean s0
  const CylinderMap s = sample_scalar(g, [](double sv, double) { return sv; });
  CHECK(s.circle_mean(1.5)[0] == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(s.circle_mean(1.37)[0] == doctest::Approx(1.37).epsilon(1e-9));
  CHECK_THROWS(s.circle_mean(5.0));
}

TEST_CASE("weighted norm: closed-form exponential sample") {
  // || e^{-s} ||_{0, 1/2}^2 = int_0^inf e^{-2s} e^{s} ds = 1
  const Grid g(0.0, 20.0, 256, 8);
  const CylinderMap u = sample_scalar(g, [](double s, double) { return std::exp(-s); });
  const double n = weighted_norm(u, 0, 0.5, WeightCenter::half(), NormPart::full);
  CHECK(n == doctest::Approx(1.0).epsilon(1e-3));
  // zero map
  const CylinderMap z(g, 3);
  CHECK(weighted_norm(z, 2, 1.0, WeightCenter::half()) == 0.0);
}

TEST_CASE("weighted norm: remainder of a declared constant vanishes") {
  const Grid g(0.0, 5.0, 16, 8);
  CylinderMap c(g, 1, Asympt::constant, {4.0});
  for (int i = 0; i < g.n_s; ++i)
    for (int j = 0; j < g.n_t; ++j) c.at(i, j, 0) = 4.0;
  CHECK(weighted_norm(c, 2, 0.5, WeightCenter::half()) == doctest::Approx(0.0));
  CHECK(weighted_norm(c, 0, 0.5, WeightCenter::half(), NormPart::full) > 0.0);
}

TEST_CASE("pair E-norm: constants and the closed-form sample") {
  const Grid gp(0.0, 20.0, 512, 8);
  const Grid gm(-20.0, 0.0, 512, 8);
  // constant pair (c, c) with zero remainder has norm |c|
  {
    CylinderMap p(gp, 2, Asympt::constant, {3.0, 4.0});
    CylinderMap m(gm, 2, Asympt::constant, {3.0, 4.0});
    for (int i = 0; i < gp.n_s; ++i)
      for (int j = 0; j < gp.n_t; ++j)
        for (int k = 0; k < 2; ++k) {
          p.at(i, j, k) = k ? 4.0 : 3.0;
          m.at(i, j, k) = k ? 4.0 : 3.0;
        }
    const MapPair pair(p, m, PairSpace::E);
    CHECK(pair_norm_E(pair, 0, ScScale{}) == doctest::Approx(5.0).epsilon(1e-12));
  }
  // (e^{-s}, 0) with c = 0 at delta_0 = 1/4:
  // norm^2 = sum_{p=0..3} int e^{(2 delta - 2)s} = 4 / (2 - 2 delta)
  {
    CylinderMap p(gp, 1, Asympt::constant, {0.0});
    CylinderMap m(gm, 1, Asympt::constant, {0.0});
    for (int i = 0; i < gp.n_s; ++i)
      for (int j = 0; j < gp.n_t; ++j) p.at(i, j, 0) = std::exp(-gp.s(i));
    const MapPair pair(p, m, PairSpace::E);
    const ScScale quarter({0.25, 0.5, 1.0});
    const double expected = std::sqrt(4.0 / (2.0 - 2.0 * 0.25));
    CHECK(pair_norm_E(pair, 0, quarter) == doctest::Approx(expected).epsilon(2e-3));
  }
}

TEST_CASE("norm monotone in order and in weight on decaying samples") {
  std::mt19937_64 rng(42);
  const Grid g(0.0, 8.0, 65, 8);
  for (int trial = 0; trial < 10; ++trial) {
    const CylinderMap u = random_smooth(g, rng, 2.0);
    double prev = -1.0;
    for (int k = 0; k <= 3; ++k) {
      const double n = weighted_norm(u, k, 0.5, WeightCenter::half(), NormPart::full);
      CHECK(n >= prev);
      prev = n;
    }
    double prev_d = -1.0;
    for (double delta : {0.1, 0.5, 1.0, 1.5}) {
      const double n = weighted_norm(u, 1, delta, WeightCenter::half(), NormPart::full);
      CHECK(n >= prev_d);
      prev_d = n;
    }
  }
}

TEST_CASE("quadrature error decays at least quadratically under refinement") {
  // smooth closed form: || e^{-s} ||_{1, 1/2} over [0, 20]
  auto norm_at = [](int n_s) {
    const Grid g(0.0, 20.0, n_s, 8);
    const CylinderMap u = sample_scalar(g, [](double s, double) { return std::exp(-s); });
    return weighted_norm(u, 1, 0.5, WeightCenter::half(), NormPart::full);
  };
  const double exact = std::sqrt(2.0);  // two identical integrals of e^{-s}
  const double e1 = std::abs(norm_at(64) - exact);
  const double e2 = std::abs(norm_at(128) - exact);
  const double e3 = std::abs(norm_at(256) - exact);
  CHECK(e1 / e2 >= 3.5);
  CHECK(e2 / e3 >= 3.5);
}

TEST_CASE("Banach algebra bound: ||fg||_{k,delta} <= C ||f||_{m,delta} ||g||_{k,sigma}") {
  std::mt19937_64 rng(7);
  const Grid g(0.0, 10.0, 81, 8);
  const int m = 3, k = 2;
  const double delta = 1.0, sigma = 0.5;
  std::vector<double> ratios;
  for (int trial = 0; trial < 100; ++trial) {
    const CylinderMap f = random_smooth(g, rng, 2.5);
    const CylinderMap h = random_smooth(g, rng, 2.0);
    CylinderMap prod(g, 1);
    for (int i = 0; i < g.n_s; ++i)
      for (int j = 0; j < g.n_t; ++j) prod.at(i, j, 0) = f.at(i, j, 0) * h.at(i, j, 0);
    const double lhs = weighted_norm(prod, k, delta, WeightCenter::half(), NormPart::full);
    const double rf = weighted_norm(f, m, delta, WeightCenter::half(), NormPart::full);
    const double rh = weighted_norm(h, k, sigma, WeightCenter::half(), NormPart::full);
    if (rf * rh > 1e-12) ratios.push_back(lhs / (rf * rh));
  }
  std::sort(ratios.begin(), ratios.end());
  CHECK(ratios.size() > 90);
  CHECK(ratios.back() < 1.0);  // bounded empirical constant for this family
}

TEST_CASE("Banach module bound on necks is uniform in a") {
  std::mt19937_64 rng(11);
  const int m = 3, k = 2;
  const double delta = 1.0;
  std::vector<double> worst_per_R;
  for (double R : {5.0, 10.0, 20.0}) {
    const Grid g(0.0, R, static_cast<int>(R * 8) + 1, 8);
    double worst = 0.0;
    for (int trial = 0; trial < 30; ++trial) {
      CylinderMap q = random_smooth(g, rng, 0.3);
      CylinderMap p = random_smooth(g, rng, 0.2);
      CylinderMap prod(g, 1);
      for (int i = 0; i < g.n_s; ++i)
        for (int j = 0; j < g.n_t; ++j) prod.at(i, j, 0) = q.at(i, j, 0) * p.at(i, j, 0);
      const auto c = WeightCenter::neck(R);
      const double lhs = weighted_norm(prod, k, -delta, c, NormPart::full);
      const double rq = weighted_norm(q, m, -delta, c, NormPart::full);
      const double rp = weighted_norm(p, k, -delta, c, NormPart::full);
      if (rq * rp > 1e-12)
        worst = std::max(worst, lhs / (std::exp(delta * R / 2.0) * rq * rp));
    }
    worst_per_R.push_back(worst);
  }
  for (double w : worst_per_R) CHECK(w < 10.0);
  // no growth as R increases (uniformity of the constant)
  CHECK(worst_per_R[2] <= 3.0 * worst_per_R[0] + 1e-12);
}

TEST_CASE("point lifts between the two neck charts") {
  const GluingParameter a(0.4, 0.25);
  const double R = 6.0;
  {
    const auto l = lift_point(a, R, R, 0.5, 1.0);
    CHECK(l.chart_x[0] == doctest::Approx(R));
    CHECK(l.chart_y[0] == doctest::Approx(0.0));
    CHECK(l.chart_y[1] == doctest::Approx(0.25));
  }
  {
    const auto l = lift_point(a, R, 0.0, 0.1, 1.0);
    CHECK(l.chart_y[0] == doctest::Approx(-R));
    CHECK_FALSE(l.neck_interior);
  }
  {
    const auto l = lift_point(a, R, 0.5 * R, 0.0, 1.0);
    CHECK(l.chart_x[0] == doctest::Approx(0.5 * R));
    CHECK(l.chart_y[1] == doctest::Approx(0.75));  // mod-1 arithmetic
    CHECK(l.neck_interior);
  }
  CHECK_THROWS(lift_point(a, R, -0.5, 0.0, 1.0));
  CHECK_THROWS(lift_point(a, R, R + 0.5, 0.0, 1.0));
  CHECK_THROWS(lift_point(GluingParameter(), 0.0, 0.0, 0.0, 1.0));
}

TEST_CASE("grid CSV round trip") {
  const Grid g(-1.0, 3.0, 9, 4);
  CylinderMap u(g, 2, Asympt::antipodal, {1.0, -2.0});
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (auto& v : u.raw()) v = unif(rng);
  const CylinderMap back = CylinderMap::from_csv(u.to_csv());
  CHECK(back.grid() == g);
  CHECK(back.asympt() == Asympt::antipodal);
  CHECK(back.constant() == u.constant());
  for (std::size_t n = 0; n < u.raw().size(); ++n)
    CHECK(back.raw()[n] == doctest::Approx(u.raw()[n]).epsilon(1e-15));
}
