#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "polyglue/cutoff.hpp"
#include "polyglue/profiles.hpp"

using namespace polyglue;

namespace {
constexpr double two_pi = 2.0 * std::numbers::pi;

// bisection inverse used as the independent oracle for inverse_length
double invert_by_bisection(Profile p, double R) {
  double lo = 1e-12, hi = 1.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (gluing_length(p, mid) > R ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}
}  // namespace

TEST_CASE("gluing lengths at the pinned points") {
  CHECK(gluing_length(Profile::exponential, 1.0) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(gluing_length(Profile::logarithmic, std::exp(-two_pi)) == doctest::Approx(1.0));
  // high-precision evaluation of e^2 - e
  const double expected = std::exp(2.0) - std::exp(1.0);
  CHECK(gluing_length(Profile::exponential, 0.5) == doctest::Approx(expected).epsilon(1e-14));
  CHECK(expected == doctest::Approx(4.670774270471606).epsilon(1e-13));
  CHECK_THROWS(gluing_length(Profile::exponential, 0.0));
  CHECK_THROWS(gluing_length(Profile::exponential, 1.5));
}

TEST_CASE("inverse_length inverts the profiles") {
  CHECK(inverse_length(Profile::exponential, 0.0) == doctest::Approx(1.0));
  CHECK(inverse_length(Profile::logarithmic, 1.0) == doctest::Approx(std::exp(-two_pi)));
  const double target = std::exp(2.0) - std::exp(1.0);
  CHECK(inverse_length(Profile::exponential, target) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(inverse_length(Profile::exponential, target) ==
        doctest::Approx(invert_by_bisection(Profile::exponential, target)).epsilon(1e-10));

  // sampled grids; the log-profile modulus e^{-2 pi R} underflows past
  // R ~ 118, so the long lengths are exercised on the exponential profile
  for (double R : {0.1, 1.0, 5.0, 20.0, 120.0}) {
    const double r = inverse_length(Profile::exponential, R);
    CHECK(gluing_length(Profile::exponential, r) == doctest::Approx(R).epsilon(1e-12));
  }
  for (double R : {0.1, 1.0, 5.0, 20.0, 100.0}) {
    const double r = inverse_length(Profile::logarithmic, R);
    CHECK(gluing_length(Profile::logarithmic, r) == doctest::Approx(R).epsilon(1e-12));
  }
}

TEST_CASE("gluing parameter polar decomposition round-trips") {
  const GluingParameter a(0.3, 0.8);
  const std::complex<double> z = a.value();
  const GluingParameter b = GluingParameter::from_complex(z);
  CHECK(b.abs() == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(b.twist() == doctest::Approx(0.8).epsilon(1e-12));
  // twist normalization into [0,1)
  CHECK(GluingParameter(0.5, -0.25).twist() == doctest::Approx(0.75));
  CHECK(GluingParameter(0.5, 2.25).twist() == doctest::Approx(0.25));
  CHECK(GluingParameter().is_zero());
  CHECK_THROWS(GluingParameter(1.0, 0.0));
}

TEST_CASE("profile conversion matches gluing lengths across profiles") {
  // a = 0 -> 0
  CHECK(profile_convert(GluingParameter()).is_zero());
  // |a| -> 1 gives |a~| -> 1, twist preserved (phi_exp(1) = 0)
  {
    const GluingParameter a(1.0 - 1e-15, 0.3);
    const GluingParameter conv = profile_convert(a);
    CHECK(conv.abs() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(conv.twist() == doctest::Approx(0.3));
  }
  // |a| = 1/2 -> |a~| = e^{-2 pi (e^2 - e)} ~ 1.80e-13
  {
    const GluingParameter a(0.5, 0.1);
    const GluingParameter conv = profile_convert(a);
    CHECK(conv.abs() == doctest::Approx(std::exp(-two_pi * (std::exp(2.0) - std::exp(1.0)))));
    CHECK(conv.abs() == doctest::Approx(1.80e-13).epsilon(0.01));
    CHECK(conv.twist() == doctest::Approx(0.1));
    const double R_log = gluing_length(Profile::logarithmic, conv.abs());
    const double R_exp = gluing_length(Profile::exponential, a.abs());
    CHECK(R_log == doctest::Approx(R_exp).epsilon(1e-10));
  }
}

TEST_CASE("log_gluing_length stays consistent with the direct evaluation") {
  for (double r : {0.9, 0.5, 0.25, 0.1}) {
    CHECK(log_gluing_length(Profile::exponential, r) ==
          doctest::Approx(std::log(gluing_length(Profile::exponential, r))).epsilon(1e-13));
    CHECK(log_gluing_length(Profile::logarithmic, r) ==
          doctest::Approx(std::log(gluing_length(Profile::logarithmic, r))).epsilon(1e-13));
  }
}

TEST_CASE("default sc-scale is strictly increasing below 2 pi") {
  const ScScale scale;
  double prev = 0.0;
  for (int m = 0; m < 40; ++m) {
    const double d = scale.delta(m);
    CHECK(d > prev);
    CHECK(d < two_pi);
    prev = d;
  }
  CHECK(scale.delta(0) == doctest::Approx(std::numbers::pi));
  CHECK(ScScale::order_E(0) == 3);
  CHECK(ScScale::order_F(2) == 4);
  CHECK_THROWS(ScScale({1.0, 0.5}));
  CHECK_THROWS(ScScale({1.0, two_pi}));
}

TEST_CASE("bi-level restriction 0 <= k <= m+1") {
  CHECK(bilevel_valid(0, 1));
  CHECK_FALSE(bilevel_valid(0, 2));
  for (int m = 0; m < 8; ++m) CHECK(bilevel_valid(m, m));
  CHECK_THROWS(bilevel_valid(-1, 0));
}

TEST_CASE("degeneration index counts exact zeros") {
  CHECK(degeneration_index({0.0, 3.2, 0.0}) == 2);
  CHECK(degeneration_index({1.0, 2.0, 0.5}) == 0);
  CHECK(degeneration_index({0.0, 0.0, 0.0, 0.0}) == 4);
  CHECK(degeneration_index({}) == 0);
  CHECK_THROWS(degeneration_index({-1.0}));
}

TEST_CASE("cutoff satisfies the three defining properties") {
  const Cutoff beta;
  CHECK(beta(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(beta(-1.0) == 1.0);
  CHECK(beta(1.0) == 0.0);
  CHECK(beta(-5.0) == 1.0);
  CHECK(beta(5.0) == 0.0);
  for (double s = -2.0; s <= 2.0; s += 1.0 / 64) {
    CHECK(beta(-s) + beta(s) == doctest::Approx(1.0).epsilon(1e-12));
    if (s > -1.0 && s < 1.0) CHECK(beta.derivative(s) < 0.0);
  }
  // derivative consistent with a central difference
  for (double s : {-0.9, -0.3, 0.0, 0.4, 0.85}) {
    const double h = 1e-6;
    const double fd = (beta(s + h) - beta(s - h)) / (2 * h);
    CHECK(beta.derivative(s) == doctest::Approx(fd).epsilon(1e-6));
  }
}
