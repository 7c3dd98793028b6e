#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <vector>

#include "rbg/connection.hpp"
#include "rbg/rng.hpp"

using namespace rbg;

namespace {
std::vector<ConnectionSpec> sample_specs() {
  std::vector<ConnectionSpec> out;
  for (double p : {1.0, 0.5, 0.25, 0.1, 0.01}) {
    out.push_back(disperse(ConnectionSpec::boolean(0.2122), p));
    out.push_back(disperse(ConnectionSpec::p_boolean(0.5, 1.0), p));
    out.push_back(disperse(ConnectionSpec::exponential(0.3), p));
  }
  return out;
}

// Quadrature of int_0^inf f_p(r) r^{d-1+k} dr, split at the support edge.
double moment_by_quadrature(const ConnectionSpec& s, int d, int k) {
  auto f = [&](double r) { return evaluate(s, r, d) * std::pow(r, d - 1 + k); };
  const double edge = dispersed_theta(s, d);
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  if (s.bounded_support()) return GK::integrate(f, 0.0, edge, 15, 1e-13);
  return GK::integrate(f, 0.0, 100.0 * edge, 15, 1e-13);
}
}  // namespace

TEST(Evaluate, Examples) {
  const auto b = ConnectionSpec::boolean(0.1262);
  EXPECT_EQ(evaluate(b, 0.1, 2), 1.0);
  EXPECT_EQ(evaluate(b, 0.2, 2), 0.0);
  EXPECT_EQ(evaluate(b, 0.1262, 2), 1.0);
  EXPECT_EQ(evaluate(ConnectionSpec::exponential(0.7), 0.0, 2), 0.5);
  EXPECT_DOUBLE_EQ(evaluate(ConnectionSpec::exponential(0.7), 0.7, 2), 0.5 * std::exp(-1.0));
  EXPECT_EQ(evaluate(ConnectionSpec::p_boolean(0.3, 1.0), 0.5, 2), 0.3);
}

TEST(Evaluate, DispersionIdentityAtOne) {
  for (const auto& base : {ConnectionSpec::boolean(0.4), ConnectionSpec::exponential(0.4)}) {
    const auto same = disperse(base, 1.0);
    EXPECT_EQ(same, base);
    for (double r = 0.0; r < 3.0; r += 0.01) EXPECT_EQ(evaluate(same, r, 2), evaluate(base, r, 2));
  }
}

TEST(Disperse, QuarterDoublesSupport) {
  const auto s = disperse(ConnectionSpec::boolean(0.1), 0.25);
  EXPECT_DOUBLE_EQ(evaluate(s, 0.19, 2), 0.25);
  EXPECT_DOUBLE_EQ(evaluate(s, 0.2, 2), 0.25);
  EXPECT_EQ(evaluate(s, 0.2001, 2), 0.0);
  EXPECT_DOUBLE_EQ(dispersed_theta(s, 2), 0.2);
}

TEST(Disperse, NotComposedAndValidated) {
  const auto s = disperse(disperse(ConnectionSpec::boolean(1.0), 0.5), 0.25);
  EXPECT_EQ(s.dispersion, 0.25);
  EXPECT_THROW(disperse(ConnectionSpec::boolean(1.0), 0.0), std::invalid_argument);
  EXPECT_THROW(disperse(ConnectionSpec::boolean(1.0), 1.5), std::invalid_argument);
}

TEST(Spec, Validation) {
  EXPECT_THROW(ConnectionSpec::boolean(0.0), std::invalid_argument);
  EXPECT_THROW(ConnectionSpec::boolean(-1.0), std::invalid_argument);
  EXPECT_THROW(ConnectionSpec::p_boolean(0.0, 1.0), std::invalid_argument);
  EXPECT_THROW(ConnectionSpec::p_boolean(1.2, 1.0), std::invalid_argument);
  EXPECT_EQ(ConnectionSpec::exponential(1.0).amplitude, 0.5);
}

TEST(Evaluate, RangeAndMonotone) {
  CounterEngine e(1, StreamTag::generic);
  for (const auto& s : sample_specs()) {
    for (int i = 0; i < 2000; ++i) {
      double a = 3.0 * e.uniform(), b = 3.0 * e.uniform();
      if (a > b) std::swap(a, b);
      const double fa = evaluate(s, a, 2), fb = evaluate(s, b, 2);
      ASSERT_GE(fb, 0.0);
      ASSERT_LE(fa, 1.0);
      ASSERT_GE(fa, fb) << to_string(s) << " r=" << a << "," << b;
    }
  }
}

TEST(Moment, ClosedFormExamples) {
  EXPECT_DOUBLE_EQ(moment_integral(ConnectionSpec::boolean(0.3), 2, 0), 0.045);
  EXPECT_DOUBLE_EQ(moment_integral(ConnectionSpec::exponential(0.3), 2, 0), 0.045);
  // Mean hub degree at lambda = 100, theta = 0.1262: lambda pi theta^2.
  EXPECT_NEAR(100.0 * full_space_integral(ConnectionSpec::boolean(0.1262), 2), 5.003, 5e-4);
  EXPECT_DOUBLE_EQ(full_space_integral(ConnectionSpec::exponential(0.2), 2), M_PI * 0.04);
  EXPECT_NEAR(unit_ball_volume(3), 4.0 * M_PI / 3.0, 1e-14);
}

TEST(Moment, MatchesQuadrature) {
  for (const auto& s : sample_specs())
    for (int d : {1, 2, 3})
      for (int k : {0, 1}) {
        const double closed = moment_integral(s, d, k);
        EXPECT_NEAR(moment_by_quadrature(s, d, k), closed, 1e-10 * closed) << to_string(s) << " d=" << d;
      }
}

TEST(Moment, DispersionInvariance) {
  for (const auto& base : {ConnectionSpec::boolean(0.2122), ConnectionSpec::p_boolean(0.5, 0.7),
                           ConnectionSpec::exponential(0.2122)})
    for (int d : {1, 2, 3}) {
      const double m0 = moment_integral(base, d, 0);
      for (double p : {1.0, 0.5, 0.1, 0.01}) {
        EXPECT_NEAR(moment_integral(disperse(base, p), d, 0), m0, 1e-12 * m0);
        const double m1 = moment_integral(disperse(base, p), 2, 1);
        EXPECT_NEAR(m1, moment_integral(base, 2, 1) / std::sqrt(p), 1e-12 * m1);
      }
    }
}

TEST(Support, Bounded) {
  const auto s = disperse(ConnectionSpec::boolean(0.3), 0.25);
  const auto es = effective_support(s, 2, 1e-9);
  EXPECT_DOUBLE_EQ(es.radius, 0.6);
  EXPECT_EQ(es.truncation_mass, 0.0);
}

TEST(Support, ExponentialTail) {
  const auto es = effective_support(ConnectionSpec::exponential(1.0), 2, 1e-6);
  // Root of (1+R) e^{-R} = 1e-6.
  EXPECT_NEAR(es.radius, 16.68842079085992, 1e-9);
  EXPECT_NEAR((1.0 + es.radius) * std::exp(-es.radius), 1e-6, 1e-15);
  EXPECT_LE(es.truncation_mass, 1e-6);
  double prev = 1e300;
  for (double eps : {1e-12, 1e-9, 1e-6, 1e-3, 0.1}) {
    const auto e = effective_support(ConnectionSpec::exponential(0.5), 2, eps);
    EXPECT_LE(e.truncation_mass, eps);
    EXPECT_LE(e.radius, prev);
    prev = e.radius;
  }
}

TEST(Parse, RoundTrip) {
  EXPECT_EQ(parse_connection("boolean:0.1262"), ConnectionSpec::boolean(0.1262));
  EXPECT_EQ(parse_connection("exp:0.2122"), ConnectionSpec::exponential(0.2122));
  EXPECT_EQ(parse_connection("pboolean:0.5:1"), ConnectionSpec::p_boolean(0.5, 1.0));
  EXPECT_EQ(parse_connection("boolean:0.1262@p=0.25"), disperse(ConnectionSpec::boolean(0.1262), 0.25));
  for (const auto& s : sample_specs()) EXPECT_EQ(parse_connection(to_string(s)), s);
  for (const char* bad : {"", "boolean", "boolean:", "boolean:x", "gauss:1", "pboolean:0.5",
                          "boolean:1@q=0.5", "boolean:1@p=2", "boolean:-1", "exp:1 "})
    EXPECT_THROW(parse_connection(bad), std::invalid_argument) << bad;
}
