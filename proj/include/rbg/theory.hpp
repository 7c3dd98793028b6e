#pragma once

// Numerical evaluation of the degree, two-hop path and branching-bound
// expressions for the Poisson RBG model. Radial reductions (E M, V N, the
// pair convolution h) are implemented for d = 2 only.

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "rbg/connection.hpp"

namespace rbg::theory {

enum class Method { closed_form, quadrature };

inline const char* to_string(Method m) {
  return m == Method::closed_form ? "closed_form" : "quadrature";
}

struct TheoryValue {
  std::string quantity;
  double value = 0.0;
  Method method = Method::closed_form;
  double estimated_abs_error = 0.0;
};

struct QuadratureError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Tolerance {
  double abs = 1e-10;
  double rel = 1e-8;
};

/// Adaptive 31-point Gauss-Kronrod; returns value and error estimate. Throws
/// when the error estimate misses both tolerances.
template <class F>
std::pair<double, double> integrate(F&& f, double a, double b, Tolerance tol = {},
                                    const char* what = "integral") {
  double error = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      f, a, b, 20, tol.rel, &error);
  if (!(error <= std::max(tol.abs, tol.rel * std::abs(value))))
    throw QuadratureError(std::string(what) + ": quadrature did not converge (error " +
                          std::to_string(error) + ")");
  // Report at least one ulp-scale error for quadrature results.
  return {value, std::max(error, std::abs(value) * std::numeric_limits<double>::epsilon())};
}

inline void require_2d(int dim, const char* what) {
  if (dim != 2) throw std::invalid_argument(std::string(what) + " is implemented for d = 2 only");
}

inline TheoryValue mean_typical_degree(double mu, const ConnectionSpec& spec, int dim) {
  return {"mean_typical_degree", mu * full_space_integral(spec, dim), Method::closed_form, 0.0};
}

inline TheoryValue expected_N(double lambda, double mu, const ConnectionSpec& spec, int dim) {
  const double f = full_space_integral(spec, dim);
  return {"expected_N", lambda * mu * f * f, Method::closed_form, 0.0};
}

/// (int f)^{-2}: below this value of lambda*mu the graph cannot percolate.
inline TheoryValue gw_lower_bound(const ConnectionSpec& spec, int dim) {
  const double f = full_space_integral(spec, dim);
  return {"gw_lower_bound", 1.0 / (f * f), Method::closed_form, 0.0};
}

/// mu * E sum_y I(o,y) ||y|| for f_p in d = 2.
inline TheoryValue mean_connection_distance(double mu, const ConnectionSpec& spec, int dim) {
  require_2d(dim, "mean_connection_distance");
  return {"mean_connection_distance", mu * 2.0 * M_PI * moment_integral(spec, 2, 1),
          Method::closed_form, 0.0};
}

/// Area of the intersection of two discs of radius a whose centres are s apart.
inline double lens_area(double a, double s) {
  if (s >= 2.0 * a) return 0.0;
  return 2.0 * a * a * std::acos(s / (2.0 * a)) - s * std::sqrt(a * a - 0.25 * s * s);
}

/// Intensity of {||y|| + ||x - y||} for a planar PPP of intensity mu.
inline double ellipse_intensity(double mu, double x_norm, double r) {
  if (!(r > x_norm)) throw std::domain_error("ellipse_intensity needs r > ||x||");
  return 0.25 * mu * M_PI * (2.0 * r * r - x_norm * x_norm) / std::sqrt(r * r - x_norm * x_norm);
}

/// Mean count of points with ||y|| + ||x - y|| <= r (ellipse area times mu).
inline double ellipse_intensity_measure(double mu, double x_norm, double r) {
  if (r < x_norm) throw std::domain_error("ellipse_intensity_measure needs r >= ||x||");
  return 0.25 * mu * M_PI * r * std::sqrt(r * r - x_norm * x_norm);
}

/// h(s) = int f(||y||) f(||x - y||) dy at ||x|| = s, d = 2.
/// Boolean families use the lens area. The exponential family uses either
/// h(s) = A^2 (pi s^2 / 4) K_2(s / theta') (closed form) or a 1-D quadrature
/// of the ellipse intensity with r = s cosh t.
inline double pair_convolution(const ConnectionSpec& spec, double s,
                               Method method = Method::closed_form, double* error = nullptr) {
  const double theta = dispersed_theta(spec, 2);
  const double amp = spec.dispersion * spec.amplitude;
  if (error) *error = 0.0;
  if (spec.bounded_support()) return amp * amp * lens_area(theta, s);
  if (s == 0.0) return amp * amp * 0.5 * M_PI * theta * theta;
  if (method == Method::closed_form) {
    const double z = s / theta;
    return amp * amp * 0.25 * M_PI * s * s * std::cyl_bessel_k(2.0, z);
  }
  // exp(-(||y|| + ||x-y||)/theta) integrated over level sets r of the sum.
  const double z = s / theta;
  const double t_max = std::acosh(std::max(1.0, 750.0 / z)) + 1.0;
  auto integrand = [&](double t) {
    // Lambda'(r) dr/dt with r = s cosh t; the sqrt(r^2 - s^2) = s sinh t factors cancel.
    const double r = s * std::cosh(t);
    return 0.25 * M_PI * (2.0 * r * r - s * s) * std::exp(-r / theta);
  };
  // Absolute floor relative to h(0) / A^2 = pi theta^2 / 2.
  const auto [value, err] =
      integrate(integrand, 0.0, t_max, {1e-15 * theta * theta, 1e-12}, "pair_convolution");
  if (error) *error = amp * amp * err;
  return amp * amp * value;
}

/// Radius beyond which the outer E M / V N integrands are negligible.
inline double outer_cutoff(const ConnectionSpec& spec) {
  const double theta = dispersed_theta(spec, 2);
  return spec.bounded_support() ? 2.0 * theta : 80.0 * theta;
}

/// E M = lambda int_{R^2} 1 - exp(-mu h(||x||)) dx, evaluated through the
/// generic pair convolution (ellipse quadrature for the exponential family).
inline TheoryValue expected_M(double lambda, double mu, const ConnectionSpec& spec, int dim,
                              Tolerance tol = {}) {
  require_2d(dim, "expected_M");
  if (lambda == 0.0 || mu == 0.0) return {"expected_M", 0.0, Method::quadrature, 0.0};
  auto integrand = [&](double s) {
    const double h = pair_convolution(spec, s, Method::quadrature);
    return 2.0 * M_PI * s * (-std::expm1(-mu * h));
  };
  const auto [v, e] = integrate(integrand, 0.0, outer_cutoff(spec), tol, "expected_M");
  return {"expected_M", lambda * v, Method::quadrature, lambda * e};
}

/// Disc connection 1(r <= theta): integrand supported on [0, 2 theta].
inline TheoryValue expected_M_disk(double lambda, double mu, double theta, Tolerance tol = {}) {
  if (lambda == 0.0 || mu == 0.0) return {"expected_M_disk", 0.0, Method::quadrature, 0.0};
  auto integrand = [&](double v) {
    const double lens =
        2.0 * theta * theta * std::acos(v / (2.0 * theta)) - v * std::sqrt(theta * theta - v * v / 4.0);
    return 2.0 * M_PI * lambda * v * (-std::expm1(-mu * lens));
  };
  const auto [v, e] = integrate(integrand, 0.0, 2.0 * theta, tol, "expected_M_disk");
  return {"expected_M_disk", v, Method::quadrature, e};
}

/// Exponential connection exp(-r/theta)/2 through K_0 and K_1.
inline TheoryValue expected_M_exp(double lambda, double mu, double theta, Tolerance tol = {}) {
  if (lambda == 0.0 || mu == 0.0) return {"expected_M_exp", 0.0, Method::quadrature, 0.0};
  auto integrand = [&](double v) {
    if (v == 0.0) return 0.0;
    const double z = v / theta;
    const double exponent =
        mu * M_PI * v / 16.0 * (2.0 * theta * std::cyl_bessel_k(1.0, z) + v * std::cyl_bessel_k(0.0, z));
    return 2.0 * M_PI * lambda * v * (-std::expm1(-exponent));
  };
  const auto [v, e] = integrate(integrand, 0.0, 80.0 * theta, tol, "expected_M_exp");
  return {"expected_M_exp", v, Method::quadrature, e};
}

/// V N = E N + lambda^2 mu (int f)^3 + lambda mu^2 int h(||x||)^2 dx.
inline TheoryValue variance_N(double lambda, double mu, const ConnectionSpec& spec, int dim,
                              Method convolution = Method::closed_form, Tolerance tol = {}) {
  require_2d(dim, "variance_N");
  const double f = full_space_integral(spec, dim);
  const double mean = lambda * mu * f * f;
  const double branching = lambda * lambda * mu * f * f * f;
  auto integrand = [&](double s) {
    const double h = pair_convolution(spec, s, convolution);
    return 2.0 * M_PI * s * h * h;
  };
  const auto [v, e] = integrate(integrand, 0.0, outer_cutoff(spec), {tol.abs * 1e-4, tol.rel},
                                "variance_N");
  return {"variance_N", mean + branching + lambda * mu * mu * v, Method::quadrature,
          lambda * mu * mu * e};
}

}  // namespace rbg::theory
