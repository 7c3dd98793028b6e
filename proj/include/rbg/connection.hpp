#pragma once

#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

#include <boost/math/special_functions/factorials.hpp>
#include <boost/math/special_functions/gamma.hpp>

namespace rbg {

enum class Family { boolean, p_boolean, exponential };

inline const char* to_string(Family f) {
  switch (f) {
    case Family::boolean: return "boolean";
    case Family::p_boolean: return "pboolean";
    case Family::exponential: return "exp";
  }
  return "?";
}

/// Connection function f_p(r) = p * f(p^{1/d} r) where f is one of
///   boolean:    1(r <= theta)
///   p_boolean:  amplitude * 1(r <= theta)
///   exponential: 1/2 * exp(-r / theta)
/// and p is `dispersion`. Dispersion is absolute with respect to the base
/// family; it is never composed.
struct ConnectionSpec {
  Family family = Family::boolean;
  double theta = 1.0;
  double amplitude = 1.0;
  double dispersion = 1.0;

  static ConnectionSpec boolean(double theta) { return checked({Family::boolean, theta, 1.0, 1.0}); }
  static ConnectionSpec p_boolean(double amplitude, double theta) {
    return checked({Family::p_boolean, theta, amplitude, 1.0});
  }
  static ConnectionSpec exponential(double theta) {
    return checked({Family::exponential, theta, 0.5, 1.0});
  }

  bool bounded_support() const { return family != Family::exponential; }

  void validate() const {
    if (!(theta > 0.0) || !std::isfinite(theta))
      throw std::invalid_argument("connection range theta must be positive");
    if (!(amplitude > 0.0 && amplitude <= 1.0))
      throw std::invalid_argument("connection amplitude must lie in (0, 1]");
    if (!(dispersion > 0.0 && dispersion <= 1.0))
      throw std::invalid_argument("dispersion p must lie in (0, 1]");
  }

  friend bool operator==(const ConnectionSpec&, const ConnectionSpec&) = default;

 private:
  static ConnectionSpec checked(ConnectionSpec s) {
    s.validate();
    return s;
  }
};

/// Distance scale factor p^{1/d}.
inline double dispersion_scale(const ConnectionSpec& spec, int dim) {
  return spec.dispersion == 1.0 ? 1.0 : std::pow(spec.dispersion, 1.0 / dim);
}

inline double evaluate(const ConnectionSpec& spec, double r, int dim) {
  const double x = dispersion_scale(spec, dim) * r;
  double base = 0.0;
  switch (spec.family) {
    case Family::boolean:
    case Family::p_boolean:
      base = x <= spec.theta ? spec.amplitude : 0.0;
      break;
    case Family::exponential:
      base = spec.amplitude * std::exp(-x / spec.theta);
      break;
  }
  return spec.dispersion * base;
}

inline ConnectionSpec disperse(ConnectionSpec spec, double p) {
  if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("dispersion p must lie in (0, 1]");
  spec.dispersion = p;
  return spec;
}

/// Range parameter after dispersion, theta * p^{-1/d}.
inline double dispersed_theta(const ConnectionSpec& spec, int dim) {
  return spec.theta / dispersion_scale(spec, dim);
}

/// Closed form of int_0^inf f_p(r) r^{d-1+k} dr.
inline double moment_integral(const ConnectionSpec& spec, int dim, int k) {
  if (dim < 1 || k < 0) throw std::invalid_argument("moment_integral needs d >= 1 and k >= 0");
  const int n = dim + k;
  // p * theta'^{n} with theta' = theta p^{-1/d} simplifies to theta^n p^{-k/d}.
  const double scale = std::pow(spec.theta, n) *
                       (k == 0 ? 1.0 : std::pow(spec.dispersion, -static_cast<double>(k) / dim));
  switch (spec.family) {
    case Family::boolean:
    case Family::p_boolean:
      return spec.amplitude * scale / n;
    case Family::exponential:
      return spec.amplitude * boost::math::factorial<double>(static_cast<unsigned>(n - 1)) * scale;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

/// int_{R^d} f(||x||) dx = c_d d int f r^{d-1} dr.
inline double unit_ball_volume(int dim) {
  return std::pow(M_PI, 0.5 * dim) / std::tgamma(0.5 * dim + 1.0);
}

inline double full_space_integral(const ConnectionSpec& spec, int dim) {
  return unit_ball_volume(dim) * dim * moment_integral(spec, dim, 0);
}

struct EffectiveSupport {
  double radius = 0.0;
  double truncation_mass = 0.0;  // relative neglected k=0 moment
};

/// Smallest R with int_R^inf f_p r^{d-1} dr <= epsilon * int_0^inf f_p r^{d-1} dr.
inline EffectiveSupport effective_support(const ConnectionSpec& spec, int dim, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("epsilon must lie in (0, 1)");
  const double theta = dispersed_theta(spec, dim);
  if (spec.bounded_support()) return {theta, 0.0};
  // Tail of r^{d-1} e^{-r/theta} relative to its total is Q(d, R/theta).
  double x = boost::math::gamma_q_inv(static_cast<double>(dim), epsilon);
  double mass = boost::math::gamma_q(static_cast<double>(dim), x);
  while (mass > epsilon) {
    x = std::nextafter(x, std::numeric_limits<double>::infinity());
    mass = boost::math::gamma_q(static_cast<double>(dim), x);
  }
  return {theta * x, mass};
}

inline std::string to_string(const ConnectionSpec& spec) {
  std::ostringstream os;
  os.precision(17);
  switch (spec.family) {
    case Family::boolean: os << "boolean:" << spec.theta; break;
    case Family::p_boolean: os << "pboolean:" << spec.amplitude << ':' << spec.theta; break;
    case Family::exponential: os << "exp:" << spec.theta; break;
  }
  if (spec.dispersion != 1.0) os << "@p=" << spec.dispersion;
  return os.str();
}

namespace detail {
inline double parse_double(std::string_view text, const char* what) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || text.empty())
    throw std::invalid_argument(std::string("invalid ") + what + " '" + std::string(text) + "'");
  return v;
}
}  // namespace detail

/// Parses `boolean:<theta>`, `pboolean:<p>:<theta>`, `exp:<theta>` with an
/// optional `@p=<dispersion>` suffix.
inline ConnectionSpec parse_connection(std::string_view text) {
  double dispersion = 1.0;
  if (const auto at = text.find('@'); at != std::string_view::npos) {
    const auto suffix = text.substr(at + 1);
    if (suffix.substr(0, 2) != "p=")
      throw std::invalid_argument("expected '@p=<dispersion>' in connection spec");
    dispersion = detail::parse_double(suffix.substr(2), "dispersion");
    text = text.substr(0, at);
  }
  const auto colon = text.find(':');
  if (colon == std::string_view::npos)
    throw std::invalid_argument("connection spec needs '<family>:<params>'");
  const auto family = text.substr(0, colon);
  const auto params = text.substr(colon + 1);
  ConnectionSpec spec;
  if (family == "boolean") {
    spec = ConnectionSpec::boolean(detail::parse_double(params, "theta"));
  } else if (family == "exp") {
    spec = ConnectionSpec::exponential(detail::parse_double(params, "theta"));
  } else if (family == "pboolean") {
    const auto sep = params.find(':');
    if (sep == std::string_view::npos)
      throw std::invalid_argument("pboolean spec needs 'pboolean:<p>:<theta>'");
    spec = ConnectionSpec::p_boolean(detail::parse_double(params.substr(0, sep), "amplitude"),
                                     detail::parse_double(params.substr(sep + 1), "theta"));
  } else {
    throw std::invalid_argument("unknown connection family '" + std::string(family) + "'");
  }
  return disperse(spec, dispersion);
}

}  // namespace rbg
