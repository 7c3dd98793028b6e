#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rbg/rng.hpp"

namespace rbg {

enum class Boundary { torus, open };

inline const char* to_string(Boundary b) { return b == Boundary::torus ? "torus" : "open"; }

/// Cube [-L/2, L/2)^d.
struct Window {
  int dim = 2;
  double side = 1.0;
  Boundary boundary = Boundary::torus;

  void validate() const {
    if (dim < 1) throw std::invalid_argument("window dimension must be >= 1");
    if (!(side > 0.0) || !std::isfinite(side))
      throw std::invalid_argument("window side must be positive and finite");
  }
  double volume() const { return std::pow(side, dim); }
  double half() const { return 0.5 * side; }

  bool contains(std::span<const double> x) const {
    for (double c : x)
      if (c < -half() || c > half()) return false;
    return true;
  }

  friend bool operator==(const Window&, const Window&) = default;
};

enum class PointKind { agent, hub };

inline const char* to_string(PointKind k) { return k == PointKind::agent ? "agent" : "hub"; }

/// Finite configuration in a window, coordinates stored flat (point-major).
class PointSet {
 public:
  PointSet(Window window, PointKind kind, double intensity, std::vector<double> coords = {})
      : window_(window), kind_(kind), intensity_(intensity), coords_(std::move(coords)) {
    window_.validate();
    if (coords_.size() % static_cast<std::size_t>(window_.dim) != 0)
      throw std::invalid_argument("coordinate buffer is not a multiple of the dimension");
  }

  const Window& window() const { return window_; }
  PointKind kind() const { return kind_; }
  double intensity_used() const { return intensity_; }
  int dim() const { return window_.dim; }
  std::size_t size() const { return coords_.size() / static_cast<std::size_t>(window_.dim); }
  bool empty() const { return coords_.empty(); }

  std::span<const double> point(std::size_t i) const {
    return {coords_.data() + i * static_cast<std::size_t>(window_.dim),
            static_cast<std::size_t>(window_.dim)};
  }
  const std::vector<double>& coords() const { return coords_; }

 private:
  Window window_;
  PointKind kind_;
  double intensity_;
  std::vector<double> coords_;
};

/// Largest admissible expected point count for one window.
inline constexpr double kMaxMeanPointCount = 1.0e9;

/// Homogeneous PPP addressed by point index: point(i) and mark(i) are pure
/// functions of (seed, kind, i), so large processes can be streamed instead of
/// stored. Marks are independent U[0,1) labels used for thinning couplings.
class PoissonSampler {
 public:
  PoissonSampler(double intensity, const Window& window, std::uint64_t seed, PointKind kind)
      : window_(window), seed_(seed), kind_(kind), intensity_(intensity) {
    window.validate();
    if (!(intensity >= 0.0) || !std::isfinite(intensity))
      throw std::invalid_argument("intensity must be finite and non-negative");
    const double mean = intensity * window.volume();
    if (mean > kMaxMeanPointCount)
      throw std::overflow_error("expected point count " + std::to_string(mean) +
                                " exceeds cap " + std::to_string(kMaxMeanPointCount));
    if (mean > 0.0) {
      CounterEngine engine(seed, StreamTag::count, static_cast<std::uint32_t>(kind));
      std::poisson_distribution<long long> count(mean);
      count_ = static_cast<std::size_t>(count(engine));
    }
  }

  std::size_t count() const { return count_; }
  const Window& window() const { return window_; }
  double intensity() const { return intensity_; }
  PointKind kind() const { return kind_; }

  void point(std::size_t i, std::span<double> out) const {
    const auto tag = kind_ == PointKind::agent ? StreamTag::agent_points : StreamTag::hub_points;
    const double side = window_.side;
    const double lo = -window_.half();
    for (int k = 0; k < window_.dim; k += 2) {
      const auto words = random_words(seed_, tag, i, static_cast<std::uint32_t>(k / 2));
      out[k] = lo + side * to_unit(words[0]);
      if (k + 1 < window_.dim) out[k + 1] = lo + side * to_unit(words[1]);
    }
  }

  double mark(std::size_t i) const {
    const auto tag = kind_ == PointKind::agent ? StreamTag::marks_agent : StreamTag::marks_hub;
    return to_unit(random_words(seed_, tag, i, 0)[0]);
  }

  PointSet materialize() const {
    std::vector<double> coords(count_ * static_cast<std::size_t>(window_.dim));
    for (std::size_t i = 0; i < count_; ++i)
      point(i, {coords.data() + i * static_cast<std::size_t>(window_.dim),
                static_cast<std::size_t>(window_.dim)});
    return PointSet(window_, kind_, intensity_, std::move(coords));
  }

 private:
  Window window_;
  std::uint64_t seed_;
  PointKind kind_;
  double intensity_;
  std::size_t count_ = 0;
};

inline PointSet sample_ppp(double intensity, const Window& window, std::uint64_t seed,
                           PointKind kind = PointKind::agent) {
  return PoissonSampler(intensity, window, seed, kind).materialize();
}

/// Adds a point at the origin in front of the others. For a PPP this is the
/// Palm version (Slivnyak).
inline PointSet palm_condition(const PointSet& points) {
  if (points.kind() != PointKind::agent)
    throw std::invalid_argument("palm conditioning applies to the agent process");
  const std::vector<double> origin(static_cast<std::size_t>(points.dim()), 0.0);
  if (!points.window().contains(origin))
    throw std::invalid_argument("window does not contain the origin");
  std::vector<double> coords;
  coords.reserve(points.coords().size() + origin.size());
  coords.insert(coords.end(), origin.begin(), origin.end());
  coords.insert(coords.end(), points.coords().begin(), points.coords().end());
  return PointSet(points.window(), PointKind::agent, points.intensity_used(), std::move(coords));
}

/// Per-axis difference y - x, wrapped to the minimal image on the torus.
inline double axis_delta(const Window& w, double x, double y) {
  double d = y - x;
  if (w.boundary == Boundary::torus) {
    if (d > w.half())
      d -= w.side;
    else if (d < -w.half())
      d += w.side;
  }
  return d;
}

inline double squared_distance(const Window& w, std::span<const double> x,
                               std::span<const double> y) {
  double s = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double d = axis_delta(w, x[k], y[k]);
    s += d * d;
  }
  return s;
}

inline double pair_distance(const Window& w, std::span<const double> x,
                            std::span<const double> y) {
  return std::sqrt(squared_distance(w, x, y));
}

}  // namespace rbg
