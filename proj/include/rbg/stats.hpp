#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <utility>

namespace rbg {

inline constexpr double kZ95 = 1.959963984540054;

/// Streaming central moments up to order four with pairwise merging
/// (Chan et al. / Pebay). Merging is commutative up to rounding.
class RunningStats {
 public:
  void push(double x) {
    RunningStats one;
    one.n_ = 1;
    one.mean_ = x;
    merge(one);
  }

  void merge(const RunningStats& o) {
    if (o.n_ == 0) return;
    if (n_ == 0) {
      *this = o;
      return;
    }
    const double na = static_cast<double>(n_);
    const double nb = static_cast<double>(o.n_);
    const double n = na + nb;
    const double delta = o.mean_ - mean_;
    const double d_n = delta / n;
    const double d_n2 = d_n * d_n;
    const double m2 = m2_ + o.m2_ + delta * d_n * na * nb;
    const double m3 = m3_ + o.m3_ + delta * d_n2 * na * nb * (na - nb) +
                      3.0 * d_n * (na * o.m2_ - nb * m2_);
    const double m4 = m4_ + o.m4_ + delta * d_n2 * d_n * na * nb * (na * na - na * nb + nb * nb) +
                      6.0 * d_n2 * (na * na * o.m2_ + nb * nb * m2_) +
                      4.0 * d_n * (na * o.m3_ - nb * m3_);
    mean_ += d_n * nb;
    m2_ = m2;
    m3_ = m3;
    m4_ = m4;
    n_ += o.n_;
  }

  std::size_t count() const { return n_; }
  double mean() const { return mean_; }
  /// Unbiased sample variance.
  double variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
  double std_error() const { return n_ > 0 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0; }
  double ci_half_width_95() const { return kZ95 * std_error(); }

  /// Standard error of the sample variance from the fourth central moment.
  double variance_std_error() const {
    if (n_ < 4) return 0.0;
    const double n = static_cast<double>(n_);
    const double m4 = m4_ / n;
    const double s2 = m2_ / n;
    const double v = (m4 - s2 * s2 * (n - 3.0) / (n - 1.0)) / n;
    return std::sqrt(std::max(v, 0.0));
  }
  double variance_ci_half_width_95() const { return kZ95 * variance_std_error(); }

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
  double m3_ = 0.0;
  double m4_ = 0.0;
};

/// Wilson score interval for a binomial proportion.
inline std::pair<double, double> wilson_interval(std::size_t successes, std::size_t trials,
                                                 double z = kZ95) {
  if (trials == 0) return {0.0, 1.0};
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / (1.0 + z2 / n);
  const double lo = successes == 0 ? 0.0 : std::max(0.0, centre - half);
  const double hi = successes == trials ? 1.0 : std::min(1.0, centre + half);
  return {lo, hi};
}

}  // namespace rbg
