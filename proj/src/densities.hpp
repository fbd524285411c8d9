#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

#include "wffd/channel.hpp"
#include "wffd/numerics.hpp"

namespace wffd::detail {

inline constexpr double kLogTwoPiConst = 1.8378770664093454836;

inline double log2_normal_pdf_at(double x, double mean, double var) {
  const double d = x - mean;
  return -0.5 * kLog2E * (kLogTwoPiConst + std::log(var) + d * d / var);
}

inline double log2_sum_exp2_span(std::span<const double> terms) {
  double m = -std::numeric_limits<double>::infinity();
  for (double t : terms) m = std::max(m, t);
  if (!std::isfinite(m)) return m;
  double acc = 0.0;
  for (double t : terms) acc += std::exp2(t - m);
  return m + std::log2(acc);
}

// Density of c*A*s + N(0, base_var) at t, for any fading law.
inline double fading_smear_density(const FadingModel& fading, double c, double s,
                                   double base_var, double t) {
  const double cs = c * s;
  if (fading.is_discrete()) {
    double acc = 0.0;
    const auto& law = fading.discrete_law();
    for (std::size_t k = 0; k < law.points.size(); ++k) {
      const double d = t - cs * law.points[k];
      acc += law.probs[k] * std::exp(-0.5 * d * d / base_var);
    }
    return acc / std::sqrt(2.0 * M_PI * base_var);
  }
  if (const auto* u = std::get_if<UniformInterval>(&fading.law)) {
    if (cs == 0.0) {
      return std::exp(-0.5 * t * t / base_var) / std::sqrt(2.0 * M_PI * base_var);
    }
    const double e1 = cs * (u->mean - u->half_width);
    const double e2 = cs * (u->mean + u->half_width);
    const double lo = std::min(e1, e2);
    const double hi = std::max(e1, e2);
    const double sd = std::sqrt(base_var);
    return (std_normal_cdf((t - lo) / sd) - std_normal_cdf((t - hi) / sd)) / (hi - lo);
  }
  const auto& g = std::get<GaussianLaw>(fading.law);
  const double var = base_var + cs * cs * g.variance;
  const double d = t - cs * g.mean;
  return std::exp(-0.5 * d * d / var) / std::sqrt(2.0 * M_PI * var);
}

}  // namespace wffd::detail
