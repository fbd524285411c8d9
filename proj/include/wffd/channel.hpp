#pragma once

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "wffd/common.hpp"

namespace wffd {

// Finite real support with probability masses. Used for the channel state S
// and for discrete channel inputs.
struct Constellation {
  std::vector<double> points;  // strictly increasing
  std::vector<double> probs;

  double mean() const;
  double variance() const;

  // Throws std::invalid_argument if the fields break the invariants:
  // equal nonzero lengths, strictly increasing points, probs >= 0 summing
  // to 1 within 1e-12.
  void validate() const;
};

// Equiprobable m-PAM with points (2i - m + 1) * sqrt(3/(m^2-1)), i = 0..m-1.
// Zero mean, unit variance for every m >= 2.
Constellation make_pam(int m);

struct UniformInterval {
  double mean = 0.0;
  double half_width = 1.0;  // > 0
};

struct GaussianLaw {
  double mean = 0.0;
  double variance = 1.0;  // > 0
};

// Law of the fast fading multiplier A.
struct FadingModel {
  std::variant<Constellation, UniformInterval, GaussianLaw> law;

  static FadingModel discrete(Constellation pmf);
  static FadingModel uniform(double mean, double half_width);
  static FadingModel gaussian(double mean, double variance);
  // Single atom at `value` (e.g. A == 1, no fading).
  static FadingModel degenerate(double value = 1.0);

  bool is_discrete() const { return std::holds_alternative<Constellation>(law); }
  const Constellation& discrete_law() const { return std::get<Constellation>(law); }

  double mean() const;
  double variance() const;

  void validate() const;
};

struct ChannelParams {
  double P = 1.0;  // average input power, > 0
  double c = 1.0;  // state gain

  void validate() const;
};

// Affine map to zero mean, unit variance. Idempotent. Throws on zero variance.
Constellation standardize(const Constellation& raw);

// Scales the law by 1/stddev so the variance becomes 1; the mean becomes
// mean/stddev. Idempotent. Throws on zero variance (degenerate laws).
FadingModel standardize(const FadingModel& raw);

struct BlockSample {
  std::vector<double> y;
  std::vector<double> a;
  std::vector<double> s;
};

// Draws i.i.d. (s_i, a_i, z_i) and returns y_i = x_i + c*a_i*s_i + z_i.
// In residual mode z_i = Z - round(2Z)/2, so |z_i| <= 1/4. A fixed seed
// reproduces the sample exactly.
BlockSample sample_block(const ChannelParams& params, const Constellation& state,
                         const FadingModel& fading, std::span<const double> x,
                         NoiseMode noise_mode, std::uint64_t seed);

// Residual left after snapping 2z to the nearest integer: z - round(2z)/2.
double residual_noise(double z);

}  // namespace wffd
