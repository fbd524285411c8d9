#pragma once

#include <cstdint>

#include "wffd/channel.hpp"
#include "wffd/common.hpp"

namespace wffd {

struct SimConfig {
  long long n_symbols = 100000;  // >= 10^4
  std::uint64_t seed = 1;
  NoiseMode noise_mode = NoiseMode::kGaussian;
  CsiMode mode = CsiMode::kNcsi;
  int jobs = 1;  // batches are seeded independently, so results do not depend on jobs
};

struct SimResult {
  double joint_error_rate = 0.0;
  double state_error_rate = 0.0;
  double input_error_rate = 0.0;
  long long n = 0;
  std::uint64_t seed = 0;
  long long joint_errors = 0;
  long long state_errors = 0;
  long long input_errors = 0;
};

// Uncoded symbol-by-symbol decoding of (X, S) from Y = X + c*A*S + Z with X
// uniform over x_const (integer points, |x| <= ceil(sqrt(P))).
//   NCSI, gaussian noise: maximize the likelihood of y marginalized over A.
//   NCSI, residual noise: membership test against the interval images of
//     (x, s) under the fading support, widened by 1/4.
//   RCSI: same tests conditioned on the true fading draw.
// Ties break toward the lexicographically smallest (x, s).
SimResult run_decoding_sim(const SimConfig& cfg, const ChannelParams& params,
                           const Constellation& x_const, const Constellation& state,
                           const FadingModel& fading);

// Half-width of the Wilson score interval for `errors` successes in `n`
// trials (z defaults to the 95% two-sided quantile).
double wilson_halfwidth(long long errors, long long n, double z = 1.959963984540054);

}  // namespace wffd
