#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "wffd/channel.hpp"

namespace wffd::detail {

// splitmix64 step, used to derive independent substream seeds.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// mt19937_64 with hand-rolled uniform/normal transforms so streams are
// identical across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double uniform01() {
    // 53-bit mantissa in (0, 1); never returns exactly 0.
    return (static_cast<double>(eng_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 6.283185307179586477 * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

 private:
  std::mt19937_64 eng_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Inverse-CDF sampler over a finite support.
class DiscreteSampler {
 public:
  explicit DiscreteSampler(const Constellation& law) : points_(&law.points) {
    cdf_.reserve(law.probs.size());
    double acc = 0.0;
    for (double p : law.probs) {
      acc += p;
      cdf_.push_back(acc);
    }
    if (!cdf_.empty()) cdf_.back() = 1.0;
  }

  double operator()(Rng& rng) const {
    const double u = rng.uniform01();
    std::size_t lo = 0, hi = cdf_.size() - 1;
    while (lo < hi) {
      const std::size_t mid = (lo + hi) / 2;
      if (u <= cdf_[mid])
        hi = mid;
      else
        lo = mid + 1;
    }
    return (*points_)[lo];
  }

 private:
  const std::vector<double>* points_;
  std::vector<double> cdf_;
};

class FadingSampler {
 public:
  explicit FadingSampler(const FadingModel& fading) : fading_(&fading) {
    if (fading.is_discrete()) discrete_.emplace(fading.discrete_law());
  }

  double operator()(Rng& rng) const {
    if (discrete_) return (*discrete_)(rng);
    if (const auto* u = std::get_if<UniformInterval>(&fading_->law))
      return u->mean + u->half_width * (2.0 * rng.uniform01() - 1.0);
    const auto& g = std::get<GaussianLaw>(fading_->law);
    return g.mean + std::sqrt(g.variance) * rng.normal();
  }

 private:
  const FadingModel* fading_;
  std::optional<DiscreteSampler> discrete_;
};

}  // namespace wffd::detail
