#pragma once

#include <stdexcept>

namespace wffd {

// Raised when a request falls outside the supported model family (e.g. an
// odd PAM size for the region construction, or a continuous fading law
// where a discrete one is required).
class UnsupportedModelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Fading side-information available to the decoder.
enum class CsiMode { kNcsi, kRcsi };

// Channel noise variants: full N(0,1) draws, or the bounded residual left
// after snapping 2Z to the nearest integer (|z| <= 1/4).
enum class NoiseMode { kGaussian, kResidual };

inline const char* to_string(CsiMode m) { return m == CsiMode::kNcsi ? "ncsi" : "rcsi"; }
inline const char* to_string(NoiseMode m) { return m == NoiseMode::kGaussian ? "gaussian" : "residual"; }

}  // namespace wffd
