#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "wffd/channel.hpp"
#include "wffd/common.hpp"
#include "wffd/geometry.hpp"
#include "wffd/numerics.hpp"

namespace wffd {

enum class RateMethod { kAuto, kClosedForm, kQuadrature, kMonteCarlo };

struct RateResult {
  double rate = 0.0;  // bits per channel use, unclamped
  std::string method;
  // Combined quadrature tolerance + Monte Carlo standard error.
  double numeric_error = 0.0;
  long long samples_used = 0;
  bool negative = false;  // rate < 0 (inner bounds may dip below zero)
  std::string note;
};

struct RateOptions {
  IntegrationConfig quad{};
  // Tolerance for the outer integral of nested (two-level) quadratures.
  double nested_tol = 1e-7;
  // Sample budget for pure Monte Carlo estimators.
  long long mc_budget = 200000;
  // Number of fading draws when a continuous fading law is sampled.
  long long fading_samples = 8000;
  int batches = 40;  // batch count for batch-mean standard errors
  std::uint64_t seed = 0x77FFD0'2016ull;
  RateMethod method = RateMethod::kAuto;
};

// 0.5*log2(1 + P). Throws on P < 0.
double awgn_capacity(double P);

// 0.5*log2(1 + P*a^2*(k-1)^2 / (P + a^2 + 1)): the rate lost by precoding
// against k*a*S when the true gain is a and the state is Gaussian.
double gaussian_mismatch_loss(double P, double a, double k);

// Rate of the precoding auxiliary U = X + alpha*(k*c)*S, alpha = P/(P+1),
// X ~ N(0,P) independent of S, over Y = X + c*S + Z (no fading). A nullopt
// state means Gaussian S (closed form); discrete states are evaluated by
// nested quadrature or Monte Carlo per opts.method.
RateResult costa_mismatch_rate(const ChannelParams& params, double k,
                               const std::optional<Constellation>& state,
                               const RateOptions& opts = {});

// State-amplification rate with X ~ N(0,P) independent of S:
//   NCSI: h(Y) - h(Y|X,S) - H(S)
//   RCSI: E_A[h(Y|A)] - 0.5*log2(2*pi*e) - H(S)
// Discrete fading is enumerated exactly; continuous fading laws are sampled
// (opts.fading_samples draws) with batch-mean standard errors. The result is
// unclamped and flagged when negative.
RateResult state_amplification_rate(const ChannelParams& params, const Constellation& state,
                                    const FadingModel& fading, CsiMode mode,
                                    const RateOptions& opts = {});

struct OuterBoundResult {
  RateResult bound;
  double additive_constant = 0.0;  // 4 (NCSI) or 6 (RCSI)
  ConditionReport condition;       // validity of the separation condition
};

// state_amplification_rate + 4 (NCSI) or + 6 (RCSI). The bound template is
// evaluated at the fixed input family X ~ N(0,P); `condition` records
// whether the separation condition holds for this configuration.
OuterBoundResult outer_bound(const ChannelParams& params, const Constellation& state,
                             const FadingModel& fading, CsiMode mode,
                             const RateOptions& opts = {});

// --- input strategies (CLI-facing description of the transmit side) ---

struct GaussianInput {};
struct CostaPrecoding {
  double k = 1.0;
};
struct LinearCancel {
  double alpha = 1.0;  // in [0, 1]
  // State-to-cancellation map; empty means K(s) = -s. Must have zero mean
  // and unit variance under the state law (checked within 1e-9).
  std::function<double(double)> k_map;
};
struct DiscreteInput {
  Constellation constellation;
};
using InputStrategy = std::variant<GaussianInput, CostaPrecoding, LinearCancel, DiscreteInput>;

// Throws if a LinearCancel map is not zero-mean/unit-variance under `state`
// or alpha is outside [0,1].
void validate_strategy(const InputStrategy& strategy, const Constellation& state);

// I(Y;X|A) with X ~ N(0,P) independent of S (receiver knows A, transmitter
// ignores the state).
RateResult no_csit_gaussian_rate(const ChannelParams& params, const Constellation& state,
                                 const FadingModel& fading, const RateOptions& opts = {});

struct LinearCancelPoint {
  double alpha = 1.0;
  RateResult rate;
};

struct LinearCancelScan {
  std::vector<LinearCancelPoint> points;
  std::size_t best_index = 0;
  RateResult best;  // copy of points[best_index].rate with alpha in the note
};

// I(Y;X~|A) for X = sqrt(P)*(alpha*X~ - sqrt(1-alpha^2)*K(S)), X~ ~ N(0,1),
// swept over the alpha grid; the scan reuses one set of fading draws so
// alpha = 1 reproduces the Gaussian-input rate exactly.
LinearCancelScan linear_cancel_rate(const ChannelParams& params, const Constellation& state,
                                    const FadingModel& fading, std::span<const double> alphas,
                                    const RateOptions& opts = {},
                                    const std::function<double(double)>& k_map = {});

// Dispatches GaussianInput / LinearCancel (default alpha grid) per the
// strategy; other strategies are invalid here.
RateResult no_csit_rate(const ChannelParams& params, const Constellation& state,
                        const FadingModel& fading, const InputStrategy& strategy,
                        const RateOptions& opts = {});

struct IdentityResidual {
  double lhs = 0.0;  // I(Y;X,S|A) - H(S)
  double rhs = 0.0;  // I(Y;X|A) - H(S|X,A,Y)
};

// Both sides of I(Y;X,S|A) - H(S) = I(Y;X|A) - H(S|X,A,Y), computed by
// independent decompositions. Requires discrete state and discrete fading.
IdentityResidual identity_residual(const ChannelParams& params, const Constellation& state,
                                   const FadingModel& fading, const RateOptions& opts = {});

// Default sweep grid for linear-cancellation scans.
std::vector<double> default_alpha_grid();

}  // namespace wffd
