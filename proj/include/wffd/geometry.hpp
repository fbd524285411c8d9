#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wffd/channel.hpp"
#include "wffd/common.hpp"

namespace wffd {

// Which minimand variant to use for the NCSI separation check. The operative
// form applies the gain c to both fading-times-state products; the display
// form leaves the second product bare and is kept for comparison.
enum class MinimandForm { kGainBothProducts, kGainFirstProductOnly };

struct ConditionWitness {
  long long i = 0;
  double s = 0.0;
  double a = 0.0;
  double s_tilde = 0.0;
  double a_tilde = 0.0;
};

struct ConditionReport {
  double min_gap = 0.0;
  bool satisfied = false;  // min_gap > 1/2, ties count as unsatisfied
  ConditionWitness witness;
  CsiMode mode = CsiMode::kNcsi;
  std::string note;  // nonempty when the model is unsupported (e.g. Gaussian fading)
};

// Minimum of |i + c*(a*s - a~*s~)| over integers i in [-2*ceil(sqrt(P)),
// +2*ceil(sqrt(P))], ordered state pairs s > s~, and fading values a, a~.
// Discrete fading is enumerated exactly; uniform-interval fading is handled
// interval-aware (zero if the affine minimand changes sign inside the box,
// otherwise the minimum over the box corners). Gaussian fading is reported
// as min_gap = 0 with an explanatory note: unbounded support can never
// satisfy the condition.
ConditionReport ncsi_min_gap(const ChannelParams& params, const Constellation& state,
                             const FadingModel& fading,
                             MinimandForm form = MinimandForm::kGainBothProducts);

// Minimum of |i - c*a*(s - s~)| over i in [-2*floor(sqrt(P)),
// +2*floor(sqrt(P))], ordered state pairs, and a single fading value a.
ConditionReport rcsi_min_gap(const ChannelParams& params, const Constellation& state,
                             const FadingModel& fading);

// Re-evaluates the minimand at a witness tuple (used by tests and the
// witness-consistency invariant).
double ncsi_minimand(double c, const ConditionWitness& w,
                     MinimandForm form = MinimandForm::kGainBothProducts);
double rcsi_minimand(double c, const ConditionWitness& w);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

struct PamRegion {
  long long input = 0;     // integer channel input i
  int state_index = 0;     // index into make_pam(m).points
  double state_point = 0;  // the PAM point itself
  Interval interval;
};

// Output-space image of each (integer input, PAM state) pair under
// standardized uniform fading a in [mu_A - sqrt(3), mu_A + sqrt(3)]:
// the interval i + c*s*(mu_A -+ sqrt(3)) with endpoints ordered. Inputs
// range over [-floor(sqrt(P)), +floor(sqrt(P))]. m must be even.
std::vector<PamRegion> pam_uniform_regions(const ChannelParams& params, double c, int m,
                                           double mu_A);

// Minimum separation over all pairs after sorting by lower endpoint;
// 0 if any two intervals overlap. Throws with fewer than 2 intervals.
double min_region_gap(std::span<const Interval> regions);

struct RegionGapResult {
  double gap = 0.0;
  // Present when the sorted intervals match the lexicographic (input, state)
  // order; derived from the interval construction and must match `gap`.
  std::optional<double> closed_form;
  bool ordered_premise = false;
};

// Generic sweep plus the ordered-case closed form for regions produced by
// pam_uniform_regions with the same (c, m, mu_A).
RegionGapResult pam_region_gap(const std::vector<PamRegion>& regions, double c, int m,
                               double mu_A);

}  // namespace wffd
