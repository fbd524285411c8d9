#pragma once

#include <string>
#include <vector>

#include "wffd/common.hpp"

namespace wffd {

// P[Z in (i/2 - 1/4, i/2 + 1/4)] for Z ~ N(0,1): the mass of the i-th bin of
// the half-integer quantizer round(2Z)/2. Throws on i < 0.
double rho_z(long long i);

// Probability masses of round(2Z)/2 for i = 0, 1, 2, ... until the remaining
// tail mass drops below 1e-15. Total mass = pmf[0] + 2*sum_{i>=1} pmf[i].
std::vector<double> quantized_noise_pmf();

// H(round(2Z)/2) in bits. Stays below 4.
double quantized_noise_entropy();

// Pieces of the quantizer entropy next to the corresponding claimed
// constants (0.54 + 2.14 + 1.21 <= 4). Reported side by side without any
// tolerance: the stated decomposition does not add up exactly, and the
// claimed tail value over-covers the exact tail sum.
struct QuantizerEntropyTerms {
  double center = 0.0;   // -p0*log2(p0)                  (claimed 0.54)
  double near = 0.0;     // sum over |i| in 1..3          (claimed 2.14)
  double tail = 0.0;     // sum over |i| >= 4             (claimed 1.21)
  double total = 0.0;    // center + near + tail          (claimed <= 4)
  double claimed_center = 0.54;
  double claimed_near = 2.14;
  double claimed_tail = 1.21;
  double claimed_total = 4.0;
  bool tail_over_covered = false;  // claimed_tail >= tail
};

QuantizerEntropyTerms quantized_noise_entropy_terms();

// 0.5*log2(3): the per-symbol cost of restricting the input to integers.
double integer_restriction_gap();

struct GapBreakdown {
  double integer_restriction = 0.0;
  double peak_restriction = 0.0;  // claimed residual, not recomputed here
  double quantized_noise_entropy = 0.0;
  double additive_constant = 0.0;  // 4 (NCSI) or 6 (RCSI)
  double total_claimed = 0.0;      // 15 (NCSI) or 6 (RCSI)
  CsiMode mode = CsiMode::kNcsi;
  std::string note;  // discrepancies between component sums and claimed totals
};

GapBreakdown gap_breakdown(CsiMode mode);

}  // namespace wffd
