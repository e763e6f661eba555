#pragma once

#include <vector>

#include "diffnet/numkit.hpp"
#include "diffnet/rng.hpp"

namespace diffnet {

// Simulated critical value: the ceil((1-alpha)*B)-th order statistic of
// W_b = max_{s in active} |(Omega_active^{1/2} Z_b)_s| / sigma_s over B iid
// standard normal vectors Z_b. `active` indexes rows of omega / sigma_diag.
// Requires B >= 100 and sigma_diag > 0 on the active set.
double critical_value(const SymMatrix& omega, const Vector& sigma_diag,
                      const std::vector<int>& active, double alpha, int B, RngStream rng);

struct StepDownIteration {
  std::vector<int> active;     // R_t before this iteration's test
  double critical_raw = 0.0;   // simulated percentile for this subset
  double critical_used = 0.0;  // after monotone enforcement across iterations
};

struct StepDownResult {
  std::vector<int> selected;        // S_hat: hypotheses rejected at the fixed point
  std::vector<int> retained;        // final R_t
  std::vector<double> statistics;   // sqrt(n) |delta_s| / sigma_s
  std::vector<double> sigma;        // clamped per-coordinate sigma_s
  std::vector<StepDownIteration> trace;
  int draws = 0;
  double alpha = 0.0;
};

// Step-down selection of the coordinates with delta_s != 0, controlling the
// familywise error rate at alpha asymptotically. Starts from the full set,
// recomputes the critical value on the retained set, and stops at a fixed
// point; at most p iterations. Critical values are enforced non-increasing
// across iterations, and each subset's draws come from a child stream keyed
// by the subset, so the whole recursion is reproducible.
StepDownResult stepdown(const Vector& delta_hats, const SymMatrix& omega, int n,
                        double alpha, int B, RngStream rng);

}  // namespace diffnet
