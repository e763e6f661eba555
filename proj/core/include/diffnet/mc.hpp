#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "diffnet/estimate.hpp"
#include "diffnet/simulate.hpp"

namespace diffnet {

// Stream ids used by run_scenario, exposed so a single replication can be
// reproduced outside the harness: the realization uses
// RngStream(master_seed, kRealization), oracles their own streams, and
// replication r uses RngStream(master_seed, kReplication).derive(r).
namespace mc_streams {
inline constexpr std::uint64_t kRealization = 0xd1f0001;
inline constexpr std::uint64_t kAdmOracle = 0xd1f0002;
inline constexpr std::uint64_t kDeltaOracle = 0xd1f0003;
inline constexpr std::uint64_t kReplication = 0xd1f0004;
}  // namespace mc_streams

// One Monte Carlo cell: networks and covariates are realized once, outcomes
// are redrawn per replication.
struct Scenario {
  std::string name;
  DgpConfig cfg;
  std::vector<int> s_omitted;                  // 0-based columns omitted in the decomposition
  int replications = 1000;
  std::vector<double> ci_levels{0.99, 0.95, 0.90};
  int oracle_draws = 100000;
  std::uint64_t master_seed = 1;
  double stepdown_alpha = 0.05;
  int stepdown_draws = 10000;
  std::vector<int> family;                     // step-down family; default: non-constant columns
  std::vector<int> null_covariates;            // family members with true delta_s == 0, if known

  void validate() const;
};

struct McReport {
  std::string name;
  int n = 0;
  double delta0 = 0.0;
  double alpha_mix = 0.0;
  GraphStats contact_stats;
  GraphStats observed_stats;

  double true_adm = 0.0, true_adm_se = 0.0;
  double true_delta = 0.0, true_delta_se = 0.0;

  double mean_est_adm = 0.0;     // mean of C_hat_empty across replications
  double mean_delta_hat = 0.0;

  std::vector<double> ci_levels;
  std::vector<double> coverage;          // per level, fraction covering true_delta
  std::vector<double> median_ci_length;  // per level, lower-median convention

  double sigma_clamp_rate = 0.0;
  std::vector<int> family;
  std::vector<double> select_rate;       // per family member, fraction of reps in S_hat
  double fwer = -1.0;                    // fraction with a null covariate selected; -1 if n/a

  int replications_done = 0;
  int failures = 0;
};

// Runs one scenario: realize networks and covariates, compute oracle truths,
// loop replications (failures are excluded from aggregates but counted), and
// aggregate. Replication r uses streams keyed by (master_seed, r); results
// land in indexed slots, so the report is byte-identical for any thread
// count.
McReport run_scenario(const Scenario& sc, int threads = 1);

// Writes table1_graphs, table2_truth, table3_coverage (as .csv or .md) plus
// report.json into out_dir. Column order is fixed and documented in the
// README; identical reports yield byte-identical files.
void emit_tables(const std::vector<McReport>& reports, const std::string& out_dir,
                 const std::string& format);

}  // namespace diffnet
