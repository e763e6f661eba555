#include "diffnet/mc.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "diffnet/multitest.hpp"
#include "diffnet/parallel.hpp"

namespace diffnet {

namespace {

using mc_streams::kAdmOracle;
using mc_streams::kDeltaOracle;
using mc_streams::kRealization;
using mc_streams::kReplication;

struct RepOutcome {
  bool ok = false;
  double c_hat_empty = 0.0;
  double delta = 0.0;
  bool clamped = false;
  std::vector<double> length;   // per level
  std::vector<char> covered;    // per level
  std::uint64_t selected_mask = 0;
};

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

double lower_median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  return v[(v.size() - 1) / 2];
}

}  // namespace

void Scenario::validate() const {
  cfg.validate();
  if (replications < 1) throw InvalidConfig("replications must be at least 1");
  if (oracle_draws < 1) throw InvalidConfig("oracle_draws must be at least 1");
  if (ci_levels.empty()) throw InvalidConfig("at least one confidence level required");
  for (double l : ci_levels)
    if (!(l > 0.0 && l < 1.0)) throw InvalidConfig("confidence level outside (0,1)");
  for (int s : s_omitted)
    if (s < 0 || s >= cfg.p) throw InvalidConfig("omitted column out of range");
  if (static_cast<int>(s_omitted.size()) >= cfg.p)
    throw InvalidConfig("cannot omit every column");
  for (int s : family)
    if (s < 0 || s >= cfg.p) throw InvalidConfig("family column out of range");
  if (family.size() > 64) throw InvalidConfig("family larger than 64 not supported");
  for (int s : null_covariates)
    if (std::find(family.begin(), family.end(), s) == family.end() && !family.empty())
      throw InvalidConfig("null covariate not in family");
  if (!(stepdown_alpha > 0.0 && stepdown_alpha < 1.0))
    throw InvalidConfig("stepdown alpha outside (0,1)");
  if (stepdown_draws < 100) throw InvalidConfig("stepdown draws below 100");
}

McReport run_scenario(const Scenario& sc, int threads) {
  sc.validate();
  const std::uint64_t seed = sc.master_seed;

  std::vector<int> family = sc.family;
  if (family.empty()) {
    for (int c = 1; c < sc.cfg.p; ++c) family.push_back(c);
  }

  McReport report;
  report.name = sc.name;
  report.n = sc.cfg.node_count();
  report.delta0 = sc.cfg.delta0;
  report.alpha_mix = sc.cfg.alpha;
  report.ci_levels = sc.ci_levels;
  report.family = family;

  const DgpRealization real = gen_dgp(sc.cfg, RngStream(seed, kRealization));
  report.contact_stats = stats(real.contact);
  report.observed_stats = stats(real.observed);

  const OracleEstimate adm =
      adm_oracle(real.contact, real.X, sc.cfg.gamma0, sc.cfg.beta0, sc.cfg.delta0, sc.cfg.t1,
                 sc.oracle_draws, RngStream(seed, kAdmOracle), threads);
  report.true_adm = adm.value;
  report.true_adm_se = adm.std_error;

  const DecompTruth truth =
      delta_oracle(real.contact, real.observed, real.X, sc.cfg.gamma0, sc.cfg.beta0,
                   sc.cfg.delta0, sc.cfg.t1, sc.s_omitted, sc.oracle_draws,
                   RngStream(seed, kDeltaOracle), threads);
  report.true_delta = truth.delta_s.value;
  report.true_delta_se = truth.delta_s.std_error;

  const int reps = sc.replications;
  const int n_levels = static_cast<int>(sc.ci_levels.size());
  std::vector<RepOutcome> slots(reps);
  const RngStream rep_base(seed, kReplication);

  parallel_ranges(reps, threads, [&](std::int64_t begin, std::int64_t end) {
    for (std::int64_t r = begin; r < end; ++r) {
      RepOutcome& slot = slots[r];
      RngStream rep_stream = rep_base.derive(static_cast<std::uint64_t>(r));
      try {
        const PanelData panel = draw_panel(real, sc.cfg, rep_stream);
        const ProbitFit fit_full = probit_fit(panel.X, panel.y0);

        const DecompResult dec = decompose(panel, sc.s_omitted, sc.ci_levels.front(), fit_full);
        slot.c_hat_empty = dec.c_hat_empty;
        slot.delta = dec.delta;
        slot.clamped = dec.sigma_clamped;
        slot.length.resize(n_levels);
        slot.covered.resize(n_levels);
        for (int l = 0; l < n_levels; ++l) {
          const ConfInterval ci =
              confidence_interval(dec.delta, dec.sigma_hat, report.n, 1.0 - sc.ci_levels[l]);
          slot.length[l] = ci.high - ci.low;
          slot.covered[l] =
              static_cast<char>(ci.low <= report.true_delta && report.true_delta <= ci.high);
        }

        // Per-covariate singleton decompositions feed the step-down test.
        std::vector<InfluenceSet> inf_by_s;
        Vector deltas;
        inf_by_s.reserve(family.size());
        for (int s : family) {
          std::vector<int> omit{s};
          std::vector<int> keep;
          for (int c = 0; c < panel.X.cols(); ++c)
            if (c != s) keep.push_back(c);
          Matrix design(panel.X.rows(), static_cast<int>(keep.size()));
          for (int i = 0; i < panel.X.rows(); ++i)
            for (std::size_t c = 0; c < keep.size(); ++c) design(i, c) = panel.X(i, keep[c]);
          ProbitFit fit_omit = probit_fit(design, panel.y0);
          fit_omit.columns = keep;
          deltas.push_back(delta_hat(panel.observed, panel.y1, fit_full, fit_omit));
          inf_by_s.push_back(
              influence(panel.observed, panel.X, panel.y0, panel.y1, fit_full, fit_omit));
        }
        const SymMatrix omega = omega_hat(panel.observed, inf_by_s);
        const StepDownResult sd = stepdown(deltas, omega, report.n, sc.stepdown_alpha,
                                           sc.stepdown_draws, rep_stream.derive(3));
        for (int pos : sd.selected) slot.selected_mask |= (1ULL << pos);
        slot.ok = true;
      } catch (const Error&) {
        slot.ok = false;
      }
    }
  });

  // Fixed-order reduction over the slots.
  int done = 0;
  double sum_c = 0.0, sum_d = 0.0;
  int clamp_count = 0;
  std::vector<std::vector<double>> lengths(n_levels);
  std::vector<int> covers(n_levels, 0);
  std::vector<int> select_counts(family.size(), 0);
  int fwer_count = 0;

  std::uint64_t null_mask = 0;
  for (int s : sc.null_covariates) {
    const auto it = std::find(family.begin(), family.end(), s);
    if (it != family.end()) null_mask |= (1ULL << (it - family.begin()));
  }

  for (const RepOutcome& slot : slots) {
    if (!slot.ok) continue;
    ++done;
    sum_c += slot.c_hat_empty;
    sum_d += slot.delta;
    clamp_count += slot.clamped ? 1 : 0;
    for (int l = 0; l < n_levels; ++l) {
      lengths[l].push_back(slot.length[l]);
      covers[l] += slot.covered[l] ? 1 : 0;
    }
    for (std::size_t k = 0; k < family.size(); ++k)
      if (slot.selected_mask & (1ULL << k)) ++select_counts[k];
    if (slot.selected_mask & null_mask) ++fwer_count;
  }

  report.replications_done = done;
  report.failures = reps - done;
  if (done > 0) {
    report.mean_est_adm = sum_c / done;
    report.mean_delta_hat = sum_d / done;
    report.sigma_clamp_rate = static_cast<double>(clamp_count) / done;
    for (int l = 0; l < n_levels; ++l) {
      report.coverage.push_back(static_cast<double>(covers[l]) / done);
      report.median_ci_length.push_back(lower_median(lengths[l]));
    }
    for (std::size_t k = 0; k < family.size(); ++k)
      report.select_rate.push_back(static_cast<double>(select_counts[k]) / done);
    if (!sc.null_covariates.empty())
      report.fwer = static_cast<double>(fwer_count) / done;
  }
  return report;
}

void emit_tables(const std::vector<McReport>& reports, const std::string& out_dir,
                 const std::string& format) {
  if (format != "csv" && format != "markdown") throw InvalidConfig("format must be csv or markdown");
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir);
  const bool md = format == "markdown";
  const std::string ext = md ? ".md" : ".csv";

  auto open = [&](const std::string& stem) {
    std::ofstream out(out_dir + "/" + stem + ext);
    if (!out) throw IoError("cannot open " + out_dir + "/" + stem + ext);
    return out;
  };
  auto write_row = [&](std::ofstream& out, const std::vector<std::string>& cells) {
    if (md) {
      out << "|";
      for (const auto& c : cells) out << ' ' << c << " |";
      out << '\n';
    } else {
      for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
      out << '\n';
    }
  };
  auto write_header = [&](std::ofstream& out, const std::vector<std::string>& cells) {
    write_row(out, cells);
    if (md) {
      out << "|";
      for (std::size_t i = 0; i < cells.size(); ++i) out << " --- |";
      out << '\n';
    }
  };

  {
    std::ofstream out = open("table1_graphs");
    write_header(out, {"scenario", "n", "delta0", "alpha", "graph", "max_degree", "avg_degree",
                       "clustering"});
    for (const auto& r : reports) {
      write_row(out, {r.name, std::to_string(r.n), fmt(r.delta0), fmt(r.alpha_mix), "contact",
                      std::to_string(r.contact_stats.max_degree), fmt(r.contact_stats.avg_degree),
                      fmt(r.contact_stats.clustering)});
      write_row(out, {r.name, std::to_string(r.n), fmt(r.delta0), fmt(r.alpha_mix), "observed",
                      std::to_string(r.observed_stats.max_degree),
                      fmt(r.observed_stats.avg_degree), fmt(r.observed_stats.clustering)});
    }
  }

  {
    std::ofstream out = open("table2_truth");
    write_header(out, {"scenario", "n", "delta0", "alpha", "true_adm", "true_adm_se", "true_delta",
                       "true_delta_se"});
    for (const auto& r : reports) {
      write_row(out, {r.name, std::to_string(r.n), fmt(r.delta0), fmt(r.alpha_mix),
                      fmt(r.true_adm), fmt(r.true_adm_se), fmt(r.true_delta),
                      fmt(r.true_delta_se)});
    }
  }

  {
    std::ofstream out = open("table3_coverage");
    std::vector<std::string> header{"scenario", "n", "delta0", "alpha", "mean_est_adm",
                                    "mean_delta_hat"};
    const std::vector<double> levels =
        reports.empty() ? std::vector<double>{} : reports.front().ci_levels;
    for (double l : levels) header.push_back("cov" + std::to_string(std::lround(l * 100)));
    for (double l : levels) header.push_back("len" + std::to_string(std::lround(l * 100)));
    header.insert(header.end(), {"clamp_rate", "reps", "failures"});
    write_header(out, header);
    for (const auto& r : reports) {
      std::vector<std::string> row{r.name, std::to_string(r.n), fmt(r.delta0), fmt(r.alpha_mix),
                                   fmt(r.mean_est_adm), fmt(r.mean_delta_hat)};
      for (double c : r.coverage) row.push_back(fmt(c));
      for (double l : r.median_ci_length) row.push_back(fmt(l));
      row.push_back(fmt(r.sigma_clamp_rate));
      row.push_back(std::to_string(r.replications_done));
      row.push_back(std::to_string(r.failures));
      write_row(out, row);
    }
  }

  nlohmann::ordered_json root = nlohmann::ordered_json::array();
  for (const auto& r : reports) {
    nlohmann::ordered_json j;
    j["scenario"] = r.name;
    j["n"] = r.n;
    j["delta0"] = r.delta0;
    j["alpha"] = r.alpha_mix;
    j["contact"] = {{"max_degree", r.contact_stats.max_degree},
                    {"avg_degree", r.contact_stats.avg_degree},
                    {"clustering", r.contact_stats.clustering}};
    j["observed"] = {{"max_degree", r.observed_stats.max_degree},
                     {"avg_degree", r.observed_stats.avg_degree},
                     {"clustering", r.observed_stats.clustering}};
    j["true_adm"] = r.true_adm;
    j["true_adm_se"] = r.true_adm_se;
    j["true_delta"] = r.true_delta;
    j["true_delta_se"] = r.true_delta_se;
    j["mean_est_adm"] = r.mean_est_adm;
    j["mean_delta_hat"] = r.mean_delta_hat;
    j["ci_levels"] = r.ci_levels;
    j["coverage"] = r.coverage;
    j["median_ci_length"] = r.median_ci_length;
    j["sigma_clamp_rate"] = r.sigma_clamp_rate;
    nlohmann::ordered_json fam = nlohmann::ordered_json::array();
    for (std::size_t k = 0; k < r.family.size(); ++k) {
      fam.push_back({{"column", r.family[k] + 1},
                     {"select_rate", k < r.select_rate.size() ? r.select_rate[k] : 0.0}});
    }
    j["stepdown_family"] = fam;
    if (r.fwer >= 0.0) j["fwer"] = r.fwer;
    j["replications_done"] = r.replications_done;
    j["failures"] = r.failures;
    root.push_back(j);
  }
  std::ofstream jout(out_dir + "/report.json");
  if (!jout) throw IoError("cannot open report.json");
  jout << root.dump(2) << '\n';
}

}  // namespace diffnet
