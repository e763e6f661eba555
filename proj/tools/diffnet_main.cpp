// diffnet command line tool: simulate panels, decompose estimated diffusion,
// run the step-down covariate selection, and drive Monte Carlo studies.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "diffnet/config.hpp"
#include "diffnet/estimate.hpp"
#include "diffnet/mc.hpp"
#include "diffnet/multitest.hpp"
#include "diffnet/simulate.hpp"

namespace {

using namespace diffnet;

std::vector<int> parse_columns(const std::string& spec) {
  std::vector<int> out;
  std::string tok;
  std::stringstream ss(spec);
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    const int v = std::stoi(tok);
    if (v < 1) throw InvalidConfig("column indices are 1-based");
    out.push_back(v - 1);
  }
  return out;
}

std::string join_columns(const std::vector<int>& cols) {
  std::string out;
  for (std::size_t i = 0; i < cols.size(); ++i) {
    if (i) out += ';';
    out += std::to_string(cols[i] + 1);
  }
  return out.empty() ? std::string("-") : out;
}

PanelData load_panel(const std::string& panel_path, const std::string& graph_path) {
  PanelData panel = read_panel_csv(panel_path);
  panel.observed = read_edge_list_csv(graph_path, panel.X.rows());
  return panel;
}

int cmd_simulate(const std::string& config_path, const std::string& out_dir,
                 std::uint64_t seed) {
  const KeyValueConfig kv = KeyValueConfig::parse_file(config_path);
  const DgpConfig cfg = dgp_from_config(kv);

  std::filesystem::create_directories(out_dir);
  const DgpRealization real = gen_dgp(cfg, RngStream(seed, mc_streams::kRealization));
  const PanelData panel =
      draw_panel(real, cfg, RngStream(seed, mc_streams::kReplication).derive(0));

  write_panel_csv(panel, out_dir + "/panel.csv");
  write_edge_list_csv(real.contact, out_dir + "/contact.csv");
  write_edge_list_csv(real.observed, out_dir + "/observed.csv");

  const GraphStats cs = stats(real.contact);
  const GraphStats os = stats(real.observed);
  std::printf("n=%d  contact: max_deg=%d avg_deg=%.4f cluster=%.4f\n", cfg.node_count(),
              cs.max_degree, cs.avg_degree, cs.clustering);
  std::printf("      observed: max_deg=%d avg_deg=%.4f cluster=%.4f\n", os.max_degree,
              os.avg_degree, os.clustering);
  std::printf("wrote panel.csv, contact.csv, observed.csv to %s\n", out_dir.c_str());
  return 0;
}

int cmd_decompose(const std::string& panel_path, const std::string& graph_path,
                  const std::vector<std::string>& s_specs, double level,
                  const std::string& out_path, const std::string& diag_path) {
  const PanelData panel = load_panel(panel_path, graph_path);
  const ProbitFit fit_full = probit_fit(panel.X, panel.y0);

  std::ostringstream csv;
  csv << "S,C_hat_S,C_hat_empty,Delta_hat,sigma_hat,ci_low,ci_high,clamp_flag\n";
  nlohmann::ordered_json diag = nlohmann::ordered_json::array();
  for (const std::string& spec : s_specs) {
    const std::vector<int> omit = parse_columns(spec);
    const DecompResult res = decompose(panel, omit, level, fit_full);
    char row[512];
    std::snprintf(row, sizeof(row), "%s,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%d\n",
                  join_columns(res.omitted).c_str(), res.c_hat_s, res.c_hat_empty, res.delta,
                  res.sigma_hat, res.ci_low, res.ci_high, res.sigma_clamped ? 1 : 0);
    csv << row;

    const OverlapReport overlap = overlap_diagnostic(fit_full, 0.005);
    nlohmann::ordered_json j;
    j["S"] = join_columns(res.omitted);
    j["level"] = res.level;
    j["iterations_full"] = res.iterations_full;
    j["iterations_omit"] = res.iterations_omit;
    j["sigma2_raw"] = res.sigma2_raw;
    j["sigma_clamped"] = res.sigma_clamped;
    j["overlap_threshold"] = overlap.threshold;
    j["overlap_flagged"] = overlap.flagged;
    diag.push_back(j);
  }

  if (out_path.empty()) {
    std::cout << csv.str();
  } else {
    std::ofstream out(out_path);
    if (!out) throw IoError("cannot open " + out_path);
    out << csv.str();
  }
  if (!diag_path.empty()) {
    std::ofstream out(diag_path);
    if (!out) throw IoError("cannot open " + diag_path);
    out << diag.dump(2) << '\n';
  }
  return 0;
}

int cmd_stepdown(const std::string& panel_path, const std::string& graph_path,
                 const std::string& family_spec, double alpha, int draws, std::uint64_t seed,
                 const std::string& out_path) {
  const PanelData panel = load_panel(panel_path, graph_path);
  const int n = panel.X.rows();
  const int p = panel.X.cols();

  std::vector<int> family;
  if (family_spec.empty()) {
    for (int c = 1; c < p; ++c) family.push_back(c);
  } else {
    family = parse_columns(family_spec);
  }

  const ProbitFit fit_full = probit_fit(panel.X, panel.y0);
  std::vector<InfluenceSet> infs;
  Vector deltas;
  for (int s : family) {
    std::vector<int> keep;
    for (int c = 0; c < p; ++c)
      if (c != s) keep.push_back(c);
    Matrix design(n, static_cast<int>(keep.size()));
    for (int i = 0; i < n; ++i)
      for (std::size_t c = 0; c < keep.size(); ++c) design(i, c) = panel.X(i, keep[c]);
    ProbitFit fit_omit = probit_fit(design, panel.y0);
    fit_omit.columns = keep;
    deltas.push_back(delta_hat(panel.observed, panel.y1, fit_full, fit_omit));
    infs.push_back(influence(panel.observed, panel.X, panel.y0, panel.y1, fit_full, fit_omit));
  }
  const SymMatrix omega = omega_hat(panel.observed, infs);
  const StepDownResult res = stepdown(deltas, omega, n, alpha, draws, RngStream(seed, 1));

  nlohmann::ordered_json j;
  j["alpha"] = res.alpha;
  j["draws"] = res.draws;
  nlohmann::ordered_json selected = nlohmann::ordered_json::array();
  for (int pos : res.selected) selected.push_back(family[pos] + 1);
  j["selected_columns"] = selected;
  nlohmann::ordered_json per_s = nlohmann::ordered_json::array();
  for (std::size_t k = 0; k < family.size(); ++k) {
    per_s.push_back({{"column", family[k] + 1},
                     {"delta_hat", deltas[k]},
                     {"sigma", res.sigma[k]},
                     {"statistic", res.statistics[k]}});
  }
  j["hypotheses"] = per_s;
  nlohmann::ordered_json trace = nlohmann::ordered_json::array();
  for (const StepDownIteration& it : res.trace) {
    nlohmann::ordered_json cols = nlohmann::ordered_json::array();
    for (int pos : it.active) cols.push_back(family[pos] + 1);
    trace.push_back({{"retained_columns", cols},
                     {"critical_raw", it.critical_raw},
                     {"critical_used", it.critical_used}});
  }
  j["trace"] = trace;

  if (out_path.empty()) {
    std::cout << j.dump(2) << '\n';
  } else {
    std::ofstream out(out_path);
    if (!out) throw IoError("cannot open " + out_path);
    out << j.dump(2) << '\n';
  }
  return 0;
}

int cmd_mc(const std::string& config_path, const std::string& out_dir, int reps_override,
           std::int64_t seed_override, int threads, const std::string& format) {
  const KeyValueConfig kv = KeyValueConfig::parse_file(config_path);
  Scenario base = scenario_from_config(kv);
  if (reps_override > 0) base.replications = reps_override;
  if (seed_override >= 0) base.master_seed = static_cast<std::uint64_t>(seed_override);

  // alpha / delta0 may be comma lists; the grid expands to one cell each.
  const std::vector<double> alphas = kv.get_doubles("alpha", {base.cfg.alpha});
  const std::vector<double> delta0s = kv.get_doubles("delta0", {base.cfg.delta0});

  std::vector<McReport> reports;
  for (double d0 : delta0s) {
    for (double a : alphas) {
      Scenario cell = base;
      cell.cfg.delta0 = d0;
      cell.cfg.alpha = a;
      char suffix[64];
      std::snprintf(suffix, sizeof(suffix), "_d%g_a%g", d0, a);
      cell.name = base.name + suffix;
      std::fprintf(stderr, "running %s (n=%d, reps=%d)...\n", cell.name.c_str(),
                   cell.cfg.node_count(), cell.replications);
      reports.push_back(run_scenario(cell, threads));
    }
  }
  emit_tables(reports, out_dir, format);
  std::printf("wrote %zu scenario cells to %s\n", reports.size(), out_dir.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Diffusion decomposition over large networks"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out", panel_path, graph_path;
  std::string out_path, diag_path, family_spec;
  std::vector<std::string> s_specs;
  double level = 0.95, alpha = 0.05;
  int draws = 10000, reps = -1, threads = 1;
  std::int64_t seed = -1;
  std::uint64_t sim_seed = 1;
  std::string format = "csv";

  CLI::App* sim = app.add_subcommand("simulate", "Generate a panel from the diffusion DGP");
  sim->add_option("--config", config_path, "key = value DGP config")->required();
  sim->add_option("--out", out_dir, "output directory");
  sim->add_option("--seed", sim_seed, "master seed");

  auto add_decompose_like = [&](const char* name, const char* help) {
    CLI::App* c = app.add_subcommand(name, help);
    c->add_option("--panel", panel_path, "panel CSV (x1..xp,y0,y1)")->required();
    c->add_option("--graph", graph_path, "observed-graph edge list CSV")->required();
    c->add_option("--s", s_specs, "omitted columns, 1-based, comma separated (repeatable)")
        ->required();
    c->add_option("--level", level, "confidence level (default 0.95)");
    c->add_option("--out", out_path, "result CSV path (default: stdout)");
    c->add_option("--diagnostics", diag_path, "JSON diagnostics path");
    return c;
  };
  CLI::App* dec = add_decompose_like("decompose", "Decompose estimated diffusion for sets S");
  CLI::App* est = add_decompose_like("estimate", "Alias of decompose");

  CLI::App* sd = app.add_subcommand("stepdown", "Select covariates causing spurious diffusion");
  sd->add_option("--panel", panel_path, "panel CSV (x1..xp,y0,y1)")->required();
  sd->add_option("--graph", graph_path, "observed-graph edge list CSV")->required();
  sd->add_option("--family", family_spec, "candidate columns, 1-based (default: 2..p)");
  sd->add_option("--alpha", alpha, "FWER level (default 0.05)");
  sd->add_option("--B", draws, "simulation draws per critical value (default 10000)");
  sd->add_option("--seed", sim_seed, "master seed");
  sd->add_option("--out", out_path, "JSON output path (default: stdout)");

  CLI::App* mc = app.add_subcommand("mc", "Monte Carlo study over a scenario grid");
  mc->add_option("--config", config_path, "scenario config; alpha/delta0 may be lists")
      ->required();
  mc->add_option("--out", out_dir, "output directory");
  mc->add_option("--reps", reps, "override replication count");
  mc->add_option("--seed", seed, "override master seed");
  mc->add_option("--threads", threads, "worker threads");
  mc->add_option("--format", format, "table format: csv or markdown");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) return cmd_simulate(config_path, out_dir, sim_seed);
    if (dec->parsed() || est->parsed())
      return cmd_decompose(panel_path, graph_path, s_specs, level, out_path, diag_path);
    if (sd->parsed())
      return cmd_stepdown(panel_path, graph_path, family_spec, alpha, draws, sim_seed, out_path);
    if (mc->parsed()) return cmd_mc(config_path, out_dir, reps, seed, threads, format);
  } catch (const diffnet::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
