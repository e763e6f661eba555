#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "diffnet/config.hpp"
#include "diffnet/estimate.hpp"
#include "diffnet/mc.hpp"

using namespace diffnet;

namespace {

Scenario small_scenario() {
  Scenario sc;
  sc.name = "smoke";
  sc.cfg.n_villages = 2;
  sc.cfg.village_size = 30;
  sc.cfg.ba.seed_size = 20;
  sc.s_omitted = {2};
  sc.replications = 5;
  sc.oracle_draws = 400;
  sc.master_seed = 99;
  sc.stepdown_draws = 200;
  return sc;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("scenario validation") {
  Scenario sc = small_scenario();
  CHECK_NOTHROW(sc.validate());
  sc.replications = 0;
  CHECK_THROWS_AS(sc.validate(), InvalidConfig);
  sc = small_scenario();
  sc.ci_levels = {1.2};
  CHECK_THROWS_AS(sc.validate(), InvalidConfig);
  sc = small_scenario();
  sc.s_omitted = {0, 1, 2, 3};
  CHECK_THROWS_AS(sc.validate(), InvalidConfig);
  sc = small_scenario();
  sc.family = {7};
  CHECK_THROWS_AS(sc.validate(), InvalidConfig);
}

TEST_CASE("run_scenario smoke and field sanity") {
  const Scenario sc = small_scenario();
  const McReport rep = run_scenario(sc, 2);
  CHECK(rep.n == 60);
  CHECK(rep.replications_done + rep.failures == sc.replications);
  REQUIRE(rep.coverage.size() == sc.ci_levels.size());
  for (double c : rep.coverage) {
    CHECK(c >= 0.0);
    CHECK(c <= 1.0);
  }
  for (double l : rep.median_ci_length) CHECK(l >= 0.0);
  CHECK(rep.family == std::vector<int>{1, 2, 3});
  REQUIRE(rep.select_rate.size() == 3);
  CHECK(rep.fwer == -1.0);  // no declared nulls
  CHECK(rep.contact_stats.avg_degree > 0.0);
}

TEST_CASE("one replication reproduces the single-run estimates") {
  Scenario sc = small_scenario();
  sc.replications = 1;
  const McReport rep = run_scenario(sc, 1);

  const DgpRealization real = gen_dgp(sc.cfg, RngStream(sc.master_seed, mc_streams::kRealization));
  const RngStream rep_base(sc.master_seed, mc_streams::kReplication);
  const PanelData panel = draw_panel(real, sc.cfg, rep_base.derive(0));
  const DecompResult dec = decompose(panel, sc.s_omitted, sc.ci_levels.front());

  REQUIRE(rep.replications_done == 1);
  CHECK(rep.mean_est_adm == dec.c_hat_empty);
  CHECK(rep.mean_delta_hat == dec.delta);
}

TEST_CASE("reports are identical for any worker count") {
  const Scenario sc = small_scenario();
  const McReport a = run_scenario(sc, 1);
  const McReport b = run_scenario(sc, 2);

  CHECK(a.true_adm == b.true_adm);
  CHECK(a.true_delta == b.true_delta);
  CHECK(a.mean_est_adm == b.mean_est_adm);
  CHECK(a.mean_delta_hat == b.mean_delta_hat);
  CHECK(a.coverage == b.coverage);
  CHECK(a.median_ci_length == b.median_ci_length);
  CHECK(a.select_rate == b.select_rate);
  CHECK(a.sigma_clamp_rate == b.sigma_clamp_rate);
  CHECK(a.failures == b.failures);
}

TEST_CASE("emit_tables writes headers for an empty report list") {
  const std::string dir =
      std::filesystem::temp_directory_path().string() + "/diffnet_mc_empty";
  emit_tables({}, dir, "csv");
  CHECK(slurp(dir + "/table1_graphs.csv") ==
        "scenario,n,delta0,alpha,graph,max_degree,avg_degree,clustering\n");
  CHECK(slurp(dir + "/table2_truth.csv") ==
        "scenario,n,delta0,alpha,true_adm,true_adm_se,true_delta,true_delta_se\n");
  CHECK(slurp(dir + "/table3_coverage.csv") ==
        "scenario,n,delta0,alpha,mean_est_adm,mean_delta_hat,clamp_rate,reps,failures\n");
  CHECK(slurp(dir + "/report.json") == "[]\n");
}

TEST_CASE("emit_tables golden fixture") {
  McReport r;
  r.name = "fix";
  r.n = 100;
  r.delta0 = 0.5;
  r.alpha_mix = 1.0;
  r.contact_stats = {4, 1.25, 0.125};
  r.observed_stats = {8, 2.5, 0.25};
  r.true_adm = 0.0375;
  r.true_adm_se = 0.0005;
  r.true_delta = 0.015;
  r.true_delta_se = 0.00025;
  r.mean_est_adm = 0.04;
  r.mean_delta_hat = 0.0175;
  r.ci_levels = {0.99, 0.95, 0.9};
  r.coverage = {0.99, 0.9375, 0.875};
  r.median_ci_length = {0.04, 0.03, 0.025};
  r.sigma_clamp_rate = 0.0;
  r.family = {1, 2, 3};
  r.select_rate = {0.125, 0.0625, 0.0};
  r.fwer = 0.0625;
  r.replications_done = 16;
  r.failures = 0;

  const std::string dir =
      std::filesystem::temp_directory_path().string() + "/diffnet_mc_golden";
  emit_tables({r}, dir, "csv");

  CHECK(slurp(dir + "/table1_graphs.csv") ==
        "scenario,n,delta0,alpha,graph,max_degree,avg_degree,clustering\n"
        "fix,100,0.500000,1.000000,contact,4,1.250000,0.125000\n"
        "fix,100,0.500000,1.000000,observed,8,2.500000,0.250000\n");
  CHECK(slurp(dir + "/table2_truth.csv") ==
        "scenario,n,delta0,alpha,true_adm,true_adm_se,true_delta,true_delta_se\n"
        "fix,100,0.500000,1.000000,0.037500,0.000500,0.015000,0.000250\n");
  CHECK(slurp(dir + "/table3_coverage.csv") ==
        "scenario,n,delta0,alpha,mean_est_adm,mean_delta_hat,cov99,cov95,cov90,"
        "len99,len95,len90,clamp_rate,reps,failures\n"
        "fix,100,0.500000,1.000000,0.040000,0.017500,0.990000,0.937500,0.875000,"
        "0.040000,0.030000,0.025000,0.000000,16,0\n");

  // Markdown rendering of the same fixture.
  const std::string mdir = dir + "_md";
  emit_tables({r}, mdir, "markdown");
  const std::string t2 = slurp(mdir + "/table2_truth.md");
  CHECK(t2.find("| fix | 100 | 0.500000 | 1.000000 | 0.037500 | 0.000500 | 0.015000 | 0.000250 |") !=
        std::string::npos);

  // JSON report carries the step-down summary.
  const std::string json = slurp(dir + "/report.json");
  CHECK(json.find("\"fwer\": 0.0625") != std::string::npos);
  CHECK(json.find("\"column\": 2") != std::string::npos);

  CHECK_THROWS_AS(emit_tables({r}, dir, "yaml"), InvalidConfig);
}

TEST_CASE("byte-identical report.json across worker counts") {
  const Scenario sc = small_scenario();
  const std::string d1 =
      std::filesystem::temp_directory_path().string() + "/diffnet_mc_t1";
  const std::string d2 =
      std::filesystem::temp_directory_path().string() + "/diffnet_mc_t2";
  emit_tables({run_scenario(sc, 1)}, d1, "csv");
  emit_tables({run_scenario(sc, 2)}, d2, "csv");
  CHECK(slurp(d1 + "/report.json") == slurp(d2 + "/report.json"));
  CHECK(slurp(d1 + "/table3_coverage.csv") == slurp(d2 + "/table3_coverage.csv"));
}

TEST_CASE("config parsing") {
  const std::string text =
      "# scenario cell\n"
      "name = demo\n"
      "n_villages = 2\n"
      "village_size = 30\n"
      "p = 4\n"
      "gamma0 = 0.6, -0.1, -0.3, 0.3\n"
      "beta0 = -1, 0.3, -0.4, -0.1\n"
      "delta0 = 0\n"
      "alpha = 0.5\n"
      "t1 = 2\n"
      "s_omitted = 3\n"
      "replications = 7\n"
      "ci_levels = 0.95, 0.9\n"
      "oracle_draws = 500\n"
      "master_seed = 31\n"
      "family = 2, 3, 4\n"
      "null_covariates = 4\n";
  const KeyValueConfig kv = KeyValueConfig::parse_string(text);
  const Scenario sc = scenario_from_config(kv);
  CHECK(sc.name == "demo");
  CHECK(sc.cfg.delta0 == 0.0);
  CHECK(sc.s_omitted == std::vector<int>{2});        // 1-based -> 0-based
  CHECK(sc.family == std::vector<int>{1, 2, 3});
  CHECK(sc.null_covariates == std::vector<int>{3});
  CHECK(sc.replications == 7);
  CHECK(sc.master_seed == 31);
  CHECK(sc.ci_levels == std::vector<double>{0.95, 0.9});

  CHECK_THROWS_AS(KeyValueConfig::parse_string("no equals sign"), InvalidConfig);
  CHECK_THROWS_AS(scenario_from_config(KeyValueConfig::parse_string("s_omitted = 0\n")),
                  InvalidConfig);
  CHECK_THROWS_AS(KeyValueConfig::parse_file("/no/such/config.cfg"), IoError);

  const KeyValueConfig defaults = KeyValueConfig::parse_string("");
  const DgpConfig d = dgp_from_config(defaults);
  CHECK(d.n_villages == 30);
  CHECK(d.village_size == 50);
  CHECK(d.gamma0 == Vector{0.6, -0.1, -0.3, 0.3});
}

TEST_CASE("fwer accounting uses the declared null covariates") {
  Scenario sc = small_scenario();
  sc.cfg.gamma0 = {0.6, -0.1, -0.3, 0.0};
  sc.cfg.alpha = 0.0;
  sc.null_covariates = {3};
  sc.replications = 10;
  const McReport rep = run_scenario(sc, 2);
  CHECK(rep.fwer >= 0.0);
  CHECK(rep.fwer <= 1.0);
}
