#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "diffnet/errors.hpp"
#include "diffnet/mc.hpp"
#include "diffnet/simulate.hpp"

namespace diffnet {

// Flat key = value configuration text. Lines starting with '#' and blank
// lines are ignored; values may be scalars or comma-separated lists.
class KeyValueConfig {
 public:
  static KeyValueConfig parse_file(const std::string& path);   // throws IoError
  static KeyValueConfig parse_string(const std::string& text);

  bool has(const std::string& key) const;

  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  std::vector<double> get_doubles(const std::string& key, const std::vector<double>& fallback) const;
  std::vector<int> get_ints(const std::string& key, const std::vector<int>& fallback) const;

  const std::map<std::string, std::string>& entries() const { return entries_; }

 private:
  std::map<std::string, std::string> entries_;
};

// DgpConfig from keys: n_villages, village_size, p, gamma0, beta0, delta0,
// alpha, t1, seed_size, seed_p, attachments_per_arrival,
// coin_flip_orientation. Missing keys keep their defaults.
DgpConfig dgp_from_config(const KeyValueConfig& cfg);

// Scenario from the DgpConfig keys plus: name, s_omitted, replications,
// ci_levels, oracle_draws, master_seed, stepdown_alpha, stepdown_draws,
// family, null_covariates. Covariate indices in config files are 1-based.
Scenario scenario_from_config(const KeyValueConfig& cfg);

}  // namespace diffnet
