#include "diffnet/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace diffnet {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok = trim(tok);
    if (!tok.empty()) out.push_back(tok);
  }
  return out;
}

std::vector<int> to_zero_based(const std::vector<int>& one_based, const char* what) {
  std::vector<int> out;
  out.reserve(one_based.size());
  for (int v : one_based) {
    if (v < 1) throw InvalidConfig(std::string(what) + " indices are 1-based");
    out.push_back(v - 1);
  }
  return out;
}

}  // namespace

KeyValueConfig KeyValueConfig::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_string(buf.str());
}

KeyValueConfig KeyValueConfig::parse_string(const std::string& text) {
  KeyValueConfig cfg;
  std::stringstream ss(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const std::size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw InvalidConfig("config line " + std::to_string(lineno) + " is not key = value");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty()) throw InvalidConfig("empty key at line " + std::to_string(lineno));
    cfg.entries_[key] = value;
  }
  return cfg;
}

bool KeyValueConfig::has(const std::string& key) const { return entries_.count(key) > 0; }

std::string KeyValueConfig::get_string(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) throw InvalidConfig("missing config key " + key);
  return it->second;
}

std::string KeyValueConfig::get_string(const std::string& key, const std::string& fallback) const {
  const auto it = entries_.find(key);
  return it == entries_.end() ? fallback : it->second;
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  char* end = nullptr;
  const double v = std::strtod(it->second.c_str(), &end);
  if (end == it->second.c_str()) throw InvalidConfig("key " + key + " is not a number");
  return v;
}

int KeyValueConfig::get_int(const std::string& key, int fallback) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  return static_cast<int>(std::strtol(it->second.c_str(), nullptr, 10));
}

std::uint64_t KeyValueConfig::get_u64(const std::string& key, std::uint64_t fallback) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  return std::strtoull(it->second.c_str(), nullptr, 10);
}

std::vector<double> KeyValueConfig::get_doubles(const std::string& key,
                                                const std::vector<double>& fallback) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  std::vector<double> out;
  for (const auto& tok : split_list(it->second)) out.push_back(std::strtod(tok.c_str(), nullptr));
  return out;
}

std::vector<int> KeyValueConfig::get_ints(const std::string& key,
                                          const std::vector<int>& fallback) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  std::vector<int> out;
  for (const auto& tok : split_list(it->second))
    out.push_back(static_cast<int>(std::strtol(tok.c_str(), nullptr, 10)));
  return out;
}

DgpConfig dgp_from_config(const KeyValueConfig& cfg) {
  DgpConfig d;
  d.n_villages = cfg.get_int("n_villages", d.n_villages);
  d.village_size = cfg.get_int("village_size", d.village_size);
  d.p = cfg.get_int("p", d.p);
  d.gamma0 = cfg.get_doubles("gamma0", d.gamma0);
  d.beta0 = cfg.get_doubles("beta0", d.beta0);
  d.delta0 = cfg.get_double("delta0", d.delta0);
  d.alpha = cfg.get_double("alpha", d.alpha);
  d.t1 = cfg.get_int("t1", d.t1);
  d.ba.seed_size = cfg.get_int("seed_size", d.ba.seed_size);
  d.ba.seed_p = cfg.get_double("seed_p", d.ba.seed_p);
  d.ba.attachments_per_arrival = cfg.get_int("attachments_per_arrival", d.ba.attachments_per_arrival);
  d.ba.coin_flip_orientation = cfg.get_int("coin_flip_orientation", 0) != 0;
  d.validate();
  return d;
}

Scenario scenario_from_config(const KeyValueConfig& cfg) {
  Scenario sc;
  sc.cfg = dgp_from_config(cfg);
  sc.name = cfg.get_string("name", "scenario");
  sc.s_omitted = to_zero_based(cfg.get_ints("s_omitted", {}), "s_omitted");
  sc.replications = cfg.get_int("replications", sc.replications);
  sc.ci_levels = cfg.get_doubles("ci_levels", sc.ci_levels);
  sc.oracle_draws = cfg.get_int("oracle_draws", sc.oracle_draws);
  sc.master_seed = cfg.get_u64("master_seed", sc.master_seed);
  sc.stepdown_alpha = cfg.get_double("stepdown_alpha", sc.stepdown_alpha);
  sc.stepdown_draws = cfg.get_int("stepdown_draws", sc.stepdown_draws);
  sc.family = to_zero_based(cfg.get_ints("family", {}), "family");
  sc.null_covariates = to_zero_based(cfg.get_ints("null_covariates", {}), "null_covariates");
  sc.validate();
  return sc;
}

}  // namespace diffnet
