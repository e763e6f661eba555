#include "diffnet/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "diffnet/parallel.hpp"

namespace diffnet {

namespace {

// Child-stream keys inside one oracle draw.
constexpr std::uint64_t kInitialKey = 1;
constexpr std::uint64_t kShockKey = 2;

Vector index_values(const Matrix& X, const Vector& coef) {
  const int n = X.rows();
  const int p = X.cols();
  if (static_cast<int>(coef.size()) != p) throw SizeMismatch("coefficient length != columns");
  Vector eta(n);
  for (int i = 0; i < n; ++i) eta[i] = dot(X.row(i), coef.data(), p);
  return eta;
}

}  // namespace

void DgpConfig::validate() const {
  if (n_villages < 1 || village_size < 1) throw InvalidConfig("village counts must be positive");
  if (p < 1) throw InvalidConfig("covariate dimension must be at least 1");
  if (static_cast<int>(gamma0.size()) != p) throw InvalidConfig("gamma0 length != p");
  if (static_cast<int>(beta0.size()) != p) throw InvalidConfig("beta0 length != p");
  if (alpha < 0.0 || alpha > 1.0) throw InvalidConfig("alpha outside [0,1]");
  if (t1 < 1) throw InvalidConfig("t1 must be at least 1");
  if (ba.seed_size > village_size) throw InvalidConfig("seed size exceeds village size");
}

Matrix gen_covariates(const DirectedGraph& contact, const DgpConfig& cfg, RngStream rng) {
  const int n = contact.node_count();
  const int p = cfg.p;
  const int k = p - 1;

  // The shadow ER graph matches the contact density per ordered pair.
  double p_tilde = 0.0;
  if (n > 1) p_tilde = static_cast<double>(contact.edge_count()) / (static_cast<double>(n) * (n - 1));
  const DirectedGraph e_tilde = gen_er(n, std::min(1.0, p_tilde), rng.derive(1), EdgeMode::directed);

  Matrix x_raw(n, std::max(k, 1));
  RngStream xs = rng.derive(2);
  for (int i = 0; i < n; ++i) {
    for (int c = 0; c < k; ++c) x_raw(i, c) = xs.uniform();
  }

  Matrix X(n, p);
  for (int i = 0; i < n; ++i) {
    X(i, 0) = 1.0;
    double* xi = X.row(i);
    const double* raw = x_raw.row(i);
    for (int c = 0; c < k; ++c) xi[1 + c] = raw[c];
    if (cfg.alpha != 0.0) {
      for (int j : contact.in_neighbors(i)) {
        const double* rj = x_raw.row(j);
        for (int c = 0; c < k; ++c) xi[1 + c] += cfg.alpha * rj[c];
      }
    }
    if (cfg.alpha != 1.0) {
      for (int j : e_tilde.in_neighbors(i)) {
        const double* rj = x_raw.row(j);
        for (int c = 0; c < k; ++c) xi[1 + c] += (1.0 - cfg.alpha) * rj[c];
      }
    }
  }
  return X;
}

std::vector<int> gen_initial(const Matrix& X, const Vector& gamma0, RngStream rng) {
  const Vector eta = index_values(X, gamma0);
  std::vector<int> y0(X.rows());
  for (int j = 0; j < X.rows(); ++j) y0[j] = norm_cdf(eta[j]) >= rng.uniform() ? 1 : 0;
  return y0;
}

DiffusionPath diffuse(const DirectedGraph& contact, const Matrix& X, const Vector& beta0,
                      double delta0, int t1, const std::vector<int>& y0, RngStream rng) {
  if (t1 < 1) throw InvalidConfig("t1 must be at least 1");
  const int n = contact.node_count();
  if (static_cast<int>(y0.size()) != n || X.rows() != n) throw SizeMismatch("diffuse inputs");
  const Vector xb = index_values(X, beta0);

  DiffusionPath path;
  path.actions.assign(t1 + 1, std::vector<int>(n, 0));
  path.actions[0] = y0;
  path.y1.assign(n, 0);

  std::vector<char> switched(n);
  for (int i = 0; i < n; ++i) switched[i] = static_cast<char>(y0[i]);

  for (int t = 1; t <= t1; ++t) {
    const std::vector<int>& prev = path.actions[t - 1];
    std::vector<int>& cur = path.actions[t];
    for (int i = 0; i < n; ++i) {
      const double u = rng.normal();  // drawn for every (i, t) to keep the stream layout fixed
      if (switched[i]) continue;
      const auto& nbrs = contact.in_neighbors(i);
      double abar = 0.0;
      if (!nbrs.empty()) {
        int s = 0;
        for (int j : nbrs) s += prev[j];
        abar = static_cast<double>(s) / static_cast<double>(nbrs.size());
      }
      if (delta0 * abar + xb[i] > u) cur[i] = 1;
    }
    for (int i = 0; i < n; ++i) {
      if (cur[i]) {
        switched[i] = 1;
        path.y1[i] = 1;
      }
    }
  }
  return path;
}

namespace {

// Flattened per-source counterfactual neighborhoods for the ADM oracle.
// Members of group j are the nodes reachable from j within t1 steps plus j
// itself; each member's in-neighbors are pre-resolved to either a member
// position or a baseline node id.
struct ReachPlan {
  std::vector<int> member_begin;      // per source, offset into members
  std::vector<int> members;           // node ids, source first
  std::vector<int> nbr_begin;         // per member, offset into nbr_code
  std::vector<int> nbr_code;          // >= 0: member position; < 0: ~(baseline node id)
  std::vector<int> in_degree;         // per member
  int max_members = 0;
};

ReachPlan build_reach_plan(const DirectedGraph& contact, int t1, ResimMode mode) {
  const int n = contact.node_count();
  ReachPlan plan;
  plan.member_begin.assign(n + 1, 0);
  std::vector<int> pos(n, -1);
  std::vector<int> frontier, next, members;

  for (int j = 0; j < n; ++j) {
    members.clear();
    members.push_back(j);
    if (mode == ResimMode::whole_network) {
      for (int v = 0; v < n; ++v)
        if (v != j) members.push_back(v);
    } else {
      frontier.assign(1, j);
      for (int depth = 0; depth < t1; ++depth) {
        next.clear();
        for (int v : frontier) {
          for (int i : contact.out_neighbors(v)) {
            if (pos[i] < 0 && i != j) {
              pos[i] = 1;
              members.push_back(i);
              next.push_back(i);
            }
          }
        }
        frontier.swap(next);
        if (frontier.empty()) break;
      }
      std::sort(members.begin() + 1, members.end());
      for (std::size_t k = 1; k < members.size(); ++k) pos[members[k]] = -1;
    }

    for (std::size_t k = 0; k < members.size(); ++k) pos[members[k]] = static_cast<int>(k);
    for (std::size_t k = 0; k < members.size(); ++k) {
      const int id = members[k];
      plan.nbr_begin.push_back(static_cast<int>(plan.nbr_code.size()));
      for (int nb : contact.in_neighbors(id)) {
        plan.nbr_code.push_back(pos[nb] >= 0 ? pos[nb] : ~nb);
      }
      plan.in_degree.push_back(static_cast<int>(contact.in_neighbors(id).size()));
      plan.members.push_back(id);
    }
    for (int id : members) pos[id] = -1;
    plan.member_begin[j + 1] = static_cast<int>(plan.members.size());
    plan.max_members = std::max(plan.max_members, static_cast<int>(members.size()));
  }
  plan.nbr_begin.push_back(static_cast<int>(plan.nbr_code.size()));
  return plan;
}

struct DrawScratch {
  std::vector<int> y0;
  std::vector<double> shocks;          // t1 x n, period-major
  std::vector<std::vector<int>> base;  // baseline actions, t = 0..t1
  std::vector<int> base_y1;
  std::vector<int> cf_prev, cf_next;
  std::vector<char> cf_switched;
  std::vector<int> cf_y1;
};

// One common-random-numbers draw of the per-draw ADM average.
double adm_single_draw(const DirectedGraph& contact, const Vector& mu0, const Vector& xb,
                       double delta0, int t1, const ReachPlan& plan, RngStream draw_stream,
                       DrawScratch& s) {
  const int n = contact.node_count();

  RngStream init = draw_stream.derive(kInitialKey);
  s.y0.resize(n);
  for (int j = 0; j < n; ++j) s.y0[j] = mu0[j] >= init.uniform() ? 1 : 0;

  RngStream shock = draw_stream.derive(kShockKey);
  s.shocks.resize(static_cast<std::size_t>(t1) * n);
  for (int t = 0; t < t1; ++t)
    for (int i = 0; i < n; ++i) s.shocks[static_cast<std::size_t>(t) * n + i] = shock.normal();

  // Baseline path.
  s.base.assign(t1 + 1, std::vector<int>(n, 0));
  s.base[0] = s.y0;
  s.base_y1.assign(n, 0);
  {
    std::vector<char> switched(n);
    for (int i = 0; i < n; ++i) switched[i] = static_cast<char>(s.y0[i]);
    for (int t = 1; t <= t1; ++t) {
      const auto& prev = s.base[t - 1];
      auto& cur = s.base[t];
      for (int i = 0; i < n; ++i) {
        if (switched[i]) continue;
        const auto& nbrs = contact.in_neighbors(i);
        double abar = 0.0;
        if (!nbrs.empty()) {
          int acc = 0;
          for (int j : nbrs) acc += prev[j];
          abar = static_cast<double>(acc) / static_cast<double>(nbrs.size());
        }
        if (delta0 * abar + xb[i] > s.shocks[static_cast<std::size_t>(t - 1) * n + i]) cur[i] = 1;
      }
      for (int i = 0; i < n; ++i) {
        if (cur[i]) {
          switched[i] = 1;
          s.base_y1[i] = 1;
        }
      }
    }
  }

  std::int64_t acc = 0;
  s.cf_prev.resize(plan.max_members);
  s.cf_next.resize(plan.max_members);
  s.cf_switched.resize(plan.max_members);
  s.cf_y1.resize(plan.max_members);

  for (int j = 0; j < n; ++j) {
    const int begin = plan.member_begin[j];
    const int end = plan.member_begin[j + 1];
    const int count = end - begin;
    if (count <= 1 && contact.out_neighbors(j).empty()) continue;

    const int arm = 1 - s.y0[j];             // the other arm is the baseline itself
    const int sign = s.y0[j] == 0 ? 1 : -1;  // D_j(1) - D_j(0)

    // Counterfactual system: node j's initial action replaced by `arm`
    // everywhere it feeds the recursion.
    for (int k = 0; k < count; ++k) {
      const int id = plan.members[begin + k];
      const int a0 = (k == 0) ? arm : s.y0[id];
      s.cf_prev[k] = a0;
      s.cf_switched[k] = static_cast<char>(a0);
      s.cf_y1[k] = 0;
    }

    // Node j's own outcome keeps its realized initial action as the gate;
    // only the feedback inputs come from the counterfactual system.
    char own_switched = static_cast<char>(s.y0[j]);
    int own_y1 = 0;

    for (int t = 1; t <= t1; ++t) {
      const double* shock_t = s.shocks.data() + static_cast<std::size_t>(t - 1) * n;
      const auto& base_prev = s.base[t - 1];
      for (int k = 0; k < count; ++k) {
        const int id = plan.members[begin + k];
        if (s.cf_switched[k]) {
          s.cf_next[k] = 0;
          continue;
        }
        const int nb = plan.nbr_begin[begin + k];
        const int ne = plan.nbr_begin[begin + k + 1];
        double abar = 0.0;
        if (ne > nb) {
          int a = 0;
          for (int c = nb; c < ne; ++c) {
            const int code = plan.nbr_code[c];
            a += code >= 0 ? s.cf_prev[code] : base_prev[~code];
          }
          abar = static_cast<double>(a) / static_cast<double>(ne - nb);
        }
        s.cf_next[k] = (delta0 * abar + xb[id] > shock_t[id]) ? 1 : 0;
      }
      if (!own_switched) {
        const auto& nbrs = contact.in_neighbors(j);
        double abar = 0.0;
        if (!nbrs.empty()) {
          int a = 0;
          for (std::size_t c = 0; c < nbrs.size(); ++c) {
            const int code = plan.nbr_code[plan.nbr_begin[begin] + static_cast<int>(c)];
            a += code >= 0 ? s.cf_prev[code] : base_prev[~code];
          }
          abar = static_cast<double>(a) / static_cast<double>(nbrs.size());
        }
        if (delta0 * abar + xb[j] > shock_t[j]) {
          own_y1 = 1;
          own_switched = 1;
        }
      }
      for (int k = 0; k < count; ++k) {
        if (s.cf_next[k]) {
          s.cf_switched[k] = 1;
          s.cf_y1[k] = 1;
        }
        s.cf_prev[k] = s.cf_next[k];
      }
    }

    int diff = own_y1 - s.base_y1[j];
    for (int k = 1; k < count; ++k) {
      const int id = plan.members[begin + k];
      diff += s.cf_y1[k] - s.base_y1[id];
    }
    acc += sign * diff;
  }
  return static_cast<double>(acc) / static_cast<double>(n);
}

OracleEstimate summarize_draws(const Vector& values) {
  OracleEstimate est;
  est.draws = static_cast<int>(values.size());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= est.draws;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  est.value = mean;
  est.std_error = est.draws > 1 ? std::sqrt(ss / (est.draws - 1.0) / est.draws) : 0.0;
  return est;
}

}  // namespace

OracleEstimate adm_oracle(const DirectedGraph& contact, const Matrix& X, const Vector& gamma0,
                          const Vector& beta0, double delta0, int t1, int draws, RngStream rng,
                          int threads, ResimMode mode) {
  if (draws < 1) throw InvalidConfig("draws must be positive");
  if (t1 < 1) throw InvalidConfig("t1 must be at least 1");
  const int n = contact.node_count();
  if (X.rows() != n) throw SizeMismatch("covariate rows != node count");

  Vector mu0(n);
  const Vector eta = index_values(X, gamma0);
  for (int j = 0; j < n; ++j) mu0[j] = norm_cdf(eta[j]);
  const Vector xb = index_values(X, beta0);
  const ReachPlan plan = build_reach_plan(contact, t1, mode);

  Vector per_draw(draws);
  parallel_ranges(draws, threads, [&](std::int64_t begin, std::int64_t end) {
    DrawScratch scratch;
    for (std::int64_t d = begin; d < end; ++d) {
      per_draw[d] = adm_single_draw(contact, mu0, xb, delta0, t1, plan,
                                    rng.derive(static_cast<std::uint64_t>(d)), scratch);
    }
  });
  return summarize_draws(per_draw);
}

Vector pseudo_true_gamma(const Matrix& X, const Vector& gamma0, const std::vector<int>& omit) {
  const int n = X.rows();
  const int p = X.cols();
  std::vector<char> omitted(p, 0);
  for (int s : omit) {
    if (s < 0 || s >= p) throw InvalidConfig("omitted column out of range");
    omitted[s] = 1;
  }
  std::vector<int> keep;
  for (int c = 0; c < p; ++c)
    if (!omitted[c]) keep.push_back(c);
  if (keep.empty()) throw InvalidConfig("cannot omit every column");
  // Nothing omitted: gamma0 is the exact maximizer of the population
  // objective, no iteration needed.
  if (static_cast<int>(keep.size()) == p) return gamma0;

  Vector mu(n);
  {
    const Vector eta = index_values(X, gamma0);
    for (int j = 0; j < n; ++j) mu[j] = norm_cdf(eta[j]);
  }

  const int k = static_cast<int>(keep.size());
  Matrix D(n, k);
  for (int i = 0; i < n; ++i)
    for (int c = 0; c < k; ++c) D(i, c) = X(i, keep[c]);

  auto objective = [&](const Vector& g) {
    double q = 0.0;
    for (int j = 0; j < n; ++j) {
      const double F = norm_cdf(dot(D.row(j), g.data(), k));
      const double Fc = std::min(std::max(F, 1e-300), 1.0 - 1e-16);
      q += mu[j] * std::log(Fc) + (1.0 - mu[j]) * std::log1p(-Fc);
    }
    return q;
  };

  Vector gamma(k, 0.0);
  double q_cur = objective(gamma);
  constexpr double kTol = 1e-10;
  constexpr int kMaxIter = 200;

  for (int iter = 0; iter < kMaxIter; ++iter) {
    Vector score(k, 0.0);
    SymMatrix neg_hess(k);
    double sup = 0.0;
    for (int j = 0; j < n; ++j) {
      const double* xj = D.row(j);
      const double e = dot(xj, gamma.data(), k);
      const double F = norm_cdf(e);
      const double f = norm_pdf(e);
      const double v = std::max(F * (1.0 - F), 1e-300);
      const double resid = mu[j] - F;
      const double sj = resid * f / v;
      // d/d eta of the score factor; f' = -eta f, v' = f (1 - 2F).
      const double gj = (-f * f - e * f * resid) / v - resid * f * f * (1.0 - 2.0 * F) / (v * v);
      for (int a = 0; a < k; ++a) {
        score[a] += sj * xj[a];
        for (int b = a; b < k; ++b) neg_hess.add(a, b, -gj * xj[a] * xj[b]);
      }
    }
    for (int a = 0; a < k; ++a) sup = std::max(sup, std::abs(score[a]));
    if (sup <= kTol) return gamma;

    Vector step;
    try {
      step = solve_spd(neg_hess, score);
    } catch (const NotPositiveDefinite&) {
      throw SingularHessian("population objective Hessian not negative definite");
    }
    // Slack scales with |Q|; a Newton step's true gain can be below the
    // objective's floating-point resolution near the maximizer.
    const double slack = 1e-12 * (1.0 + std::abs(q_cur));
    double t = 1.0;
    bool moved = false;
    for (int h = 0; h < 50; ++h) {
      Vector trial(gamma);
      for (int a = 0; a < k; ++a) trial[a] += t * step[a];
      const double q_new = objective(trial);
      if (q_new >= q_cur - slack) {
        gamma = std::move(trial);
        q_cur = q_new;
        moved = true;
        break;
      }
      t *= 0.5;
    }
    if (!moved) throw NoConvergence("pseudo-true line search stalled");
  }
  throw NoConvergence("pseudo-true Newton exceeded iteration budget");
}

DecompTruth delta_oracle(const DirectedGraph& contact, const DirectedGraph& observed,
                         const Matrix& X, const Vector& gamma0, const Vector& beta0,
                         double delta0, int t1, const std::vector<int>& omit, int draws,
                         RngStream rng, int threads) {
  if (draws < 1) throw InvalidConfig("draws must be positive");
  const int n = contact.node_count();
  if (observed.node_count() != n) throw SizeMismatch("observed graph size");
  const int p = X.cols();

  Vector mu(n), sigma2(n);
  {
    const Vector eta = index_values(X, gamma0);
    for (int j = 0; j < n; ++j) {
      mu[j] = norm_cdf(eta[j]);
      sigma2[j] = mu[j] * (1.0 - mu[j]);
      if (sigma2[j] <= 1e-12) throw DegenerateVariance("flat initial-switch probability");
    }
  }

  DecompTruth truth;
  truth.gamma_star = pseudo_true_gamma(X, gamma0, omit);

  std::vector<char> omitted(p, 0);
  for (int s : omit) omitted[s] = 1;
  std::vector<int> keep;
  for (int c = 0; c < p; ++c)
    if (!omitted[c]) keep.push_back(c);

  Vector mu_omit(n);
  for (int j = 0; j < n; ++j) {
    double e = 0.0;
    for (std::size_t c = 0; c < keep.size(); ++c) e += X(j, keep[c]) * truth.gamma_star[c];
    mu_omit[j] = norm_cdf(e);
  }

  // Per-target constants: delta coefficients and the centered reference sum.
  Vector coef(n, 0.0), cons(n, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j : observed.in_neighbors(i)) {
      coef[i] += (mu[j] - mu_omit[j]) / sigma2[j];
      cons[i] += mu_omit[j] / sigma2[j];
    }
  }

  const Vector xb = index_values(X, beta0);

  Vector c_draws(draws), d_draws(draws);
  parallel_ranges(draws, threads, [&](std::int64_t begin, std::int64_t end) {
    std::vector<int> y0(n);
    std::vector<std::vector<int>> actions;
    for (std::int64_t d = begin; d < end; ++d) {
      RngStream draw_stream = rng.derive(static_cast<std::uint64_t>(d));
      RngStream init = draw_stream.derive(kInitialKey);
      for (int j = 0; j < n; ++j) y0[j] = mu[j] >= init.uniform() ? 1 : 0;

      RngStream shock = draw_stream.derive(kShockKey);
      actions.assign(t1 + 1, std::vector<int>(n, 0));
      actions[0] = y0;
      std::vector<char> switched(n);
      for (int i = 0; i < n; ++i) switched[i] = static_cast<char>(y0[i]);
      std::vector<int> y1(n, 0);
      for (int t = 1; t <= t1; ++t) {
        const auto& prev = actions[t - 1];
        auto& cur = actions[t];
        for (int i = 0; i < n; ++i) {
          const double u = shock.normal();
          if (switched[i]) continue;
          const auto& nbrs = contact.in_neighbors(i);
          double abar = 0.0;
          if (!nbrs.empty()) {
            int a = 0;
            for (int j : nbrs) a += prev[j];
            abar = static_cast<double>(a) / static_cast<double>(nbrs.size());
          }
          if (delta0 * abar + xb[i] > u) cur[i] = 1;
        }
        for (int i = 0; i < n; ++i) {
          if (cur[i]) {
            switched[i] = 1;
            y1[i] = 1;
          }
        }
      }

      double c_acc = 0.0, d_acc = 0.0;
      for (int i = 0; i < n; ++i) {
        if (!y1[i]) continue;
        double a = 0.0;
        for (int j : observed.in_neighbors(i))
          if (y0[j]) a += 1.0 / sigma2[j];
        c_acc += a - cons[i];
        d_acc += coef[i];
      }
      c_draws[d] = c_acc / n;
      d_draws[d] = d_acc / n;
    }
  });

  truth.c_s = summarize_draws(c_draws);
  truth.delta_s = summarize_draws(d_draws);
  return truth;
}

DgpRealization gen_dgp(const DgpConfig& cfg, RngStream rng) {
  cfg.validate();
  DgpRealization real;
  std::vector<DirectedGraph> villages;
  villages.reserve(cfg.n_villages);
  BaVillageConfig ba = cfg.ba;
  ba.village_size = cfg.village_size;
  RngStream graph_stream = rng.derive(1);
  for (int v = 0; v < cfg.n_villages; ++v) {
    villages.push_back(gen_ba_village(ba, graph_stream.derive(static_cast<std::uint64_t>(v))));
  }
  real.contact = block_diagonal(villages);
  real.observed = observed_from_contact(real.contact, cfg.t1);
  real.X = gen_covariates(real.contact, cfg, rng.derive(2));
  return real;
}

PanelData draw_panel(const DgpRealization& real, const DgpConfig& cfg, RngStream rng) {
  PanelData panel;
  panel.X = real.X;
  panel.observed = real.observed;
  panel.y0 = gen_initial(real.X, cfg.gamma0, rng.derive(1));
  DiffusionPath path =
      diffuse(real.contact, real.X, cfg.beta0, cfg.delta0, cfg.t1, panel.y0, rng.derive(2));
  panel.y1 = std::move(path.y1);
  return panel;
}

void write_panel_csv(const PanelData& panel, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  const int n = panel.X.rows();
  const int p = panel.X.cols();
  for (int c = 0; c < p; ++c) out << 'x' << (c + 1) << ',';
  out << "y0,y1\n";
  char buf[32];
  for (int i = 0; i < n; ++i) {
    for (int c = 0; c < p; ++c) {
      std::snprintf(buf, sizeof(buf), "%.17g", panel.X(i, c));
      out << buf << ',';
    }
    out << panel.y0[i] << ',' << panel.y1[i] << '\n';
  }
  if (!out) throw IoError("write failed for " + path);
}

PanelData read_panel_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty panel file " + path);

  std::vector<std::string> cols;
  {
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      while (!tok.empty() && (tok.back() == '\r' || tok.back() == ' ')) tok.pop_back();
      cols.push_back(tok);
    }
  }
  if (cols.size() < 3 || cols[cols.size() - 2] != "y0" || cols.back() != "y1")
    throw IoError(path + ": expected header x1..xp,y0,y1");
  const int p = static_cast<int>(cols.size()) - 2;

  std::vector<double> values;
  int rows = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    std::stringstream ss(line);
    std::string tok;
    int count = 0;
    while (std::getline(ss, tok, ',')) {
      values.push_back(std::strtod(tok.c_str(), nullptr));
      ++count;
    }
    if (count != p + 2) throw IoError(path + ": wrong column count in data row");
    ++rows;
  }

  PanelData panel;
  panel.X = Matrix(rows, p);
  panel.y0.resize(rows);
  panel.y1.resize(rows);
  for (int i = 0; i < rows; ++i) {
    for (int c = 0; c < p; ++c) panel.X(i, c) = values[static_cast<std::size_t>(i) * (p + 2) + c];
    panel.y0[i] = static_cast<int>(values[static_cast<std::size_t>(i) * (p + 2) + p]);
    panel.y1[i] = static_cast<int>(values[static_cast<std::size_t>(i) * (p + 2) + p + 1]);
  }
  return panel;
}

}  // namespace diffnet
