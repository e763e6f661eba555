#include "diffnet/multitest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace diffnet {

namespace {

constexpr double kSigmaFloor = 1e-12;

std::uint64_t subset_key(const std::vector<int>& subset) {
  // FNV-1a over the sorted member indices.
  std::uint64_t h = 1469598103934665603ULL;
  for (int s : subset) {
    h ^= static_cast<std::uint64_t>(s) + 1ULL;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace

double critical_value(const SymMatrix& omega, const Vector& sigma_diag,
                      const std::vector<int>& active, double alpha, int B, RngStream rng) {
  if (B < 100) throw InvalidConfig("critical_value needs at least 100 draws");
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidConfig("alpha outside (0,1)");
  if (active.empty()) throw InvalidConfig("empty active set");
  const int m = static_cast<int>(active.size());
  for (int s : active) {
    if (s < 0 || s >= omega.dim()) throw InvalidConfig("active index out of range");
    if (!(sigma_diag[s] > 0.0)) throw DegenerateSigma("nonpositive sigma on active set");
  }

  SymMatrix sub(m);
  for (int a = 0; a < m; ++a)
    for (int b = a; b < m; ++b) sub.set(a, b, omega(active[a], active[b]));
  const PsdSqrt root = psd_sqrt(sub);

  Vector w(B);
  Vector z(m);
  for (int b = 0; b < B; ++b) {
    for (int c = 0; c < m; ++c) z[c] = rng.normal();
    double wmax = 0.0;
    for (int a = 0; a < m; ++a) {
      double v = 0.0;
      for (int c = 0; c < m; ++c) v += root.root(a, c) * z[c];
      wmax = std::max(wmax, std::abs(v) / sigma_diag[active[a]]);
    }
    w[b] = wmax;
  }
  return empirical_percentile(w, 1.0 - alpha);
}

StepDownResult stepdown(const Vector& delta_hats, const SymMatrix& omega, int n,
                        double alpha, int B, RngStream rng) {
  const int p = static_cast<int>(delta_hats.size());
  if (omega.dim() != p) throw SizeMismatch("omega dimension != number of hypotheses");
  if (n < 1) throw InvalidConfig("n must be positive");

  StepDownResult res;
  res.alpha = alpha;
  res.draws = B;
  res.sigma.resize(p);
  res.statistics.resize(p);
  const double root_n = std::sqrt(static_cast<double>(n));
  for (int s = 0; s < p; ++s) {
    res.sigma[s] = std::sqrt(std::max(omega(s, s), kSigmaFloor));
    res.statistics[s] = root_n * std::abs(delta_hats[s]) / res.sigma[s];
  }

  std::vector<int> retained(p);
  for (int s = 0; s < p; ++s) retained[s] = s;
  double c_prev = std::numeric_limits<double>::infinity();

  // R_{t+1} = { s : stat_s <= c(R_t) }, stop at the fixed point. Enforcing
  // c(R_{t+1}) <= c(R_t) keeps the retained sets nested even under
  // simulation noise in the percentiles.
  for (int round = 0; round <= p && !retained.empty(); ++round) {
    const double c_raw =
        critical_value(omega, res.sigma, retained, alpha, B, rng.derive(subset_key(retained)));
    const double c_used = std::min(c_raw, c_prev);
    res.trace.push_back(StepDownIteration{retained, c_raw, c_used});

    std::vector<int> next;
    for (int s = 0; s < p; ++s)
      if (res.statistics[s] <= c_used) next.push_back(s);
    if (next == retained) break;
    retained = std::move(next);
    c_prev = c_used;
  }

  res.retained = retained;
  std::vector<char> kept(p, 0);
  for (int s : retained) kept[s] = 1;
  for (int s = 0; s < p; ++s)
    if (!kept[s]) res.selected.push_back(s);
  return res;
}

}  // namespace diffnet
