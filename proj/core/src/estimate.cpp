#include "diffnet/estimate.hpp"

#include <algorithm>
#include <cmath>

namespace diffnet {

namespace {

constexpr double kScoreTol = 1e-8;
constexpr int kMaxNewtonIter = 100;
constexpr double kMuFloor = 1e-10;
constexpr double kVarianceFloor = 1e-12;

struct ProbitTerms {
  double F, f, eta;
};

inline ProbitTerms terms_at(const double* x, const Vector& gamma, int k) {
  ProbitTerms t;
  t.eta = dot(x, gamma.data(), k);
  t.F = norm_cdf(t.eta);
  t.f = norm_pdf(t.eta);
  return t;
}

Matrix subset_columns(const Matrix& X, const std::vector<int>& cols) {
  Matrix out(X.rows(), static_cast<int>(cols.size()));
  for (int i = 0; i < X.rows(); ++i) {
    double* r = out.row(i);
    const double* src = X.row(i);
    for (std::size_t c = 0; c < cols.size(); ++c) r[c] = src[cols[c]];
  }
  return out;
}

std::vector<int> kept_columns(int p, const std::vector<int>& omit) {
  std::vector<char> drop(p, 0);
  for (int s : omit) {
    if (s < 0 || s >= p) throw InvalidConfig("omitted column out of range");
    drop[s] = 1;
  }
  std::vector<int> keep;
  for (int c = 0; c < p; ++c)
    if (!drop[c]) keep.push_back(c);
  if (keep.empty()) throw InvalidConfig("cannot omit every column");
  return keep;
}

}  // namespace

double probit_loglik(const Matrix& X, const std::vector<int>& y, const Vector& gamma) {
  const int n = X.rows();
  const int k = X.cols();
  double q = 0.0;
  for (int j = 0; j < n; ++j) {
    const ProbitTerms t = terms_at(X.row(j), gamma, k);
    const double Fc = std::min(std::max(t.F, 1e-300), 1.0 - 1e-16);
    q += y[j] ? std::log(Fc) : std::log1p(-Fc);
  }
  return q;
}

Vector probit_score(const Matrix& X, const std::vector<int>& y, const Vector& gamma) {
  const int n = X.rows();
  const int k = X.cols();
  Vector g(k, 0.0);
  for (int j = 0; j < n; ++j) {
    const double* xj = X.row(j);
    const ProbitTerms t = terms_at(xj, gamma, k);
    const double w = y[j] ? t.f / std::max(t.F, 1e-300)
                          : -t.f / std::max(1.0 - t.F, 1e-300);
    for (int a = 0; a < k; ++a) g[a] += w * xj[a];
  }
  return g;
}

SymMatrix probit_hessian(const Matrix& X, const std::vector<int>& y, const Vector& gamma) {
  const int n = X.rows();
  const int k = X.cols();
  SymMatrix H(k);
  for (int j = 0; j < n; ++j) {
    const double* xj = X.row(j);
    const ProbitTerms t = terms_at(xj, gamma, k);
    double w;
    if (y[j]) {
      const double F = std::max(t.F, 1e-300);
      w = (-t.eta * t.f * F - t.f * t.f) / (F * F);
    } else {
      const double Fc = std::max(1.0 - t.F, 1e-300);
      w = (t.eta * t.f * Fc - t.f * t.f) / (Fc * Fc);
    }
    for (int a = 0; a < k; ++a)
      for (int b = a; b < k; ++b) H.add(a, b, w * xj[a] * xj[b]);
  }
  return H;
}

ProbitFit probit_fit(const Matrix& X_design, const std::vector<int>& y0) {
  const int n = X_design.rows();
  const int k = X_design.cols();
  if (static_cast<int>(y0.size()) != n) throw SizeMismatch("y0 length != rows");
  if (n < 1 || k < 1) throw InvalidConfig("empty design");

  ProbitFit fit;
  fit.gamma_hat.assign(k, 0.0);
  double q_cur = probit_loglik(X_design, y0, fit.gamma_hat);

  for (int iter = 0;; ++iter) {
    const Vector g = probit_score(X_design, y0, fit.gamma_hat);
    double sup = 0.0;
    for (double v : g) sup = std::max(sup, std::abs(v));
    if (sup <= kScoreTol) {
      fit.converged = true;
      fit.iterations = iter;
      break;
    }
    if (iter == kMaxNewtonIter) throw NoConvergence("probit Newton exceeded iteration budget");

    const SymMatrix H = probit_hessian(X_design, y0, fit.gamma_hat);
    SymMatrix negH(k);
    for (int a = 0; a < k; ++a)
      for (int b = a; b < k; ++b) negH.set(a, b, -H(a, b));

    Vector step;
    try {
      step = solve_spd(negH, g);
    } catch (const NotPositiveDefinite&) {
      throw SingularHessian("probit Newton system not positive definite");
    }

    // Acceptance slack scales with |Q|: near the optimum the true improvement
    // of a Newton step can sit below the floating-point resolution of the
    // objective, and rejecting it would freeze the iteration.
    const double slack = 1e-12 * (1.0 + std::abs(q_cur));
    double t = 1.0;
    bool moved = false;
    for (int h = 0; h < 50; ++h) {
      Vector trial(fit.gamma_hat);
      for (int a = 0; a < k; ++a) trial[a] += t * step[a];
      const double q_new = probit_loglik(X_design, y0, trial);
      if (q_new >= q_cur - slack) {
        fit.gamma_hat = std::move(trial);
        q_cur = q_new;
        moved = true;
        break;
      }
      t *= 0.5;
    }
    if (!moved) throw NoConvergence("probit line search stalled");

    for (int j = 0; j < n; ++j) {
      const double F = norm_cdf(dot(X_design.row(j), fit.gamma_hat.data(), k));
      if (F < kMuFloor || F > 1.0 - kMuFloor)
        throw SeparationDetected("fitted probability at boundary");
    }
  }

  fit.mu_hat.resize(n);
  fit.sigma2_hat.resize(n);
  fit.hessian = SymMatrix(k);
  for (int j = 0; j < n; ++j) {
    const double* xj = X_design.row(j);
    const ProbitTerms t = terms_at(xj, fit.gamma_hat, k);
    fit.mu_hat[j] = t.F;
    fit.sigma2_hat[j] = t.F * (1.0 - t.F);
    const double w = -t.f * t.f / std::max(fit.sigma2_hat[j], 1e-300) / n;
    for (int a = 0; a < k; ++a)
      for (int b = a; b < k; ++b) fit.hessian.add(a, b, w * xj[a] * xj[b]);
  }
  fit.columns.resize(k);
  for (int c = 0; c < k; ++c) fit.columns[c] = c;
  return fit;
}

double c_stat(const DirectedGraph& observed, const std::vector<int>& y0,
              const std::vector<int>& y1, const Vector& mu_ref, const Vector& sigma2) {
  const int n = observed.node_count();
  if (static_cast<int>(y0.size()) != n || static_cast<int>(y1.size()) != n ||
      static_cast<int>(mu_ref.size()) != n || static_cast<int>(sigma2.size()) != n)
    throw SizeMismatch("c_stat inputs");
  for (int j = 0; j < n; ++j)
    if (sigma2[j] <= kVarianceFloor) throw DegenerateVariance("sigma2 at or below 1e-12");

  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    if (!y1[i]) continue;
    double inner = 0.0;
    for (int j : observed.in_neighbors(i)) inner += (y0[j] - mu_ref[j]) / sigma2[j];
    acc += inner;
  }
  return acc / n;
}

double delta_hat(const DirectedGraph& observed, const std::vector<int>& y1,
                 const ProbitFit& fit_full, const ProbitFit& fit_omit) {
  const int n = observed.node_count();
  if (static_cast<int>(y1.size()) != n || static_cast<int>(fit_full.mu_hat.size()) != n ||
      static_cast<int>(fit_omit.mu_hat.size()) != n)
    throw SizeMismatch("delta_hat inputs");
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    if (!y1[i]) continue;
    double inner = 0.0;
    for (int j : observed.in_neighbors(i)) {
      const double s2 = fit_full.sigma2_hat[j];
      if (s2 <= kVarianceFloor) throw DegenerateVariance("sigma2 at or below 1e-12");
      inner += (fit_full.mu_hat[j] - fit_omit.mu_hat[j]) / s2;
    }
    acc += inner;
  }
  return acc / n;
}

InfluenceSet influence(const DirectedGraph& observed, const Matrix& X,
                       const std::vector<int>& y0, const std::vector<int>& y1,
                       const ProbitFit& fit_full, const ProbitFit& fit_omit) {
  const int n = observed.node_count();
  const int p = X.cols();
  const int k = static_cast<int>(fit_omit.columns.size());
  if (X.rows() != n) throw SizeMismatch("design rows != node count");
  if (static_cast<int>(fit_full.columns.size()) != p)
    throw SizeMismatch("full fit does not span the design");

  const std::vector<int>& keep = fit_omit.columns;

  // Per-node pieces: delta, Gamma (full), Gamma_S (omitted design).
  Vector delta(n);
  Matrix gamma_full(n, p), gamma_omit(n, k);
  for (int j = 0; j < n; ++j) {
    const double s2 = fit_full.sigma2_hat[j];
    delta[j] = (fit_full.mu_hat[j] - fit_omit.mu_hat[j]) / s2;
    const double* xj = X.row(j);
    const double f_full = norm_pdf(dot(xj, fit_full.gamma_hat.data(), p));
    double eta_omit = 0.0;
    for (int c = 0; c < k; ++c) eta_omit += xj[keep[c]] * fit_omit.gamma_hat[c];
    const double f_omit = norm_pdf(eta_omit);
    double* gf = gamma_full.row(j);
    double* go = gamma_omit.row(j);
    for (int c = 0; c < p; ++c) gf[c] = f_full / s2 * xj[c];
    for (int c = 0; c < k; ++c) go[c] = f_omit / s2 * xj[keep[c]];
  }

  // H_S with observed-outcome weights (misspecified-MLE Hessian form).
  SymMatrix h_s(k);
  for (int j = 0; j < n; ++j) {
    const double* xj = X.row(j);
    double eta_omit = 0.0;
    for (int c = 0; c < k; ++c) eta_omit += xj[keep[c]] * fit_omit.gamma_hat[c];
    const double f = norm_pdf(eta_omit);
    const double mu = fit_omit.mu_hat[j];
    const double w = (y0[j] / (mu * mu) + (1.0 - y0[j]) / ((1.0 - mu) * (1.0 - mu))) * f * f / n;
    for (int a = 0; a < k; ++a)
      for (int b = a; b < k; ++b) h_s.add(a, b, -w * xj[keep[a]] * xj[keep[b]]);
  }

  SymMatrix neg_h(p), neg_h_s(k);
  for (int a = 0; a < p; ++a)
    for (int b = a; b < p; ++b) neg_h.set(a, b, -fit_full.hessian(a, b));
  for (int a = 0; a < k; ++a)
    for (int b = a; b < k; ++b) neg_h_s.set(a, b, -h_s(a, b));

  InfluenceSet inf;
  inf.U = Matrix(n, p);
  inf.U_S = Matrix(n, k);
  try {
    const CholeskyFactor ch_full(neg_h);
    const CholeskyFactor ch_omit(neg_h_s);
    Vector rhs_full(p), rhs_omit(k);
    for (int j = 0; j < n; ++j) {
      const double eps_full = y0[j] - fit_full.mu_hat[j];
      const double eps_omit = y0[j] - fit_omit.mu_hat[j];
      for (int c = 0; c < p; ++c) rhs_full[c] = eps_full * gamma_full(j, c);
      for (int c = 0; c < k; ++c) rhs_omit[c] = eps_omit * gamma_omit(j, c);
      const Vector u = ch_full.solve(rhs_full);
      const Vector us = ch_omit.solve(rhs_omit);
      for (int c = 0; c < p; ++c) inf.U(j, c) = u[c];
      for (int c = 0; c < k; ++c) inf.U_S(j, c) = us[c];
    }
  } catch (const NotPositiveDefinite&) {
    throw SingularHessian("H or H_S not negative definite");
  }

  // kappa weights over switchers.
  inf.kappa1.assign(p, 0.0);
  inf.kappa2.assign(k, 0.0);
  for (int i = 0; i < n; ++i) {
    if (!y1[i]) continue;
    for (int j : observed.in_neighbors(i)) {
      const double a = delta[j] * (2.0 * fit_full.mu_hat[j] - 1.0) + 1.0;
      const double* gf = gamma_full.row(j);
      const double* go = gamma_omit.row(j);
      for (int c = 0; c < p; ++c) inf.kappa1[c] += a * gf[c];
      for (int c = 0; c < k; ++c) inf.kappa2[c] += go[c];
    }
  }
  for (int c = 0; c < p; ++c) inf.kappa1[c] /= n;
  for (int c = 0; c < k; ++c) inf.kappa2[c] /= n;

  inf.q.resize(n);
  for (int i = 0; i < n; ++i) {
    double v = dot(inf.kappa1.data(), inf.U.row(i), p) - dot(inf.kappa2.data(), inf.U_S.row(i), k);
    if (y1[i]) {
      double dsum = 0.0;
      for (int j : observed.in_neighbors(i)) dsum += delta[j];
      v += dsum;
    }
    inf.q[i] = v;
  }

  // Least-squares projection of q onto the full design.
  SymMatrix gram(p);
  Vector xtq(p, 0.0);
  for (int i = 0; i < n; ++i) {
    const double* xi = X.row(i);
    for (int a = 0; a < p; ++a) {
      xtq[a] += xi[a] * inf.q[i];
      for (int b = a; b < p; ++b) gram.add(a, b, xi[a] * xi[b]);
    }
  }
  Vector lambda;
  try {
    lambda = solve_spd(gram, xtq);
  } catch (const NotPositiveDefinite&) {
    throw RankDeficientX("X'X not invertible");
  }
  inf.h.resize(n);
  for (int i = 0; i < n; ++i) inf.h[i] = dot(X.row(i), lambda.data(), p);
  return inf;
}

VarianceResult variance(const DirectedGraph& observed, const InfluenceSet& inf) {
  const int n = observed.node_count();
  if (static_cast<int>(inf.q.size()) != n) throw SizeMismatch("influence length != node count");
  Vector r(n);
  for (int i = 0; i < n; ++i) r[i] = inf.q[i] - inf.h[i];

  double acc = 0.0;
  for_each_overlapping_pair(observed, [&](int i1, int i2) { acc += r[i1] * r[i2]; });

  VarianceResult out;
  out.raw = acc / n;
  if (out.raw < 0.0) {
    out.sigma2 = kVarianceFloor;
    out.clamped = true;
  } else {
    out.sigma2 = out.raw;
  }
  return out;
}

SymMatrix omega_hat(const DirectedGraph& observed, const std::vector<InfluenceSet>& inf_by_s) {
  const int n = observed.node_count();
  const int m = static_cast<int>(inf_by_s.size());
  std::vector<Vector> r(m, Vector(n));
  for (int s = 0; s < m; ++s) {
    if (static_cast<int>(inf_by_s[s].q.size()) != n) throw SizeMismatch("influence length");
    for (int i = 0; i < n; ++i) r[s][i] = inf_by_s[s].q[i] - inf_by_s[s].h[i];
  }

  // One pass over the pair set fills the upper triangle; each entry
  // accumulates in the same order as a per-entry brute-force double loop.
  std::vector<double> acc(static_cast<std::size_t>(m) * m, 0.0);
  for_each_overlapping_pair(observed, [&](int i1, int i2) {
    for (int a = 0; a < m; ++a) {
      const double ra = r[a][i1];
      for (int b = a; b < m; ++b) acc[static_cast<std::size_t>(a) * m + b] += ra * r[b][i2];
    }
  });

  SymMatrix omega(m);
  for (int a = 0; a < m; ++a)
    for (int b = a; b < m; ++b) omega.set(a, b, acc[static_cast<std::size_t>(a) * m + b] / n);
  return omega;
}

ConfInterval confidence_interval(double delta, double sigma, int n, double alpha) {
  if (sigma < 0.0) throw InvalidConfig("sigma must be nonnegative");
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidConfig("alpha outside (0,1)");
  if (n < 1) throw InvalidConfig("n must be positive");
  const double z = norm_ppf(1.0 - alpha / 2.0);
  const double half = z * sigma / std::sqrt(static_cast<double>(n));
  return ConfInterval{delta - half, delta + half};
}

OverlapReport overlap_diagnostic(const ProbitFit& fit, double c) {
  if (!(c >= 0.0 && c < 0.5)) throw InvalidConfig("overlap threshold outside [0, 0.5)");
  OverlapReport report;
  report.threshold = c;
  const int n = static_cast<int>(fit.mu_hat.size());
  for (int j = 0; j < n; ++j) {
    if (!(fit.mu_hat[j] > c && fit.mu_hat[j] < 1.0 - c)) report.flagged.push_back(j);
  }
  report.flag_rate = n > 0 ? static_cast<double>(report.flagged.size()) / n : 0.0;
  return report;
}

DecompResult decompose(const PanelData& panel, const std::vector<int>& omit, double level) {
  const ProbitFit fit_full = probit_fit(panel.X, panel.y0);
  return decompose(panel, omit, level, fit_full);
}

DecompResult decompose(const PanelData& panel, const std::vector<int>& omit, double level,
                       const ProbitFit& fit_full) {
  if (!(level > 0.0 && level < 1.0)) throw InvalidConfig("confidence level outside (0,1)");
  const int n = panel.X.rows();
  const int p = panel.X.cols();

  std::vector<int> omit_sorted(omit);
  std::sort(omit_sorted.begin(), omit_sorted.end());
  omit_sorted.erase(std::unique(omit_sorted.begin(), omit_sorted.end()), omit_sorted.end());
  const std::vector<int> keep = kept_columns(p, omit_sorted);

  ProbitFit fit_omit;
  if (omit_sorted.empty()) {
    fit_omit = fit_full;
  } else {
    fit_omit = probit_fit(subset_columns(panel.X, keep), panel.y0);
    fit_omit.columns = keep;
  }

  DecompResult res;
  res.omitted = omit_sorted;
  res.level = level;
  res.iterations_full = fit_full.iterations;
  res.iterations_omit = fit_omit.iterations;
  res.c_hat_empty = c_stat(panel.observed, panel.y0, panel.y1, fit_full.mu_hat, fit_full.sigma2_hat);
  res.c_hat_s = c_stat(panel.observed, panel.y0, panel.y1, fit_omit.mu_hat, fit_full.sigma2_hat);
  res.delta = delta_hat(panel.observed, panel.y1, fit_full, fit_omit);

  const InfluenceSet inf =
      influence(panel.observed, panel.X, panel.y0, panel.y1, fit_full, fit_omit);
  const VarianceResult var = variance(panel.observed, inf);
  res.sigma2_raw = var.raw;
  res.sigma_clamped = var.clamped;
  res.sigma_hat = std::sqrt(var.sigma2);
  const ConfInterval ci = confidence_interval(res.delta, res.sigma_hat, n, 1.0 - level);
  res.ci_low = ci.low;
  res.ci_high = ci.high;
  return res;
}

}  // namespace diffnet
