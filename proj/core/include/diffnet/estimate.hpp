#pragma once

#include <vector>

#include "diffnet/graph.hpp"
#include "diffnet/numkit.hpp"
#include "diffnet/simulate.hpp"

namespace diffnet {

struct ProbitFit {
  Vector gamma_hat;
  Vector mu_hat;        // Phi(X_j' gamma_hat)
  Vector sigma2_hat;    // mu_hat * (1 - mu_hat)
  SymMatrix hessian;    // -(1/n) sum_j f^2(X_j'gamma) X_j X_j' / sigma2_j
  int iterations = 0;
  bool converged = false;
  std::vector<int> columns;  // 0-based columns of the full design used in this fit
};

// Probit MLE by Newton-Raphson with analytic score and exact Hessian,
// starting from zero, with step-halving. Converges when the sup-norm of the
// score is at most 1e-8; throws NoConvergence after 100 iterations,
// SeparationDetected when fitted probabilities leave [1e-10, 1-1e-10], and
// SingularHessian when a Newton system cannot be factored.
ProbitFit probit_fit(const Matrix& X_design, const std::vector<int>& y0);

// Sample log-likelihood, score, and exact Hessian of the probit objective at
// an arbitrary gamma (exposed for derivative checks).
double probit_loglik(const Matrix& X, const std::vector<int>& y, const Vector& gamma);
Vector probit_score(const Matrix& X, const std::vector<int>& y, const Vector& gamma);
SymMatrix probit_hessian(const Matrix& X, const std::vector<int>& y, const Vector& gamma);

// (1/n) sum_j sum_{i: j in N(i)} (Y0_j - mu_ref_j) * Y1_i / sigma2_j.
// With mu_ref = mu_hat this is C_hat_empty; with mu_ref = mu_hat_{-S} it is
// C_hat_S. Throws DegenerateVariance when any sigma2_j <= 1e-12.
double c_stat(const DirectedGraph& observed, const std::vector<int>& y0,
              const std::vector<int>& y1, const Vector& mu_ref, const Vector& sigma2);

// (1/n) sum_j sum_{i: j in N(i)} Y1_i * delta_hat_{j,S} with
// delta_hat_{j,S} = (mu_hat_j - mu_hat_{j,-S}) / (mu_hat_j (1 - mu_hat_j)).
double delta_hat(const DirectedGraph& observed, const std::vector<int>& y1,
                 const ProbitFit& fit_full, const ProbitFit& fit_omit);

struct InfluenceSet {
  Vector q;        // per-node influence values q_hat_{i,S}
  Vector h;        // least-squares projection of q on the full design
  Vector kappa1;   // length p
  Vector kappa2;   // length p - |S|
  Matrix U;        // n x p rows U_hat_j
  Matrix U_S;      // n x (p - |S|) rows U_hat_{j,S}
};

// All the asymptotic-linearization pieces for the set S identified by
// fit_omit.columns: Gamma terms, U terms against H and H_S, the kappa
// weights, q, and its projection h. H_S is the misspecified-MLE form with
// observed Y0 weights. Throws SingularHessian / RankDeficientX.
InfluenceSet influence(const DirectedGraph& observed, const Matrix& X,
                       const std::vector<int>& y0, const std::vector<int>& y1,
                       const ProbitFit& fit_full, const ProbitFit& fit_omit);

struct VarianceResult {
  double sigma2 = 0.0;   // clamped value used downstream
  double raw = 0.0;      // exact pair sum before clamping
  bool clamped = false;  // true when raw < 0 and sigma2 was floored at 1e-12
};

// sigma_hat^2_S: (1/n) sum over ordered node pairs with overlapping closed
// in-neighborhoods of (q_i1 - h_i1)(q_i2 - h_i2). The accumulation order
// matches the naive i1-major double loop, so the raw value is bit-identical
// to brute force.
VarianceResult variance(const DirectedGraph& observed, const InfluenceSet& inf);

// Cross-covariance matrix over singleton omission sets: entry (a, b) applies
// the variance pair sum to residuals of inf_by_s[a] and inf_by_s[b].
// Diagonal entries equal the corresponding variance() raw values exactly.
SymMatrix omega_hat(const DirectedGraph& observed, const std::vector<InfluenceSet>& inf_by_s);

struct ConfInterval {
  double low = 0.0;
  double high = 0.0;
};

// delta_hat -/+ z_{1-alpha/2} * sigma_hat / sqrt(n).
ConfInterval confidence_interval(double delta, double sigma, int n, double alpha);

struct OverlapReport {
  double threshold = 0.0;
  std::vector<int> flagged;  // units with mu_hat outside (c, 1-c)
  double flag_rate = 0.0;
};

// Advisory overlap diagnostic for the fitted switch probabilities.
OverlapReport overlap_diagnostic(const ProbitFit& fit, double c);

struct DecompResult {
  std::vector<int> omitted;   // 0-based omitted columns S
  double c_hat_s = 0.0;
  double c_hat_empty = 0.0;
  double delta = 0.0;         // Delta_hat_S = c_hat_s - c_hat_empty (exact algebra)
  double sigma_hat = 0.0;     // sqrt of the clamped variance
  double sigma2_raw = 0.0;
  bool sigma_clamped = false;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double level = 0.95;
  int iterations_full = 0;
  int iterations_omit = 0;
};

// Full decomposition for one omission set at the given confidence level.
DecompResult decompose(const PanelData& panel, const std::vector<int>& omit, double level);

// As above but reusing an already-computed full fit (the fit over all
// columns of panel.X).
DecompResult decompose(const PanelData& panel, const std::vector<int>& omit, double level,
                       const ProbitFit& fit_full);

}  // namespace diffnet
