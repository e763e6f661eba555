#pragma once

#include <string>
#include <vector>

#include "diffnet/graph.hpp"
#include "diffnet/numkit.hpp"
#include "diffnet/rng.hpp"

namespace diffnet {

// Data generating process: a block-diagonal contact network of
// Barabasi-Albert villages, covariates mixed along the network, probit
// initial actions, and irreversible threshold diffusion.
struct DgpConfig {
  int n_villages = 30;
  int village_size = 50;
  int p = 4;                                   // covariate dimension incl. intercept
  Vector gamma0{0.6, -0.1, -0.3, 0.3};         // initial-action index coefficients
  Vector beta0{-1.0, 0.3, -0.4, -0.1};         // diffusion index coefficients
  double delta0 = 0.5;                         // neighbor-average weight
  double alpha = 0.5;                          // covariate dependence alignment in [0, 1]
  int t1 = 2;                                  // observation horizon
  BaVillageConfig ba;                          // village generator (village_size wins)

  int node_count() const { return n_villages * village_size; }
  void validate() const;  // throws InvalidConfig
};

struct PanelData {
  Matrix X;               // n x p design, column 0 is all ones when DGP-generated
  std::vector<int> y0;    // initial actions Y(0)
  std::vector<int> y1;    // terminal outcomes Y(t1)
  DirectedGraph observed;
};

// X = [1, X_o] with X_o = (alpha*E_c + (1-alpha)*E_tilde + I) X_tilde, where
// X_tilde is n x (p-1) iid U[0,1] and E_tilde is an independent directed ER
// graph with link probability |E_c| / (n(n-1)).
Matrix gen_covariates(const DirectedGraph& contact, const DgpConfig& cfg, RngStream rng);

// Y0_j = 1{ Phi(X_j' gamma0) >= U_j }, U_j iid uniform.
std::vector<int> gen_initial(const Matrix& X, const Vector& gamma0, RngStream rng);

struct DiffusionPath {
  // actions[t] for t = 0..t1; actions[0] == y0. Each node switches at most
  // once across all periods including t = 0.
  std::vector<std::vector<int>> actions;
  std::vector<int> y1;  // sum over t = 1..t1 of actions[t]
};

// Threshold diffusion A_{i,t} = 1{ delta0 * Abar_{i,t-1} + X_i'beta0 > U_{i,t} }
// for nodes that have not yet switched; Abar is the in-neighbor average of
// period t-1 actions (zero for isolated nodes). U_{i,t} are iid standard
// normal, drawn period-major then node-ascending.
DiffusionPath diffuse(const DirectedGraph& contact, const Matrix& X, const Vector& beta0,
                      double delta0, int t1, const std::vector<int>& y0, RngStream rng);

struct OracleEstimate {
  double value = 0.0;
  double std_error = 0.0;
  int draws = 0;
};

enum class ResimMode {
  reachable,      // re-simulate only nodes reachable from j within t1 steps
  whole_network,  // re-simulate every node (validation path, same result)
};

// Monte Carlo oracle for the average diffusion at the margin. Each draw
// shares one baseline simulation across both counterfactual arms and all
// source nodes j (common random numbers); the arm that matches the realized
// initial action is the baseline itself. Draw d uses the child stream
// rng.derive(d); the reduction order is fixed, so results do not depend on
// the thread count.
OracleEstimate adm_oracle(const DirectedGraph& contact, const Matrix& X, const Vector& gamma0,
                          const Vector& beta0, double delta0, int t1, int draws, RngStream rng,
                          int threads = 1, ResimMode mode = ResimMode::reachable);

// Maximizer of the population likelihood with columns `omit` removed, using
// exact switch probabilities Phi(X_j'gamma0). Newton iteration, converged when
// the sup-norm of the score is at most 1e-10. `omit` indices are 0-based
// columns of X and must leave at least one column.
Vector pseudo_true_gamma(const Matrix& X, const Vector& gamma0, const std::vector<int>& omit);

struct DecompTruth {
  OracleEstimate c_s;       // spatio-temporal measure C_S
  OracleEstimate delta_s;   // spurious diffusion Delta_S
  Vector gamma_star;        // pseudo-true coefficients on the kept columns
};

// Simulation oracle for (C_S, Delta_S). Switch probabilities and the
// pseudo-true fit are exact given X; only E[.|F] terms involving outcomes are
// averaged over draws.
DecompTruth delta_oracle(const DirectedGraph& contact, const DirectedGraph& observed,
                         const Matrix& X, const Vector& gamma0, const Vector& beta0,
                         double delta0, int t1, const std::vector<int>& omit, int draws,
                         RngStream rng, int threads = 1);

// Fixed-across-replications part of a scenario: the contact network, the
// observed graph, and the covariates.
struct DgpRealization {
  DirectedGraph contact;
  DirectedGraph observed;
  Matrix X;
};

DgpRealization gen_dgp(const DgpConfig& cfg, RngStream rng);

// One outcome draw on a fixed realization: fresh Y0 and diffusion path.
PanelData draw_panel(const DgpRealization& real, const DgpConfig& cfg, RngStream rng);

// Panel CSV with header x1..xp,y0,y1.
void write_panel_csv(const PanelData& panel, const std::string& path);
PanelData read_panel_csv(const std::string& path);

}  // namespace diffnet
