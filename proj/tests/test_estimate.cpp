#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "diffnet/estimate.hpp"
#include "oracles.hpp"

using namespace diffnet;

namespace {

Matrix intercept_only(int n) { return Matrix(n, 1, 1.0); }

struct SmallData {
  DirectedGraph observed;
  Matrix X;
  std::vector<int> y0, y1;
};

SmallData simulated_small(int villages, int size, std::uint64_t seed, double delta0 = 0.5) {
  DgpConfig cfg;
  cfg.n_villages = villages;
  cfg.village_size = size;
  cfg.ba.seed_size = std::min(cfg.ba.seed_size, size);
  cfg.delta0 = delta0;
  const DgpRealization real = gen_dgp(cfg, RngStream(seed, 0));
  const PanelData panel = draw_panel(real, cfg, RngStream(seed, 1));
  return SmallData{panel.observed, panel.X, panel.y0, panel.y1};
}

}  // namespace

TEST_CASE("probit intercept-only closed forms") {
  std::vector<int> y(10, 0);
  for (int i = 0; i < 5; ++i) y[i] = 1;
  const ProbitFit fit = probit_fit(intercept_only(10), y);
  CHECK(fit.converged);
  CHECK(std::abs(fit.gamma_hat[0]) < 1e-8);

  for (double m : {0.2, 0.35, 0.6, 0.85}) {
    const int n = 200;
    std::vector<int> yy(n, 0);
    for (int i = 0; i < static_cast<int>(m * n + 0.5); ++i) yy[i] = 1;
    const double mean = std::accumulate(yy.begin(), yy.end(), 0.0) / n;
    const ProbitFit f = probit_fit(intercept_only(n), yy);
    CHECK(std::abs(f.gamma_hat[0] - norm_ppf(mean)) < 1e-8);
  }
}

TEST_CASE("analytic score and Hessian match finite differences") {
  RngStream rng(40, 0);
  for (int inst = 0; inst < 10; ++inst) {
    const int n = 40;
    const int p = 3;
    Matrix x(n, p);
    std::vector<int> y(n);
    for (int i = 0; i < n; ++i) {
      x(i, 0) = 1.0;
      x(i, 1) = rng.uniform();
      x(i, 2) = 2.0 * rng.uniform() - 1.0;
      y[i] = rng.uniform() < 0.5 ? 1 : 0;
    }
    Vector gamma{0.3 * (rng.uniform() - 0.5), rng.uniform() - 0.5, rng.uniform() - 0.5};

    const Vector score = probit_score(x, y, gamma);
    const SymMatrix hess = probit_hessian(x, y, gamma);
    for (int c = 0; c < p; ++c) {
      const double fd = oracle::central_difference(
          [&](double v) {
            Vector g2(gamma);
            g2[c] = v;
            return probit_loglik(x, y, g2);
          },
          gamma[c], 1e-6);
      REQUIRE(std::abs(fd - score[c]) <= 1e-6 * std::max(1.0, std::abs(score[c])));
      for (int d = 0; d < p; ++d) {
        const double fd2 = oracle::central_difference(
            [&](double v) {
              Vector g2(gamma);
              g2[d] = v;
              return probit_score(x, y, g2)[c];
            },
            gamma[d], 1e-6);
        REQUIRE(std::abs(fd2 - hess(c, d)) <= 1e-4 * std::max(1.0, std::abs(hess(c, d))));
      }
    }
  }
}

TEST_CASE("probit estimates recover the DGP coefficients") {
  DgpConfig cfg;
  cfg.n_villages = 12;
  cfg.village_size = 50;
  const DgpRealization real = gen_dgp(cfg, RngStream(41, 0));
  const int n = real.X.rows();

  int within = 0, total = 0;
  RngStream rng(41, 1);
  for (int rep = 0; rep < 50; ++rep) {
    const std::vector<int> y0 = gen_initial(real.X, cfg.gamma0, rng.derive(rep));
    const ProbitFit fit = probit_fit(real.X, y0);
    REQUIRE(fit.converged);
    // Fisher standard errors from the fitted information matrix.
    SymMatrix info(cfg.p);
    for (int a = 0; a < cfg.p; ++a)
      for (int b = a; b < cfg.p; ++b) info.set(a, b, -n * fit.hessian(a, b));
    const CholeskyFactor chol(info);
    for (int c = 0; c < cfg.p; ++c) {
      Vector e(cfg.p, 0.0);
      e[c] = 1.0;
      const double se = std::sqrt(chol.solve(e)[c]);
      ++total;
      if (std::abs(fit.gamma_hat[c] - cfg.gamma0[c]) <= 3.0 * se) ++within;
    }
  }
  CHECK(static_cast<double>(within) / total >= 0.95);
}

TEST_CASE("probit detects separation") {
  const int n = 24;
  Matrix x(n, 1);
  std::vector<int> y(n);
  for (int i = 0; i < n; ++i) {
    y[i] = i < n / 2 ? 1 : 0;
    x(i, 0) = y[i] ? 1.0 : -1.0;
  }
  CHECK_THROWS_AS(probit_fit(x, y), SeparationDetected);
}

TEST_CASE("probit rejects a collinear design") {
  const int n = 30;
  Matrix x(n, 2);
  std::vector<int> y(n);
  RngStream rng(42, 0);
  for (int i = 0; i < n; ++i) {
    x(i, 0) = 1.0;
    x(i, 1) = 1.0;
    y[i] = rng.uniform() < 0.5 ? 1 : 0;
  }
  CHECK_THROWS_AS(probit_fit(x, y), SingularHessian);
}

TEST_CASE("c_stat on fixtures") {
  const DirectedGraph empty(3, {{}, {}, {}});
  const Vector mu{0.4, 0.5, 0.6};
  const Vector s2{0.24, 0.25, 0.24};
  CHECK(c_stat(empty, {1, 0, 1}, {0, 1, 1}, mu, s2) == 0.0);

  const DirectedGraph g(3, {{}, {0}, {0, 1}});
  CHECK(c_stat(g, {1, 0, 1}, {0, 0, 0}, mu, s2) == 0.0);
  // Hand-computed double sum.
  const double got = c_stat(g, {1, 0, 1}, {0, 1, 1}, mu, s2);
  CHECK(got == doctest::Approx(1.0).epsilon(1e-12));

  const Vector degenerate{0.24, 0.0, 0.24};
  CHECK_THROWS_AS(c_stat(g, {1, 0, 1}, {0, 1, 1}, mu, degenerate), DegenerateVariance);
}

TEST_CASE("delta_hat fixtures and identities") {
  // Hand-built fits: only mu_hat / sigma2_hat enter.
  ProbitFit full, omit;
  full.mu_hat = {0.3, 0.6, 0.5, 0.4};
  omit.mu_hat = {0.35, 0.5, 0.45, 0.42};
  full.sigma2_hat.resize(4);
  for (int j = 0; j < 4; ++j) full.sigma2_hat[j] = full.mu_hat[j] * (1.0 - full.mu_hat[j]);

  const DirectedGraph g(4, {{}, {0}, {0, 1}, {2}});
  const std::vector<int> y1{1, 0, 1, 1};
  const double d0 = (0.3 - 0.35) / 0.21;
  const double d1 = (0.6 - 0.5) / 0.24;
  const double d2 = (0.5 - 0.45) / 0.25;
  const double expect = (d0 + d1 + d2) / 4.0;  // switchers 2 and 3 contribute
  CHECK(delta_hat(g, y1, full, omit) == doctest::Approx(expect).epsilon(1e-12));

  // Empty omission: identical fits give exactly zero.
  CHECK(delta_hat(g, y1, full, full) == 0.0);

  // Equality with the difference of the two C statistics.
  const std::vector<int> y0{1, 0, 1, 0};
  const double c_full = c_stat(g, y0, y1, full.mu_hat, full.sigma2_hat);
  const double c_omit = c_stat(g, y0, y1, omit.mu_hat, full.sigma2_hat);
  CHECK(std::abs((c_omit - c_full) - delta_hat(g, y1, full, omit)) < 1e-12);
}

TEST_CASE("influence matches an independent reimplementation") {
  const SmallData data = simulated_small(1, 40, 43);
  const ProbitFit fit_full = probit_fit(data.X, data.y0);
  std::vector<int> keep{0, 1, 2};
  Matrix design(data.X.rows(), 3);
  for (int i = 0; i < data.X.rows(); ++i)
    for (int c = 0; c < 3; ++c) design(i, c) = data.X(i, c);
  ProbitFit fit_omit = probit_fit(design, data.y0);
  fit_omit.columns = keep;

  const InfluenceSet inf =
      influence(data.observed, data.X, data.y0, data.y1, fit_full, fit_omit);
  const oracle::NaiveInfluence ref = oracle::naive_influence(
      data.observed, data.X, data.y0, data.y1, {3}, fit_full.gamma_hat, fit_omit.gamma_hat);

  const int n = data.X.rows();
  for (int c = 0; c < 4; ++c) CHECK(std::abs(inf.kappa1[c] - ref.kappa1[c]) < 1e-8);
  for (int c = 0; c < 3; ++c) CHECK(std::abs(inf.kappa2[c] - ref.kappa2[c]) < 1e-8);
  for (int i = 0; i < n; ++i) {
    REQUIRE(std::abs(inf.q[i] - ref.q[i]) < 1e-8);
    REQUIRE(std::abs(inf.h[i] - ref.h[i]) < 1e-8);
    for (int c = 0; c < 4; ++c) REQUIRE(std::abs(inf.U(i, c) - ref.U(i, c)) < 1e-8);
    for (int c = 0; c < 3; ++c) REQUIRE(std::abs(inf.U_S(i, c) - ref.U_S(i, c)) < 1e-8);
  }
}

TEST_CASE("influence invariants") {
  const SmallData data = simulated_small(2, 30, 44);
  const ProbitFit fit_full = probit_fit(data.X, data.y0);
  Matrix design(data.X.rows(), 3);
  for (int i = 0; i < data.X.rows(); ++i)
    for (int c = 0; c < 3; ++c) design(i, c) = data.X(i, c);
  ProbitFit fit_omit = probit_fit(design, data.y0);
  fit_omit.columns = {0, 1, 2};

  const InfluenceSet inf =
      influence(data.observed, data.X, data.y0, data.y1, fit_full, fit_omit);
  const int n = data.X.rows();
  const int p = data.X.cols();

  SUBCASE("score identity: the U rows sum to zero") {
    for (int c = 0; c < p; ++c) {
      double s = 0.0;
      for (int j = 0; j < n; ++j) s += inf.U(j, c);
      CHECK(std::abs(s) < 1e-5);
    }
  }

  SUBCASE("projection orthogonality X'(q - h) = 0") {
    double scale = 1.0;
    for (int c = 0; c < p; ++c) {
      double xq = 0.0;
      for (int i = 0; i < n; ++i) xq += data.X(i, c) * inf.q[i];
      scale = std::max(scale, std::abs(xq));
    }
    for (int c = 0; c < p; ++c) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += data.X(i, c) * (inf.q[i] - inf.h[i]);
      CHECK(std::abs(s) / scale < 1e-8);
    }
  }

  SUBCASE("no switchers means identically zero influence") {
    const std::vector<int> none(n, 0);
    const InfluenceSet zero =
        influence(data.observed, data.X, data.y0, none, fit_full, fit_omit);
    for (int i = 0; i < n; ++i) CHECK(zero.q[i] == 0.0);
  }
}

TEST_CASE("influence reports a rank-deficient projection design") {
  const int n = 6;
  const DirectedGraph g(n, {{}, {0}, {1}, {}, {3}, {}});
  Matrix x(n, 2);
  for (int i = 0; i < n; ++i) {
    x(i, 0) = 1.0;
    x(i, 1) = 1.0;  // duplicate column
  }
  ProbitFit fake;
  fake.gamma_hat = {0.0, 0.0};
  fake.mu_hat.assign(n, 0.5);
  fake.sigma2_hat.assign(n, 0.25);
  fake.hessian = SymMatrix(2);
  fake.hessian.set(0, 0, -1.0);
  fake.hessian.set(1, 1, -1.0);
  fake.columns = {0, 1};
  ProbitFit fake_omit;
  fake_omit.gamma_hat = {0.0};
  fake_omit.mu_hat.assign(n, 0.5);
  fake_omit.sigma2_hat.assign(n, 0.25);
  fake_omit.hessian = SymMatrix(1);
  fake_omit.hessian.set(0, 0, -1.0);
  fake_omit.columns = {0};
  const std::vector<int> y0(n, 0);
  const std::vector<int> y1(n, 1);
  CHECK_THROWS_AS(influence(g, x, y0, y1, fake, fake_omit), RankDeficientX);
}

TEST_CASE("variance pair sum") {
  SUBCASE("perfect projection gives zero without clamping") {
    const DirectedGraph g(3, {{}, {0}, {1}});
    InfluenceSet inf;
    inf.q = {0.5, -0.25, 1.0};
    inf.h = inf.q;
    const VarianceResult v = variance(g, inf);
    CHECK(v.sigma2 == 0.0);
    CHECK(!v.clamped);
  }

  SUBCASE("edgeless graph keeps only diagonal terms") {
    const DirectedGraph g(4, {{}, {}, {}, {}});
    InfluenceSet inf;
    inf.q = {1.0, -2.0, 0.5, 0.25};
    inf.h.assign(4, 0.0);
    const VarianceResult v = variance(g, inf);
    const double expect = (1.0 + 4.0 + 0.25 + 0.0625) / 4.0;
    CHECK(v.raw == doctest::Approx(expect).epsilon(1e-15));
    CHECK(!v.clamped);
  }

  SUBCASE("negative raw value clamps to the floor with a flag") {
    const DirectedGraph g(3, {{}, {0}, {1}});
    InfluenceSet inf;
    inf.q = {1.0, -1.0, 1.0};
    inf.h.assign(3, 0.0);
    const VarianceResult v = variance(g, inf);
    CHECK(v.raw == doctest::Approx(-1.0 / 3.0));
    CHECK(v.clamped);
    CHECK(v.sigma2 == 1e-12);
  }

  SUBCASE("bit-exact against the brute-force double loop") {
    const SmallData data = simulated_small(2, 30, 45);
    const ProbitFit fit_full = probit_fit(data.X, data.y0);
    Matrix design(data.X.rows(), 3);
    for (int i = 0; i < data.X.rows(); ++i)
      for (int c = 0; c < 3; ++c) design(i, c) = data.X(i, c);
    ProbitFit fit_omit = probit_fit(design, data.y0);
    fit_omit.columns = {0, 1, 2};
    const InfluenceSet inf =
        influence(data.observed, data.X, data.y0, data.y1, fit_full, fit_omit);
    Vector r(data.X.rows());
    for (int i = 0; i < data.X.rows(); ++i) r[i] = inf.q[i] - inf.h[i];
    const VarianceResult v = variance(data.observed, inf);
    REQUIRE(v.raw == oracle::brute_pair_sum(data.observed, r, r));
  }
}

TEST_CASE("omega matrix") {
  const SmallData data = simulated_small(2, 30, 46);
  const ProbitFit fit_full = probit_fit(data.X, data.y0);
  std::vector<InfluenceSet> infs;
  std::vector<Vector> residuals;
  for (int s = 1; s < 4; ++s) {
    std::vector<int> keep;
    for (int c = 0; c < 4; ++c)
      if (c != s) keep.push_back(c);
    Matrix design(data.X.rows(), 3);
    for (int i = 0; i < data.X.rows(); ++i)
      for (int c = 0; c < 3; ++c) design(i, c) = data.X(i, keep[c]);
    ProbitFit fit_omit = probit_fit(design, data.y0);
    fit_omit.columns = keep;
    infs.push_back(influence(data.observed, data.X, data.y0, data.y1, fit_full, fit_omit));
    Vector r(data.X.rows());
    for (int i = 0; i < data.X.rows(); ++i) r[i] = infs.back().q[i] - infs.back().h[i];
    residuals.push_back(r);
  }

  const SymMatrix omega = omega_hat(data.observed, infs);
  REQUIRE(omega.dim() == 3);

  // Diagonal equals the variance pair sum before clamping, bit for bit.
  for (int s = 0; s < 3; ++s) {
    const VarianceResult v = variance(data.observed, infs[s]);
    REQUIRE(omega(s, s) == v.raw);
  }
  // Exact symmetry and brute-force agreement.
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      REQUIRE(omega(a, b) == omega(b, a));
      if (a <= b) {
        REQUIRE(omega(a, b) == oracle::brute_pair_sum(data.observed, residuals[a], residuals[b]));
      }
    }
  }

  // Single-set case reduces to the variance.
  const SymMatrix one = omega_hat(data.observed, {infs[0]});
  CHECK(one.dim() == 1);
  CHECK(one(0, 0) == variance(data.observed, infs[0]).raw);
}

TEST_CASE("confidence intervals") {
  const ConfInterval degenerate = confidence_interval(0.25, 0.0, 100, 0.05);
  CHECK(degenerate.low == 0.25);
  CHECK(degenerate.high == 0.25);

  const ConfInterval ci = confidence_interval(0.0, 1.0, 100, 0.05);
  CHECK(std::abs(ci.low + 0.19599639845400545) < 1e-7);
  CHECK(std::abs(ci.high - 0.19599639845400545) < 1e-7);

  const ConfInterval wide = confidence_interval(0.0, 1.0, 100, 0.01);
  CHECK(wide.high > ci.high);
  CHECK_THROWS_AS(confidence_interval(0.0, -1.0, 10, 0.05), InvalidConfig);
  CHECK_THROWS_AS(confidence_interval(0.0, 1.0, 10, 0.0), InvalidConfig);
}

TEST_CASE("overlap diagnostic") {
  ProbitFit fit;
  fit.mu_hat.assign(10, 0.5);
  const OverlapReport clean = overlap_diagnostic(fit, 0.01);
  CHECK(clean.flagged.empty());
  CHECK(clean.flag_rate == 0.0);

  fit.mu_hat[3] = 0.999;
  const OverlapReport flagged = overlap_diagnostic(fit, 0.01);
  REQUIRE(flagged.flagged.size() == 1);
  CHECK(flagged.flagged[0] == 3);
  CHECK(flagged.flag_rate == doctest::Approx(0.1));
}

TEST_CASE("decomposition identity on simulated datasets") {
  RngStream rng(47, 0);
  for (int inst = 0; inst < 20; ++inst) {
    DgpConfig cfg;
    cfg.n_villages = 1 + static_cast<int>(rng.uniform() * 4);
    cfg.village_size = 50;
    cfg.alpha = rng.uniform();
    const DgpRealization real = gen_dgp(cfg, RngStream(48, inst));
    PanelData panel = draw_panel(real, cfg, RngStream(49, inst));

    std::vector<int> omit{1 + static_cast<int>(rng.uniform() * 3)};
    if (rng.uniform() < 0.3) omit.push_back(1 + (omit[0] % 3));
    const DecompResult res = decompose(panel, omit, 0.95);
    REQUIRE(std::abs(res.c_hat_s - res.c_hat_empty - res.delta) <= 1e-10);
    CHECK(res.ci_low <= res.delta);
    CHECK(res.delta <= res.ci_high);
    CHECK(res.sigma_hat >= 0.0);
  }
}
