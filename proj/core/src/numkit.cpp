#include "diffnet/numkit.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

namespace diffnet {

namespace {
constexpr double kInvSqrt2 = 0.7071067811865475244008443621048490;
constexpr double kInvSqrt2Pi = 0.3989422804014326779399460599343819;
}  // namespace

double norm_cdf(double x) { return 0.5 * std::erfc(-x * kInvSqrt2); }

double norm_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double norm_ppf(double p) {
  if (!(p > 0.0 && p < 1.0)) throw InvalidConfig("norm_ppf requires p in (0,1)");

  // Acklam's rational approximation, then one Halley refinement against
  // norm_cdf, which brings the result to near machine precision.
  static const double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                              -2.759285104469687e+02, 1.383577518672690e+02,
                              -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                              -1.556989798598866e+02, 6.680131188771972e+01,
                              -1.328068155288572e+01};
  static const double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                              -2.400758277161838e+00, -2.549732539343734e+00,
                              4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                              2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }

  const double e = norm_cdf(x) - p;
  const double u = e / norm_pdf(x);
  x -= u / (1.0 + 0.5 * x * u);
  return x;
}

CholeskyFactor::CholeskyFactor(const SymMatrix& a) : dim_(a.dim()) {
  const int n = dim_;
  lower_.assign(static_cast<std::size_t>(n) * n, 0.0);
  double max_diag = 0.0;
  for (int i = 0; i < n; ++i) max_diag = std::max(max_diag, std::abs(a(i, i)));
  const double floor = 1e-12 * std::max(max_diag, 1.0e-300);

  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = a(i, j);
      for (int k = 0; k < j; ++k) s -= lower_[i * n + k] * lower_[j * n + k];
      if (i == j) {
        if (s <= floor) throw NotPositiveDefinite("pivot below tolerance in Cholesky");
        lower_[i * n + j] = std::sqrt(s);
      } else {
        lower_[i * n + j] = s / lower_[j * n + j];
      }
    }
  }
}

Vector CholeskyFactor::solve(const Vector& b) const {
  const int n = dim_;
  if (static_cast<int>(b.size()) != n) throw SizeMismatch("right-hand side length");
  Vector x(b);
  for (int i = 0; i < n; ++i) {
    double s = x[i];
    for (int k = 0; k < i; ++k) s -= lower_[i * n + k] * x[k];
    x[i] = s / lower_[i * n + i];
  }
  for (int i = n - 1; i >= 0; --i) {
    double s = x[i];
    for (int k = i + 1; k < n; ++k) s -= lower_[k * n + i] * x[k];
    x[i] = s / lower_[i * n + i];
  }
  return x;
}

Vector solve_spd(const SymMatrix& a, const Vector& b) { return CholeskyFactor(a).solve(b); }

SymEigen sym_eig(const SymMatrix& a) {
  const int n = a.dim();
  SymEigen out;
  out.values.assign(n, 0.0);
  out.vectors = Matrix(n, n, 0.0);
  if (n == 0) return out;

  // Work on a full copy; V accumulates the rotations.
  std::vector<double> m(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m[i * n + j] = a(i, j);
  std::vector<double> v(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) v[i * n + i] = 1.0;

  double scale = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) scale = std::max(scale, std::abs(m[i * n + j]));
  const double tol = (scale > 0.0 ? scale : 1.0) * 1e-15;

  constexpr int kMaxSweeps = 64;
  int sweep = 0;
  for (; sweep < kMaxSweeps; ++sweep) {
    double off = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) off += m[i * n + j] * m[i * n + j];
    if (std::sqrt(off) <= tol * n) break;

    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = m[p * n + q];
        if (std::abs(apq) <= tol * 1e-2) continue;
        const double app = m[p * n + p];
        const double aqq = m[q * n + q];
        const double theta = 0.5 * (aqq - app) / apq;
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double cs = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * cs;
        for (int k = 0; k < n; ++k) {
          const double mkp = m[k * n + p];
          const double mkq = m[k * n + q];
          m[k * n + p] = cs * mkp - sn * mkq;
          m[k * n + q] = sn * mkp + cs * mkq;
        }
        for (int k = 0; k < n; ++k) {
          const double mpk = m[p * n + k];
          const double mqk = m[q * n + k];
          m[p * n + k] = cs * mpk - sn * mqk;
          m[q * n + k] = sn * mpk + cs * mqk;
        }
        for (int k = 0; k < n; ++k) {
          const double vkp = v[k * n + p];
          const double vkq = v[k * n + q];
          v[k * n + p] = cs * vkp - sn * vkq;
          v[k * n + q] = sn * vkp + cs * vkq;
        }
      }
    }
  }
  if (sweep == kMaxSweeps) throw NoConvergence("Jacobi sweep budget exhausted");

  // Sort eigenpairs by descending eigenvalue.
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](int x, int y) { return m[x * n + x] > m[y * n + y]; });
  for (int c = 0; c < n; ++c) {
    const int src = order[c];
    out.values[c] = m[src * n + src];
    for (int r = 0; r < n; ++r) out.vectors(r, c) = v[r * n + src];
  }
  return out;
}

PsdSqrt psd_sqrt(const SymMatrix& a) {
  const int n = a.dim();
  const SymEigen eig = sym_eig(a);
  PsdSqrt out;
  out.root = SymMatrix(n);
  for (int c = 0; c < n; ++c) {
    if (eig.values[c] < 0.0) ++out.clipped_eigenvalues;
  }
  // V diag(sqrt(max(lambda,0))) V'
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      double s = 0.0;
      for (int c = 0; c < n; ++c) {
        const double lam = eig.values[c];
        if (lam <= 0.0) continue;
        s += eig.vectors(i, c) * std::sqrt(lam) * eig.vectors(j, c);
      }
      out.root.set(i, j, s);
    }
  }
  return out;
}

double empirical_percentile(const Vector& samples, double q) {
  if (samples.empty()) throw EmptySample("empirical_percentile");
  if (!(q > 0.0 && q < 1.0)) throw InvalidConfig("percentile level must be in (0,1)");
  const std::size_t b = samples.size();
  std::size_t k = static_cast<std::size_t>(std::ceil(q * static_cast<double>(b)));
  if (k < 1) k = 1;
  if (k > b) k = b;
  Vector sorted(samples);
  std::nth_element(sorted.begin(), sorted.begin() + (k - 1), sorted.end());
  return sorted[k - 1];
}

}  // namespace diffnet
