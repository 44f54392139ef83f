// Test-only oracles, independent of the library's computation paths:
// a dense Jacobi eigensolver, adaptive Simpson quadrature, Gram-Schmidt
// orthobases, and synthetic dataset generators.

#ifndef EDGESIM_TESTS_SUPPORT_HPP
#define EDGESIM_TESTS_SUPPORT_HPP

#include <cmath>
#include <functional>
#include <vector>

#include "edgesim/cocoa.hpp"
#include "edgesim/rng.hpp"

namespace testsupport {

// Eigenvalues of a symmetric matrix (row-major n x n) by cyclic Jacobi.
inline std::vector<double> jacobi_eigenvalues(std::vector<double> a, int n) {
  auto at = [&](int i, int j) -> double& { return a[static_cast<std::size_t>(i * n + j)]; };
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) off += at(i, j) * at(i, j);
    if (off < 1e-24) break;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        if (std::abs(at(p, q)) < 1e-30) continue;
        const double theta = (at(q, q) - at(p, p)) / (2.0 * at(p, q));
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int i = 0; i < n; ++i) {
          const double aip = at(i, p), aiq = at(i, q);
          at(i, p) = c * aip - s * aiq;
          at(i, q) = s * aip + c * aiq;
        }
        for (int i = 0; i < n; ++i) {
          const double api = at(p, i), aqi = at(q, i);
          at(p, i) = c * api - s * aqi;
          at(q, i) = s * api + c * aqi;
        }
      }
    }
  }
  std::vector<double> eig(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) eig[static_cast<std::size_t>(i)] = at(i, i);
  return eig;
}

inline double max_eigenvalue(const std::vector<double>& sym, int n) {
  double best = -1e300;
  for (double e : jacobi_eigenvalues(sym, n)) best = std::max(best, e);
  return best;
}

// Adaptive Simpson on [a, b].
inline double simpson(const std::function<double(double)>& f, double a, double b, double eps,
                      int depth = 24) {
  const double c = 0.5 * (a + b);
  const double fa = f(a), fb = f(b), fc = f(c);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fc + fb);
  std::function<double(double, double, double, double, double, double, int)> rec =
      [&](double lo, double hi, double flo, double fhi, double fmid, double acc, int d) -> double {
    const double mid = 0.5 * (lo + hi);
    const double lmid = 0.5 * (lo + mid), rmid = 0.5 * (mid + hi);
    const double fl = f(lmid), fr = f(rmid);
    const double left = (mid - lo) / 6.0 * (flo + 4.0 * fl + fmid);
    const double right = (hi - mid) / 6.0 * (fmid + 4.0 * fr + fhi);
    if (d <= 0 || std::abs(left + right - acc) < 15.0 * eps) {
      return left + right + (left + right - acc) / 15.0;
    }
    return rec(lo, mid, flo, fmid, fl, left, d - 1) + rec(mid, hi, fmid, fhi, fr, right, d - 1);
  };
  return rec(a, b, fa, fb, fc, whole, depth);
}

// Orthonormal basis of the column span (modified Gram-Schmidt), columns of
// length m stacked in col-major order.
inline std::vector<std::vector<double>> orthobasis(const std::vector<const double*>& cols, long m) {
  std::vector<std::vector<double>> basis;
  for (const double* col : cols) {
    std::vector<double> v(col, col + m);
    for (const auto& b : basis) {
      double dot = 0.0;
      for (long i = 0; i < m; ++i) dot += v[static_cast<std::size_t>(i)] * b[static_cast<std::size_t>(i)];
      for (long i = 0; i < m; ++i) v[static_cast<std::size_t>(i)] -= dot * b[static_cast<std::size_t>(i)];
    }
    double nrm = 0.0;
    for (double x : v) nrm += x * x;
    nrm = std::sqrt(nrm);
    if (nrm > 1e-10) {
      for (double& x : v) x /= nrm;
      basis.push_back(std::move(v));
    }
  }
  return basis;
}

// Exact sigma' for small problems: stack per-block orthobases U_k and take
// lambda_max([U_1 ... U_K]^T [U_1 ... U_K]) / K.
inline double sigma_prime_exact(const edgesim::Dataset& data, const edgesim::Partition& part) {
  std::vector<std::vector<double>> stacked;
  for (const auto& blk : part.blocks) {
    std::vector<const double*> cols;
    for (long idx : blk) cols.push_back(data.column(idx));
    for (auto& b : orthobasis(cols, data.m)) stacked.push_back(std::move(b));
  }
  const int r = static_cast<int>(stacked.size());
  if (r == 0) return 0.0;
  std::vector<double> gram(static_cast<std::size_t>(r * r));
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < r; ++j) {
      double dot = 0.0;
      for (long t = 0; t < data.m; ++t) {
        dot += stacked[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)] *
               stacked[static_cast<std::size_t>(j)][static_cast<std::size_t>(t)];
      }
      gram[static_cast<std::size_t>(i * r + j)] = dot;
    }
  }
  return max_eigenvalue(gram, r) / static_cast<double>(part.devices());
}

// Synthetic classification set: unit-norm example columns, labels from a
// noisy linear rule.
inline edgesim::Dataset make_classification(long m, long n, std::uint64_t seed,
                                            double noise = 0.3) {
  edgesim::Rng rng(seed);
  edgesim::Dataset data;
  data.m = m;
  data.n = n;
  data.x.resize(static_cast<std::size_t>(m * n));
  data.y.resize(static_cast<std::size_t>(n));
  std::vector<double> w_star(static_cast<std::size_t>(m));
  double nrm = 0.0;
  for (auto& w : w_star) {
    w = rng.normal01();
    nrm += w * w;
  }
  nrm = std::sqrt(nrm);
  for (auto& w : w_star) w /= nrm;
  for (long j = 0; j < n; ++j) {
    double* col = data.column(j);
    for (long i = 0; i < m; ++i) col[i] = rng.normal01();
    double margin = 0.0;
    for (long i = 0; i < m; ++i) margin += w_star[static_cast<std::size_t>(i)] * col[i] / std::sqrt(static_cast<double>(m));
    margin += noise * rng.normal01();
    data.y[static_cast<std::size_t>(j)] = margin >= 0.0 ? 1.0 : -1.0;
  }
  data.normalize_columns();
  return data;
}

}  // namespace testsupport

#endif
