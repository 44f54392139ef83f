#include "edgesim/cocoa.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include "edgesim/completion.hpp"
#include "edgesim/rng.hpp"

namespace edgesim {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kDomainEps = 1e-12;  // logistic conjugate boundary shrink
}  // namespace

void Dataset::validate() const {
  if (m < 1 || n < 1) throw std::invalid_argument("Dataset: need m >= 1, n >= 1");
  if (static_cast<long>(x.size()) != m * n || static_cast<long>(y.size()) != n) {
    throw std::invalid_argument("Dataset: feature/label storage does not match m, n");
  }
  for (double v : x) {
    if (!std::isfinite(v)) throw std::invalid_argument("Dataset: non-finite feature");
  }
  for (double v : y) {
    if (!std::isfinite(v)) throw std::invalid_argument("Dataset: non-finite label");
  }
}

void Dataset::normalize_columns() {
  for (long j = 0; j < n; ++j) {
    double* col = column(j);
    double nrm = 0.0;
    for (long i = 0; i < m; ++i) nrm += col[i] * col[i];
    nrm = std::sqrt(nrm);
    if (nrm > 0.0) {
      for (long i = 0; i < m; ++i) col[i] /= nrm;
    }
  }
}

std::vector<long> Partition::sizes() const {
  std::vector<long> s;
  s.reserve(blocks.size());
  for (const auto& b : blocks) s.push_back(static_cast<long>(b.size()));
  return s;
}

void Partition::validate() const {
  if (blocks.empty()) throw std::invalid_argument("Partition: no blocks");
  std::vector<char> seen(static_cast<std::size_t>(n_total), 0);
  long covered = 0;
  for (const auto& b : blocks) {
    for (long idx : b) {
      if (idx < 0 || idx >= n_total) throw std::invalid_argument("Partition: index out of range");
      if (seen[static_cast<std::size_t>(idx)]) {
        throw std::invalid_argument("Partition: duplicate example allocation");
      }
      seen[static_cast<std::size_t>(idx)] = 1;
      ++covered;
    }
  }
  if (covered != n_total) throw std::invalid_argument("Partition: blocks do not cover the dataset");
}

Partition partition_dataset(long n_total, int k_devices, PartitionMode mode, std::uint64_t seed) {
  if (n_total < 1 || k_devices < 1) throw std::invalid_argument("need n >= 1, k >= 1");
  Partition part;
  part.n_total = n_total;
  part.blocks.assign(static_cast<std::size_t>(k_devices), {});
  Rng rng(mix_seed(seed, 0));

  if (mode == PartitionMode::uniform) {
    if (k_devices > n_total) {
      std::fprintf(stderr, "partition_dataset: K=%d exceeds N=%ld, some blocks are empty\n",
                   k_devices, n_total);
    }
    const std::vector<long> order = shuffled_indices(n_total, rng);
    long cursor = 0;
    for (int k = 0; k < k_devices; ++k) {
      long size = n_total / k_devices + (k < n_total % k_devices ? 1 : 0);
      auto& blk = part.blocks[static_cast<std::size_t>(k)];
      blk.assign(order.begin() + cursor, order.begin() + cursor + size);
      cursor += size;
    }
  } else {
    // Uniform-simplex weights via normalized exponentials, then a
    // categorical draw per example (multinomial block sizes).
    std::vector<double> cum(static_cast<std::size_t>(k_devices));
    double total = 0.0;
    for (int k = 0; k < k_devices; ++k) {
      total += rng.exponential(1.0);
      cum[static_cast<std::size_t>(k)] = total;
    }
    for (auto& c : cum) c /= total;
    for (long j = 0; j < n_total; ++j) {
      const double u = rng.uniform01();
      const auto it = std::lower_bound(cum.begin(), cum.end(), u);
      auto k = static_cast<std::size_t>(it - cum.begin());
      if (k >= cum.size()) k = cum.size() - 1;
      part.blocks[k].push_back(j);
    }
  }
  return part;
}

double LossKit::loss(double a, double y) const {
  if (kind == LossKind::squared) {
    const double d = a - y;
    return 0.5 * d * d;
  }
  const double z = -y * a;
  return z > 30.0 ? z : std::log1p(std::exp(z));
}

double LossKit::loss_deriv(double a, double y) const {
  if (kind == LossKind::squared) return a - y;
  const double z = -y * a;
  return -y / (1.0 + std::exp(-z));
}

double LossKit::conjugate(double b, double y) const {
  if (kind == LossKind::squared) return 0.5 * b * b + b * y;
  const double u = -y * b;
  if (u < -1e-9 || u > 1.0 + 1e-9) return kInf;
  const double uc = std::clamp(u, 0.0, 1.0);
  const double t1 = uc > 0.0 ? uc * std::log(uc) : 0.0;
  const double t2 = uc < 1.0 ? (1.0 - uc) * std::log(1.0 - uc) : 0.0;
  return t1 + t2;
}

double LossKit::conjugate_deriv(double b, double y) const {
  if (kind == LossKind::squared) return b + y;
  const double u = std::clamp(-y * b, kDomainEps, 1.0 - kDomainEps);
  return -y * std::log(u / (1.0 - u));
}

double LossKit::conjugate_curvature(double b, double y) const {
  if (kind == LossKind::squared) return 1.0;
  const double u = std::clamp(-y * b, 1e-6, 1.0 - 1e-6);
  return 1.0 / (u * (1.0 - u));
}

DualState DualState::zero(const Dataset& data, double lambda) {
  DualState s;
  s.lambda_reg = lambda;
  s.alpha.assign(static_cast<std::size_t>(data.n), 0.0);
  s.shared_v.assign(static_cast<std::size_t>(data.m), 0.0);
  s.model_w.assign(static_cast<std::size_t>(data.m), 0.0);
  return s;
}

void DualState::refresh_v(const Dataset& data) {
  std::fill(shared_v.begin(), shared_v.end(), 0.0);
  for (long j = 0; j < data.n; ++j) {
    const double a = alpha[static_cast<std::size_t>(j)];
    if (a == 0.0) continue;
    const double* col = data.column(j);
    for (long i = 0; i < data.m; ++i) shared_v[static_cast<std::size_t>(i)] += a * col[i];
  }
  refresh_w();
}

void DualState::refresh_w() {
  const double scale = 1.0 / (lambda_reg * static_cast<double>(alpha.size()));
  for (std::size_t i = 0; i < shared_v.size(); ++i) model_w[i] = shared_v[i] * scale;
}

double sigma_max(const Dataset& data, const Partition& part, double tol) {
  data.validate();
  part.validate();
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");

  double best = 0.0;
  for (const auto& blk : part.blocks) {
    if (blk.empty()) continue;
    const auto nk = blk.size();
    std::vector<double> v(nk), u(nk), w(static_cast<std::size_t>(data.m));
    for (std::size_t i = 0; i < nk; ++i) {
      v[i] = 1.0 + 0.1 * static_cast<double>(i % 7);  // breaks symmetry deterministically
    }
    double lambda_prev = 0.0;
    for (int it = 0; it < 10000; ++it) {
      std::fill(w.begin(), w.end(), 0.0);
      for (std::size_t i = 0; i < nk; ++i) {
        const double* col = data.column(blk[i]);
        for (long r = 0; r < data.m; ++r) w[static_cast<std::size_t>(r)] += v[i] * col[r];
      }
      double lambda_now = 0.0;
      for (double x : w) lambda_now += x * x;  // ||X v||^2 with ||v|| = 1
      if (lambda_now == 0.0) break;            // block maps v to zero; restart not needed, value is 0
      for (std::size_t i = 0; i < nk; ++i) {
        const double* col = data.column(blk[i]);
        double dot = 0.0;
        for (long r = 0; r < data.m; ++r) dot += w[static_cast<std::size_t>(r)] * col[r];
        u[i] = dot;
      }
      double norm = 0.0;
      for (double x : u) norm += x * x;
      norm = std::sqrt(norm);
      for (std::size_t i = 0; i < nk; ++i) v[i] = u[i] / norm;
      if (it > 0 && std::abs(lambda_now - lambda_prev) <= tol * lambda_now) {
        lambda_prev = lambda_now;
        break;
      }
      lambda_prev = lambda_now;
    }
    best = std::max(best, lambda_prev);
  }
  return best;
}

namespace {

// Block products b_k = X_k alpha_k for the sigma' ratio.
struct RatioWork {
  std::vector<std::vector<double>> block_v;  // per block, length M
  std::vector<double> sum_v;                 // sum of block products
  double numerator = 0.0;
  double denominator = 0.0;

  void compute(const Dataset& data, const Partition& part, const std::vector<double>& a) {
    const auto kk = part.blocks.size();
    block_v.assign(kk, std::vector<double>(static_cast<std::size_t>(data.m), 0.0));
    sum_v.assign(static_cast<std::size_t>(data.m), 0.0);
    denominator = 0.0;
    for (std::size_t k = 0; k < kk; ++k) {
      auto& bv = block_v[k];
      for (long idx : part.blocks[k]) {
        const double ai = a[static_cast<std::size_t>(idx)];
        if (ai == 0.0) continue;
        const double* col = data.column(idx);
        for (long i = 0; i < data.m; ++i) bv[static_cast<std::size_t>(i)] += ai * col[i];
      }
      double nrm = 0.0;
      for (std::size_t i = 0; i < bv.size(); ++i) {
        nrm += bv[i] * bv[i];
        sum_v[i] += bv[i];
      }
      denominator += nrm;
    }
    numerator = 0.0;
    for (double x : sum_v) numerator += x * x;
  }
};

}  // namespace

double sigma_prime(const Dataset& data, const Partition& part, SigmaPrimeMode mode,
                   int trials, std::uint64_t seed) {
  data.validate();
  part.validate();
  const int k = part.devices();
  if (mode == SigmaPrimeMode::safe_bound) return 1.0;
  if (trials < 1) throw std::invalid_argument("estimate mode needs trials >= 1");

  // Projected gradient ascent on the generalized Rayleigh ratio
  // ||X a||^2 / sum_k ||X_k a_k||^2, restarted from seeded random points.
  double best_ratio = 0.0;
  RatioWork work;
  for (int trial = 0; trial < trials; ++trial) {
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(trial)));
    std::vector<double> a(static_cast<std::size_t>(data.n));
    for (auto& ai : a) ai = rng.normal01();
    work.compute(data, part, a);
    if (work.denominator < 1e-12) continue;  // degenerate start, next restart

    double ratio = work.numerator / work.denominator;
    for (int it = 0; it < 200; ++it) {
      // grad_i = (2/den) (x_i . s - ratio * x_i . b_{k(i)})
      std::vector<double> grad(a.size(), 0.0);
      for (std::size_t kb = 0; kb < part.blocks.size(); ++kb) {
        for (long idx : part.blocks[kb]) {
          const double* col = data.column(idx);
          double ds = 0.0, db = 0.0;
          for (long i = 0; i < data.m; ++i) {
            ds += work.sum_v[static_cast<std::size_t>(i)] * col[i];
            db += work.block_v[kb][static_cast<std::size_t>(i)] * col[i];
          }
          grad[static_cast<std::size_t>(idx)] = 2.0 / work.denominator * (ds - ratio * db);
        }
      }
      double gnorm = 0.0;
      for (double g : grad) gnorm += g * g;
      if (gnorm < 1e-18) break;

      double step = 1.0;
      bool improved = false;
      for (int half = 0; half < 30; ++half) {
        std::vector<double> cand(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) cand[i] = a[i] + step * grad[i];
        RatioWork cw;
        cw.compute(data, part, cand);
        if (cw.denominator > 1e-12 && cw.numerator / cw.denominator > ratio * (1.0 + 1e-12)) {
          a.swap(cand);
          work = std::move(cw);
          ratio = work.numerator / work.denominator;
          improved = true;
          break;
        }
        step *= 0.5;
      }
      if (!improved) break;
    }
    best_ratio = std::max(best_ratio, ratio);
  }
  return best_ratio / static_cast<double>(k);
}

double local_objective(const DualState& state, const std::vector<long>& block_indices,
                       const Dataset& data, const LossKit& kit, double gamma,
                       double sigma_sub, int k_devices, const std::vector<double>& delta) {
  const double n = static_cast<double>(data.n);
  const double lam = state.lambda_reg;

  std::vector<double> z(static_cast<std::size_t>(data.m), 0.0);
  for (std::size_t i = 0; i < block_indices.size(); ++i) {
    const double d = delta[i];
    if (d == 0.0) continue;
    const double* col = data.column(block_indices[i]);
    for (long r = 0; r < data.m; ++r) z[static_cast<std::size_t>(r)] += d * col[r];
  }

  double wz = 0.0, zz = 0.0, vv = 0.0;
  for (std::size_t r = 0; r < z.size(); ++r) {
    wz += state.model_w[r] * z[r];
    zz += z[r] * z[r];
    vv += state.model_w[r] * state.model_w[r];
  }
  double conj_sum = 0.0;
  for (std::size_t i = 0; i < block_indices.size(); ++i) {
    const auto idx = static_cast<std::size_t>(block_indices[i]);
    conj_sum += kit.conjugate(-state.alpha[idx] - delta[i], data.y[idx]);
  }
  // (lambda/K) r*(v/(lambda N)) with r* = 0.5 ||.||^2 and w = v/(lambda N).
  const double regular = lam / static_cast<double>(k_devices) * 0.5 * vv;
  return regular + wz / n + gamma * sigma_sub / (2.0 * lam * n * n) * zz + conj_sum / n;
}

std::vector<double> local_gradient(const DualState& state, const std::vector<long>& block_indices,
                                   const Dataset& data, const LossKit& kit, double gamma,
                                   double sigma_sub, const std::vector<double>& delta) {
  const double n = static_cast<double>(data.n);
  const double lam = state.lambda_reg;

  std::vector<double> z(static_cast<std::size_t>(data.m), 0.0);
  for (std::size_t i = 0; i < block_indices.size(); ++i) {
    const double d = delta[i];
    if (d == 0.0) continue;
    const double* col = data.column(block_indices[i]);
    for (long r = 0; r < data.m; ++r) z[static_cast<std::size_t>(r)] += d * col[r];
  }

  const double quad_scale = gamma * sigma_sub / (lam * n * n);
  std::vector<double> grad(block_indices.size());
  for (std::size_t i = 0; i < block_indices.size(); ++i) {
    const auto idx = static_cast<std::size_t>(block_indices[i]);
    const double* col = data.column(block_indices[i]);
    double wdot = 0.0, zdot = 0.0;
    for (long r = 0; r < data.m; ++r) {
      wdot += state.model_w[static_cast<std::size_t>(r)] * col[r];
      zdot += z[static_cast<std::size_t>(r)] * col[r];
    }
    const double conj_d = kit.conjugate_deriv(-state.alpha[idx] - delta[i], data.y[idx]);
    grad[i] = wdot / n + quad_scale * zdot - conj_d / n;
    if (!std::isfinite(grad[i])) {
      throw std::runtime_error("local_gradient: non-finite gradient at block coordinate " +
                               std::to_string(i));
    }
  }
  return grad;
}

BlockUpdate local_solve(const DualState& state, int block, const Partition& part,
                        const Dataset& data, const LossKit& kit, double gamma,
                        double sigma_sub, double step, long iters, double grad_tol) {
  if (iters < 1) throw std::invalid_argument("iters must be >= 1");
  if (block < 0 || block >= part.devices()) throw std::invalid_argument("block out of range");
  const auto& indices = part.blocks[static_cast<std::size_t>(block)];

  BlockUpdate upd;
  upd.block = block;
  upd.delta.assign(indices.size(), 0.0);
  upd.x_delta.assign(static_cast<std::size_t>(data.m), 0.0);
  if (indices.empty()) return upd;

  const double n = static_cast<double>(data.n);
  const double lam = state.lambda_reg;

  double frob = 0.0;
  for (long idx : indices) {
    const double* col = data.column(idx);
    for (long r = 0; r < data.m; ++r) frob += col[r] * col[r];
  }
  const double l_quad = gamma * sigma_sub * frob / (lam * n * n);

  // Projection onto the conjugate domain: y(alpha + delta) stays in
  // [eps, 1 - eps] for the logistic kit, no-op for squared loss.
  auto clamp_feasible = [&](std::vector<double>& d) {
    if (kit.kind != LossKind::logistic) return;
    for (std::size_t i = 0; i < indices.size(); ++i) {
      const auto idx = static_cast<std::size_t>(indices[i]);
      const double y = data.y[idx];
      const double u = y * (state.alpha[idx] + d[i]);
      if (u < kDomainEps) d[i] = y * kDomainEps - state.alpha[idx];
      if (u > 1.0 - kDomainEps) d[i] = y * (1.0 - kDomainEps) - state.alpha[idx];
    }
  };

  double objective = local_objective(state, indices, data, kit, gamma, sigma_sub,
                                     part.devices(), upd.delta);
  double theta_last = 0.0;
  for (long it = 0; it < iters; ++it) {
    const std::vector<double> grad =
        local_gradient(state, indices, data, kit, gamma, sigma_sub, upd.delta);
    if (grad_tol > 0.0) {
      double gnorm = 0.0;
      for (double g : grad) gnorm += g * g;
      if (std::sqrt(gnorm) < grad_tol) break;
    }

    if (step > 0.0) {
      for (std::size_t i = 0; i < indices.size(); ++i) upd.delta[i] -= step * grad[i];
      clamp_feasible(upd.delta);
      objective = local_objective(state, indices, data, kit, gamma, sigma_sub,
                                  part.devices(), upd.delta);
      continue;
    }

    // Auto step: 1/L from the quadratic bound plus the conjugate curvature
    // at the current point, grown from the last accepted step and backtracked
    // until the objective does not increase.
    double curvature = 0.0;
    for (std::size_t i = 0; i < indices.size(); ++i) {
      const auto idx = static_cast<std::size_t>(indices[i]);
      curvature = std::max(curvature, kit.conjugate_curvature(
                                          -state.alpha[idx] - upd.delta[i], data.y[idx]));
    }
    const double l_now = l_quad + curvature / n;
    double theta = theta_last > 0.0 ? std::min(2.0 * theta_last, 64.0 / l_now) : 1.0 / l_now;
    bool accepted = false;
    for (int half = 0; half < 60; ++half) {
      std::vector<double> cand = upd.delta;
      for (std::size_t i = 0; i < indices.size(); ++i) cand[i] -= theta * grad[i];
      clamp_feasible(cand);
      const double cand_obj = local_objective(state, indices, data, kit, gamma, sigma_sub,
                                              part.devices(), cand);
      if (cand_obj <= objective) {
        upd.delta.swap(cand);
        objective = cand_obj;
        theta_last = theta;
        accepted = true;
        break;
      }
      theta *= 0.5;
    }
    if (!accepted) break;  // no descent direction left at this scale
  }

  for (std::size_t i = 0; i < indices.size(); ++i) {
    const double d = upd.delta[i];
    if (d == 0.0) continue;
    const double* col = data.column(indices[i]);
    for (long r = 0; r < data.m; ++r) upd.x_delta[static_cast<std::size_t>(r)] += d * col[r];
  }
  return upd;
}

void global_step(DualState& state, const std::vector<BlockUpdate>& updates,
                 const Partition& part, const Dataset& data, double gamma) {
  std::vector<char> seen(part.blocks.size(), 0);
  for (const auto& upd : updates) {
    if (upd.block < 0 || upd.block >= part.devices() || seen[static_cast<std::size_t>(upd.block)]) {
      throw std::invalid_argument("global_step: overlapping or invalid block updates");
    }
    seen[static_cast<std::size_t>(upd.block)] = 1;
    const auto& indices = part.blocks[static_cast<std::size_t>(upd.block)];
    if (upd.delta.size() != indices.size()) {
      throw std::invalid_argument("global_step: update size does not match block");
    }
    for (std::size_t i = 0; i < indices.size(); ++i) {
      state.alpha[static_cast<std::size_t>(indices[i])] += gamma * upd.delta[i];
    }
    for (std::size_t r = 0; r < state.shared_v.size(); ++r) {
      state.shared_v[r] += gamma * upd.x_delta[r];
    }
  }
  if (++state.steps_since_refresh >= 50) {
    state.refresh_v(data);  // bound incremental drift
    state.steps_since_refresh = 0;
  } else {
    state.refresh_w();
  }
}

double duality_gap(const DualState& state, const Dataset& data, const LossKit& kit,
                   double lambda_reg) {
  const double n = static_cast<double>(data.n);
  double primal_loss = 0.0;
  double dual_conj = 0.0;
  for (long j = 0; j < data.n; ++j) {
    const double* col = data.column(j);
    double score = 0.0;
    for (long i = 0; i < data.m; ++i) score += state.model_w[static_cast<std::size_t>(i)] * col[i];
    primal_loss += kit.loss(score, data.y[static_cast<std::size_t>(j)]);
    dual_conj += kit.conjugate(-state.alpha[static_cast<std::size_t>(j)],
                               data.y[static_cast<std::size_t>(j)]);
  }
  double ww = 0.0;
  for (double w : state.model_w) ww += w * w;
  const double reg = 0.5 * lambda_reg * ww;  // lambda r*(v/(lambda N)) = lambda/2 ||w||^2
  const double primal = primal_loss / n + reg;
  const double dual = -dual_conj / n - reg;
  const double gap = primal - dual;
  if (!std::isfinite(gap)) throw std::runtime_error("duality_gap: non-finite value");
  return gap;
}

double train_accuracy(const Dataset& data, const std::vector<double>& w) {
  long correct = 0;
  for (long j = 0; j < data.n; ++j) {
    const double* col = data.column(j);
    double score = 0.0;
    for (long i = 0; i < data.m; ++i) score += w[static_cast<std::size_t>(i)] * col[i];
    const double pred = score >= 0.0 ? 1.0 : -1.0;
    if (pred * data.y[static_cast<std::size_t>(j)] > 0.0) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(data.n);
}

TrainTrace train(const Dataset& data, int k_devices, const LossKit& kit, double lambda_reg,
                 double eps_local, double eps_gap, double gamma, std::uint64_t seed,
                 long max_iters, const TrainOptions& opts) {
  data.validate();
  if (k_devices < 1) throw std::invalid_argument("k_devices must be >= 1");
  if (!(gamma > 0.0) || gamma > 1.0) throw std::invalid_argument("gamma must lie in (0, 1]");
  if (!(eps_local > 0.0) || !(eps_local < 1.0)) throw std::invalid_argument("eps_local in (0,1)");
  if (!(eps_gap > 0.0)) throw std::invalid_argument("eps_gap must be positive");

  const Partition part = partition_dataset(data.n, k_devices, opts.partition, mix_seed(seed, 0xA1));

  TrainTrace trace;
  trace.sigma_max_measured = sigma_max(data, part, 1e-6);
  trace.sigma_prime_measured =
      sigma_prime(data, part, SigmaPrimeMode::estimate, opts.sigma_trials, mix_seed(seed, 0xA2));
  const double sigma_used = opts.sigma_mode == SigmaPrimeMode::safe_bound
                                ? 1.0
                                : trace.sigma_prime_measured;
  const double sigma_sub = gamma * static_cast<double>(k_devices) * sigma_used;

  {
    // Theorem-1 budget from the measured constants, via the shared formula.
    SystemConfig budget_cfg;
    budget_cfg.n_total = data.n;
    budget_cfg.k_devices = k_devices;
    budget_cfg.snr.rho_bar.assign(static_cast<std::size_t>(k_devices), 10.0);
    budget_cfg.snr.eta_bar.assign(static_cast<std::size_t>(k_devices), 10.0);
    budget_cfg.eps_local = eps_local;
    budget_cfg.eps_gap = eps_gap;
    budget_cfg.lambda_reg = lambda_reg;
    budget_cfg.mu_smooth = kit.mu();
    budget_cfg.zeta_convex = 1.0;
    budget_cfg.compute_consts.assign(static_cast<std::size_t>(k_devices), 1e-10);
    budget_cfg.partition_sizes = part.sizes();
    budget_cfg.sigma_product = sigma_used * trace.sigma_max_measured;
    trace.m_k_budget = global_iterations(budget_cfg);
  }

  DualState state = DualState::zero(data, lambda_reg);
  if (kit.kind == LossKind::logistic) {
    // Interior start: y alpha = 1/2 keeps the conjugate curvature moderate.
    for (long j = 0; j < data.n; ++j) {
      state.alpha[static_cast<std::size_t>(j)] = 0.5 * data.y[static_cast<std::size_t>(j)];
    }
  }
  state.refresh_v(data);

  const long inner = opts.inner_override > 0
                         ? opts.inner_override
                         : static_cast<long>(std::ceil(1.0 / eps_local));

  auto record = [&](long t) {
    TraceRow row;
    row.t = t;
    row.gap = duality_gap(state, data, kit, lambda_reg);
    row.accuracy = train_accuracy(data, state.model_w);
    trace.rows.push_back(row);
    return row.gap;
  };

  double gap = record(0);
  double window_best = gap;
  long window_start = 0;
  long t = 0;
  while (gap > eps_gap && t < max_iters) {
    std::vector<BlockUpdate> updates(static_cast<std::size_t>(k_devices));
#pragma omp parallel for schedule(dynamic)
    for (int k = 0; k < k_devices; ++k) {
      updates[static_cast<std::size_t>(k)] =
          local_solve(state, k, part, data, kit, gamma, sigma_sub, 0.0, inner);
    }
    global_step(state, updates, part, data, gamma);
    ++t;
    gap = record(t);
    if (gap < window_best) {
      window_best = gap;
      window_start = t;
    } else if (t - window_start >= 20 && gap > 10.0 * window_best) {
      trace.iterations_used = t;
      throw TrainDivergence("train: duality gap grew 10x over 20 iterations", std::move(trace));
    }
  }
  trace.iterations_used = t;
  trace.model_w = state.model_w;
  trace.final_gap = gap;
  trace.final_accuracy = trace.rows.back().accuracy;
  return trace;
}

}  // namespace edgesim
