#include "localmax/normcore.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace localmax {

namespace {

Vector checked_weights(const Vector& w, Index expect, const char* what) {
  if (w.size() != expect)
    throw std::invalid_argument(std::string(what) + ": weight dimension mismatch");
  Vector out = w;
  for (Index i = 0; i < out.size(); ++i) {
    if (!std::isfinite(out[i]) || out[i] < -kZeroTol)
      throw std::invalid_argument(std::string(what) + ": invalid weight entry");
    if (out[i] < 0.0) out[i] = 0.0;
  }
  return out;
}

}  // namespace

double weighted_trace_norm(const Matrix& X, const Vector& r, const Vector& c) {
  if (!X.allFinite())
    throw std::invalid_argument("weighted_trace_norm: non-finite matrix entry");
  Vector rw = checked_weights(r, X.rows(), "weighted_trace_norm");
  Vector cw = checked_weights(c, X.cols(), "weighted_trace_norm");
  Matrix M = rw.cwiseSqrt().asDiagonal() * X * cw.cwiseSqrt().asDiagonal();
  Eigen::BDCSVD<Matrix> svd(M);
  return svd.singularValues().sum();
}

Factorization optimal_factorization(const Matrix& X, Vector r, Vector c, double floor) {
  if (!(floor > 0.0))
    throw std::invalid_argument("optimal_factorization: floor must be positive");
  if (!X.allFinite())
    throw std::invalid_argument("optimal_factorization: non-finite matrix entry");
  r = checked_weights(r, X.rows(), "optimal_factorization").cwiseMax(floor);
  c = checked_weights(c, X.cols(), "optimal_factorization").cwiseMax(floor);

  Vector sqrt_r = r.cwiseSqrt();
  Vector sqrt_c = c.cwiseSqrt();
  Matrix M = sqrt_r.asDiagonal() * X * sqrt_c.asDiagonal();
  Eigen::BDCSVD<Matrix> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sv = svd.singularValues();

  Index rank = 1;
  for (Index i = 1; i < sv.size(); ++i)
    if (sv[i] > sv[0] * 1e-13) rank = i + 1;

  Vector sqrt_sv = sv.head(rank).cwiseSqrt();
  Matrix A = sqrt_r.cwiseInverse().asDiagonal() *
             (svd.matrixU().leftCols(rank) * sqrt_sv.asDiagonal());
  Matrix B = sqrt_c.cwiseInverse().asDiagonal() *
             (svd.matrixV().leftCols(rank) * sqrt_sv.asDiagonal());
  return {std::move(A), std::move(B)};
}

BalancedPenalty balanced_penalty(const Matrix& X, double tol) {
  if (!X.allFinite())
    throw std::invalid_argument("balanced_penalty: non-finite matrix entry");
  if (!(tol > 0.0)) throw std::invalid_argument("balanced_penalty: tol must be positive");
  Index n = X.rows(), m = X.cols();
  if (n < 1 || m < 1) throw std::invalid_argument("balanced_penalty: empty matrix");

  BalancedPenalty best;
  if (X.norm() == 0.0) return best;

  NormOptions opt;
  opt.tol = tol;
  auto evaluate = [&](double alpha) {
    double t = 1.0 / (1.0 + alpha * alpha);
    WeightSet rows = WeightSet::lower_bounded(n, t);
    WeightSet cols = WeightSet::lower_bounded(m, t);
    NormCertificate cert = local_max_norm(X, rows, cols, opt);
    if (!cert.converged) best.converged = false;
    double omega = 1.0 / std::sqrt((1.0 + (n - 1) * t) * (1.0 + (m - 1) * t));
    return (alpha + 1.0 / alpha) * cert.value / omega;
  };

  double hi = std::sqrt(static_cast<double>(std::max(n, m)));
  best.alpha = 1.0;
  best.value = evaluate(1.0);
  if (hi <= 1.0 + 1e-12) return best;

  // Coarse scan to bracket the minimum, then golden-section refinement.
  const int scan_points = 33;
  std::vector<double> grid(scan_points);
  std::size_t best_at = 0;
  for (int i = 0; i < scan_points; ++i) {
    grid[i] = 1.0 + (hi - 1.0) * i / (scan_points - 1);
    double v = (i == 0) ? best.value : evaluate(grid[i]);
    if (i > 0 && v < best.value) {
      best.value = v;
      best.alpha = grid[i];
      best_at = static_cast<std::size_t>(i);
    }
  }

  double lo_a = grid[best_at > 0 ? best_at - 1 : 0];
  double hi_a = grid[std::min<std::size_t>(best_at + 1, scan_points - 1)];
  auto negated = [&](double alpha) { return -evaluate(alpha); };
  auto [alpha, neg_value] = detail::golden_max(negated, lo_a, hi_a, 28);
  if (-neg_value < best.value) {
    best.value = -neg_value;
    best.alpha = alpha;
  }
  return best;
}

Decomposition decompose_vector(const Vector& u, const MarginalDist& p, double ratio) {
  Index n = u.size();
  if (p.dim() != n) throw std::invalid_argument("decompose_vector: dimension mismatch");
  if (!(ratio >= 1.0) || !std::isfinite(ratio))
    throw std::invalid_argument("decompose_vector: ratio must be at least one");
  if (!u.allFinite()) throw std::invalid_argument("decompose_vector: non-finite entry");

  Vector smoothed = 0.5 * p.weights() + Vector::Constant(n, 0.5 / static_cast<double>(n));
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    return std::abs(u[a]) > std::abs(u[b]);
  });

  // Find the prefix of sorted entries whose smoothed-marginal mass reaches
  // 1/ratio, keeping a fraction of the boundary coordinate.
  double target = 1.0 / ratio;
  double cum = 0.0;
  Index count = n;
  double partial = 1.0;
  for (Index k = 0; k < n; ++k) {
    double mass = smoothed[order[static_cast<std::size_t>(k)]];
    if (cum + mass >= target) {
      count = k + 1;
      partial = (target - cum) / mass;
      break;
    }
    cum += mass;
  }
  partial = std::clamp(partial, 0.0, 1.0);
  if (partial <= 0.0) partial = 1e-16;

  Vector spike = Vector::Zero(n);
  for (Index k = 0; k < count - 1; ++k) {
    Index i = order[static_cast<std::size_t>(k)];
    spike[i] = u[i];
  }
  Index boundary = order[static_cast<std::size_t>(count - 1)];
  spike[boundary] = std::sqrt(partial) * u[boundary];

  return {u - spike, std::move(spike), count, partial};
}

}  // namespace localmax
