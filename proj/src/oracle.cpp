#include "localmax/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

namespace localmax::oracle {

namespace {

// Integer lattice walk over {k : 0 <= k_i <= units_i, sum k_i == total},
// calling visit(k) at every member.  Counts visited members against the guard.
void walk_lattice(const std::vector<long>& units, long total, std::size_t max_points,
                  const std::function<void(const std::vector<long>&)>& visit) {
  std::size_t n = units.size();
  std::vector<long> suffix(n + 1, 0);
  for (std::size_t i = n; i-- > 0;) suffix[i] = suffix[i + 1] + units[i];
  if (suffix[0] < total)
    throw std::runtime_error("oracle lattice too coarse: caps round below one");

  std::vector<long> k(n, 0);
  std::size_t visited = 0;
  std::function<void(std::size_t, long)> descend = [&](std::size_t i, long rem) {
    if (i + 1 == n) {
      if (rem > units[i]) return;
      k[i] = rem;
      if (++visited > max_points)
        throw std::runtime_error("oracle lattice exceeds the enumeration guard");
      visit(k);
      return;
    }
    long lo = std::max<long>(0, rem - suffix[i + 1]);
    long hi = std::min<long>(units[i], rem);
    for (long take = lo; take <= hi; ++take) {
      k[i] = take;
      descend(i + 1, rem - take);
    }
  };
  descend(0, total);
  if (visited == 0)
    throw std::runtime_error("oracle lattice empty at this resolution");
}

std::vector<long> lattice_units(const Vector& caps, long total) {
  std::vector<long> units(static_cast<std::size_t>(caps.size()));
  for (Index i = 0; i < caps.size(); ++i)
    units[static_cast<std::size_t>(i)] = std::min(
        total, static_cast<long>(std::floor(caps[i] * static_cast<double>(total) + 1e-9)));
  return units;
}

long lattice_resolution(const GridSpec& grid) {
  if (!(grid.step > 0.0 && grid.step <= 1.0))
    throw std::invalid_argument("oracle: step must lie in (0, 1]");
  return std::lround(1.0 / grid.step);
}

// All members of the weight set at the lattice resolution.
std::vector<Vector> enumerate_members(const WeightSet& set, const GridSpec& grid) {
  if (is_point_set(set)) {
    Vector only = set.base();
    if (!set.is_singleton()) only += set.scale() * set.caps();
    return {only};
  }
  long total = lattice_resolution(grid);
  std::vector<Vector> members;
  walk_lattice(lattice_units(set.caps(), total), total, grid.max_points,
               [&](const std::vector<long>& k) {
                 Vector r = set.base();
                 for (Index i = 0; i < set.dim(); ++i)
                   r[i] += set.scale() * static_cast<double>(k[static_cast<std::size_t>(i)]) /
                           static_cast<double>(total);
                 members.push_back(std::move(r));
               });
  return members;
}

}  // namespace

double brute_linmax(const WeightSet& set, const Vector& v, const GridSpec& grid) {
  if (v.size() != set.dim()) throw std::invalid_argument("brute_linmax: dimension mismatch");
  if (set.is_singleton()) return set.base().dot(v);
  if (is_point_set(set))
    return set.base().dot(v) + set.scale() * set.caps().dot(v);

  long total = lattice_resolution(grid);
  double base_part = set.base().dot(v);
  double best = -std::numeric_limits<double>::infinity();
  walk_lattice(lattice_units(set.caps(), total), total, grid.max_points,
               [&](const std::vector<long>& k) {
                 double s = 0.0;
                 for (Index i = 0; i < v.size(); ++i)
                   s += static_cast<double>(k[static_cast<std::size_t>(i)]) * v[i];
                 best = std::max(best, s / static_cast<double>(total));
               });
  return base_part + set.scale() * best;
}

BruteNorm brute_local_max_norm(const Matrix& X, const WeightSet& row_set,
                               const WeightSet& col_set, const GridSpec& grid) {
  if (row_set.dim() != X.rows() || col_set.dim() != X.cols())
    throw std::invalid_argument("brute_local_max_norm: dimension mismatch");
  std::vector<Vector> rows = enumerate_members(row_set, grid);
  std::vector<Vector> cols = enumerate_members(col_set, grid);
  if (rows.size() * cols.size() > grid.max_points)
    throw std::runtime_error("oracle lattice exceeds the enumeration guard");

  BruteNorm out;
  for (const Vector& r : rows)
    for (const Vector& c : cols)
      out.value = std::max(out.value, weighted_trace_norm(X, r, c));

  // Discretization error bound: moving simplex mass by at most n * step
  // changes sqrt-weights by at most sqrt(scale * n * step) per side, and the
  // trace norm is 1-Lipschitz in each sqrt-weight against |X|_tr.
  Eigen::BDCSVD<Matrix> svd(X);
  double trace_norm = svd.singularValues().sum();
  double row_term = row_set.is_singleton()
                        ? 0.0
                        : std::sqrt(row_set.scale() * X.rows() * grid.step);
  double col_term = col_set.is_singleton()
                        ? 0.0
                        : std::sqrt(col_set.scale() * X.cols() * grid.step);
  out.tolerance = trace_norm * (row_term + col_term);
  return out;
}

PsdWitness psd_witness(const Matrix& A, const Matrix& B) {
  if (A.cols() != B.cols()) throw std::invalid_argument("psd_witness: rank mismatch");
  Matrix stacked(A.rows() + B.rows(), A.cols());
  stacked.topRows(A.rows()) = A;
  stacked.bottomRows(B.rows()) = B;
  PsdWitness witness;
  witness.block = stacked * stacked.transpose();
  Eigen::SelfAdjointEigenSolver<Matrix> eigen(witness.block,
                                              Eigen::EigenvaluesOnly);
  witness.min_eigenvalue = eigen.eigenvalues().minCoeff();
  return witness;
}

Factorization factor_psd_block(const Matrix& block, Index top_rows) {
  if (block.rows() != block.cols())
    throw std::invalid_argument("factor_psd_block: block must be square");
  if (top_rows < 1 || top_rows >= block.rows())
    throw std::invalid_argument("factor_psd_block: invalid row split");
  double scale = std::max(block.cwiseAbs().maxCoeff(), 1.0);
  if ((block - block.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
    throw std::invalid_argument("factor_psd_block: block not symmetric");

  Eigen::SelfAdjointEigenSolver<Matrix> eigen(block);
  if (eigen.eigenvalues().minCoeff() < -1e-10 * scale)
    throw std::invalid_argument("factor_psd_block: block not positive semidefinite");
  Matrix root = eigen.eigenvectors() *
                eigen.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
  return {root.topRows(top_rows), root.bottomRows(block.rows() - top_rows)};
}

DualityCheck duality_check(const Matrix& Y, const WeightSet& row_set,
                           const WeightSet& col_set, int samples,
                           std::uint64_t seed) {
  if (row_set.dim() != Y.rows() || col_set.dim() != Y.cols())
    throw std::invalid_argument("duality_check: dimension mismatch");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto random_vector = [&](Index n) {
    Vector u(n);
    for (Index i = 0; i < n; ++i) u[i] = gauss(rng);
    return u;
  };

  DualityCheck check;

  // Best rank-one correlation over unit crosses, with alternating polish:
  // u <- Yv renormalized is feasible and usually ascends.
  Vector best_u, best_v;
  for (int start = 0; start < std::max(samples / 4, 8); ++start) {
    Vector u = random_vector(Y.rows());
    Vector v = random_vector(Y.cols());
    double nu = vec_norm(row_set, u), nv = vec_norm(col_set, v);
    if (nu <= 1e-12 || nv <= 1e-12) continue;
    u /= nu;
    v /= nv;
    for (int sweep = 0; sweep < 30; ++sweep) {
      Vector yu = Y * v;
      double norm_u = vec_norm(row_set, yu);
      if (norm_u <= 1e-12) break;
      u = yu / norm_u;
      Vector yv = Y.transpose() * u;
      double norm_v = vec_norm(col_set, yv);
      if (norm_v <= 1e-12) break;
      v = yv / norm_v;
    }
    double corr = u.dot(Y * v);
    if (corr > check.rank_one_supremum) {
      check.rank_one_supremum = corr;
      best_u = u;
      best_v = v;
    }
  }

  // Lower estimate of the dual norm: <Y, X> / (value + gap) never exceeds
  // <Y, X> / |X|.
  NormOptions opt;
  auto ratio = [&](const Matrix& X) {
    double inner = (Y.array() * X.array()).sum();
    if (inner <= 0.0) return 0.0;
    NormCertificate cert = local_max_norm(X, row_set, col_set, opt);
    double upper = cert.value + cert.gap;
    return upper > 0.0 ? inner / upper : 0.0;
  };
  if (best_u.size() > 0)
    check.dual_estimate = ratio(best_u * best_v.transpose());
  for (int s = 0; s < samples; ++s) {
    Matrix X(Y.rows(), Y.cols());
    for (Index j = 0; j < X.cols(); ++j)
      for (Index i = 0; i < X.rows(); ++i) X(i, j) = gauss(rng);
    check.dual_estimate = std::max(check.dual_estimate, ratio(X));
  }
  return check;
}

}  // namespace localmax::oracle
