#pragma once

#include <cstdint>
#include <random>

#include "localmax/normcore.hpp"
#include "localmax/weights.hpp"

namespace localmax::oracle {

struct GridSpec {
  double step = 0.01;                    // lattice resolution on the simplex
  std::size_t max_points = 10'000'000;   // enumeration guard
};

/// Exhaustive lattice maximization of <r, v> over the weight set.  Walks all
/// lattice members of the capped simplex at the given resolution;
/// intentionally shares no code with the greedy solver.
double brute_linmax(const WeightSet& set, const Vector& v, const GridSpec& grid);

struct BruteNorm {
  double value = 0.0;      // max over the product lattice
  double tolerance = 0.0;  // conservative bound on the discretization error
};

/// Exhaustive product-lattice maximization of the weighted trace norm.
BruteNorm brute_local_max_norm(const Matrix& X, const WeightSet& row_set,
                               const WeightSet& col_set, const GridSpec& grid);

struct PsdWitness {
  Matrix block;              // [[A A^T, A B^T], [B A^T, B B^T]]
  double min_eigenvalue = 0.0;
};

/// The positive-semidefinite block certificate of a factorization; its
/// diagonal carries the squared row norms and its off-diagonal block A B^T.
PsdWitness psd_witness(const Matrix& A, const Matrix& B);

/// Reverse direction: recover factors from a positive-semidefinite block so
/// that the top-left n rows give A.  Throws when the block is not symmetric
/// positive semidefinite within tolerance.
Factorization factor_psd_block(const Matrix& block, Index top_rows);

struct HullReport {
  int trials = 0;
  double max_value = 0.0;  // largest certified norm seen across trials
  int violations = 0;      // trials with norm above 1 + tol
  double tol = 0.0;
};

/// Random unit-cross checks: products u v^T of vectors normalized in the
/// respective set norms must have local max norm at most one.
template <typename RSet, typename CSet>
HullReport hull_check(const RSet& row_set, const CSet& col_set, int trials,
                      std::uint64_t seed, double tol = 1e-5,
                      const NormOptions& opt = {}) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto unit_vector = [&](const auto& set) {
    Vector u(set.dim());
    double norm = 0.0;
    do {
      for (Index i = 0; i < u.size(); ++i) u[i] = gauss(rng);
      norm = vec_norm(set, u);
    } while (norm <= 1e-12);
    return Vector(u / norm);
  };

  HullReport report;
  report.trials = trials;
  report.tol = tol;
  for (int t = 0; t < trials; ++t) {
    Vector u = unit_vector(row_set);
    Vector v = unit_vector(col_set);
    NormCertificate cert = local_max_norm(u * v.transpose(), row_set, col_set, opt);
    report.max_value = std::max(report.max_value, cert.value);
    if (cert.value > 1.0 + tol) ++report.violations;
  }
  return report;
}

struct DualityCheck {
  double dual_estimate = 0.0;      // lower estimate of the dual norm of Y
  double rank_one_supremum = 0.0;  // sup <Y, u v^T> over unit crosses
};

/// Estimates both sides of the dual comparison sup <Y, X> / |X| versus the
/// best rank-one correlation, for small matrices, by sampling.  The dual
/// estimate divides by value + gap so it never overshoots the true dual norm.
DualityCheck duality_check(const Matrix& Y, const WeightSet& row_set,
                           const WeightSet& col_set, int samples,
                           std::uint64_t seed);

}  // namespace localmax::oracle
