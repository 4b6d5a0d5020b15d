#pragma once

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "localmax/data.hpp"
#include "localmax/weights.hpp"

namespace localmax {

/// Training step produced a non-finite objective (step size too large for the
/// chosen penalty weight).  The CLI maps this to the non-convergence exit code.
struct DivergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Loss { squared, absolute };
enum class Metric { mse, rmse, mae };

Loss parse_loss(const std::string& name);
Metric parse_metric(const std::string& name);

struct FactorModel {
  Matrix A;  // rows x rank
  Matrix B;  // cols x rank
  double row_offset = 0.0;  // dual offsets of the penalty at these factors
  double col_offset = 0.0;

  Index rank() const { return A.cols(); }
  double predict(Index i, Index j) const;
};

/// Regularizer (1/2) * (sup_{r in R} sum_i r_i |A_i|^2
///                      + sup_{c in C} sum_j c_j |B_j|^2).
double penalty_value(const Matrix& A, const Matrix& B, const WeightSet& row_set,
                     const WeightSet& col_set);

/// The same penalty written with hinge offsets,
///   (1/2) * [<base, q> + scale * (a + sum_i caps_i * (q_i - a)_+)]
/// per side with q the squared row norms; minimized over (a, b) it equals
/// penalty_value.
double penalty_at_offsets(const Matrix& A, const Matrix& B, const WeightSet& row_set,
                          const WeightSet& col_set, double row_offset,
                          double col_offset);

/// Exact minimizers of the hinge form above (zero for singleton sets, which
/// have no free simplex mass).
std::pair<double, double> optimal_offsets(const Matrix& A, const Matrix& B,
                                          const WeightSet& row_set,
                                          const WeightSet& col_set);

struct TrainConfig {
  TrainConfig(WeightSet rows, WeightSet cols)
      : row_set(std::move(rows)), col_set(std::move(cols)) {}

  WeightSet row_set;
  WeightSet col_set;
  Index rank = 8;
  double penalty_weight = 0.0;  // lambda
  Loss loss = Loss::squared;
  int epochs = 500;
  double step_initial = 0.05;
  double step_decay = 0.5;  // step at epoch t is step_initial / t^step_decay
  std::uint64_t seed = 0;
  bool track_best = true;  // return the best-objective iterate, not the last
};

struct TrainHistory {
  std::vector<double> objective;  // after each epoch's step
  std::vector<double> penalty;    // unweighted penalty term per epoch
  int best_epoch = 0;
};

struct TrainResult {
  FactorModel model;
  TrainHistory history;
};

/// Full-batch subgradient descent on
///   sum_observed loss(<A_i, B_j>, y) + lambda * penalty_value(A, B)
/// with per-epoch exact recomputation of the hinge offsets.  Factors start
/// i.i.d. normal with standard deviation 1/sqrt(rank).
TrainResult train(const SampleSet& data, const TrainConfig& config);

/// Mean error of the model's predictions over the sample set.
double evaluate(const FactorModel& model, const SampleSet& samples, Metric metric);

}  // namespace localmax
