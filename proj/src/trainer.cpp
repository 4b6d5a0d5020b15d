#include "localmax/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace localmax {

namespace {

double hinge_side(const WeightSet& set, const Vector& sq_norms, double offset) {
  double value = set.base().dot(sq_norms);
  if (!set.is_singleton()) {
    double dual = offset;
    for (Index i = 0; i < sq_norms.size(); ++i)
      dual += set.caps()[i] * std::max(sq_norms[i] - offset, 0.0);
    value += set.scale() * dual;
  }
  return value;
}

void check_factor_dims(const Matrix& A, const Matrix& B, const WeightSet& row_set,
                       const WeightSet& col_set) {
  if (A.rows() != row_set.dim() || B.rows() != col_set.dim())
    throw std::invalid_argument("penalty: factor/weight-set dimension mismatch");
  if (A.cols() != B.cols())
    throw std::invalid_argument("penalty: factor rank mismatch");
}

}  // namespace

Loss parse_loss(const std::string& name) {
  if (name == "squared") return Loss::squared;
  if (name == "absolute") return Loss::absolute;
  throw std::invalid_argument("unknown loss: " + name);
}

Metric parse_metric(const std::string& name) {
  if (name == "mse") return Metric::mse;
  if (name == "rmse") return Metric::rmse;
  if (name == "mae") return Metric::mae;
  throw std::invalid_argument("unknown metric: " + name);
}

double FactorModel::predict(Index i, Index j) const {
  if (i < 0 || i >= A.rows() || j < 0 || j >= B.rows())
    throw std::invalid_argument("predict: index out of range");
  return A.row(i).dot(B.row(j));
}

double penalty_value(const Matrix& A, const Matrix& B, const WeightSet& row_set,
                     const WeightSet& col_set) {
  check_factor_dims(A, B, row_set, col_set);
  return 0.5 * (linmax(row_set, squared_row_norms(A)).value +
                linmax(col_set, squared_row_norms(B)).value);
}

double penalty_at_offsets(const Matrix& A, const Matrix& B, const WeightSet& row_set,
                          const WeightSet& col_set, double row_offset,
                          double col_offset) {
  check_factor_dims(A, B, row_set, col_set);
  return 0.5 * (hinge_side(row_set, squared_row_norms(A), row_offset) +
                hinge_side(col_set, squared_row_norms(B), col_offset));
}

std::pair<double, double> optimal_offsets(const Matrix& A, const Matrix& B,
                                          const WeightSet& row_set,
                                          const WeightSet& col_set) {
  check_factor_dims(A, B, row_set, col_set);
  double a = row_set.is_singleton()
                 ? 0.0
                 : dual_offset(row_set.caps(), squared_row_norms(A)).offset;
  double b = col_set.is_singleton()
                 ? 0.0
                 : dual_offset(col_set.caps(), squared_row_norms(B)).offset;
  return {a, b};
}

TrainResult train(const SampleSet& data, const TrainConfig& config) {
  validate(data);
  if (data.entries.empty()) throw std::invalid_argument("train: no training samples");
  if (data.rows != config.row_set.dim() || data.cols != config.col_set.dim())
    throw std::invalid_argument("train: weight set dimension mismatch");
  if (config.rank < 1) throw std::invalid_argument("train: rank must be positive");
  if (config.epochs < 1) throw std::invalid_argument("train: epochs must be positive");
  if (!(config.penalty_weight >= 0.0))
    throw std::invalid_argument("train: negative penalty weight");
  if (!(config.step_initial > 0.0))
    throw std::invalid_argument("train: step size must be positive");

  Index n = data.rows, m = data.cols, k = config.rank;
  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> gauss(0.0, 1.0 / std::sqrt(static_cast<double>(k)));
  Matrix A(n, k), B(m, k);
  for (Index j = 0; j < k; ++j)
    for (Index i = 0; i < n; ++i) A(i, j) = gauss(rng);
  for (Index j = 0; j < k; ++j)
    for (Index i = 0; i < m; ++i) B(i, j) = gauss(rng);

  const double lambda = config.penalty_weight;

  auto objective = [&](const Matrix& Af, const Matrix& Bf, double* penalty_out) {
    double loss_sum = 0.0;
    for (const Rating& entry : data.entries) {
      double err = Af.row(entry.row).dot(Bf.row(entry.col)) - entry.value;
      loss_sum += config.loss == Loss::squared ? err * err : std::abs(err);
    }
    double pen = penalty_value(Af, Bf, config.row_set, config.col_set);
    if (penalty_out) *penalty_out = pen;
    return loss_sum + lambda * pen;
  };

  TrainResult result;
  result.history.objective.reserve(static_cast<std::size_t>(config.epochs));
  result.history.penalty.reserve(static_cast<std::size_t>(config.epochs));

  Matrix best_A = A, best_B = B;
  double best_objective = std::numeric_limits<double>::infinity();
  int best_epoch = 0;

  Matrix grad_A(n, k), grad_B(m, k);
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    grad_A.setZero();
    grad_B.setZero();
    for (const Rating& entry : data.entries) {
      double err = A.row(entry.row).dot(B.row(entry.col)) - entry.value;
      double g = config.loss == Loss::squared ? 2.0 * err
                 : err > 0.0                  ? 1.0
                 : err < 0.0                  ? -1.0
                                              : 0.0;
      grad_A.row(entry.row) += g * B.row(entry.col);
      grad_B.row(entry.col) += g * A.row(entry.row);
    }
    if (lambda > 0.0) {
      // Penalty subgradient: the maximizing weights of the linear form.
      Vector rho = linmax(config.row_set, squared_row_norms(A)).argmax;
      Vector chi = linmax(config.col_set, squared_row_norms(B)).argmax;
      grad_A += lambda * (rho.asDiagonal() * A);
      grad_B += lambda * (chi.asDiagonal() * B);
    }

    double step = config.step_initial / std::pow(static_cast<double>(epoch),
                                                 config.step_decay);
    A -= step * grad_A;
    B -= step * grad_B;

    double pen = 0.0;
    double obj = objective(A, B, &pen);
    if (!std::isfinite(obj))
      throw DivergenceError("train: objective became non-finite at epoch " +
                            std::to_string(epoch) +
                            "; reduce the step size or penalty weight");
    result.history.objective.push_back(obj);
    result.history.penalty.push_back(pen);
    if (obj < best_objective) {
      best_objective = obj;
      best_A = A;
      best_B = B;
      best_epoch = epoch;
    }
  }

  result.model.A = config.track_best ? std::move(best_A) : std::move(A);
  result.model.B = config.track_best ? std::move(best_B) : std::move(B);
  result.history.best_epoch = config.track_best
                                  ? best_epoch
                                  : static_cast<int>(result.history.objective.size());
  auto [row_off, col_off] =
      optimal_offsets(result.model.A, result.model.B, config.row_set, config.col_set);
  result.model.row_offset = row_off;
  result.model.col_offset = col_off;
  return result;
}

double evaluate(const FactorModel& model, const SampleSet& samples, Metric metric) {
  validate(samples);
  if (samples.entries.empty()) throw std::invalid_argument("evaluate: empty sample set");
  if (samples.rows > model.A.rows() || samples.cols > model.B.rows())
    throw std::invalid_argument("evaluate: sample shape exceeds model shape");
  double total = 0.0;
  for (const Rating& entry : samples.entries) {
    double err = model.predict(entry.row, entry.col) - entry.value;
    total += metric == Metric::mae ? std::abs(err) : err * err;
  }
  double mean = total / static_cast<double>(samples.size());
  return metric == Metric::rmse ? std::sqrt(mean) : mean;
}

}  // namespace localmax
