#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "localmax/data.hpp"
#include "localmax/normcore.hpp"
#include "localmax/trainer.hpp"
#include "localmax/weights.hpp"

namespace localmax {

enum class NormFamily {
  singleton,
  smoothed,
  max,
  uniform_cap,
  multiplicative,
  exponent,
  lower_bounded,
  segment,
};

NormFamily parse_family(const std::string& name);
const char* to_string(NormFamily family);

/// Family plus its parameters; resolved against marginals of the right
/// dimension to build a concrete weight set.
struct SetSpec {
  NormFamily family = NormFamily::exponent;
  double zeta = 0.0;   // smoothing toward uniform
  double tau = 0.0;    // cap exponent interpolating singleton and simplex
  double gamma = 2.0;  // multiplicative cap ratio
  double eps = 1.0;    // uniform cap level
  double level = 0.0;  // lower bound level
};

/// Weight set or smoothing segment behind one interface, so norm evaluation
/// can run on either.
class AnyWeightFamily {
 public:
  explicit AnyWeightFamily(WeightSet set) : set_(std::move(set)) {}
  explicit AnyWeightFamily(SmoothingSegment segment) : set_(std::move(segment)) {}

  Index dim() const;
  Vector interior_point() const;
  bool nontrivial() const;

  friend LinMax linmax(const AnyWeightFamily& family, const Vector& v);
  friend double vec_norm(const AnyWeightFamily& family, const Vector& u);
  friend bool is_point_set(const AnyWeightFamily& family);

 private:
  std::variant<WeightSet, SmoothingSegment> set_;
};

AnyWeightFamily build_weight_family(const SetSpec& spec, const MarginalDist& marginals);

/// The comparison methods: which grid axes each one may tune and where the
/// fixed axes sit.
struct Method {
  std::string name;
  bool zeta_free = false;
  double zeta = 0.0;
  bool tau_free = false;
  double tau = 0.0;

  bool admits(double z, double t) const;
};

const std::vector<Method>& method_table();

struct ExperimentGrid {
  std::vector<double> zetas;
  std::vector<double> taus;
  std::vector<double> lambdas;

  static ExperimentGrid simulation_default();  // 0, 0.1, ..., 1; lambda 2..1024
  static ExperimentGrid fast();                // 0, 0.5, 1; lambda 4, 32, 256
};

struct StudyConfig {
  Index n = 30;
  Index signal_rank = 2;
  double noise = 0.3;
  Index model_rank = 8;
  int epochs = 500;
  int trials = 1;
  std::uint64_t seed = 0;
  int threads = 1;
  double step_initial = 0.05;
  double step_decay = 0.5;
  ExperimentGrid grid = ExperimentGrid::simulation_default();
};

struct SimulationRow {
  int trial = 0;
  std::string method;
  double zeta = 0.0;
  double tau = 0.0;
  double lambda = 0.0;
  double val_mse = 0.0;
  double test_mse = 0.0;
};

/// For each trial: simulate, train every (zeta, tau, lambda) cell once from a
/// shared random start, then report each method's validation-selected cell.
/// Cells whose training diverges count as infinitely bad.
std::vector<SimulationRow> run_simulation_study(const StudyConfig& config);

void write_simulation_csv(const std::string& path,
                          const std::vector<SimulationRow>& rows);

struct GridsearchConfig {
  Index rank = 30;
  int epochs = 500;
  std::uint64_t seed = 0;
  int threads = 1;
  double step_initial = 0.05;
  double step_decay = 0.5;
  bool uniform_marginals = false;  // otherwise empirical marginals of train
  ExperimentGrid grid = ExperimentGrid::simulation_default();
};

struct MethodSummary {
  std::string method;
  double zeta = 0.0;
  double tau = 0.0;
  double lambda = 0.0;
  double val_rmse = 0.0;
  double test_rmse = 0.0;
};

struct GridsearchResult {
  std::vector<double> zetas;
  std::vector<double> taus;
  Matrix test_rmse;         // rows follow zetas, columns follow taus
  Matrix selected_lambda;   // validation-selected lambda per cell
  std::vector<MethodSummary> methods;
};

/// Trains every grid cell on the train split, selects lambda per (zeta, tau)
/// on the validation split, and reports test RMSE; also summarizes each
/// method's validation-selected configuration.
GridsearchResult run_gridsearch(const SampleSet& train, const SampleSet& validation,
                                const SampleSet& test, const GridsearchConfig& config);

void write_gridsearch_csv(const std::string& path, const GridsearchResult& result);
void write_method_csv(const std::string& path, const std::vector<MethodSummary>& methods);

/// Key-value run configuration echo written next to result files.
void write_config_echo(const std::string& path,
                       const std::vector<std::pair<std::string, std::string>>& entries);

/// Loads train/validation/test rating files sharing one id space.
struct RatingsTriple {
  SampleSet train;
  SampleSet validation;
  SampleSet test;
  IdIndex row_ids;
  IdIndex col_ids;
  std::vector<std::string> diagnostics;
};

RatingsTriple load_ratings_triple(const std::string& train_path,
                                  const std::string& validation_path,
                                  const std::string& test_path, RatingsFormat format);

/// Deterministic worker pool: applies fn to 0..count-1 on `threads` threads,
/// collecting results by index.
void parallel_for(std::size_t count, int threads,
                  const std::function<void(std::size_t)>& fn);

std::vector<double> parse_double_list(const std::string& text);
std::string format_number(double v);

}  // namespace localmax
