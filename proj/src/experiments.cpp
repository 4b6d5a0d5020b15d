#include "localmax/experiments.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace localmax {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Cell {
  double zeta = 0.0;
  double tau = 0.0;
  double lambda = 0.0;
  double val = kInf;
  double test = kInf;
};

std::vector<Cell> grid_cells(const ExperimentGrid& grid) {
  if (grid.zetas.empty() || grid.taus.empty() || grid.lambdas.empty())
    throw std::invalid_argument("experiment grid: empty axis");
  std::vector<Cell> cells;
  cells.reserve(grid.zetas.size() * grid.taus.size() * grid.lambdas.size());
  for (double z : grid.zetas)
    for (double t : grid.taus)
      for (double l : grid.lambdas) cells.push_back({z, t, l, kInf, kInf});
  return cells;
}

// Validation-selected cell for a method; first cell wins ties, infinity when
// nothing admissible converged.
const Cell* select_cell(const std::vector<Cell>& cells, const Method& method) {
  const Cell* best = nullptr;
  for (const Cell& cell : cells) {
    if (!method.admits(cell.zeta, cell.tau)) continue;
    if (best == nullptr || cell.val < best->val) best = &cell;
  }
  return best;
}

}  // namespace

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t at = text.find(',', start);
    std::string token =
        at == std::string::npos ? text.substr(start) : text.substr(start, at - start);
    const char* begin = token.c_str();
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end == begin || *end != '\0' || !std::isfinite(v))
      throw std::invalid_argument("bad numeric list entry: '" + token + "'");
    out.push_back(v);
    if (at == std::string::npos) break;
    start = at + 1;
  }
  if (out.empty()) throw std::invalid_argument("empty numeric list");
  return out;
}

NormFamily parse_family(const std::string& name) {
  if (name == "singleton") return NormFamily::singleton;
  if (name == "smoothed") return NormFamily::smoothed;
  if (name == "max") return NormFamily::max;
  if (name == "uniform-cap") return NormFamily::uniform_cap;
  if (name == "multiplicative") return NormFamily::multiplicative;
  if (name == "exponent") return NormFamily::exponent;
  if (name == "lower-bounded") return NormFamily::lower_bounded;
  if (name == "segment") return NormFamily::segment;
  throw std::invalid_argument("unknown weight family: " + name);
}

const char* to_string(NormFamily family) {
  switch (family) {
    case NormFamily::singleton: return "singleton";
    case NormFamily::smoothed: return "smoothed";
    case NormFamily::max: return "max";
    case NormFamily::uniform_cap: return "uniform-cap";
    case NormFamily::multiplicative: return "multiplicative";
    case NormFamily::exponent: return "exponent";
    case NormFamily::lower_bounded: return "lower-bounded";
    case NormFamily::segment: return "segment";
  }
  return "unknown";
}

Index AnyWeightFamily::dim() const {
  return std::visit([](const auto& s) { return s.dim(); }, set_);
}

Vector AnyWeightFamily::interior_point() const {
  return std::visit([](const auto& s) { return s.interior_point(); }, set_);
}

bool AnyWeightFamily::nontrivial() const {
  return std::visit([](const auto& s) { return s.nontrivial(); }, set_);
}

LinMax linmax(const AnyWeightFamily& family, const Vector& v) {
  return std::visit([&](const auto& s) { return linmax(s, v); }, family.set_);
}

double vec_norm(const AnyWeightFamily& family, const Vector& u) {
  return std::visit([&](const auto& s) { return vec_norm(s, u); }, family.set_);
}

bool is_point_set(const AnyWeightFamily& family) {
  return std::visit([](const auto& s) { return is_point_set(s); }, family.set_);
}

AnyWeightFamily build_weight_family(const SetSpec& spec, const MarginalDist& marginals) {
  Index n = marginals.dim();
  switch (spec.family) {
    case NormFamily::singleton:
      return AnyWeightFamily(WeightSet::singleton(marginals));
    case NormFamily::smoothed:
      return AnyWeightFamily(WeightSet::smoothed(marginals, spec.zeta));
    case NormFamily::max:
      return AnyWeightFamily(WeightSet::full_simplex(n));
    case NormFamily::uniform_cap:
      return AnyWeightFamily(WeightSet::uniform_cap(n, spec.eps));
    case NormFamily::multiplicative:
      return AnyWeightFamily(
          WeightSet::capped_multiplicative(marginals, spec.zeta, spec.gamma));
    case NormFamily::exponent:
      return AnyWeightFamily(
          WeightSet::capped_exponent(marginals, spec.zeta, spec.tau));
    case NormFamily::lower_bounded:
      return AnyWeightFamily(WeightSet::lower_bounded(n, spec.level));
    case NormFamily::segment:
      return AnyWeightFamily(SmoothingSegment(marginals));
  }
  throw std::invalid_argument("unknown weight family");
}

bool Method::admits(double z, double t) const {
  const double tol = 1e-12;
  if (!zeta_free && std::abs(z - zeta) > tol) return false;
  if (!tau_free && std::abs(t - tau) > tol) return false;
  return true;
}

const std::vector<Method>& method_table() {
  static const std::vector<Method> table = {
      {"max", true, 0.0, false, 1.0},
      {"uniform-trace", false, 1.0, false, 0.0},
      {"empirical-trace", false, 0.0, false, 0.0},
      {"smoothed-trace", true, 0.0, false, 0.0},
      {"local-max", true, 0.0, true, 0.0},
  };
  return table;
}

ExperimentGrid ExperimentGrid::simulation_default() {
  ExperimentGrid grid;
  for (int i = 0; i <= 10; ++i) {
    grid.zetas.push_back(i / 10.0);
    grid.taus.push_back(i / 10.0);
  }
  for (int p = 1; p <= 10; ++p) grid.lambdas.push_back(std::ldexp(1.0, p));
  return grid;
}

ExperimentGrid ExperimentGrid::fast() {
  ExperimentGrid grid;
  grid.zetas = {0.0, 0.5, 1.0};
  grid.taus = {0.0, 0.5, 1.0};
  grid.lambdas = {4.0, 32.0, 256.0};
  return grid;
}

void parallel_for(std::size_t count, int threads,
                  const std::function<void(std::size_t)>& fn) {
  if (threads < 1) throw std::invalid_argument("parallel_for: threads must be positive");
  std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(threads), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex error_lock;
  std::exception_ptr first_error;
  auto body = [&]() {
    while (true) {
      std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> hold(error_lock);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(body);
  for (std::thread& worker : pool) worker.join();
  if (first_error) std::rethrow_exception(first_error);
}

namespace {

// Trains one grid cell; divergence counts as an infinitely bad cell.
void run_cell(Cell& cell, const SampleSet& train_set, const SampleSet& val_set,
              const SampleSet& test_set, const Marginals& marginals, Index rank,
              int epochs, double step_initial, double step_decay,
              std::uint64_t init_seed, Metric metric) {
  try {
    WeightSet rows = WeightSet::capped_exponent(marginals.rows, cell.zeta, cell.tau);
    WeightSet cols = WeightSet::capped_exponent(marginals.cols, cell.zeta, cell.tau);
    TrainConfig config(std::move(rows), std::move(cols));
    config.rank = rank;
    config.penalty_weight = cell.lambda;
    config.epochs = epochs;
    config.step_initial = step_initial;
    config.step_decay = step_decay;
    config.seed = init_seed;
    TrainResult result = train(train_set, config);
    cell.val = evaluate(result.model, val_set, metric);
    cell.test = evaluate(result.model, test_set, metric);
  } catch (const DivergenceError&) {
    cell.val = kInf;
    cell.test = kInf;
  }
}

}  // namespace

std::vector<SimulationRow> run_simulation_study(const StudyConfig& config) {
  if (config.trials < 1) throw std::invalid_argument("simulation study: trials must be positive");
  std::vector<SimulationRow> rows;
  for (int trial = 0; trial < config.trials; ++trial) {
    std::uint64_t trial_seed =
        config.seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(trial + 1);
    SimulationSpec spec{config.n, config.signal_rank, config.noise, trial_seed};
    SimulatedData sim = simulate(spec);
    Marginals marginals = empirical_marginals(sim.train);
    std::uint64_t init_seed = trial_seed ^ 0x517cc1b727220a95ULL;

    std::vector<Cell> cells = grid_cells(config.grid);
    parallel_for(cells.size(), config.threads, [&](std::size_t i) {
      run_cell(cells[i], sim.train, sim.validation, sim.test, marginals,
               config.model_rank, config.epochs, config.step_initial,
               config.step_decay, init_seed, Metric::mse);
    });

    for (const Method& method : method_table()) {
      const Cell* cell = select_cell(cells, method);
      if (cell == nullptr) continue;
      rows.push_back({trial + 1, method.name, cell->zeta, cell->tau, cell->lambda,
                      cell->val, cell->test});
    }
  }
  return rows;
}

void write_simulation_csv(const std::string& path,
                          const std::vector<SimulationRow>& rows) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write results file: " + path);
  out << "trial,method,zeta,tau,lambda,val_mse,test_mse\n";
  for (const SimulationRow& row : rows)
    out << row.trial << ',' << row.method << ',' << format_number(row.zeta) << ','
        << format_number(row.tau) << ',' << format_number(row.lambda) << ','
        << format_number(row.val_mse) << ',' << format_number(row.test_mse) << '\n';
  if (!out) throw IoError("failed writing results file: " + path);
}

GridsearchResult run_gridsearch(const SampleSet& train_set, const SampleSet& validation,
                                const SampleSet& test_set,
                                const GridsearchConfig& config) {
  validate(train_set);
  validate(validation);
  validate(test_set);
  if (train_set.rows != validation.rows || train_set.rows != test_set.rows ||
      train_set.cols != validation.cols || train_set.cols != test_set.cols)
    throw std::invalid_argument("gridsearch: splits disagree on matrix shape");

  Marginals marginals =
      config.uniform_marginals
          ? Marginals{MarginalDist::uniform(train_set.rows),
                      MarginalDist::uniform(train_set.cols)}
          : empirical_marginals(train_set);

  std::vector<Cell> cells = grid_cells(config.grid);
  parallel_for(cells.size(), config.threads, [&](std::size_t i) {
    run_cell(cells[i], train_set, validation, test_set, marginals, config.rank,
             config.epochs, config.step_initial, config.step_decay, config.seed,
             Metric::rmse);
  });

  GridsearchResult result;
  result.zetas = config.grid.zetas;
  result.taus = config.grid.taus;
  Index zn = static_cast<Index>(result.zetas.size());
  Index tn = static_cast<Index>(result.taus.size());
  result.test_rmse.resize(zn, tn);
  result.selected_lambda.resize(zn, tn);

  std::size_t ln = config.grid.lambdas.size();
  for (Index zi = 0; zi < zn; ++zi) {
    for (Index ti = 0; ti < tn; ++ti) {
      std::size_t from = (static_cast<std::size_t>(zi) * static_cast<std::size_t>(tn) +
                          static_cast<std::size_t>(ti)) *
                         ln;
      const Cell* best = &cells[from];
      for (std::size_t k = 1; k < ln; ++k)
        if (cells[from + k].val < best->val) best = &cells[from + k];
      result.test_rmse(zi, ti) = best->test;
      result.selected_lambda(zi, ti) = best->lambda;
    }
  }

  for (const Method& method : method_table()) {
    const Cell* cell = select_cell(cells, method);
    if (cell == nullptr) continue;
    result.methods.push_back(
        {method.name, cell->zeta, cell->tau, cell->lambda, cell->val, cell->test});
  }
  return result;
}

void write_gridsearch_csv(const std::string& path, const GridsearchResult& result) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write grid file: " + path);
  out << "zeta";
  for (double t : result.taus) out << ",tau_" << format_number(t);
  out << '\n';
  for (Index zi = 0; zi < result.test_rmse.rows(); ++zi) {
    out << format_number(result.zetas[static_cast<std::size_t>(zi)]);
    for (Index ti = 0; ti < result.test_rmse.cols(); ++ti)
      out << ',' << format_number(result.test_rmse(zi, ti));
    out << '\n';
  }
  if (!out) throw IoError("failed writing grid file: " + path);
}

void write_method_csv(const std::string& path,
                      const std::vector<MethodSummary>& methods) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write method file: " + path);
  out << "method,zeta,tau,lambda,val_rmse,test_rmse\n";
  for (const MethodSummary& m : methods)
    out << m.method << ',' << format_number(m.zeta) << ',' << format_number(m.tau)
        << ',' << format_number(m.lambda) << ',' << format_number(m.val_rmse) << ','
        << format_number(m.test_rmse) << '\n';
  if (!out) throw IoError("failed writing method file: " + path);
}

void write_config_echo(const std::string& path,
                       const std::vector<std::pair<std::string, std::string>>& entries) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write config echo: " + path);
  for (const auto& [key, value] : entries) out << key << '=' << value << '\n';
  if (!out) throw IoError("failed writing config echo: " + path);
}

RatingsTriple load_ratings_triple(const std::string& train_path,
                                  const std::string& validation_path,
                                  const std::string& test_path, RatingsFormat format) {
  RatingsTriple triple;
  triple.train = load_ratings_into(triple.row_ids, triple.col_ids, triple.diagnostics,
                                   train_path, format);
  triple.validation = load_ratings_into(triple.row_ids, triple.col_ids,
                                        triple.diagnostics, validation_path, format);
  triple.test = load_ratings_into(triple.row_ids, triple.col_ids, triple.diagnostics,
                                  test_path, format);
  Index rows = static_cast<Index>(triple.row_ids.names.size());
  Index cols = static_cast<Index>(triple.col_ids.names.size());
  for (SampleSet* split : {&triple.train, &triple.validation, &triple.test}) {
    split->rows = rows;
    split->cols = cols;
  }
  triple.train.role = SplitRole::train;
  triple.validation.role = SplitRole::validation;
  triple.test.role = SplitRole::test;
  return triple;
}

}  // namespace localmax
