// Command line front end: exact norm evaluation, factorized training,
// simulation studies, and ratings-file grid searches.
//
// Exit codes: 0 success, 2 input error, 3 numerical non-convergence,
// 4 infeasible configuration.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "localmax/experiments.hpp"
#include "localmax/oracle.hpp"

namespace {

using namespace localmax;

constexpr int kExitOk = 0;
constexpr int kExitGeneric = 1;
constexpr int kExitInput = 2;
constexpr int kExitNonConvergence = 3;
constexpr int kExitInfeasible = 4;

int default_threads() {
  const char* env = std::getenv("LOCALMAX_THREADS");
  if (env == nullptr) return 1;
  char* end = nullptr;
  long value = std::strtol(env, &end, 10);
  if (end == env || *end != '\0' || value < 1) {
    std::cerr << "warning: ignoring invalid LOCALMAX_THREADS='" << env << "'\n";
    return 1;
  }
  return static_cast<int>(value);
}

std::string config_echo_path(const std::string& out) {
  std::string stem = out;
  if (stem.size() > 4 && stem.substr(stem.size() - 4) == ".csv")
    stem.resize(stem.size() - 4);
  return stem + ".config.txt";
}

std::string sibling_path(const std::string& out, const std::string& suffix) {
  std::string stem = out;
  if (stem.size() > 4 && stem.substr(stem.size() - 4) == ".csv")
    stem.resize(stem.size() - 4);
  return stem + suffix;
}

MarginalDist read_marginals_file(const std::string& path) {
  Matrix raw = read_matrix_csv(path);
  if (raw.rows() != 1 && raw.cols() != 1)
    throw IoError("marginals file must hold a single row or column: " + path);
  Vector w = raw.rows() == 1 ? Vector(raw.transpose().col(0)) : Vector(raw.col(0));
  return MarginalDist(w);
}

struct FamilyFlags {
  std::string family = "exponent";
  double zeta = 0.0;
  double tau = 0.0;
  double gamma = 2.0;
  double eps = 1.0;
  double level = 0.0;

  void attach(CLI::App* cmd) {
    cmd->add_option("--family", family,
                    "weight-set family: singleton|smoothed|max|uniform-cap|"
                    "multiplicative|exponent|lower-bounded|segment")
        ->capture_default_str();
    cmd->add_option("--zeta", zeta, "smoothing toward uniform, in [0,1]")
        ->capture_default_str();
    cmd->add_option("--tau", tau, "cap exponent, in [0,1]")->capture_default_str();
    cmd->add_option("--gamma", gamma, "multiplicative cap ratio")
        ->capture_default_str();
    cmd->add_option("--eps", eps, "uniform cap level, in [1/n,1]")
        ->capture_default_str();
    cmd->add_option("--level", level, "lower bound level, in [0,1]")
        ->capture_default_str();
  }

  SetSpec spec() const {
    SetSpec s;
    s.family = parse_family(family);
    s.zeta = zeta;
    s.tau = tau;
    s.gamma = gamma;
    s.eps = eps;
    s.level = level;
    return s;
  }
};

struct GridFlags {
  std::string zetas, taus, lambdas;
  bool fast = false;

  void attach(CLI::App* cmd) {
    cmd->add_option("--zetas", zetas, "comma separated smoothing grid");
    cmd->add_option("--taus", taus, "comma separated cap-exponent grid");
    cmd->add_option("--lambdas", lambdas, "comma separated penalty-weight grid");
    cmd->add_flag("--fast", fast, "small 3x3x3 grid for quick runs");
  }

  ExperimentGrid grid() const {
    ExperimentGrid g =
        fast ? ExperimentGrid::fast() : ExperimentGrid::simulation_default();
    if (!zetas.empty()) g.zetas = parse_double_list(zetas);
    if (!taus.empty()) g.taus = parse_double_list(taus);
    if (!lambdas.empty()) g.lambdas = parse_double_list(lambdas);
    return g;
  }

  void echo(std::vector<std::pair<std::string, std::string>>* entries) const {
    ExperimentGrid g = grid();
    auto join = [](const std::vector<double>& xs) {
      std::string text;
      for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i > 0) text += ',';
        text += format_number(xs[i]);
      }
      return text;
    };
    entries->emplace_back("zetas", join(g.zetas));
    entries->emplace_back("taus", join(g.taus));
    entries->emplace_back("lambdas", join(g.lambdas));
  }
};

void save_model(const std::string& path, const FactorModel& model,
                const std::vector<std::string>& row_names,
                const std::vector<std::string>& col_names) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write model file: " + path);
  Index n = model.A.rows(), m = model.B.rows(), k = model.rank();
  out << "localmax-model 1\n" << n << ' ' << m << ' ' << k << '\n';
  char buf[40];
  auto emit = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out << buf;
  };
  emit(model.row_offset);
  out << ' ';
  emit(model.col_offset);
  out << '\n';
  for (Index i = 0; i < n; ++i) out << row_names[static_cast<std::size_t>(i)] << '\n';
  for (Index j = 0; j < m; ++j) out << col_names[static_cast<std::size_t>(j)] << '\n';
  for (Index i = 0; i < n; ++i) {
    for (Index c = 0; c < k; ++c) {
      if (c > 0) out << ' ';
      emit(model.A(i, c));
    }
    out << '\n';
  }
  for (Index j = 0; j < m; ++j) {
    for (Index c = 0; c < k; ++c) {
      if (c > 0) out << ' ';
      emit(model.B(j, c));
    }
    out << '\n';
  }
  if (!out) throw IoError("failed writing model file: " + path);
}

struct SavedModel {
  FactorModel model;
  IdIndex row_ids;
  IdIndex col_ids;
};

SavedModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open model file: " + path);
  std::string magic;
  int version = 0;
  in >> magic >> version;
  if (!in || magic != "localmax-model" || version != 1)
    throw IoError("not a recognizable model file: " + path);
  Index n = 0, m = 0, k = 0;
  in >> n >> m >> k;
  SavedModel saved;
  in >> saved.model.row_offset >> saved.model.col_offset;
  if (!in || n < 1 || m < 1 || k < 1) throw IoError("corrupt model header: " + path);
  std::string line;
  std::getline(in, line);  // finish the offsets line
  for (Index i = 0; i < n; ++i) {
    if (!std::getline(in, line)) throw IoError("truncated model file: " + path);
    saved.row_ids.intern(line);
  }
  for (Index j = 0; j < m; ++j) {
    if (!std::getline(in, line)) throw IoError("truncated model file: " + path);
    saved.col_ids.intern(line);
  }
  saved.model.A.resize(n, k);
  saved.model.B.resize(m, k);
  for (Index i = 0; i < n; ++i)
    for (Index c = 0; c < k; ++c)
      if (!(in >> saved.model.A(i, c))) throw IoError("truncated model file: " + path);
  for (Index j = 0; j < m; ++j)
    for (Index c = 0; c < k; ++c)
      if (!(in >> saved.model.B(j, c))) throw IoError("truncated model file: " + path);
  return saved;
}

struct NormArgs {
  std::string matrix_path;
  FamilyFlags family;
  std::string marginals = "uniform";
  std::string row_marginals_path, col_marginals_path;
  double tol = 1e-6;
  int max_iterations = 500;
  bool print_weights = false;
};

int cmd_norm(const NormArgs& args) {
  Matrix X = read_matrix_csv(args.matrix_path);

  MarginalDist rows = MarginalDist::uniform(X.rows());
  MarginalDist cols = MarginalDist::uniform(X.cols());
  if (args.marginals == "file") {
    if (args.row_marginals_path.empty() || args.col_marginals_path.empty())
      throw std::invalid_argument(
          "norm: --marginals file requires --row-marginals and --col-marginals");
    rows = read_marginals_file(args.row_marginals_path);
    cols = read_marginals_file(args.col_marginals_path);
    if (rows.dim() != X.rows() || cols.dim() != X.cols())
      throw std::invalid_argument("norm: marginals do not match the matrix shape");
  } else if (args.marginals != "uniform") {
    throw std::invalid_argument(
        "norm: marginals must be 'uniform' or 'file' (empirical needs ratings data)");
  }

  SetSpec spec = args.family.spec();
  AnyWeightFamily row_set = build_weight_family(spec, rows);
  AnyWeightFamily col_set = build_weight_family(spec, cols);

  NormOptions options;
  options.tol = args.tol;
  options.max_iterations = args.max_iterations;
  NormCertificate cert = local_max_norm(X, row_set, col_set, options);

  std::cout << "value " << format_number(cert.value) << '\n'
            << "gap " << format_number(cert.gap) << '\n'
            << "iterations " << cert.iterations << '\n'
            << "converged " << (cert.converged ? "true" : "false") << '\n';
  if (args.print_weights) {
    std::cout << "row_weights";
    for (Index i = 0; i < cert.row_weights.size(); ++i)
      std::cout << ' ' << format_number(cert.row_weights[i]);
    std::cout << "\ncol_weights";
    for (Index j = 0; j < cert.col_weights.size(); ++j)
      std::cout << ' ' << format_number(cert.col_weights[j]);
    std::cout << '\n';
  }
  return cert.converged ? kExitOk : kExitNonConvergence;
}

struct TrainArgs {
  std::string data_path;
  std::string format = "tab";
  FamilyFlags family;
  std::string marginals = "empirical";
  std::string row_marginals_path, col_marginals_path;
  Index rank = 8;
  double lambda = 0.0;
  std::string loss = "squared";
  int epochs = 500;
  double step_initial = 0.05;
  double step_decay = 0.5;
  std::uint64_t seed = 0;
  std::string model_out;
  std::string val_path;
};

int cmd_train(const TrainArgs& args) {
  RatingsFormat format = parse_ratings_format(args.format);
  IdIndex row_ids, col_ids;
  std::vector<std::string> diagnostics;
  SampleSet data = load_ratings_into(row_ids, col_ids, diagnostics, args.data_path, format);
  std::optional<SampleSet> val;
  if (!args.val_path.empty()) {
    val = load_ratings_into(row_ids, col_ids, diagnostics, args.val_path, format);
    data.rows = val->rows = static_cast<Index>(row_ids.names.size());
    data.cols = val->cols = static_cast<Index>(col_ids.names.size());
  }
  for (const std::string& note : diagnostics) std::cerr << "warning: " << note << '\n';

  Marginals marginals{MarginalDist::uniform(data.rows), MarginalDist::uniform(data.cols)};
  if (args.marginals == "empirical") {
    marginals = empirical_marginals(data);
  } else if (args.marginals == "file") {
    if (args.row_marginals_path.empty() || args.col_marginals_path.empty())
      throw std::invalid_argument(
          "train: --marginals file requires --row-marginals and --col-marginals");
    marginals = {read_marginals_file(args.row_marginals_path),
                 read_marginals_file(args.col_marginals_path)};
    if (marginals.rows.dim() != data.rows || marginals.cols.dim() != data.cols)
      throw std::invalid_argument("train: marginals do not match the data shape");
  } else if (args.marginals != "uniform") {
    throw std::invalid_argument("train: marginals must be uniform, empirical, or file");
  }

  SetSpec spec = args.family.spec();
  // Training needs the base/scale/caps form; the segment family has no caps.
  if (spec.family == NormFamily::segment)
    throw std::invalid_argument("train: the segment family is not trainable");

  auto concrete_set = [&](const MarginalDist& p) {
    switch (spec.family) {
      case NormFamily::singleton: return WeightSet::singleton(p);
      case NormFamily::smoothed: return WeightSet::smoothed(p, spec.zeta);
      case NormFamily::max: return WeightSet::full_simplex(p.dim());
      case NormFamily::uniform_cap: return WeightSet::uniform_cap(p.dim(), spec.eps);
      case NormFamily::multiplicative:
        return WeightSet::capped_multiplicative(p, spec.zeta, spec.gamma);
      case NormFamily::exponent:
        return WeightSet::capped_exponent(p, spec.zeta, spec.tau);
      case NormFamily::lower_bounded:
        return WeightSet::lower_bounded(p.dim(), spec.level);
      default: throw std::invalid_argument("train: unsupported family");
    }
  };

  TrainConfig config(concrete_set(marginals.rows), concrete_set(marginals.cols));
  config.rank = args.rank;
  config.penalty_weight = args.lambda;
  config.loss = parse_loss(args.loss);
  config.epochs = args.epochs;
  config.step_initial = args.step_initial;
  config.step_decay = args.step_decay;
  config.seed = args.seed;

  TrainResult result = train(data, config);
  std::cout << "objective " << format_number(result.history.objective.back()) << '\n'
            << "best_epoch " << result.history.best_epoch << '\n'
            << "train_rmse " << format_number(evaluate(result.model, data, Metric::rmse))
            << '\n';
  if (val)
    std::cout << "val_rmse " << format_number(evaluate(result.model, *val, Metric::rmse))
              << '\n';
  if (!args.model_out.empty())
    save_model(args.model_out, result.model, row_ids.names, col_ids.names);
  return kExitOk;
}

struct EvaluateArgs {
  std::string model_path;
  std::string data_path;
  std::string format = "tab";
  std::string metric = "rmse";
};

int cmd_evaluate(const EvaluateArgs& args) {
  SavedModel saved = load_model(args.model_path);
  RatingsFile file = load_ratings(args.data_path, parse_ratings_format(args.format));
  for (const std::string& note : file.diagnostics) std::cerr << "warning: " << note << '\n';

  SampleSet mapped;
  mapped.rows = saved.model.A.rows();
  mapped.cols = saved.model.B.rows();
  std::size_t skipped = 0;
  for (const Rating& entry : file.samples.entries) {
    const std::string& row_name = file.row_ids.names[static_cast<std::size_t>(entry.row)];
    const std::string& col_name = file.col_ids.names[static_cast<std::size_t>(entry.col)];
    auto ri = saved.row_ids.lookup.find(row_name);
    auto ci = saved.col_ids.lookup.find(col_name);
    if (ri == saved.row_ids.lookup.end() || ci == saved.col_ids.lookup.end()) {
      ++skipped;
      continue;
    }
    mapped.entries.push_back({ri->second, ci->second, entry.value});
  }
  if (mapped.entries.empty())
    throw IoError("evaluate: no ratings match the model's id space");
  if (skipped > 0)
    std::cerr << "warning: skipped " << skipped << " ratings outside the model id space\n";

  Metric metric = parse_metric(args.metric);
  std::cout << args.metric << ' '
            << format_number(evaluate(saved.model, mapped, metric)) << '\n';
  return kExitOk;
}

struct SimulateArgs {
  Index n = 30;
  Index signal_rank = 2;
  double noise = 0.3;
  int trials = 10;
  Index model_rank = 8;
  int epochs = 500;
  std::uint64_t seed = 0;
  int threads = default_threads();
  double step_initial = 0.05;
  double step_decay = 0.5;
  GridFlags grid;
  std::string out = "simulation.csv";
};

int cmd_simulate(const SimulateArgs& args) {
  StudyConfig config;
  config.n = args.n;
  config.signal_rank = args.signal_rank;
  config.noise = args.noise;
  config.model_rank = args.model_rank;
  config.epochs = args.epochs;
  config.trials = args.trials;
  config.seed = args.seed;
  config.threads = args.threads;
  config.step_initial = args.step_initial;
  config.step_decay = args.step_decay;
  config.grid = args.grid.grid();

  std::vector<SimulationRow> rows = run_simulation_study(config);
  write_simulation_csv(args.out, rows);

  std::vector<std::pair<std::string, std::string>> echo = {
      {"command", "simulate"},
      {"n", std::to_string(args.n)},
      {"signal_rank", std::to_string(args.signal_rank)},
      {"noise", format_number(args.noise)},
      {"trials", std::to_string(args.trials)},
      {"model_rank", std::to_string(args.model_rank)},
      {"epochs", std::to_string(args.epochs)},
      {"seed", std::to_string(args.seed)},
      {"threads", std::to_string(args.threads)},
      {"step_initial", format_number(args.step_initial)},
      {"step_decay", format_number(args.step_decay)},
      {"out", args.out},
  };
  args.grid.echo(&echo);
  write_config_echo(config_echo_path(args.out), echo);

  for (const Method& method : method_table()) {
    double total = 0.0;
    int count = 0;
    for (const SimulationRow& row : rows)
      if (row.method == method.name) {
        total += row.test_mse;
        ++count;
      }
    if (count > 0)
      std::cout << method.name << " mean_test_mse "
                << format_number(total / count) << '\n';
  }
  return kExitOk;
}

struct GridsearchArgs {
  std::string train_path, val_path, test_path;
  std::string format = "tab";
  std::string marginals = "empirical";
  Index rank = 30;
  int epochs = 500;
  std::uint64_t seed = 0;
  int threads = default_threads();
  double step_initial = 0.05;
  double step_decay = 0.5;
  GridFlags grid;
  std::string out = "gridsearch.csv";
};

int cmd_gridsearch(const GridsearchArgs& args) {
  RatingsFormat format = parse_ratings_format(args.format);
  RatingsTriple data =
      load_ratings_triple(args.train_path, args.val_path, args.test_path, format);
  for (const std::string& note : data.diagnostics) std::cerr << "warning: " << note << '\n';

  GridsearchConfig config;
  config.rank = args.rank;
  config.epochs = args.epochs;
  config.seed = args.seed;
  config.threads = args.threads;
  config.step_initial = args.step_initial;
  config.step_decay = args.step_decay;
  config.grid = args.grid.grid();
  if (args.marginals == "uniform") {
    config.uniform_marginals = true;
  } else if (args.marginals != "empirical") {
    throw std::invalid_argument("gridsearch: marginals must be uniform or empirical");
  }

  GridsearchResult result = run_gridsearch(data.train, data.validation, data.test, config);
  write_gridsearch_csv(args.out, result);
  write_method_csv(sibling_path(args.out, ".methods.csv"), result.methods);

  std::vector<std::pair<std::string, std::string>> echo = {
      {"command", "gridsearch"},
      {"train", args.train_path},
      {"validation", args.val_path},
      {"test", args.test_path},
      {"format", args.format},
      {"marginals", args.marginals},
      {"rank", std::to_string(args.rank)},
      {"epochs", std::to_string(args.epochs)},
      {"seed", std::to_string(args.seed)},
      {"threads", std::to_string(args.threads)},
      {"step_initial", format_number(args.step_initial)},
      {"step_decay", format_number(args.step_decay)},
      {"out", args.out},
  };
  args.grid.echo(&echo);
  write_config_echo(config_echo_path(args.out), echo);

  for (const MethodSummary& m : result.methods)
    std::cout << m.method << " zeta " << format_number(m.zeta) << " tau "
              << format_number(m.tau) << " lambda " << format_number(m.lambda)
              << " test_rmse " << format_number(m.test_rmse) << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"local max norms: evaluation, training, and experiments"};
  app.require_subcommand(1);

  NormArgs norm_args;
  CLI::App* norm = app.add_subcommand("norm", "evaluate the norm of a dense matrix");
  norm->add_option("--matrix", norm_args.matrix_path, "dense CSV matrix, no header")
      ->required();
  norm_args.family.attach(norm);
  norm->add_option("--marginals", norm_args.marginals, "uniform|file")
      ->capture_default_str();
  norm->add_option("--row-marginals", norm_args.row_marginals_path,
                   "CSV vector of row marginals");
  norm->add_option("--col-marginals", norm_args.col_marginals_path,
                   "CSV vector of column marginals");
  norm->add_option("--tol", norm_args.tol, "relative duality-gap target")
      ->capture_default_str();
  norm->add_option("--max-iters", norm_args.max_iterations, "iteration budget")
      ->capture_default_str();
  norm->add_flag("--print-weights", norm_args.print_weights,
                 "also print the maximizing weights");

  TrainArgs train_args;
  CLI::App* train_cmd = app.add_subcommand("train", "fit factors to a ratings file");
  train_cmd->add_option("--data", train_args.data_path, "ratings file")->required();
  train_cmd->add_option("--format", train_args.format, "tab|double-colon|comma")
      ->capture_default_str();
  train_args.family.attach(train_cmd);
  train_cmd->add_option("--marginals", train_args.marginals, "uniform|empirical|file")
      ->capture_default_str();
  train_cmd->add_option("--row-marginals", train_args.row_marginals_path,
                        "CSV vector of row marginals");
  train_cmd->add_option("--col-marginals", train_args.col_marginals_path,
                        "CSV vector of column marginals");
  train_cmd->add_option("--rank", train_args.rank, "factorization rank")
      ->capture_default_str();
  train_cmd->add_option("--lambda", train_args.lambda, "penalty weight")
      ->capture_default_str();
  train_cmd->add_option("--loss", train_args.loss, "squared|absolute")
      ->capture_default_str();
  train_cmd->add_option("--epochs", train_args.epochs, "training epochs")
      ->capture_default_str();
  train_cmd->add_option("--step", train_args.step_initial, "initial step size")
      ->capture_default_str();
  train_cmd->add_option("--decay", train_args.step_decay, "step decay exponent")
      ->capture_default_str();
  train_cmd->add_option("--seed", train_args.seed, "random seed")->capture_default_str();
  train_cmd->add_option("--model-out", train_args.model_out, "save the fitted model");
  train_cmd->add_option("--val", train_args.val_path, "validation ratings file");

  EvaluateArgs eval_args;
  CLI::App* eval_cmd = app.add_subcommand("evaluate", "score a saved model");
  eval_cmd->add_option("--model", eval_args.model_path, "model file")->required();
  eval_cmd->add_option("--data", eval_args.data_path, "ratings file")->required();
  eval_cmd->add_option("--format", eval_args.format, "tab|double-colon|comma")
      ->capture_default_str();
  eval_cmd->add_option("--metric", eval_args.metric, "mse|rmse|mae")
      ->capture_default_str();

  SimulateArgs sim_args;
  CLI::App* sim_cmd = app.add_subcommand("simulate", "noisy low-rank recovery study");
  sim_cmd->add_option("--n", sim_args.n, "matrix size")->capture_default_str();
  sim_cmd->add_option("--k", sim_args.signal_rank, "signal rank")->capture_default_str();
  sim_cmd->add_option("--noise", sim_args.noise, "noise level")->capture_default_str();
  sim_cmd->add_option("--trials", sim_args.trials, "independent trials")
      ->capture_default_str();
  sim_cmd->add_option("--rank", sim_args.model_rank, "model rank")->capture_default_str();
  sim_cmd->add_option("--epochs", sim_args.epochs, "training epochs")
      ->capture_default_str();
  sim_cmd->add_option("--seed", sim_args.seed, "random seed")->capture_default_str();
  sim_cmd->add_option("--threads", sim_args.threads, "worker threads")
      ->capture_default_str();
  sim_cmd->add_option("--step", sim_args.step_initial, "initial step size")
      ->capture_default_str();
  sim_cmd->add_option("--decay", sim_args.step_decay, "step decay exponent")
      ->capture_default_str();
  sim_args.grid.attach(sim_cmd);
  sim_cmd->add_option("--out", sim_args.out, "results CSV path")->capture_default_str();

  GridsearchArgs grid_args;
  CLI::App* grid_cmd =
      app.add_subcommand("gridsearch", "method comparison on rating splits");
  grid_cmd->add_option("--train", grid_args.train_path, "training ratings file")
      ->required();
  grid_cmd->add_option("--val", grid_args.val_path, "validation ratings file")
      ->required();
  grid_cmd->add_option("--test", grid_args.test_path, "test ratings file")->required();
  grid_cmd->add_option("--format", grid_args.format, "tab|double-colon|comma")
      ->capture_default_str();
  grid_cmd->add_option("--marginals", grid_args.marginals, "uniform|empirical")
      ->capture_default_str();
  grid_cmd->add_option("--rank", grid_args.rank, "model rank")->capture_default_str();
  grid_cmd->add_option("--epochs", grid_args.epochs, "training epochs")
      ->capture_default_str();
  grid_cmd->add_option("--seed", grid_args.seed, "random seed")->capture_default_str();
  grid_cmd->add_option("--threads", grid_args.threads, "worker threads")
      ->capture_default_str();
  grid_cmd->add_option("--step", grid_args.step_initial, "initial step size")
      ->capture_default_str();
  grid_cmd->add_option("--decay", grid_args.step_decay, "step decay exponent")
      ->capture_default_str();
  grid_args.grid.attach(grid_cmd);
  grid_cmd->add_option("--out", grid_args.out, "grid CSV path")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return kExitInput;
  }

  try {
    if (norm->parsed()) return cmd_norm(norm_args);
    if (train_cmd->parsed()) return cmd_train(train_args);
    if (eval_cmd->parsed()) return cmd_evaluate(eval_args);
    if (sim_cmd->parsed()) return cmd_simulate(sim_args);
    if (grid_cmd->parsed()) return cmd_gridsearch(grid_args);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const DivergenceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNonConvergence;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitGeneric;
  }
  return kExitOk;
}
