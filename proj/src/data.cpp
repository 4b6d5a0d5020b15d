#include "localmax/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

namespace localmax {

namespace {

std::string format_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

// Splits one line on the format's separator; "::" is a two-character token.
std::vector<std::string> split_fields(const std::string& line, RatingsFormat format) {
  std::string sep = format == RatingsFormat::tab     ? "\t"
                    : format == RatingsFormat::comma ? ","
                                                     : "::";
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t at = line.find(sep, start);
    if (at == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, at - start));
    start = at + sep.size();
  }
}

bool parse_double(const std::string& field, double* out) {
  const char* begin = field.c_str();
  char* end = nullptr;
  double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0' || !std::isfinite(v)) return false;
  *out = v;
  return true;
}

}  // namespace

const char* to_string(SplitRole role) {
  switch (role) {
    case SplitRole::train: return "train";
    case SplitRole::validation: return "validation";
    case SplitRole::test: return "test";
  }
  return "unknown";
}

void validate(const SampleSet& samples) {
  if (samples.rows < 0 || samples.cols < 0)
    throw std::invalid_argument("SampleSet: negative shape");
  for (const Rating& entry : samples.entries) {
    if (entry.row < 0 || entry.row >= samples.rows || entry.col < 0 ||
        entry.col >= samples.cols)
      throw std::invalid_argument("SampleSet: entry outside declared shape");
    if (!std::isfinite(entry.value))
      throw std::invalid_argument("SampleSet: non-finite rating value");
  }
}

bool has_duplicates(const SampleSet& samples) {
  std::vector<std::pair<Index, Index>> seen;
  seen.reserve(samples.size());
  for (const Rating& entry : samples.entries) seen.emplace_back(entry.row, entry.col);
  std::sort(seen.begin(), seen.end());
  return std::adjacent_find(seen.begin(), seen.end()) != seen.end();
}

SimulatedData simulate(const SimulationSpec& spec) {
  if (spec.n < 1 || spec.rank < 1)
    throw std::invalid_argument("simulate: size and rank must be positive");
  if (!(spec.noise >= 0.0)) throw std::invalid_argument("simulate: negative noise");
  std::size_t per_split = static_cast<std::size_t>(3 * spec.rank * spec.n);
  std::size_t total = static_cast<std::size_t>(spec.n) * static_cast<std::size_t>(spec.n);
  if (2 * per_split >= total)
    throw std::invalid_argument("simulate: split sizes infeasible for this shape");

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto sphere_rows = [&](Index count, Index dim) {
    Matrix F(count, dim);
    for (Index i = 0; i < count; ++i) {
      double norm = 0.0;
      do {
        for (Index j = 0; j < dim; ++j) F(i, j) = gauss(rng);
        norm = F.row(i).norm();
      } while (norm == 0.0);
      F.row(i) /= norm;
    }
    return F;
  };

  SimulatedData data;
  data.U = sphere_rows(spec.n, spec.rank);
  data.V = sphere_rows(spec.n, spec.rank);
  data.values = data.U * data.V.transpose();
  if (spec.noise > 0.0) {
    for (Index j = 0; j < spec.n; ++j)
      for (Index i = 0; i < spec.n; ++i) data.values(i, j) += spec.noise * gauss(rng);
  }

  std::vector<std::size_t> cells(total);
  std::iota(cells.begin(), cells.end(), std::size_t{0});
  std::shuffle(cells.begin(), cells.end(), rng);

  auto take = [&](std::size_t from, std::size_t count, SplitRole role) {
    SampleSet set;
    set.rows = set.cols = spec.n;
    set.role = role;
    set.entries.reserve(count);
    for (std::size_t k = from; k < from + count; ++k) {
      Index i = static_cast<Index>(cells[k] / static_cast<std::size_t>(spec.n));
      Index j = static_cast<Index>(cells[k] % static_cast<std::size_t>(spec.n));
      set.entries.push_back({i, j, data.values(i, j)});
    }
    return set;
  };
  data.train = take(0, per_split, SplitRole::train);
  data.validation = take(per_split, per_split, SplitRole::validation);
  data.test = take(2 * per_split, total - 2 * per_split, SplitRole::test);
  return data;
}

Marginals empirical_marginals(const SampleSet& samples) {
  validate(samples);
  if (samples.entries.empty())
    throw std::invalid_argument("empirical_marginals: empty sample set");
  Vector row_counts = Vector::Zero(samples.rows);
  Vector col_counts = Vector::Zero(samples.cols);
  for (const Rating& entry : samples.entries) {
    row_counts[entry.row] += 1.0;
    col_counts[entry.col] += 1.0;
  }
  double total = static_cast<double>(samples.size());
  return {MarginalDist(row_counts / total), MarginalDist(col_counts / total)};
}

RatingsFormat parse_ratings_format(const std::string& name) {
  if (name == "tab") return RatingsFormat::tab;
  if (name == "double-colon") return RatingsFormat::double_colon;
  if (name == "comma") return RatingsFormat::comma;
  throw std::invalid_argument("unknown ratings format: " + name);
}

Index IdIndex::intern(const std::string& name) {
  auto [it, inserted] = lookup.try_emplace(name, static_cast<Index>(names.size()));
  if (inserted) names.push_back(name);
  return it->second;
}

SampleSet load_ratings_into(IdIndex& row_ids, IdIndex& col_ids,
                            std::vector<std::string>& diagnostics,
                            const std::string& path, RatingsFormat format) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open ratings file: " + path);

  SampleSet set;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields = split_fields(line, format);
    if (fields.size() < 3) {
      diagnostics.push_back(path + ":" + std::to_string(line_no) +
                            ": expected at least 3 fields, got " +
                            std::to_string(fields.size()));
      continue;
    }
    double value = 0.0;
    if (fields[0].empty() || fields[1].empty() || !parse_double(fields[2], &value)) {
      diagnostics.push_back(path + ":" + std::to_string(line_no) +
                            ": unparseable rating entry");
      continue;
    }
    Index i = row_ids.intern(fields[0]);
    Index j = col_ids.intern(fields[1]);
    set.entries.push_back({i, j, value});
  }
  if (set.entries.empty())
    throw IoError("no valid rating lines in " + path);
  set.rows = static_cast<Index>(row_ids.names.size());
  set.cols = static_cast<Index>(col_ids.names.size());
  return set;
}

RatingsFile load_ratings(const std::string& path, RatingsFormat format) {
  RatingsFile file;
  file.samples =
      load_ratings_into(file.row_ids, file.col_ids, file.diagnostics, path, format);
  return file;
}

std::array<SampleSet, 3> split_ratings(const SampleSet& samples,
                                       const std::array<std::size_t, 3>& sizes,
                                       std::uint64_t seed) {
  validate(samples);
  std::size_t need = sizes[0] + sizes[1] + sizes[2];
  if (need > samples.size())
    throw std::invalid_argument("split_ratings: sizes exceed available samples");

  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  std::array<SampleSet, 3> out;
  std::array<SplitRole, 3> roles = {SplitRole::train, SplitRole::validation,
                                    SplitRole::test};
  std::size_t at = 0;
  for (std::size_t part = 0; part < 3; ++part) {
    out[part].rows = samples.rows;
    out[part].cols = samples.cols;
    out[part].role = roles[part];
    out[part].entries.reserve(sizes[part]);
    for (std::size_t k = 0; k < sizes[part]; ++k)
      out[part].entries.push_back(samples.entries[order[at++]]);
  }
  return out;
}

SampleSet sample_iid(const Matrix& values, std::size_t count,
                     const MarginalDist& rows, const MarginalDist& cols,
                     std::uint64_t seed) {
  if (rows.dim() != values.rows() || cols.dim() != values.cols())
    throw std::invalid_argument("sample_iid: marginal dimension mismatch");
  std::mt19937_64 rng(seed);
  std::discrete_distribution<Index> row_draw(rows.weights().begin(),
                                             rows.weights().end());
  std::discrete_distribution<Index> col_draw(cols.weights().begin(),
                                             cols.weights().end());
  SampleSet set;
  set.rows = values.rows();
  set.cols = values.cols();
  set.entries.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    Index i = row_draw(rng);
    Index j = col_draw(rng);
    set.entries.push_back({i, j, values(i, j)});
  }
  return set;
}

Matrix read_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open matrix file: " + path);
  std::vector<std::vector<double>> grid;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) {
      double v = 0.0;
      if (!parse_double(cell, &v))
        throw IoError(path + ":" + std::to_string(line_no) + ": bad numeric cell");
      row.push_back(v);
    }
    if (!grid.empty() && row.size() != grid.front().size())
      throw IoError(path + ":" + std::to_string(line_no) + ": ragged row");
    grid.push_back(std::move(row));
  }
  if (grid.empty()) throw IoError("empty matrix file: " + path);
  Matrix out(static_cast<Index>(grid.size()), static_cast<Index>(grid.front().size()));
  for (Index i = 0; i < out.rows(); ++i)
    for (Index j = 0; j < out.cols(); ++j)
      out(i, j) = grid[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return out;
}

void write_matrix_csv(const std::string& path, const Matrix& values) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write matrix file: " + path);
  for (Index i = 0; i < values.rows(); ++i) {
    for (Index j = 0; j < values.cols(); ++j) {
      if (j > 0) out << ',';
      out << format_value(values(i, j));
    }
    out << '\n';
  }
  if (!out) throw IoError("failed writing matrix file: " + path);
}

void write_split_csv(const std::string& path,
                     const std::array<SampleSet, 3>& splits) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write split file: " + path);
  out << "i,j,value,role\n";
  for (const SampleSet& part : splits)
    for (const Rating& entry : part.entries)
      out << entry.row << ',' << entry.col << ',' << format_value(entry.value) << ','
          << to_string(part.role) << '\n';
  if (!out) throw IoError("failed writing split file: " + path);
}

}  // namespace localmax
