#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "localmax/weights.hpp"

namespace localmax {

/// File or parse problem; the CLI maps this to the input-error exit code.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class SplitRole { train, validation, test };

const char* to_string(SplitRole role);

struct Rating {
  Index row = 0;
  Index col = 0;
  double value = 0.0;
};

struct SampleSet {
  Index rows = 0;
  Index cols = 0;
  SplitRole role = SplitRole::train;
  std::vector<Rating> entries;

  std::size_t size() const { return entries.size(); }
};

/// Throws when any entry lies outside the declared shape.
void validate(const SampleSet& samples);
bool has_duplicates(const SampleSet& samples);

struct SimulationSpec {
  Index n = 30;
  Index rank = 2;
  double noise = 0.3;
  std::uint64_t seed = 0;
};

struct SimulatedData {
  Matrix U;       // signal row factors, unit-norm rows
  Matrix V;       // signal column factors, unit-norm rows
  Matrix values;  // U * V^T plus gaussian noise
  SampleSet train;
  SampleSet validation;
  SampleSet test;
};

/// Ground-truth low-rank signal with unit-sphere factor rows plus gaussian
/// noise, observed on a uniform random split: 3 * rank * n cells for
/// training, as many for validation, the rest for testing.
SimulatedData simulate(const SimulationSpec& spec);

struct Marginals {
  MarginalDist rows;
  MarginalDist cols;
};

/// Row and column observation frequencies of a sample set.  Rows or columns
/// with no observations get weight zero.
Marginals empirical_marginals(const SampleSet& samples);

enum class RatingsFormat { tab, double_colon, comma };

RatingsFormat parse_ratings_format(const std::string& name);

/// Maps external string ids to dense indices in first-seen order.
struct IdIndex {
  std::vector<std::string> names;
  std::unordered_map<std::string, Index> lookup;

  Index intern(const std::string& name);
};

struct RatingsFile {
  SampleSet samples;
  IdIndex row_ids;
  IdIndex col_ids;
  std::vector<std::string> diagnostics;  // one line per skipped input line
};

/// Parses "user<sep>item<sep>rating[<sep>extra...]" lines where sep is a tab,
/// "::", or a comma.  Malformed lines are skipped and reported in the
/// diagnostics; a file with no valid lines is an error.
RatingsFile load_ratings(const std::string& path, RatingsFormat format);

/// Same parser, accumulating into shared id maps so several files (train,
/// validation, test splits) index one common matrix.
SampleSet load_ratings_into(IdIndex& row_ids, IdIndex& col_ids,
                            std::vector<std::string>& diagnostics,
                            const std::string& path, RatingsFormat format);

/// Disjoint uniform split without replacement into train/validation/test of
/// the given sizes (sizes must not exceed the sample count; any remainder is
/// dropped).
std::array<SampleSet, 3> split_ratings(const SampleSet& samples,
                                       const std::array<std::size_t, 3>& sizes,
                                       std::uint64_t seed);

/// Locations sampled i.i.d. (with replacement) from the product of the given
/// marginals, with values read off the matrix.
SampleSet sample_iid(const Matrix& values, std::size_t count,
                     const MarginalDist& rows, const MarginalDist& cols,
                     std::uint64_t seed);

/// Dense comma-separated matrix, no header row.
Matrix read_matrix_csv(const std::string& path);
void write_matrix_csv(const std::string& path, const Matrix& values);

/// Sampled-entry file with header "i,j,value,role".
void write_split_csv(const std::string& path,
                     const std::array<SampleSet, 3>& splits);

}  // namespace localmax
