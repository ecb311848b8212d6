#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "trigroup/collapse.hpp"

namespace trigroup {

enum class Model { uniform, binomial, two_stage };
std::string_view to_string(Model m);
/// Accepts "uniform", "binomial", "two-stage".
Model parse_model(std::string_view s);

/// t = round(C n^{3/2}) for the uniform model (capped at N); otherwise
/// p = C n^{-3/2} (capped at 1).
double model_parameter(Model model, std::uint32_t n, double c);

struct TrialConfig {
  Model model = Model::uniform;
  std::uint32_t n = 0;
  double c = 0.0;
  std::uint64_t max_steps = 100'000'000;
};

struct TrialRecord {
  Model model = Model::uniform;
  std::uint32_t n = 0;
  double c = 0.0;
  double t_or_p = 0.0;
  std::uint64_t trial = 0;
  std::uint64_t seed = 0;
  std::uint64_t relations = 0;
  VerdictKind verdict = VerdictKind::unknown;
  bool capped = false;
  bool witness_success = false;
  WitnessFailure witness_failure = WitnessFailure::none;
  double largest_fraction = 0.0;  // largest component of the derived graph / its vertex count
  double wall_seconds = 0.0;

  /// Equality ignoring wall time.
  bool same_outcome(const TrialRecord& o) const;
};

/// Samples per the model, runs the verdict, and for the two-stage model
/// the witness pipeline. A saturation cap shows up as an Unknown verdict
/// with `capped` set.
TrialRecord run_trial(const TrialConfig& config, std::uint64_t seed, std::uint64_t trial = 0);

struct SweepGrid {
  std::vector<std::uint32_t> n_values;
  std::vector<double> c_values;
  std::uint64_t trials = 1;
  Model model = Model::uniform;
  std::uint64_t master_seed = 0;
  unsigned jobs = 1;
  std::uint64_t max_steps = 100'000'000;
};

std::uint64_t trial_seed(std::uint64_t master, std::uint32_t n, double c, std::uint64_t index);

struct SweepRow {
  Model model = Model::uniform;
  std::uint32_t n = 0;
  double c = 0.0;
  double t_or_p = 0.0;
  std::uint64_t trials = 0;
  std::uint64_t trivial_detected = 0;
  std::uint64_t nontrivial_detected = 0;
  std::uint64_t unknown = 0;
  std::uint64_t witness_success = 0;
  double mean_largest_fraction = 0.0;
  std::uint64_t master_seed = 0;
  std::uint64_t capped = 0;

  friend bool operator==(const SweepRow&, const SweepRow&) = default;
};

struct SweepResult {
  std::vector<SweepRow> rows;        // ascending n, then C
  std::vector<TrialRecord> records;  // ascending n, then C, then trial index
};

/// Runs every (n, C, trial) cell on up to `jobs` threads and folds in
/// trial-index order, so the result does not depend on `jobs`.
SweepResult sweep(const SweepGrid& grid);

struct GiantRow {
  std::uint64_t trial = 0;
  std::uint64_t seed = 0;
  std::uint32_t largest = 0;
  double fraction = 0.0;
};

struct GiantTable {
  std::uint32_t n = 0;
  double alpha = 0.0;
  double beta = 0.0;
  std::uint64_t m = 0;
  double rho = 0.0;
  double predicted = 0.0;
  std::vector<GiantRow> rows;

  double mean_fraction() const;
};

/// m = ceil(n^alpha), rho = sqrt(beta / (n m)).
GiantTable giant_experiment(std::uint32_t n, double alpha, double beta, std::uint64_t trials,
                            std::uint64_t master_seed, unsigned jobs = 1);

// ---------------------------------------------------------------------------
// Output

enum class Format { csv, json };
/// json for a ".json" extension, csv otherwise.
Format format_for(const std::filesystem::path& path);

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr const char* kSweepColumns =
    "model,n,C,t_or_p,trials,trivial_detected,nontrivial_detected,unknown,witness_success,"
    "mean_largest_fraction,master_seed";

std::string to_csv(const std::vector<SweepRow>& rows);
std::string to_csv(const std::vector<TrialRecord>& records);
std::string to_csv(const GiantTable& table);
std::string to_json(const std::vector<SweepRow>& rows);
std::string to_json(const std::vector<TrialRecord>& records);
std::string to_json(const GiantTable& table);
std::vector<SweepRow> sweep_rows_from_json(const std::string& text);

/// Writes `text` to `path`; throws IoError naming the path on failure.
void write_text(const std::filesystem::path& path, const std::string& text);

template <class Table>
void emit(const Table& table, Format format, const std::filesystem::path& path) {
  write_text(path, format == Format::json ? to_json(table) : to_csv(table));
}

}  // namespace trigroup
