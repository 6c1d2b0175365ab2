#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "paa/preconditioner.hpp"
#include "paa/problems.hpp"
#include "paa/solver.hpp"

namespace paa {

/// One labelled solver configuration within an experiment.
struct SolverSetup {
  std::string label;
  PreconditionerKind kind = PreconditionerKind::constant(1.0);
  std::size_t m = 0;
  double beta = 1.0;
  std::size_t n_update = 1;
};

struct ExperimentSpec {
  std::string problem;
  ProblemParams params;
  std::vector<SolverSetup> solvers;
  /// Either a box (sampled per run) or a fixed x0; when both are empty the
  /// problem's default_guess() is used.
  std::optional<InitialGuessBox> box;
  std::optional<Vector> x0;
  std::size_t runs = 1;
  std::uint64_t seed = 0;
  double tol = 1e-10;
  std::size_t max_iter = 100;
  double divergence_threshold = 1e10;
  std::size_t threads = 1;
  std::filesystem::path out = "paa-out";

  /// Throws InvalidSpec describing the first problem found.
  void validate() const;
};

struct RunRecord {
  std::string label;
  std::size_t run = 0;
  std::uint64_t seed = 0;
  SolveStatus status = SolveStatus::MaxIterations;
  std::size_t iterations = 0;
  std::size_t jacobian_builds = 0;
  std::size_t n_update = 1;
  bool jacobian_kind = false;
  double wall_time_s = 0.0;
  std::vector<double> residual_norms;
};

/// Runs every (solver, run) pair. Run r uses seed = spec.seed + r for its
/// initial guess, shared by all solvers. Records are ordered by (label, run).
std::vector<RunRecord> run_experiment(const ExperimentSpec& spec);

/// Writes <dir>/history.csv and <dir>/summary.csv. Throws IoError.
void write_csv(const std::vector<RunRecord>& records, const std::filesystem::path& dir);

using HistoryKey = std::pair<std::string, std::size_t>;
/// Parses a history CSV back into residual sequences keyed by (label, run).
std::map<HistoryKey, std::vector<double>> read_history_csv(const std::filesystem::path& path);

struct SummaryRow {
  std::string label;
  std::size_t runs = 0;
  std::size_t converged = 0;
  std::size_t failed = 0;  // runs that did not converge, whatever the reason
  std::optional<double> mean_iterations;
  std::optional<double> mean_jacobian_builds;
  std::optional<double> mean_wall_time_s;
};

/// Per-label means over converged runs, in label order.
std::vector<SummaryRow> summary_rows(const std::vector<RunRecord>& records);
/// Aligned plain-text rendering of summary_rows().
std::string summarize(const std::vector<RunRecord>& records);

/// 17 significant digits; round-trips through strtod.
std::string format_double(double v);

/// Flat "key = value" experiment file. See README for the keys.
ExperimentSpec parse_experiment(const std::string& text);
ExperimentSpec load_experiment(const std::filesystem::path& path);

/// Command-line overrides; every set field wins over the file.
struct SpecOverrides {
  std::optional<std::string> problem;
  ProblemParams params;
  std::optional<std::string> precond;
  std::optional<std::size_t> m;
  std::optional<double> beta;
  std::optional<std::size_t> n_update;
  std::optional<double> tol;
  std::optional<std::size_t> max_iter;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> runs;
  std::optional<std::filesystem::path> out;
};

void apply_overrides(ExperimentSpec& spec, const SpecOverrides& overrides);

}  // namespace paa
