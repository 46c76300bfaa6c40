#pragma once

#include "ssbm/experiment.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace ssbm {

/// Exit statuses of the command-line driver.
enum ExitStatus : int {
  kExitOk = 0,
  kExitConfig = 1,
  kExitPartial = 2,
  kExitNoConvergence = 3,
};

/// One edge list and one JSON sidecar per (cell, replicate) under `out_dir`,
/// named cell<c>_rep<r>.edges / .json.
int cmd_generate(const ExperimentConfig& cfg, const std::filesystem::path& out_dir, std::ostream& log);

struct ClusterOptions {
  std::filesystem::path graph;
  int K = 2;
  Algorithm algorithm = Algorithm::kmeans_spectral;
  ApproxConfig solver;
  EigenConfig eigen;
  std::filesystem::path output;  ///< empty writes to `out`
  std::optional<std::filesystem::path> embedding_csv;
};

/// Eigenvectors, clustering, labels. Throws ConvergenceError on solver failure.
int cmd_cluster(const ClusterOptions& opts, std::ostream& out);

/// ErrorReport JSON for a clustering result against a sidecar or model file.
int cmd_evaluate(const std::filesystem::path& labels, const std::filesystem::path& truth,
                 const std::filesystem::path& output, std::ostream& out);

/// Per-cell summary over results CSV files; refuses files whose rows carry
/// different config hashes.
int cmd_evaluate_results(const std::vector<std::filesystem::path>& results, const std::filesystem::path& output,
                         std::ostream& out);

/// Writes results, bounds and study files; 2 when any replicate failed.
int cmd_experiment(const ExperimentConfig& cfg, std::ostream& log);

struct BoundsOptions {
  std::optional<std::filesystem::path> model;
  std::optional<std::filesystem::path> config;      ///< runs the configured concentration study
  std::optional<std::filesystem::path> reevaluate;  ///< JSON array of reports
  double epsilon = 0.0;
  std::optional<double> C;
  std::optional<double> c;
  std::optional<double> lambda;
  std::filesystem::path output;
};

int cmd_bounds(const BoundsOptions& opts, std::ostream& out);

}  // namespace ssbm
