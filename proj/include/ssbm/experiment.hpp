#pragma once

#include "ssbm/bounds.hpp"
#include "ssbm/cluster.hpp"
#include "ssbm/eigensolver.hpp"
#include "ssbm/io.hpp"
#include "ssbm/model.hpp"
#include "ssbm/sampler.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ssbm {

/// Raised for invalid configuration files or grid cells (exit status 1).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Algorithm { kmeans_spectral, spherical_kmedian };

std::string to_string(Algorithm a);
Algorithm parse_algorithm(const std::string& name);

/// Degree propensities drawn once per grid cell: raw psi_i ~ U[low, high],
/// then rescaled so each community's maximum is 1.
struct PsiDistribution {
  double low = 0.5;
  double high = 1.0;
  bool operator==(const PsiDistribution&) const = default;
};

/// "balanced" or explicit community fractions that sum to 1.
struct SizeProfile {
  std::string name = "balanced";
  std::vector<double> fractions;
  bool operator==(const SizeProfile&) const = default;
};

/// One point of the parameter grid.
struct ExperimentCell {
  int index = 0;
  std::string preset;
  int n = 0;
  int K = 0;
  double alpha_multiplier = 0.0;  ///< alpha_n = multiplier * log n / n
  double alpha = 0.0;
  double lambda = 0.0;
  SizeProfile sizes;
  int clique_size = 0;
  std::optional<PsiDistribution> psi;
};

struct ExperimentConfig {
  /// planted_partition, planted_clique, or dcbm_planted_partition.
  std::string preset = "planted_partition";
  std::vector<int> n;
  std::vector<int> K{2};
  std::vector<double> alpha_multiplier{10.0};
  std::vector<double> lambda{0.5};
  std::vector<SizeProfile> size_profiles{SizeProfile{}};
  std::vector<int> clique_size;
  std::vector<PsiDistribution> psi{PsiDistribution{}};

  std::optional<Algorithm> algorithm;  ///< defaults from the preset
  ApproxConfig solver{.epsilon = 0.5};
  EigenConfig eigen;
  int replicates = 1;
  std::uint64_t master_seed = 1;

  std::string results_path = "results.csv";
  std::string bounds_path = "bounds.csv";
  std::string study_path = "study.json";
  std::string graphs_dir = "graphs";

  /// "concentration" runs the concentration study first and takes C from it.
  std::vector<std::string> studies;
  std::vector<ConcentrationCell> concentration_cells;
  int concentration_replicates = 100;

  std::optional<double> C;  ///< fixed concentration constant
  std::optional<double> c;  ///< explicit c for every bound

  static ExperimentConfig from_json(const io::json& j);
  /// Canonical form with every default filled in; the hash is taken on it.
  io::json to_json() const;
  std::string hash() const;

  Algorithm resolved_algorithm() const;
  /// Cartesian product of the grid, validated against the preset.
  std::vector<ExperimentCell> cells() const;
};

/// Builds the cell's model. DCBM cells draw psi from the cell's own stream.
ModelSpec build_cell_model(const ExperimentCell& cell, std::uint64_t master_seed);

/// SeedSpec{derive_seed({master_seed, cell}), replicate}.
SeedSpec replicate_seed(std::uint64_t master_seed, int cell_index, int replicate);

struct ReplicateRow {
  int cell = 0;
  int replicate = 0;
  std::uint64_t stream_seed = 0;
  bool ok = false;
  std::string error;
  int exit_class = 0;  ///< 3 for solver non-convergence, else 2 on failure

  double L = BoundInputs::nan;
  double L_tilde = BoundInputs::nan;
  double relative_exceptions = BoundInputs::nan;  ///< sum_k |S_k| / n_k
  double norm_difference = BoundInputs::nan;      ///< ||A - P||
  double norm_ratio = BoundInputs::nan;           ///< ||A - P|| / sqrt(d)
  double procrustes_distance = BoundInputs::nan;
  double dk_lhs = BoundInputs::nan;
  double dk_rhs = BoundInputs::nan;
  bool dk_holds = false;
  double objective = BoundInputs::nan;
  int zero_rows = 0;
  int proof_set_size = 0;  ///< |S| of the spherical proof (kmedian only)
  bool tie_warning = false;
  int eigen_iterations = 0;
  std::size_t edges = 0;

  std::vector<BoundReport> reports;
  /// Inputs for reports that need C; evaluated once C is known.
  std::vector<std::pair<std::string, BoundInputs>> pending;

  double time_sample = 0.0;
  double time_eigen = 0.0;
  double time_cluster = 0.0;
  double time_total = 0.0;
};

struct ExperimentResult {
  std::string config_hash;
  std::vector<ExperimentCell> cells;
  std::vector<ReplicateRow> rows;  ///< ordered by (cell, replicate)
  std::optional<ConcentrationStudy> study;
  double C_used = BoundInputs::nan;
  /// "study", "config", or "replicates" (max ||A - P|| / sqrt(d) of this run).
  std::string C_source;
  int failures = 0;
  bool convergence_failure = false;
};

ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Runs one replicate end to end (phase one: everything except C-dependent
/// bounds). Exposed for tests.
ReplicateRow run_replicate(const ExperimentConfig& cfg, const ExperimentCell& cell, const ModelSpec& spec,
                           const PopulationEigen& pop, int replicate);

/// Fills in the C-dependent reports of `row`.
void finalize_bounds(ReplicateRow& row, double C, std::optional<double> c);

void write_results_csv(std::ostream& out, const ExperimentResult& result);
void write_bounds_csv(std::ostream& out, const ExperimentResult& result);
io::json study_json(const ExperimentResult& result);

/// Per-cell summaries over successful replicates.
struct CellAggregate {
  int cell = 0;
  int replicates = 0;
  double median_L = BoundInputs::nan;
  double mean_L = BoundInputs::nan;
  double median_L_tilde = BoundInputs::nan;
  double max_norm_ratio = BoundInputs::nan;
  /// Fraction of replicates on which each report holds, by name.
  std::map<std::string, double> holds_fraction;
};

std::vector<CellAggregate> aggregate_cells(const ExperimentResult& result);

/// Least-squares slope of log y on log x over pairs with x, y > 0; empty when
/// fewer than two such pairs exist.
std::optional<double> loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace ssbm
