// Command-line driver: generate, cluster, evaluate, experiment, bounds.
//
// Exit status: 0 success, 1 configuration error, 2 partial replicate
// failure, 3 eigensolver non-convergence. SSBM_WORKERS overrides the
// OpenMP thread count.

#include "ssbm/commands.hpp"
#include "ssbm/io.hpp"

#include <CLI11.hpp>
#include <omp.h>

#include <cstdlib>
#include <iostream>

namespace {

ssbm::ExperimentConfig load_config(const std::string& path) {
  try {
    return ssbm::ExperimentConfig::from_json(ssbm::io::read_json_file(path));
  } catch (const ssbm::ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ssbm::ConfigError(e.what());
  }
}

void apply_worker_override() {
  const char* env = std::getenv("SSBM_WORKERS");
  if (!env || !*env) return;
  char* end = nullptr;
  const long workers = std::strtol(env, &end, 10);
  if (*end != '\0' || workers < 1) throw ssbm::ConfigError("SSBM_WORKERS must be a positive integer");
  omp_set_num_threads(static_cast<int>(workers));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral clustering for stochastic block models"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  auto* generate = app.add_subcommand("generate", "Sample edge lists for every grid cell and replicate");
  generate->add_option("config", config_path, "Experiment config (JSON)")->required();
  generate->add_option("-o,--out-dir", out_dir, "Output directory (default: config graphs_dir)");

  ssbm::ClusterOptions cluster_opts;
  std::string algorithm = "kmeans-spectral";
  std::string seeding = "weighted";
  auto* cluster = app.add_subcommand("cluster", "Spectral clustering of one edge list");
  cluster->add_option("graph", cluster_opts.graph, "Edge-list file")->required();
  cluster->add_option("-K,--communities", cluster_opts.K, "Number of communities")->required();
  cluster->add_option("-a,--algorithm", algorithm, "kmeans-spectral or spherical-kmedian")
      ->check(CLI::IsMember({"kmeans-spectral", "spherical-kmedian"}));
  cluster->add_option("--restarts", cluster_opts.solver.restarts, "Independent restarts");
  cluster->add_option("--max-iterations", cluster_opts.solver.max_iterations, "Alternation steps per restart");
  cluster->add_option("--swaps", cluster_opts.solver.local_search_swaps, "k-median swap attempts");
  cluster->add_option("--seeding", seeding, "weighted or uniform")->check(CLI::IsMember({"weighted", "uniform"}));
  cluster->add_option("--seed", cluster_opts.solver.seed, "Solver seed");
  cluster->add_option("--eigen-tolerance", cluster_opts.eigen.tolerance, "Relative eigen-residual tolerance");
  cluster->add_option("--dense-max-n", cluster_opts.eigen.dense_max_n, "Largest n for the dense eigensolver");
  cluster->add_option("-o,--output", cluster_opts.output, "Result JSON (default: stdout)");
  std::string embedding_csv;
  cluster->add_option("--embedding-csv", embedding_csv, "Also dump the n x K embedding");

  std::string labels_path, truth_path, eval_output;
  std::vector<std::string> result_files;
  auto* evaluate = app.add_subcommand("evaluate", "Error report for labels, or a summary of results CSVs");
  evaluate->add_option("--labels", labels_path, "Clustering result JSON");
  evaluate->add_option("--truth", truth_path, "Sidecar or model JSON");
  evaluate->add_option("--results", result_files, "Results CSV files to summarize");
  evaluate->add_option("-o,--output", eval_output, "Output file (default: stdout)");

  std::string experiment_path;
  auto* experiment = app.add_subcommand("experiment", "Run a Monte Carlo grid from a config");
  experiment->add_option("config", experiment_path, "Experiment config (JSON)")->required();

  ssbm::BoundsOptions bounds_opts;
  std::string bounds_model, bounds_config, bounds_reeval, bounds_output;
  double C = 0.0, c = 0.0, lambda = 0.0;
  auto* bounds = app.add_subcommand("bounds", "Evaluate bounds for a model, run a concentration study, or re-check reports");
  bounds->add_option("--model", bounds_model, "Model or sidecar JSON");
  bounds->add_option("--config", bounds_config, "Config whose concentration study to run");
  bounds->add_option("--reevaluate", bounds_reeval, "JSON array of bound reports");
  bounds->add_option("--epsilon", bounds_opts.epsilon, "Approximation slack");
  auto* C_opt = bounds->add_option("--C", C, "Concentration constant");
  auto* c_opt = bounds->add_option("--c", c, "Explicit c");
  auto* lambda_opt = bounds->add_option("--lambda", lambda, "Minimum |eigenvalue| of B0");
  bounds->add_option("-o,--output", bounds_output, "Output file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : ssbm::kExitConfig;
  }

  try {
    apply_worker_override();
    if (*generate) {
      const ssbm::ExperimentConfig cfg = load_config(config_path);
      return ssbm::cmd_generate(cfg, out_dir.empty() ? cfg.graphs_dir : out_dir, std::cerr);
    }
    if (*cluster) {
      cluster_opts.algorithm = ssbm::parse_algorithm(algorithm);
      cluster_opts.solver.seeding = seeding == "uniform" ? ssbm::Seeding::uniform : ssbm::Seeding::weighted;
      cluster_opts.solver.validate();
      if (!embedding_csv.empty()) cluster_opts.embedding_csv = embedding_csv;
      return ssbm::cmd_cluster(cluster_opts, std::cout);
    }
    if (*evaluate) {
      if (!result_files.empty()) {
        std::vector<std::filesystem::path> paths(result_files.begin(), result_files.end());
        return ssbm::cmd_evaluate_results(paths, eval_output, std::cout);
      }
      if (labels_path.empty() || truth_path.empty())
        throw ssbm::ConfigError("evaluate: give --labels and --truth, or --results");
      return ssbm::cmd_evaluate(labels_path, truth_path, eval_output, std::cout);
    }
    if (*experiment) return ssbm::cmd_experiment(load_config(experiment_path), std::cerr);
    if (*bounds) {
      if (!bounds_model.empty()) bounds_opts.model = bounds_model;
      if (!bounds_config.empty()) bounds_opts.config = bounds_config;
      if (!bounds_reeval.empty()) bounds_opts.reevaluate = bounds_reeval;
      if (C_opt->count()) bounds_opts.C = C;
      if (c_opt->count()) bounds_opts.c = c;
      if (lambda_opt->count()) bounds_opts.lambda = lambda;
      bounds_opts.output = bounds_output;
      return ssbm::cmd_bounds(bounds_opts, std::cout);
    }
  } catch (const ssbm::ConvergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return ssbm::kExitNoConvergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return ssbm::kExitConfig;
  }
  return ssbm::kExitOk;
}
