#include "ssbm/experiment.hpp"

#include "ssbm/metrics.hpp"
#include "ssbm/rng.hpp"
#include "ssbm/spectral.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

namespace ssbm {

using io::json;

std::string to_string(Algorithm a) {
  return a == Algorithm::kmeans_spectral ? "kmeans-spectral" : "spherical-kmedian";
}

Algorithm parse_algorithm(const std::string& name) {
  if (name == "kmeans-spectral") return Algorithm::kmeans_spectral;
  if (name == "spherical-kmedian") return Algorithm::spherical_kmedian;
  throw ConfigError("unknown algorithm '" + name + "'");
}

namespace {

const std::set<std::string> kPresets{"planted_partition", "planted_clique", "dcbm_planted_partition"};
const std::set<std::string> kStudies{"concentration"};

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& item : j.items())
    if (!allowed.count(item.key())) throw ConfigError(where + ": unknown key '" + item.key() + "'");
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

SizeProfile parse_profile(const json& j) {
  SizeProfile p;
  if (j.is_string()) {
    p.name = j.get<std::string>();
    if (p.name != "balanced") throw ConfigError("size_profile: unknown profile '" + p.name + "'");
    return p;
  }
  p.name = "fractions";
  p.fractions = j.get<std::vector<double>>();
  double total = 0.0;
  for (double f : p.fractions) {
    if (!(f > 0.0)) throw ConfigError("size_profile: fractions must be positive");
    total += f;
  }
  if (std::abs(total - 1.0) > 1e-9) throw ConfigError("size_profile: fractions must sum to 1");
  return p;
}

json profile_json(const SizeProfile& p) { return p.name == "balanced" ? json(p.name) : json(p.fractions); }

std::vector<int> profile_sizes(const SizeProfile& p, int n, int K) {
  if (p.name == "balanced") return balanced_sizes(n, K);
  if (static_cast<int>(p.fractions.size()) != K) throw ConfigError("size_profile: need K fractions");
  // Largest remainders, ties to the lower index.
  std::vector<int> sizes(K);
  std::vector<std::pair<double, int>> rest;
  int used = 0;
  for (int k = 0; k < K; ++k) {
    const double exact = p.fractions[k] * n;
    sizes[k] = static_cast<int>(std::floor(exact));
    used += sizes[k];
    rest.push_back({-(exact - sizes[k]), k});
  }
  std::sort(rest.begin(), rest.end());
  for (int r = 0; r < n - used; ++r) ++sizes[rest[r].second];
  for (int s : sizes)
    if (s < 1) throw ConfigError("size_profile: a community would be empty");
  return sizes;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  ExperimentConfig c;
  try {
    check_keys(j,
               {"preset", "grid", "algorithm", "solver", "eigen", "replicates", "master_seed", "output", "studies",
                "concentration", "constants"},
               "config");
    c.preset = get_or<std::string>(j, "preset", c.preset);
    if (!kPresets.count(c.preset)) throw ConfigError("unknown preset '" + c.preset + "'");
    if (c.preset == "planted_clique") c.K = {2};

    if (j.contains("grid")) {
      const json& g = j.at("grid");
      check_keys(g, {"n", "K", "alpha_multiplier", "lambda", "size_profile", "clique_size", "psi"}, "grid");
      c.n = get_or(g, "n", c.n);
      c.K = get_or(g, "K", c.K);
      c.alpha_multiplier = get_or(g, "alpha_multiplier", c.alpha_multiplier);
      c.lambda = get_or(g, "lambda", c.lambda);
      c.clique_size = get_or(g, "clique_size", c.clique_size);
      if (g.contains("size_profile")) {
        c.size_profiles.clear();
        for (const json& p : g.at("size_profile")) c.size_profiles.push_back(parse_profile(p));
      }
      if (g.contains("psi")) {
        c.psi.clear();
        for (const json& p : g.at("psi")) {
          check_keys(p, {"low", "high"}, "grid.psi");
          PsiDistribution d{get_or(p, "low", 0.5), get_or(p, "high", 1.0)};
          if (!(d.low > 0.0) || d.high < d.low) throw ConfigError("grid.psi: need 0 < low <= high");
          c.psi.push_back(d);
        }
      }
    }
    if (j.contains("algorithm")) c.algorithm = parse_algorithm(j.at("algorithm").get<std::string>());

    if (j.contains("solver")) {
      const json& s = j.at("solver");
      check_keys(s, {"epsilon", "restarts", "max_iterations", "seeding", "local_search_swaps", "seed"}, "solver");
      c.solver.epsilon = get_or(s, "epsilon", c.solver.epsilon);
      c.solver.restarts = get_or(s, "restarts", c.solver.restarts);
      c.solver.max_iterations = get_or(s, "max_iterations", c.solver.max_iterations);
      c.solver.local_search_swaps = get_or(s, "local_search_swaps", c.solver.local_search_swaps);
      c.solver.seed = get_or(s, "seed", c.solver.seed);
      const std::string seeding = get_or<std::string>(s, "seeding", "weighted");
      if (seeding == "weighted")
        c.solver.seeding = Seeding::weighted;
      else if (seeding == "uniform")
        c.solver.seeding = Seeding::uniform;
      else
        throw ConfigError("solver.seeding: expected 'weighted' or 'uniform'");
    }
    if (!(c.solver.epsilon >= 0.0)) throw ConfigError("solver.epsilon must be >= 0");
    c.solver.validate();

    if (j.contains("eigen")) {
      const json& e = j.at("eigen");
      check_keys(e, {"tolerance", "max_iterations", "max_basis", "block_size", "dense_max_n", "method", "seed"}, "eigen");
      c.eigen.tolerance = get_or(e, "tolerance", c.eigen.tolerance);
      c.eigen.max_iterations = get_or(e, "max_iterations", c.eigen.max_iterations);
      c.eigen.max_basis = get_or(e, "max_basis", c.eigen.max_basis);
      c.eigen.block_size = get_or(e, "block_size", c.eigen.block_size);
      c.eigen.dense_max_n = get_or(e, "dense_max_n", c.eigen.dense_max_n);
      c.eigen.seed = get_or(e, "seed", c.eigen.seed);
      const std::string method = get_or<std::string>(e, "method", "automatic");
      if (method == "automatic")
        c.eigen.method = EigenMethod::automatic;
      else if (method == "dense")
        c.eigen.method = EigenMethod::dense;
      else if (method == "iterative")
        c.eigen.method = EigenMethod::iterative;
      else
        throw ConfigError("eigen.method: expected automatic, dense or iterative");
    }

    c.replicates = get_or(j, "replicates", c.replicates);
    if (c.replicates < 1) throw ConfigError("replicates must be >= 1");
    c.master_seed = get_or(j, "master_seed", c.master_seed);

    if (j.contains("output")) {
      const json& o = j.at("output");
      check_keys(o, {"results", "bounds", "study", "graphs_dir"}, "output");
      c.results_path = get_or(o, "results", c.results_path);
      c.bounds_path = get_or(o, "bounds", c.bounds_path);
      c.study_path = get_or(o, "study", c.study_path);
      c.graphs_dir = get_or(o, "graphs_dir", c.graphs_dir);
    }

    c.studies = get_or(j, "studies", c.studies);
    for (const std::string& s : c.studies)
      if (!kStudies.count(s)) throw ConfigError("unknown study '" + s + "'");

    if (j.contains("concentration")) {
      const json& s = j.at("concentration");
      check_keys(s, {"cells", "replicates"}, "concentration");
      c.concentration_replicates = get_or(s, "replicates", c.concentration_replicates);
      if (c.concentration_replicates < 1) throw ConfigError("concentration.replicates must be >= 1");
      if (s.contains("cells"))
        for (const json& cell : s.at("cells")) {
          check_keys(cell, {"n", "c0", "d"}, "concentration.cells");
          ConcentrationCell cc;
          cc.n = cell.at("n").get<int>();
          cc.c0 = get_or(cell, "c0", 1.0);
          if (cell.contains("d")) cc.d = cell.at("d").get<double>();
          c.concentration_cells.push_back(cc);
        }
    }
    if (std::find(c.studies.begin(), c.studies.end(), "concentration") != c.studies.end() &&
        c.concentration_cells.empty())
      throw ConfigError("concentration study requested without cells");

    if (j.contains("constants")) {
      const json& k = j.at("constants");
      check_keys(k, {"C", "c"}, "constants");
      if (k.contains("C") && !k.at("C").is_null()) c.C = k.at("C").get<double>();
      if (k.contains("c") && !k.at("c").is_null()) c.c = k.at("c").get<double>();
      if (c.C && !(*c.C > 0.0)) throw ConfigError("constants.C must be positive");
      if (c.c && !(*c.c > 0.0)) throw ConfigError("constants.c must be positive");
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return c;
}

json ExperimentConfig::to_json() const {
  json j;
  j["preset"] = preset;
  json g;
  g["n"] = n;
  g["K"] = K;
  g["alpha_multiplier"] = alpha_multiplier;
  g["lambda"] = lambda;
  g["clique_size"] = clique_size;
  json profiles = json::array();
  for (const SizeProfile& p : size_profiles) profiles.push_back(profile_json(p));
  g["size_profile"] = profiles;
  json psis = json::array();
  for (const PsiDistribution& p : psi) psis.push_back({{"low", p.low}, {"high", p.high}});
  g["psi"] = psis;
  j["grid"] = g;
  j["algorithm"] = to_string(resolved_algorithm());
  j["solver"] = {{"epsilon", solver.epsilon},
                 {"restarts", solver.restarts},
                 {"max_iterations", solver.max_iterations},
                 {"seeding", solver.seeding == Seeding::weighted ? "weighted" : "uniform"},
                 {"local_search_swaps", solver.local_search_swaps},
                 {"seed", solver.seed}};
  const char* method = eigen.method == EigenMethod::automatic ? "automatic"
                       : eigen.method == EigenMethod::dense   ? "dense"
                                                              : "iterative";
  j["eigen"] = {{"tolerance", eigen.tolerance}, {"max_iterations", eigen.max_iterations},
                {"max_basis", eigen.max_basis}, {"block_size", eigen.block_size},
                {"dense_max_n", eigen.dense_max_n}, {"method", method},
                {"seed", eigen.seed}};
  j["replicates"] = replicates;
  j["master_seed"] = master_seed;
  j["output"] = {{"results", results_path}, {"bounds", bounds_path}, {"study", study_path}, {"graphs_dir", graphs_dir}};
  j["studies"] = studies;
  json cc = json::array();
  for (const ConcentrationCell& cell : concentration_cells) {
    json x{{"n", cell.n}, {"c0", cell.c0}};
    if (cell.d) x["d"] = *cell.d;
    cc.push_back(x);
  }
  j["concentration"] = {{"cells", cc}, {"replicates", concentration_replicates}};
  j["constants"] = {{"C", C ? json(*C) : json(nullptr)}, {"c", c ? json(*c) : json(nullptr)}};
  return j;
}

std::string ExperimentConfig::hash() const {
  // Output locations do not change results, so they stay out of the hash.
  json j = to_json();
  j.erase("output");
  return io::json_hash(j);
}

Algorithm ExperimentConfig::resolved_algorithm() const {
  if (algorithm) return *algorithm;
  return preset == "dcbm_planted_partition" ? Algorithm::spherical_kmedian : Algorithm::kmeans_spectral;
}

std::vector<ExperimentCell> ExperimentConfig::cells() const {
  std::vector<ExperimentCell> out;
  const auto push = [&](ExperimentCell cell) {
    cell.index = static_cast<int>(out.size());
    try {
      (void)build_cell_model(cell, master_seed);
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError("grid cell " + std::to_string(cell.index) + ": " + e.what());
    }
    out.push_back(std::move(cell));
  };

  if (preset == "planted_clique") {
    for (int nn : n)
      for (int q : clique_size) {
        ExperimentCell cell;
        cell.preset = preset;
        cell.n = nn;
        cell.K = 2;
        cell.alpha = 1.0;
        cell.lambda = (3.0 - std::sqrt(5.0)) / 4.0;
        cell.clique_size = q;
        push(cell);
      }
    return out;
  }

  const bool dcbm = preset == "dcbm_planted_partition";
  const std::vector<std::optional<PsiDistribution>> psis = [&] {
    std::vector<std::optional<PsiDistribution>> v;
    if (dcbm)
      v.assign(psi.begin(), psi.end());
    else
      v.push_back(std::nullopt);
    return v;
  }();
  for (int nn : n)
    for (int kk : K)
      for (double mult : alpha_multiplier)
        for (double lam : lambda)
          for (const SizeProfile& prof : size_profiles)
            for (const auto& ps : psis) {
              ExperimentCell cell;
              cell.preset = preset;
              cell.n = nn;
              cell.K = kk;
              cell.alpha_multiplier = mult;
              cell.alpha = nn > 1 ? mult * std::log(static_cast<double>(nn)) / nn : 0.0;
              cell.lambda = lam;
              cell.sizes = prof;
              cell.psi = ps;
              push(cell);
            }
  return out;
}

ModelSpec build_cell_model(const ExperimentCell& cell, std::uint64_t master_seed) {
  if (cell.preset == "planted_clique") return preset_planted_clique(cell.n, cell.clique_size);
  if (cell.K < 1 || cell.n < cell.K) throw ConfigError("cell needs 1 <= K <= n");
  const std::vector<int> sizes = profile_sizes(cell.sizes, cell.n, cell.K);
  ModelSpec spec = preset_planted_partition(cell.n, cell.K, cell.alpha, cell.lambda, sizes);
  if (!cell.psi) return spec;
  Engine rng = make_engine({master_seed, static_cast<std::uint64_t>(cell.index), 0x707369ULL});
  std::vector<double> raw(cell.n);
  for (double& v : raw) v = cell.psi->low + (cell.psi->high - cell.psi->low) * draw_unit(rng);
  return with_degrees(spec, DegreeParams::normalized(std::move(raw), spec.membership()));
}

SeedSpec replicate_seed(std::uint64_t master_seed, int cell_index, int replicate) {
  return SeedSpec{derive_seed({master_seed, static_cast<std::uint64_t>(cell_index)}),
                  static_cast<std::uint64_t>(replicate)};
}

ReplicateRow run_replicate(const ExperimentConfig& cfg, const ExperimentCell& cell, const ModelSpec& spec,
                           const PopulationEigen& pop, int replicate) {
  using clock = std::chrono::steady_clock;
  const auto t_start = clock::now();
  ReplicateRow row;
  row.cell = cell.index;
  row.replicate = replicate;
  const SeedSpec seed = replicate_seed(cfg.master_seed, cell.index, replicate);
  row.stream_seed = seed.master_seed;
  const MembershipMatrix& truth = spec.membership();
  const int K = spec.K();
  const Algorithm algorithm = cfg.resolved_algorithm();
  try {
    auto t0 = clock::now();
    const AdjacencyMatrix A = sample_adjacency(spec, seed);
    row.edges = A.edge_count();
    row.time_sample = seconds_since(t0);

    t0 = clock::now();
    const SpectralEmbedding emb = leading_eigenvectors(A, K, cfg.eigen);
    row.tie_warning = emb.tie_warning;
    row.eigen_iterations = emb.iterations;
    row.norm_difference = spectral_norm_difference(A, pop, cfg.eigen);
    row.norm_ratio = row.norm_difference / std::sqrt(spec.d());
    const DavisKahanCheck dk = davis_kahan_gap_bound(emb.vectors, pop.U, pop.gamma, row.norm_difference);
    row.procrustes_distance = dk.lhs;
    row.dk_lhs = dk.lhs;
    row.dk_rhs = dk.rhs;
    row.dk_holds = dk.holds;
    row.time_eigen = seconds_since(t0);

    ApproxConfig solver = cfg.solver;
    solver.seed = derive_seed({cfg.solver.seed, static_cast<std::uint64_t>(cell.index),
                               static_cast<std::uint64_t>(replicate)});
    t0 = clock::now();
    std::optional<SphericalResult> spherical;
    ClusteringResult result;
    if (algorithm == Algorithm::kmeans_spectral) {
      result = kmeans_approx(emb.vectors, K, solver);
    } else {
      spherical = spherical_kmedian(emb.vectors, K, solver);
      result = spherical->clustering;
      row.zero_rows = static_cast<int>(spherical->zero_rows.size());
    }
    row.objective = result.objective;
    row.time_cluster = seconds_since(t0);

    const ErrorReport err = error_report(result.membership, truth);
    row.L = err.L;
    row.L_tilde = err.L_tilde;

    BoundInputs base = model_bound_inputs(spec, pop, cfg.solver.epsilon, BoundInputs::nan);
    if (cfg.c) base.c_override = *cfg.c;
    const bool has_lambda = std::isfinite(base.lambda);
    const auto pend = [&](const char* name, double observed) {
      BoundInputs in = base;
      in.observed = observed;
      row.pending.emplace_back(name, std::move(in));
    };

    if (algorithm == Algorithm::kmeans_spectral) {
      if (!spec.degree_corrected()) {
        const HammingCheck hc = lemma_hamming_check(emb.vectors, pop.U, result, truth, cfg.solver.epsilon, false);
        row.relative_exceptions = hc.sets.relative_count;
        row.reports.push_back(hc.inequality);
        row.reports.push_back(hc.recovery);
      }
      pend("sbm_condition", BoundInputs::nan);
      pend("sbm_bound", row.relative_exceptions);
      if (has_lambda) {
        pend("sbm_corollary_condition", BoundInputs::nan);
        pend("sbm_corollary_L_tilde", row.L_tilde);
        pend("sbm_corollary_L", row.L);
      }
    } else {
      const HeterogeneityStats stats = heterogeneity_stats(spec);
      row.reports.push_back(lemma_zero_rows_check(emb.vectors, pop.U, truth, stats));
      BoundInputs probe = base;
      probe.C = 1.0;  // the set itself does not depend on C
      const DcbmProofSets sets = dcbm_proof_sets(*spherical, pop.U * dk.alignment.Q, probe);
      row.proof_set_size = static_cast<int>(sets.S.size());
      pend("dcbm_exception_count", static_cast<double>(sets.S.size() + sets.I0.size()));
      pend("dcbm_condition", BoundInputs::nan);
      pend("dcbm_bound", row.L);
      if (has_lambda) {
        pend("dcbm_corollary_condition", BoundInputs::nan);
        pend("dcbm_corollary_bound", row.L);
        BoundInputs in = base;
        in.observed = row.L;
        row.reports.push_back(evaluate_bound("dcbm_rate_reference", in));
      }
    }
    row.ok = true;
  } catch (const ConvergenceError& e) {
    row.error = e.what();
    row.exit_class = 3;
  } catch (const std::exception& e) {
    row.error = e.what();
    row.exit_class = 2;
  }
  row.time_total = seconds_since(t_start);
  return row;
}

void finalize_bounds(ReplicateRow& row, double C, std::optional<double> c) {
  for (auto& [name, inputs] : row.pending) {
    inputs.C = C;
    if (c) inputs.c_override = *c;
    row.reports.push_back(evaluate_bound(name, inputs));
  }
  row.pending.clear();
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  ExperimentResult result;
  result.cells = cfg.cells();
  result.config_hash = cfg.hash();

  if (std::find(cfg.studies.begin(), cfg.studies.end(), "concentration") != cfg.studies.end()) {
    result.study = spectral_concentration_study(cfg.concentration_cells, cfg.concentration_replicates,
                                                derive_seed({cfg.master_seed, 0x636f6e63ULL}), cfg.eigen);
    result.C_used = result.study->C_empirical;
    result.C_source = "study";
  } else if (cfg.C) {
    result.C_used = *cfg.C;
    result.C_source = "config";
  }

  std::vector<ModelSpec> specs;
  std::vector<PopulationEigen> pops;
  for (const ExperimentCell& cell : result.cells) {
    specs.push_back(build_cell_model(cell, cfg.master_seed));
    pops.push_back(population_eigen(specs.back()));
  }

  const int reps = cfg.replicates;
  const int tasks = static_cast<int>(result.cells.size()) * reps;
  result.rows.resize(tasks);
#pragma omp parallel for schedule(dynamic)
  for (int t = 0; t < tasks; ++t) {
    const int c = t / reps;
    result.rows[t] = run_replicate(cfg, result.cells[c], specs[c], pops[c], t % reps);
  }

  if (result.C_source.empty()) {
    double C = 0.0;
    for (const ReplicateRow& row : result.rows)
      if (row.ok) C = std::max(C, row.norm_ratio);
    if (C > 0.0) {
      result.C_used = C;
      result.C_source = "replicates";
    }
  }
  for (ReplicateRow& row : result.rows) {
    if (row.ok && std::isfinite(result.C_used)) {
      try {
        finalize_bounds(row, result.C_used, cfg.c);
      } catch (const std::exception& e) {
        row.ok = false;
        row.error = e.what();
        row.exit_class = 2;
      }
    }
    if (!row.ok) {
      ++result.failures;
      if (row.exit_class == 3) result.convergence_failure = true;
    }
  }
  return result;
}

namespace {

const std::vector<std::string> kReportColumns{
    "sbm_condition",          "sbm_bound",            "sbm_corollary_condition", "sbm_corollary_L_tilde",
    "sbm_corollary_L",        "lemma_hamming",        "lemma_hamming_recovery",  "dcbm_condition",
    "dcbm_bound",             "dcbm_corollary_condition", "dcbm_corollary_bound", "dcbm_rate_reference",
    "lemma_zero_rows",        "dcbm_exception_count"};

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::string num(double v) { return std::isfinite(v) ? io::format_double(v) : std::string(); }

std::string profile_text(const SizeProfile& p) {
  if (p.name == "balanced") return p.name;
  std::string s;
  for (std::size_t k = 0; k < p.fractions.size(); ++k) s += (k ? ";" : "") + io::format_double(p.fractions[k]);
  return s;
}

}  // namespace

void write_results_csv(std::ostream& out, const ExperimentResult& result) {
  out << "config_hash,cell,replicate,preset,n,K,alpha_multiplier,alpha,lambda,clique_size,size_profile,"
         "stream_seed,status,error,L,L_tilde,sum_S_over_n,norm_A_minus_P,norm_over_sqrt_d,procrustes_distance,"
         "dk_lhs,dk_rhs,dk_holds,objective,zero_rows,proof_set_size,tie_warning,eigen_iterations,edges,C_used,"
         "C_source";
  for (const std::string& name : kReportColumns) out << ',' << name << "_lhs," << name << "_rhs," << name << "_holds";
  out << ",mcsherry_reference,time_sample_s,time_eigen_s,time_cluster_s,time_total_s\n";

  for (const ReplicateRow& row : result.rows) {
    const ExperimentCell& cell = result.cells[row.cell];
    BoundInputs ref;
    ref.n = cell.n;
    ref.alpha = cell.alpha;
    ref.lambda = cell.lambda;
    out << result.config_hash << ',' << row.cell << ',' << row.replicate << ',' << cell.preset << ',' << cell.n
        << ',' << cell.K << ',' << num(cell.alpha_multiplier) << ',' << num(cell.alpha) << ',' << num(cell.lambda)
        << ',' << cell.clique_size << ',' << csv_field(profile_text(cell.sizes)) << ',' << row.stream_seed << ','
        << (row.ok ? "ok" : "error") << ',' << csv_field(row.error) << ',' << num(row.L) << ',' << num(row.L_tilde)
        << ',' << num(row.relative_exceptions) << ',' << num(row.norm_difference) << ',' << num(row.norm_ratio)
        << ',' << num(row.procrustes_distance) << ',' << num(row.dk_lhs) << ',' << num(row.dk_rhs) << ','
        << (row.ok ? (row.dk_holds ? "1" : "0") : "") << ',' << num(row.objective) << ',' << row.zero_rows << ','
        << row.proof_set_size << ',' << (row.tie_warning ? 1 : 0) << ',' << row.eigen_iterations << ','
        << row.edges << ',' << num(result.C_used) << ',' << result.C_source;
    for (const std::string& name : kReportColumns) {
      const auto it = std::find_if(row.reports.begin(), row.reports.end(),
                                   [&](const BoundReport& r) { return r.name == name; });
      if (it == row.reports.end())
        out << ",,,";
      else
        out << ',' << num(it->lhs) << ',' << num(it->rhs) << ',' << (it->holds ? 1 : 0);
    }
    out << ',' << num(mcsherry_reference(ref)) << ',' << num(row.time_sample) << ',' << num(row.time_eigen) << ','
        << num(row.time_cluster) << ',' << num(row.time_total) << '\n';
  }
}

void write_bounds_csv(std::ostream& out, const ExperimentResult& result) {
  out << "config_hash,cell,replicate,name,lhs,rhs,holds,near_boundary,c_used,C,epsilon\n";
  for (const ReplicateRow& row : result.rows)
    for (const BoundReport& r : row.reports)
      out << result.config_hash << ',' << row.cell << ',' << row.replicate << ',' << r.name << ',' << num(r.lhs)
          << ',' << num(r.rhs) << ',' << (r.holds ? 1 : 0) << ',' << (r.near_boundary ? 1 : 0) << ','
          << num(r.c_used) << ',' << num(r.inputs.C) << ',' << num(r.inputs.epsilon) << '\n';
}

json study_json(const ExperimentResult& result) {
  json j;
  if (result.study) {
    j = io::to_json(*result.study);
  } else {
    j["C_empirical"] = nullptr;
    j["cells"] = json::array();
  }
  j["C_used"] = std::isfinite(result.C_used) ? json(result.C_used) : json(nullptr);
  j["C_source"] = result.C_source;
  j["config_hash"] = result.config_hash;
  return j;
}

std::vector<CellAggregate> aggregate_cells(const ExperimentResult& result) {
  std::vector<CellAggregate> out(result.cells.size());
  std::vector<std::vector<double>> Ls(out.size()), Lts(out.size());
  std::vector<std::map<std::string, std::pair<int, int>>> counts(out.size());
  for (std::size_t c = 0; c < out.size(); ++c) out[c].cell = static_cast<int>(c);
  for (const ReplicateRow& row : result.rows) {
    if (!row.ok) continue;
    CellAggregate& a = out[row.cell];
    ++a.replicates;
    Ls[row.cell].push_back(row.L);
    Lts[row.cell].push_back(row.L_tilde);
    a.max_norm_ratio = std::isfinite(a.max_norm_ratio) ? std::max(a.max_norm_ratio, row.norm_ratio) : row.norm_ratio;
    for (const BoundReport& r : row.reports) {
      auto& [held, total] = counts[row.cell][r.name];
      held += r.holds;
      ++total;
    }
  }
  for (std::size_t c = 0; c < out.size(); ++c) {
    if (Ls[c].empty()) continue;
    out[c].median_L = quantile(Ls[c], 0.5);
    out[c].mean_L = std::accumulate(Ls[c].begin(), Ls[c].end(), 0.0) / Ls[c].size();
    out[c].median_L_tilde = quantile(Lts[c], 0.5);
    for (const auto& [name, hc] : counts[c]) out[c].holds_fraction[name] = static_cast<double>(hc.first) / hc.second;
  }
  return out;
}

std::optional<double> loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < std::min(x.size(), y.size()); ++i)
    if (x[i] > 0.0 && y[i] > 0.0) {
      lx.push_back(std::log(x[i]));
      ly.push_back(std::log(y[i]));
    }
  if (lx.size() < 2) return std::nullopt;
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / lx.size();
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / ly.size();
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  if (sxx == 0.0) return std::nullopt;
  return sxy / sxx;
}

}  // namespace ssbm
