#include "ssbm/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace ssbm::io {

namespace {

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double number_or_nan(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return BoundInputs::nan;
  return j.at(key).get<double>();
}

json matrix_json(const Matrix& M) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < M.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < M.cols(); ++c) row.push_back(M(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& j) {
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = rows == 0 ? Eigen::Index{0} : static_cast<Eigen::Index>(j.at(0).size());
  Matrix M(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    if (static_cast<Eigen::Index>(j.at(r).size()) != cols) throw std::invalid_argument("json: ragged matrix");
    for (Eigen::Index c = 0; c < cols; ++c) M(r, c) = j.at(r).at(c).get<double>();
  }
  return M;
}

}  // namespace

json to_json(const ModelSpec& spec) {
  json j;
  j["n"] = spec.n();
  j["K"] = spec.K();
  j["labels"] = spec.membership().labels();
  j["B"] = matrix_json(spec.connectivity().matrix());
  if (spec.degrees()) j["psi"] = spec.degrees()->values();
  if (spec.preset()) {
    const PresetInfo& p = *spec.preset();
    json pj;
    pj["name"] = p.name;
    if (p.lambda) pj["lambda"] = *p.lambda;
    if (p.alpha) pj["alpha"] = *p.alpha;
    if (p.clique_size) pj["clique_size"] = *p.clique_size;
    j["preset"] = std::move(pj);
  }
  return j;
}

ModelSpec model_from_json(const json& j) {
  const int n = j.at("n").get<int>();
  const int K = j.at("K").get<int>();
  const auto labels = j.at("labels").get<std::vector<int>>();
  if (static_cast<int>(labels.size()) != n) throw std::invalid_argument("model json: labels length differs from n");
  MembershipMatrix theta = MembershipMatrix::from_labels(labels, K);
  ConnectivityMatrix B(matrix_from_json(j.at("B")));
  std::optional<DegreeParams> degrees;
  if (j.contains("psi")) degrees = DegreeParams(j.at("psi").get<std::vector<double>>(), theta);
  std::optional<PresetInfo> preset;
  if (j.contains("preset")) {
    const json& pj = j.at("preset");
    PresetInfo p;
    p.name = pj.at("name").get<std::string>();
    if (pj.contains("lambda")) p.lambda = pj.at("lambda").get<double>();
    if (pj.contains("alpha")) p.alpha = pj.at("alpha").get<double>();
    if (pj.contains("clique_size")) p.clique_size = pj.at("clique_size").get<int>();
    preset = std::move(p);
  }
  return ModelSpec(std::move(theta), std::move(B), std::move(degrees), std::move(preset));
}

json to_json(const ClusteringResult& r) {
  json j;
  j["labels"] = r.membership.labels();
  j["centers"] = matrix_json(r.centers);
  j["objective"] = r.objective;
  j["restarts_used"] = r.restarts_used;
  j["best_restart_index"] = r.best_restart_index;
  j["iterations"] = r.iterations;
  j["converged"] = r.converged;
  j["repair_events"] = r.repair_events;
  return j;
}

MembershipMatrix labels_from_json(const json& j, int K) {
  return MembershipMatrix::from_labels(j.at("labels").get<std::vector<int>>(), K, false);
}

json to_json(const ErrorReport& r) {
  // Permutations are written 1-based, like labels.
  const auto one_based = [](const Permutation& J) {
    std::vector<int> out(J.begin(), J.end());
    for (int& v : out) ++v;
    return out;
  };
  json j;
  j["L"] = r.L;
  j["L_tilde"] = r.L_tilde;
  j["J_L"] = one_based(r.J_L);
  j["J_L_tilde"] = one_based(r.J_L_tilde);
  j["per_community_errors"] = r.per_community_errors;
  j["misclustered_nodes"] = r.misclustered_nodes;
  return j;
}

json to_json(const BoundInputs& in) {
  json j;
  j["n"] = in.n;
  j["K"] = in.K;
  j["rank"] = in.rank;
  j["alpha"] = number(in.alpha);
  j["gamma"] = number(in.gamma);
  j["lambda"] = number(in.lambda);
  j["epsilon"] = number(in.epsilon);
  j["n_min"] = in.n_min;
  j["n_max"] = in.n_max;
  j["n_max_second"] = in.n_max_second;
  j["d"] = number(in.d);
  j["sizes"] = in.sizes;
  j["nu"] = in.nu;
  j["n_tilde_min"] = number(in.n_tilde_min);
  j["weighted_heterogeneity"] = number(in.weighted_heterogeneity);
  j["C"] = number(in.C);
  j["c_override"] = number(in.c_override);
  j["observed"] = number(in.observed);
  j["frobenius_distance"] = number(in.frobenius_distance);
  j["deltas"] = in.deltas;
  return j;
}

BoundInputs bound_inputs_from_json(const json& j) {
  BoundInputs in;
  in.n = j.at("n").get<int>();
  in.K = j.at("K").get<int>();
  in.rank = j.at("rank").get<int>();
  in.alpha = number_or_nan(j, "alpha");
  in.gamma = number_or_nan(j, "gamma");
  in.lambda = number_or_nan(j, "lambda");
  in.epsilon = number_or_nan(j, "epsilon");
  in.n_min = j.at("n_min").get<int>();
  in.n_max = j.at("n_max").get<int>();
  in.n_max_second = j.at("n_max_second").get<int>();
  in.d = number_or_nan(j, "d");
  in.sizes = j.at("sizes").get<std::vector<int>>();
  in.nu = j.at("nu").get<std::vector<double>>();
  in.n_tilde_min = number_or_nan(j, "n_tilde_min");
  in.weighted_heterogeneity = number_or_nan(j, "weighted_heterogeneity");
  in.C = number_or_nan(j, "C");
  in.c_override = number_or_nan(j, "c_override");
  in.observed = number_or_nan(j, "observed");
  in.frobenius_distance = number_or_nan(j, "frobenius_distance");
  in.deltas = j.at("deltas").get<std::vector<double>>();
  return in;
}

json to_json(const BoundReport& r) {
  json j;
  j["name"] = r.name;
  j["lhs"] = number(r.lhs);
  j["rhs"] = number(r.rhs);
  j["holds"] = r.holds;
  j["near_boundary"] = r.near_boundary;
  j["c_used"] = number(r.c_used);
  j["inputs"] = to_json(r.inputs);
  return j;
}

BoundReport bound_report_from_json(const json& j) {
  BoundReport r;
  r.name = j.at("name").get<std::string>();
  r.lhs = number_or_nan(j, "lhs");
  r.rhs = number_or_nan(j, "rhs");
  r.holds = j.at("holds").get<bool>();
  r.near_boundary = j.at("near_boundary").get<bool>();
  r.c_used = number_or_nan(j, "c_used");
  r.inputs = bound_inputs_from_json(j.at("inputs"));
  return r;
}

json to_json(const ConcentrationStudy& study) {
  json j;
  j["C_empirical"] = study.C_empirical;
  json cells = json::array();
  for (const CellSummary& s : study.cells) {
    json c;
    c["n"] = s.n;
    c["c0"] = s.c0;
    c["d"] = s.d;
    c["replicates"] = s.replicates;
    c["max_ratio"] = s.max_ratio;
    c["mean_ratio"] = s.mean_ratio;
    c["q50"] = s.q50;
    c["q90"] = s.q90;
    c["q99"] = s.q99;
    c["max_log_ratio"] = s.max_log_ratio;
    c["median_log_ratio"] = s.median_log_ratio;
    c["ratios"] = s.ratios;
    cells.push_back(std::move(c));
  }
  j["cells"] = std::move(cells);
  return j;
}

void write_edge_list(std::ostream& out, const AdjacencyMatrix& A) {
  out << A.n() << ' ' << A.edge_count() << '\n';
  for (const Edge& e : A.edges()) out << e.i << ' ' << e.j << '\n';
}

AdjacencyMatrix read_edge_list(std::istream& in) {
  long long n = -1, m = -1;
  if (!(in >> n >> m) || n < 0 || m < 0) throw std::invalid_argument("edge list: bad header");
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(m));
  for (long long e = 0; e < m; ++e) {
    long long i = -1, j = -1;
    if (!(in >> i >> j)) throw std::invalid_argument("edge list: fewer edges than the header declares");
    if (i < 0 || j >= n || i >= j) throw std::invalid_argument("edge list: edge out of range or not i < j");
    edges.push_back({static_cast<int>(i), static_cast<int>(j)});
  }
  std::string extra;
  if (in >> extra) throw std::invalid_argument("edge list: more edges than the header declares");
  return AdjacencyMatrix(static_cast<int>(n), std::move(edges));
}

json sidecar(const ModelSpec& spec, SeedSpec seed, std::string_view config_hash) {
  json j;
  j["seed"] = {{"master_seed", seed.master_seed}, {"replicate_index", seed.replicate_index}};
  j["model_hash"] = model_hash(spec);
  j["model"] = to_json(spec);
  j["config_hash"] = std::string(config_hash);
  return j;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string s(16, '0');
  for (int k = 15; k >= 0; --k) {
    s[k] = digits[value & 0xf];
    value >>= 4;
  }
  return s;
}

std::string json_hash(const json& j) { return hex64(fnv1a64(j.dump())); }

std::string model_hash(const ModelSpec& spec) { return json_hash(to_json(spec)); }

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return json::parse(in);
}

void write_text_file(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << contents;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace ssbm::io
