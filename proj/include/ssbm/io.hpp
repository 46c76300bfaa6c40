#pragma once

#include "ssbm/bounds.hpp"
#include "ssbm/cluster.hpp"
#include "ssbm/metrics.hpp"
#include "ssbm/model.hpp"
#include "ssbm/sampler.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

namespace ssbm::io {

using json = nlohmann::json;

/// {"n", "K", "labels" (1-based), "B", "psi"?, "preset"?}. Doubles are
/// written in shortest round-trip form, so reading back is bit-exact.
json to_json(const ModelSpec& spec);
ModelSpec model_from_json(const json& j);

json to_json(const ClusteringResult& result);
/// Labels only; centers and diagnostics are ignored.
MembershipMatrix labels_from_json(const json& j, int K);

json to_json(const ErrorReport& report);
json to_json(const BoundInputs& inputs);
BoundInputs bound_inputs_from_json(const json& j);
json to_json(const BoundReport& report);
BoundReport bound_report_from_json(const json& j);
json to_json(const ConcentrationStudy& study);

/// Header "n m", then one "i j" line per edge (0-based, i < j, sorted).
void write_edge_list(std::ostream& out, const AdjacencyMatrix& A);
AdjacencyMatrix read_edge_list(std::istream& in);

json sidecar(const ModelSpec& spec, SeedSpec seed, std::string_view config_hash);

std::uint64_t fnv1a64(std::string_view bytes);
/// 16 lowercase hex digits.
std::string hex64(std::uint64_t value);
/// Hash of the compact dump of `j` (object keys are sorted by the library).
std::string json_hash(const json& j);
std::string model_hash(const ModelSpec& spec);

json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view contents);
std::string read_text_file(const std::filesystem::path& path);

/// Shortest round-trip text for a double; "nan" / "inf" / "-inf" otherwise.
std::string format_double(double v);

}  // namespace ssbm::io
