#pragma once

#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "phaseest/estimation.hpp"
#include "phaseest/measurement.hpp"
#include "phaseest/states.hpp"

namespace phaseest {

using Json = nlohmann::json;

/// Shortest round-trip decimal form, locale-independent.
std::string format_double(double x);

std::string model_kind_name(ModelKind kind);
ModelKind model_kind_from_name(const std::string& name);

// States: {"d": int, "re": [...], "im": [...]}; bipartite entries are the
// coefficient matrix row-major.
Json to_json(const PureState& s);
Json to_json(const BipartiteState& s);
PureState pure_state_from_json(const Json& j);
BipartiteState bipartite_state_from_json(const Json& j);
std::variant<PureState, BipartiteState> state_from_json(const Json& j);

// Information matrices: {"p": int, "entries": [row-major]}.
Json info_matrix_to_json(const RealMat& h);

// POVMs: {"dim": int, "elements": [{"label": str, "re": [...], "im": [...]}]}.
Json to_json(const Povm& p);
Povm povm_from_json(const Json& j);

/// Parse a simulation config; a scalar "N" yields one entry, an array one
/// entry per value. Throws std::invalid_argument with the offending field.
std::vector<ExperimentConfig> configs_from_json(const Json& j);

Json result_to_json(const ExperimentConfig& cfg, const ExperimentResult& r);

/// Versioned CSV: comment line, header, then one row per result.
std::string result_csv_header(int p);
std::string result_csv_row(const ExperimentConfig& cfg, const ExperimentResult& r);
inline constexpr const char* kCsvVersionLine = "# phase-est-lab v1";

/// Read and parse a JSON file; parse errors are rethrown with line/column.
Json load_json_file(const std::string& path);

}  // namespace phaseest
