#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "coopeig/matrixkit.hpp"
#include "coopeig/model.hpp"

namespace coopeig {

using json = nlohmann::ordered_json;

/// Parsed configuration: the operator plus optional sections used by
/// individual commands.
struct ParsedConfig {
  SystemSpec spec;
  std::optional<MutationDecomposition> decomposition;
  json raw;  // full document for command-specific sections
};

/// Reads and validates a config file. Schema errors carry the offending key
/// path; structural violations surface as validation errors.
ParsedConfig parse_config(const std::string& path);
ParsedConfig parse_config_text(const std::string& text, const std::string& origin = "<string>");

CoefficientDescriptor descriptor_from_json(const json& j, const std::string& key_path);
json descriptor_to_json(const CoefficientDescriptor& d);
SystemSpec spec_from_json(const json& j);
json spec_to_json(const SystemSpec& spec);

json state_to_json(const struct StateVector& u);
json matrix_to_json(const SquareMatrix& m);

}  // namespace coopeig
