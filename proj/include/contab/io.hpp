#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "contab/asymptotics.hpp"
#include "contab/estimates.hpp"
#include "contab/maxent.hpp"
#include "contab/sampler.hpp"

namespace contab {

using nlohmann::json;

struct MarginsInput {
  Margins margins;
  std::optional<CellMask> mask;
};

/// {"rows":[...], "cols":[...], "mask":["0110", ...]?}. Structural problems
/// throw ParseError; margin validation errors propagate as their own kinds.
MarginsInput margins_from_json(const json& doc);

/// A mask is an array of m strings of '0'/'1', or an object holding one under "mask".
CellMask mask_from_json(const json& doc, Eigen::Index m, Eigen::Index n);

json mask_to_json(const CellMask& mask);

/// Throws ParseError when the file cannot be read or is not JSON.
json read_json_file(const std::filesystem::path& path);

std::string_view to_string(Mode mode) noexcept;
Mode mode_from_string(std::string_view s);
std::string_view to_string(Direction d) noexcept;

json matrix_to_json(const IntMatrix& d);
json matrix_to_json(const Eigen::MatrixXd& z);

json to_json(const MaxEntSolution& s);

/// Re-parses a serialized solution and checks its invariants (entry ranges,
/// log_alpha = entropy, z given by the duals, residual). Throws ParseError.
MaxEntSolution solution_from_json(const json& doc, const Margins& margins);

json to_json(const EdgeworthData& e);
json to_json(const CorrelationReport& r);
json to_json(const LogConcavityReport& r);
json to_json(const SampleReport& r);
json to_json(const ConcentrationReport& r);

/// Exact decimal rendering, never scientific notation.
std::string to_decimal(const BigCount& c);

}  // namespace contab
