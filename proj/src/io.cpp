#include "contab/io.hpp"

#include <cmath>
#include <fstream>
#include <limits>

namespace contab {

namespace {

std::vector<std::int64_t> int_list(const json& doc, const char* key) {
  if (!doc.contains(key) || !doc.at(key).is_array())
    throw Error(ErrorKind::ParseError, std::string("margins document needs an array \"") + key + "\"");
  std::vector<std::int64_t> out;
  for (const auto& v : doc.at(key)) {
    if (!v.is_number_integer()) throw Error(ErrorKind::ParseError, std::string("\"") + key + "\" must hold integers");
    out.push_back(v.get<std::int64_t>());
  }
  return out;
}

double number_or_inf(const json& v) {
  if (v.is_null()) return std::numeric_limits<double>::infinity();
  return v.get<double>();
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json vector_to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(finite_or_null(v[i]));
  return out;
}

}  // namespace

std::string_view to_string(Mode mode) noexcept { return mode == Mode::ZeroOne ? "zero-one" : "nonneg"; }

Mode mode_from_string(std::string_view s) {
  if (s == "zero-one" || s == "01") return Mode::ZeroOne;
  if (s == "nonneg" || s == "non-negative") return Mode::NonNeg;
  throw Error(ErrorKind::ParseError, "unknown mode '" + std::string(s) + "'");
}

std::string_view to_string(Direction d) noexcept {
  switch (d) {
    case Direction::Repel: return "repel";
    case Direction::Attract: return "attract";
    case Direction::NearNeutral: return "near-neutral";
  }
  return "near-neutral";
}

CellMask mask_from_json(const json& doc, Eigen::Index m, Eigen::Index n) {
  const json& rows = doc.is_object() && doc.contains("mask") ? doc.at("mask") : doc;
  if (!rows.is_array() || static_cast<Eigen::Index>(rows.size()) != m)
    throw Error(ErrorKind::ParseError, "mask must be an array of " + std::to_string(m) + " strings");
  CellMask mask(m, n);
  for (Eigen::Index i = 0; i < m; ++i) {
    if (!rows[i].is_string()) throw Error(ErrorKind::ParseError, "mask rows must be strings");
    const auto s = rows[i].get<std::string>();
    if (static_cast<Eigen::Index>(s.size()) != n)
      throw Error(ErrorKind::ParseError, "mask row " + std::to_string(i) + " must have length " + std::to_string(n));
    for (Eigen::Index j = 0; j < n; ++j) {
      if (s[j] != '0' && s[j] != '1') throw Error(ErrorKind::ParseError, "mask entries must be '0' or '1'");
      mask(i, j) = s[j] == '1';
    }
  }
  return mask;
}

json mask_to_json(const CellMask& mask) {
  json out = json::array();
  for (Eigen::Index i = 0; i < mask.rows(); ++i) {
    std::string row;
    for (Eigen::Index j = 0; j < mask.cols(); ++j) row += mask(i, j) ? '1' : '0';
    out.push_back(row);
  }
  return out;
}

MarginsInput margins_from_json(const json& doc) {
  if (!doc.is_object()) throw Error(ErrorKind::ParseError, "margins document must be a JSON object");
  MarginsInput in{validate_margins(int_list(doc, "rows"), int_list(doc, "cols")), std::nullopt};
  if (doc.contains("mask")) in.mask = mask_from_json(doc.at("mask"), in.margins.m(), in.margins.n());
  return in;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorKind::ParseError, "cannot open '" + path.string() + "'");
  try {
    return json::parse(f);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::ParseError, path.string() + ": " + e.what());
  }
}

json matrix_to_json(const IntMatrix& d) {
  json out = json::array();
  for (Eigen::Index i = 0; i < d.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < d.cols(); ++j) row.push_back(d(i, j));
    out.push_back(std::move(row));
  }
  return out;
}

json matrix_to_json(const Eigen::MatrixXd& z) {
  json out = json::array();
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < z.cols(); ++j) row.push_back(z(i, j));
    out.push_back(std::move(row));
  }
  return out;
}

json to_json(const MaxEntSolution& s) {
  return {{"mode", to_string(s.mode)},
          {"Z", matrix_to_json(s.Z)},
          {"dual", {{"s", vector_to_json(s.dual.s)}, {"t", vector_to_json(s.dual.t)}}},
          {"entropy", s.entropy},
          {"log_alpha", s.log_alpha},
          {"residual", s.residual},
          {"iterations", s.iterations},
          {"no_interior", s.no_interior}};
}

MaxEntSolution solution_from_json(const json& doc, const Margins& margins) {
  MaxEntSolution s;
  try {
    s.mode = mode_from_string(doc.at("mode").get<std::string>());
    const auto& z = doc.at("Z");
    const auto m = margins.m();
    const auto n = margins.n();
    if (static_cast<Eigen::Index>(z.size()) != m) throw Error(ErrorKind::ParseError, "Z has the wrong row count");
    s.Z.resize(m, n);
    for (Eigen::Index i = 0; i < m; ++i) {
      if (static_cast<Eigen::Index>(z[i].size()) != n) throw Error(ErrorKind::ParseError, "Z has the wrong column count");
      for (Eigen::Index j = 0; j < n; ++j) s.Z(i, j) = z[i][j].get<double>();
    }
    const auto& ds = doc.at("dual").at("s");
    const auto& dt = doc.at("dual").at("t");
    if (static_cast<Eigen::Index>(ds.size()) != m || static_cast<Eigen::Index>(dt.size()) != n)
      throw Error(ErrorKind::ParseError, "dual vectors have the wrong length");
    s.dual.s.resize(m);
    s.dual.t.resize(n);
    for (Eigen::Index i = 0; i < m; ++i) s.dual.s[i] = number_or_inf(ds[i]);
    for (Eigen::Index j = 0; j < n; ++j) s.dual.t[j] = number_or_inf(dt[j]);
    s.entropy = doc.at("entropy").get<double>();
    s.log_alpha = doc.at("log_alpha").get<double>();
    s.residual = doc.at("residual").get<double>();
    s.iterations = doc.at("iterations").get<int>();
    s.no_interior = doc.value("no_interior", false);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("malformed solution: ") + e.what());
  }

  if (s.log_alpha != s.entropy) throw Error(ErrorKind::ParseError, "log_alpha differs from entropy");
  for (Eigen::Index i = 0; i < s.Z.rows(); ++i)
    for (Eigen::Index j = 0; j < s.Z.cols(); ++j) {
      const double z = s.Z(i, j);
      const double u = s.dual.s[i] + s.dual.t[j];
      const double expect = std::isinf(u) ? 0.0 : cell_mean(s.mode, u);
      const bool range_ok = s.mode == Mode::ZeroOne ? (z >= 0.0 && z <= 1.0) : z >= 0.0;
      if (!range_ok) throw Error(ErrorKind::ParseError, "Z entry out of range");
      if (std::abs(z - expect) > 1e-9 * (1.0 + std::abs(z)))
        throw Error(ErrorKind::ParseError, "Z entry disagrees with the dual variables");
    }
  if (std::abs(margin_residual(s.Z, margins) - s.residual) > 1e-9 * (1.0 + static_cast<double>(margins.total())))
    throw Error(ErrorKind::ParseError, "stored residual disagrees with Z");
  if (std::abs(entropy(s.mode, s.Z) - s.entropy) > 1e-9 * (1.0 + std::abs(s.entropy)))
    throw Error(ErrorKind::ParseError, "stored entropy disagrees with Z");
  return s;
}

json to_json(const EdgeworthData& e) {
  return {{"mode", to_string(e.mode)},
          {"entropy", e.entropy},
          {"log_det_qH", e.log_det_qH},
          {"mu", e.mu},
          {"nu", e.nu},
          {"gaussian_log", e.gaussian_log},
          {"corrected_log", e.corrected_log},
          {"min_z", e.min_z},
          {"max_z", e.max_z},
          {"aspect_ratio", e.aspect_ratio},
          {"in_regime", e.in_regime}};
}

json to_json(const CorrelationReport& r) {
  return {{"mode", to_string(r.mode)},
          {"log_alpha", r.log_alpha},
          {"log_independence", r.log_independence},
          {"gap", r.gap},
          {"direction", to_string(r.direction)},
          {"slack_budget", r.slack_budget}};
}

json to_json(const LogConcavityReport& r) {
  return {{"average", {{"rows", r.average.rows()}, {"cols", r.average.cols()}}},
          {"lhs_log", finite_or_null(r.lhs_log)},
          {"rhs_log", finite_or_null(r.rhs_log)},
          {"precise_slack_log", r.precise_slack_log},
          {"holds_conjectured", r.holds_conjectured},
          {"holds_precise", r.holds_precise},
          {"heuristic", r.heuristic}};
}

json to_json(const SampleReport& r) {
  json out = {{"mode", to_string(r.mode)},
              {"n_trials", r.n_trials},
              {"n_accepted", r.n_accepted},
              {"acceptance_rate", r.acceptance_rate},
              {"entropy", r.entropy},
              {"predicted_rate_log_upper", r.predicted_rate_log_upper},
              {"rate_correction", r.rate_correction}};
  out["log_count"] = r.log_count ? json(*r.log_count) : json(nullptr);
  out["predicted_rate_log"] = r.predicted_rate_log ? json(*r.predicted_rate_log) : json(nullptr);
  out["predicted_rate_log_lower"] = r.predicted_rate_log_lower ? json(*r.predicted_rate_log_lower) : json(nullptr);
  json samples = json::array();
  for (const auto& d : r.samples) samples.push_back(matrix_to_json(d));
  out["samples"] = std::move(samples);
  return out;
}

json to_json(const ConcentrationReport& r) {
  json cells = json::array();
  for (const auto& [i, j] : r.cells) cells.push_back({i, j});
  return {{"cells", cells},
          {"sigma_Z", r.sigma_Z},
          {"n_samples", r.n_samples},
          {"n_trials", r.n_trials},
          {"mean", r.mean},
          {"stdev", r.stdev},
          {"min", r.min},
          {"max", r.max},
          {"mean_ratio", r.mean_ratio},
          {"rms_relative_deviation", r.rms_relative_deviation},
          {"median_relative_deviation", r.median_relative_deviation},
          {"q90_relative_deviation", r.q90_relative_deviation},
          {"max_relative_deviation", r.max_relative_deviation}};
}

std::string to_decimal(const BigCount& c) { return c.str(); }

}  // namespace contab
