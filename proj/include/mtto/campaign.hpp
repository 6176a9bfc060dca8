#ifndef MTTO_CAMPAIGN_HPP
#define MTTO_CAMPAIGN_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "mtto/toeplitz.hpp"

namespace mtto {

/// Pass thresholds; every field can be overridden from the config's "tol".
struct Tolerances {
  double roundtrip = tol::roundtrip;
  double identity = tol::identity;
  double rank = tol::rank;
  double tail = tol::tail;
  double inner = kUnitarityTolerance;
  double theorem = kTheoremTolerance;
  double nonmember = kNonMemberTolerance;
};

struct RandomSymbols {
  int count = 0;
  Index band = 0;
  std::uint64_t seed = 0;
};

inline const std::vector<std::string> kAllChecks = {
    "basis", "inner", "lemma1", "theorem1", "theorem2", "theorem4", "theorem5", "theorem6"};

struct CampaignConfig {
  Index d = 1;
  std::optional<Index> grid; ///< fixed grid size, adaptive when absent
  Index max_grid = 16384;
  Tolerances tol;
  InnerFunctionSpec theta;
  std::vector<SymbolSpec> symbols;
  std::optional<RandomSymbols> random_symbols;
  std::vector<std::string> checks; ///< sorted, unique
  std::string output = "mtto-lab-out";
  std::uint64_t seed = 0;
  int projection_samples = 50;
};

/// Parses and validates a UTF-8 JSON config. Throws ConfigError (with the
/// JSON pointer of the offending node) or SpecError.
CampaignConfig parse_config(std::string_view text);

/// Complex numbers travel as [re, im].
nlohmann::json to_json(cplx z);
nlohmann::json to_json(const Matrix& m);
nlohmann::json to_json(const SymbolSpec& s);
InnerFunctionSpec parse_inner_spec(const nlohmann::json& j, Index d, const std::string& pointer);
SymbolSpec parse_symbol(const nlohmann::json& j, Index d, const std::string& pointer);

struct CheckResult {
  bool pass = false;
  double threshold = 0.0;
  std::map<std::string, double> residuals;
  nlohmann::ordered_json info = nlohmann::ordered_json::object();
  std::optional<std::string> error_kind;
  std::string error_message;
};

struct CampaignReport {
  std::map<std::string, CheckResult> checks;
  std::optional<Index> grid_size;
  std::optional<Index> model_dim;
  std::optional<bool> pure;
  bool overall_pass = false;
  double wall_time_s = 0.0;
  /// Matrices available for CSV dumps: "shift", "tau", "mtto:<i>".
  std::map<std::string, Matrix> matrices;

  /// Report body; deterministic for a fixed config. Timing is appended
  /// only when `with_timing` is set.
  nlohmann::ordered_json to_json(bool with_timing = true) const;
};

CampaignReport run_campaign(const CampaignConfig& config);

/// One matrix of the campaign ("shift", "tau", or "mtto:<index>").
Matrix campaign_matrix(const CampaignConfig& config, const std::string& name);

/// Row-major CSV with one quoted "re,im" cell per entry, full precision.
std::string matrix_to_csv(const Matrix& m);
Matrix matrix_from_csv(std::string_view text);

/// Writes report.json and, unless json_only, one CSV per matrix.
void write_outputs(const CampaignReport& report, const std::string& directory, bool json_only);

/// Rounds to 12 significant digits, the precision of every reported residual.
double report_round(double value);

} // namespace mtto

#endif // MTTO_CAMPAIGN_HPP
