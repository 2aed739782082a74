#pragma once

// Batch front end: a JSON run config is checked and compiled in full before
// anything is computed, then its requests run in order and produce one JSON
// report plus a TSV table (invariant, window, lower, upper, witness, status).

#include "meandim/bracket.hpp"

#include "json.hpp"

#include <string>
#include <string_view>

namespace meandim::run {

using Json = nlohmann::ordered_json;

inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr const char* kReportSchema = "meandim-report/1";

// Malformed or schema-violating config; the CLI exits with status 2.
class ConfigError : public Error {
 public:
  ConfigError(std::string where, const std::string& message)
      : Error(where + ": " + message), where_(std::move(where)) {}
  const std::string& where() const { return where_; }

 private:
  std::string where_;
};

// Syntax errors carry "line L, column C".
Json parse_config_text(std::string_view text);

struct RunOutput {
  Json report;
  std::string tsv;
  bool any_error = false;
};

// Compiles every request without running any; throws ConfigError.
void check_config(const Json& config);

// Throws ConfigError before running anything if a request is invalid.
RunOutput run_config(const Json& config);

// Replaces every "timing_ms" by 0.
Json mask_timings(Json report);

std::string tsv_header();
std::string tsv_row(const Row& row);

}  // namespace meandim::run
