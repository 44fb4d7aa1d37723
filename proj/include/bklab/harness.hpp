#pragma once

// Batch driver: runs named check suites over local fields and renders the
// results as text tables or a stable JSON document.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace bklab {

inline constexpr const char* kVersion = "0.1.0";

enum class CheckStatus { pass, fail, undecided };
const char* to_string(CheckStatus s);

struct SuiteConfig {
  /// Shipped names or descriptor file paths.
  std::vector<std::string> fields;
  /// proposition, step1_pairing, oracle_crosscheck, norm_argument, bockstein or all.
  std::string suite = "all";
  std::vector<int> qs{1, 2};
  std::uint64_t seed = 1;
  /// Overrides the descriptor precision when set.
  std::optional<int> precision;
  /// Largest window degree D for the pairing suite.
  int window = 6;
  std::size_t symbol_samples = 200;
  std::size_t unit_samples = 100;
  std::size_t norm_samples = 100;
};

const std::vector<std::string>& suite_names();

struct CheckRecord {
  std::string field;
  std::string suite;
  std::string clause;
  int q = 0;
  int m = -1;
  CheckStatus status = CheckStatus::fail;
  nlohmann::ordered_json evidence = nlohmann::ordered_json::object();
  double millis = 0;
};

struct GradedTable {
  std::string field;
  int q = 1;
  std::vector<int> model_dims;
  std::vector<int> observed_dims;
  std::vector<CheckStatus> row_status;
};

struct CheckReport {
  SuiteConfig config;
  std::vector<CheckRecord> records;
  std::vector<GradedTable> tables;
  std::size_t count(CheckStatus s) const;
  /// 0 all pass, 1 any fail, 2 any undecided (and no fail).
  int exit_code() const;
};

/// Throws math_error on an empty field list or an unknown suite before any
/// check runs.
CheckReport run_suite(const SuiteConfig& config);

enum class ReportFormat { text, structured };
/// Structured output omits timings so equal (config, seed) give equal bytes.
std::string emit_report(const CheckReport& report, ReportFormat format);

}  // namespace bklab
