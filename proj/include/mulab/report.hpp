#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace mulab {

// One evaluated grid cell, flattened for reporting.
struct ReportRow {
  std::string dataset;
  std::string method;
  std::string policy;
  std::string forget_mode;
  double forget_parameter = 0;
  uint64_t seed = 0;
  double ua = 0, ra = 0, ta = 0, mia = 0, rte = 0;
  double gap_ua = 0, gap_ra = 0, gap_ta = 0, gap_mia = 0, ag = 0;
  std::string gap_mode = "per-seed";
};

std::string report_csv_header();

// Sorts by (dataset, method, policy, forget mode, forget parameter, seed).
void sort_rows(std::vector<ReportRow>& rows);

// Header plus one row per record, numerics at 4 decimal places, rows sorted.
// Empty input -> InputError.
std::string report_to_csv(std::vector<ReportRow> rows);

// Same rows as a JSON array with full-precision numerics.
nlohmann::ordered_json report_to_json(std::vector<ReportRow> rows);

// Inverse of report_to_csv; header or shape mismatch -> FormatError.
std::vector<ReportRow> parse_report_csv(const std::string& text);

// Mean and sample standard deviation over the seeds of one
// (dataset, method, policy, forget) group.
struct AggregateRow {
  std::string dataset;
  std::string method;
  std::string policy;
  std::string forget_mode;
  double forget_parameter = 0;
  int n = 0;
  double ua_mean = 0, ua_std = 0;
  double ra_mean = 0, ra_std = 0;
  double ta_mean = 0, ta_std = 0;
  double mia_mean = 0, mia_std = 0;
  double rte_mean = 0, rte_std = 0;
  double ag_mean = 0, ag_std = 0;
};

std::vector<AggregateRow> aggregate_rows(const std::vector<ReportRow>& rows);

// Aggregate table with "mean ± std" cells.
std::string aggregate_to_csv(const std::vector<ReportRow>& rows);

}  // namespace mulab
