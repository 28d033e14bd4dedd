#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gatefi/campaign.hpp"

namespace gatefi {

// One table row: Fault set / Total simulations / Fail / Safe / Detected /
// Runtime. Percentages are rounded to one decimal.
struct SummaryRow {
  std::string component;
  std::uint64_t fault_set = 0;
  std::uint64_t total_simulations = 0;
  double fail_pct = 0.0;      // FAILURE and DETECTED_FAILURE
  double safe_pct = 0.0;
  double detected_pct = 0.0;  // DETECTED only
  std::string runtime;        // H:MM
  bool operator==(const SummaryRow&) const = default;
};

// Rounds half away from zero to one decimal.
double round_percent(std::uint64_t part, std::uint64_t whole);

// Whole hours, then minutes truncated: 0:00, 1:07, 26:59.
std::string format_runtime(std::chrono::nanoseconds runtime);

// Throws Error(Simulation) when the result holds no simulations.
SummaryRow summarize(const CampaignResult& result, std::string_view scope_label);

// Summary table: the column header line, then the row when there is one.
inline constexpr std::string_view kSummaryHeader = "component,fault_set,total_simulations,fail,safe,detected,runtime";
std::string format_summary(const std::optional<SummaryRow>& row);

// Summary of a result that may be empty: header only for zero simulations.
std::string summary_text(const CampaignResult& result);

// Record file: a campaign header line followed by one JSON object per
// simulation. The content depends only on the verdicts and schedules, so
// identical campaigns give identical bytes whatever the worker count; wall
// times go to the timing table instead.
std::string emit_records(const CampaignResult& result);

// Per-simulation wall times plus a final `campaign` row with the campaign
// runtime, all in nanoseconds.
std::string emit_timing(const CampaignResult& result);

// Inverse of emit_records. Wall times and the runtime stay zero; an empty
// text yields an empty result. Malformed lines throw ParseError with the
// line number.
CampaignResult parse_records(std::string_view text);

// Reads a timing table into `result`: wall times by label and the runtime.
// Throws ParseError for malformed rows or labels that are not in `result`.
void apply_timing(std::string_view text, CampaignResult& result);

// Path of the timing table that accompanies a record file:
// out/records.fir -> out/records.timing.csv.
std::string timing_path_for(const std::string& records_path);

// Writes <dir>/records.fir, <dir>/records.timing.csv and <dir>/summary.csv,
// creating the directory if needed. Throws Error(Io) when unwritable.
struct ArtifactPaths {
  std::string records;
  std::string timing;
  std::string summary;
};
ArtifactPaths write_campaign_artifacts(const CampaignResult& result, const std::string& out_dir);

// Reads a record file and, if present, its timing table.
CampaignResult load_records(const std::string& records_path);

}  // namespace gatefi
