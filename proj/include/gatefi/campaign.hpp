#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gatefi/faultlist.hpp"
#include "gatefi/simengine.hpp"
#include "gatefi/transform.hpp"

namespace gatefi {

// ---------------------------------------------------------------- config

struct SfiConfig {
  std::uint64_t sim_total = 1;
  std::uint64_t fault_per_sim = 1;
  bool seu_only = false;
  bool timing_only = false;
  std::uint64_t seed = 0;
};

struct DfiConfig {
  std::int64_t id = 0;  // entries sharing an id run in one simulation
  FaultModel fault_model = FaultModel::StuckAt0;
  std::string signal;
  std::uint64_t inject_cycle = 0;
  std::uint64_t release_cycle = 1;
};

struct EfiConfig {
  std::uint64_t injection_time = 0;
  std::uint64_t release_time = 1;
};

struct SimulationController {
  std::string top_module;
  std::uint64_t sim_time = 0;
  bool timing_fault_active = false;
  std::optional<SfiConfig> sfi;
  std::optional<std::vector<DfiConfig>> dfi;
  std::optional<EfiConfig> efi;
};

struct CampaignConfig {
  SimulationController controller;
  AnalyzerConfig analyzer;
  std::string stimulus;             // file path (relative to the config file) or random(<seed>)
  std::optional<std::string> fault_scope;
};

// Reads the JSON campaign file. Unknown keys, wrong types and broken
// invariants throw Error(Config).
CampaignConfig parse_campaign_config(std::string_view text);
CampaignConfig load_campaign_config(const std::string& path);

// Structural checks that need no netlist: at least one strategy, windows
// within sim_time, SFI flags, TIMING only when timing faults are active, at
// least one active functional strobe.
void validate_config(const CampaignConfig& config);

// ---------------------------------------------------------------- schedules

// Every (entry, model) pair an SFI draw may pick under the given flags.
std::vector<std::pair<std::size_t, FaultModel>> sfi_pool(const FaultList& fl, const SfiConfig& cfg,
                                                         bool timing_fault_active);

// sim_total schedules of fault_per_sim faults. Simulation i, fault k uses
// draws 3k..3k+2 of stream i from CounterRng(seed): location/model, inject
// cycle, TIMING release. BITFLIP lasts one cycle, stuck-at runs to sim_time.
std::vector<FaultSchedule> build_schedules_sfi(const FaultList& fl, const SfiConfig& cfg, std::uint64_t sim_time,
                                               bool timing_fault_active);

// One schedule per surviving stuck-at fault, entry order, sa0 before sa1.
std::vector<FaultSchedule> build_schedules_efi(const FaultList& fl, const EfiConfig& cfg);

// One schedule per distinct id in first-appearance order. Signals may name
// any stuck-at class member; they are mapped to the representative.
std::vector<FaultSchedule> build_schedules_dfi(const FaultList& fl, const std::vector<DfiConfig>& cfgs,
                                               bool timing_fault_active);

// ---------------------------------------------------------------- execution

struct SimulationRecord {
  std::string label;
  FaultSchedule schedule;
  Classification classification;
  std::chrono::nanoseconds wall_time{0};
  std::uint64_t initial_state_digest = 0;
};

struct CampaignTotals {
  std::uint64_t fault_set_size = 0;
  std::uint64_t total_simulations = 0;
  std::uint64_t fail_count = 0;      // FAILURE and DETECTED_FAILURE
  std::uint64_t safe_count = 0;
  std::uint64_t detected_count = 0;  // DETECTED only
  std::chrono::nanoseconds runtime{0};
};

struct CampaignInfo {
  std::string component;
  bool timing_fault_active = false;
  bool equivalence_verified = false;  // by simulation, see check_equivalence
};

struct CampaignResult {
  CampaignInfo info;
  std::vector<SimulationRecord> records;
  CampaignTotals totals;
};

// Recomputes the verdict counts from the records.
CampaignTotals tally(const std::vector<SimulationRecord>& records, std::uint64_t fault_set_size);

struct RunOptions {
  unsigned workers = 1;
};

// Golden run once, then SFI, EFI and DFI schedules in that order, each
// simulated from power-on and classified against golden. Records come back
// in schedule order whatever the worker count. The first failing
// simulation aborts the campaign with its label.
CampaignResult run_campaign(const SimulationController& controller, const AnalyzerConfig& analyzer,
                            const InstrumentedNetlist& design, const FaultList& fl, const Stimulus& stimulus,
                            const RunOptions& options = {});

// Observation nets a campaign needs kept distinct during collapsing.
std::vector<NetId> strobe_nets(const AnalyzerConfig& analyzer, const Netlist& n);

// Everything between a parsed netlist and a campaign result: enabled-cell
// replacement, fault extraction and collapsing, saboteur insertion and the
// transparency self-check.
struct PreparedCampaign {
  Netlist original;
  Netlist transformed;
  FaultList fault_list;
  InstrumentedNetlist design;
  std::optional<EquivalenceVerdict> equivalence;  // absent when skipped
};

PreparedCampaign prepare_campaign(const Netlist& original, const CampaignConfig& config, bool check_equiv = true,
                                  std::uint64_t equiv_cycles = 1000);

// Runs the SFI part of `config` twice, once on a design instrumented with
// delay registers and once without, and reports the wall-clock ratio.
struct TimingOverhead {
  std::chrono::nanoseconds without_timing{0};
  std::chrono::nanoseconds with_timing{0};
  double factor = 0.0;
};

TimingOverhead measure_timing_overhead(const Netlist& original, const CampaignConfig& config, const Stimulus& stimulus,
                                       const RunOptions& options = {}, int repetitions = 3);

}  // namespace gatefi
