#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gatefi/fault_model.hpp"
#include "gatefi/netlist.hpp"
#include "gatefi/stimulus.hpp"
#include "gatefi/transform.hpp"

namespace gatefi {

// ---------------------------------------------------------------- analyzer

enum class StrobeType : std::uint8_t { Functional, Checker };

std::string_view to_string(StrobeType type);

struct Strobe {
  std::string signal;
  bool active = true;
  StrobeType type = StrobeType::Functional;
};

struct StrobeGroup {
  std::string name;
  std::vector<Strobe> strobes;
};

// Observation points of a campaign. Trace rows follow group order, then
// strobe order within each group.
struct AnalyzerConfig {
  std::vector<StrobeGroup> groups;

  std::vector<Strobe> strobes() const;
};

// ---------------------------------------------------------------- schedules

struct ScheduleEntry {
  ChannelId channel;
  std::string signal;
  FaultModel model;
  std::uint64_t inject_cycle;
  std::uint64_t release_cycle;

  bool operator==(const ScheduleEntry&) const = default;
};

// One simulation's faults. A channel's mode at cycle c is that of the last
// listed entry with inject_cycle <= c < release_cycle, else TRANSPARENT.
struct FaultSchedule {
  std::string label;
  std::vector<ScheduleEntry> entries;

  bool operator==(const FaultSchedule&) const = default;
};

// Throws Error(Schedule) for unknown channels, windows outside
// [0, sim_time], or TIMING on a saboteur without a delay register.
void validate_schedule(const FaultSchedule& schedule, const InstrumentedNetlist& design, std::uint64_t sim_time);

// ---------------------------------------------------------------- state

struct SimState {
  std::vector<std::uint8_t> net_values;   // settled values of the last step
  std::vector<std::uint8_t> cell_states;  // one per sequential cell
  std::vector<SaboteurMode> saboteur_modes;
  std::vector<std::uint8_t> delay_regs;     // one per saboteur, used when it has a delay register
  std::vector<std::uint8_t> driver_values;  // driver-side value of each saboteur net, last step
  std::uint64_t cycle = 0;

  bool operator==(const SimState&) const = default;
};

// FNV-1a over the clocked part of the state (cells, modes, delay registers,
// cycle).
std::uint64_t state_digest(const SimState& state);

struct ModeUpdate {
  ChannelId channel;
  SaboteurMode mode;
};

struct Trace {
  std::vector<std::string> strobes;
  std::vector<std::vector<std::uint8_t>> bits;  // [strobe][cycle]
  std::uint64_t cycles = 0;

  bool operator==(const Trace&) const = default;
};

struct RunResult {
  Trace trace;
  std::uint64_t initial_digest = 0;  // state_digest of the state the run started from
};

// Compiled, immutable view of a design; share one instance between threads
// and keep one SimState per worker.
class Simulator {
 public:
  explicit Simulator(const InstrumentedNetlist& design);
  explicit Simulator(const Netlist& plain);

  SimState initial_state() const;

  // Applies mode updates, settles the combinational logic with saboteurs
  // interposed, captures the primary outputs, then clocks cells and delay
  // registers from the pre-edge values. Returns the output snapshot.
  std::vector<std::uint8_t> step(SimState& state, std::span<const std::uint8_t> inputs,
                                 std::span<const ModeUpdate> updates = {}) const;

  RunResult run(const Stimulus& stimulus, std::uint64_t sim_time, const AnalyzerConfig& analyzer,
                const FaultSchedule* schedule = nullptr) const;

  std::size_t input_count() const { return inputs_.size(); }
  std::size_t control_width() const { return sab_has_delay_.size(); }
  const std::vector<std::string>& net_names() const { return net_names_; }
  std::optional<NetId> find_net(std::string_view name) const;

 private:
  struct Op {
    GateKind kind;
    bool latch;
    NetId output;
    std::uint32_t first;  // into operands_
    std::uint32_t count;
    std::uint32_t cell;
  };

  void compile(const Netlist& n, const std::vector<Saboteur>& saboteurs);
  void drive(SimState& state, NetId net, std::uint8_t raw) const;

  std::vector<std::string> net_names_;
  std::vector<NetId> inputs_;
  std::vector<NetId> outputs_;
  std::vector<Op> ops_;
  std::vector<NetId> operands_;
  std::vector<SeqCell> cells_;
  std::vector<std::int64_t> sab_of_net_;
  std::vector<std::uint8_t> sab_has_delay_;
  std::string design_name_;
};

// Free-function forms over a design.
SimState initial_state(const InstrumentedNetlist& design);
Trace simulate(const InstrumentedNetlist& design, const Stimulus& stimulus, std::uint64_t sim_time,
               const AnalyzerConfig& analyzer, const FaultSchedule* schedule = nullptr);

// ---------------------------------------------------------------- verdicts

enum class Verdict : std::uint8_t { Safe, Failure, Detected, DetectedFailure };

std::string_view to_string(Verdict v);
std::optional<Verdict> parse_verdict(std::string_view text);

constexpr bool is_failure(Verdict v) { return v == Verdict::Failure || v == Verdict::DetectedFailure; }
constexpr bool is_detected(Verdict v) { return v == Verdict::Detected || v == Verdict::DetectedFailure; }

struct Mismatch {
  std::uint64_t cycle;
  std::string strobe;

  bool operator==(const Mismatch&) const = default;
};

struct Classification {
  Verdict verdict = Verdict::Safe;
  std::optional<Mismatch> first_functional_mismatch;
  std::optional<Mismatch> first_checker_mismatch;

  bool operator==(const Classification&) const = default;
};

// Only active strobes take part. Throws Error(Simulation) when the traces'
// strobe lists or lengths differ, or do not match the analyzer.
Classification compare_traces(const Trace& golden, const Trace& faulty, const AnalyzerConfig& analyzer);

}  // namespace gatefi
