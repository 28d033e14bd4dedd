#include "gatefi/simengine.hpp"

#include <algorithm>

#include "gatefi/error.hpp"

namespace gatefi {

std::string_view to_string(FaultModel model) {
  switch (model) {
    case FaultModel::StuckAt0: return "STUCK_AT_0";
    case FaultModel::StuckAt1: return "STUCK_AT_1";
    case FaultModel::Bitflip: return "BITFLIP";
    case FaultModel::Timing: return "TIMING";
  }
  return "?";
}

std::optional<FaultModel> parse_fault_model(std::string_view text) {
  for (FaultModel m : kAllFaultModels)
    if (to_string(m) == text) return m;
  return std::nullopt;
}

std::string_view to_string(StrobeType type) { return type == StrobeType::Functional ? "FUNCTIONAL" : "CHECKER"; }

std::vector<Strobe> AnalyzerConfig::strobes() const {
  std::vector<Strobe> all;
  for (const auto& g : groups) all.insert(all.end(), g.strobes.begin(), g.strobes.end());
  return all;
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Safe: return "SAFE";
    case Verdict::Failure: return "FAILURE";
    case Verdict::Detected: return "DETECTED";
    case Verdict::DetectedFailure: return "DETECTED_FAILURE";
  }
  return "?";
}

std::optional<Verdict> parse_verdict(std::string_view text) {
  for (Verdict v : {Verdict::Safe, Verdict::Failure, Verdict::Detected, Verdict::DetectedFailure})
    if (to_string(v) == text) return v;
  return std::nullopt;
}

namespace {

void check_entries(const FaultSchedule& schedule, std::span<const std::uint8_t> has_delay, std::uint64_t sim_time) {
  for (const ScheduleEntry& e : schedule.entries) {
    const std::string where = "schedule '" + schedule.label + "': ";
    if (e.channel >= has_delay.size()) {
      throw Error(ErrorKind::Schedule, where + "unknown control channel " + std::to_string(e.channel));
    }
    if (e.inject_cycle >= e.release_cycle || e.release_cycle > sim_time) {
      throw Error(ErrorKind::Schedule, where + "window [" + std::to_string(e.inject_cycle) + ", " +
                                           std::to_string(e.release_cycle) + ") is not inside [0, " +
                                           std::to_string(sim_time) + "]");
    }
    if (e.model == FaultModel::Timing && !has_delay[e.channel]) {
      throw Error(ErrorKind::Schedule, where + "TIMING fault on '" + e.signal +
                                           "' but the design was instrumented without delay registers");
    }
  }
}

}  // namespace

void validate_schedule(const FaultSchedule& schedule, const InstrumentedNetlist& design, std::uint64_t sim_time) {
  std::vector<std::uint8_t> has_delay;
  for (const auto& s : design.saboteurs) has_delay.push_back(s.has_delay_register);
  check_entries(schedule, has_delay, sim_time);
}

std::uint64_t state_digest(const SimState& state) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&h](std::uint8_t byte) {
    h ^= byte;
    h *= 0x100000001b3ULL;
  };
  for (auto v : state.cell_states) feed(v);
  feed(0xff);
  for (auto m : state.saboteur_modes) feed(static_cast<std::uint8_t>(m));
  feed(0xff);
  for (auto v : state.delay_regs) feed(v);
  for (int i = 0; i < 8; ++i) feed(static_cast<std::uint8_t>(state.cycle >> (8 * i)));
  return h;
}

// ---------------------------------------------------------------- Simulator

Simulator::Simulator(const InstrumentedNetlist& design) { compile(design.base, design.saboteurs); }

Simulator::Simulator(const Netlist& plain) { compile(plain, {}); }

void Simulator::compile(const Netlist& n, const std::vector<Saboteur>& saboteurs) {
  const auto report = validate(n);
  if (!report.empty()) {
    throw Error(ErrorKind::Netlist, "cannot simulate '" + n.name + "': " + report.violations.front().message);
  }
  design_name_ = n.name;
  net_names_ = n.net_names();
  inputs_ = n.inputs;
  outputs_ = n.outputs;
  cells_ = n.cells;

  for (const EvalNode& node : levelize(n).nodes) {
    if (node.kind == EvalNode::Kind::Gate) {
      const Gate& g = n.gates[node.index];
      ops_.push_back({g.kind, false, g.output, static_cast<std::uint32_t>(operands_.size()),
                      static_cast<std::uint32_t>(g.inputs.size()), 0});
      operands_.insert(operands_.end(), g.inputs.begin(), g.inputs.end());
    } else {
      const SeqCell& c = n.cells[node.index];
      ops_.push_back({GateKind::Buf, true, c.output, static_cast<std::uint32_t>(operands_.size()), 2, node.index});
      operands_.push_back(c.data);
      operands_.push_back(*c.enable);
    }
  }

  sab_of_net_.assign(n.net_count(), -1);
  for (const Saboteur& s : saboteurs) {
    sab_of_net_[s.target] = static_cast<std::int64_t>(sab_has_delay_.size());
    sab_has_delay_.push_back(s.has_delay_register);
  }
}

std::optional<NetId> Simulator::find_net(std::string_view name) const {
  auto it = std::find(net_names_.begin(), net_names_.end(), name);
  if (it == net_names_.end()) return std::nullopt;
  return static_cast<NetId>(it - net_names_.begin());
}

SimState Simulator::initial_state() const {
  SimState s;
  s.net_values.assign(net_names_.size(), 0);
  s.cell_states.reserve(cells_.size());
  for (const SeqCell& c : cells_) s.cell_states.push_back(c.init ? 1 : 0);
  s.saboteur_modes.assign(sab_has_delay_.size(), SaboteurMode::Transparent);
  s.delay_regs.assign(sab_has_delay_.size(), 0);
  s.driver_values.assign(sab_has_delay_.size(), 0);
  return s;
}

void Simulator::drive(SimState& state, NetId net, std::uint8_t raw) const {
  const std::int64_t k = sab_of_net_[net];
  if (k < 0) {
    state.net_values[net] = raw;
    return;
  }
  // Delay registers power up holding the first settled driver value.
  if (state.cycle == 0) state.delay_regs[k] = raw;
  state.driver_values[k] = raw;
  std::uint8_t out = raw;
  switch (state.saboteur_modes[k]) {
    case SaboteurMode::Transparent: break;
    case SaboteurMode::Stuck0: out = 0; break;
    case SaboteurMode::Stuck1: out = 1; break;
    case SaboteurMode::Invert: out = raw ^ 1; break;
    case SaboteurMode::Delay: out = state.delay_regs[k]; break;
  }
  state.net_values[net] = out;
}

std::vector<std::uint8_t> Simulator::step(SimState& state, std::span<const std::uint8_t> inputs,
                                          std::span<const ModeUpdate> updates) const {
  if (inputs.size() != inputs_.size()) {
    throw Error(ErrorKind::Simulation, "input vector has " + std::to_string(inputs.size()) + " bits, '" +
                                           design_name_ + "' has " + std::to_string(inputs_.size()) + " inputs");
  }
  for (const ModeUpdate& u : updates) {
    if (u.channel >= sab_has_delay_.size()) {
      throw Error(ErrorKind::Simulation, "unknown control channel " + std::to_string(u.channel));
    }
    if (u.mode == SaboteurMode::Delay && !sab_has_delay_[u.channel]) {
      throw Error(ErrorKind::Simulation,
                  "channel " + std::to_string(u.channel) + " has no delay register for DELAY mode");
    }
    state.saboteur_modes[u.channel] = u.mode;
  }

  auto& v = state.net_values;
  for (std::size_t i = 0; i < inputs_.size(); ++i) drive(state, inputs_[i], inputs[i] & 1);
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    if (cells_[i].kind != CellKind::Dlatch) drive(state, cells_[i].output, state.cell_states[i]);
  }

  for (const Op& op : ops_) {
    const NetId* in = operands_.data() + op.first;
    std::uint8_t r = 0;
    if (op.latch) {
      r = v[in[1]] ? v[in[0]] : state.cell_states[op.cell];
    } else {
      switch (op.kind) {
        case GateKind::Buf: r = v[in[0]]; break;
        case GateKind::Not: r = v[in[0]] ^ 1; break;
        case GateKind::And:
        case GateKind::Nand:
          r = 1;
          for (std::uint32_t i = 0; i < op.count; ++i) r &= v[in[i]];
          if (op.kind == GateKind::Nand) r ^= 1;
          break;
        case GateKind::Or:
        case GateKind::Nor:
          r = 0;
          for (std::uint32_t i = 0; i < op.count; ++i) r |= v[in[i]];
          if (op.kind == GateKind::Nor) r ^= 1;
          break;
        case GateKind::Xor:
        case GateKind::Xnor:
          r = 0;
          for (std::uint32_t i = 0; i < op.count; ++i) r ^= v[in[i]];
          if (op.kind == GateKind::Xnor) r ^= 1;
          break;
        case GateKind::Mux2: r = v[in[0]] ? v[in[2]] : v[in[1]]; break;
        case GateKind::Const0: r = 0; break;
        case GateKind::Const1: r = 1; break;
      }
    }
    drive(state, op.output, r);
  }

  std::vector<std::uint8_t> snapshot;
  snapshot.reserve(outputs_.size());
  for (NetId out : outputs_) snapshot.push_back(v[out]);

  for (std::size_t i = 0; i < cells_.size(); ++i) {
    const SeqCell& c = cells_[i];
    switch (c.kind) {
      case CellKind::Dff: state.cell_states[i] = v[c.data]; break;
      case CellKind::Dffe:
      case CellKind::Dlatch:
        if (v[*c.enable]) state.cell_states[i] = v[c.data];
        break;
    }
  }
  for (std::size_t k = 0; k < sab_has_delay_.size(); ++k) {
    if (sab_has_delay_[k]) state.delay_regs[k] = state.driver_values[k];
  }
  ++state.cycle;
  return snapshot;
}

RunResult Simulator::run(const Stimulus& stimulus, std::uint64_t sim_time, const AnalyzerConfig& analyzer,
                         const FaultSchedule* schedule) const {
  if (stimulus.width() != inputs_.size()) {
    throw Error(ErrorKind::Simulation, "stimulus width " + std::to_string(stimulus.width()) +
                                           " does not match " + std::to_string(inputs_.size()) + " inputs");
  }
  if (auto len = stimulus.length(); len && *len < sim_time) {
    throw Error(ErrorKind::Simulation, "stimulus supplies " + std::to_string(*len) + " vectors, simulation needs " +
                                           std::to_string(sim_time));
  }

  RunResult result;
  Trace& trace = result.trace;
  std::vector<NetId> strobe_nets;
  for (const Strobe& s : analyzer.strobes()) {
    auto id = find_net(s.signal);
    if (!id) throw Error(ErrorKind::Simulation, "strobe '" + s.signal + "' is not a net of '" + design_name_ + "'");
    strobe_nets.push_back(*id);
    trace.strobes.push_back(s.signal);
  }
  trace.bits.assign(strobe_nets.size(), std::vector<std::uint8_t>(sim_time, 0));
  trace.cycles = sim_time;

  // Channels touched by the schedule, each with its entries in list order.
  std::vector<std::pair<ChannelId, std::vector<const ScheduleEntry*>>> touched;
  if (schedule) {
    check_entries(*schedule, sab_has_delay_, sim_time);
    for (const ScheduleEntry& e : schedule->entries) {
      auto it = std::find_if(touched.begin(), touched.end(), [&](const auto& t) { return t.first == e.channel; });
      if (it == touched.end()) {
        touched.push_back({e.channel, {&e}});
      } else {
        it->second.push_back(&e);
      }
    }
  }

  SimState state = initial_state();
  result.initial_digest = state_digest(state);
  std::vector<std::uint8_t> vec(inputs_.size());
  std::vector<ModeUpdate> updates;
  for (std::uint64_t cycle = 0; cycle < sim_time; ++cycle) {
    updates.clear();
    for (const auto& [channel, entries] : touched) {
      SaboteurMode want = SaboteurMode::Transparent;
      for (const ScheduleEntry* e : entries) {
        if (e->inject_cycle <= cycle && cycle < e->release_cycle) want = saboteur_mode(e->model);
      }
      if (state.saboteur_modes[channel] != want) updates.push_back({channel, want});
    }
    stimulus.vector_at(cycle, vec);
    step(state, vec, updates);
    for (std::size_t s = 0; s < strobe_nets.size(); ++s) trace.bits[s][cycle] = state.net_values[strobe_nets[s]];
  }
  return result;
}

SimState initial_state(const InstrumentedNetlist& design) { return Simulator(design).initial_state(); }

Trace simulate(const InstrumentedNetlist& design, const Stimulus& stimulus, std::uint64_t sim_time,
               const AnalyzerConfig& analyzer, const FaultSchedule* schedule) {
  return Simulator(design).run(stimulus, sim_time, analyzer, schedule).trace;
}

Classification compare_traces(const Trace& golden, const Trace& faulty, const AnalyzerConfig& analyzer) {
  const auto strobes = analyzer.strobes();
  if (golden.strobes != faulty.strobes || golden.cycles != faulty.cycles || golden.bits.size() != faulty.bits.size()) {
    throw Error(ErrorKind::Simulation, "trace shapes differ");
  }
  if (golden.strobes.size() != strobes.size()) {
    throw Error(ErrorKind::Simulation, "trace strobes do not match the analyzer configuration");
  }
  Classification c;
  for (std::size_t s = 0; s < strobes.size(); ++s) {
    if (!strobes[s].active) continue;
    if (golden.strobes[s] != strobes[s].signal) {
      throw Error(ErrorKind::Simulation, "trace strobe order does not match the analyzer configuration");
    }
    const auto& g = golden.bits[s];
    const auto& f = faulty.bits[s];
    if (g.size() != golden.cycles || f.size() != golden.cycles) throw Error(ErrorKind::Simulation, "ragged trace");
    const auto diff = std::mismatch(g.begin(), g.end(), f.begin());
    if (diff.first == g.end()) continue;
    const Mismatch m{static_cast<std::uint64_t>(diff.first - g.begin()), strobes[s].signal};
    auto& slot = strobes[s].type == StrobeType::Functional ? c.first_functional_mismatch : c.first_checker_mismatch;
    if (!slot || m.cycle < slot->cycle) slot = m;
  }
  const bool fail = c.first_functional_mismatch.has_value();
  const bool detected = c.first_checker_mismatch.has_value();
  c.verdict = fail ? (detected ? Verdict::DetectedFailure : Verdict::Failure)
                   : (detected ? Verdict::Detected : Verdict::Safe);
  return c;
}

}  // namespace gatefi
