#include "gatefi/error.hpp"
#include "gatefi/faultlist.hpp"
#include "gatefi/rng.hpp"

namespace gatefi {

namespace {

// Relaxation evaluator that shares nothing with the levelized engine: sweep
// every gate and latch until no net changes, with one net pinned to a value.
class ForcedEvaluator {
 public:
  ForcedEvaluator(const Netlist& n, NetId forced_net, std::uint8_t forced_value)
      : n_(n), forced_net_(forced_net), forced_value_(forced_value), values_(n.net_count(), 0) {
    for (const SeqCell& c : n.cells) state_.push_back(c.init ? 1 : 0);
  }

  // Settles one cycle and returns the observed values; then clocks the cells.
  std::vector<std::uint8_t> cycle(const std::vector<std::uint8_t>& inputs, const std::vector<NetId>& observe) {
    std::fill(values_.begin(), values_.end(), 0);
    for (std::size_t i = 0; i < n_.inputs.size(); ++i) set(n_.inputs[i], inputs[i]);
    for (std::size_t i = 0; i < n_.cells.size(); ++i) {
      if (n_.cells[i].kind != CellKind::Dlatch) set(n_.cells[i].output, state_[i]);
    }
    const std::size_t max_sweeps = n_.gates.size() + n_.cells.size() + 2;
    bool changed = true;
    for (std::size_t sweep = 0; changed; ++sweep) {
      if (sweep > max_sweeps) throw Error(ErrorKind::Netlist, "oracle evaluation did not settle");
      changed = false;
      for (const Gate& g : n_.gates) changed |= set(g.output, eval(g));
      for (std::size_t i = 0; i < n_.cells.size(); ++i) {
        const SeqCell& c = n_.cells[i];
        if (c.kind == CellKind::Dlatch) changed |= set(c.output, values_[*c.enable] ? values_[c.data] : state_[i]);
      }
    }
    std::vector<std::uint8_t> seen;
    for (NetId id : observe) seen.push_back(values_[id]);
    for (std::size_t i = 0; i < n_.cells.size(); ++i) {
      const SeqCell& c = n_.cells[i];
      if (!c.enable || values_[*c.enable]) state_[i] = values_[c.data];
    }
    return seen;
  }

 private:
  bool set(NetId id, std::uint8_t v) {
    if (id == forced_net_) v = forced_value_;
    const bool changed = values_[id] != v;
    values_[id] = v;
    return changed;
  }

  std::uint8_t eval(const Gate& g) const {
    auto in = [&](std::size_t i) { return values_[g.inputs[i]]; };
    std::size_t ones = 0;
    for (std::size_t i = 0; i < g.inputs.size(); ++i) ones += in(i);
    const std::size_t width = g.inputs.size();
    switch (g.kind) {
      case GateKind::Buf: return in(0);
      case GateKind::Not: return !in(0);
      case GateKind::And: return ones == width;
      case GateKind::Nand: return ones != width;
      case GateKind::Or: return ones > 0;
      case GateKind::Nor: return ones == 0;
      case GateKind::Xor: return ones % 2;
      case GateKind::Xnor: return ones % 2 == 0;
      case GateKind::Mux2: return in(0) ? in(2) : in(1);
      case GateKind::Const0: return 0;
      case GateKind::Const1: return 1;
    }
    return 0;
  }

  const Netlist& n_;
  NetId forced_net_;
  std::uint8_t forced_value_;
  std::vector<std::uint8_t> values_;
  std::vector<std::uint8_t> state_;
};

std::pair<NetId, std::uint8_t> locate(const Netlist& n, const FaultRef& f) {
  if (!is_stuck_at(f.model)) throw Error(ErrorKind::Config, "the equivalence oracle handles stuck-at faults only");
  const auto id = n.find_net(f.signal);
  if (!id) throw Error(ErrorKind::Config, "oracle fault on unknown net '" + f.signal + "'");
  return {*id, f.model == FaultModel::StuckAt1 ? 1 : 0};
}

}  // namespace

bool oracle_equivalent(const Netlist& n, const FaultRef& a, const FaultRef& b, const OracleBudget& budget) {
  const auto [net_a, val_a] = locate(n, a);
  const auto [net_b, val_b] = locate(n, b);
  if (net_a == net_b && val_a == val_b) return true;

  std::vector<NetId> observe = n.outputs;
  observe.insert(observe.end(), budget.observed.begin(), budget.observed.end());
  const std::size_t width = n.inputs.size();

  if (n.cells.empty()) {
    if (width > budget.max_exhaustive_inputs) {
      throw Error(ErrorKind::Budget, "'" + n.name + "' has " + std::to_string(width) +
                                         " inputs; exhaustive oracle budget is " +
                                         std::to_string(budget.max_exhaustive_inputs));
    }
    ForcedEvaluator ea(n, net_a, val_a);
    ForcedEvaluator eb(n, net_b, val_b);
    std::vector<std::uint8_t> pattern(width);
    for (std::uint64_t p = 0; p < (std::uint64_t{1} << width); ++p) {
      for (std::size_t i = 0; i < width; ++i) pattern[i] = (p >> i) & 1;
      if (ea.cycle(pattern, observe) != eb.cycle(pattern, observe)) return false;
    }
    return true;
  }

  const CounterRng rng(budget.seed);
  std::vector<std::uint8_t> pattern(width);
  for (std::size_t s = 0; s < budget.sequences; ++s) {
    ForcedEvaluator ea(n, net_a, val_a);
    ForcedEvaluator eb(n, net_b, val_b);
    for (std::size_t t = 0; t < budget.sequence_length; ++t) {
      for (std::size_t i = 0; i < width; ++i) pattern[i] = rng.bits(s * budget.sequence_length + t, i) >> 63;
      if (ea.cycle(pattern, observe) != eb.cycle(pattern, observe)) return false;
    }
  }
  return true;
}

}  // namespace gatefi
