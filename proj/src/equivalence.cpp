#include "gatefi/error.hpp"
#include "gatefi/simengine.hpp"
#include "gatefi/transform.hpp"

namespace gatefi {

namespace {

std::vector<std::string> port_names(const Netlist& n, const std::vector<NetId>& ports) {
  std::vector<std::string> names;
  for (NetId id : ports) names.push_back(n.net_name(id));
  return names;
}

}  // namespace

EquivalenceVerdict check_equivalence(const Netlist& original, const InstrumentedNetlist& instrumented,
                                     const Stimulus& stimulus, std::uint64_t cycles) {
  const Netlist& other = instrumented.base;
  if (port_names(original, original.inputs) != port_names(other, other.inputs) ||
      port_names(original, original.outputs) != port_names(other, other.outputs)) {
    throw Error(ErrorKind::Netlist, "designs '" + original.name + "' and '" + other.name +
                                        "' have different primary I/O signatures");
  }

  const Simulator golden_sim(original);
  const Simulator instrumented_sim(instrumented);
  SimState golden = golden_sim.initial_state();
  SimState faulty = instrumented_sim.initial_state();
  std::vector<std::uint8_t> vec(original.inputs.size());

  EquivalenceVerdict verdict;
  for (std::uint64_t cycle = 0; cycle < cycles; ++cycle) {
    stimulus.vector_at(cycle, vec);
    const auto expect = golden_sim.step(golden, vec);
    const auto got = instrumented_sim.step(faulty, vec);
    ++verdict.vectors_checked;
    for (std::size_t o = 0; o < expect.size(); ++o) {
      if (expect[o] != got[o]) {
        verdict.equivalent = false;
        verdict.first_divergence =
            Divergence{cycle, original.net_name(original.outputs[o]), expect[o] != 0, got[o] != 0};
        return verdict;
      }
    }
  }
  return verdict;
}

}  // namespace gatefi
