#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gatefi/netlist.hpp"

namespace gatefi {

class Stimulus;

using ChannelId = std::uint32_t;

enum class SaboteurMode : std::uint8_t { Transparent, Stuck0, Stuck1, Invert, Delay };

std::string_view to_string(SaboteurMode mode);

struct Saboteur {
  ChannelId id;
  NetId target;
  bool has_delay_register = false;

  // TRANSPARENT, STUCK0, STUCK1 and INVERT are always available; DELAY only
  // with a delay register.
  bool supports(SaboteurMode mode) const { return mode != SaboteurMode::Delay || has_delay_register; }
};

class InstrumentedNetlist {
 public:
  InstrumentedNetlist(Netlist base, std::vector<Saboteur> saboteurs, bool timing_enabled);

  Netlist base;                     // after enabled-cell replacement
  std::vector<Saboteur> saboteurs;  // indexed by channel id
  bool timing_enabled = false;

  std::size_t control_width() const { return saboteurs.size(); }
  // Channel of the saboteur on `net`, if the net is a target.
  std::optional<ChannelId> channel_of(NetId net) const;

 private:
  std::vector<std::int64_t> channel_by_net_;
};

// Rewrites every DFFE(q, d, en) as MUX2(q__seu_mux; en, q, d) feeding
// DFF(q, q__seu_mux), and every DLATCH(q, d, en) as MUX2(q; en, q__seu_state, d)
// with DFF(q__seu_state, q), which keeps the latch transparent while en = 1.
// A netlist without enabled cells is returned unchanged.
Netlist replace_enabled_cells(const Netlist& n);

// Places one saboteur on each target net, driver side, ahead of all
// consumers. Channel ids follow net id order. Throws Error(Netlist) for a
// target that is not a net of `n` or when enabled cells remain.
InstrumentedNetlist insert_saboteurs(const Netlist& n, const std::vector<NetId>& targets, bool timing_enabled);

// Every net of `n` as a target list.
std::vector<NetId> all_nets(const Netlist& n);

// Expands the saboteurs into ordinary gates so the instrumented design is a
// plain netlist again. Each saboteur adds control inputs __sab_<id>_s (force),
// __sab_<id>_v (forced value), __sab_<id>_x (invert) and, with timing,
// __sab_<id>_d (delay); all-zero controls are transparent. The delay register
// powers up at 0 here, whereas the embedded engine primes it from the cycle-0
// settled value.
Netlist expand_saboteurs(const InstrumentedNetlist& design);

// Control-input assignment that puts one expanded saboteur into `mode`.
struct ControlBits {
  bool force = false;
  bool value = false;
  bool invert = false;
  bool delay = false;
};
ControlBits control_bits(SaboteurMode mode);

struct Divergence {
  std::uint64_t cycle;
  std::string output;
  bool golden;
  bool instrumented;
};

struct EquivalenceVerdict {
  bool equivalent = true;
  std::optional<Divergence> first_divergence;
  std::uint64_t vectors_checked = 0;
  // The check runs both designs in lockstep; it is not a formal proof.
  static constexpr const char* kMethod = "simulation";
};

// Runs original and instrumented designs in lockstep with every saboteur
// transparent and compares all primary outputs every cycle. Throws
// Error(Netlist) if the primary I/O names differ.
EquivalenceVerdict check_equivalence(const Netlist& original, const InstrumentedNetlist& instrumented,
                                     const Stimulus& stimulus, std::uint64_t cycles);

}  // namespace gatefi
