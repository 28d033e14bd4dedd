#include "gatefi/transform.hpp"

#include <algorithm>

#include "gatefi/error.hpp"

namespace gatefi {

std::string_view to_string(SaboteurMode mode) {
  switch (mode) {
    case SaboteurMode::Transparent: return "TRANSPARENT";
    case SaboteurMode::Stuck0: return "STUCK0";
    case SaboteurMode::Stuck1: return "STUCK1";
    case SaboteurMode::Invert: return "INVERT";
    case SaboteurMode::Delay: return "DELAY";
  }
  return "?";
}

InstrumentedNetlist::InstrumentedNetlist(Netlist base_netlist, std::vector<Saboteur> sabs, bool timing)
    : base(std::move(base_netlist)), saboteurs(std::move(sabs)), timing_enabled(timing) {
  channel_by_net_.assign(base.net_count(), -1);
  for (std::size_t k = 0; k < saboteurs.size(); ++k) {
    const Saboteur& s = saboteurs[k];
    if (s.id != k) throw Error(ErrorKind::Netlist, "saboteur ids must equal their channel index");
    if (s.target >= base.net_count()) throw Error(ErrorKind::Netlist, "saboteur target is not a net of the design");
    if (s.has_delay_register != timing) {
      throw Error(ErrorKind::Netlist, "saboteur delay register must match the timing-fault setting");
    }
    if (channel_by_net_[s.target] >= 0) {
      throw Error(ErrorKind::Netlist, "net '" + base.net_name(s.target) + "' has two saboteurs");
    }
    channel_by_net_[s.target] = static_cast<std::int64_t>(k);
  }
}

std::optional<ChannelId> InstrumentedNetlist::channel_of(NetId net) const {
  if (net >= channel_by_net_.size() || channel_by_net_[net] < 0) return std::nullopt;
  return static_cast<ChannelId>(channel_by_net_[net]);
}

namespace {

bool has_enabled_cells(const Netlist& n) {
  return std::any_of(n.cells.begin(), n.cells.end(), [](const SeqCell& c) { return c.kind != CellKind::Dff; });
}

std::vector<std::string> names_of(const Netlist& n, const std::vector<NetId>& ids) {
  std::vector<std::string> out;
  out.reserve(ids.size());
  for (NetId id : ids) out.push_back(n.net_name(id));
  return out;
}

}  // namespace

Netlist replace_enabled_cells(const Netlist& n) {
  if (!has_enabled_cells(n)) return n;

  NetlistBuilder b(n.name);
  for (NetId in : n.inputs) b.add_input({n.net_name(in), {}});
  for (NetId out : n.outputs) b.add_output({n.net_name(out), {}});
  for (const Gate& g : n.gates) b.add_gate(g.kind, n.net_name(g.output), names_of(n, g.inputs));

  auto fresh = [&](const std::string& name) {
    if (n.find_net(name)) throw Error(ErrorKind::Netlist, "reserved net name '" + name + "' already in use");
    return name;
  };
  for (const SeqCell& c : n.cells) {
    const std::string& q = n.net_name(c.output);
    const std::string& d = n.net_name(c.data);
    switch (c.kind) {
      case CellKind::Dff:
        b.add_cell(CellKind::Dff, q, d, std::nullopt, c.init);
        break;
      case CellKind::Dffe: {
        const std::string mux = fresh(q + "__seu_mux");
        b.add_gate(GateKind::Mux2, mux, {n.net_name(*c.enable), q, d});
        b.add_cell(CellKind::Dff, q, mux, std::nullopt, c.init);
        break;
      }
      case CellKind::Dlatch: {
        const std::string state = fresh(q + "__seu_state");
        b.add_gate(GateKind::Mux2, q, {n.net_name(*c.enable), state, d});
        b.add_cell(CellKind::Dff, state, q, std::nullopt, c.init);
        break;
      }
    }
  }
  return b.build();
}

std::vector<NetId> all_nets(const Netlist& n) {
  std::vector<NetId> nets(n.net_count());
  for (NetId id = 0; id < nets.size(); ++id) nets[id] = id;
  return nets;
}

InstrumentedNetlist insert_saboteurs(const Netlist& n, const std::vector<NetId>& targets, bool timing_enabled) {
  if (has_enabled_cells(n)) {
    throw Error(ErrorKind::Netlist, "enabled cells must be replaced before saboteur insertion");
  }
  std::vector<NetId> sorted = targets;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

  std::vector<Saboteur> saboteurs;
  saboteurs.reserve(sorted.size());
  for (NetId net : sorted) {
    if (net >= n.net_count()) {
      throw Error(ErrorKind::Netlist, "saboteur target #" + std::to_string(net) + " is not a net of '" + n.name + "'");
    }
    saboteurs.push_back({static_cast<ChannelId>(saboteurs.size()), net, timing_enabled});
  }
  return InstrumentedNetlist(n, std::move(saboteurs), timing_enabled);
}

ControlBits control_bits(SaboteurMode mode) {
  switch (mode) {
    case SaboteurMode::Transparent: return {};
    case SaboteurMode::Stuck0: return {.force = true, .value = false};
    case SaboteurMode::Stuck1: return {.force = true, .value = true};
    case SaboteurMode::Invert: return {.invert = true};
    case SaboteurMode::Delay: return {.delay = true};
  }
  return {};
}

Netlist expand_saboteurs(const InstrumentedNetlist& design) {
  const Netlist& n = design.base;
  const auto drivers = driver_map(n);

  // Name seen by consumers of `net`, and name of the raw driver output.
  std::vector<std::string> consumer_name(n.net_names());
  std::vector<std::string> driver_name(n.net_names());
  for (const Saboteur& s : design.saboteurs) {
    const std::string prefix = "__sab_" + std::to_string(s.id) + "_";
    if (drivers[s.target].kind == Driver::Kind::Input) {
      // A primary input keeps its port name; consumers move to the saboteur output.
      consumer_name[s.target] = prefix + "out";
    } else {
      driver_name[s.target] = prefix + "in";
    }
  }

  NetlistBuilder b(n.name);
  for (NetId in : n.inputs) b.add_input({n.net_name(in), {}});
  for (const Saboteur& s : design.saboteurs) {
    const std::string prefix = "__sab_" + std::to_string(s.id) + "_";
    b.add_input({prefix + "s", {}});
    b.add_input({prefix + "v", {}});
    b.add_input({prefix + "x", {}});
    if (s.has_delay_register) b.add_input({prefix + "d", {}});
  }
  for (NetId out : n.outputs) b.add_output({consumer_name[out], {}});

  auto consumers = [&](const std::vector<NetId>& ids) {
    std::vector<std::string> out;
    for (NetId id : ids) out.push_back(consumer_name[id]);
    return out;
  };
  for (const Gate& g : n.gates) b.add_gate(g.kind, driver_name[g.output], consumers(g.inputs));
  for (const Saboteur& s : design.saboteurs) {
    const std::string prefix = "__sab_" + std::to_string(s.id) + "_";
    std::string through = driver_name[s.target];
    if (s.has_delay_register) {
      b.add_gate(GateKind::Mux2, prefix + "t", {prefix + "d", through, prefix + "dly"});
      through = prefix + "t";
    }
    b.add_gate(GateKind::Xor, prefix + "f", {through, prefix + "x"});
    b.add_gate(GateKind::Mux2, consumer_name[s.target], {prefix + "s", prefix + "f", prefix + "v"});
  }
  for (const SeqCell& c : n.cells) {
    b.add_cell(CellKind::Dff, driver_name[c.output], consumer_name[c.data], std::nullopt, c.init);
  }
  for (const Saboteur& s : design.saboteurs) {
    if (!s.has_delay_register) continue;
    const std::string prefix = "__sab_" + std::to_string(s.id) + "_";
    b.add_cell(CellKind::Dff, prefix + "dly", driver_name[s.target], std::nullopt, false);
  }
  return b.build();
}

}  // namespace gatefi
