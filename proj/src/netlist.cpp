#include "gatefi/netlist.hpp"

#include <algorithm>
#include <functional>
#include <queue>
#include <sstream>
#include <unordered_set>

#include "gatefi/error.hpp"

namespace gatefi {

namespace {

constexpr std::string_view kGateNames[] = {"BUF", "NOT", "AND", "NAND", "OR",    "NOR",
                                           "XOR", "XNOR", "MUX2", "CONST0", "CONST1"};

}  // namespace

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Io: return "io";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Netlist: return "netlist";
    case ErrorKind::Config: return "config";
    case ErrorKind::Schedule: return "schedule";
    case ErrorKind::Simulation: return "simulation";
    case ErrorKind::Budget: return "budget";
  }
  return "unknown";
}

ParseError::ParseError(std::size_t line, std::size_t column, const std::string& message)
    : Error(ErrorKind::Parse,
            "line " + std::to_string(line) + (column ? ", column " + std::to_string(column) : std::string{}) +
                ": " + message),
      line_(line),
      column_(column),
      message_(message) {}

std::string_view to_string(GateKind kind) { return kGateNames[static_cast<std::size_t>(kind)]; }

std::string_view to_string(CellKind kind) {
  switch (kind) {
    case CellKind::Dff: return "DFF";
    case CellKind::Dffe: return "DFFE";
    case CellKind::Dlatch: return "DLATCH";
  }
  return "?";
}

std::optional<GateKind> parse_gate_kind(std::string_view text) {
  for (std::size_t i = 0; i < std::size(kGateNames); ++i) {
    if (kGateNames[i] == text) return static_cast<GateKind>(i);
  }
  return std::nullopt;
}

bool arity_ok(GateKind kind, std::size_t count) {
  switch (kind) {
    case GateKind::Buf:
    case GateKind::Not: return count == 1;
    case GateKind::Mux2: return count == 3;
    case GateKind::Const0:
    case GateKind::Const1: return count == 0;
    default: return count >= 2;
  }
}

std::string_view to_string(Violation::Kind kind) {
  switch (kind) {
    case Violation::Kind::Undriven: return "undriven";
    case Violation::Kind::MultipleDrivers: return "multiple-drivers";
    case Violation::Kind::UndeclaredNet: return "undeclared-net";
    case Violation::Kind::Arity: return "arity";
    case Violation::Kind::EnableMismatch: return "enable-mismatch";
    case Violation::Kind::CombinationalCycle: return "combinational-cycle";
  }
  return "?";
}

NetId Netlist::add_net(const std::string& net_name) {
  if (auto it = index_.find(net_name); it != index_.end()) return it->second;
  const auto id = static_cast<NetId>(net_names_.size());
  net_names_.push_back(net_name);
  index_.emplace(net_name, id);
  return id;
}

std::optional<NetId> Netlist::find_net(std::string_view net_name) const {
  if (auto it = index_.find(std::string(net_name)); it != index_.end()) return it->second;
  return std::nullopt;
}

bool Netlist::operator==(const Netlist& other) const {
  return name == other.name && inputs == other.inputs && outputs == other.outputs && gates == other.gates &&
         cells == other.cells && net_names_ == other.net_names_;
}

std::vector<Driver> driver_map(const Netlist& n) {
  std::vector<Driver> drivers(n.net_count());
  std::vector<std::uint8_t> seen(n.net_count(), 0);
  auto claim = [&](NetId net, Driver d) {
    if (net >= drivers.size()) return;
    if (seen[net]++ == 0) {
      drivers[net] = d;
    } else {
      drivers[net] = Driver{};
    }
  };
  for (std::uint32_t i = 0; i < n.inputs.size(); ++i) claim(n.inputs[i], {Driver::Kind::Input, i});
  for (std::uint32_t i = 0; i < n.gates.size(); ++i) claim(n.gates[i].output, {Driver::Kind::Gate, i});
  for (std::uint32_t i = 0; i < n.cells.size(); ++i) claim(n.cells[i].output, {Driver::Kind::Cell, i});
  return drivers;
}

std::vector<std::uint32_t> fanout_counts(const Netlist& n) {
  std::vector<std::uint32_t> fanout(n.net_count(), 0);
  auto bump = [&](NetId net) {
    if (net < fanout.size()) ++fanout[net];
  };
  for (const auto& g : n.gates) {
    for (NetId in : g.inputs) bump(in);
  }
  for (const auto& c : n.cells) {
    bump(c.data);
    if (c.enable) bump(*c.enable);
  }
  for (NetId out : n.outputs) bump(out);
  return fanout;
}

std::size_t ValidationReport::count(Violation::Kind kind) const {
  return static_cast<std::size_t>(
      std::count_if(violations.begin(), violations.end(), [kind](const Violation& v) { return v.kind == kind; }));
}

namespace {

// Combinational dependency graph over gates and latches.
struct CombGraph {
  std::vector<EvalNode> nodes;
  std::vector<std::vector<std::uint32_t>> successors;
  std::vector<std::uint32_t> indegree;
  std::vector<NetId> node_output;
};

CombGraph build_comb_graph(const Netlist& n) {
  CombGraph g;
  const std::size_t net_count = n.net_count();
  std::vector<std::int64_t> node_of_net(net_count, -1);

  for (std::uint32_t i = 0; i < n.gates.size(); ++i) {
    g.nodes.push_back({EvalNode::Kind::Gate, i});
    g.node_output.push_back(n.gates[i].output);
  }
  for (std::uint32_t i = 0; i < n.cells.size(); ++i) {
    if (n.cells[i].kind == CellKind::Dlatch) {
      g.nodes.push_back({EvalNode::Kind::Latch, i});
      g.node_output.push_back(n.cells[i].output);
    }
  }
  for (std::uint32_t k = 0; k < g.nodes.size(); ++k) {
    const NetId out = g.node_output[k];
    if (out < net_count && node_of_net[out] < 0) node_of_net[out] = k;
  }

  g.successors.resize(g.nodes.size());
  g.indegree.assign(g.nodes.size(), 0);
  auto depend = [&](std::uint32_t consumer, NetId operand) {
    if (operand >= net_count || node_of_net[operand] < 0) return;
    const auto producer = static_cast<std::uint32_t>(node_of_net[operand]);
    g.successors[producer].push_back(consumer);
    ++g.indegree[consumer];
  };
  for (std::uint32_t k = 0; k < g.nodes.size(); ++k) {
    const EvalNode node = g.nodes[k];
    if (node.kind == EvalNode::Kind::Gate) {
      for (NetId in : n.gates[node.index].inputs) depend(k, in);
    } else {
      const SeqCell& c = n.cells[node.index];
      depend(k, c.data);
      if (c.enable) depend(k, *c.enable);
    }
  }
  return g;
}

// Tarjan's SCC; returns components that form a cycle (size > 1 or self loop).
std::vector<std::vector<std::uint32_t>> cyclic_components(const CombGraph& g) {
  const std::size_t count = g.nodes.size();
  std::vector<std::int64_t> index(count, -1), low(count, 0);
  std::vector<std::uint8_t> on_stack(count, 0);
  std::vector<std::uint32_t> stack;
  std::vector<std::vector<std::uint32_t>> cycles;
  std::int64_t next_index = 0;

  // Iterative to stay safe on deep netlists.
  struct Frame {
    std::uint32_t node;
    std::size_t edge;
  };
  for (std::uint32_t root = 0; root < count; ++root) {
    if (index[root] >= 0) continue;
    std::vector<Frame> frames{{root, 0}};
    index[root] = low[root] = next_index++;
    stack.push_back(root);
    on_stack[root] = 1;
    while (!frames.empty()) {
      Frame& f = frames.back();
      if (f.edge < g.successors[f.node].size()) {
        const std::uint32_t w = g.successors[f.node][f.edge++];
        if (index[w] < 0) {
          index[w] = low[w] = next_index++;
          stack.push_back(w);
          on_stack[w] = 1;
          frames.push_back({w, 0});
        } else if (on_stack[w]) {
          low[f.node] = std::min(low[f.node], index[w]);
        }
        continue;
      }
      const std::uint32_t v = f.node;
      frames.pop_back();
      if (!frames.empty()) low[frames.back().node] = std::min(low[frames.back().node], low[v]);
      if (low[v] != index[v]) continue;
      std::vector<std::uint32_t> component;
      std::uint32_t w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack[w] = 0;
        component.push_back(w);
      } while (w != v);
      const auto& succ = g.successors[v];
      const bool self_loop = std::find(succ.begin(), succ.end(), v) != succ.end();
      if (component.size() > 1 || self_loop) cycles.push_back(std::move(component));
    }
  }
  return cycles;
}

}  // namespace

ValidationReport validate(const Netlist& n) {
  ValidationReport report;
  const std::size_t net_count = n.net_count();
  auto name_of = [&](NetId id) { return id < net_count ? n.net_name(id) : "#" + std::to_string(id); };
  auto add = [&](Violation::Kind kind, std::vector<NetId> nets, std::string message) {
    report.violations.push_back({kind, std::move(nets), std::move(message)});
  };

  bool operands_declared = true;
  auto check_declared = [&](NetId id, const std::string& where) {
    if (id >= net_count) {
      operands_declared = false;
      add(Violation::Kind::UndeclaredNet, {id}, "undeclared net #" + std::to_string(id) + " used by " + where);
    }
  };
  for (NetId in : n.inputs) check_declared(in, "primary input list");
  for (NetId out : n.outputs) check_declared(out, "primary output list");
  for (std::size_t i = 0; i < n.gates.size(); ++i) {
    const Gate& g = n.gates[i];
    const std::string where = std::string(to_string(g.kind)) + " gate " + std::to_string(i);
    check_declared(g.output, where);
    for (NetId in : g.inputs) check_declared(in, where);
    if (!arity_ok(g.kind, g.inputs.size())) {
      add(Violation::Kind::Arity, {g.output},
          where + " driving '" + name_of(g.output) + "' has " + std::to_string(g.inputs.size()) + " inputs");
    }
  }
  for (std::size_t i = 0; i < n.cells.size(); ++i) {
    const SeqCell& c = n.cells[i];
    const std::string where = std::string(to_string(c.kind)) + " cell " + std::to_string(i);
    check_declared(c.output, where);
    check_declared(c.data, where);
    if (c.enable) check_declared(*c.enable, where);
    const bool wants_enable = c.kind != CellKind::Dff;
    if (wants_enable != c.enable.has_value()) {
      add(Violation::Kind::EnableMismatch, {c.output},
          where + " driving '" + name_of(c.output) + (wants_enable ? "' requires" : "' must not have") +
              " an enable net");
    }
  }

  std::vector<std::uint32_t> driver_count(net_count, 0);
  for (NetId in : n.inputs)
    if (in < net_count) ++driver_count[in];
  for (const auto& g : n.gates)
    if (g.output < net_count) ++driver_count[g.output];
  for (const auto& c : n.cells)
    if (c.output < net_count) ++driver_count[c.output];
  for (NetId id = 0; id < net_count; ++id) {
    if (driver_count[id] == 0) {
      add(Violation::Kind::Undriven, {id}, "net '" + n.net_name(id) + "' has no driver");
    } else if (driver_count[id] > 1) {
      add(Violation::Kind::MultipleDrivers, {id},
          "net '" + n.net_name(id) + "' has " + std::to_string(driver_count[id]) + " drivers");
    }
  }

  if (operands_declared) {
    const CombGraph graph = build_comb_graph(n);
    for (const auto& component : cyclic_components(graph)) {
      std::vector<NetId> nets;
      for (std::uint32_t k : component) nets.push_back(graph.node_output[k]);
      std::sort(nets.begin(), nets.end());
      std::string listing;
      for (NetId id : nets) listing += (listing.empty() ? "" : " ") + n.net_name(id);
      add(Violation::Kind::CombinationalCycle, nets, "combinational cycle through: " + listing);
    }
  }
  return report;
}

EvaluationOrder levelize(const Netlist& n) {
  CombGraph graph = build_comb_graph(n);
  // Node ids already follow declaration order (gates, then latches), so a
  // min-heap on node id gives the deterministic tie-break.
  std::priority_queue<std::uint32_t, std::vector<std::uint32_t>, std::greater<>> ready;
  for (std::uint32_t k = 0; k < graph.nodes.size(); ++k)
    if (graph.indegree[k] == 0) ready.push(k);

  EvaluationOrder order;
  order.nodes.reserve(graph.nodes.size());
  while (!ready.empty()) {
    const std::uint32_t k = ready.top();
    ready.pop();
    order.nodes.push_back(graph.nodes[k]);
    for (std::uint32_t succ : graph.successors[k])
      if (--graph.indegree[succ] == 0) ready.push(succ);
  }
  if (order.nodes.size() != graph.nodes.size()) {
    throw Error(ErrorKind::Netlist, "netlist '" + n.name + "' contains a combinational cycle");
  }
  return order;
}

// ---------------------------------------------------------------- builder

void NetlistBuilder::add_gate(GateKind kind, NetRef output, std::vector<NetRef> inputs) {
  gates_.push_back({kind, std::move(output), std::move(inputs)});
}

void NetlistBuilder::add_cell(CellKind kind, NetRef output, NetRef data, std::optional<NetRef> enable, bool init) {
  cells_.push_back({kind, std::move(output), std::move(data), std::move(enable), init});
}

void NetlistBuilder::add_gate(GateKind kind, const std::string& output, const std::vector<std::string>& inputs) {
  std::vector<NetRef> refs;
  for (const auto& in : inputs) refs.push_back({in, {}});
  add_gate(kind, NetRef{output, {}}, std::move(refs));
}

void NetlistBuilder::add_cell(CellKind kind, const std::string& output, const std::string& data,
                              const std::optional<std::string>& enable, bool init) {
  std::optional<NetRef> en;
  if (enable) en = NetRef{*enable, {}};
  add_cell(kind, NetRef{output, {}}, NetRef{data, {}}, std::move(en), init);
}

Netlist NetlistBuilder::build() const {
  Netlist n(model_);
  auto fail = [](const SourceLoc& loc, const std::string& message) -> void {
    throw ParseError(loc.line, loc.column, message);
  };
  auto drive = [&](const NetRef& ref) {
    if (n.find_net(ref.name)) fail(ref.loc, "duplicate driver for net '" + ref.name + "'");
    return n.add_net(ref.name);
  };
  auto resolve = [&](const NetRef& ref) {
    auto id = n.find_net(ref.name);
    if (!id) fail(ref.loc, "undeclared net '" + ref.name + "'");
    return *id;
  };

  for (const auto& in : inputs_) n.inputs.push_back(drive(in));
  for (const auto& g : gates_) drive(g.output);
  for (const auto& c : cells_) drive(c.output);

  std::unordered_set<std::string> listed_outputs;
  for (const auto& out : outputs_) {
    if (!listed_outputs.insert(out.name).second) fail(out.loc, "net '" + out.name + "' listed twice as output");
    n.outputs.push_back(resolve(out));
  }
  for (const auto& g : gates_) {
    if (!arity_ok(g.kind, g.inputs.size())) {
      fail(g.output.loc, std::string(to_string(g.kind)) + " gate '" + g.output.name + "' takes " +
                             (g.kind == GateKind::Buf || g.kind == GateKind::Not ? "1 input"
                              : g.kind == GateKind::Mux2                         ? "3 inputs (sel a b)"
                              : g.kind == GateKind::Const0 || g.kind == GateKind::Const1
                                  ? "no inputs"
                                  : "at least 2 inputs") +
                             ", got " + std::to_string(g.inputs.size()));
    }
    Gate gate{g.kind, {}, *n.find_net(g.output.name)};
    for (const auto& in : g.inputs) gate.inputs.push_back(resolve(in));
    n.gates.push_back(std::move(gate));
  }
  for (const auto& c : cells_) {
    const bool wants_enable = c.kind != CellKind::Dff;
    if (wants_enable != c.enable.has_value()) {
      fail(c.output.loc, std::string(to_string(c.kind)) + " cell '" + c.output.name +
                             (wants_enable ? "' requires an enable net" : "' takes no enable net"));
    }
    SeqCell cell{c.kind, resolve(c.data), std::nullopt, *n.find_net(c.output.name), c.init};
    if (c.enable) cell.enable = resolve(*c.enable);
    n.cells.push_back(cell);
  }
  return n;
}

}  // namespace gatefi
