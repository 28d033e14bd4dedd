#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace gatefi {

using NetId = std::uint32_t;

enum class GateKind : std::uint8_t { Buf, Not, And, Nand, Or, Nor, Xor, Xnor, Mux2, Const0, Const1 };

enum class CellKind : std::uint8_t { Dff, Dffe, Dlatch };

std::string_view to_string(GateKind kind);
std::string_view to_string(CellKind kind);
std::optional<GateKind> parse_gate_kind(std::string_view text);

// Whether `count` operands is legal for `kind`.
bool arity_ok(GateKind kind, std::size_t count);

struct Gate {
  GateKind kind;
  // MUX2 operand order is (sel, a, b): out = sel ? b : a.
  std::vector<NetId> inputs;
  NetId output;

  bool operator==(const Gate&) const = default;
};

struct SeqCell {
  CellKind kind;
  NetId data;
  std::optional<NetId> enable;  // DFFE and DLATCH only
  NetId output;
  bool init = false;

  bool operator==(const SeqCell&) const = default;
};

// Gate-level design. All nets are single-bit; every cell is clocked by the
// one implicit global clock.
class Netlist {
 public:
  Netlist() = default;
  explicit Netlist(std::string name) : name(std::move(name)) {}

  std::string name;
  std::vector<NetId> inputs;
  std::vector<NetId> outputs;
  std::vector<Gate> gates;
  std::vector<SeqCell> cells;

  // Declares a net, or returns the existing id if the name is taken.
  NetId add_net(const std::string& net_name);
  std::optional<NetId> find_net(std::string_view net_name) const;
  const std::string& net_name(NetId id) const { return net_names_.at(id); }
  std::size_t net_count() const { return net_names_.size(); }
  const std::vector<std::string>& net_names() const { return net_names_; }

  bool operator==(const Netlist& other) const;

 private:
  std::vector<std::string> net_names_;
  std::unordered_map<std::string, NetId> index_;
};

// Driver of a net as seen from the structure.
struct Driver {
  enum class Kind : std::uint8_t { None, Input, Gate, Cell };
  Kind kind = Kind::None;
  std::uint32_t index = 0;  // position in inputs / gates / cells
};

// One driver per net; nets with zero or several drivers are reported by
// validate() and map to Kind::None here.
std::vector<Driver> driver_map(const Netlist& n);

// Number of consumers per net: gate operand pins, cell data/enable pins and
// primary-output listings each count once.
std::vector<std::uint32_t> fanout_counts(const Netlist& n);

struct Violation {
  enum class Kind : std::uint8_t {
    Undriven,
    MultipleDrivers,
    UndeclaredNet,
    Arity,
    EnableMismatch,
    CombinationalCycle,
  };
  Kind kind;
  std::vector<NetId> nets;
  std::string message;
};

std::string_view to_string(Violation::Kind kind);

struct ValidationReport {
  std::vector<Violation> violations;

  bool empty() const { return violations.empty(); }
  std::size_t count(Violation::Kind kind) const;
};

ValidationReport validate(const Netlist& n);

// Node of the combinational evaluation graph. Level-sensitive latches are
// transparent within a cycle, so they take part in the ordering alongside
// gates.
struct EvalNode {
  enum class Kind : std::uint8_t { Gate, Latch };
  Kind kind;
  std::uint32_t index;  // into gates or cells

  bool operator==(const EvalNode&) const = default;
};

struct EvaluationOrder {
  std::vector<EvalNode> nodes;
};

// Topological order of gates and latches; ties go to the lowest declaration
// index (gates before latches). Throws Error(Netlist) on a cycle.
EvaluationOrder levelize(const Netlist& n);

struct SourceLoc {
  std::size_t line = 0;
  std::size_t column = 0;
};

// Collects declarations by name and assigns net ids canonically: primary
// inputs first, then gate outputs in gate order, then cell outputs in cell
// order. The reader and the transforms both go through it, so any netlist
// they produce survives a print/parse round trip unchanged.
class NetlistBuilder {
 public:
  struct NetRef {
    std::string name;
    SourceLoc loc;
  };

  explicit NetlistBuilder(std::string model) : model_(std::move(model)) {}

  void add_input(NetRef net) { inputs_.push_back(std::move(net)); }
  void add_output(NetRef net) { outputs_.push_back(std::move(net)); }
  void add_gate(GateKind kind, NetRef output, std::vector<NetRef> inputs);
  void add_cell(CellKind kind, NetRef output, NetRef data, std::optional<NetRef> enable, bool init);

  // Convenience forms for programmatic construction.
  void add_gate(GateKind kind, const std::string& output, const std::vector<std::string>& inputs);
  void add_cell(CellKind kind, const std::string& output, const std::string& data,
                const std::optional<std::string>& enable = std::nullopt, bool init = false);

  // Throws ParseError on a duplicate driver, undeclared operand, arity or
  // enable mismatch, reporting the location given to the offending add_*.
  Netlist build() const;

 private:
  struct GateDecl {
    GateKind kind;
    NetRef output;
    std::vector<NetRef> inputs;
  };
  struct CellDecl {
    CellKind kind;
    NetRef output;
    NetRef data;
    std::optional<NetRef> enable;
    bool init;
  };

  std::string model_;
  std::vector<NetRef> inputs_;
  std::vector<NetRef> outputs_;
  std::vector<GateDecl> gates_;
  std::vector<CellDecl> cells_;
};

Netlist parse_netlist(std::string_view text);
Netlist load_netlist(const std::string& path);

// Canonical printer; parse_netlist(print_netlist(n)) == n for any netlist
// produced by NetlistBuilder.
std::string print_netlist(const Netlist& n);

bool is_identifier(std::string_view text);

}  // namespace gatefi
