#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gatefi/fault_model.hpp"
#include "gatefi/netlist.hpp"
#include "gatefi/transform.hpp"

namespace gatefi {

struct FaultRef {
  std::string signal;
  FaultModel model;

  bool operator==(const FaultRef&) const = default;
};

// Stuck-at faults represented by one surviving fault of an entry.
struct FaultClass {
  FaultModel model;  // the representative's model; the representative is (entry.signal, model)
  std::vector<FaultRef> members;

  bool operator==(const FaultClass&) const = default;
};

struct FaultEntry {
  std::string signal;
  NetId net;
  ChannelId control;
  bool sequential = false;          // drives the data input of a sequential cell
  std::vector<FaultModel> models;   // in FaultModel order
  std::vector<FaultClass> class_members;

  bool has(FaultModel m) const;
  bool operator==(const FaultEntry&) const = default;
};

struct FaultSite {
  NetId net;
  std::string signal;
  bool sequential;
};

// Uncollapsed universe: both stuck-at faults and a bitflip on every site,
// plus a timing fault when `timing` is set.
struct FaultUniverse {
  std::vector<FaultSite> sites;
  bool timing = false;

  std::size_t raw_count() const { return 2 * sites.size(); }
};

struct FaultList {
  std::vector<FaultEntry> entries;
  std::size_t raw_count = 0;
  std::size_t collapsed_count = 0;

  // Number of signals faults were extracted from (the uncollapsed site count).
  std::size_t fault_set_size() const { return raw_count / 2; }
  std::vector<NetId> targets() const;
  const FaultEntry* find(std::string_view signal) const;
  // Maps a stuck-at fault on any class member to the entry and model that
  // represents it; other models resolve only on their own entry.
  std::optional<std::pair<std::size_t, FaultModel>> resolve(std::string_view signal, FaultModel model) const;

  bool operator==(const FaultList&) const = default;
};

// Sites in net id order. `scope` keeps only nets whose name starts with it;
// throws Error(Config) if nothing matches.
FaultUniverse extract_faults(const Netlist& n, std::optional<std::string_view> scope = std::nullopt,
                             bool timing = false);

// Structural equivalence collapsing across BUF/NOT/AND/NAND/OR/NOR when the
// input net has a single consumer. `observed` lists extra observation
// points (mid-circuit strobes) that count as consumers. Entries are kept
// only for signals with a surviving stuck-at fault; control channels are
// entry indices, matching insert_saboteurs over targets().
FaultList collapse(const FaultUniverse& universe, const Netlist& n, const std::vector<NetId>& observed = {});

// One record per line, fields signal/control/sequential/models/class_members.
std::string serialize_fault_list(const FaultList& list);

struct OracleBudget {
  std::size_t max_exhaustive_inputs = 16;
  std::size_t sequences = 64;        // random sequences for sequential designs
  std::size_t sequence_length = 24;
  std::uint64_t seed = 1;
  std::vector<NetId> observed;       // compared in addition to primary outputs
};

// Brute-force check that two single stuck-at faults yield the same output
// signature: every input pattern for combinational designs, seeded random
// sequences from power-on for sequential ones. Throws Error(Budget) if a
// combinational design has more inputs than the budget allows.
bool oracle_equivalent(const Netlist& n, const FaultRef& a, const FaultRef& b, const OracleBudget& budget = {});

}  // namespace gatefi
