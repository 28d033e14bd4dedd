#include "gatefi/faultlist.hpp"

#include <algorithm>

#include <json.hpp>

#include "gatefi/error.hpp"

namespace gatefi {

bool FaultEntry::has(FaultModel m) const { return std::find(models.begin(), models.end(), m) != models.end(); }

std::vector<NetId> FaultList::targets() const {
  std::vector<NetId> nets;
  nets.reserve(entries.size());
  for (const auto& e : entries) nets.push_back(e.net);
  return nets;
}

const FaultEntry* FaultList::find(std::string_view signal) const {
  for (const auto& e : entries)
    if (e.signal == signal) return &e;
  return nullptr;
}

std::optional<std::pair<std::size_t, FaultModel>> FaultList::resolve(std::string_view signal, FaultModel model) const {
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const FaultEntry& e = entries[i];
    if (!is_stuck_at(model)) {
      if (e.signal == signal && e.has(model)) return std::pair{i, model};
      continue;
    }
    for (const FaultClass& cls : e.class_members) {
      for (const FaultRef& m : cls.members)
        if (m.signal == signal && m.model == model) return std::pair{i, cls.model};
    }
  }
  return std::nullopt;
}

FaultUniverse extract_faults(const Netlist& n, std::optional<std::string_view> scope, bool timing) {
  std::vector<std::uint8_t> sequential(n.net_count(), 0);
  for (const SeqCell& c : n.cells) sequential[c.data] = 1;

  FaultUniverse u;
  u.timing = timing;
  for (NetId id = 0; id < n.net_count(); ++id) {
    const std::string& name = n.net_name(id);
    if (scope && name.compare(0, scope->size(), *scope) != 0) continue;
    u.sites.push_back({id, name, sequential[id] != 0});
  }
  if (u.sites.empty()) {
    throw Error(ErrorKind::Config, "fault scope '" + std::string(scope.value_or("")) + "' matches no net of '" +
                                       n.name + "'");
  }
  return u;
}

FaultList collapse(const FaultUniverse& universe, const Netlist& n, const std::vector<NetId>& observed) {
  const std::size_t site_count = universe.sites.size();
  std::vector<std::int64_t> site_of_net(n.net_count(), -1);
  for (std::size_t i = 0; i < site_count; ++i) site_of_net[universe.sites[i].net] = static_cast<std::int64_t>(i);

  auto fanout = fanout_counts(n);
  for (NetId id : observed)
    if (id < fanout.size()) ++fanout[id];

  // Fault index: 2 * site + polarity. next[f] is the equivalent fault one
  // gate closer to the outputs.
  std::vector<std::int64_t> next(2 * site_count, -1);
  auto link = [&](NetId from, int from_pol, NetId to, int to_pol) {
    next[2 * site_of_net[from] + from_pol] = 2 * site_of_net[to] + to_pol;
  };
  for (const Gate& g : n.gates) {
    if (site_of_net[g.output] < 0) continue;
    for (NetId in : g.inputs) {
      if (site_of_net[in] < 0 || fanout[in] != 1) continue;
      switch (g.kind) {
        case GateKind::And: link(in, 0, g.output, 0); break;
        case GateKind::Nand: link(in, 0, g.output, 1); break;
        case GateKind::Or: link(in, 1, g.output, 1); break;
        case GateKind::Nor: link(in, 1, g.output, 0); break;
        case GateKind::Not:
          link(in, 0, g.output, 1);
          link(in, 1, g.output, 0);
          break;
        case GateKind::Buf:
          link(in, 0, g.output, 0);
          link(in, 1, g.output, 1);
          break;
        default: break;  // XOR, XNOR, MUX2 and constants merge nothing
      }
    }
  }

  std::vector<std::size_t> rep(2 * site_count);
  for (std::size_t f = 0; f < rep.size(); ++f) {
    std::size_t r = f;
    while (next[r] >= 0) r = static_cast<std::size_t>(next[r]);
    rep[f] = r;
  }

  auto polarity_model = [](std::size_t f) { return f % 2 == 0 ? FaultModel::StuckAt0 : FaultModel::StuckAt1; };
  std::vector<std::vector<std::size_t>> members_of(rep.size());
  for (std::size_t m = 0; m < rep.size(); ++m) members_of[rep[m]].push_back(m);

  FaultList list;
  list.raw_count = universe.raw_count();
  for (std::size_t s = 0; s < site_count; ++s) {
    const FaultSite& site = universe.sites[s];
    FaultEntry entry{site.signal, site.net, static_cast<ChannelId>(list.entries.size()), site.sequential, {}, {}};
    for (std::size_t pol = 0; pol < 2; ++pol) {
      const std::size_t f = 2 * s + pol;
      if (rep[f] != f) continue;
      FaultClass cls{polarity_model(f), {}};
      for (std::size_t m : members_of[f]) cls.members.push_back({universe.sites[m / 2].signal, polarity_model(m)});
      entry.models.push_back(cls.model);
      entry.class_members.push_back(std::move(cls));
    }
    if (entry.models.empty()) continue;
    entry.models.push_back(FaultModel::Bitflip);
    if (universe.timing) entry.models.push_back(FaultModel::Timing);
    list.collapsed_count += entry.class_members.size();
    list.entries.push_back(std::move(entry));
  }
  return list;
}

std::string serialize_fault_list(const FaultList& list) {
  std::string out;
  for (const FaultEntry& e : list.entries) {
    nlohmann::ordered_json record;
    record["signal"] = e.signal;
    record["control"] = e.control;
    record["sequential"] = e.sequential;
    record["models"] = nlohmann::ordered_json::array();
    for (FaultModel m : e.models) record["models"].push_back(std::string(to_string(m)));
    record["class_members"] = nlohmann::ordered_json::object();
    for (const FaultClass& cls : e.class_members) {
      auto& members = record["class_members"][std::string(to_string(cls.model))];
      members = nlohmann::ordered_json::array();
      for (const FaultRef& m : cls.members) members.push_back({m.signal, std::string(to_string(m.model))});
    }
    out += record.dump();
    out += '\n';
  }
  return out;
}

}  // namespace gatefi
