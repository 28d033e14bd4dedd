#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "gatefi/campaign.hpp"
#include "gatefi/error.hpp"

namespace gatefi {

namespace {

using json = nlohmann::json;

[[noreturn]] void config_error(const std::string& path, const std::string& message) {
  throw Error(ErrorKind::Config, (path.empty() ? std::string{} : path + ": ") + message);
}

// Typed, strict view of one JSON object: every key must be consumed.
class Section {
 public:
  Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) config_error(path_, "expected an object");
  }

  // Call once every known key has been read.
  void done() const {
    for (const auto& [key, value] : node_.items()) {
      if (!used_.count(key)) config_error(path_, "unknown key '" + key + "'");
    }
  }

  bool has(const std::string& key) const { return node_.contains(key); }

  const json& raw(const std::string& key) {
    used_.insert(key);
    if (!node_.contains(key)) config_error(path_, "missing key '" + key + "'");
    return node_.at(key);
  }

  std::string str(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_string()) config_error(child(key), "expected a string");
    return v.get<std::string>();
  }

  std::uint64_t count(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
      config_error(child(key), "expected a non-negative integer");
    }
    return v.get<std::uint64_t>();
  }

  std::int64_t integer(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_number_integer()) config_error(child(key), "expected an integer");
    return v.get<std::int64_t>();
  }

  std::uint64_t count_or(const std::string& key, std::uint64_t fallback) {
    return has(key) ? count(key) : fallback;
  }

  bool flag(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_boolean()) config_error(child(key), "expected true or false");
    return v.get<bool>();
  }

  std::string child(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

 private:
  const json& node_;
  std::string path_;
  std::set<std::string> used_;
};

FaultModel fault_model_of(Section& s, const std::string& key) {
  const std::string text = s.str(key);
  if (auto m = parse_fault_model(text)) return *m;
  config_error(s.child(key), "unknown fault model '" + text + "'");
}

SfiConfig read_sfi(const json& node) {
  Section s(node, "sfi");
  SfiConfig cfg;
  cfg.sim_total = s.count("sim_total");
  cfg.fault_per_sim = s.count_or("fault_per_sim", 1);
  cfg.seu_only = s.flag("seu_only", false);
  cfg.timing_only = s.flag("timing_only", false);
  cfg.seed = s.count_or("seed", 0);
  s.done();
  return cfg;
}

std::vector<DfiConfig> read_dfi(const json& node) {
  if (!node.is_array()) config_error("dfi", "expected a list");
  std::vector<DfiConfig> out;
  for (std::size_t i = 0; i < node.size(); ++i) {
    Section s(node[i], "dfi[" + std::to_string(i) + "]");
    DfiConfig cfg;
    cfg.id = s.integer("id");
    cfg.fault_model = fault_model_of(s, "fault_model");
    cfg.signal = s.str("signal");
    cfg.inject_cycle = s.count("inject_cycle");
    cfg.release_cycle = s.count("release_cycle");
    s.done();
    out.push_back(std::move(cfg));
  }
  return out;
}

AnalyzerConfig read_analyzer(const json& node) {
  Section s(node, "analyzer");
  const json& groups = s.raw("groups");
  if (!groups.is_array()) config_error("analyzer.groups", "expected a list");
  AnalyzerConfig analyzer;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const std::string gpath = "analyzer.groups[" + std::to_string(g) + "]";
    Section gs(groups[g], gpath);
    StrobeGroup group;
    group.name = gs.str("name");
    const json& strobes = gs.raw("strobes");
    if (!strobes.is_array()) config_error(gpath + ".strobes", "expected a list");
    for (std::size_t k = 0; k < strobes.size(); ++k) {
      Section ss(strobes[k], gpath + ".strobes[" + std::to_string(k) + "]");
      Strobe strobe;
      strobe.signal = ss.str("signal");
      strobe.active = ss.flag("active", true);
      const std::string type = ss.has("strobe_type") ? ss.str("strobe_type") : "FUNCTIONAL";
      if (type == "FUNCTIONAL") {
        strobe.type = StrobeType::Functional;
      } else if (type == "CHECKER") {
        strobe.type = StrobeType::Checker;
      } else {
        config_error(ss.child("strobe_type"), "expected FUNCTIONAL or CHECKER, got '" + type + "'");
      }
      ss.done();
      group.strobes.push_back(std::move(strobe));
    }
    gs.done();
    analyzer.groups.push_back(std::move(group));
  }
  s.done();
  return analyzer;
}

}  // namespace

CampaignConfig parse_campaign_config(std::string_view text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Config, std::string("campaign file is not valid JSON: ") + e.what());
  }

  CampaignConfig config;
  {
    Section top(root, "");
    {
      Section c(top.raw("controller"), "controller");
      config.controller.top_module = c.str("top_module");
      config.controller.sim_time = c.count("sim_time");
      config.controller.timing_fault_active = c.flag("timing_fault_active", false);
      c.done();
    }
    if (top.has("sfi")) config.controller.sfi = read_sfi(top.raw("sfi"));
    if (top.has("dfi")) config.controller.dfi = read_dfi(top.raw("dfi"));
    if (top.has("efi")) {
      Section e(top.raw("efi"), "efi");
      config.controller.efi = EfiConfig{e.count("injection_time"), e.count("release_time")};
      e.done();
    }
    config.analyzer = read_analyzer(top.raw("analyzer"));
    config.stimulus = top.str("stimulus");
    if (top.has("fault_scope")) config.fault_scope = top.str("fault_scope");
    top.done();
  }
  validate_config(config);
  return config;
}

CampaignConfig load_campaign_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open campaign config '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  CampaignConfig config = parse_campaign_config(buffer.str());
  if (!parse_random_spec(config.stimulus)) {
    const std::filesystem::path stim(config.stimulus);
    if (stim.is_relative()) {
      config.stimulus = (std::filesystem::path(path).parent_path() / stim).lexically_normal().string();
    }
  }
  return config;
}

void validate_config(const CampaignConfig& config) {
  const SimulationController& c = config.controller;
  if (c.top_module.empty()) config_error("controller.top_module", "must not be empty");
  if (c.sim_time == 0) config_error("controller.sim_time", "must be at least 1 cycle");
  if (!c.sfi && !c.dfi && !c.efi) config_error("controller", "at least one of sfi, dfi, efi is required");

  if (c.sfi) {
    if (c.sfi->sim_total == 0) config_error("sfi.sim_total", "must be at least 1");
    if (c.sfi->fault_per_sim == 0) config_error("sfi.fault_per_sim", "must be at least 1");
    if (c.sfi->seu_only && c.sfi->timing_only) config_error("sfi", "seu_only and timing_only are exclusive");
    if (c.sfi->timing_only && !c.timing_fault_active) {
      config_error("sfi.timing_only", "requires controller.timing_fault_active");
    }
  }
  if (c.dfi) {
    for (std::size_t i = 0; i < c.dfi->size(); ++i) {
      const DfiConfig& d = (*c.dfi)[i];
      const std::string path = "dfi[" + std::to_string(i) + "]";
      if (d.inject_cycle >= d.release_cycle || d.release_cycle > c.sim_time) {
        config_error(path, "needs inject_cycle < release_cycle <= sim_time");
      }
      if (d.fault_model == FaultModel::Timing && !c.timing_fault_active) {
        config_error(path, "TIMING faults require controller.timing_fault_active");
      }
    }
  }
  if (c.efi && (c.efi->injection_time >= c.efi->release_time || c.efi->release_time > c.sim_time)) {
    config_error("efi", "needs injection_time < release_time <= sim_time");
  }

  bool functional = false;
  for (const Strobe& s : config.analyzer.strobes()) functional |= s.active && s.type == StrobeType::Functional;
  if (!functional) config_error("analyzer", "needs at least one active FUNCTIONAL strobe");
  if (config.stimulus.empty()) config_error("stimulus", "must name a file or random(<seed>)");
}

}  // namespace gatefi
