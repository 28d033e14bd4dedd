#include "gatefi/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "gatefi/error.hpp"

namespace gatefi {

namespace {

using ordered_json = nlohmann::ordered_json;
using json = nlohmann::json;

constexpr std::string_view kTimingHeader = "label,wall_time_ns";
constexpr std::string_view kCampaignRow = "campaign";

ordered_json mismatch_json(const std::optional<Mismatch>& m) {
  if (!m) return nullptr;
  ordered_json j;
  j["cycle"] = m->cycle;
  j["strobe"] = m->strobe;
  return j;
}

std::string format_percent(double pct) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", pct);
  return buf;
}

std::string read_file(const std::string& path, const char* what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, std::string("cannot open ") + what + " '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write '" + path + "'");
  out << content;
  out.flush();
  if (!out) throw Error(ErrorKind::Io, "write to '" + path + "' failed");
}

// Splits into lines, dropping one trailing newline; CR before LF is ignored.
std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
  return lines;
}

// Strict accessors over one parsed record line.
class Fields {
 public:
  Fields(const json& node, std::size_t line) : node_(node), line_(line) {
    if (!node_.is_object()) fail("expected a JSON object");
  }

  [[noreturn]] void fail(const std::string& message) const { throw ParseError(line_, 0, message); }

  const json& at(const char* key) const {
    if (!node_.contains(key)) fail(std::string("missing field '") + key + "'");
    return node_.at(key);
  }

  std::string str(const char* key) const {
    const json& v = at(key);
    if (!v.is_string()) fail(std::string("field '") + key + "' must be a string");
    return v.get<std::string>();
  }

  std::uint64_t count(const char* key) const {
    const json& v = at(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
      fail(std::string("field '") + key + "' must be a non-negative integer");
    }
    return v.get<std::uint64_t>();
  }

  bool flag(const char* key) const {
    const json& v = at(key);
    if (!v.is_boolean()) fail(std::string("field '") + key + "' must be true or false");
    return v.get<bool>();
  }

  std::optional<Mismatch> mismatch(const char* key) const {
    const json& v = at(key);
    if (v.is_null()) return std::nullopt;
    const Fields m(v, line_);
    m.only({"cycle", "strobe"});
    return Mismatch{m.count("cycle"), m.str("strobe")};
  }

  // Rejects keys outside `allowed`.
  void only(std::initializer_list<std::string_view> allowed) const {
    for (const auto& item : node_.items()) {
      if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end()) {
        fail("unexpected field '" + item.key() + "'");
      }
    }
  }

  std::size_t line() const { return line_; }

 private:
  const json& node_;
  std::size_t line_;
};

json parse_line(std::string_view line, std::size_t number) {
  try {
    return json::parse(line);
  } catch (const json::parse_error& e) {
    throw ParseError(number, 0, std::string("malformed record: ") + e.what());
  }
}

SimulationRecord parse_simulation(const Fields& f) {
  f.only({"record", "label", "schedule", "verdict", "first_functional_mismatch", "first_checker_mismatch",
          "initial_state_digest"});
  SimulationRecord rec;
  rec.label = f.str("label");
  rec.schedule.label = rec.label;
  const json& schedule = f.at("schedule");
  if (!schedule.is_array()) f.fail("field 'schedule' must be a list");
  for (const json& item : schedule) {
    const Fields e(item, f.line());
    e.only({"signal", "channel", "model", "inject", "release"});
    const std::string model_text = e.str("model");
    const auto model = parse_fault_model(model_text);
    if (!model) f.fail("unknown fault model '" + model_text + "'");
    const std::uint64_t channel = e.count("channel");
    if (channel > UINT32_MAX) f.fail("channel out of range");
    rec.schedule.entries.push_back(
        {static_cast<ChannelId>(channel), e.str("signal"), *model, e.count("inject"), e.count("release")});
  }
  const std::string verdict_text = f.str("verdict");
  const auto verdict = parse_verdict(verdict_text);
  if (!verdict) f.fail("unknown verdict '" + verdict_text + "'");
  rec.classification.verdict = *verdict;
  rec.classification.first_functional_mismatch = f.mismatch("first_functional_mismatch");
  rec.classification.first_checker_mismatch = f.mismatch("first_checker_mismatch");
  if (is_failure(*verdict) != rec.classification.first_functional_mismatch.has_value() ||
      is_detected(*verdict) != rec.classification.first_checker_mismatch.has_value()) {
    f.fail("verdict " + verdict_text + " disagrees with its mismatch fields");
  }
  rec.initial_state_digest = f.count("initial_state_digest");
  return rec;
}

}  // namespace

double round_percent(std::uint64_t part, std::uint64_t whole) {
  if (whole == 0) return 0.0;
  const double tenths = std::round(1000.0 * static_cast<double>(part) / static_cast<double>(whole));
  return tenths / 10.0;
}

std::string format_runtime(std::chrono::nanoseconds runtime) {
  const auto minutes = std::chrono::duration_cast<std::chrono::minutes>(runtime).count();
  char buf[32];
  std::snprintf(buf, sizeof buf, "%lld:%02lld", static_cast<long long>(minutes / 60),
                static_cast<long long>(minutes % 60));
  return buf;
}

SummaryRow summarize(const CampaignResult& result, std::string_view scope_label) {
  const CampaignTotals& t = result.totals;
  if (t.total_simulations == 0) throw Error(ErrorKind::Simulation, "cannot summarize a campaign with no simulations");
  if (t.fail_count + t.safe_count + t.detected_count != t.total_simulations) {
    throw Error(ErrorKind::Simulation, "campaign totals do not add up to the simulation count");
  }
  SummaryRow row;
  row.component = std::string(scope_label);
  row.fault_set = t.fault_set_size;
  row.total_simulations = t.total_simulations;
  row.fail_pct = round_percent(t.fail_count, t.total_simulations);
  row.safe_pct = round_percent(t.safe_count, t.total_simulations);
  row.detected_pct = round_percent(t.detected_count, t.total_simulations);
  row.runtime = format_runtime(t.runtime);
  return row;
}

std::string format_summary(const std::optional<SummaryRow>& row) {
  std::string out(kSummaryHeader);
  out += '\n';
  if (row) {
    out += row->component + ',' + std::to_string(row->fault_set) + ',' + std::to_string(row->total_simulations) +
           ',' + format_percent(row->fail_pct) + ',' + format_percent(row->safe_pct) + ',' +
           format_percent(row->detected_pct) + ',' + row->runtime + '\n';
  }
  return out;
}

std::string summary_text(const CampaignResult& result) {
  if (result.totals.total_simulations == 0) return format_summary(std::nullopt);
  return format_summary(summarize(result, result.info.component));
}

std::string emit_records(const CampaignResult& result) {
  std::string out;
  ordered_json header;
  header["record"] = "campaign";
  header["component"] = result.info.component;
  header["fault_set"] = result.totals.fault_set_size;
  header["timing_fault_active"] = result.info.timing_fault_active;
  header["equivalence"] = result.info.equivalence_verified ? EquivalenceVerdict::kMethod : "unverified";
  header["set_duration_cycles"] = 1;
  out += header.dump();
  out += '\n';

  for (const SimulationRecord& rec : result.records) {
    ordered_json j;
    j["record"] = "simulation";
    j["label"] = rec.label;
    j["schedule"] = ordered_json::array();
    for (const ScheduleEntry& e : rec.schedule.entries) {
      ordered_json entry;
      entry["signal"] = e.signal;
      entry["channel"] = e.channel;
      entry["model"] = std::string(to_string(e.model));
      entry["inject"] = e.inject_cycle;
      entry["release"] = e.release_cycle;
      j["schedule"].push_back(std::move(entry));
    }
    j["verdict"] = std::string(to_string(rec.classification.verdict));
    j["first_functional_mismatch"] = mismatch_json(rec.classification.first_functional_mismatch);
    j["first_checker_mismatch"] = mismatch_json(rec.classification.first_checker_mismatch);
    j["initial_state_digest"] = rec.initial_state_digest;
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::string emit_timing(const CampaignResult& result) {
  std::string out(kTimingHeader);
  out += '\n';
  for (const SimulationRecord& rec : result.records) {
    out += rec.label + ',' + std::to_string(rec.wall_time.count()) + '\n';
  }
  out += std::string(kCampaignRow) + ',' + std::to_string(result.totals.runtime.count()) + '\n';
  return out;
}

CampaignResult parse_records(std::string_view text) {
  CampaignResult result;
  const auto lines = split_lines(text);
  bool have_header = false;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t number = i + 1;
    if (lines[i].empty()) throw ParseError(number, 0, "empty line in record file");
    const json node = parse_line(lines[i], number);
    const Fields f(node, number);
    const std::string kind = f.str("record");
    if (kind == "campaign") {
      if (have_header) f.fail("second campaign header");
      have_header = true;
      f.only({"record", "component", "fault_set", "timing_fault_active", "equivalence", "set_duration_cycles"});
      if (f.count("set_duration_cycles") != 1) f.fail("unsupported SET duration");
      result.info.component = f.str("component");
      result.totals.fault_set_size = f.count("fault_set");
      result.info.timing_fault_active = f.flag("timing_fault_active");
      const std::string equivalence = f.str("equivalence");
      if (equivalence != EquivalenceVerdict::kMethod && equivalence != "unverified") {
        f.fail("unknown equivalence stamp '" + equivalence + "'");
      }
      result.info.equivalence_verified = equivalence == EquivalenceVerdict::kMethod;
    } else if (kind == "simulation") {
      if (!have_header) f.fail("simulation record before the campaign header");
      result.records.push_back(parse_simulation(f));
    } else {
      f.fail("unknown record kind '" + kind + "'");
    }
  }
  result.totals = tally(result.records, result.totals.fault_set_size);
  return result;
}

void apply_timing(std::string_view text, CampaignResult& result) {
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < result.records.size(); ++i) index.emplace(result.records[i].label, i);

  const auto lines = split_lines(text);
  if (lines.empty() || lines[0] != kTimingHeader) throw ParseError(1, 0, "timing table must start with its header");
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::string_view line = lines[i];
    const auto comma = line.rfind(',');
    if (comma == std::string_view::npos) throw ParseError(i + 1, 0, "expected label,wall_time_ns");
    const std::string label(line.substr(0, comma));
    const std::string number(line.substr(comma + 1));
    std::int64_t ns = 0;
    try {
      std::size_t used = 0;
      ns = std::stoll(number, &used);
      if (used != number.size() || ns < 0) throw std::invalid_argument(number);
    } catch (const std::exception&) {
      throw ParseError(i + 1, comma + 2, "bad nanosecond count '" + number + "'");
    }
    if (label == kCampaignRow) {
      result.totals.runtime = std::chrono::nanoseconds(ns);
      continue;
    }
    const auto it = index.find(label);
    if (it == index.end()) throw ParseError(i + 1, 1, "timing row for unknown simulation '" + label + "'");
    result.records[it->second].wall_time = std::chrono::nanoseconds(ns);
  }
}

std::string timing_path_for(const std::string& records_path) {
  std::filesystem::path p(records_path);
  p.replace_extension(".timing.csv");
  return p.string();
}

ArtifactPaths write_campaign_artifacts(const CampaignResult& result, const std::string& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create output directory '" + out_dir + "': " + ec.message());
  const std::filesystem::path dir(out_dir);
  ArtifactPaths paths{(dir / "records.fir").string(), "", (dir / "summary.csv").string()};
  paths.timing = timing_path_for(paths.records);
  write_file(paths.records, emit_records(result));
  write_file(paths.timing, emit_timing(result));
  write_file(paths.summary, summary_text(result));
  return paths;
}

CampaignResult load_records(const std::string& records_path) {
  CampaignResult result = parse_records(read_file(records_path, "record file"));
  const std::string timing = timing_path_for(records_path);
  if (std::filesystem::exists(timing)) apply_timing(read_file(timing, "timing table"), result);
  return result;
}

}  // namespace gatefi
