#include "gatefi/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <optional>

#include <CLI11.hpp>

#include "gatefi/campaign.hpp"
#include "gatefi/error.hpp"
#include "gatefi/faultlist.hpp"
#include "gatefi/netlist.hpp"
#include "gatefi/report.hpp"
#include "gatefi/stimulus.hpp"
#include "gatefi/transform.hpp"

namespace gatefi {

namespace {

// A failure tagged with the pipeline stage it happened in.
class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, const std::exception& cause, int code)
      : std::runtime_error(cause.what()), stage_(std::move(stage)), code_(code) {}
  const std::string& stage() const { return stage_; }
  int code() const { return code_; }

 private:
  std::string stage_;
  int code_;
};

int code_for(const Error& e) { return e.kind() == ErrorKind::Io ? kExitIo : kExitDomain; }

template <typename F>
auto stage(const std::string& name, F&& body) -> decltype(body()) {
  try {
    return body();
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(name, e, code_for(e));
  } catch (const std::exception& e) {
    throw StageError(name, e, kExitDomain);
  }
}

struct Options {
  std::string netlist;
  std::string config;
  std::string stimulus;
  std::string out;
  std::string records;
  std::string scope;
  std::optional<std::uint64_t> seed;
  unsigned workers = 1;
  bool skip_equiv = false;
  bool timing = false;
  bool verbose = false;
};

void write_text(const std::string& path, const std::string& text) {
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw Error(ErrorKind::Io, "cannot write '" + path + "'");
  file << text;
  file.flush();
  if (!file) throw Error(ErrorKind::Io, "write to '" + path + "' failed");
}

Netlist read_netlist(const Options& o) {
  return stage("parse", [&] { return load_netlist(o.netlist); });
}

std::optional<std::string_view> scope_of(const Options& o) {
  if (o.scope.empty()) return std::nullopt;
  return std::string_view(o.scope);
}

int cmd_check(const Options& o, std::ostream& out) {
  const Netlist n = read_netlist(o);
  const ValidationReport report = validate(n);
  if (!report.empty()) {
    for (const Violation& v : report.violations) out << to_string(v.kind) << ": " << v.message << '\n';
    out << n.name << ": " << report.violations.size() << " violation(s)\n";
    return kExitDomain;
  }
  out << n.name << ": ok, " << n.net_count() << " nets, " << n.inputs.size() << " inputs, " << n.outputs.size()
      << " outputs, " << n.gates.size() << " gates, " << n.cells.size() << " cells\n";
  return kExitOk;
}

struct Collapsed {
  Netlist original;
  Netlist transformed;
  FaultList faults;
};

Collapsed collapse_netlist(const Options& o) {
  Collapsed c{read_netlist(o), {}, {}};
  stage("validate", [&] {
    const ValidationReport report = validate(c.original);
    if (!report.empty()) throw Error(ErrorKind::Netlist, report.violations.front().message);
    return 0;
  });
  c.transformed = stage("transform", [&] { return replace_enabled_cells(c.original); });
  c.faults = stage("collapse", [&] { return collapse(extract_faults(c.transformed, scope_of(o), o.timing), c.transformed); });
  return c;
}

int cmd_collapse(const Options& o, std::ostream& out) {
  const Collapsed c = collapse_netlist(o);
  const std::string text = serialize_fault_list(c.faults);
  if (o.out.empty()) {
    out << text;
  } else {
    stage("write", [&] {
      write_text(o.out, text);
      return 0;
    });
  }
  out << c.faults.raw_count << " raw, " << c.faults.collapsed_count << " collapsed\n";
  return kExitOk;
}

int cmd_instrument(const Options& o, std::ostream& out, std::ostream& err) {
  const Collapsed c = collapse_netlist(o);
  const InstrumentedNetlist design =
      stage("instrument", [&] { return insert_saboteurs(c.transformed, c.faults.targets(), o.timing); });
  if (!o.skip_equiv) {
    const EquivalenceVerdict verdict = stage("equivalence", [&] {
      return check_equivalence(c.original, design, Stimulus::random(o.seed.value_or(0), c.original.inputs.size()),
                               1000);
    });
    if (!verdict.equivalent) {
      const Divergence& d = *verdict.first_divergence;
      err << "error [equivalence]: instrumented design diverges at cycle " << d.cycle << " on output '" << d.output
          << "'\n";
      return kExitDomain;
    }
  }
  const Netlist expanded = expand_saboteurs(design);
  const std::string text = print_netlist(expanded);
  if (o.out.empty()) {
    out << text;
  } else {
    stage("write", [&] {
      write_text(o.out, text);
      return 0;
    });
    out << design.saboteurs.size() << " saboteurs, " << expanded.inputs.size() - c.original.inputs.size()
        << " control inputs, equivalence "
        << (o.skip_equiv ? "unverified" : EquivalenceVerdict::kMethod) << '\n';
  }
  return kExitOk;
}

int cmd_run(const Options& o, std::ostream& out, std::ostream& err) {
  const Netlist original = read_netlist(o);
  CampaignConfig config = stage("config", [&] { return load_campaign_config(o.config); });
  if (!o.stimulus.empty()) config.stimulus = o.stimulus;
  if (!o.scope.empty()) config.fault_scope = o.scope;
  if (o.seed) {
    if (!config.controller.sfi) {
      err << "error [usage]: --seed applies only to campaigns with an sfi section\n";
      return kExitIo;
    }
    config.controller.sfi->seed = *o.seed;
  }

  const Stimulus stimulus = stage("stimulus", [&] {
    if (auto seed = parse_random_spec(config.stimulus)) return Stimulus::random(*seed, original.inputs.size());
    Stimulus s = load_stimulus(config.stimulus, original);
    if (*s.length() < config.controller.sim_time) {
      throw Error(ErrorKind::Config, "stimulus has " + std::to_string(*s.length()) + " cycles but sim_time is " +
                                         std::to_string(config.controller.sim_time));
    }
    return s;
  });

  const PreparedCampaign prepared = stage("prepare", [&] { return prepare_campaign(original, config, !o.skip_equiv); });
  if (prepared.equivalence && !prepared.equivalence->equivalent) {
    const Divergence& d = *prepared.equivalence->first_divergence;
    err << "error [equivalence]: instrumented design diverges at cycle " << d.cycle << " on output '" << d.output
        << "'\n";
    return kExitDomain;
  }
  if (o.verbose) {
    err << "faults: " << prepared.fault_list.raw_count << " raw, " << prepared.fault_list.collapsed_count
        << " collapsed, " << prepared.design.saboteurs.size() << " saboteurs\n";
    err << "equivalence: "
        << (prepared.equivalence ? std::to_string(prepared.equivalence->vectors_checked) + " cycles by simulation"
                                 : std::string("skipped"))
        << '\n';
  }

  CampaignResult result = stage("campaign", [&] {
    return run_campaign(config.controller, config.analyzer, prepared.design, prepared.fault_list, stimulus,
                        RunOptions{o.workers});
  });
  result.info.component = config.fault_scope.value_or(config.controller.top_module);
  result.info.equivalence_verified = prepared.equivalence.has_value();

  const ArtifactPaths paths = stage("report", [&] { return write_campaign_artifacts(result, o.out); });
  if (o.verbose) err << "wrote " << paths.records << ", " << paths.timing << ", " << paths.summary << '\n';
  out << summary_text(result);
  return kExitOk;
}

int cmd_report(const Options& o, std::ostream& out, std::ostream& err) {
  const CampaignResult result = stage("report", [&] { return load_records(o.records); });
  if (o.verbose) {
    err << result.records.size() << " records, equivalence "
        << (result.info.equivalence_verified ? EquivalenceVerdict::kMethod : "unverified") << '\n';
  }
  out << summary_text(result);
  return kExitOk;
}

unsigned default_workers() {
  const char* env = std::getenv("GATEFI_WORKERS");
  if (!env || !*env) return 1;
  char* end = nullptr;
  const unsigned long value = std::strtoul(env, &end, 10);
  if (*end != '\0' || value == 0 || value > 1024) {
    throw CLI::ValidationError("GATEFI_WORKERS", std::string("expected a worker count, got '") + env + "'");
  }
  return static_cast<unsigned>(value);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Gate-level fault injection: instrument netlists, collapse faults, run and report campaigns",
               "gatefi"};
  app.require_subcommand(1);

  auto add_netlist = [&](CLI::App* sub) {
    sub->add_option("--netlist,netlist", o.netlist, "Netlist file")->required();
  };
  auto add_scope = [&](CLI::App* sub) {
    sub->add_option("--scope", o.scope, "Keep only signals whose name starts with this prefix");
  };

  CLI::App* check = app.add_subcommand("check", "Parse and validate a netlist");
  add_netlist(check);

  CLI::App* instrument = app.add_subcommand("instrument", "Write the netlist with saboteurs as plain gates");
  add_netlist(instrument);
  add_scope(instrument);
  instrument->add_option("--out", o.out, "Output netlist file (default: standard output)");
  instrument->add_flag("--timing", o.timing, "Give every saboteur a delay register");
  instrument->add_option("--seed", o.seed, "Seed of the equivalence self-check stimulus");
  instrument->add_flag("--skip-equiv", o.skip_equiv, "Skip the equivalence self-check");

  CLI::App* collapse_cmd = app.add_subcommand("collapse", "Extract and collapse the fault list");
  add_netlist(collapse_cmd);
  add_scope(collapse_cmd);
  collapse_cmd->add_option("--out", o.out, "Fault list file (default: standard output)");
  collapse_cmd->add_flag("--timing", o.timing, "Include TIMING faults");

  CLI::App* run = app.add_subcommand("run", "Run a fault injection campaign");
  add_netlist(run);
  add_scope(run);
  run->add_option("--config", o.config, "Campaign configuration (JSON)")->required();
  run->add_option("--stimulus", o.stimulus, "Stimulus file or random(<seed>), overriding the configuration");
  run->add_option("--out", o.out, "Output directory for records and summary")->required();
  CLI::Option* workers = run->add_option("--workers", o.workers, "Parallel simulation workers")
                             ->check(CLI::Range(1u, 1024u));
  run->add_option("--seed", o.seed, "Override the SFI seed");
  run->add_flag("--skip-equiv", o.skip_equiv, "Skip the equivalence self-check and stamp results unverified");
  run->add_flag("--verbose", o.verbose, "Report progress on standard error");

  CLI::App* report = app.add_subcommand("report", "Print the summary of a record file");
  report->add_option("--records,records", o.records, "Record file (.fir)")->required();
  report->add_flag("--verbose", o.verbose, "Report record details on standard error");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
    if (run->parsed() && workers->count() == 0) o.workers = default_workers();
  } catch (const CLI::Error& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitIo;
  }

  try {
    if (check->parsed()) return cmd_check(o, out);
    if (instrument->parsed()) return cmd_instrument(o, out, err);
    if (collapse_cmd->parsed()) return cmd_collapse(o, out);
    if (run->parsed()) return cmd_run(o, out, err);
    return cmd_report(o, out, err);
  } catch (const StageError& e) {
    err << "error [" << e.stage() << "]: " << e.what() << '\n';
    return e.code();
  }
}

}  // namespace gatefi
