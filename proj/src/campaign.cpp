#include "gatefi/campaign.hpp"

#include <atomic>
#include <cstdio>
#include <mutex>
#include <thread>

#include "gatefi/error.hpp"
#include "gatefi/rng.hpp"

namespace gatefi {

namespace {

using Clock = std::chrono::steady_clock;

std::string make_label(const char* prefix, std::uint64_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s-%06llu", prefix, static_cast<unsigned long long>(index));
  return buf;
}

ScheduleEntry entry_for(const FaultEntry& e, FaultModel model, std::uint64_t inject, std::uint64_t release) {
  return {e.control, e.signal, model, inject, release};
}

}  // namespace

std::vector<std::pair<std::size_t, FaultModel>> sfi_pool(const FaultList& fl, const SfiConfig& cfg,
                                                         bool timing_fault_active) {
  std::vector<std::pair<std::size_t, FaultModel>> pool;
  for (std::size_t i = 0; i < fl.entries.size(); ++i) {
    const FaultEntry& e = fl.entries[i];
    if (cfg.seu_only) {
      if (e.sequential && e.has(FaultModel::Bitflip)) pool.emplace_back(i, FaultModel::Bitflip);
    } else if (cfg.timing_only) {
      if (e.has(FaultModel::Timing)) pool.emplace_back(i, FaultModel::Timing);
    } else {
      for (FaultModel m : e.models) {
        if (m == FaultModel::Timing && !timing_fault_active) continue;
        pool.emplace_back(i, m);
      }
    }
  }
  return pool;
}

std::vector<FaultSchedule> build_schedules_sfi(const FaultList& fl, const SfiConfig& cfg, std::uint64_t sim_time,
                                               bool timing_fault_active) {
  const auto pool = sfi_pool(fl, cfg, timing_fault_active);
  if (pool.empty()) {
    throw Error(ErrorKind::Schedule, std::string("SFI eligible pool is empty") +
                                         (cfg.seu_only     ? " (no sequential signals for SEU injection)"
                                          : cfg.timing_only ? " (no TIMING faults in the fault list)"
                                                            : ""));
  }
  if (sim_time == 0) throw Error(ErrorKind::Schedule, "SFI needs sim_time >= 1");

  const CounterRng rng(cfg.seed);
  std::vector<FaultSchedule> schedules;
  schedules.reserve(cfg.sim_total);
  for (std::uint64_t i = 0; i < cfg.sim_total; ++i) {
    FaultSchedule s{make_label("sfi", i), {}};
    for (std::uint64_t k = 0; k < cfg.fault_per_sim; ++k) {
      const auto& [entry, model] = pool[rng.uniform(i, 3 * k, pool.size())];
      const std::uint64_t inject = rng.uniform(i, 3 * k + 1, sim_time);
      std::uint64_t release = sim_time;
      if (model == FaultModel::Bitflip) {
        release = inject + 1;
      } else if (model == FaultModel::Timing) {
        release = inject + 1 + rng.uniform(i, 3 * k + 2, sim_time - inject);
      }
      s.entries.push_back(entry_for(fl.entries[entry], model, inject, release));
    }
    schedules.push_back(std::move(s));
  }
  return schedules;
}

std::vector<FaultSchedule> build_schedules_efi(const FaultList& fl, const EfiConfig& cfg) {
  std::vector<FaultSchedule> schedules;
  for (const FaultEntry& e : fl.entries) {
    for (FaultModel m : {FaultModel::StuckAt0, FaultModel::StuckAt1}) {
      if (!e.has(m)) continue;
      schedules.push_back({make_label("efi", schedules.size()),
                           {entry_for(e, m, cfg.injection_time, cfg.release_time)}});
    }
  }
  return schedules;
}

std::vector<FaultSchedule> build_schedules_dfi(const FaultList& fl, const std::vector<DfiConfig>& cfgs,
                                               bool timing_fault_active) {
  std::vector<std::int64_t> ids;
  std::vector<FaultSchedule> schedules;
  for (const DfiConfig& d : cfgs) {
    if (d.fault_model == FaultModel::Timing && !timing_fault_active) {
      throw Error(ErrorKind::Schedule, "DFI id " + std::to_string(d.id) + ": TIMING fault on '" + d.signal +
                                           "' but timing faults are not active");
    }
    const auto target = fl.resolve(d.signal, d.fault_model);
    if (!target) {
      throw Error(ErrorKind::Schedule, "DFI id " + std::to_string(d.id) + ": signal '" + d.signal +
                                           "' has no " + std::string(to_string(d.fault_model)) +
                                           " fault in the fault list");
    }
    std::size_t slot = 0;
    while (slot < ids.size() && ids[slot] != d.id) ++slot;
    if (slot == ids.size()) {
      ids.push_back(d.id);
      schedules.push_back({"dfi-" + std::to_string(d.id), {}});
    }
    schedules[slot].entries.push_back(
        entry_for(fl.entries[target->first], target->second, d.inject_cycle, d.release_cycle));
  }
  return schedules;
}

CampaignTotals tally(const std::vector<SimulationRecord>& records, std::uint64_t fault_set_size) {
  CampaignTotals t;
  t.fault_set_size = fault_set_size;
  t.total_simulations = records.size();
  for (const auto& r : records) {
    const Verdict v = r.classification.verdict;
    if (is_failure(v)) {
      ++t.fail_count;
    } else if (v == Verdict::Detected) {
      ++t.detected_count;
    } else {
      ++t.safe_count;
    }
  }
  return t;
}

CampaignResult run_campaign(const SimulationController& controller, const AnalyzerConfig& analyzer,
                            const InstrumentedNetlist& design, const FaultList& fl, const Stimulus& stimulus,
                            const RunOptions& options) {
  if (!controller.sfi && !controller.dfi && !controller.efi) {
    throw Error(ErrorKind::Config, "no injection strategy configured");
  }
  if (controller.timing_fault_active != design.timing_enabled) {
    throw Error(ErrorKind::Config, "design instrumentation does not match timing_fault_active");
  }
  for (const FaultEntry& e : fl.entries) {
    if (design.channel_of(e.net) != e.control) {
      throw Error(ErrorKind::Config, "fault list entry '" + e.signal + "' is not on its saboteur channel");
    }
  }

  const auto started = Clock::now();
  const Simulator sim(design);
  const std::uint64_t sim_time = controller.sim_time;
  const Trace golden = sim.run(stimulus, sim_time, analyzer).trace;

  std::vector<FaultSchedule> schedules;
  auto append = [&](std::vector<FaultSchedule> more) {
    for (auto& s : more) schedules.push_back(std::move(s));
  };
  if (controller.sfi) append(build_schedules_sfi(fl, *controller.sfi, sim_time, controller.timing_fault_active));
  if (controller.efi) append(build_schedules_efi(fl, *controller.efi));
  if (controller.dfi) append(build_schedules_dfi(fl, *controller.dfi, controller.timing_fault_active));
  for (const auto& s : schedules) validate_schedule(s, design, sim_time);

  std::vector<SimulationRecord> records(schedules.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> abort{false};
  std::mutex error_mutex;
  std::optional<std::pair<std::size_t, std::string>> first_error;

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= schedules.size() || abort.load()) return;
      try {
        const auto t0 = Clock::now();
        RunResult run = sim.run(stimulus, sim_time, analyzer, &schedules[i]);
        SimulationRecord& rec = records[i];
        rec.classification = compare_traces(golden, run.trace, analyzer);
        rec.initial_state_digest = run.initial_digest;
        rec.label = schedules[i].label;
        rec.schedule = std::move(schedules[i]);
        rec.wall_time = Clock::now() - t0;
      } catch (const std::exception& e) {
        std::lock_guard lock(error_mutex);
        if (!first_error || i < first_error->first) first_error = {i, e.what()};
        abort.store(true);
      }
    }
  };

  const unsigned workers = std::max(1u, options.workers);
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (first_error) {
    throw Error(ErrorKind::Simulation,
                "simulation '" + schedules[first_error->first].label + "' failed: " + first_error->second);
  }

  CampaignResult result;
  result.info.timing_fault_active = controller.timing_fault_active;
  result.records = std::move(records);
  result.totals = tally(result.records, fl.fault_set_size());
  result.totals.runtime = Clock::now() - started;
  return result;
}

std::vector<NetId> strobe_nets(const AnalyzerConfig& analyzer, const Netlist& n) {
  std::vector<NetId> nets;
  for (const Strobe& s : analyzer.strobes()) {
    auto id = n.find_net(s.signal);
    if (!id) throw Error(ErrorKind::Config, "strobe '" + s.signal + "' is not a net of '" + n.name + "'");
    nets.push_back(*id);
  }
  return nets;
}

PreparedCampaign prepare_campaign(const Netlist& original, const CampaignConfig& config, bool check_equiv,
                                  std::uint64_t equiv_cycles) {
  validate_config(config);
  if (config.controller.top_module != original.name) {
    throw Error(ErrorKind::Config, "controller.top_module '" + config.controller.top_module +
                                       "' does not match netlist model '" + original.name + "'");
  }
  const auto report = validate(original);
  if (!report.empty()) throw Error(ErrorKind::Netlist, report.violations.front().message);

  Netlist transformed = replace_enabled_cells(original);
  const bool timing = config.controller.timing_fault_active;
  const FaultUniverse universe = extract_faults(
      transformed, config.fault_scope ? std::optional<std::string_view>(*config.fault_scope) : std::nullopt, timing);
  FaultList fl = collapse(universe, transformed, strobe_nets(config.analyzer, transformed));
  InstrumentedNetlist design = insert_saboteurs(transformed, fl.targets(), timing);

  std::optional<EquivalenceVerdict> verdict;
  if (check_equiv) {
    const std::uint64_t seed = parse_random_spec(config.stimulus).value_or(0);
    verdict = check_equivalence(original, design, Stimulus::random(seed, original.inputs.size()), equiv_cycles);
  }
  return PreparedCampaign{original, std::move(transformed), std::move(fl), std::move(design), verdict};
}

TimingOverhead measure_timing_overhead(const Netlist& original, const CampaignConfig& config, const Stimulus& stimulus,
                                       const RunOptions& options, int repetitions) {
  if (!config.controller.sfi) throw Error(ErrorKind::Config, "timing overhead measurement needs an sfi section");
  auto timed = [&](bool timing) {
    CampaignConfig c = config;
    c.controller.timing_fault_active = timing;
    c.controller.efi.reset();
    c.controller.dfi.reset();
    if (!timing && c.controller.sfi->timing_only) c.controller.sfi->timing_only = false;
    const PreparedCampaign prepared = prepare_campaign(original, c, false);
    auto best = std::chrono::nanoseconds::max();
    for (int r = 0; r < std::max(1, repetitions); ++r) {
      const auto result =
          run_campaign(c.controller, c.analyzer, prepared.design, prepared.fault_list, stimulus, options);
      best = std::min(best, result.totals.runtime);
    }
    return best;
  };
  TimingOverhead t;
  t.without_timing = timed(false);
  t.with_timing = timed(true);
  t.factor = t.without_timing.count() > 0
                 ? static_cast<double>(t.with_timing.count()) / static_cast<double>(t.without_timing.count())
                 : 0.0;
  return t;
}

}  // namespace gatefi
