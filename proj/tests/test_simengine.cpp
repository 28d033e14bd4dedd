#include <doctest.h>

#include "gatefi/error.hpp"
#include "gatefi/faultlist.hpp"
#include "gatefi/simengine.hpp"
#include "gatefi/stimulus.hpp"
#include "gatefi/transform.hpp"
#include "support.hpp"

using namespace gatefi;

namespace {

InstrumentedNetlist instrument_all(const Netlist& n, bool timing = false) {
  const Netlist t = replace_enabled_cells(n);
  return insert_saboteurs(t, all_nets(t), timing);
}

Trace make_trace(std::vector<std::string> strobes, std::vector<std::vector<std::uint8_t>> bits) {
  Trace t;
  t.strobes = std::move(strobes);
  t.cycles = bits.empty() ? 0 : bits[0].size();
  t.bits = std::move(bits);
  return t;
}

AnalyzerConfig two_strobe_analyzer() {
  return {{{"g", {{"f", true, StrobeType::Functional}, {"c", true, StrobeType::Checker}}}}};
}

std::vector<std::uint8_t> inputs_at(const Stimulus& s, std::uint64_t cycle) {
  std::vector<std::uint8_t> v(s.width());
  s.vector_at(cycle, v);
  return v;
}

}  // namespace

TEST_CASE("initial state: declared init bits, transparent saboteurs, cycle 0, deterministic") {
  const InstrumentedNetlist counter = instrument_all(testing::bundled("counter_en"));
  const SimState s = initial_state(counter);
  CHECK(s.cycle == 0);
  for (std::uint8_t bit : s.cell_states) CHECK(bit == 0);
  for (SaboteurMode m : s.saboteur_modes) CHECK(m == SaboteurMode::Transparent);
  CHECK(s.saboteur_modes.size() == counter.control_width());
  CHECK(initial_state(counter) == s);

  const Netlist n = parse_netlist(".model i\n.inputs d\n.outputs a b c\n.dff a d\n.dff b d init=1\n.dff c d\n.end\n");
  const SimState t = initial_state(insert_saboteurs(n, {}, false));
  CHECK(t.cell_states == std::vector<std::uint8_t>{0, 1, 0});
}

TEST_CASE("two-stage DFF pipeline delays a pulse by two cycles") {
  const Netlist n = parse_netlist(".model p\n.inputs d\n.outputs q2\n.dff q1 d\n.dff q2 q1\n.end\n");
  const Simulator sim(n);
  SimState s = sim.initial_state();
  const std::vector<std::vector<std::uint8_t>> in = {{1}, {0}, {0}, {0}};
  std::vector<std::uint8_t> seen;
  for (const auto& v : in) seen.push_back(sim.step(s, v)[0]);
  CHECK(seen == std::vector<std::uint8_t>{0, 0, 1, 0});
  CHECK(s.cycle == 4);
}

TEST_CASE("STUCK0 on a net already at 0 leaves the snapshot unchanged") {
  const Netlist n = testing::bundled("and");
  const InstrumentedNetlist d = instrument_all(n);
  const Simulator sim(d);
  SimState a = sim.initial_state();
  SimState b = sim.initial_state();
  const ModeUpdate stuck{*d.channel_of(testing::net(n, "a")), SaboteurMode::Stuck0};
  const std::vector<std::uint8_t> in = {0, 1};
  CHECK(sim.step(a, in) == sim.step(b, in, std::span<const ModeUpdate>(&stuck, 1)));
}

TEST_CASE("DELAY from cycle t: the net carries the driver's previous-cycle value from t+1") {
  const Netlist n = parse_netlist(".model d\n.inputs a\n.outputs y\n.gate BUF y a\n.end\n");
  const InstrumentedNetlist d = insert_saboteurs(n, {testing::net(n, "a")}, true);
  const Simulator sim(d);
  SimState s = sim.initial_state();
  const std::vector<std::uint8_t> drive = {1, 0, 1, 1, 0, 0, 1, 0, 1, 1};
  const std::uint64_t t = 3;
  const ModeUpdate delay{0, SaboteurMode::Delay};
  std::vector<std::uint8_t> y;
  for (std::uint64_t c = 0; c < drive.size(); ++c) {
    const std::vector<std::uint8_t> in = {drive[c]};
    y.push_back(sim.step(s, in, c == t ? std::span<const ModeUpdate>(&delay, 1) : std::span<const ModeUpdate>())[0]);
  }
  for (std::uint64_t c = 0; c < drive.size(); ++c) {
    CAPTURE(c);
    CHECK(y[c] == (c >= t ? drive[c - 1] : drive[c]));
  }
}

TEST_CASE("delay register is primed with the cycle-0 settled value") {
  const Netlist n = parse_netlist(".model d\n.inputs a\n.outputs y\n.gate NOT y a\n.end\n");
  const InstrumentedNetlist d = insert_saboteurs(n, {testing::net(n, "y")}, true);
  const Simulator sim(d);
  SimState s = sim.initial_state();
  const ModeUpdate delay{0, SaboteurMode::Delay};
  // Active from cycle 0: the primed register shows the settled value, not 0.
  CHECK(sim.step(s, std::vector<std::uint8_t>{0}, std::span<const ModeUpdate>(&delay, 1))[0] == 1);
}

TEST_CASE("mode updates naming an unknown channel are rejected") {
  const Netlist n = testing::bundled("and");
  const Simulator sim(instrument_all(n));
  SimState s = sim.initial_state();
  const ModeUpdate bad{99, SaboteurMode::Stuck1};
  CHECK_THROWS_AS(sim.step(s, std::vector<std::uint8_t>{0, 0}, std::span<const ModeUpdate>(&bad, 1)), Error);
  const ModeUpdate no_delay{0, SaboteurMode::Delay};
  CHECK_THROWS_AS(sim.step(s, std::vector<std::uint8_t>{0, 0}, std::span<const ModeUpdate>(&no_delay, 1)), Error);
  CHECK_THROWS_AS(sim.step(s, std::vector<std::uint8_t>{0}), Error);
}

TEST_CASE("adder4 golden run matches integer addition") {
  const Netlist n = testing::bundled("adder4");
  const InstrumentedNetlist d = instrument_all(n);
  const Stimulus stim = Stimulus::random(21, n.inputs.size());
  const Trace t = simulate(d, stim, 300, testing::outputs_analyzer(n));
  REQUIRE(t.cycles == 300);
  for (std::uint64_t c = 0; c < 300; ++c) {
    const auto in = inputs_at(stim, c);
    unsigned a = 0, b = 0;
    for (int i = 0; i < 4; ++i) {
      a |= in[i] << i;
      b |= in[4 + i] << i;
    }
    const unsigned sum = a + b + in[8];
    for (int i = 0; i < 4; ++i) CHECK(testing::row(t, "s" + std::to_string(i))[c] == ((sum >> i) & 1));
    CHECK(testing::row(t, "cout")[c] == ((sum >> 4) & 1));
  }
}

TEST_CASE("alu4 golden run matches a reference ALU") {
  const Netlist n = testing::bundled("alu4");
  const Stimulus stim = Stimulus::random(8, n.inputs.size());
  const Trace t = simulate(instrument_all(n), stim, 300, testing::outputs_analyzer(n));
  for (std::uint64_t c = 0; c < 300; ++c) {
    const auto in = inputs_at(stim, c);
    unsigned a = 0, b = 0;
    for (int i = 0; i < 4; ++i) {
      a |= in[i] << i;
      b |= in[4 + i] << i;
    }
    const unsigned op = in[8] | (in[9] << 1);
    const unsigned sum = a + b + in[10];
    const unsigned y = op == 0 ? (a & b) : op == 1 ? (a | b) : op == 2 ? (a ^ b) : (sum & 15);
    unsigned parity = 1;
    for (int i = 0; i < 4; ++i) {
      CHECK(testing::row(t, "alu.y" + std::to_string(i))[c] == ((y >> i) & 1));
      parity ^= (y >> i) & 1;
    }
    CHECK(testing::row(t, "alu.cout")[c] == ((sum >> 4) & 1));
    CHECK(testing::row(t, "parity")[c] == parity);
  }
}

TEST_CASE("empty schedule equals golden on every bundled circuit for 10 seeds") {
  for (const char* name : testing::kBundled) {
    CAPTURE(name);
    const Netlist n = testing::bundled(name);
    const InstrumentedNetlist d = instrument_all(n, true);
    const AnalyzerConfig analyzer = testing::outputs_analyzer(n);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const Stimulus stim = Stimulus::random(seed, n.inputs.size());
      const FaultSchedule empty{"empty", {}};
      const Trace golden = simulate(d, stim, 200, analyzer);
      CHECK(simulate(d, stim, 200, analyzer, &empty) == golden);
      CHECK(simulate(d, stim, 200, analyzer) == golden);
      CHECK(compare_traces(golden, simulate(d, stim, 200, analyzer, &empty), analyzer).verdict == Verdict::Safe);
    }
  }
}

TEST_CASE("STUCK_AT_1 on a strobe net reads all ones") {
  const Netlist n = testing::bundled("adder4");
  const InstrumentedNetlist d = instrument_all(n);
  const FaultSchedule s{"sa1", {{*d.channel_of(testing::net(n, "s2")), "s2", FaultModel::StuckAt1, 0, 50}}};
  const Trace t = simulate(d, Stimulus::random(3, 9), 50, testing::outputs_analyzer(n), &s);
  for (std::uint8_t bit : testing::row(t, "s2")) CHECK(bit == 1);
}

TEST_CASE("one-cycle BITFLIP at a DFF data input with enable low changes the stored value at the next cycle") {
  const Netlist n = testing::bundled("counter_en");
  const InstrumentedNetlist d = instrument_all(n);
  const Netlist& t = d.base;
  const ChannelId mux = *d.channel_of(testing::net(t, "q2__seu_mux"));
  const Stimulus stim = Stimulus::table(2, std::vector<std::vector<std::uint8_t>>(8, {0, 1}));
  const AnalyzerConfig analyzer = testing::outputs_analyzer(n);
  const FaultSchedule flip{"seu", {{mux, "q2__seu_mux", FaultModel::Bitflip, 3, 4}}};
  const auto golden = testing::row(simulate(d, stim, 8, analyzer), "q2");
  const auto faulty = testing::row(simulate(d, stim, 8, analyzer, &flip), "q2");
  for (int c = 0; c < 4; ++c) CHECK(faulty[c] == golden[c]);
  for (int c = 4; c < 8; ++c) CHECK(faulty[c] != golden[c]);
}

TEST_CASE("compare_traces verdicts") {
  const AnalyzerConfig analyzer = two_strobe_analyzer();
  const Trace golden = make_trace({"f", "c"}, {std::vector<std::uint8_t>(10, 0), std::vector<std::uint8_t>(10, 0)});

  SUBCASE("identical traces are SAFE") {
    const Classification c = compare_traces(golden, golden, analyzer);
    CHECK(c.verdict == Verdict::Safe);
    CHECK_FALSE(c.first_functional_mismatch);
    CHECK_FALSE(c.first_checker_mismatch);
  }
  SUBCASE("checker-only mismatch is DETECTED") {
    Trace f = golden;
    f.bits[1][4] = 1;
    const Classification c = compare_traces(golden, f, analyzer);
    CHECK(c.verdict == Verdict::Detected);
    CHECK(c.first_checker_mismatch == Mismatch{4, "c"});
  }
  SUBCASE("functional mismatch at cycle 7 is FAILURE at (7, f)") {
    Trace f = golden;
    f.bits[0][7] = 1;
    f.bits[0][9] = 1;
    const Classification c = compare_traces(golden, f, analyzer);
    CHECK(c.verdict == Verdict::Failure);
    CHECK(c.first_functional_mismatch == Mismatch{7, "f"});
    CHECK_FALSE(c.first_checker_mismatch);
  }
  SUBCASE("both mismatch is DETECTED_FAILURE") {
    Trace f = golden;
    f.bits[0][2] = 1;
    f.bits[1][5] = 1;
    const Classification c = compare_traces(golden, f, analyzer);
    CHECK(c.verdict == Verdict::DetectedFailure);
    CHECK(is_failure(c.verdict));
    CHECK(is_detected(c.verdict));
  }
  SUBCASE("inactive strobes do not take part") {
    AnalyzerConfig muted = analyzer;
    muted.groups[0].strobes[1].active = false;
    Trace f = golden;
    f.bits[1][0] = 1;
    CHECK(compare_traces(golden, f, muted).verdict == Verdict::Safe);
  }
  SUBCASE("shape mismatches are errors") {
    Trace shorter = make_trace({"f", "c"}, {std::vector<std::uint8_t>(9, 0), std::vector<std::uint8_t>(9, 0)});
    CHECK_THROWS_AS(compare_traces(golden, shorter, analyzer), Error);
    Trace renamed = golden;
    renamed.strobes[1] = "other";
    CHECK_THROWS_AS(compare_traces(golden, renamed, analyzer), Error);
  }
}

TEST_CASE("verdict names round-trip") {
  for (Verdict v : {Verdict::Safe, Verdict::Failure, Verdict::Detected, Verdict::DetectedFailure})
    CHECK(parse_verdict(to_string(v)) == v);
  CHECK(to_string(Verdict::DetectedFailure) == "DETECTED_FAILURE");
  CHECK_FALSE(parse_verdict("FAIL").has_value());
}

TEST_CASE("a transient on a combinational path stops mattering once released") {
  const Netlist n = testing::bundled("adder4");
  const InstrumentedNetlist d = instrument_all(n);
  const AnalyzerConfig analyzer = testing::outputs_analyzer(n);
  const Stimulus stim = Stimulus::random(4, 9);
  const Trace golden = simulate(d, stim, 40, analyzer);
  for (const char* net : {"x1", "c2", "a3", "g0"}) {
    CAPTURE(net);
    const FaultSchedule s{"set", {{*d.channel_of(testing::net(n, net)), net, FaultModel::Bitflip, 10, 15}}};
    const Trace faulty = simulate(d, stim, 40, analyzer, &s);
    for (std::size_t k = 0; k < golden.strobes.size(); ++k) {
      for (std::uint64_t c = 0; c < 40; ++c)
        if (c < 10 || c >= 15) CHECK(faulty.bits[k][c] == golden.bits[k][c]);
    }
    CHECK(faulty != golden);
  }
}

TEST_CASE("stuck-at on a net whose golden value never matches the fault is masked") {
  const Netlist n = parse_netlist(".model m\n.inputs a b\n.outputs y\n.gate CONST0 z\n.gate AND w a z\n.gate OR y w b\n.end\n");
  const InstrumentedNetlist d = instrument_all(n);
  const AnalyzerConfig analyzer = testing::outputs_analyzer(n);
  const Stimulus stim = Stimulus::random(2, 2);
  const Trace golden = simulate(d, stim, 64, analyzer);
  for (const char* net : {"z", "w"}) {
    const FaultSchedule s{"sa0", {{*d.channel_of(testing::net(n, net)), net, FaultModel::StuckAt0, 0, 64}}};
    CHECK(compare_traces(golden, simulate(d, stim, 64, analyzer, &s), analyzer).verdict == Verdict::Safe);
  }
}

TEST_CASE("a fault outside every strobe's cone of influence is SAFE") {
  const Netlist n = parse_netlist(".model c\n.inputs a b\n.outputs y z\n.gate AND y a b\n.gate NOT z b\n.end\n");
  const InstrumentedNetlist d = instrument_all(n, true);
  const AnalyzerConfig analyzer{{{"y", {{"y", true, StrobeType::Functional}}}}};
  const Stimulus stim = Stimulus::random(6, 2);
  const Trace golden = simulate(d, stim, 30, analyzer);
  for (FaultModel m : kAllFaultModels) {
    const FaultSchedule s{"z", {{*d.channel_of(testing::net(n, "z")), "z", m, 0, 30}}};
    CHECK(compare_traces(golden, simulate(d, stim, 30, analyzer, &s), analyzer).verdict == Verdict::Safe);
  }
}

TEST_CASE("schedule validation") {
  const Netlist n = testing::bundled("and");
  const InstrumentedNetlist d = instrument_all(n);
  CHECK_NOTHROW(validate_schedule({"ok", {{0, "a", FaultModel::StuckAt0, 0, 10}}}, d, 10));
  CHECK_THROWS_AS(validate_schedule({"ch", {{7, "a", FaultModel::StuckAt0, 0, 10}}}, d, 10), Error);
  CHECK_THROWS_AS(validate_schedule({"win", {{0, "a", FaultModel::StuckAt0, 0, 11}}}, d, 10), Error);
  CHECK_THROWS_AS(validate_schedule({"empty", {{0, "a", FaultModel::StuckAt0, 4, 4}}}, d, 10), Error);
  CHECK_THROWS_AS(validate_schedule({"timing", {{0, "a", FaultModel::Timing, 0, 5}}}, d, 10), Error);
  CHECK_NOTHROW(validate_schedule({"timing", {{0, "a", FaultModel::Timing, 0, 5}}}, instrument_all(n, true), 10));
}

TEST_CASE("overlapping entries on one channel: the last listed covering entry wins") {
  const Netlist n = testing::bundled("and");
  const InstrumentedNetlist d = instrument_all(n);
  const ChannelId y = *d.channel_of(testing::net(n, "y"));
  const FaultSchedule s{"overlap",
                        {{y, "y", FaultModel::StuckAt1, 0, 6}, {y, "y", FaultModel::StuckAt0, 2, 4}}};
  const Trace t = simulate(d, Stimulus::random(0, 2), 8, testing::outputs_analyzer(n), &s);
  const Trace g = simulate(d, Stimulus::random(0, 2), 8, testing::outputs_analyzer(n));
  const auto y_bits = testing::row(t, "y");
  CHECK(y_bits[0] == 1);
  CHECK(y_bits[1] == 1);
  CHECK(y_bits[2] == 0);
  CHECK(y_bits[3] == 0);
  CHECK(y_bits[4] == 1);
  CHECK(y_bits[5] == 1);
  CHECK(y_bits[6] == testing::row(g, "y")[6]);
  CHECK(y_bits[7] == testing::row(g, "y")[7]);
}

TEST_CASE("a table stimulus shorter than sim_time is an error") {
  const Netlist n = testing::bundled("and");
  const Stimulus stim = Stimulus::table(2, {{0, 1}, {1, 1}});
  CHECK_THROWS_AS(simulate(instrument_all(n), stim, 3, testing::outputs_analyzer(n)), Error);
}

TEST_CASE("stimulus files are reordered by name") {
  const Netlist n = testing::bundled("and");
  const Stimulus s = parse_stimulus("# swapped columns\nb a\n0 1\n1 0\n11\n", n);
  REQUIRE(s.length() == std::uint64_t{3});
  CHECK(inputs_at(s, 0) == std::vector<std::uint8_t>{1, 0});
  CHECK(inputs_at(s, 1) == std::vector<std::uint8_t>{0, 1});
  CHECK(inputs_at(s, 2) == std::vector<std::uint8_t>{1, 1});
  CHECK_THROWS_AS(parse_stimulus("a\n0\n", n), Error);
  CHECK_THROWS_AS(parse_stimulus("a b\n0 2\n", n), Error);
  CHECK_THROWS_AS(parse_stimulus("a b c\n0 1 1\n", n), Error);
  CHECK(parse_random_spec("random(42)") == std::uint64_t{42});
  CHECK_FALSE(parse_random_spec("random(x)").has_value());
  CHECK_FALSE(parse_random_spec("stim.txt").has_value());
}

TEST_CASE("latches update transparently within the cycle") {
  const Netlist n = parse_netlist(".model l\n.inputs d en\n.outputs y\n.dlatch q d en\n.gate NOT y q\n.end\n");
  const Simulator sim(n);
  SimState s = sim.initial_state();
  CHECK(sim.step(s, std::vector<std::uint8_t>{1, 1})[0] == 0);
  CHECK(sim.step(s, std::vector<std::uint8_t>{0, 0})[0] == 0);
  CHECK(sim.step(s, std::vector<std::uint8_t>{0, 1})[0] == 1);
}

TEST_CASE("state digest reflects the clocked state") {
  const InstrumentedNetlist d = instrument_all(testing::bundled("fsm_checker"));
  const Simulator sim(d);
  SimState a = sim.initial_state();
  const SimState b = sim.initial_state();
  CHECK(state_digest(a) == state_digest(b));
  sim.step(a, std::vector<std::uint8_t>{1, 0});
  CHECK(state_digest(a) != state_digest(b));
}

TEST_CASE("golden runs are deterministic and independent of other runs") {
  const Netlist n = testing::bundled("fsm_checker");
  const InstrumentedNetlist d = instrument_all(n, true);
  const Simulator sim(d);
  const AnalyzerConfig analyzer = testing::outputs_analyzer(n);
  const Stimulus stim = Stimulus::random(12, 2);
  const RunResult first = sim.run(stim, 100, analyzer);
  const FaultSchedule s{"x", {{0, "x", FaultModel::StuckAt1, 0, 100}}};
  sim.run(stim, 100, analyzer, &s);
  const RunResult again = sim.run(stim, 100, analyzer);
  CHECK(first.trace == again.trace);
  CHECK(first.initial_digest == again.initial_digest);
  CHECK(first.initial_digest == state_digest(sim.initial_state()));
}
