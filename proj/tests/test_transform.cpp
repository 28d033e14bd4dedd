#include <doctest.h>

#include "gatefi/error.hpp"
#include "gatefi/faultlist.hpp"
#include "gatefi/rng.hpp"
#include "gatefi/simengine.hpp"
#include "gatefi/stimulus.hpp"
#include "gatefi/transform.hpp"
#include "support.hpp"

using namespace gatefi;

namespace {

// Runs a plain netlist over explicit input rows and returns the output
// snapshot of every cycle.
std::vector<std::vector<std::uint8_t>> run_plain(const Netlist& n, const std::vector<std::vector<std::uint8_t>>& rows) {
  const Simulator sim(n);
  SimState state = sim.initial_state();
  std::vector<std::vector<std::uint8_t>> outs;
  for (const auto& r : rows) outs.push_back(sim.step(state, r));
  return outs;
}

std::vector<std::vector<std::uint8_t>> random_rows(std::size_t width, std::size_t count, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::vector<std::vector<std::uint8_t>> rows(count, std::vector<std::uint8_t>(width));
  for (auto& r : rows)
    for (auto& bit : r) bit = gen() & 1;
  return rows;
}

std::uint8_t output_of(const Netlist& n, const std::vector<std::uint8_t>& snapshot, const std::string& name) {
  for (std::size_t i = 0; i < n.outputs.size(); ++i)
    if (n.net_name(n.outputs[i]) == name) return snapshot[i];
  throw std::runtime_error("no output " + name);
}

const char* kDffe = ".model e\n.inputs d en\n.outputs q\n.dffe q d en\n.end\n";
const char* kDlatch = ".model l\n.inputs d en\n.outputs q\n.dlatch q d en\n.end\n";

}  // namespace

TEST_CASE("one DFFE becomes one MUX2 feeding one DFF") {
  const Netlist t = replace_enabled_cells(parse_netlist(kDffe));
  REQUIRE(t.gates.size() == 1);
  REQUIRE(t.cells.size() == 1);
  CHECK(t.gates[0].kind == GateKind::Mux2);
  CHECK(t.net_name(t.gates[0].output) == "q__seu_mux");
  CHECK(t.gates[0].inputs == std::vector<NetId>{testing::net(t, "en"), testing::net(t, "q"), testing::net(t, "d")});
  CHECK(t.cells[0].kind == CellKind::Dff);
  CHECK(t.cells[0].data == testing::net(t, "q__seu_mux"));
  CHECK(validate(t).empty());
}

TEST_CASE("transformed DFFE matches the enabled-register model over every (d, en) sequence of length 5") {
  const Netlist t = replace_enabled_cells(parse_netlist(kDffe));
  for (unsigned code = 0; code < (1u << 10); ++code) {
    std::vector<std::vector<std::uint8_t>> rows;
    for (unsigned c = 0; c < 5; ++c) rows.push_back({std::uint8_t((code >> (2 * c)) & 1), std::uint8_t((code >> (2 * c + 1)) & 1)});
    const auto outs = run_plain(t, rows);
    std::uint8_t q = 0;  // reference: q' = en ? d : q
    for (unsigned c = 0; c < 5; ++c) {
      CHECK(outs[c][0] == q);
      if (rows[c][1]) q = rows[c][0];
    }
  }
}

TEST_CASE("transformed DLATCH stays transparent and matches the latch model") {
  const Netlist original = parse_netlist(kDlatch);
  const Netlist t = replace_enabled_cells(original);
  CHECK(t.cells.size() == 1);
  CHECK(t.cells[0].kind == CellKind::Dff);
  for (const SeqCell& c : t.cells) CHECK(c.kind == CellKind::Dff);
  for (unsigned code = 0; code < (1u << 10); ++code) {
    std::vector<std::vector<std::uint8_t>> rows;
    for (unsigned c = 0; c < 5; ++c) rows.push_back({std::uint8_t((code >> (2 * c)) & 1), std::uint8_t((code >> (2 * c + 1)) & 1)});
    const auto outs_t = run_plain(t, rows);
    const auto outs_o = run_plain(original, rows);
    std::uint8_t state = 0;  // reference: q = en ? d : state, state' = q
    for (unsigned c = 0; c < 5; ++c) {
      const std::uint8_t q = rows[c][1] ? rows[c][0] : state;
      CHECK(outs_t[c][0] == q);
      CHECK(outs_o[c][0] == q);
      state = q;
    }
  }
}

TEST_CASE("a netlist without enabled cells comes back unchanged") {
  for (const char* name : {"and", "adder4", "alu4", "fsm_checker"}) {
    CAPTURE(name);
    const Netlist n = testing::bundled(name);
    CHECK(replace_enabled_cells(n) == n);
  }
}

TEST_CASE("DFFE with enable tied to CONST1 behaves like a plain DFF over 100 random cycles") {
  const Netlist enabled = parse_netlist(".model a\n.inputs d\n.outputs q\n.gate CONST1 one\n.dffe q d one\n.end\n");
  const Netlist plain = parse_netlist(".model b\n.inputs d\n.outputs q\n.dff q d\n.end\n");
  const auto rows = random_rows(1, 100, 42);
  CHECK(run_plain(replace_enabled_cells(enabled), rows) == run_plain(plain, rows));
}

TEST_CASE("SEU transform preserves behaviour of the bundled enabled counter over 1000 random cycles") {
  const Netlist n = testing::bundled("counter_en");
  const auto rows = random_rows(n.inputs.size(), 1000, 7);
  const Netlist t = replace_enabled_cells(n);
  for (const SeqCell& c : t.cells) CHECK(c.kind == CellKind::Dff);
  CHECK(run_plain(t, rows) == run_plain(n, rows));

  // Independent model of the counter: advances while en, latch follows q2 while hold is low.
  unsigned count = 0;
  unsigned latch = 0;
  const auto outs = run_plain(t, rows);
  for (std::size_t c = 0; c < rows.size(); ++c) {
    const unsigned q2 = (count >> 2) & 1;
    if (!rows[c][1]) latch = q2;
    CHECK(output_of(t, outs[c], "q0") == (count & 1));
    CHECK(output_of(t, outs[c], "q1") == ((count >> 1) & 1));
    CHECK(output_of(t, outs[c], "q2") == q2);
    CHECK(output_of(t, outs[c], "lq") == latch);
    if (rows[c][0]) count = (count + 1) & 7;
  }
}

TEST_CASE("fresh-name collisions are rejected") {
  const Netlist n = parse_netlist(".model c\n.inputs d en q__seu_mux\n.outputs q\n.dffe q d en\n.end\n");
  CHECK_THROWS_AS(replace_enabled_cells(n), Error);
}

TEST_CASE("insert_saboteurs assigns channels in net order and validates targets") {
  const Netlist n = testing::bundled("adder4");
  const std::vector<NetId> targets = {testing::net(n, "s2"), testing::net(n, "a0"), testing::net(n, "x1")};
  const InstrumentedNetlist d = insert_saboteurs(n, targets, false);
  REQUIRE(d.saboteurs.size() == 3);
  CHECK(d.saboteurs[0].target == testing::net(n, "a0"));
  CHECK(d.saboteurs[1].target == testing::net(n, "x1"));
  CHECK(d.saboteurs[2].target == testing::net(n, "s2"));
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(d.saboteurs[i].id == i);
    CHECK(d.saboteurs[i].supports(SaboteurMode::Transparent));
    CHECK_FALSE(d.saboteurs[i].supports(SaboteurMode::Delay));
  }
  CHECK(d.channel_of(testing::net(n, "x1")) == ChannelId{1});
  CHECK_FALSE(d.channel_of(testing::net(n, "b0")).has_value());

  const InstrumentedNetlist again = insert_saboteurs(n, {targets[2], targets[1], targets[0]}, false);
  for (std::size_t i = 0; i < 3; ++i) CHECK(again.saboteurs[i].target == d.saboteurs[i].target);

  CHECK_THROWS_AS(insert_saboteurs(n, {static_cast<NetId>(n.net_count())}, false), Error);
  CHECK_THROWS_AS(insert_saboteurs(testing::bundled("counter_en"), {0}, false), Error);

  const InstrumentedNetlist timed = insert_saboteurs(n, all_nets(n), true);
  CHECK(timed.control_width() == n.net_count());
  for (const Saboteur& s : timed.saboteurs) CHECK(s.supports(SaboteurMode::Delay));
}

TEST_CASE("InstrumentedNetlist rejects inconsistent saboteur lists") {
  const Netlist n = testing::bundled("and");
  CHECK_THROWS_AS(InstrumentedNetlist(n, {{1, 0, false}}, false), Error);
  CHECK_THROWS_AS(InstrumentedNetlist(n, {{0, 0, false}, {1, 0, false}}, false), Error);
  CHECK_THROWS_AS(InstrumentedNetlist(n, {{0, 0, true}}, false), Error);
  CHECK_THROWS_AS(InstrumentedNetlist(n, {{0, 9, false}}, false), Error);
}

TEST_CASE("STUCK1 on an AND output forces its consumers to 1 every cycle") {
  const Netlist n = parse_netlist(".model s\n.inputs a b c\n.outputs z\n.gate AND y a b\n.gate BUF z y\n.end\n");
  const InstrumentedNetlist d = insert_saboteurs(n, {testing::net(n, "y")}, false);
  const Simulator sim(d);
  SimState state = sim.initial_state();
  const ModeUpdate stuck{0, SaboteurMode::Stuck1};
  for (const auto& r : random_rows(3, 50, 3)) {
    const auto out = sim.step(state, r, state.cycle == 0 ? std::span<const ModeUpdate>(&stuck, 1) : std::span<const ModeUpdate>());
    CHECK(out[0] == 1);
  }
}

TEST_CASE("DELAY reproduces the timing-fault waveform: C rises one cycle after golden") {
  const Netlist n = testing::bundled("and");
  const InstrumentedNetlist d = insert_saboteurs(n, all_nets(n), true);
  // a high for cycles 1..3, b rises one cycle after a and stays high.
  const std::vector<std::vector<std::uint8_t>> rows = {{0, 0}, {1, 0}, {1, 1}, {1, 1}, {0, 1}, {0, 1}};
  const Stimulus stim = Stimulus::table(2, rows);
  const AnalyzerConfig analyzer = testing::outputs_analyzer(n);
  const ChannelId b = *d.channel_of(testing::net(n, "b"));
  const FaultSchedule delay_b{"delay-b", {{b, "b", FaultModel::Timing, 0, 6}}};

  const auto golden = testing::row(simulate(d, stim, 6, analyzer), "y");
  const auto faulty = testing::row(simulate(d, stim, 6, analyzer, &delay_b), "y");
  CHECK(golden == std::vector<std::uint8_t>{0, 0, 1, 1, 0, 0});
  CHECK(faulty == std::vector<std::uint8_t>{0, 0, 0, 1, 0, 0});
  const auto rise = [](const std::vector<std::uint8_t>& w) {
    for (std::size_t i = 0; i < w.size(); ++i)
      if (w[i]) return i;
    return w.size();
  };
  CHECK(rise(faulty) == rise(golden) + 1);
}

TEST_CASE("transparent saboteurs on every net of every bundled circuit preserve behaviour") {
  for (const char* name : testing::kBundled) {
    CAPTURE(name);
    const Netlist original = testing::bundled(name);
    const Netlist t = replace_enabled_cells(original);
    for (bool timing : {false, true}) {
      const InstrumentedNetlist d = insert_saboteurs(t, all_nets(t), timing);
      const EquivalenceVerdict v = check_equivalence(original, d, Stimulus::random(5, original.inputs.size()), 1000);
      CHECK(v.equivalent);
      CHECK_FALSE(v.first_divergence.has_value());
      CHECK(v.vectors_checked == 1000);
    }
  }
}

TEST_CASE("zero-cycle equivalence check is vacuously equivalent") {
  const Netlist n = testing::bundled("adder4");
  const EquivalenceVerdict v = check_equivalence(n, insert_saboteurs(n, all_nets(n), true), Stimulus::random(1, 9), 0);
  CHECK(v.equivalent);
  CHECK(v.vectors_checked == 0);
}

TEST_CASE("a mis-wired always-inverting saboteur diverges at the first cycle where it propagates") {
  // Fixture: instrumentation whose saboteur on `a` was wired as an inverter.
  const Netlist original = testing::bundled("and");
  const Netlist broken =
      parse_netlist(".model and\n.inputs a b\n.outputs y\n.gate NOT a_bad a\n.gate AND y a_bad b\n.end\n");
  const InstrumentedNetlist fixture(broken, {}, false);
  const Stimulus stim = Stimulus::random(99, 2);

  // Oracle: the inverted a reaches y exactly when b = 1.
  std::uint64_t expected = 0;
  std::vector<std::uint8_t> v(2);
  for (;; ++expected) {
    stim.vector_at(expected, v);
    if (v[1]) break;
  }
  const EquivalenceVerdict verdict = check_equivalence(original, fixture, stim, 1000);
  CHECK_FALSE(verdict.equivalent);
  REQUIRE(verdict.first_divergence.has_value());
  CHECK(verdict.first_divergence->cycle == expected);
  CHECK(verdict.first_divergence->output == "y");
  CHECK(verdict.first_divergence->golden != verdict.first_divergence->instrumented);
}

TEST_CASE("equivalence check rejects different I/O signatures") {
  const Netlist a = testing::bundled("and");
  const Netlist b = testing::bundled("inv_chain");
  CHECK_THROWS_AS(check_equivalence(a, insert_saboteurs(b, {}, false), Stimulus::random(1, 2), 10), Error);
}

TEST_CASE("expanded AND matches the pinned golden file and is a valid netlist") {
  const Netlist n = testing::bundled("and");
  const FaultList fl = collapse(extract_faults(n), n);
  const Netlist expanded = expand_saboteurs(insert_saboteurs(n, fl.targets(), false));
  CHECK(print_netlist(expanded) == testing::slurp(testing::golden_path("and_instrumented.net")));
  CHECK(validate(expanded).empty());
  CHECK(parse_netlist(print_netlist(expanded)) == expanded);
}

TEST_CASE("control bits select each mode") {
  CHECK(control_bits(SaboteurMode::Transparent).force == false);
  CHECK(control_bits(SaboteurMode::Transparent).invert == false);
  CHECK(control_bits(SaboteurMode::Transparent).delay == false);
  CHECK(control_bits(SaboteurMode::Stuck0).force);
  CHECK_FALSE(control_bits(SaboteurMode::Stuck0).value);
  CHECK(control_bits(SaboteurMode::Stuck1).force);
  CHECK(control_bits(SaboteurMode::Stuck1).value);
  CHECK(control_bits(SaboteurMode::Invert).invert);
  CHECK(control_bits(SaboteurMode::Delay).delay);
}

TEST_CASE("expanded saboteurs driven through control inputs match the engine's modes") {
  const Netlist n = testing::bundled("adder4");
  const InstrumentedNetlist d = insert_saboteurs(n, all_nets(n), true);
  const Netlist expanded = expand_saboteurs(d);
  const Simulator engine(d);
  const Simulator plain(expanded);
  const std::size_t width = n.inputs.size();
  REQUIRE(expanded.inputs.size() == width + 4 * d.saboteurs.size());

  std::mt19937_64 gen(11);
  for (int trial = 0; trial < 200; ++trial) {
    const ChannelId ch = static_cast<ChannelId>(gen() % d.saboteurs.size());
    const SaboteurMode mode = static_cast<SaboteurMode>(gen() % 5);
    CAPTURE(ch);
    CAPTURE(to_string(mode));
    SimState es = engine.initial_state();
    SimState ps = plain.initial_state();
    // The expanded delay register powers up at 0, so faults start at cycle 1.
    for (std::uint64_t c = 0; c < 6; ++c) {
      std::vector<std::uint8_t> in(width);
      for (auto& bit : in) bit = gen() & 1;
      const SaboteurMode active = c >= 1 ? mode : SaboteurMode::Transparent;
      const ModeUpdate update{ch, active};
      const auto e_out = engine.step(es, in, std::span<const ModeUpdate>(&update, 1));

      std::vector<std::uint8_t> full(in);
      full.resize(expanded.inputs.size(), 0);
      const ControlBits bits = control_bits(active);
      const std::string prefix = "__sab_" + std::to_string(ch) + "_";
      for (std::size_t i = width; i < expanded.inputs.size(); ++i) {
        const std::string& name = expanded.net_name(expanded.inputs[i]);
        if (name == prefix + "s") full[i] = bits.force;
        if (name == prefix + "v") full[i] = bits.value;
        if (name == prefix + "x") full[i] = bits.invert;
        if (name == prefix + "d") full[i] = bits.delay;
      }
      CHECK(plain.step(ps, full) == e_out);
    }
  }
}

TEST_CASE("SEU independence of enable: a one-cycle flip at the transformed data input flips the stored bit") {
  const Netlist n = testing::bundled("counter_en");
  const Netlist t = replace_enabled_cells(n);
  const InstrumentedNetlist d = insert_saboteurs(t, all_nets(t), false);
  const Simulator sim(d);
  const ChannelId mux = *d.channel_of(testing::net(t, "q1__seu_mux"));

  SimState golden = sim.initial_state();
  SimState faulty = sim.initial_state();
  const std::vector<std::uint8_t> hold_disabled = {0, 0};  // en = 0
  const ModeUpdate flip{mux, SaboteurMode::Invert};
  const ModeUpdate clear{mux, SaboteurMode::Transparent};
  for (int c = 0; c < 3; ++c) {
    sim.step(golden, hold_disabled);
    sim.step(faulty, hold_disabled, c == 1 ? std::span<const ModeUpdate>(&flip, 1)
                                           : (c == 2 ? std::span<const ModeUpdate>(&clear, 1)
                                                     : std::span<const ModeUpdate>()));
  }
  const auto q1 = testing::net(t, "q1");
  CHECK(golden.net_values[q1] == 0);
  CHECK(faulty.net_values[q1] == 1);
}
