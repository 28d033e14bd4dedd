#pragma once

#include <array>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "gatefi/netlist.hpp"
#include "gatefi/simengine.hpp"

namespace testing {

inline const std::array<const char*, 6> kBundled = {"and",        "inv_chain",  "adder4",
                                                    "alu4",       "counter_en", "fsm_checker"};

inline std::string circuit_path(const std::string& file) { return std::string(GATEFI_CIRCUITS_DIR) + "/" + file; }
inline std::string golden_path(const std::string& file) { return std::string(GATEFI_GOLDEN_DIR) + "/" + file; }

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

inline gatefi::Netlist bundled(const std::string& name) { return gatefi::load_netlist(circuit_path(name + ".net")); }

// Every primary output as an active functional strobe.
inline gatefi::AnalyzerConfig outputs_analyzer(const gatefi::Netlist& n) {
  gatefi::StrobeGroup group{"outputs", {}};
  for (gatefi::NetId id : n.outputs) group.strobes.push_back({n.net_name(id), true, gatefi::StrobeType::Functional});
  return {{group}};
}

inline gatefi::NetId net(const gatefi::Netlist& n, const std::string& name) {
  auto id = n.find_net(name);
  if (!id) throw std::runtime_error("no net " + name);
  return *id;
}

// Row of one strobe in a trace.
inline std::vector<std::uint8_t> row(const gatefi::Trace& t, const std::string& strobe) {
  for (std::size_t i = 0; i < t.strobes.size(); ++i)
    if (t.strobes[i] == strobe) return t.bits[i];
  throw std::runtime_error("no strobe " + strobe);
}

// Fresh scratch directory under the system temp directory.
inline std::filesystem::path scratch_dir(const std::string& tag) {
  static int counter = 0;
  std::random_device rd;
  auto dir = std::filesystem::temp_directory_path() /
             ("gatefi_" + tag + "_" + std::to_string(rd()) + "_" + std::to_string(counter++));
  std::filesystem::create_directories(dir);
  return dir;
}

inline void write(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
}

}  // namespace testing
