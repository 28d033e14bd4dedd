#include "gatefi/stimulus.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "gatefi/error.hpp"
#include "gatefi/rng.hpp"

namespace gatefi {

Stimulus Stimulus::random(std::uint64_t seed, std::size_t width) { return Stimulus(width, seed, std::nullopt); }

Stimulus Stimulus::table(std::size_t width, std::vector<std::vector<std::uint8_t>> rows) {
  for (const auto& row : rows) {
    if (row.size() != width) throw Error(ErrorKind::Simulation, "stimulus row width does not match input count");
  }
  return Stimulus(width, 0, std::move(rows));
}

std::optional<std::uint64_t> Stimulus::length() const {
  if (!rows_) return std::nullopt;
  return rows_->size();
}

void Stimulus::vector_at(std::uint64_t cycle, std::span<std::uint8_t> out) const {
  if (rows_) {
    if (cycle >= rows_->size()) {
      throw Error(ErrorKind::Simulation, "stimulus exhausted at cycle " + std::to_string(cycle) + " (" +
                                             std::to_string(rows_->size()) + " vectors supplied)");
    }
    const auto& row = (*rows_)[cycle];
    std::copy(row.begin(), row.end(), out.begin());
    return;
  }
  const CounterRng rng(seed_);
  for (std::size_t i = 0; i < width_; ++i) out[i] = static_cast<std::uint8_t>(rng.bits(cycle, i) >> 63);
}

Stimulus parse_stimulus(std::string_view text, const Netlist& n) {
  std::vector<std::size_t> column_to_input;
  std::vector<std::vector<std::uint8_t>> rows;
  bool have_header = false;
  std::size_t line_no = 0;

  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::vector<std::string> tokens;
    for (std::string tok; fields >> tok;) tokens.push_back(tok);
    if (tokens.empty()) continue;

    if (!have_header) {
      std::unordered_map<NetId, std::size_t> position;
      for (std::size_t i = 0; i < n.inputs.size(); ++i) position.emplace(n.inputs[i], i);
      std::vector<std::uint8_t> used(n.inputs.size(), 0);
      for (const auto& name : tokens) {
        const auto id = n.find_net(name);
        const auto pos = id ? position.find(*id) : position.end();
        if (pos == position.end()) throw ParseError(line_no, 0, "'" + name + "' is not a primary input");
        if (used[pos->second]++) throw ParseError(line_no, 0, "input '" + name + "' listed twice");
        column_to_input.push_back(pos->second);
      }
      if (tokens.size() != n.inputs.size()) {
        throw ParseError(line_no, 0,
                         "header names " + std::to_string(tokens.size()) + " of " +
                             std::to_string(n.inputs.size()) + " primary inputs");
      }
      have_header = true;
      continue;
    }

    // Rows may be written either as separate tokens or as one packed bit string.
    std::string bits;
    for (const auto& tok : tokens) bits += tok;
    if (bits.size() != column_to_input.size()) {
      throw ParseError(line_no, 0,
                       "expected " + std::to_string(column_to_input.size()) + " bits, got " +
                           std::to_string(bits.size()));
    }
    std::vector<std::uint8_t> row(n.inputs.size(), 0);
    for (std::size_t c = 0; c < bits.size(); ++c) {
      if (bits[c] != '0' && bits[c] != '1') throw ParseError(line_no, 0, "stimulus bits must be 0 or 1");
      row[column_to_input[c]] = static_cast<std::uint8_t>(bits[c] - '0');
    }
    rows.push_back(std::move(row));
  }
  if (!have_header && !n.inputs.empty()) throw ParseError(line_no, 0, "stimulus has no header line");
  return Stimulus::table(n.inputs.size(), std::move(rows));
}

Stimulus load_stimulus(const std::string& path, const Netlist& n) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open stimulus '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_stimulus(buffer.str(), n);
}

std::optional<std::uint64_t> parse_random_spec(std::string_view spec) {
  constexpr std::string_view prefix = "random(";
  if (spec.size() <= prefix.size() + 1 || spec.substr(0, prefix.size()) != prefix || spec.back() != ')') {
    return std::nullopt;
  }
  const std::string_view digits = spec.substr(prefix.size(), spec.size() - prefix.size() - 1);
  std::uint64_t seed = 0;
  const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), seed);
  if (ec != std::errc{} || ptr != digits.data() + digits.size()) return std::nullopt;
  return seed;
}

}  // namespace gatefi
