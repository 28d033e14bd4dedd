#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gatefi/netlist.hpp"

namespace gatefi {

// Per-cycle primary-input vectors, either a fixed table (bits ordered like
// the netlist's inputs) or a seeded random source of unbounded length.
class Stimulus {
 public:
  static Stimulus random(std::uint64_t seed, std::size_t width);
  static Stimulus table(std::size_t width, std::vector<std::vector<std::uint8_t>> rows);

  std::size_t width() const { return width_; }
  // nullopt for random sources.
  std::optional<std::uint64_t> length() const;
  bool is_random() const { return !rows_.has_value(); }
  std::uint64_t seed() const { return seed_; }

  // Throws Error(Simulation) past the end of a table.
  void vector_at(std::uint64_t cycle, std::span<std::uint8_t> out) const;

 private:
  Stimulus(std::size_t width, std::uint64_t seed, std::optional<std::vector<std::vector<std::uint8_t>>> rows)
      : width_(width), seed_(seed), rows_(std::move(rows)) {}

  std::size_t width_;
  std::uint64_t seed_;
  std::optional<std::vector<std::vector<std::uint8_t>>> rows_;
};

// Stimulus file: a header line naming every primary input once (any order),
// then one row of 0/1 tokens per cycle. Columns are reordered to the netlist
// input order. `#` starts a comment.
Stimulus parse_stimulus(std::string_view text, const Netlist& n);
Stimulus load_stimulus(const std::string& path, const Netlist& n);

// Parses `random(<seed>)`; nullopt if `spec` is not of that form.
std::optional<std::uint64_t> parse_random_spec(std::string_view spec);

}  // namespace gatefi
