#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gatefi {

enum class ErrorKind {
  Io,
  Parse,
  Netlist,
  Config,
  Schedule,
  Simulation,
  Budget,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

// Raised by the netlist reader and the stimulus/record readers. line and
// column are 1-based; column 0 means "whole line".
class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& message);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }
  const std::string& message() const { return message_; }

 private:
  std::size_t line_;
  std::size_t column_;
  std::string message_;
};

}  // namespace gatefi
