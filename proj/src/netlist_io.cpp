#include <fstream>
#include <sstream>

#include "gatefi/error.hpp"
#include "gatefi/netlist.hpp"

namespace gatefi {

namespace {

struct Token {
  std::string_view text;
  std::size_t column;  // 1-based
};

std::vector<Token> tokenize(std::string_view line) {
  if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) tokens.push_back({line.substr(start, i - start), start + 1});
  }
  return tokens;
}

class Reader {
 public:
  explicit Reader(std::size_t line) : line_(line) {}

  [[noreturn]] void fail(std::size_t column, const std::string& message) const {
    throw ParseError(line_, column, message);
  }

  NetlistBuilder::NetRef net(const Token& t) const {
    if (!is_identifier(t.text)) fail(t.column, "invalid net name '" + std::string(t.text) + "'");
    return {std::string(t.text), {line_, t.column}};
  }

  bool init_flag(const Token& t) const {
    if (t.text == "init=0") return false;
    if (t.text == "init=1") return true;
    fail(t.column, "expected init=0 or init=1, got '" + std::string(t.text) + "'");
  }

 private:
  std::size_t line_;
};

}  // namespace

bool is_identifier(std::string_view text) {
  if (text.empty()) return false;
  auto head = [](char c) { return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_'; };
  auto tail = [&](char c) { return head(c) || (c >= '0' && c <= '9') || c == '.'; };
  if (!head(text.front())) return false;
  for (char c : text.substr(1))
    if (!tail(c)) return false;
  return true;
}

Netlist parse_netlist(std::string_view text) {
  std::optional<NetlistBuilder> builder;
  bool ended = false;
  std::size_t line_no = 0;

  while (!text.empty()) {
    const auto eol = text.find('\n');
    const std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    ++line_no;

    const auto tokens = tokenize(line);
    if (tokens.empty()) continue;
    const Reader r(line_no);
    const Token& head = tokens.front();

    if (ended) r.fail(head.column, "content after .end");
    if (!builder) {
      if (head.text != ".model") r.fail(head.column, "expected .model as the first statement");
      if (tokens.size() != 2) r.fail(head.column, ".model takes exactly one name");
      if (!is_identifier(tokens[1].text)) r.fail(tokens[1].column, "invalid model name");
      builder.emplace(std::string(tokens[1].text));
      continue;
    }

    if (head.text == ".model") {
      r.fail(head.column, "duplicate .model");
    } else if (head.text == ".inputs" || head.text == ".outputs") {
      for (std::size_t i = 1; i < tokens.size(); ++i) {
        if (head.text == ".inputs") {
          builder->add_input(r.net(tokens[i]));
        } else {
          builder->add_output(r.net(tokens[i]));
        }
      }
    } else if (head.text == ".gate") {
      if (tokens.size() < 3) r.fail(head.column, ".gate needs a kind and an output net");
      const auto kind = parse_gate_kind(tokens[1].text);
      if (!kind) r.fail(tokens[1].column, "unknown gate kind '" + std::string(tokens[1].text) + "'");
      std::vector<NetlistBuilder::NetRef> operands;
      for (std::size_t i = 3; i < tokens.size(); ++i) operands.push_back(r.net(tokens[i]));
      if (!arity_ok(*kind, operands.size())) {
        r.fail(tokens[1].column, std::string(tokens[1].text) + " gate given " + std::to_string(operands.size()) +
                                     " inputs");
      }
      builder->add_gate(*kind, r.net(tokens[2]), std::move(operands));
    } else if (head.text == ".dff" || head.text == ".dffe" || head.text == ".dlatch") {
      const bool enabled = head.text != ".dff";
      const std::size_t fixed = enabled ? 4 : 3;
      if (tokens.size() < fixed || tokens.size() > fixed + 1) {
        r.fail(head.column, std::string(head.text) + (enabled ? " expects <q> <d> <en> [init=<0|1>]"
                                                              : " expects <q> <d> [init=<0|1>]"));
      }
      const CellKind kind = head.text == ".dff" ? CellKind::Dff : head.text == ".dffe" ? CellKind::Dffe : CellKind::Dlatch;
      std::optional<NetlistBuilder::NetRef> enable;
      if (enabled) enable = r.net(tokens[3]);
      const bool init = tokens.size() > fixed && r.init_flag(tokens[fixed]);
      builder->add_cell(kind, r.net(tokens[1]), r.net(tokens[2]), std::move(enable), init);
    } else if (head.text == ".end") {
      if (tokens.size() != 1) r.fail(tokens[1].column, ".end takes no arguments");
      ended = true;
    } else {
      r.fail(head.column, "unknown statement '" + std::string(head.text) + "'");
    }
  }

  if (!builder) throw ParseError(line_no, 0, "missing .model");
  if (!ended) throw ParseError(line_no, 0, "missing .end");
  return builder->build();
}

Netlist load_netlist(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open netlist '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_netlist(buffer.str());
}

std::string print_netlist(const Netlist& n) {
  std::ostringstream out;
  out << ".model " << n.name << '\n';
  auto list = [&](const char* directive, const std::vector<NetId>& nets) {
    out << directive;
    for (NetId id : nets) out << ' ' << n.net_name(id);
    out << '\n';
  };
  list(".inputs", n.inputs);
  list(".outputs", n.outputs);
  for (const Gate& g : n.gates) {
    out << ".gate " << to_string(g.kind) << ' ' << n.net_name(g.output);
    for (NetId in : g.inputs) out << ' ' << n.net_name(in);
    out << '\n';
  }
  for (const SeqCell& c : n.cells) {
    switch (c.kind) {
      case CellKind::Dff: out << ".dff"; break;
      case CellKind::Dffe: out << ".dffe"; break;
      case CellKind::Dlatch: out << ".dlatch"; break;
    }
    out << ' ' << n.net_name(c.output) << ' ' << n.net_name(c.data);
    if (c.enable) out << ' ' << n.net_name(*c.enable);
    if (c.init) out << " init=1";
    out << '\n';
  }
  out << ".end\n";
  return out.str();
}

}  // namespace gatefi
