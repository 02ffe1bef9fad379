#include "pemu/hdl.hpp"

#include <charconv>

namespace pemu {

namespace {

std::string hex_string(std::uint64_t v) {
  char buf[20];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v, 16);
  (void)ec;
  return std::string(buf, p);
}

std::string range(unsigned width) {
  if (width == 1) return "";
  return "[" + std::to_string(width - 1) + ":0] ";
}

std::string literal(unsigned width, std::uint64_t value) {
  return std::to_string(width) + "'h" + hex_string(value);
}

}  // namespace

std::string emit_hdl(const Design& design) {
  std::string out = "module " + design.name + " (";
  for (std::size_t i = 0; i < design.ports.size(); ++i) {
    if (i) out += ", ";
    out += design.ports[i].name;
  }
  out += ");\n";

  for (const Port& p : design.ports) {
    out += p.direction == PortDirection::Input ? "  input " : "  output ";
    out += range(p.width) + p.name + ";\n";
  }
  for (const Net& n : design.nets)
    out += "  wire " + range(n.width) + n.name + ";\n";

  if (!design.components.empty()) out += "\n";
  for (const Component& c : design.components) {
    out += "  " + std::string(kind_name(c.kind)) +
           " #(.width(" + std::to_string(c.width) + ")";
    if (c.kind == Kind::REG) out += ", .init(" + literal(c.width, c.init) + ")";
    if (c.kind == Kind::CONST) out += ", .value(" + literal(c.width, c.literal) + ")";
    out += ") " + c.name + " (";
    bool first = true;
    auto pin = [&](const std::string& name, const std::string& net) {
      if (!first) out += ", ";
      first = false;
      out += "." + name + "(" + net + ")";
    };
    if (c.kind == Kind::REG) pin("clk", c.clock);
    const auto in_names = input_pin_names(c.kind);
    const auto out_names = output_pin_names(c.kind);
    for (std::size_t i = 0; i < c.inputs.size(); ++i) pin(in_names[i], c.inputs[i]);
    for (std::size_t i = 0; i < c.outputs.size(); ++i) pin(out_names[i], c.outputs[i]);
    out += ");\n";
  }
  out += "endmodule\n";
  return out;
}

}  // namespace pemu
