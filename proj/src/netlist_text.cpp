#include "pemu/netlist_text.hpp"

#include <cctype>
#include <charconv>
#include <sstream>

namespace pemu {

namespace {

bool is_identifier(const std::string& s) {
  if (s.empty()) return false;
  if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_') return false;
  for (char ch : s)
    if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '_') return false;
  return true;
}

std::vector<std::string> tokenize(const std::string& line) {
  std::string padded;
  padded.reserve(line.size() + 4);
  for (char ch : line) {
    if (ch == ':') {
      padded += " : ";
    } else {
      padded += ch;
    }
  }
  std::istringstream is(padded);
  std::vector<std::string> tokens;
  std::string tok;
  while (is >> tok) tokens.push_back(tok);
  return tokens;
}

bool parse_unsigned(const std::string& s, unsigned& out) {
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out, 10);
  return ec == std::errc() && p == s.data() + s.size();
}

bool parse_hex(const std::string& s, std::uint64_t& out) {
  std::string_view v = s;
  if (v.size() > 2 && (v.substr(0, 2) == "0x" || v.substr(0, 2) == "0X"))
    v.remove_prefix(2);
  if (v.empty() || v.size() > 16) return false;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out, 16);
  return ec == std::errc() && p == v.data() + v.size();
}

std::string hex_string(std::uint64_t v) {
  char buf[20];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v, 16);
  (void)ec;
  return std::string(buf, p);
}

}  // namespace

ParseResult parse_design(std::string_view text) {
  ParseResult result;
  std::vector<Diagnostic>& diags = result.diagnostics;

  Design design;
  bool have_design_line = false;
  std::map<std::string, int> signal_lines;
  std::map<std::string, int> comp_lines;

  int lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    std::string line(text.substr(pos, eol == std::string_view::npos
                                          ? std::string_view::npos
                                          : eol - pos));
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (!line.empty() && line.back() == '\r') line.pop_back();

    std::vector<std::string> tok = tokenize(line);
    if (tok.empty()) continue;
    auto err = [&](const std::string& msg) { diags.push_back({lineno, msg}); };

    if (tok[0] == "design") {
      if (have_design_line) {
        err("syntax error: repeated design line");
      } else if (tok.size() != 2 || !is_identifier(tok[1])) {
        err("syntax error: expected 'design <name>'");
      } else {
        design.name = tok[1];
        have_design_line = true;
      }
      continue;
    }

    if (tok[0] == "input" || tok[0] == "output") {
      const bool is_input = tok[0] == "input";
      if (tok.size() != 4 || tok[2] != ":" || !is_identifier(tok[1])) {
        err("syntax error: expected '" + tok[0] + " <name> : <width>|clock'");
        continue;
      }
      Port p;
      p.name = tok[1];
      p.direction = is_input ? PortDirection::Input : PortDirection::Output;
      if (tok[3] == "clock") {
        p.kind = PortKind::Clock;
        p.width = 1;
        if (!is_input) {
          err("syntax error: clock ports must be inputs");
          continue;
        }
      } else if (!parse_unsigned(tok[3], p.width)) {
        err("syntax error: bad width '" + tok[3] + "'");
        continue;
      }
      if (signal_lines.count(p.name)) {
        err("duplicate identifier " + p.name);
        continue;
      }
      signal_lines[p.name] = lineno;
      design.ports.push_back(std::move(p));
      continue;
    }

    if (tok[0] == "wire") {
      if (tok.size() != 4 || tok[2] != ":" || !is_identifier(tok[1])) {
        err("syntax error: expected 'wire <name> : <width>'");
        continue;
      }
      Net n;
      n.name = tok[1];
      if (!parse_unsigned(tok[3], n.width)) {
        err("syntax error: bad width '" + tok[3] + "'");
        continue;
      }
      if (signal_lines.count(n.name)) {
        err("duplicate identifier " + n.name);
        continue;
      }
      signal_lines[n.name] = lineno;
      design.nets.push_back(std::move(n));
      continue;
    }

    if (tok[0] == "comp") {
      if (tok.size() < 4 || tok[2] != ":" || !is_identifier(tok[1])) {
        err("syntax error: expected 'comp <name> : <KIND> ...'");
        continue;
      }
      auto kind = kind_from_name(tok[3]);
      if (!kind) {
        err("syntax error: unknown kind '" + tok[3] + "'");
        continue;
      }
      Component c;
      c.name = tok[1];
      c.kind = *kind;
      const auto in_names = input_pin_names(c.kind);
      const auto out_names = output_pin_names(c.kind);
      std::map<std::string, std::string> pins;
      bool have_width = false, bad = false;
      for (std::size_t t = 4; t < tok.size(); ++t) {
        auto eq = tok[t].find('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 == tok[t].size()) {
          err("syntax error: expected '<key>=<value>', got '" + tok[t] + "'");
          bad = true;
          continue;
        }
        std::string key = tok[t].substr(0, eq);
        std::string value = tok[t].substr(eq + 1);
        if (key == "width") {
          if (have_width || !parse_unsigned(value, c.width)) {
            err("syntax error: bad width '" + value + "'");
            bad = true;
          }
          have_width = true;
        } else if (key == "clock") {
          if (c.kind != Kind::REG) {
            err("syntax error: clock= only valid on REG");
            bad = true;
          } else {
            c.clock = value;
          }
        } else if (key == "init") {
          if (c.kind != Kind::REG || !parse_hex(value, c.init)) {
            err(c.kind == Kind::REG
                    ? "syntax error: bad init value '" + value + "'"
                    : "syntax error: init= only valid on REG");
            bad = true;
          }
        } else if (key == "value") {
          if (c.kind != Kind::CONST || !parse_hex(value, c.literal)) {
            err(c.kind == Kind::CONST
                    ? "syntax error: bad value '" + value + "'"
                    : "syntax error: value= only valid on CONST");
            bad = true;
          }
        } else {
          bool known = false;
          for (const char* pn : in_names) known = known || key == pn;
          for (const char* pn : out_names) known = known || key == pn;
          if (!known) {
            err("syntax error: unknown attribute '" + key + "' for " +
                kind_name(c.kind));
            bad = true;
          } else if (!pins.emplace(key, value).second) {
            err("syntax error: repeated pin '" + key + "'");
            bad = true;
          }
        }
      }
      if (!have_width) {
        err("syntax error: comp " + c.name + " missing width=");
        bad = true;
      }
      for (const char* pn : in_names) {
        auto it = pins.find(pn);
        if (it == pins.end()) {
          err("syntax error: comp " + c.name + " missing pin " + pn);
          bad = true;
        } else {
          c.inputs.push_back(it->second);
        }
      }
      for (const char* pn : out_names) {
        auto it = pins.find(pn);
        if (it == pins.end()) {
          err("syntax error: comp " + c.name + " missing pin " + pn);
          bad = true;
        } else {
          c.outputs.push_back(it->second);
        }
      }
      if (bad) continue;
      if (comp_lines.count(c.name)) {
        err("duplicate identifier " + c.name);
        continue;
      }
      comp_lines[c.name] = lineno;
      design.components.push_back(std::move(c));
      continue;
    }

    err("syntax error: unknown directive '" + tok[0] + "'");
  }

  if (!have_design_line) diags.push_back({1, "syntax error: missing design line"});

  if (diags.empty()) {
    derive_clock_domains(design);
    auto vd = detail::validate_located(design, signal_lines, comp_lines);
    diags.insert(diags.end(), vd.begin(), vd.end());
  }
  if (diags.empty()) result.design = std::move(design);
  return result;
}

std::string emit_design_text(const Design& design) {
  std::string out;
  out += "design " + design.name + "\n";
  for (const Port& p : design.ports) {
    out += p.direction == PortDirection::Input ? "input " : "output ";
    out += p.name + " : ";
    out += p.kind == PortKind::Clock ? "clock" : std::to_string(p.width);
    out += "\n";
  }
  for (const Net& n : design.nets)
    out += "wire " + n.name + " : " + std::to_string(n.width) + "\n";
  for (const Component& c : design.components) {
    out += "comp " + c.name + " : " + kind_name(c.kind) +
           " width=" + std::to_string(c.width);
    if (c.kind == Kind::REG)
      out += " clock=" + c.clock + " init=0x" + hex_string(c.init);
    if (c.kind == Kind::CONST) out += " value=0x" + hex_string(c.literal);
    const auto in_names = input_pin_names(c.kind);
    const auto out_names = output_pin_names(c.kind);
    for (std::size_t i = 0; i < c.inputs.size(); ++i)
      out += " " + std::string(in_names[i]) + "=" + c.inputs[i];
    for (std::size_t i = 0; i < c.outputs.size(); ++i)
      out += " " + std::string(out_names[i]) + "=" + c.outputs[i];
    out += "\n";
  }
  return out;
}

}  // namespace pemu
