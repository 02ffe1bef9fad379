#include "pemu/netlist.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <queue>
#include <set>

namespace pemu {

namespace {

struct KindInfo {
  const char* name;
  std::vector<const char*> ins;
  std::vector<const char*> outs;
};

const KindInfo& kind_info(Kind k) {
  static const KindInfo table[kNumKinds] = {
      {"REG", {"d"}, {"q"}},
      {"ADD", {"a", "b"}, {"y"}},
      {"SUB", {"a", "b"}, {"y"}},
      {"MUX2", {"a", "b", "sel"}, {"y"}},
      {"EQ", {"a", "b"}, {"y"}},
      {"LT", {"a", "b"}, {"y"}},
      {"AND", {"a", "b"}, {"y"}},
      {"OR", {"a", "b"}, {"y"}},
      {"XOR", {"a", "b"}, {"y"}},
      {"NOT", {"a"}, {"y"}},
      {"SHL", {"a", "s"}, {"y"}},
      {"SHR", {"a", "s"}, {"y"}},
      {"CONST", {}, {"y"}},
  };
  return table[static_cast<int>(k)];
}

}  // namespace

const char* kind_name(Kind k) { return kind_info(k).name; }

std::optional<Kind> kind_from_name(const std::string& name) {
  for (int i = 0; i < kNumKinds; ++i) {
    if (name == kind_info(static_cast<Kind>(i)).name) return static_cast<Kind>(i);
  }
  return std::nullopt;
}

unsigned shift_amount_width(unsigned w) {
  return std::max(1u, static_cast<unsigned>(std::bit_width(w - 1)));
}

std::vector<const char*> input_pin_names(Kind k) { return kind_info(k).ins; }
std::vector<const char*> output_pin_names(Kind k) { return kind_info(k).outs; }

std::vector<unsigned> input_pin_widths(Kind k, unsigned w) {
  switch (k) {
    case Kind::REG: return {w};
    case Kind::ADD:
    case Kind::SUB:
    case Kind::AND:
    case Kind::OR:
    case Kind::XOR: return {w, w};
    case Kind::MUX2: return {w, w, 1};
    case Kind::EQ:
    case Kind::LT: return {w, w};
    case Kind::NOT: return {w};
    case Kind::SHL:
    case Kind::SHR: return {w, shift_amount_width(w)};
    case Kind::CONST: return {};
  }
  return {};
}

std::vector<unsigned> output_pin_widths(Kind k, unsigned w) {
  switch (k) {
    case Kind::EQ:
    case Kind::LT: return {1};
    default: return {w};
  }
}

unsigned monitored_bits(Kind k, unsigned width) {
  unsigned n = 0;
  for (unsigned w : input_pin_widths(k, width)) n += w;
  for (unsigned w : output_pin_widths(k, width)) n += w;
  return n;
}

std::uint64_t mask_value(std::uint64_t value, unsigned width) {
  if (width >= 64) return value;
  return value & ((std::uint64_t{1} << width) - 1);
}

void derive_clock_domains(Design& design) {
  design.clocks.clear();
  for (const Port& p : design.ports) {
    if (p.kind == PortKind::Clock) design.clocks.push_back({p.name, p.name});
  }
}

namespace {

struct SignalInfo {
  unsigned width = 0;
  bool is_clock = false;
  bool is_input_port = false;
  int drivers = 0;
};

int line_of(const std::map<std::string, int>& lines, const std::string& name) {
  auto it = lines.find(name);
  return it == lines.end() ? 0 : it->second;
}

}  // namespace

std::vector<Diagnostic> validate(const Design& design) {
  return detail::validate_located(design, {}, {});
}

std::vector<Diagnostic> detail::validate_located(
    const Design& design, const std::map<std::string, int>& signal_lines,
    const std::map<std::string, int>& comp_lines) {
  std::vector<Diagnostic> diags;
  auto sig_err = [&](const std::string& name, const std::string& msg) {
    diags.push_back({line_of(signal_lines, name), msg});
  };
  auto comp_err = [&](const std::string& name, const std::string& msg) {
    diags.push_back({line_of(comp_lines, name), msg});
  };

  // signal table: ports and wires share one namespace
  std::map<std::string, SignalInfo> signals;
  for (const Port& p : design.ports) {
    if (signals.count(p.name)) {
      sig_err(p.name, "duplicate identifier " + p.name);
      continue;
    }
    SignalInfo si;
    si.width = p.width;
    si.is_clock = p.kind == PortKind::Clock;
    si.is_input_port = p.direction == PortDirection::Input;
    si.drivers = si.is_input_port ? 1 : 0;
    signals[p.name] = si;
    if (p.kind == PortKind::Clock &&
        (p.width != 1 || p.direction != PortDirection::Input)) {
      sig_err(p.name, "clock port " + p.name + " must be a width-1 input");
    }
    if (p.width < 1 || p.width > kMaxNetWidth) {
      sig_err(p.name, "width mismatch: port " + p.name + " width " +
                          std::to_string(p.width) + " outside 1.." +
                          std::to_string(kMaxNetWidth));
    }
  }
  for (const Net& n : design.nets) {
    if (signals.count(n.name)) {
      sig_err(n.name, "duplicate identifier " + n.name);
      continue;
    }
    SignalInfo si;
    si.width = n.width;
    signals[n.name] = si;
    if (n.width < 1 || n.width > kMaxNetWidth) {
      sig_err(n.name, "width mismatch: wire " + n.name + " width " +
                          std::to_string(n.width) + " outside 1.." +
                          std::to_string(kMaxNetWidth));
    }
  }

  std::set<std::string> comp_names;
  std::set<std::string> clock_ports;
  for (const ClockDomain& cd : design.clocks) clock_ports.insert(cd.clock_port);

  for (const Component& c : design.components) {
    if (!comp_names.insert(c.name).second) {
      comp_err(c.name, "duplicate identifier " + c.name);
      continue;
    }
    if (c.width < 1 || c.width > kMaxNetWidth) {
      comp_err(c.name, "width mismatch: comp " + c.name + " width " +
                           std::to_string(c.width) + " outside 1.." +
                           std::to_string(kMaxNetWidth));
      continue;
    }
    const auto in_w = input_pin_widths(c.kind, c.width);
    const auto out_w = output_pin_widths(c.kind, c.width);
    if (c.inputs.size() != in_w.size() || c.outputs.size() != out_w.size()) {
      comp_err(c.name, "width mismatch: comp " + c.name +
                           " has wrong pin count for " + kind_name(c.kind));
      continue;
    }
    auto check_pin = [&](const std::string& net, unsigned want, bool is_input,
                         const char* pin) {
      auto it = signals.find(net);
      if (it == signals.end()) {
        comp_err(c.name, "undeclared net " + net);
        return;
      }
      if (it->second.width != want) {
        comp_err(c.name, "width mismatch: pin " + std::string(pin) + " of comp " +
                             c.name + " expects width " + std::to_string(want) +
                             ", net " + net + " is " +
                             std::to_string(it->second.width));
      }
      if (is_input && it->second.is_clock) {
        comp_err(c.name, "width mismatch: clock net " + net +
                             " cannot feed data pin " + std::string(pin) +
                             " of comp " + c.name);
      }
      if (!is_input) {
        if (it->second.is_clock || it->second.is_input_port ||
            ++it->second.drivers > 1) {
          comp_err(c.name, "multiple drivers for net " + net);
        }
      }
    };
    const auto in_names = input_pin_names(c.kind);
    const auto out_names = output_pin_names(c.kind);
    for (std::size_t i = 0; i < c.inputs.size(); ++i)
      check_pin(c.inputs[i], in_w[i], true, in_names[i]);
    for (std::size_t i = 0; i < c.outputs.size(); ++i)
      check_pin(c.outputs[i], out_w[i], false, out_names[i]);

    if (c.kind == Kind::REG) {
      if (c.clock.empty()) {
        comp_err(c.name, "comp " + c.name + " (REG) has no clock");
      } else if (!clock_ports.count(c.clock)) {
        comp_err(c.name, "comp " + c.name + " clock " + c.clock +
                             " is not a declared clock port");
      }
      if (c.init != mask_value(c.init, c.width)) {
        comp_err(c.name, "width mismatch: comp " + c.name +
                             " init does not fit width " + std::to_string(c.width));
      }
    } else if (!c.clock.empty()) {
      comp_err(c.name, "comp " + c.name + " (" + kind_name(c.kind) +
                           ") cannot have a clock");
    }
    if (c.kind == Kind::CONST && c.literal != mask_value(c.literal, c.width)) {
      comp_err(c.name, "width mismatch: comp " + c.name +
                           " value does not fit width " + std::to_string(c.width));
    }
  }

  for (const auto& [name, si] : signals) {
    if (si.is_clock) continue;  // clock ports: driven implicitly, never read as data
    if (si.drivers == 0) sig_err(name, "undriven net " + name);
  }

  if (diags.empty()) {
    TopoResult topo = topo_order(design);
    if (!topo.cycle.empty()) {
      std::string path;
      for (const std::string& s : topo.cycle) {
        if (!path.empty()) path += " -> ";
        path += s;
      }
      comp_err(topo.cycle.front(), "combinational cycle: " + path);
    }
  }
  return diags;
}

TopoResult topo_order(const Design& design) {
  TopoResult result;
  const std::size_t nc = design.components.size();

  // net name -> driving combinational component index
  std::map<std::string, std::size_t> comb_driver;
  std::vector<bool> comb(nc, false);
  for (std::size_t i = 0; i < nc; ++i) {
    const Component& c = design.components[i];
    if (c.kind == Kind::REG) continue;
    comb[i] = true;
    for (const std::string& out : c.outputs) comb_driver.emplace(out, i);
  }

  std::vector<std::vector<std::size_t>> users(nc);
  std::vector<std::size_t> pending(nc, 0);
  for (std::size_t i = 0; i < nc; ++i) {
    if (!comb[i]) continue;
    for (const std::string& in : design.components[i].inputs) {
      auto it = comb_driver.find(in);
      if (it != comb_driver.end() && it->second != i) {
        users[it->second].push_back(i);
        ++pending[i];
      } else if (it != comb_driver.end() && it->second == i) {
        ++pending[i];  // self loop
      }
    }
  }

  // Kahn's algorithm; the ready set is drained in declaration order.
  std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
  for (std::size_t i = 0; i < nc; ++i)
    if (comb[i] && pending[i] == 0) ready.push(i);
  while (!ready.empty()) {
    std::size_t i = ready.top();
    ready.pop();
    result.order.push_back(i);
    for (std::size_t u : users[i])
      if (--pending[u] == 0) ready.push(u);
  }

  std::size_t comb_count = 0;
  for (std::size_t i = 0; i < nc; ++i) comb_count += comb[i];
  if (result.order.size() != comb_count) {
    // walk the leftover subgraph until a component repeats
    std::vector<bool> placed(nc, false);
    for (std::size_t i : result.order) placed[i] = true;
    std::size_t start = 0;
    while (start < nc && (!comb[start] || placed[start] || pending[start] == 0))
      ++start;
    std::vector<std::size_t> path;
    std::vector<int> seen(nc, -1);
    std::size_t cur = start;
    while (seen[cur] < 0) {
      seen[cur] = static_cast<int>(path.size());
      path.push_back(cur);
      // follow any unsatisfied input edge
      std::size_t next = cur;
      for (const std::string& in : design.components[cur].inputs) {
        auto it = comb_driver.find(in);
        if (it != comb_driver.end() && !placed[it->second]) {
          next = it->second;
          break;
        }
      }
      cur = next;
    }
    for (std::size_t k = seen[cur]; k < path.size(); ++k)
      result.cycle.push_back(design.components[path[k]].name);
    result.cycle.push_back(design.components[cur].name);  // close the loop
    result.order.clear();
  }
  return result;
}

}  // namespace pemu
