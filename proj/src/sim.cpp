#include "pemu/sim.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

namespace pemu {

StimulusTrace parse_stimulus(std::string_view text) {
  StimulusTrace trace;
  bool have_cycle = false;
  std::uint64_t last_cycle = 0;

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

    std::istringstream is(line);
    std::vector<std::string> tok;
    std::string t;
    while (is >> t) tok.push_back(t);
    if (tok.empty()) continue;
    auto fail = [&](const std::string& msg) {
      throw Error("line " + std::to_string(lineno) + ": " + msg);
    };

    std::uint64_t cycle = 0;
    {
      const std::string& s = tok[0];
      auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), cycle, 10);
      if (ec != std::errc() || p != s.data() + s.size())
        fail("bad cycle index '" + s + "'");
    }
    if (have_cycle && cycle <= last_cycle)
      fail("non-increasing cycle index " + std::to_string(cycle));
    last_cycle = cycle;
    have_cycle = true;
    if (tok.size() < 2) fail("expected at least one <port>=<hexvalue>");

    std::vector<std::string> seen;
    for (std::size_t i = 1; i < tok.size(); ++i) {
      auto eq = tok[i].find('=');
      if (eq == std::string::npos || eq == 0 || eq + 1 == tok[i].size())
        fail("expected '<port>=<hexvalue>', got '" + tok[i] + "'");
      std::string port = tok[i].substr(0, eq);
      std::string val = tok[i].substr(eq + 1);
      if (std::find(seen.begin(), seen.end(), port) != seen.end())
        fail("port " + port + " assigned twice in one cycle");
      seen.push_back(port);
      std::string_view v = val;
      if (v.size() > 2 && (v.substr(0, 2) == "0x" || v.substr(0, 2) == "0X"))
        v.remove_prefix(2);
      if (v.size() > 16) fail("value '" + val + "' exceeds 64 bits");
      std::uint64_t value = 0;
      auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), value, 16);
      if (v.empty() || ec != std::errc() || p != v.data() + v.size())
        fail("bad hex value '" + val + "'");
      trace.assignments.push_back({cycle, std::move(port), value});
    }
  }
  return trace;
}

std::string emit_stimulus_text(const StimulusTrace& trace) {
  std::string out;
  char buf[20];
  std::size_t i = 0;
  while (i < trace.assignments.size()) {
    const std::uint64_t cycle = trace.assignments[i].cycle;
    out += std::to_string(cycle);
    while (i < trace.assignments.size() && trace.assignments[i].cycle == cycle) {
      auto [p, ec] = std::to_chars(buf, buf + sizeof buf,
                                   trace.assignments[i].value, 16);
      (void)ec;
      out += " " + trace.assignments[i].port + "=0x" + std::string(buf, p);
      ++i;
    }
    out += "\n";
  }
  return out;
}

std::size_t ValueTrace::column(const std::string& net) const {
  auto it = std::find(nets.begin(), nets.end(), net);
  if (it == nets.end()) throw Error("net " + net + " not recorded in trace");
  return static_cast<std::size_t>(it - nets.begin());
}

bool ValueTrace::has(const std::string& net) const {
  return std::find(nets.begin(), nets.end(), net) != nets.end();
}

namespace {

struct Op {
  Kind kind;
  unsigned width;
  int in0 = -1, in1 = -1, in2 = -1;
  int out = -1;
  std::uint64_t literal = 0;
};

struct RegState {
  int d = -1;
  int q = -1;
  std::uint64_t next = 0;
};

}  // namespace

ValueTrace simulate(const Design& design, const StimulusTrace& stimulus,
                    std::uint64_t cycles, const std::vector<std::string>& record) {
  // signal table
  std::map<std::string, int> ids;
  std::vector<unsigned> widths;
  auto add_signal = [&](const std::string& name, unsigned width) {
    ids.emplace(name, static_cast<int>(widths.size()));
    widths.push_back(width);
  };
  for (const Port& p : design.ports) add_signal(p.name, p.width);
  for (const Net& n : design.nets) add_signal(n.name, n.width);
  auto id_of = [&](const std::string& name) {
    auto it = ids.find(name);
    if (it == ids.end()) throw Error("net " + name + " not declared");
    return it->second;
  };

  TopoResult topo = topo_order(design);
  if (!topo.cycle.empty())
    throw Error("combinational cycle through " + topo.cycle.front());

  std::vector<Op> plan;
  std::vector<RegState> regs;
  std::vector<std::uint64_t> value(widths.size(), 0);
  for (std::size_t i : topo.order) {
    const Component& c = design.components[i];
    Op op;
    op.kind = c.kind;
    op.width = c.width;
    op.literal = c.literal;
    if (c.inputs.size() > 0) op.in0 = id_of(c.inputs[0]);
    if (c.inputs.size() > 1) op.in1 = id_of(c.inputs[1]);
    if (c.inputs.size() > 2) op.in2 = id_of(c.inputs[2]);
    op.out = id_of(c.outputs[0]);
    plan.push_back(op);
  }
  for (const Component& c : design.components) {
    if (c.kind != Kind::REG) continue;
    RegState r;
    r.d = id_of(c.inputs[0]);
    r.q = id_of(c.outputs[0]);
    value[r.q] = mask_value(c.init, c.width);
    regs.push_back(r);
  }

  // bind stimulus
  struct BoundAssign {
    std::uint64_t cycle;
    int id;
    std::uint64_t value;
  };
  std::vector<BoundAssign> stim;
  {
    std::map<std::string, const Port*> inputs;
    for (const Port& p : design.ports) inputs[p.name] = &p;
    for (const auto& a : stimulus.assignments) {
      auto it = inputs.find(a.port);
      if (it == inputs.end() || it->second->direction != PortDirection::Input)
        throw Error("stimulus drives unknown input port " + a.port);
      if (it->second->kind == PortKind::Clock)
        throw Error("stimulus may not drive clock port " + a.port);
      if (a.value != mask_value(a.value, it->second->width))
        throw Error("stimulus value for " + a.port + " does not fit width " +
                    std::to_string(it->second->width));
      stim.push_back({a.cycle, id_of(a.port), a.value});
    }
  }

  ValueTrace trace;
  trace.nets = record;
  std::vector<int> cols;
  cols.reserve(record.size());
  for (const std::string& name : record) cols.push_back(id_of(name));

  std::size_t sp = 0;
  for (std::uint64_t cycle = 0; cycle < cycles; ++cycle) {
    while (sp < stim.size() && stim[sp].cycle == cycle) {
      value[stim[sp].id] = stim[sp].value;
      ++sp;
    }
    for (const Op& op : plan) {
      const unsigned w = op.width;
      std::uint64_t a = op.in0 >= 0 ? value[op.in0] : 0;
      std::uint64_t b = op.in1 >= 0 ? value[op.in1] : 0;
      std::uint64_t y = 0;
      switch (op.kind) {
        case Kind::ADD: y = mask_value(a + b, w); break;
        case Kind::SUB: y = mask_value(a - b, w); break;
        case Kind::MUX2: y = value[op.in2] ? b : a; break;
        case Kind::EQ: y = a == b; break;
        case Kind::LT: y = a < b; break;
        case Kind::AND: y = a & b; break;
        case Kind::OR: y = a | b; break;
        case Kind::XOR: y = a ^ b; break;
        case Kind::NOT: y = mask_value(~a, w); break;
        case Kind::SHL: y = b >= w ? 0 : mask_value(a << b, w); break;
        case Kind::SHR: y = b >= w ? 0 : a >> b; break;
        case Kind::CONST: y = op.literal; break;
        case Kind::REG: break;  // not in the combinational plan
      }
      value[op.out] = y;
    }
    std::vector<std::uint64_t> row(cols.size());
    for (std::size_t i = 0; i < cols.size(); ++i) row[i] = value[cols[i]];
    trace.rows.push_back(std::move(row));
    // commit: no evaluation in this cycle sees a value written here
    for (RegState& r : regs) r.next = value[r.d];
    for (RegState& r : regs) value[r.q] = r.next;
  }
  return trace;
}

std::string write_value_trace_csv(const ValueTrace& trace) {
  std::string out = "cycle";
  for (const std::string& n : trace.nets) out += "," + n;
  out += "\n";
  char buf[32];
  for (std::size_t c = 0; c < trace.rows.size(); ++c) {
    out += std::to_string(c);
    for (std::uint64_t v : trace.rows[c]) {
      auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v, 16);
      (void)ec;
      out += ",0x";
      out.append(buf, p);
    }
    out += "\n";
  }
  return out;
}

}  // namespace pemu
