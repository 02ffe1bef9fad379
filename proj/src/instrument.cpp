#include "pemu/instrument.hpp"

#include <bit>
#include <charconv>
#include <sstream>

namespace pemu {

namespace {

std::string add_wire(Design& d, const std::string& name, unsigned width) {
  d.nets.push_back({name, width});
  return name;
}

Component& add_comp(Design& d, Component c) {
  d.components.push_back(std::move(c));
  return d.components.back();
}

Component make(const std::string& name, Kind kind, unsigned width,
               std::vector<std::string> ins, std::string out) {
  Component c;
  c.name = name;
  c.kind = kind;
  c.width = width;
  c.inputs = std::move(ins);
  c.outputs = {std::move(out)};
  return c;
}

}  // namespace

Monitor build_monitor(Design& design, const Component& target,
                      const Macromodel& model, const std::string& strobe_net,
                      const std::string& clock_port, const std::string& prefix) {
  if (model.kind != target.kind || model.width != target.width)
    throw Error("macromodel (" + std::string(kind_name(model.kind)) + " width " +
                std::to_string(model.width) + ") does not match comp " + target.name);
  const unsigned n = model.n;
  const std::string& p = prefix;

  // monitored bit sources: input pins then output pins, LSB first within a pin
  std::vector<std::string> bit_net(n);
  {
    struct PinRef {
      const std::string* net;
      unsigned width;
    };
    std::vector<PinRef> pins;
    const auto in_w = input_pin_widths(target.kind, target.width);
    const auto out_w = output_pin_widths(target.kind, target.width);
    for (std::size_t i = 0; i < target.inputs.size(); ++i)
      pins.push_back({&target.inputs[i], in_w[i]});
    for (std::size_t i = 0; i < target.outputs.size(); ++i)
      pins.push_back({&target.outputs[i], out_w[i]});

    unsigned bit = 0;
    for (const PinRef& pin : pins) {
      for (unsigned j = 0; j < pin.width; ++j, ++bit) {
        if (pin.width == 1) {
          bit_net[bit] = *pin.net;
          continue;
        }
        // no bit-select primitive: i-th bit = EQ(AND(x, 2^j), 2^j)
        const std::string idx = std::to_string(bit);
        Component k = make(p + "bk" + idx, Kind::CONST, pin.width, {},
                           add_wire(design, p + "bkn" + idx, pin.width));
        k.literal = std::uint64_t{1} << j;
        add_comp(design, std::move(k));
        add_comp(design, make(p + "ba" + idx, Kind::AND, pin.width,
                              {*pin.net, p + "bkn" + idx},
                              add_wire(design, p + "ban" + idx, pin.width)));
        add_comp(design, make(p + "bit" + idx, Kind::EQ, pin.width,
                              {p + "ban" + idx, p + "bkn" + idx},
                              add_wire(design, p + "bitn" + idx, 1)));
        bit_net[bit] = p + "bitn" + idx;
      }
    }
  }

  Component zero = make(p + "zero", Kind::CONST, kPowerNetWidth, {},
                        add_wire(design, p + "zeron", kPowerNetWidth));
  add_comp(design, std::move(zero));

  std::vector<std::string> masked(n);
  for (unsigned i = 0; i < n; ++i) {
    const std::string idx = std::to_string(i);

    // current-sample queue(1) and previous-sample queue(0); both hold unless
    // the strobe is high
    add_comp(design, make(p + "q1mux" + idx, Kind::MUX2, 1,
                          {p + "q1q" + idx, bit_net[i], strobe_net},
                          add_wire(design, p + "q1d" + idx, 1)));
    Component q1 = make(p + "q1_" + idx, Kind::REG, 1, {p + "q1d" + idx},
                        add_wire(design, p + "q1q" + idx, 1));
    q1.clock = clock_port;
    add_comp(design, std::move(q1));
    add_comp(design, make(p + "q0mux" + idx, Kind::MUX2, 1,
                          {p + "q0q" + idx, p + "q1q" + idx, strobe_net},
                          add_wire(design, p + "q0d" + idx, 1)));
    Component q0 = make(p + "q0_" + idx, Kind::REG, 1, {p + "q0d" + idx},
                        add_wire(design, p + "q0q" + idx, 1));
    q0.clock = clock_port;
    add_comp(design, std::move(q0));

    add_comp(design, make(p + "txor" + idx, Kind::XOR, 1,
                          {p + "q1q" + idx, p + "q0q" + idx},
                          add_wire(design, p + "tn" + idx, 1)));

    // mask stage: transition bit selects CONST 0 or the CONST coefficient
    Component coef = make(p + "coef" + idx, Kind::CONST, kPowerNetWidth, {},
                          add_wire(design, p + "coefn" + idx, kPowerNetWidth));
    coef.literal = model.fixed_coeffs[i];
    add_comp(design, std::move(coef));
    add_comp(design, make(p + "mask" + idx, Kind::MUX2, kPowerNetWidth,
                          {p + "zeron", p + "coefn" + idx, p + "tn" + idx},
                          add_wire(design, p + "maskn" + idx, kPowerNetWidth)));
    masked[i] = p + "maskn" + idx;
  }

  // balanced adder tree, n-1 ADDs, output net <prefix>power
  unsigned adder = 0;
  std::vector<std::string> level = std::move(masked);
  while (level.size() > 1) {
    std::vector<std::string> next;
    for (std::size_t i = 0; i + 1 < level.size(); i += 2) {
      const bool last = level.size() == 2;
      std::string out = last ? p + "power" : p + "sumn" + std::to_string(adder);
      add_comp(design, make(p + "sum" + std::to_string(adder), Kind::ADD,
                            kPowerNetWidth, {level[i], level[i + 1]},
                            add_wire(design, out, kPowerNetWidth)));
      next.push_back(std::move(out));
      ++adder;
    }
    if (level.size() % 2) next.push_back(level.back());
    level = std::move(next);
  }

  Monitor m;
  m.target = target.name;
  m.power_net = level.front();
  m.n = n;
  return m;
}

StrobeGenerator build_strobe_generator(Design& design, const ClockDomain& domain,
                                       unsigned period) {
  if (period == 0) throw Error("strobe period must be >= 1");
  const std::string p = "__pm_strobegen_" + domain.name + "_";
  const std::string strobe = "__pm_strobe_" + domain.name;

  StrobeGenerator g;
  g.domain = domain.name;
  g.period = period;
  g.strobe_net = strobe;

  if (period == 1) {
    Component one = make(p + "one", Kind::CONST, 1, {}, add_wire(design, strobe, 1));
    one.literal = 1;
    add_comp(design, std::move(one));
    return g;
  }

  const unsigned w = std::max(1u, static_cast<unsigned>(std::bit_width(period - 1)));
  Component one = make(p + "one", Kind::CONST, w, {}, add_wire(design, p + "onen", w));
  one.literal = 1;
  add_comp(design, std::move(one));
  Component zero = make(p + "zero", Kind::CONST, w, {}, add_wire(design, p + "zeron", w));
  add_comp(design, std::move(zero));
  Component last = make(p + "last", Kind::CONST, w, {}, add_wire(design, p + "lastn", w));
  last.literal = period - 1;
  add_comp(design, std::move(last));

  add_comp(design, make(p + "inc", Kind::ADD, w, {p + "cntq", p + "onen"},
                        add_wire(design, p + "incn", w)));
  add_comp(design, make(p + "eq", Kind::EQ, w, {p + "cntq", p + "lastn"},
                        add_wire(design, strobe, 1)));
  add_comp(design, make(p + "rst", Kind::MUX2, w,
                        {p + "incn", p + "zeron", strobe},
                        add_wire(design, p + "cntd", w)));
  Component cnt = make(p + "cnt", Kind::REG, w, {p + "cntd"},
                       add_wire(design, p + "cntq", w));
  cnt.clock = domain.clock_port;
  add_comp(design, std::move(cnt));
  return g;
}

Aggregator build_aggregator(Design& design, const std::vector<std::string>& taps,
                            const std::string& clock_port) {
  if (taps.empty()) throw Error("nothing to aggregate");
  const std::string p = "__pm_agg_";

  std::string acc = taps.front();
  for (std::size_t k = 1; k < taps.size(); ++k) {
    const std::string idx = std::to_string(k);
    add_comp(design, make(p + "add" + idx, Kind::ADD, kPowerNetWidth,
                          {acc, taps[k]},
                          add_wire(design, p + "sumn" + idx, kPowerNetWidth)));
    acc = p + "sumn" + idx;
  }
  Component reg = make(p + "reg", Kind::REG, kPowerNetWidth, {acc},
                       add_wire(design, "__pm_total", kPowerNetWidth));
  reg.clock = clock_port;
  add_comp(design, std::move(reg));

  Aggregator a;
  a.total_net = "__pm_total";
  a.taps = taps.size();
  return a;
}

InstrumentedDesign instrument_design(const Design& design,
                                     const MacromodelLibrary& library,
                                     const InstrumentConfig& config,
                                     std::vector<std::string>* warnings) {
  if (config.strobe_period == 0) throw Error("strobe period must be >= 1");
  {
    auto diags = validate(design);
    if (!diags.empty())
      throw Error("cannot instrument invalid design: " + diags.front().message);
  }
  auto reserved = [](const std::string& name) {
    return name.rfind(kReservedPrefix, 0) == 0;
  };
  for (const Port& p : design.ports)
    if (reserved(p.name))
      throw Error("reserved prefix __pm_ on port " + p.name +
                  " (design already instrumented?)");
  for (const Net& n : design.nets)
    if (reserved(n.name))
      throw Error("reserved prefix __pm_ on net " + n.name +
                  " (design already instrumented?)");
  for (const Component& c : design.components)
    if (reserved(c.name))
      throw Error("reserved prefix __pm_ on comp " + c.name +
                  " (design already instrumented?)");

  // resolve models up front so policy failures precede any mutation
  struct Target {
    const Component* comp;
    const Macromodel* model;
  };
  std::vector<Target> targets;
  for (const Component& c : design.components) {
    if (c.kind == Kind::CONST) continue;
    const Macromodel* m = library.find(c.kind, c.width);
    if (!m) {
      if (config.on_missing == MissingModelPolicy::Error)
        throw Error("no macromodel for comp " + c.name + " (" +
                    kind_name(c.kind) + " width " + std::to_string(c.width) + ")");
      if (warnings)
        warnings->push_back("no macromodel for comp " + c.name + " (" +
                            kind_name(c.kind) + " width " +
                            std::to_string(c.width) + "), skipped");
      continue;
    }
    targets.push_back({&c, m});
  }
  if (targets.empty()) throw Error("nothing to aggregate");
  if (design.clocks.size() != 1)
    throw Error("power instrumentation requires exactly one clock domain (design has " +
                std::to_string(design.clocks.size()) + ")");

  // capacity bound for the 48-bit accumulator
  {
    const std::uint64_t max_coeff = (std::uint64_t{1} << library.coeff_bits) - 1;
    std::uint64_t bits = 0;
    for (const Target& t : targets) bits += t.model->n;
    if (max_coeff > 0 && bits > ((std::uint64_t{1} << 48) - 1) / max_coeff)
      throw Error("monitored bit count " + std::to_string(bits) +
                  " exceeds 48-bit accumulator capacity at coeff_bits " +
                  std::to_string(library.coeff_bits));
  }

  InstrumentedDesign out;
  out.design = design;
  const ClockDomain domain = design.clocks.front();

  StrobeGenerator strobe =
      build_strobe_generator(out.design, domain, config.strobe_period);

  std::vector<std::string> tap_nets;
  for (const Target& t : targets) {
    Monitor m = build_monitor(out.design, *t.comp, *t.model, strobe.strobe_net,
                              domain.clock_port,
                              std::string(kReservedPrefix) + t.comp->name + "_");
    tap_nets.push_back(m.power_net);
    out.manifest.taps.push_back({m.target, m.power_net, m.n});
  }
  Aggregator agg = build_aggregator(out.design, tap_nets, domain.clock_port);

  derive_clock_domains(out.design);
  {
    auto diags = validate(out.design);
    if (!diags.empty())
      throw Error("internal: instrumented design fails validation: " +
                  diags.front().message);
  }

  out.manifest.lsb_exponent = library.lsb_exponent;
  out.manifest.coeff_bits = library.coeff_bits;
  out.manifest.strobe_domain = strobe.domain;
  out.manifest.strobe_net = strobe.strobe_net;
  out.manifest.strobe_period = strobe.period;
  out.manifest.total_net = agg.total_net;
  return out;
}

std::string emit_manifest(const Manifest& m) {
  std::string out;
  out += "config lsb=2^" + std::to_string(m.lsb_exponent) +
         " coeff_bits=" + std::to_string(m.coeff_bits) + "\n";
  out += "strobe " + m.strobe_domain + " " + m.strobe_net +
         " period=" + std::to_string(m.strobe_period) + "\n";
  out += "total " + m.total_net + "\n";
  for (const ManifestTap& t : m.taps)
    out += "tap " + t.component + " " + t.net + " n=" + std::to_string(t.n) + "\n";
  return out;
}

Manifest parse_manifest(std::string_view text) {
  Manifest m;
  bool have_config = false, have_strobe = false, have_total = false;

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
    auto keyval = [&](const std::string& s, const std::string& key) {
      if (s.rfind(key + "=", 0) != 0) fail("expected " + key + "=...");
      return s.substr(key.size() + 1);
    };
    auto to_unsigned = [&](const std::string& s) {
      unsigned v = 0;
      auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v, 10);
      if (ec != std::errc() || p != s.data() + s.size()) fail("bad number '" + s + "'");
      return v;
    };

    if (tok[0] == "config") {
      if (tok.size() != 3) fail("expected 'config lsb=2^<e> coeff_bits=<b>'");
      std::string lsb = keyval(tok[1], "lsb");
      if (lsb.rfind("2^", 0) != 0) fail("bad lsb '" + lsb + "'");
      try {
        m.lsb_exponent = std::stoi(lsb.substr(2));
      } catch (...) {
        fail("bad lsb '" + lsb + "'");
      }
      m.coeff_bits = to_unsigned(keyval(tok[2], "coeff_bits"));
      have_config = true;
    } else if (tok[0] == "strobe") {
      if (tok.size() != 4) fail("expected 'strobe <domain> <net> period=<S>'");
      m.strobe_domain = tok[1];
      m.strobe_net = tok[2];
      m.strobe_period = to_unsigned(keyval(tok[3], "period"));
      if (m.strobe_period == 0) fail("period must be >= 1");
      have_strobe = true;
    } else if (tok[0] == "total") {
      if (tok.size() != 2) fail("expected 'total <net>'");
      m.total_net = tok[1];
      have_total = true;
    } else if (tok[0] == "tap") {
      if (tok.size() != 4) fail("expected 'tap <component> <net> n=<bits>'");
      ManifestTap tap;
      tap.component = tok[1];
      tap.net = tok[2];
      tap.n = to_unsigned(keyval(tok[3], "n"));
      m.taps.push_back(std::move(tap));
    } else {
      fail("unknown directive '" + tok[0] + "'");
    }
  }
  if (!have_config) throw Error("manifest missing config line");
  if (!have_strobe) throw Error("manifest missing strobe line");
  if (!have_total) throw Error("manifest missing total line");
  if (m.taps.empty()) throw Error("manifest has no taps");
  return m;
}

}  // namespace pemu
