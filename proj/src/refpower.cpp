#include "pemu/refpower.hpp"

#include <algorithm>
#include <cstdio>

namespace pemu {

namespace {

struct Target {
  const Component* comp;
  const Macromodel* model;
};

std::vector<Target> resolve_targets(const Design& design,
                                    const MacromodelLibrary& library,
                                    MissingModelPolicy on_missing,
                                    std::vector<std::string>* warnings) {
  std::vector<Target> targets;
  for (const Component& c : design.components) {
    if (c.kind == Kind::CONST) continue;
    const Macromodel* m = library.find(c.kind, c.width);
    if (!m) {
      if (on_missing == MissingModelPolicy::Error)
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
  return targets;
}

}  // namespace

std::vector<std::string> monitored_nets(const Design& design,
                                        const MacromodelLibrary& library,
                                        MissingModelPolicy on_missing) {
  auto targets = resolve_targets(design, library, on_missing, nullptr);
  std::vector<std::string> nets;
  auto add = [&nets](const std::string& n) {
    if (std::find(nets.begin(), nets.end(), n) == nets.end()) nets.push_back(n);
  };
  for (const Target& t : targets) {
    for (const std::string& n : t.comp->inputs) add(n);
    for (const std::string& n : t.comp->outputs) add(n);
  }
  return nets;
}

PowerTrace estimate_power_from_trace(const Design& design,
                                     const MacromodelLibrary& library,
                                     const ValueTrace& trace,
                                     const EstimatorConfig& config,
                                     std::vector<std::string>* warnings) {
  if (config.strobe_period == 0) throw Error("strobe period must be >= 1");
  auto targets = resolve_targets(design, library, config.on_missing, warnings);
  if (targets.empty()) throw Error("nothing to aggregate");

  PowerTrace out;
  out.mode = config.mode;
  out.lsb_exponent = library.lsb_exponent;
  out.strobe_period = config.strobe_period;

  // per target: the (column, width) of each interface pin
  struct Probe {
    const Macromodel* model;
    std::vector<std::pair<std::size_t, unsigned>> pins;
  };
  std::vector<Probe> probes;
  for (const Target& t : targets) {
    out.components.push_back(t.comp->name);
    Probe p;
    p.model = t.model;
    const auto in_w = input_pin_widths(t.comp->kind, t.comp->width);
    const auto out_w = output_pin_widths(t.comp->kind, t.comp->width);
    for (std::size_t i = 0; i < t.comp->inputs.size(); ++i)
      p.pins.emplace_back(trace.column(t.comp->inputs[i]), in_w[i]);
    for (std::size_t i = 0; i < t.comp->outputs.size(); ++i)
      p.pins.emplace_back(trace.column(t.comp->outputs[i]), out_w[i]);
    probes.push_back(std::move(p));
  }

  auto sample = [&trace](const Probe& p, std::uint64_t cycle,
                         std::vector<std::uint8_t>& bits) {
    bits.clear();
    for (const auto& [col, width] : p.pins) {
      const std::uint64_t v = trace.at(cycle, col);
      for (unsigned j = 0; j < width; ++j)
        bits.push_back(static_cast<std::uint8_t>((v >> j) & 1));
    }
  };

  const std::uint64_t cycles = trace.rows.size();
  const unsigned S = config.strobe_period;
  std::vector<std::vector<std::uint8_t>> prev(probes.size());
  std::vector<std::uint8_t> cur;
  for (std::size_t i = 0; i < probes.size(); ++i)
    prev[i].assign(probes[i].model->n, 0);  // hardware queues initialize to 0

  for (std::uint32_t k = 0;; ++k) {
    const std::uint64_t strobe_cycle = std::uint64_t{k + 1} * S - 1;
    if (strobe_cycle + 2 >= cycles) break;  // match the emulation read-out window
    PowerTrace::Row row;
    row.strobe = k;
    row.warmup = k == 0;
    double total = 0;
    for (std::size_t i = 0; i < probes.size(); ++i) {
      sample(probes[i], strobe_cycle, cur);
      double p = config.mode == PowerTrace::Mode::Fixed
                     ? static_cast<double>(model_power(*probes[i].model, prev[i], cur))
                     : model_power_float(*probes[i].model, prev[i], cur);
      row.power.push_back(p);
      total += p;
      prev[i] = cur;
    }
    row.total = total;
    out.rows.push_back(std::move(row));
  }
  return out;
}

PowerTrace estimate_power(const Design& design, const MacromodelLibrary& library,
                          const StimulusTrace& stimulus, std::uint64_t cycles,
                          const EstimatorConfig& config,
                          std::vector<std::string>* warnings) {
  std::vector<std::string> record =
      monitored_nets(design, library, config.on_missing);
  ValueTrace trace = simulate(design, stimulus, cycles, record);
  return estimate_power_from_trace(design, library, trace, config, warnings);
}

TraceDiff compare_traces(const PowerTrace& a, const PowerTrace& b,
                         double tolerance, bool include_warmup) {
  if (a.components != b.components)
    throw Error("trace schema mismatch: component columns differ");
  if (a.strobe_period != 0 && b.strobe_period != 0 &&
      a.strobe_period != b.strobe_period)
    throw Error("trace schema mismatch: strobe periods differ (" +
                std::to_string(a.strobe_period) + " vs " +
                std::to_string(b.strobe_period) + ")");
  if (a.lsb_exponent != b.lsb_exponent)
    throw Error("trace schema mismatch: lsb differs");

  auto in_fixed_units = [](const PowerTrace& t, double v) {
    return t.mode == PowerTrace::Mode::Fixed ? v : v / t.lsb();
  };

  TraceDiff diff;
  diff.tolerance = tolerance;
  const std::size_t rows = std::min(a.rows.size(), b.rows.size());
  for (std::size_t r = 0; r < rows; ++r) {
    const PowerTrace::Row& ra = a.rows[r];
    const PowerTrace::Row& rb = b.rows[r];
    if (!include_warmup && (ra.warmup || rb.warmup)) continue;
    ++diff.rows_compared;
    for (std::size_t c = 0; c <= a.components.size(); ++c) {
      const bool is_total = c == a.components.size();
      double va = in_fixed_units(a, is_total ? ra.total : ra.power[c]);
      double vb = in_fixed_units(b, is_total ? rb.total : rb.power[c]);
      double d = std::fabs(va - vb);
      if (d > 0 && !diff.first_mismatch)
        diff.first_mismatch = {ra.strobe,
                               is_total ? std::string("total") : a.components[c]};
      diff.max_abs_diff = std::max(diff.max_abs_diff, d);
    }
  }
  return diff;
}

std::string render_diff(const TraceDiff& diff) {
  char buf[160];
  if (diff.first_mismatch) {
    std::snprintf(buf, sizeof buf,
                  "max diff %.10g fixed units (first mismatch at strobe %u, %s); "
                  "rows compared %zu",
                  diff.max_abs_diff, diff.first_mismatch->first,
                  diff.first_mismatch->second.c_str(), diff.rows_compared);
  } else {
    std::snprintf(buf, sizeof buf, "max diff 0; rows compared %zu",
                  diff.rows_compared);
  }
  return buf;
}

}  // namespace pemu
