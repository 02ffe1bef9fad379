#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "pemu/instrument.hpp"
#include "pemu/sim.hpp"

namespace pemu {

/// Per-strobe power samples, one column per monitored component plus the
/// total. Fixed mode stores power-LSB units as exact integers (they fit a
/// double without rounding below 2^53); float mode stores microwatts.
struct PowerTrace {
  enum class Mode { Fixed, Float };

  struct Row {
    std::uint32_t strobe = 0;
    std::vector<double> power;
    double total = 0;
    bool warmup = false;

    bool operator==(const Row&) const = default;
  };

  Mode mode = Mode::Fixed;
  int lsb_exponent = -8;
  unsigned strobe_period = 1;
  std::vector<std::string> components;
  std::vector<Row> rows;

  double lsb() const { return std::ldexp(1.0, lsb_exponent); }

  bool operator==(const PowerTrace&) const = default;
};

/// Reads the emulation results out of a value trace: each tap net one cycle
/// after its strobe, the total net two cycles after (the monitor pipeline
/// latency). Rows exist only for strobes whose read-out fits in the trace;
/// a too-short trace yields an empty-row result. Row 0 is the warm-up
/// sample. Throws if the trace is missing a manifest net.
PowerTrace extract_power_trace(const ValueTrace& trace, const Manifest& manifest);

/// CSV with `# lsb=...`, `# strobe-period=...`, `# mode=...` sidecar lines,
/// header `strobe,<component>,...,total,warmup`, decimal values, LF endings.
std::string write_power_trace_csv(const PowerTrace& trace);

/// strobe_period reads back as 0 when the file carries no period sidecar.
PowerTrace parse_power_trace_csv(std::string_view text);

}  // namespace pemu
