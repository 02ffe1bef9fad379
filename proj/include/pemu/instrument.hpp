#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "pemu/macromodel.hpp"
#include "pemu/netlist.hpp"

namespace pemu {

/// Width of every monitor power output, the aggregator, and the total net.
/// With coeff_bits <= 32 and a bounded monitored-bit count (checked at
/// instrumentation time) a per-strobe total cannot reach 2^48.
inline constexpr unsigned kPowerNetWidth = 48;

/// All inserted names start with this; instrumenting a design that already
/// contains it is refused.
inline constexpr const char* kReservedPrefix = "__pm_";

/// Summary of one inserted power model. Per monitored bit the subcircuit
/// holds a current/previous sample queue pair (REGs, loaded only while the
/// strobe is high), a transition XOR, and a mask stage selecting CONST 0 or
/// the CONST coefficient; a balanced adder tree sums the masked values into
/// power_net. power_net equals model_power(model, previous sample, current
/// sample) one cycle after each strobe.
struct Monitor {
  std::string target;
  std::string power_net;
  unsigned n = 0;
};

struct StrobeGenerator {
  std::string domain;
  unsigned period = 1;
  std::string strobe_net;  // high exactly on cycles S-1, 2S-1, ...
};

struct Aggregator {
  std::string total_net;  // registered sum of the taps, one cycle behind
  std::size_t taps = 0;
};

struct ManifestTap {
  std::string component;
  std::string net;
  unsigned n = 0;

  bool operator==(const ManifestTap&) const = default;
};

/// Maps monitored components to aggregator taps; written next to the
/// instrumented netlist so the emulation side can locate the power nets.
/// Row 0 of any extracted trace is a warm-up sample (queues initialize to
/// zero, not to a real prior sample).
struct Manifest {
  int lsb_exponent = -8;
  unsigned coeff_bits = 16;
  std::string strobe_domain;
  std::string strobe_net;
  unsigned strobe_period = 1;
  std::string total_net;
  std::vector<ManifestTap> taps;

  bool operator==(const Manifest&) const = default;
};

struct InstrumentedDesign {
  Design design;
  Manifest manifest;
};

enum class MissingModelPolicy { Error, Skip };

struct InstrumentConfig {
  unsigned strobe_period = 1;
  MissingModelPolicy on_missing = MissingModelPolicy::Error;
};

/// Appends one power model subcircuit for `target` to `design`. All added
/// names carry `prefix`. Requires model.kind/width to match the target.
Monitor build_monitor(Design& design, const Component& target,
                      const Macromodel& model, const std::string& strobe_net,
                      const std::string& clock_port, const std::string& prefix);

/// Appends a strobe generator for the domain: counter, EQ against
/// CONST(period-1), reset mux. period 1 degenerates to a constant-high net.
StrobeGenerator build_strobe_generator(Design& design, const ClockDomain& domain,
                                       unsigned period);

/// Appends a left-fold chain of width-48 ADDs over the taps followed by one
/// register; the registered sum is the design's total power net.
Aggregator build_aggregator(Design& design, const std::vector<std::string>& taps,
                            const std::string& clock_port);

/// The netlist-to-netlist pass: one monitor per non-CONST original
/// component, one strobe generator, one aggregator. The original ports,
/// nets, and components are preserved verbatim; the result passes full
/// Design validation. Requires exactly one clock domain.
InstrumentedDesign instrument_design(const Design& design,
                                     const MacromodelLibrary& library,
                                     const InstrumentConfig& config,
                                     std::vector<std::string>* warnings = nullptr);

/// Manifest text format (.pmm).
std::string emit_manifest(const Manifest& manifest);
Manifest parse_manifest(std::string_view text);

}  // namespace pemu
