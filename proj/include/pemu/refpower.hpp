#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pemu/macromodel.hpp"
#include "pemu/netlist.hpp"
#include "pemu/power_trace.hpp"
#include "pemu/sim.hpp"

namespace pemu {

struct EstimatorConfig {
  PowerTrace::Mode mode = PowerTrace::Mode::Fixed;
  unsigned strobe_period = 1;
  MissingModelPolicy on_missing = MissingModelPolicy::Error;
};

/// Software reference estimator: simulates the plain (uninstrumented) design
/// and evaluates each component's macromodel between consecutive strobe
/// samples. The first sample's baseline is all-zero, mirroring the hardware
/// queue initialization, and rows cover the same strobe set the emulation
/// read-out covers, so fixed-mode output equals the extracted emulation
/// trace row for row.
PowerTrace estimate_power(const Design& design, const MacromodelLibrary& library,
                          const StimulusTrace& stimulus, std::uint64_t cycles,
                          const EstimatorConfig& config,
                          std::vector<std::string>* warnings = nullptr);

/// Same computation over a pre-recorded value trace; the trace must hold
/// every interface net of every monitored component.
PowerTrace estimate_power_from_trace(const Design& design,
                                     const MacromodelLibrary& library,
                                     const ValueTrace& trace,
                                     const EstimatorConfig& config,
                                     std::vector<std::string>* warnings = nullptr);

/// Interface nets of all components the estimator would monitor; the record
/// list estimate_power_from_trace needs.
std::vector<std::string> monitored_nets(const Design& design,
                                        const MacromodelLibrary& library,
                                        MissingModelPolicy on_missing);

struct TraceDiff {
  double max_abs_diff = 0;  // fixed units
  std::optional<std::pair<std::uint32_t, std::string>> first_mismatch;
  std::size_t rows_compared = 0;
  double tolerance = 0;  // fixed units

  bool passed() const { return max_abs_diff <= tolerance; }
};

/// Element-wise comparison in fixed units (float-mode values are divided by
/// the lsb). Warm-up rows are skipped unless include_warmup. Requires equal
/// component columns, equal lsb, and equal strobe period (where both are
/// known); rows beyond the shorter trace are ignored.
TraceDiff compare_traces(const PowerTrace& a, const PowerTrace& b,
                         double tolerance = 0, bool include_warmup = false);

std::string render_diff(const TraceDiff& diff);

}  // namespace pemu
