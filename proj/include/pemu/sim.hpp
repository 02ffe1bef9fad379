#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "pemu/netlist.hpp"

namespace pemu {

/// Per-cycle primary-input assignments. Between explicit assignments an
/// input holds its last value; unassigned inputs start at 0. Clock ports are
/// ticked implicitly, one tick per simulated cycle, and may not be assigned.
struct StimulusTrace {
  struct Assignment {
    std::uint64_t cycle = 0;
    std::string port;
    std::uint64_t value = 0;

    bool operator==(const Assignment&) const = default;
  };
  std::vector<Assignment> assignments;  // nondecreasing cycle order

  /// One past the last assigned cycle (0 for an empty trace).
  std::uint64_t cycles() const {
    return assignments.empty() ? 0 : assignments.back().cycle + 1;
  }

  bool operator==(const StimulusTrace&) const = default;
};

/// Stimulus format (.stim): `<cycle> <port>=<hexvalue> ...` per line, `#`
/// comments, cycle indices strictly increasing. Throws Error on malformed
/// lines; port names are checked later, when the trace is bound to a design.
StimulusTrace parse_stimulus(std::string_view text);

/// Canonical stimulus emission, one line per assigned cycle.
std::string emit_stimulus_text(const StimulusTrace& trace);

struct ValueTrace {
  std::vector<std::string> nets;
  std::vector<std::vector<std::uint64_t>> rows;  // [cycle][net column]

  std::size_t column(const std::string& net) const;  // throws if absent
  bool has(const std::string& net) const;
  std::uint64_t at(std::size_t cycle, std::size_t col) const {
    return rows[cycle][col];
  }
};

/// Cycle-accurate two-valued simulation. Per cycle: apply stimulus, evaluate
/// the combinational components in topological order with wrapping unsigned
/// arithmetic at net width, record the requested nets, then commit all
/// register next-states at once. Deterministic.
ValueTrace simulate(const Design& design, const StimulusTrace& stimulus,
                    std::uint64_t cycles, const std::vector<std::string>& record);

/// CSV export: header `cycle,<net>,...`, hex values.
std::string write_value_trace_csv(const ValueTrace& trace);

}  // namespace pemu
