#pragma once

#include <string>
#include <vector>

#include "pemu/power_trace.hpp"

namespace pemu {

/// Per-component power summary over the non-warm-up rows of a trace.
struct RunReport {
  struct Entry {
    std::string name;
    double avg_uw = 0;
    double pct = 0;  // share of the total average
  };

  std::vector<Entry> entries;  // descending by average, ties by name
  double total_avg_uw = 0;
  double peak_uw = 0;
  std::uint32_t peak_strobe = 0;
  std::size_t rows_used = 0;
  unsigned strobe_period = 0;
  int lsb_exponent = -8;
};

/// Throws Error("no usable samples") when no non-warm-up row exists.
RunReport build_report(const PowerTrace& trace);

std::string render_report(const RunReport& report, const std::string& source);

}  // namespace pemu
