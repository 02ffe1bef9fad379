#include "pemu/report.hpp"

#include <algorithm>
#include <cstdio>

namespace pemu {

RunReport build_report(const PowerTrace& trace) {
  RunReport report;
  report.strobe_period = trace.strobe_period;
  report.lsb_exponent = trace.lsb_exponent;
  const double unit = trace.mode == PowerTrace::Mode::Fixed ? trace.lsb() : 1.0;

  std::vector<double> sums(trace.components.size(), 0.0);
  double total_sum = 0;
  bool have_peak = false;
  for (const PowerTrace::Row& row : trace.rows) {
    if (row.warmup) continue;
    ++report.rows_used;
    for (std::size_t i = 0; i < sums.size(); ++i) sums[i] += row.power[i];
    total_sum += row.total;
    const double total_uw = row.total * unit;
    if (!have_peak || total_uw > report.peak_uw) {
      report.peak_uw = total_uw;
      report.peak_strobe = row.strobe;
      have_peak = true;
    }
  }
  if (report.rows_used == 0) throw Error("no usable samples");

  report.total_avg_uw =
      total_sum * unit / static_cast<double>(report.rows_used);
  for (std::size_t i = 0; i < sums.size(); ++i) {
    RunReport::Entry e;
    e.name = trace.components[i];
    e.avg_uw = sums[i] * unit / static_cast<double>(report.rows_used);
    e.pct = report.total_avg_uw > 0 ? 100.0 * e.avg_uw / report.total_avg_uw : 0.0;
    report.entries.push_back(std::move(e));
  }
  std::sort(report.entries.begin(), report.entries.end(),
            [](const RunReport::Entry& a, const RunReport::Entry& b) {
              if (a.avg_uw != b.avg_uw) return a.avg_uw > b.avg_uw;
              return a.name < b.name;
            });
  return report;
}

std::string render_report(const RunReport& report, const std::string& source) {
  char buf[256];
  std::string out = "power report: " + source + "\n";
  std::snprintf(buf, sizeof buf,
                "rows %zu (non-warm-up), strobe period %u, lsb 2^%d uW\n",
                report.rows_used, report.strobe_period, report.lsb_exponent);
  out += buf;
  std::snprintf(buf, sizeof buf, "total: avg %.6g uW, peak %.6g uW (strobe %u)\n",
                report.total_avg_uw, report.peak_uw, report.peak_strobe);
  out += buf;
  std::size_t rank = 1;
  for (const RunReport::Entry& e : report.entries) {
    std::snprintf(buf, sizeof buf, "%4zu. %s  avg %.6g uW  (%.1f%%)\n", rank++,
                  e.name.c_str(), e.avg_uw, e.pct);
    out += buf;
  }
  return out;
}

}  // namespace pemu
