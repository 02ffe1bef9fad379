#include "pemu/power_trace.hpp"

#include <cstdio>
#include <cstdlib>
#include <sstream>

namespace pemu {

PowerTrace extract_power_trace(const ValueTrace& trace, const Manifest& manifest) {
  PowerTrace out;
  out.mode = PowerTrace::Mode::Fixed;
  out.lsb_exponent = manifest.lsb_exponent;
  out.strobe_period = manifest.strobe_period;

  std::vector<std::size_t> tap_cols;
  for (const ManifestTap& t : manifest.taps) {
    out.components.push_back(t.component);
    tap_cols.push_back(trace.column(t.net));
  }
  const std::size_t total_col = trace.column(manifest.total_net);

  const std::uint64_t cycles = trace.rows.size();
  const unsigned S = manifest.strobe_period;
  for (std::uint32_t k = 0;; ++k) {
    const std::uint64_t strobe_cycle = std::uint64_t{k + 1} * S - 1;
    if (strobe_cycle + 2 >= cycles) break;  // tap at +1, total at +2
    PowerTrace::Row row;
    row.strobe = k;
    row.warmup = k == 0;
    for (std::size_t c : tap_cols)
      row.power.push_back(static_cast<double>(trace.at(strobe_cycle + 1, c)));
    row.total = static_cast<double>(trace.at(strobe_cycle + 2, total_col));
    out.rows.push_back(std::move(row));
  }
  return out;
}

namespace {

std::string format_power(PowerTrace::Mode mode, double v) {
  char buf[64];
  if (mode == PowerTrace::Mode::Fixed) {
    std::snprintf(buf, sizeof buf, "%llu",
                  static_cast<unsigned long long>(v));
  } else {
    // %.17g round-trips doubles; transition sums of binary fractions stay short
    std::snprintf(buf, sizeof buf, "%.17g", v);
  }
  return buf;
}

}  // namespace

std::string write_power_trace_csv(const PowerTrace& trace) {
  std::string out;
  out += "# lsb=2^" + std::to_string(trace.lsb_exponent) + " microwatts\n";
  out += "# strobe-period=" + std::to_string(trace.strobe_period) + "\n";
  out += std::string("# mode=") +
         (trace.mode == PowerTrace::Mode::Fixed ? "fixed" : "float") + "\n";
  out += "strobe";
  for (const std::string& c : trace.components) out += "," + c;
  out += ",total,warmup\n";
  for (const PowerTrace::Row& r : trace.rows) {
    out += std::to_string(r.strobe);
    for (double v : r.power) out += "," + format_power(trace.mode, v);
    out += "," + format_power(trace.mode, r.total);
    out += r.warmup ? ",1\n" : ",0\n";
  }
  return out;
}

PowerTrace parse_power_trace_csv(std::string_view text) {
  PowerTrace trace;
  trace.strobe_period = 0;  // unknown until the sidecar line is seen
  bool have_header = false;

  int lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    std::string line(text.substr(pos, eol == std::string_view::npos
                                          ? std::string_view::npos
                                          : eol - pos));
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fail = [&](const std::string& msg) {
      throw Error("line " + std::to_string(lineno) + ": " + msg);
    };

    if (line[0] == '#') {
      std::istringstream is(line.substr(1));
      std::string t;
      while (is >> t) {
        if (t.rfind("lsb=2^", 0) == 0) {
          try {
            trace.lsb_exponent = std::stoi(t.substr(6));
          } catch (...) {
            fail("bad lsb sidecar '" + t + "'");
          }
        } else if (t.rfind("strobe-period=", 0) == 0) {
          try {
            trace.strobe_period =
                static_cast<unsigned>(std::stoul(t.substr(14)));
          } catch (...) {
            fail("bad strobe-period sidecar '" + t + "'");
          }
        } else if (t.rfind("mode=", 0) == 0) {
          std::string m = t.substr(5);
          if (m == "fixed") {
            trace.mode = PowerTrace::Mode::Fixed;
          } else if (m == "float") {
            trace.mode = PowerTrace::Mode::Float;
          } else {
            fail("bad mode sidecar '" + m + "'");
          }
        }
      }
      continue;
    }

    std::vector<std::string> cells;
    {
      std::istringstream is(line);
      std::string cell;
      while (std::getline(is, cell, ',')) cells.push_back(cell);
    }
    if (!have_header) {
      if (cells.size() < 3 || cells.front() != "strobe" ||
          cells[cells.size() - 2] != "total" || cells.back() != "warmup")
        fail("header must be 'strobe,<components>,total,warmup'");
      trace.components.assign(cells.begin() + 1, cells.end() - 2);
      have_header = true;
      continue;
    }
    if (cells.size() != trace.components.size() + 3)
      fail("expected " + std::to_string(trace.components.size() + 3) +
           " columns, got " + std::to_string(cells.size()));
    PowerTrace::Row row;
    auto to_double = [&](const std::string& s) {
      char* end = nullptr;
      double v = std::strtod(s.c_str(), &end);
      if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(v))
        fail("bad value '" + s + "'");
      return v;
    };
    row.strobe = static_cast<std::uint32_t>(to_double(cells[0]));
    for (std::size_t i = 1; i + 2 < cells.size(); ++i)
      row.power.push_back(to_double(cells[i]));
    row.total = to_double(cells[cells.size() - 2]);
    const std::string& w = cells.back();
    if (w != "0" && w != "1") fail("warmup column must be 0/1");
    row.warmup = w == "1";
    trace.rows.push_back(std::move(row));
  }
  if (!have_header) throw Error("power trace has no header row");
  return trace;
}

}  // namespace pemu
