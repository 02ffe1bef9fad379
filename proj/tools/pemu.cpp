// pemu: power emulation toolkit driver.
//
// Subcommands cover the whole flow: characterize a macromodel from samples,
// instrument a netlist with power estimation hardware, emulate (simulate the
// instrumented design and read the power nets), estimate (software reference
// path), compare traces, and summarize a trace.
//
// Exit codes: 0 success, 1 domain/diagnostic error, 2 I/O error.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>

#include "pemu/fit.hpp"
#include "pemu/hdl.hpp"
#include "pemu/instrument.hpp"
#include "pemu/macromodel.hpp"
#include "pemu/netlist_text.hpp"
#include "pemu/power_trace.hpp"
#include "pemu/refpower.hpp"
#include "pemu/report.hpp"
#include "pemu/sim.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw pemu::IoError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw pemu::IoError("cannot read " + path);
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw pemu::IoError("cannot write " + path);
  out << content;
  out.flush();
  if (!out) throw pemu::IoError("cannot write " + path);
}

pemu::Design parse_design_or_fail(const std::string& path) {
  pemu::ParseResult r = pemu::parse_design(read_file(path));
  if (!r.ok()) {
    for (const pemu::Diagnostic& d : r.diagnostics)
      std::fprintf(stderr, "%s:%d: %s\n", path.c_str(), d.line, d.message.c_str());
    throw pemu::Error(std::to_string(r.diagnostics.size()) + " diagnostic(s) in " +
                      path);
  }
  return std::move(*r.design);
}

pemu::MacromodelLibrary parse_library_or_fail(const std::string& path) {
  pemu::LibraryParseResult r = pemu::parse_library(read_file(path));
  for (const std::string& w : r.warnings)
    std::fprintf(stderr, "warning: %s: %s\n", path.c_str(), w.c_str());
  return std::move(r.library);
}

std::string manifest_path_for(const std::string& design_path) {
  std::filesystem::path p(design_path);
  p.replace_extension(".pmm");
  return p.string();
}

pemu::MissingModelPolicy policy_from(const std::string& s) {
  return s == "skip" ? pemu::MissingModelPolicy::Skip
                     : pemu::MissingModelPolicy::Error;
}

int run_instrument(const std::string& design_path, const std::string& lib_path,
                   const std::string& out_path, unsigned period,
                   const std::string& on_missing, const std::string& hdl_path) {
  auto t0 = Clock::now();
  pemu::Design design = parse_design_or_fail(design_path);
  pemu::MacromodelLibrary lib = parse_library_or_fail(lib_path);

  pemu::InstrumentConfig config;
  config.strobe_period = period;
  config.on_missing = policy_from(on_missing);
  std::vector<std::string> warnings;
  auto t1 = Clock::now();
  pemu::InstrumentedDesign inst = pemu::instrument_design(design, lib, config, &warnings);
  for (const std::string& w : warnings)
    std::fprintf(stderr, "warning: %s\n", w.c_str());
  auto t2 = Clock::now();

  write_file(out_path, pemu::emit_design_text(inst.design));
  write_file(manifest_path_for(out_path), pemu::emit_manifest(inst.manifest));
  if (!hdl_path.empty()) write_file(hdl_path, pemu::emit_hdl(inst.design));
  std::fprintf(stderr, "time: parse %.1f ms, instrument %.1f ms, write %.1f ms\n",
               std::chrono::duration<double, std::milli>(t1 - t0).count(),
               std::chrono::duration<double, std::milli>(t2 - t1).count(),
               ms_since(t2));
  return 0;
}

int run_emulate(const std::string& design_path, const std::string& stim_path,
                std::uint64_t cycles, const std::string& out_path,
                std::string manifest_path, const std::string& values_path) {
  auto t0 = Clock::now();
  pemu::Design design = parse_design_or_fail(design_path);
  if (manifest_path.empty()) manifest_path = manifest_path_for(design_path);
  if (!std::filesystem::exists(manifest_path))
    throw pemu::Error("manifest required: " + manifest_path + " not found");
  pemu::Manifest manifest = pemu::parse_manifest(read_file(manifest_path));
  pemu::StimulusTrace stim = pemu::parse_stimulus(read_file(stim_path));

  std::vector<std::string> record;
  if (values_path.empty()) {
    for (const pemu::ManifestTap& t : manifest.taps) record.push_back(t.net);
    record.push_back(manifest.total_net);
  } else {
    for (const pemu::Port& p : design.ports) record.push_back(p.name);
    for (const pemu::Net& n : design.nets) record.push_back(n.name);
  }
  auto t1 = Clock::now();
  pemu::ValueTrace trace = pemu::simulate(design, stim, cycles, record);
  auto t2 = Clock::now();
  pemu::PowerTrace power = pemu::extract_power_trace(trace, manifest);
  if (power.rows.empty())
    std::fprintf(stderr,
                 "warning: %llu cycles is shorter than one strobe period plus "
                 "read-out latency; no power samples\n",
                 static_cast<unsigned long long>(cycles));

  write_file(out_path, pemu::write_power_trace_csv(power));
  if (!values_path.empty())
    write_file(values_path, pemu::write_value_trace_csv(trace));
  std::fprintf(stderr, "time: parse %.1f ms, simulate %.1f ms, extract+write %.1f ms\n",
               std::chrono::duration<double, std::milli>(t1 - t0).count(),
               std::chrono::duration<double, std::milli>(t2 - t1).count(),
               ms_since(t2));
  return 0;
}

int run_estimate(const std::string& design_path, const std::string& lib_path,
                 const std::string& stim_path, std::uint64_t cycles,
                 const std::string& mode, unsigned period,
                 const std::string& on_missing, const std::string& out_path) {
  auto t0 = Clock::now();
  pemu::Design design = parse_design_or_fail(design_path);
  pemu::MacromodelLibrary lib = parse_library_or_fail(lib_path);
  pemu::StimulusTrace stim = pemu::parse_stimulus(read_file(stim_path));

  pemu::EstimatorConfig config;
  config.mode = mode == "float" ? pemu::PowerTrace::Mode::Float
                                : pemu::PowerTrace::Mode::Fixed;
  config.strobe_period = period;
  config.on_missing = policy_from(on_missing);
  std::vector<std::string> warnings;
  auto t1 = Clock::now();
  pemu::PowerTrace power = pemu::estimate_power(design, lib, stim, cycles, config, &warnings);
  for (const std::string& w : warnings)
    std::fprintf(stderr, "warning: %s\n", w.c_str());
  if (power.rows.empty())
    std::fprintf(stderr,
                 "warning: %llu cycles is shorter than one strobe period plus "
                 "read-out latency; no power samples\n",
                 static_cast<unsigned long long>(cycles));
  auto t2 = Clock::now();
  write_file(out_path, pemu::write_power_trace_csv(power));
  std::fprintf(stderr, "time: parse %.1f ms, estimate %.1f ms, write %.1f ms\n",
               std::chrono::duration<double, std::milli>(t1 - t0).count(),
               std::chrono::duration<double, std::milli>(t2 - t1).count(),
               ms_since(t2));
  return 0;
}

int run_characterize(const std::string& samples_path, const std::string& kind_name,
                     unsigned width, const std::string& out_path,
                     const std::string& lsb_text, unsigned coeff_bits) {
  auto kind = pemu::kind_from_name(kind_name);
  if (!kind || *kind == pemu::Kind::CONST)
    throw pemu::Error("no power model for kind '" + kind_name + "'");
  if (width < 1 || width > pemu::kMaxNetWidth)
    throw pemu::Error("width outside 1..64");
  auto lsb_exp = pemu::parse_lsb_exponent(lsb_text);
  if (!lsb_exp) throw pemu::Error("bad lsb '" + lsb_text + "'");
  if (coeff_bits < 1 || coeff_bits > 32)
    throw pemu::Error("coeff_bits must be in 1..32");

  std::vector<pemu::CharacterizationSample> samples =
      pemu::parse_samples_csv(read_file(samples_path));
  const unsigned n = pemu::monitored_bits(*kind, width);
  if (samples.empty() || samples.front().transitions.size() != n)
    throw pemu::Error("arity mismatch: " + kind_name + " width " +
                      std::to_string(width) + " has " + std::to_string(n) +
                      " monitored bits, samples have " +
                      std::to_string(samples.empty()
                                         ? 0
                                         : samples.front().transitions.size()));

  pemu::FitResult fit = pemu::fit_macromodel(samples);
  for (const std::string& w : fit.warnings)
    std::fprintf(stderr, "warning: %s\n", w.c_str());
  std::fprintf(stderr, "residual rms %.6g uW over %zu samples\n",
               fit.residual_rms, samples.size());

  pemu::MacromodelLibrary lib;
  lib.lsb_exponent = *lsb_exp;
  lib.coeff_bits = coeff_bits;
  pemu::Macromodel model;
  model.kind = *kind;
  model.width = width;
  model.n = n;
  model.float_coeffs = fit.coeffs;
  model.fixed_coeffs = pemu::quantize(fit.coeffs, lib.lsb_exponent, lib.coeff_bits);
  lib.entries.emplace(std::make_pair(*kind, width), std::move(model));
  write_file(out_path, pemu::emit_library(lib));
  return 0;
}

int run_compare(const std::string& a_path, const std::string& b_path,
                double tolerance, bool include_warmup, bool list_mismatches) {
  pemu::PowerTrace a = pemu::parse_power_trace_csv(read_file(a_path));
  pemu::PowerTrace b = pemu::parse_power_trace_csv(read_file(b_path));
  pemu::TraceDiff diff = pemu::compare_traces(a, b, tolerance, include_warmup);
  std::printf("%s\n", pemu::render_diff(diff).c_str());

  if (list_mismatches && diff.first_mismatch) {
    auto fixed_units = [](const pemu::PowerTrace& t, double v) {
      return t.mode == pemu::PowerTrace::Mode::Fixed ? v : v / t.lsb();
    };
    const std::size_t rows = std::min(a.rows.size(), b.rows.size());
    for (std::size_t r = 0; r < rows; ++r) {
      if (!include_warmup && (a.rows[r].warmup || b.rows[r].warmup)) continue;
      for (std::size_t c = 0; c <= a.components.size(); ++c) {
        const bool is_total = c == a.components.size();
        double va = fixed_units(a, is_total ? a.rows[r].total : a.rows[r].power[c]);
        double vb = fixed_units(b, is_total ? b.rows[r].total : b.rows[r].power[c]);
        if (va != vb)
          std::printf("strobe %u %s: %.10g vs %.10g\n", a.rows[r].strobe,
                      is_total ? "total" : a.components[c].c_str(), va, vb);
      }
    }
  }
  return diff.passed() ? 0 : 1;
}

int run_report(const std::string& trace_path, const std::string& lsb_text) {
  auto t0 = Clock::now();
  pemu::PowerTrace trace = pemu::parse_power_trace_csv(read_file(trace_path));
  if (!lsb_text.empty()) {
    auto e = pemu::parse_lsb_exponent(lsb_text);
    if (!e) throw pemu::Error("bad lsb '" + lsb_text + "'");
    trace.lsb_exponent = *e;
  }
  auto t1 = Clock::now();
  pemu::RunReport report = pemu::build_report(trace);
  std::fputs(pemu::render_report(report, trace_path).c_str(), stdout);
  std::fprintf(stderr, "time: parse %.1f ms, summarize %.1f ms\n",
               std::chrono::duration<double, std::milli>(t1 - t0).count(),
               ms_since(t1));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"power emulation toolkit: netlist instrumentation, cycle "
               "simulation, and reference power estimation"};
  app.set_version_flag("--version", "pemu 0.1.0");
  app.require_subcommand(1);

  // instrument
  auto* inst = app.add_subcommand("instrument",
                                  "insert power monitors, strobe generator, and "
                                  "aggregator into a netlist");
  std::string in_design, in_library, out_base, hdl_path;
  unsigned strobe_period = 8;
  std::string on_missing = "error";
  inst->add_option("design", in_design, "input netlist (.pnl)")->required();
  inst->add_option("library", in_library, "macromodel library (.pml)")->required();
  inst->add_option("-o,--output", out_base, "output netlist path (.pnl); the manifest "
                   "is written next to it with extension .pmm")->required();
  inst->add_option("--strobe-period", strobe_period, "cycles between power strobes")
      ->check(CLI::PositiveNumber);
  inst->add_option("--on-missing", on_missing, "missing-model policy")
      ->check(CLI::IsMember({"error", "skip"}));
  inst->add_option("--hdl", hdl_path, "also emit structural HDL to this path");

  // emulate
  auto* emu = app.add_subcommand("emulate",
                                 "simulate an instrumented netlist and extract "
                                 "its power trace");
  std::string emu_design, emu_stim, emu_out, emu_manifest, emu_values;
  std::uint64_t emu_cycles = 0;
  emu->add_option("design", emu_design, "instrumented netlist (.pnl)")->required();
  emu->add_option("stimulus", emu_stim, "stimulus file (.stim)")->required();
  emu->add_option("--cycles", emu_cycles, "cycles to simulate")->required();
  emu->add_option("-o,--output", emu_out, "power trace CSV")->required();
  emu->add_option("--manifest", emu_manifest,
                  "manifest path (default: design path with .pmm)");
  emu->add_option("--values", emu_values, "also dump all net values to this CSV");

  // estimate
  auto* est = app.add_subcommand("estimate",
                                 "software reference power estimation of a plain "
                                 "netlist");
  std::string est_design, est_library, est_stim, est_out;
  std::string est_mode = "fixed", est_missing = "error";
  std::uint64_t est_cycles = 0;
  unsigned est_period = 8;
  est->add_option("design", est_design, "input netlist (.pnl)")->required();
  est->add_option("library", est_library, "macromodel library (.pml)")->required();
  est->add_option("stimulus", est_stim, "stimulus file (.stim)")->required();
  est->add_option("--cycles", est_cycles, "cycles to simulate")->required();
  est->add_option("--mode", est_mode, "fixed: bit-exact vs emulation; float: "
                  "unquantized microwatts")
      ->check(CLI::IsMember({"fixed", "float"}));
  est->add_option("--strobe-period", est_period, "cycles between power strobes")
      ->check(CLI::PositiveNumber);
  est->add_option("--on-missing", est_missing, "missing-model policy")
      ->check(CLI::IsMember({"error", "skip"}));
  est->add_option("-o,--output", est_out, "power trace CSV")->required();

  // characterize
  auto* chr = app.add_subcommand("characterize",
                                 "fit macromodel coefficients from samples by "
                                 "least squares");
  std::string chr_samples, chr_kind, chr_out, chr_lsb = "2^-8";
  unsigned chr_width = 0, chr_bits = 16;
  chr->add_option("samples", chr_samples, "characterization samples (.csv)")->required();
  chr->add_option("--kind", chr_kind, "component kind")->required();
  chr->add_option("--width", chr_width, "component width")->required();
  chr->add_option("-o,--output", chr_out, "library fragment (.pml)")->required();
  chr->add_option("--lsb", chr_lsb, "fixed-point lsb, e.g. 2^-8");
  chr->add_option("--coeff-bits", chr_bits, "coefficient bit-width");

  // compare
  auto* cmp = app.add_subcommand("compare", "compare two power traces");
  std::string cmp_a, cmp_b;
  double cmp_tol = 0;
  bool cmp_warmup = false, cmp_list = false;
  cmp->add_option("a", cmp_a, "first trace CSV")->required();
  cmp->add_option("b", cmp_b, "second trace CSV")->required();
  cmp->add_option("--tolerance", cmp_tol, "allowed per-cell difference, fixed units");
  cmp->add_flag("--include-warmup", cmp_warmup, "compare warm-up rows too");
  cmp->add_flag("-v,--verbose", cmp_list, "list every mismatching cell");

  // report
  auto* rep = app.add_subcommand("report", "summarize a power trace");
  std::string rep_trace, rep_lsb;
  rep->add_option("trace", rep_trace, "power trace CSV")->required();
  rep->add_option("--lsb", rep_lsb, "override the trace's lsb, e.g. 2^-8");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (inst->parsed())
      return run_instrument(in_design, in_library, out_base, strobe_period,
                            on_missing, hdl_path);
    if (emu->parsed())
      return run_emulate(emu_design, emu_stim, emu_cycles, emu_out, emu_manifest,
                         emu_values);
    if (est->parsed())
      return run_estimate(est_design, est_library, est_stim, est_cycles, est_mode,
                          est_period, est_missing, est_out);
    if (chr->parsed())
      return run_characterize(chr_samples, chr_kind, chr_width, chr_out, chr_lsb,
                              chr_bits);
    if (cmp->parsed())
      return run_compare(cmp_a, cmp_b, cmp_tol, cmp_warmup, cmp_list);
    if (rep->parsed()) return run_report(rep_trace, rep_lsb);
  } catch (const pemu::IoError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const pemu::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
