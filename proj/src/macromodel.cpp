#include "pemu/macromodel.hpp"

#include <cassert>
#include <cstdlib>
#include <sstream>

namespace pemu {

namespace {

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size() && std::isfinite(out);
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::optional<int> parse_lsb_exponent(const std::string& s) {
  if (s.size() > 2 && s[0] == '2' && s[1] == '^') {
    try {
      std::size_t used = 0;
      int e = std::stoi(s.substr(2), &used);
      if (used != s.size() - 2) return std::nullopt;
      return e;
    } catch (...) {
      return std::nullopt;
    }
  }
  double v = 0;
  if (!parse_double(s, v) || v <= 0) return std::nullopt;
  int e = 0;
  double m = std::frexp(v, &e);
  if (m != 0.5) return std::nullopt;
  return e - 1;
}

std::vector<std::uint64_t> quantize(const std::vector<double>& coeffs,
                                    int lsb_exponent, unsigned coeff_bits,
                                    std::vector<std::string>* warnings) {
  const double lsb = std::ldexp(1.0, lsb_exponent);
  const double limit = std::ldexp(1.0, static_cast<int>(coeff_bits));
  std::vector<std::uint64_t> fixed;
  fixed.reserve(coeffs.size());
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    double c = coeffs[i];
    if (!std::isfinite(c)) throw Error("coefficient " + std::to_string(i) + " is not finite");
    if (c < 0) {
      if (warnings)
        warnings->push_back("coefficient " + std::to_string(i) + " negative (" +
                            format_double(c) + "), clamped to 0");
      c = 0;
    }
    double q = std::round(c / lsb);
    if (q >= limit) {
      throw Error("coefficient " + std::to_string(i) + " overflows " +
                  std::to_string(coeff_bits) + " bits (fixed value " +
                  format_double(q) + ")");
    }
    fixed.push_back(static_cast<std::uint64_t>(q));
  }
  return fixed;
}

std::uint64_t model_power(const Macromodel& model,
                          const std::vector<std::uint8_t>& prev,
                          const std::vector<std::uint8_t>& cur) {
  assert(prev.size() == model.n && cur.size() == model.n);
  std::uint64_t sum = 0;
  for (std::size_t i = 0; i < prev.size(); ++i)
    if ((prev[i] ^ cur[i]) & 1) sum += model.fixed_coeffs[i];
  return sum;
}

double model_power_float(const Macromodel& model,
                         const std::vector<std::uint8_t>& prev,
                         const std::vector<std::uint8_t>& cur) {
  assert(prev.size() == model.n && cur.size() == model.n);
  double sum = 0;
  for (std::size_t i = 0; i < prev.size(); ++i)
    if ((prev[i] ^ cur[i]) & 1) sum += model.float_coeffs[i];
  return sum;
}

LibraryParseResult parse_library(std::string_view text) {
  LibraryParseResult result;
  MacromodelLibrary& lib = result.library;
  bool saw_entry = false;

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

    if (tok[0] == "lsb") {
      if (saw_entry) fail("lsb header must precede entries");
      std::optional<int> e;
      if (tok.size() == 2) e = parse_lsb_exponent(tok[1]);
      if (!e)
        fail("bad lsb '" + (tok.size() > 1 ? tok[1] : "") +
             "' (want 2^<e> or a positive power of two)");
      lib.lsb_exponent = *e;
      continue;
    }
    if (tok[0] == "coeff_bits") {
      if (saw_entry) fail("coeff_bits header must precede entries");
      unsigned b = 0;
      if (tok.size() != 2) fail("bad coeff_bits");
      try {
        b = static_cast<unsigned>(std::stoul(tok[1]));
      } catch (...) {
        fail("bad coeff_bits '" + tok[1] + "'");
      }
      if (b < 1 || b > 32) fail("coeff_bits must be in 1..32");
      lib.coeff_bits = b;
      continue;
    }

    // entry: <KIND> <width> : <c1> ... <cn>
    auto kind = kind_from_name(tok[0]);
    if (!kind) fail("unknown kind '" + tok[0] + "'");
    if (*kind == Kind::CONST) fail("kind CONST has no power model");
    if (tok.size() < 3 || tok[2] != ":") fail("expected '<KIND> <width> : <coeffs>'");
    unsigned width = 0;
    try {
      width = static_cast<unsigned>(std::stoul(tok[1]));
    } catch (...) {
      fail("bad width '" + tok[1] + "'");
    }
    if (width < 1 || width > kMaxNetWidth) fail("width outside 1..64");

    Macromodel m;
    m.kind = *kind;
    m.width = width;
    m.n = monitored_bits(*kind, width);
    for (std::size_t i = 3; i < tok.size(); ++i) {
      double c = 0;
      if (!parse_double(tok[i], c)) fail("bad coefficient '" + tok[i] + "'");
      m.float_coeffs.push_back(c);
    }
    if (m.float_coeffs.size() != m.n)
      fail("entry " + std::string(kind_name(*kind)) + " " + std::to_string(width) +
           " has " + std::to_string(m.float_coeffs.size()) +
           " coefficients, expected " + std::to_string(m.n));

    std::vector<std::string> qwarn;
    try {
      m.fixed_coeffs = quantize(m.float_coeffs, lib.lsb_exponent, lib.coeff_bits, &qwarn);
    } catch (const Error& e) {
      fail(std::string(e.what()));
    }
    for (std::size_t i = 0; i < m.float_coeffs.size(); ++i)
      m.float_coeffs[i] = std::max(m.float_coeffs[i], 0.0);
    for (const std::string& w : qwarn)
      result.warnings.push_back("line " + std::to_string(lineno) + ": " + w);

    if (!lib.entries.emplace(std::make_pair(*kind, width), std::move(m)).second)
      fail("duplicate entry " + std::string(kind_name(*kind)) + " " +
           std::to_string(width));
    saw_entry = true;
  }
  return result;
}

std::string emit_library(const MacromodelLibrary& library) {
  std::string out;
  out += "lsb 2^" + std::to_string(library.lsb_exponent) + "\n";
  out += "coeff_bits " + std::to_string(library.coeff_bits) + "\n";
  for (const auto& [key, m] : library.entries) {
    out += std::string(kind_name(key.first)) + " " + std::to_string(key.second) + " :";
    for (double c : m.float_coeffs) out += " " + format_double(c);
    out += "\n";
  }
  return out;
}

}  // namespace pemu
