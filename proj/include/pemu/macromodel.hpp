#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pemu/netlist.hpp"

namespace pemu {

/// Linear transition-count power model for one (kind, width): one coefficient
/// per monitored interface bit. Power per strobe = sum of fixed[i] over the
/// bits that changed between consecutive strobe samples.
struct Macromodel {
  Kind kind = Kind::ADD;
  unsigned width = 1;
  unsigned n = 0;                          // monitored_bits(kind, width)
  std::vector<double> float_coeffs;        // microwatts per transition, >= 0
  std::vector<std::uint64_t> fixed_coeffs; // power-LSB units, < 2^coeff_bits

  bool operator==(const Macromodel&) const = default;
};

struct MacromodelLibrary {
  int lsb_exponent = -8;   // one fixed-point unit = 2^lsb_exponent microwatts
  unsigned coeff_bits = 16;
  std::map<std::pair<Kind, unsigned>, Macromodel> entries;

  double lsb() const { return std::ldexp(1.0, lsb_exponent); }
  const Macromodel* find(Kind kind, unsigned width) const {
    auto it = entries.find({kind, width});
    return it == entries.end() ? nullptr : &it->second;
  }

  bool operator==(const MacromodelLibrary&) const = default;
};

/// fixed[i] = round(max(coeffs[i], 0) / 2^lsb_exponent). Negative inputs are
/// clamped to zero with a warning appended to `warnings` (if given). Throws
/// Error naming the offending index when a result does not fit coeff_bits.
std::vector<std::uint64_t> quantize(const std::vector<double>& coeffs,
                                    int lsb_exponent, unsigned coeff_bits,
                                    std::vector<std::string>* warnings = nullptr);

/// Fixed-point power of one strobe interval: sum of fixed coefficients over
/// the bit positions where prev and cur differ. Pure; prev/cur must have
/// length model.n.
std::uint64_t model_power(const Macromodel& model,
                          const std::vector<std::uint8_t>& prev,
                          const std::vector<std::uint8_t>& cur);

/// Same sum taken over the unquantized coefficients, in microwatts.
double model_power_float(const Macromodel& model,
                         const std::vector<std::uint8_t>& prev,
                         const std::vector<std::uint8_t>& cur);

/// Accepts "2^<e>" or a positive decimal that is an exact power of two;
/// returns the exponent.
std::optional<int> parse_lsb_exponent(const std::string& text);

struct LibraryParseResult {
  MacromodelLibrary library;
  std::vector<std::string> warnings;
};

/// Parses the library format (.pml): optional `lsb 2^<e>` and
/// `coeff_bits <b>` header lines, then `<KIND> <width> : <c1> ... <cn>`
/// entries (floats, microwatts). Float coefficients are quantized on load.
/// Throws Error on malformed input, unknown kinds, arity mismatches, or
/// coefficient overflow.
LibraryParseResult parse_library(std::string_view text);

std::string emit_library(const MacromodelLibrary& library);

}  // namespace pemu
