#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "pemu/netlist.hpp"

namespace pemu {

/// One characterization observation: which interface bits toggled, and the
/// measured power in microwatts.
struct CharacterizationSample {
  std::vector<std::uint8_t> transitions;  // 0/1 per monitored bit
  double power = 0;                       // microwatts, >= 0
};

struct FitResult {
  std::vector<double> coeffs;      // least-squares solution, negatives clamped to 0
  std::vector<double> raw_coeffs;  // unclamped solution
  double residual_rms = 0;         // RMS residual of the unclamped solution
  std::vector<std::string> warnings;
};

/// Least-squares coefficient fit via the normal equations with partial
/// pivoting (relative rank tolerance 1e-9). Needs at least n samples and a
/// full-column-rank transition matrix; rank deficiency reports the dependent
/// columns. Negative fitted coefficients are clamped to zero with a warning.
FitResult fit_macromodel(const std::vector<CharacterizationSample>& samples);

/// Sample file format (.csv): header row naming the bit positions plus a
/// final `power` column, then one row per sample of n 0/1 values and the
/// measured power.
std::vector<CharacterizationSample> parse_samples_csv(std::string_view text);

std::string write_samples_csv(const std::vector<CharacterizationSample>& samples,
                              const std::vector<std::string>& bit_names);

}  // namespace pemu
