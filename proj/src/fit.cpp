#include "pemu/fit.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

namespace pemu {

FitResult fit_macromodel(const std::vector<CharacterizationSample>& samples) {
  if (samples.empty()) throw Error("no characterization samples");
  const std::size_t n = samples.front().transitions.size();
  if (n == 0) throw Error("samples have zero-length transition vectors");
  for (const CharacterizationSample& s : samples) {
    if (s.transitions.size() != n)
      throw Error("inconsistent transition vector lengths in sample set");
    if (s.power < 0) throw Error("negative measured power in sample set");
  }
  if (samples.size() < n)
    throw Error("fewer samples (" + std::to_string(samples.size()) +
                ") than coefficients (" + std::to_string(n) + ")");

  // normal equations: G = A^T A, r = A^T b
  std::vector<std::vector<double>> g(n, std::vector<double>(n, 0.0));
  std::vector<double> r(n, 0.0);
  for (const CharacterizationSample& s : samples) {
    for (std::size_t i = 0; i < n; ++i) {
      if (!s.transitions[i]) continue;
      r[i] += s.power;
      for (std::size_t j = 0; j < n; ++j)
        if (s.transitions[j]) g[i][j] += 1.0;
    }
  }

  double max_diag = 0;
  for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, g[i][i]);
  const double tol = 1e-9 * std::max(max_diag, 1.0);

  // Gaussian elimination with partial pivoting; a column whose best pivot is
  // below tolerance is linearly dependent on the ones before it.
  std::vector<std::size_t> dependent;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t row = col + 1; row < n; ++row)
      if (std::fabs(g[row][col]) > std::fabs(g[pivot][col])) pivot = row;
    if (std::fabs(g[pivot][col]) <= tol) {
      dependent.push_back(col);
      continue;
    }
    if (pivot != col) {
      std::swap(g[pivot], g[col]);
      std::swap(r[pivot], r[col]);
    }
    for (std::size_t row = col + 1; row < n; ++row) {
      double f = g[row][col] / g[col][col];
      if (f == 0) continue;
      for (std::size_t j = col; j < n; ++j) g[row][j] -= f * g[col][j];
      r[row] -= f * r[col];
    }
  }
  if (!dependent.empty()) {
    std::string cols;
    for (std::size_t c : dependent) {
      if (!cols.empty()) cols += ", ";
      cols += std::to_string(c);
    }
    throw Error("rank deficiency: column" + std::string(dependent.size() > 1 ? "s " : " ") +
                cols + " linearly dependent on the others");
  }

  FitResult result;
  result.raw_coeffs.assign(n, 0.0);
  for (std::size_t i = n; i-- > 0;) {
    double acc = r[i];
    for (std::size_t j = i + 1; j < n; ++j) acc -= g[i][j] * result.raw_coeffs[j];
    result.raw_coeffs[i] = acc / g[i][i];
  }

  double sq = 0;
  for (const CharacterizationSample& s : samples) {
    double predicted = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (s.transitions[i]) predicted += result.raw_coeffs[i];
    double d = s.power - predicted;
    sq += d * d;
  }
  result.residual_rms = std::sqrt(sq / static_cast<double>(samples.size()));

  result.coeffs = result.raw_coeffs;
  for (std::size_t i = 0; i < n; ++i) {
    if (result.coeffs[i] < 0) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.9g", result.coeffs[i]);
      result.warnings.push_back("fitted coefficient " + std::to_string(i) +
                                " negative (" + buf + "), clamped to 0");
      result.coeffs[i] = 0;
    }
  }
  return result;
}

namespace {

std::vector<std::string> split_csv_row(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) {
    // trim spaces
    std::size_t a = cell.find_first_not_of(" \t");
    std::size_t b = cell.find_last_not_of(" \t");
    cells.push_back(a == std::string::npos ? "" : cell.substr(a, b - a + 1));
  }
  return cells;
}

}  // namespace

std::vector<CharacterizationSample> parse_samples_csv(std::string_view text) {
  std::vector<CharacterizationSample> samples;
  bool have_header = false;
  std::size_t columns = 0;

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
    if (line.empty() || line[0] == '#') continue;
    auto cells = split_csv_row(line);
    if (!have_header) {
      if (cells.size() < 2 || cells.back() != "power")
        throw Error("line " + std::to_string(lineno) +
                    ": sample header must end with a power column");
      columns = cells.size();
      have_header = true;
      continue;
    }
    if (cells.size() != columns)
      throw Error("line " + std::to_string(lineno) + ": expected " +
                  std::to_string(columns) + " columns, got " +
                  std::to_string(cells.size()));
    CharacterizationSample s;
    for (std::size_t i = 0; i + 1 < cells.size(); ++i) {
      if (cells[i] == "0") {
        s.transitions.push_back(0);
      } else if (cells[i] == "1") {
        s.transitions.push_back(1);
      } else {
        throw Error("line " + std::to_string(lineno) + ": transition cell '" +
                    cells[i] + "' is not 0/1");
      }
    }
    char* end = nullptr;
    s.power = std::strtod(cells.back().c_str(), &end);
    if (end != cells.back().c_str() + cells.back().size() || !std::isfinite(s.power))
      throw Error("line " + std::to_string(lineno) + ": bad power value '" +
                  cells.back() + "'");
    if (s.power < 0)
      throw Error("line " + std::to_string(lineno) + ": negative power");
    samples.push_back(std::move(s));
  }
  if (!have_header) throw Error("sample file has no header row");
  return samples;
}

std::string write_samples_csv(const std::vector<CharacterizationSample>& samples,
                              const std::vector<std::string>& bit_names) {
  std::string out;
  for (const std::string& name : bit_names) out += name + ",";
  out += "power\n";
  char buf[64];
  for (const CharacterizationSample& s : samples) {
    for (std::uint8_t t : s.transitions) out += t ? "1," : "0,";
    std::snprintf(buf, sizeof buf, "%.9g", s.power);
    out += buf;
    out += "\n";
  }
  return out;
}

}  // namespace pemu
