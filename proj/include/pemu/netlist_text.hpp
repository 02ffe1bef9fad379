#pragma once

#include <string>
#include <string_view>

#include "pemu/netlist.hpp"

namespace pemu {

struct ParseResult {
  std::optional<Design> design;
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return design.has_value(); }
};

/// Parses the line-based design format (.pnl):
///
///   design <name>
///   input <name> : <width>|clock
///   output <name> : <width>
///   wire <name> : <width>
///   comp <name> : <KIND> width=<w> [clock=<c>] [init=<hex>] [value=<hex>] <pin>=<net> ...
///
/// `#` starts a comment. Hex values take an optional 0x prefix. On any fault
/// the parse aborts with all collected diagnostics; otherwise the returned
/// design satisfies every Design invariant.
ParseResult parse_design(std::string_view text);

/// Canonical text emission. parse_design(emit_design_text(d)) reproduces d
/// exactly for every valid design.
std::string emit_design_text(const Design& design);

}  // namespace pemu
