#pragma once

#include <string>

#include "pemu/netlist.hpp"

namespace pemu {

/// Structural HDL-style emission: one module, port and wire declarations,
/// one primitive instantiation per component, 2-space indent, LF endings,
/// declaration order throughout. Byte-stable for a given design.
std::string emit_hdl(const Design& design);

}  // namespace pemu
