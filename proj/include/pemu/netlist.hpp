#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace pemu {

/// Error for single-fault operations (library parse, instrumentation, CLI
/// plumbing). Multi-diagnostic paths (design parse/validate) return
/// Diagnostic lists instead.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// I/O-class failure; the CLI maps it to exit code 2.
class IoError : public Error {
public:
  explicit IoError(const std::string& msg) : Error(msg) {}
};

/// The fixed primitive set. Monitors, strobe generators and the aggregator
/// are built from these same kinds; extending the set means adding a kind
/// here plus a macromodel entry.
enum class Kind {
  REG,
  ADD,
  SUB,
  MUX2,
  EQ,
  LT,
  AND,
  OR,
  XOR,
  NOT,
  SHL,
  SHR,
  CONST,
};

inline constexpr int kNumKinds = 13;

const char* kind_name(Kind k);
std::optional<Kind> kind_from_name(const std::string& name);

enum class PortDirection { Input, Output };
enum class PortKind { Data, Clock };

struct Port {
  std::string name;
  PortDirection direction = PortDirection::Input;
  unsigned width = 1;
  PortKind kind = PortKind::Data;

  bool operator==(const Port&) const = default;
};

struct Net {
  std::string name;
  unsigned width = 1;

  bool operator==(const Net&) const = default;
};

struct Component {
  std::string name;
  Kind kind = Kind::ADD;
  unsigned width = 1;
  std::vector<std::string> inputs;   // signature order
  std::vector<std::string> outputs;  // signature order
  std::string clock;                 // REG only: clock port name
  std::uint64_t init = 0;            // REG only: reset value
  std::uint64_t literal = 0;         // CONST only

  bool operator==(const Component&) const = default;
};

struct ClockDomain {
  std::string name;        // same as the clock port name
  std::string clock_port;

  bool operator==(const ClockDomain&) const = default;
};

/// Structural RTL netlist. Ports and wires share one signal namespace; every
/// signal has exactly one driver (input port or component output) and widths
/// are capped at 64 bits so a value always fits one machine word.
struct Design {
  std::string name;
  std::vector<Port> ports;
  std::vector<Net> nets;  // wires; ports declare their own signals
  std::vector<Component> components;
  std::vector<ClockDomain> clocks;  // derived, one per clock port

  bool operator==(const Design&) const = default;
};

/// One validation or parse finding. line is 1-based; 0 for findings that
/// have no source location (programmatically built designs).
struct Diagnostic {
  int line = 0;
  std::string message;

  bool operator==(const Diagnostic&) const = default;
};

inline constexpr unsigned kMaxNetWidth = 64;

// ---- kind signatures ------------------------------------------------------

/// Width of the shift-amount pin of SHL/SHR at data width w.
unsigned shift_amount_width(unsigned w);

std::vector<const char*> input_pin_names(Kind k);
std::vector<const char*> output_pin_names(Kind k);
std::vector<unsigned> input_pin_widths(Kind k, unsigned width);
std::vector<unsigned> output_pin_widths(Kind k, unsigned width);

/// Total monitored bits n of a component interface: input pins in signature
/// order then output pins, LSB first within each pin. The clock of a REG is
/// an attribute, not a pin, and is never monitored.
unsigned monitored_bits(Kind k, unsigned width);

/// value masked to the low `width` bits.
std::uint64_t mask_value(std::uint64_t value, unsigned width);

// ---- validation and ordering ----------------------------------------------

/// Rebuilds design.clocks from the clock ports (one domain per clock port,
/// declaration order).
void derive_clock_domains(Design& design);

/// Checks every Design invariant: unique identifiers, declared references,
/// pin counts/widths per kind signature, single driver per net, no undriven
/// net, acyclic combinational subgraph, REG/CONST attribute rules. Empty
/// result means the design is valid.
std::vector<Diagnostic> validate(const Design& design);

namespace detail {
/// validate() with source locations: the maps give the declaration line of
/// each signal/component so the parser can attribute findings.
std::vector<Diagnostic> validate_located(
    const Design& design, const std::map<std::string, int>& signal_lines,
    const std::map<std::string, int>& comp_lines);
}  // namespace detail

struct TopoResult {
  std::vector<std::size_t> order;  // indices into design.components
  std::vector<std::string> cycle;  // nonempty iff a combinational cycle exists
};

/// Evaluation order for the combinational components (everything but REG).
/// REG outputs and ports are order sources; ties break by declaration order.
TopoResult topo_order(const Design& design);

}  // namespace pemu
