#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pemu/netlist_text.hpp"
#include "pemu/sim.hpp"
#include "testutil.hpp"

using namespace pemu;

namespace {

Design parse_must(const std::string& text) {
  ParseResult r = parse_design(text);
  if (!r.ok()) {
    for (const auto& d : r.diagnostics) MESSAGE(d.line << ": " << d.message);
    REQUIRE(r.ok());
  }
  return std::move(*r.design);
}

std::vector<std::uint64_t> column(const ValueTrace& t, const std::string& net) {
  std::size_t c = t.column(net);
  std::vector<std::uint64_t> out;
  for (const auto& row : t.rows) out.push_back(row[c]);
  return out;
}

}  // namespace

TEST_CASE("stimulus holds the last assigned value") {
  Design d = parse_must(
      "design t\ninput a : 4\nwire y : 4\ncomp n1 : NOT width=4 a=a y=y\n");
  StimulusTrace stim = parse_stimulus("0 a=0x3\n5 a=0x7\n");
  ValueTrace t = simulate(d, stim, 7, {"a"});
  CHECK(column(t, "a") == std::vector<std::uint64_t>{3, 3, 3, 3, 3, 7, 7});
}

TEST_CASE("empty stimulus means all inputs zero") {
  Design d = parse_must(
      "design t\ninput a : 4\nwire y : 4\ncomp n1 : NOT width=4 a=a y=y\n");
  ValueTrace t = simulate(d, parse_stimulus(""), 3, {"a", "y"});
  CHECK(column(t, "a") == std::vector<std::uint64_t>{0, 0, 0});
  CHECK(column(t, "y") == std::vector<std::uint64_t>{0xf, 0xf, 0xf});
}

TEST_CASE("stimulus parse errors") {
  CHECK_THROWS_WITH_AS(parse_stimulus("3 a=1\n1 a=0\n"),
                       doctest::Contains("non-increasing"), Error);
  CHECK_THROWS_WITH_AS(parse_stimulus("0 a=0x12345678123456789\n"),
                       doctest::Contains("exceeds 64 bits"), Error);
  CHECK_THROWS_WITH_AS(parse_stimulus("0 a=zz\n"), doctest::Contains("bad hex"),
                       Error);
  CHECK_THROWS_WITH_AS(parse_stimulus("x a=1\n"), doctest::Contains("bad cycle"),
                       Error);
  CHECK_THROWS_WITH_AS(parse_stimulus("0 a=1 a=2\n"),
                       doctest::Contains("assigned twice"), Error);
}

TEST_CASE("stimulus binding errors") {
  Design d = parse_must(
      "design t\ninput clk : clock\ninput a : 4\nwire q : 4\n"
      "comp r1 : REG width=4 clock=clk init=0 d=a q=q\n");
  CHECK_THROWS_WITH_AS(simulate(d, parse_stimulus("0 b=1\n"), 2, {}),
                       doctest::Contains("unknown input port b"), Error);
  CHECK_THROWS_WITH_AS(simulate(d, parse_stimulus("0 clk=1\n"), 2, {}),
                       doctest::Contains("clock port"), Error);
  CHECK_THROWS_WITH_AS(simulate(d, parse_stimulus("0 a=0x10\n"), 2, {}),
                       doctest::Contains("does not fit width"), Error);
  CHECK_THROWS_WITH_AS(simulate(d, parse_stimulus(""), 2, {"nope"}),
                       doctest::Contains("not declared"), Error);
}

TEST_CASE("register semantics") {
  Design d = parse_must(
      "design t\ninput clk : clock\nwire one : 1\nwire q : 1\n"
      "comp c1 : CONST width=1 value=0x1 y=one\n"
      "comp r1 : REG width=1 clock=clk init=0 d=one q=q\n");
  ValueTrace t = simulate(d, {}, 3, {"q"});
  CHECK(column(t, "q") == std::vector<std::uint64_t>{0, 1, 1});
}

TEST_CASE("commit atomicity: cross-coupled register pair swaps forever") {
  Design d = parse_must(
      "design t\ninput clk : clock\nwire q1 : 1\nwire q2 : 1\n"
      "comp r1 : REG width=1 clock=clk init=0 d=q2 q=q1\n"
      "comp r2 : REG width=1 clock=clk init=1 d=q1 q=q2\n");
  ValueTrace t = simulate(d, {}, 6, {"q1", "q2"});
  CHECK(column(t, "q1") == std::vector<std::uint64_t>{0, 1, 0, 1, 0, 1});
  CHECK(column(t, "q2") == std::vector<std::uint64_t>{1, 0, 1, 0, 1, 0});
}

TEST_CASE("arithmetic wraps at net width") {
  Design d = parse_must(
      "design t\ninput a : 4\ninput b : 4\nwire s : 4\nwire df : 4\n"
      "comp a1 : ADD width=4 a=a b=b y=s\n"
      "comp s1 : SUB width=4 a=a b=b y=df\n");
  ValueTrace t = simulate(d, parse_stimulus("0 a=0xf b=0x1\n"), 1, {"s", "df"});
  CHECK(t.rows[0][t.column("s")] == 0x0);
  CHECK(t.rows[0][t.column("df")] == 0xe);

  StimulusTrace st2 = parse_stimulus("0 a=0x0 b=0x1\n");
  ValueTrace t2 = simulate(d, st2, 1, {"df"});
  CHECK(t2.rows[0][t2.column("df")] == 0xf);  // 0 - 1 wraps
}

TEST_CASE("comparisons and mux are unsigned and two-way") {
  Design d = parse_must(
      "design t\ninput a : 4\ninput b : 4\ninput s : 1\n"
      "wire eq : 1\nwire lt : 1\nwire m : 4\n"
      "comp e1 : EQ width=4 a=a b=b y=eq\n"
      "comp l1 : LT width=4 a=a b=b y=lt\n"
      "comp m1 : MUX2 width=4 a=a b=b sel=s y=m\n");
  ValueTrace t = simulate(d, parse_stimulus("0 a=0x9 b=0x2 s=0x0\n1 s=0x1\n"), 2,
                          {"eq", "lt", "m"});
  CHECK(t.rows[0][t.column("eq")] == 0);
  CHECK(t.rows[0][t.column("lt")] == 0);  // 9 < 2 is false unsigned
  CHECK(t.rows[0][t.column("m")] == 0x9);  // sel=0 -> a
  CHECK(t.rows[1][t.column("m")] == 0x2);  // sel=1 -> b
}

TEST_CASE("shift semantics, amounts >= width give zero") {
  Design d = parse_must(
      "design t\ninput a : 5\ninput s : 3\nwire l : 5\nwire r : 5\n"
      "comp sl : SHL width=5 a=a s=s y=l\n"
      "comp sr : SHR width=5 a=a s=s y=r\n");
  ValueTrace t = simulate(
      d, parse_stimulus("0 a=0x13 s=0x1\n1 s=0x4\n2 s=0x5\n3 s=0x7\n"), 4,
      {"l", "r"});
  CHECK(t.rows[0][t.column("l")] == 0x06);  // 0b10011 << 1 wraps to 5 bits
  CHECK(t.rows[0][t.column("r")] == 0x09);
  CHECK(t.rows[1][t.column("l")] == 0x10);  // << 4
  CHECK(t.rows[1][t.column("r")] == 0x01);
  CHECK(t.rows[2][t.column("l")] == 0);  // amount == width
  CHECK(t.rows[2][t.column("r")] == 0);
  CHECK(t.rows[3][t.column("l")] == 0);  // amount > width
  CHECK(t.rows[3][t.column("r")] == 0);
}

TEST_CASE("zero cycles yields an empty trace") {
  Design d = parse_must(
      "design t\ninput a : 4\nwire y : 4\ncomp n1 : NOT width=4 a=a y=y\n");
  ValueTrace t = simulate(d, {}, 0, {"y"});
  CHECK(t.rows.empty());
  CHECK(t.nets == std::vector<std::string>{"y"});
}

TEST_CASE("binary_search finds a present key within log2(8)+2 cycles") {
  Design d = parse_must(
      test::slurp(std::string(PEMU_DESIGNS_DIR) + "/binary_search.pnl"));
  const std::uint64_t table[8] = {0x03, 0x07, 0x0c, 0x13, 0x19, 0x1f, 0x28, 0x39};
  for (unsigned i = 0; i < 8; ++i) {
    char stim_text[64];
    std::snprintf(stim_text, sizeof stim_text, "0 start=0x1 key=0x%llx\n1 start=0x0\n",
                  static_cast<unsigned long long>(table[i]));
    ValueTrace t = simulate(d, parse_stimulus(stim_text), 8, {"found", "index"});
    std::uint64_t first_found = 99;
    for (std::size_t c = 0; c < t.rows.size(); ++c) {
      if (t.rows[c][t.column("found")]) {
        first_found = c;
        break;
      }
    }
    CHECK(first_found <= 5);  // within ceil(log2 8) + 2 of the start pulse
    CHECK(t.rows[7][t.column("found")] == 1);
    CHECK(t.rows[7][t.column("index")] == i);
  }
  // golden: the shipped stimulus (key 0x19) raises found exactly at cycle 4
  StimulusTrace stim = parse_stimulus(
      test::slurp(std::string(PEMU_DESIGNS_DIR) + "/binary_search.stim"));
  ValueTrace t = simulate(d, stim, 8, {"found", "index"});
  CHECK(column(t, "found") == std::vector<std::uint64_t>{0, 0, 0, 0, 1, 1, 1, 1});
  CHECK(t.rows[7][t.column("index")] == 4);
}

TEST_CASE("absent key never raises found") {
  Design d = parse_must(
      test::slurp(std::string(PEMU_DESIGNS_DIR) + "/binary_search.pnl"));
  ValueTrace t = simulate(d, parse_stimulus("0 start=0x1 key=0x20\n1 start=0x0\n"),
                          50, {"found"});
  for (const auto& row : t.rows) CHECK(row[0] == 0);
}

TEST_CASE("simulation is deterministic") {
  test::Rng rng(77);
  Design d = test::random_design(rng, 30);
  StimulusTrace stim = test::random_stimulus(rng, d, 200);
  auto record = test::all_signals(d);
  ValueTrace a = simulate(d, stim, 200, record);
  ValueTrace b = simulate(d, stim, 200, record);
  CHECK(a.rows == b.rows);
  CHECK(write_value_trace_csv(a) == write_value_trace_csv(b));
}

TEST_CASE("value trace csv shape") {
  Design d = parse_must(
      "design t\ninput a : 4\nwire y : 4\ncomp n1 : NOT width=4 a=a y=y\n");
  ValueTrace t = simulate(d, parse_stimulus("0 a=0xa\n"), 2, {"a", "y"});
  CHECK(write_value_trace_csv(t) ==
        "cycle,a,y\n0,0xa,0x5\n1,0xa,0x5\n");
}
