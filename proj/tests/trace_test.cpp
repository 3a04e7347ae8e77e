#include <doctest.h>

#include "carrot/trace.hpp"
#include "support/random_traces.hpp"

using namespace carrot;

namespace {

const char* kIsoEnter =
    "# one entry observation\n"
    "run r1\n"
    "ppt isIsosceles:::ENTER\n"
    "var x int\n"
    "var y int\n"
    "var z int\n"
    "\n"
    "sample isIsosceles:::ENTER 1 2 3\n";

}  // namespace

TEST_CASE("parse a single-point single-sample trace") {
  const Trace t = parse_trace(kIsoEnter);
  CHECK(t.run_id == "r1");
  REQUIRE(t.points.size() == 1);
  CHECK(t.points[0].label() == "isIsosceles:::ENTER");
  CHECK(t.points[0].arity() == 3);
  REQUIRE(t.samples.size() == 1);
  CHECK(t.samples[0].values == std::vector<int64_t>{1, 2, 3});
  CHECK(t.samples[0].serial == 0);
}

TEST_CASE("declarations but no samples, and no declarations at all") {
  const Trace none = parse_trace("run empty\n");
  CHECK(none.points.empty());
  CHECK(none.samples.empty());

  const Trace decls = parse_trace("run r\nppt f:::ENTER\nvar a int\n");
  CHECK(decls.points.size() == 1);
  CHECK(decls.samples.empty());
  CHECK(write_trace(decls) == "run r\n\nppt f:::ENTER\nvar a int\n");
}

TEST_CASE("parse errors carry positions and name the offender") {
  auto line_of = [](const char* text) {
    try {
      parse_trace(text);
    } catch (const ParseError& e) {
      return e.line();
    }
    return std::size_t(0);
  };

  // arity mismatch names the point
  try {
    parse_trace("run r\nppt f:::ENTER\nvar a int\nvar b int\nvar c int\n\nsample f:::ENTER 1 2\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 7);
    CHECK(e.message().find("f:::ENTER") != std::string::npos);
  }

  CHECK(line_of("ppt f:::ENTER\n") == 1);                          // missing run header
  CHECK(line_of("run r\nsample f:::ENTER 1\n") == 2);              // undeclared point
  CHECK(line_of("run r\nppt f:::ENTER\nvar a int\nvar a int\n") == 4);  // dup var
  CHECK(line_of("run r\nppt f:::ENTER\nvar a int\n\nsample f:::ENTER x\n") == 5);
  CHECK(line_of("run r\nppt f:::ENTER\nvar a int\n\nppt f:::ENTER\nvar a int\n") == 5);
  CHECK(line_of("run r\nppt f:::EXIT\nvar a int\n") == 2);  // exit missing return
  CHECK(line_of("run r\nppt f:::ENTER\nvar a int\n\nsample f:::ENTER 1\nppt g:::ENTER\nvar a int\n") == 6);
}

TEST_CASE("write_trace canonicalizes point order and is parse-stable") {
  Trace t;
  t.run_id = "r2";
  t.points.push_back({"zeta", PptKind::Enter, {{"q"}}});
  t.points.push_back({"alpha", PptKind::Exit, {{"a"}, {"return"}}});
  t.points.push_back({"alpha", PptKind::Enter, {{"a"}}});
  t.samples.push_back({0, {7}, 0});
  t.samples.push_back({2, {1}, 1});

  const std::string text = write_trace(t);
  const std::size_t alpha_enter = text.find("ppt alpha:::ENTER");
  const std::size_t alpha_exit = text.find("ppt alpha:::EXIT");
  const std::size_t zeta = text.find("ppt zeta:::ENTER");
  REQUIRE(alpha_enter != std::string::npos);
  CHECK(alpha_enter < alpha_exit);
  CHECK(alpha_exit < zeta);

  const Trace back = parse_trace(text);
  CHECK(structurally_equal(t, back));
  CHECK(write_trace(back) == text);  // idempotent through a parse cycle
}

TEST_CASE("structural equality ignores point order but not sample order") {
  const Trace a = parse_trace(
      "run r\nppt f:::ENTER\nvar a int\n\nppt g:::ENTER\nvar b int\n\n"
      "sample f:::ENTER 1\nsample g:::ENTER 2\n");
  Trace b = a;
  std::swap(b.points[0], b.points[1]);
  for (Sample& s : b.samples) s.point = 1 - s.point;
  CHECK(structurally_equal(a, b));

  Trace c = a;
  std::swap(c.samples[0], c.samples[1]);
  std::swap(c.samples[0].serial, c.samples[1].serial);
  CHECK(!structurally_equal(a, c));
}

TEST_CASE("random traces round-trip structurally and byte-exactly") {
  testsupport::TraceGen gen(20260818);
  for (int i = 0; i < 50; ++i) {
    const Trace t = gen.trace("rt_" + std::to_string(i));
    const std::string once = write_trace(t);
    const Trace back = parse_trace(once);
    CHECK(structurally_equal(t, back));
    CHECK(write_trace(back) == once);
  }
}

TEST_CASE("validate_trace rejects broken structures") {
  Trace t;
  t.run_id = "r";
  t.points.push_back({"f", PptKind::Enter, {{"a"}}});
  t.samples.push_back({0, {1, 2}, 0});  // arity mismatch
  CHECK_THROWS_AS(validate_trace(t), std::invalid_argument);

  t.samples[0].values = {1};
  t.samples.push_back({5, {1}, 1});  // dangling point reference
  CHECK_THROWS_AS(validate_trace(t), std::invalid_argument);

  t.samples.pop_back();
  t.run_id = "";
  CHECK_THROWS_AS(validate_trace(t), std::invalid_argument);
}
