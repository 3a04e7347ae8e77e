#include <doctest.h>

#include <json.hpp>

#include "carrot/corpus.hpp"
#include "carrot/diff.hpp"
#include "support/oracle.hpp"
#include "support/random_traces.hpp"

using namespace carrot;

namespace {

Trace iso_enter(std::string run_id, int64_t x, int64_t y, int64_t z) {
  Trace t;
  t.run_id = std::move(run_id);
  t.points.push_back({"isIsosceles", PptKind::Enter, {{"x"}, {"y"}, {"z"}}});
  t.samples.push_back({0, {x, y, z}, 0});
  return t;
}

Model iso_model(const AnalysisConfig& cfg) {
  std::vector<Spectrum> spectra;
  spectra.push_back(compute_spectrum(iso_enter("g1", 1, 2, 3), cfg));
  spectra.push_back(compute_spectrum(iso_enter("g2", 2, 5, 5), cfg));
  spectra.push_back(compute_spectrum(iso_enter("g3", 2, 2, 3), cfg));
  return build_model(spectra);
}

Trace two_var(std::string run_id, int64_t a, int64_t b) {
  Trace t;
  t.run_id = std::move(run_id);
  t.points.push_back({"f", PptKind::Enter, {{"a"}, {"b"}}});
  t.samples.push_back({0, {a, b}, 0});
  return t;
}

}  // namespace

TEST_CASE("the buggy triangle run invalidates exactly x < z") {
  AnalysisConfig cfg;
  cfg.schemas = SchemaSet::of({SchemaKind::LessThan});
  cfg.value_sets = false;
  cfg.pair_sets = false;

  const Model m = iso_model(cfg);
  const DiffReport r = diff(m, compute_spectrum(iso_enter("bad", 2, 3, 2), cfg));
  CHECK(r.bad_run_id == "bad");
  REQUIRE(r.invalidated.size() == 1);
  const auto& [pi, inv] = r.invalidated[0];
  CHECK(inv.kind == SchemaKind::LessThan);
  CHECK(render_invariant(inv, r.table.points[pi]) == "x < z");
  CHECK(r.finding_count() == 1);
  CHECK(render_report(r, ReportFormat::Text) ==
        "isIsosceles:::ENTER  violated: x < z\n");
}

TEST_CASE("full-config triangle diff lists every finding in a stable order") {
  const Model m = iso_model(AnalysisConfig{});
  CHECK(m.live_count() == 1);  // everything except x < z dies across the good runs
  const DiffReport r =
      diff(m, compute_spectrum(iso_enter("bad", 2, 3, 2), AnalysisConfig{}));
  CHECK(r.invalidated.size() == 1);
  CHECK(r.value_extensions.size() == 2);
  CHECK(r.pair_extensions.size() == 3);
  CHECK(r.unmodeled.empty());
  CHECK(r.finding_count() == 6);
  CHECK(render_report(r, ReportFormat::Text) ==
        "isIsosceles:::ENTER  violated: x < z\n"
        "isIsosceles:::ENTER  value-set extension: y gained 3\n"
        "isIsosceles:::ENTER  value-set extension: z gained 2\n"
        "isIsosceles:::ENTER  pair-set extension: (x,y) gained (2,3)\n"
        "isIsosceles:::ENTER  pair-set extension: (x,z) gained (2,2)\n"
        "isIsosceles:::ENTER  pair-set extension: (y,z) gained (3,2)\n");
}

TEST_CASE("structured output is one self-contained json object per finding") {
  const Model m = iso_model(AnalysisConfig{});
  const DiffReport r =
      diff(m, compute_spectrum(iso_enter("bad", 2, 3, 2), AnalysisConfig{}));
  const std::string out = render_report(r, ReportFormat::Structured);

  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start < out.size()) {
    const std::size_t end = out.find('\n', start);
    lines.push_back(out.substr(start, end - start));
    start = end + 1;
  }
  CHECK(lines.size() == r.finding_count());

  CHECK(lines[0] ==
        R"({"category":"invalidated","ppt":"isIsosceles:::ENTER","kind":"LessThan",)"
        R"("vars":["x","z"],"detail":{"predicate":"x < z"}})");
  CHECK(lines[1] ==
        R"({"category":"value_ext","ppt":"isIsosceles:::ENTER","kind":"ValueSet",)"
        R"("vars":["y"],"detail":{"added":[3]}})");

  for (const std::string& line : lines) {
    const auto record = nlohmann::json::parse(line);
    CHECK(record.contains("category"));
    CHECK(record.contains("ppt"));
    CHECK(record.contains("kind"));
    CHECK(record.contains("vars"));
    CHECK(record.contains("detail"));
  }
}

TEST_CASE("a good run diffed against its own model reports nothing") {
  const Model m = iso_model(AnalysisConfig{});
  const DiffReport r =
      diff(m, compute_spectrum(iso_enter("g3", 2, 2, 3), AnalysisConfig{}));
  CHECK(r.empty());
  CHECK(r.finding_count() == 0);
  CHECK(render_report(r, ReportFormat::Text) ==
        "no invariants invalidated; no value-set extensions\n");
  CHECK(render_report(r, ReportFormat::Structured).empty());
}

TEST_CASE("pair sets flag recombined values that value sets cannot") {
  std::vector<Spectrum> spectra;
  spectra.push_back(compute_spectrum(two_var("g1", 1, 3), AnalysisConfig{}));
  spectra.push_back(compute_spectrum(two_var("g2", 2, 4), AnalysisConfig{}));
  const Model m = build_model(spectra);

  const DiffReport r = diff(m, compute_spectrum(two_var("bad", 1, 4), AnalysisConfig{}));
  CHECK(r.invalidated.empty());  // a < b still holds
  CHECK(r.value_extensions.empty());  // 1 and 4 were both seen before
  REQUIRE(r.pair_extensions.size() == 1);
  CHECK(r.pair_extensions[0].added ==
        std::vector<std::pair<int64_t, int64_t>>{{1, 4}});
  CHECK(render_report(r, ReportFormat::Text) ==
        "f:::ENTER  pair-set extension: (a,b) gained (1,4)\n");
}

TEST_CASE("points without good-run coverage are reported as unmodeled") {
  // route 1: the point is declared everywhere but only the bad run samples it
  Trace good;
  good.run_id = "good";
  good.points.push_back({"f", PptKind::Enter, {{"a"}}});
  good.points.push_back({"g", PptKind::Enter, {{"a"}}});
  good.samples.push_back({0, {1}, 0});

  Trace bad = good;
  bad.run_id = "bad";
  bad.samples.push_back({1, {5}, 1});
  bad.samples.push_back({1, {6}, 2});

  const Model m = model_of_spectrum(compute_spectrum(good, AnalysisConfig{}));
  const DiffReport r1 = diff(m, compute_spectrum(bad, AnalysisConfig{}));
  REQUIRE(r1.unmodeled.size() == 1);
  CHECK(r1.table.points[r1.unmodeled[0].point].label() == "g:::ENTER");
  CHECK(r1.unmodeled[0].bad_samples == 2);
  CHECK(render_report(r1, ReportFormat::Text) ==
        "g:::ENTER  unmodeled point: no good-run observations (2 bad-run samples)\n");
  const std::string structured = render_report(r1, ReportFormat::Structured);
  const auto record = nlohmann::json::parse(structured);
  CHECK(record["category"] == "unmodeled");
  CHECK(record["kind"].is_null());
  CHECK(record["detail"]["bad_samples"] == 2);

  // route 2: the bad run brings a point the model never declared
  Trace wider = bad;
  wider.run_id = "wider";
  Trace plain;
  plain.run_id = "plain";
  plain.points.push_back({"f", PptKind::Enter, {{"a"}}});
  plain.samples.push_back({0, {1}, 0});
  const Model m2 = model_of_spectrum(compute_spectrum(plain, AnalysisConfig{}));
  const DiffReport r2 = diff(m2, compute_spectrum(wider, AnalysisConfig{}));
  REQUIRE(r2.unmodeled.size() == 1);
  CHECK(r2.table.points[r2.unmodeled[0].point].label() == "g:::ENTER");
}

TEST_CASE("unmodeled points never double as extension findings") {
  Trace good = two_var("good", 1, 2);
  Trace bad = two_var("bad", 9, 9);
  bad.points[0].name = "g";  // disjoint instrumentation
  const Model m = model_of_spectrum(compute_spectrum(good, AnalysisConfig{}));
  const DiffReport r = diff(m, compute_spectrum(bad, AnalysisConfig{}));
  CHECK(r.invalidated.empty());
  CHECK(r.value_extensions.empty());
  CHECK(r.pair_extensions.empty());
  CHECK(r.unmodeled.size() == 1);
}

TEST_CASE("configuration and instrumentation mismatches are refused") {
  const Model m = iso_model(AnalysisConfig{});
  AnalysisConfig narrow;
  narrow.schemas = SchemaSet::of({SchemaKind::LessThan});
  CHECK_THROWS_AS(diff(m, compute_spectrum(iso_enter("bad", 2, 3, 2), narrow)),
                  CompatibilityError);

  Trace reshaped;
  reshaped.run_id = "reshaped";
  reshaped.points.push_back({"isIsosceles", PptKind::Enter, {{"x"}, {"y"}}});
  reshaped.samples.push_back({0, {1, 2}, 0});
  CHECK_THROWS_AS(diff(m, compute_spectrum(reshaped, AnalysisConfig{})),
                  CompatibilityError);
}

TEST_CASE("rendering a report twice gives identical bytes") {
  const Model m = iso_model(AnalysisConfig{});
  const Spectrum bad = compute_spectrum(iso_enter("bad", 2, 3, 2), AnalysisConfig{});
  const DiffReport r1 = diff(m, bad);
  const DiffReport r2 = diff(m, bad);
  CHECK(render_report(r1, ReportFormat::Text) == render_report(r2, ReportFormat::Text));
  CHECK(render_report(r1, ReportFormat::Structured) ==
        render_report(r2, ReportFormat::Structured));
}

TEST_CASE("every contributor to a model diffs clean against it") {
  testsupport::TraceGen gen(60601);
  for (int rep = 0; rep < 100; ++rep) {
    const std::vector<Trace> runs = gen.corpus(gen.pick(1, 6));
    AnalysisConfig cfg;
    if (gen.pick(0, 1)) cfg.schemas = SchemaSet::of({SchemaKind::LessThan, SchemaKind::ConstantEquality});
    std::vector<Spectrum> spectra;
    for (const Trace& t : runs) spectra.push_back(compute_spectrum(t, cfg));
    const Model m = build_model(spectra);
    for (const Spectrum& s : spectra) {
      const DiffReport r = diff(m, s);
      CHECK(r.empty());
      CHECK(render_report(r, ReportFormat::Structured).empty());
    }
  }
}
