#include <doctest.h>

#include <algorithm>
#include <cstdint>
#include <limits>

#include "carrot/engine.hpp"
#include "support/oracle.hpp"
#include "support/random_traces.hpp"

using namespace carrot;

namespace {

ProgramPoint xyz_point() {
  return {"f", PptKind::Enter, {{"x"}, {"y"}, {"z"}}};
}

std::vector<int64_t> draw_values(testsupport::TraceGen& gen, const ProgramPoint& p) {
  std::vector<int64_t> vals(p.arity());
  for (int64_t& v : vals) v = gen.value();
  return vals;
}

}  // namespace

TEST_CASE("instantiation counts per schema family") {
  const ProgramPoint p3 = xyz_point();
  CHECK(instantiate_all(p3, SchemaSet::of({SchemaKind::LessThan})).size() == 6);
  CHECK(instantiate_all(p3, SchemaSet::of({SchemaKind::Equality})).size() == 3);
  CHECK(instantiate_all(p3, SchemaSet::of({SchemaKind::Sum})).size() == 3);
  CHECK(instantiate_all(p3, SchemaSet::of({SchemaKind::ConstantEquality})).size() == 3);
  CHECK(instantiate_all(p3, SchemaSet::all()).size() == 15);

  const ProgramPoint p1{"g", PptKind::Enter, {{"a"}}};
  CHECK(instantiate_all(p1, SchemaSet::all()).size() == 1);
  const ProgramPoint p0{"h", PptKind::Enter, {}};
  CHECK(instantiate_all(p0, SchemaSet::all()).empty());

  for (std::size_t n : {std::size_t(0), std::size_t(1), std::size_t(2),
                        std::size_t(3), std::size_t(5), std::size_t(8)}) {
    std::vector<VarDecl> decls;
    for (std::size_t i = 0; i < n; ++i) decls.push_back({"v" + std::to_string(i)});
    const ProgramPoint p{"w", PptKind::Enter, decls};
    for (SchemaKind k : all_schema_kinds) {
      const SchemaSet one = SchemaSet::of({k});
      CHECK(instantiate_all(p, one).size() == instantiation_count(n, one));
    }
    CHECK(instantiate_all(p, SchemaSet::all()).size() ==
          instantiation_count(n, SchemaSet::all()));
    CHECK(instantiation_count(n, SchemaSet::all()) == 2 * n * n - n);
  }
}

TEST_CASE("lessthan instances cover every ordered pair exactly once") {
  const ProgramPoint p = xyz_point();
  const auto invs = instantiate_all(p, SchemaSet::of({SchemaKind::LessThan}));
  std::set<std::string> keys;
  for (const InvariantInstance& inv : invs) {
    CHECK(inv.status == InvStatus::Live);  // relational schemata start live
    keys.insert(testsupport::inv_key(inv, p));
  }
  CHECK(keys == std::set<std::string>{"LessThan x y", "LessThan x z", "LessThan y x",
                                      "LessThan y z", "LessThan z x", "LessThan z y"});
}

TEST_CASE("lessthan falsifies on the first violating sample and stays dead") {
  const ProgramPoint p = xyz_point();
  InvariantInstance inv{SchemaKind::LessThan, 0, 2, InvStatus::Live, std::nullopt};

  update_invariant(inv, std::vector<int64_t>{2, 2, 3});  // 2 < 3
  CHECK(inv.status == InvStatus::Live);
  update_invariant(inv, std::vector<int64_t>{2, 3, 2});  // 2 < 2 fails
  CHECK(inv.status == InvStatus::Falsified);
  update_invariant(inv, std::vector<int64_t>{0, 9, 9});  // would hold, too late
  CHECK(inv.status == InvStatus::Falsified);
}

TEST_CASE("constant equality learns from the first sample") {
  InvariantInstance inv{SchemaKind::ConstantEquality, 1, 0, InvStatus::Unbound,
                        std::nullopt};
  update_invariant(inv, std::vector<int64_t>{9, 5});
  CHECK(inv.status == InvStatus::Live);
  CHECK(inv.learned_const == 5);
  update_invariant(inv, std::vector<int64_t>{0, 5});
  CHECK(inv.status == InvStatus::Live);
  update_invariant(inv, std::vector<int64_t>{0, 6});
  CHECK(inv.status == InvStatus::Falsified);
  CHECK(inv.learned_const == 5);  // identity keeps the learned constant
}

TEST_CASE("sum learns its target from the first sample") {
  InvariantInstance inv{SchemaKind::Sum, 0, 1, InvStatus::Unbound, std::nullopt};
  update_invariant(inv, std::vector<int64_t>{1, 3});
  CHECK(inv.status == InvStatus::Live);
  CHECK(inv.learned_const == 4);
  update_invariant(inv, std::vector<int64_t>{2, 2});
  CHECK(inv.status == InvStatus::Live);
  update_invariant(inv, std::vector<int64_t>{2, 3});
  CHECK(inv.status == InvStatus::Falsified);
}

TEST_CASE("sum wraps on overflow instead of trapping") {
  const int64_t big = std::numeric_limits<int64_t>::max();
  InvariantInstance inv{SchemaKind::Sum, 0, 1, InvStatus::Unbound, std::nullopt};
  update_invariant(inv, std::vector<int64_t>{big, 1});
  CHECK(inv.learned_const == std::numeric_limits<int64_t>::min());
  update_invariant(inv, std::vector<int64_t>{1, big});
  CHECK(inv.status == InvStatus::Live);
  update_invariant(inv, std::vector<int64_t>{big, 2});
  CHECK(inv.status == InvStatus::Falsified);
}

TEST_CASE("update rejects samples that don't cover the slots") {
  InvariantInstance inv{SchemaKind::LessThan, 0, 2, InvStatus::Live, std::nullopt};
  CHECK_THROWS_AS(update_invariant(inv, std::vector<int64_t>{1, 2}),
                  std::invalid_argument);
}

TEST_CASE("pair sets reject recombinations that plain value sets admit") {
  const ProgramPoint p{"f", PptKind::Enter, {{"a"}, {"b"}}};
  auto vsets = make_value_sets(p);
  auto psets = make_pair_sets(p);
  update_value_sets(vsets, psets, std::vector<int64_t>{1, 3});
  update_value_sets(vsets, psets, std::vector<int64_t>{2, 4});

  REQUIRE(vsets.size() == 2);
  CHECK(vsets[0].values == std::set<int64_t>{1, 2});
  CHECK(vsets[1].values == std::set<int64_t>{3, 4});

  REQUIRE(psets.size() == 1);
  const auto& pairs = psets[0].pairs;
  CHECK(pairs.size() == 2);
  CHECK(pairs.contains({1, 3}));
  CHECK(pairs.contains({2, 4}));
  // (1,4) is consistent with both value sets but never actually occurred
  CHECK(!pairs.contains({1, 4}));
  CHECK(!pairs.contains({2, 3}));
}

TEST_CASE("pair sets project into their component value sets") {
  testsupport::TraceGen gen(7);
  for (int rep = 0; rep < 30; ++rep) {
    const ProgramPoint p = gen.point_table(1).front();
    auto vsets = make_value_sets(p);
    auto psets = make_pair_sets(p);
    const std::size_t n = gen.pick(1, 20);
    for (std::size_t i = 0; i < n; ++i)
      update_value_sets(vsets, psets, draw_values(gen, p));
    for (const PairValueSet& ps : psets) {
      const auto find = [&](uint16_t var) {
        for (const ValueSet& vs : vsets)
          if (vs.var == var) return &vs;
        return static_cast<const ValueSet*>(nullptr);
      };
      const ValueSet* va = find(ps.var_a);
      const ValueSet* vb = find(ps.var_b);
      REQUIRE(va != nullptr);
      REQUIRE(vb != nullptr);
      for (const auto& [x, y] : ps.pairs) {
        CHECK(va->values.contains(x));
        CHECK(vb->values.contains(y));
      }
      CHECK(ps.pairs.size() <= va->values.size() * vb->values.size());
    }
  }
}

TEST_CASE("point engine matches the brute-force reference on random streams") {
  testsupport::TraceGen gen(1234);
  for (int rep = 0; rep < 200; ++rep) {
    const ProgramPoint p = gen.point_table(1).front();
    SchemaSet enabled;
    for (SchemaKind k : all_schema_kinds)
      if (gen.pick(0, 1)) enabled.insert(k);
    if (enabled.empty()) enabled = SchemaSet::all();

    AnalysisConfig cfg;
    cfg.schemas = enabled;
    PointEngine engine(p, cfg);
    std::vector<std::vector<int64_t>> samples;
    const std::size_t n = gen.pick(0, 30);
    for (std::size_t i = 0; i < n; ++i) {
      samples.push_back(draw_values(gen, p));
      engine.observe(samples.back());
    }
    CHECK(testsupport::engine_live_keys(engine.live(), p) ==
          testsupport::oracle_live_keys(p, samples, enabled));
  }
}

TEST_CASE("live count only shrinks, value sets only grow") {
  testsupport::TraceGen gen(99);
  for (int rep = 0; rep < 20; ++rep) {
    const ProgramPoint p = gen.point_table(1).front();
    PointEngine engine(p, AnalysisConfig{});
    std::size_t prev_live = instantiate_all(p, SchemaSet::all()).size();
    std::size_t prev_vset = 0;
    std::size_t prev_pset = 0;
    for (int i = 0; i < 25; ++i) {
      engine.observe(draw_values(gen, p));
      const std::size_t now_live = engine.live().size();
      std::size_t now_vset = 0;
      for (const ValueSet& vs : engine.value_sets()) now_vset += vs.values.size();
      std::size_t now_pset = 0;
      for (const PairValueSet& ps : engine.pair_sets()) now_pset += ps.pairs.size();
      if (i > 0) CHECK(now_live <= prev_live);
      CHECK(now_vset >= prev_vset);
      CHECK(now_pset >= prev_pset);
      prev_live = now_live;
      prev_vset = now_vset;
      prev_pset = now_pset;
    }
  }
}

TEST_CASE("disabling set tracking leaves the engine empty-handed") {
  const ProgramPoint p = xyz_point();
  AnalysisConfig cfg;
  cfg.value_sets = false;
  cfg.pair_sets = false;
  PointEngine engine(p, cfg);
  engine.observe(std::vector<int64_t>{1, 2, 3});
  CHECK(engine.value_sets().empty());
  CHECK(engine.pair_sets().empty());
  CHECK(!engine.live().empty());
  CHECK(engine.samples_seen() == 1);
}

TEST_CASE("config validation requires at least one signal source") {
  AnalysisConfig cfg;
  cfg.schemas = SchemaSet::none();
  cfg.value_sets = false;
  cfg.pair_sets = false;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.value_sets = true;
  CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("schema set string forms round-trip") {
  for (SchemaKind k : all_schema_kinds) {
    CHECK(schema_from_name(schema_name(k)) == k);
  }
  const SchemaSet some = SchemaSet::of({SchemaKind::Equality, SchemaKind::LessThan});
  CHECK(some.to_string() == "Equality,LessThan");
  CHECK(SchemaSet::from_string("Equality,LessThan") == some);
  CHECK(SchemaSet::from_string(SchemaSet::all().to_string()) == SchemaSet::all());
  CHECK(SchemaSet::from_string("none") == SchemaSet::none());
  CHECK(!SchemaSet::from_string("Equality,Bogus"));
  CHECK(schema_from_flag("lessthan") == SchemaKind::LessThan);
  CHECK(!schema_from_flag("LessThan"));  // flag spelling is lowercase-only
}

TEST_CASE("equality survives exactly when the pair never diverges") {
  const ProgramPoint p{"f", PptKind::Enter, {{"a"}, {"b"}}};
  AnalysisConfig cfg;
  cfg.schemas = SchemaSet::of({SchemaKind::Equality});
  PointEngine engine(p, cfg);
  engine.observe(std::vector<int64_t>{4, 4});
  engine.observe(std::vector<int64_t>{-1, -1});
  CHECK(engine.live().size() == 1);
  engine.observe(std::vector<int64_t>{3, 4});
  CHECK(engine.live().empty());
}
