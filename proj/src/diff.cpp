#include "carrot/diff.hpp"

#include <algorithm>

#include <json.hpp>

namespace carrot {

bool DiffReport::empty() const {
  return invalidated.empty() && value_extensions.empty() && pair_extensions.empty() &&
         unmodeled.empty();
}

std::size_t DiffReport::finding_count() const {
  return invalidated.size() + value_extensions.size() + pair_extensions.size() +
         unmodeled.size();
}

DiffReport diff(const Model& model, const Spectrum& bad) {
  if (!(model.config == bad.config))
    throw CompatibilityError(
        "model and bad spectrum were computed under different configurations");
  DiffReport report;
  report.bad_run_id = bad.run_id;
  report.table = merge_tables(model.table, bad.table);

  for (std::size_t pi = 0; pi < report.table.points.size(); ++pi) {
    const ProgramPoint& p = report.table.points[pi];
    auto bi = bad.table.find(p.name, p.kind);
    if (!bi || !bad.by_point[*bi].observed()) continue;
    const PointSummary& bp = bad.by_point[*bi];

    auto mi = model.table.find(p.name, p.kind);
    if (!mi || !model.by_point[*mi].observed()) {
      report.unmodeled.push_back({pi, bp.samples_seen});
      continue;
    }
    const PointSummary& mp = model.by_point[*mi];

    std::vector<InvariantInstance> dead;
    std::set_difference(mp.live.begin(), mp.live.end(), bp.live.begin(), bp.live.end(),
                        std::back_inserter(dead), InvariantOrder{&p});
    for (InvariantInstance& inv : dead) report.invalidated.emplace_back(pi, inv);

    // vsets_/psets_ line up between summaries: both were built from the
    // same declaration list (compatibility was checked above).
    std::vector<std::size_t> vorder(bp.vsets.size());
    for (std::size_t k = 0; k < vorder.size(); ++k) vorder[k] = k;
    std::sort(vorder.begin(), vorder.end(), [&](std::size_t x, std::size_t y) {
      return p.decls[bp.vsets[x].var].name < p.decls[bp.vsets[y].var].name;
    });
    for (std::size_t k : vorder) {
      const ValueSet& bv = bp.vsets[k];
      const ValueSet& mv = mp.vsets[k];
      std::vector<int64_t> added;
      std::set_difference(bv.values.begin(), bv.values.end(), mv.values.begin(),
                          mv.values.end(), std::back_inserter(added));
      if (!added.empty())
        report.value_extensions.push_back({pi, bv.var, std::move(added)});
    }
    for (std::size_t k = 0; k < bp.psets.size(); ++k) {
      const PairValueSet& bs = bp.psets[k];
      const PairValueSet& ms = mp.psets[k];
      std::vector<std::pair<int64_t, int64_t>> added;
      std::set_difference(bs.pairs.begin(), bs.pairs.end(), ms.pairs.begin(),
                          ms.pairs.end(), std::back_inserter(added));
      if (!added.empty())
        report.pair_extensions.push_back({pi, bs.var_a, bs.var_b, std::move(added)});
    }
  }
  return report;
}

namespace {

std::string render_text(const DiffReport& r) {
  if (r.empty()) return "no invariants invalidated; no value-set extensions\n";
  std::string out;
  for (const auto& [pi, inv] : r.invalidated) {
    const ProgramPoint& p = r.table.points[pi];
    out += p.label() + "  violated: " + render_invariant(inv, p) + "\n";
  }
  for (const ValueExtension& e : r.value_extensions) {
    const ProgramPoint& p = r.table.points[e.point];
    out += p.label() + "  value-set extension: " + p.decls[e.var].name + " gained";
    for (int64_t v : e.added) out += " " + std::to_string(v);
    out += "\n";
  }
  for (const PairExtension& e : r.pair_extensions) {
    const ProgramPoint& p = r.table.points[e.point];
    out += p.label() + "  pair-set extension: (" + p.decls[e.var_a].name + "," +
           p.decls[e.var_b].name + ") gained";
    for (const auto& [v, w] : e.added)
      out += " (" + std::to_string(v) + "," + std::to_string(w) + ")";
    out += "\n";
  }
  for (const UnmodeledPoint& u : r.unmodeled) {
    const ProgramPoint& p = r.table.points[u.point];
    out += p.label() + "  unmodeled point: no good-run observations (" +
           std::to_string(u.bad_samples) + " bad-run samples)\n";
  }
  return out;
}

std::string render_structured(const DiffReport& r) {
  using json = nlohmann::ordered_json;
  std::string out;
  auto emit = [&](json record) { out += record.dump() + "\n"; };
  for (const auto& [pi, inv] : r.invalidated) {
    const ProgramPoint& p = r.table.points[pi];
    json vars = json::array();
    vars.push_back(p.decls[inv.slot_a].name);
    if (inv.is_pair()) vars.push_back(p.decls[inv.slot_b].name);
    json detail{{"predicate", render_invariant(inv, p)}};
    if (inv.learned_const) detail["const"] = *inv.learned_const;
    emit({{"category", "invalidated"},
          {"ppt", p.label()},
          {"kind", schema_name(inv.kind)},
          {"vars", vars},
          {"detail", detail}});
  }
  for (const ValueExtension& e : r.value_extensions) {
    const ProgramPoint& p = r.table.points[e.point];
    emit({{"category", "value_ext"},
          {"ppt", p.label()},
          {"kind", "ValueSet"},
          {"vars", json::array({p.decls[e.var].name})},
          {"detail", {{"added", e.added}}}});
  }
  for (const PairExtension& e : r.pair_extensions) {
    const ProgramPoint& p = r.table.points[e.point];
    json added = json::array();
    for (const auto& [v, w] : e.added) added.push_back(json::array({v, w}));
    emit({{"category", "pair_ext"},
          {"ppt", p.label()},
          {"kind", "PairValueSet"},
          {"vars", json::array({p.decls[e.var_a].name, p.decls[e.var_b].name})},
          {"detail", {{"added", added}}}});
  }
  for (const UnmodeledPoint& u : r.unmodeled) {
    const ProgramPoint& p = r.table.points[u.point];
    emit({{"category", "unmodeled"},
          {"ppt", p.label()},
          {"kind", nullptr},
          {"vars", json::array()},
          {"detail", {{"bad_samples", u.bad_samples}}}});
  }
  return out;
}

}  // namespace

std::string render_report(const DiffReport& report, ReportFormat format) {
  return format == ReportFormat::Text ? render_text(report)
                                      : render_structured(report);
}

}  // namespace carrot
