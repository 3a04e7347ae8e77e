#include "carrot/engine.hpp"

#include <algorithm>
#include <stdexcept>

namespace carrot {

namespace {

int64_t wrapping_add(int64_t a, int64_t b) {
  return static_cast<int64_t>(static_cast<uint64_t>(a) + static_cast<uint64_t>(b));
}

}  // namespace

std::string_view schema_name(SchemaKind kind) {
  switch (kind) {
    case SchemaKind::Equality: return "Equality";
    case SchemaKind::Sum: return "Sum";
    case SchemaKind::LessThan: return "LessThan";
    case SchemaKind::ConstantEquality: return "ConstantEquality";
  }
  return "?";
}

std::optional<SchemaKind> schema_from_name(std::string_view name) {
  for (SchemaKind k : all_schema_kinds)
    if (schema_name(k) == name) return k;
  return std::nullopt;
}

std::optional<SchemaKind> schema_from_flag(std::string_view flag) {
  if (flag == "eq") return SchemaKind::Equality;
  if (flag == "sum") return SchemaKind::Sum;
  if (flag == "lessthan") return SchemaKind::LessThan;
  if (flag == "const") return SchemaKind::ConstantEquality;
  return std::nullopt;
}

SchemaSet SchemaSet::all() {
  SchemaSet s;
  for (SchemaKind k : all_schema_kinds) s.insert(k);
  return s;
}

SchemaSet SchemaSet::of(std::initializer_list<SchemaKind> kinds) {
  SchemaSet s;
  for (SchemaKind k : kinds) s.insert(k);
  return s;
}

std::size_t SchemaSet::count() const {
  std::size_t n = 0;
  for (SchemaKind k : all_schema_kinds)
    if (contains(k)) ++n;
  return n;
}

std::string SchemaSet::to_string() const {
  if (empty()) return "none";
  std::string out;
  for (SchemaKind k : all_schema_kinds) {
    if (!contains(k)) continue;
    if (!out.empty()) out += ",";
    out += schema_name(k);
  }
  return out;
}

std::optional<SchemaSet> SchemaSet::from_string(std::string_view s) {
  if (s == "none") return SchemaSet::none();
  SchemaSet out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    std::size_t comma = s.find(',', pos);
    std::string_view item = s.substr(
        pos, comma == std::string_view::npos ? s.size() - pos : comma - pos);
    auto kind = schema_from_name(item);
    if (!kind) return std::nullopt;
    out.insert(*kind);
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

bool same_invariant(const InvariantInstance& a, const InvariantInstance& b) {
  return a.kind == b.kind && a.slot_a == b.slot_a && a.slot_b == b.slot_b &&
         a.learned_const == b.learned_const;
}

bool InvariantOrder::operator()(const InvariantInstance& a,
                                const InvariantInstance& b) const {
  if (a.kind != b.kind) return a.kind < b.kind;
  const auto& name = [&](uint16_t slot) -> const std::string& {
    return ppt->decls[slot].name;
  };
  if (name(a.slot_a) != name(b.slot_a)) return name(a.slot_a) < name(b.slot_a);
  if (a.is_pair() && name(a.slot_b) != name(b.slot_b))
    return name(a.slot_b) < name(b.slot_b);
  return a.learned_const < b.learned_const;
}

std::vector<InvariantInstance> instantiate_all(const ProgramPoint& ppt,
                                               SchemaSet enabled) {
  const std::size_t n = ppt.arity();
  // Variable indices in name order, so slots come out canonical.
  std::vector<uint16_t> by_name(n);
  for (std::size_t i = 0; i < n; ++i) by_name[i] = static_cast<uint16_t>(i);
  std::sort(by_name.begin(), by_name.end(), [&](uint16_t a, uint16_t b) {
    return ppt.decls[a].name < ppt.decls[b].name;
  });

  std::vector<InvariantInstance> out;
  auto add = [&](SchemaKind kind, uint16_t a, uint16_t b, InvStatus status) {
    out.push_back({kind, a, b, status, std::nullopt});
  };
  if (enabled.contains(SchemaKind::Equality))
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        add(SchemaKind::Equality, by_name[i], by_name[j], InvStatus::Live);
  if (enabled.contains(SchemaKind::Sum))
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        add(SchemaKind::Sum, by_name[i], by_name[j], InvStatus::Unbound);
  if (enabled.contains(SchemaKind::LessThan))
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) add(SchemaKind::LessThan, by_name[i], by_name[j], InvStatus::Live);
  if (enabled.contains(SchemaKind::ConstantEquality))
    for (std::size_t i = 0; i < n; ++i)
      add(SchemaKind::ConstantEquality, by_name[i], 0, InvStatus::Unbound);
  std::sort(out.begin(), out.end(), InvariantOrder{&ppt});
  return out;
}

std::size_t instantiation_count(std::size_t n, SchemaSet enabled) {
  std::size_t total = 0;
  if (enabled.contains(SchemaKind::Equality)) total += n * (n - 1) / 2;
  if (enabled.contains(SchemaKind::Sum)) total += n * (n - 1) / 2;
  if (enabled.contains(SchemaKind::LessThan)) total += n * (n - 1);
  if (enabled.contains(SchemaKind::ConstantEquality)) total += n;
  return n == 0 ? 0 : total;
}

void update_invariant(InvariantInstance& inv, std::span<const int64_t> values) {
  if (inv.status == InvStatus::Falsified) return;
  if (inv.slot_a >= values.size() || (inv.is_pair() && inv.slot_b >= values.size()))
    throw std::invalid_argument("invariant slot does not name a variable of this point");
  const int64_t a = values[inv.slot_a];
  switch (inv.kind) {
    case SchemaKind::Equality:
      if (a != values[inv.slot_b]) inv.status = InvStatus::Falsified;
      break;
    case SchemaKind::LessThan:
      if (!(a < values[inv.slot_b])) inv.status = InvStatus::Falsified;
      break;
    case SchemaKind::Sum: {
      const int64_t sum = wrapping_add(a, values[inv.slot_b]);
      if (inv.status == InvStatus::Unbound) {
        inv.learned_const = sum;
        inv.status = InvStatus::Live;
      } else if (sum != *inv.learned_const) {
        inv.status = InvStatus::Falsified;
      }
      break;
    }
    case SchemaKind::ConstantEquality:
      if (inv.status == InvStatus::Unbound) {
        inv.learned_const = a;
        inv.status = InvStatus::Live;
      } else if (a != *inv.learned_const) {
        inv.status = InvStatus::Falsified;
      }
      break;
  }
}

std::vector<ValueSet> make_value_sets(const ProgramPoint& ppt) {
  std::vector<ValueSet> out(ppt.arity());
  for (std::size_t i = 0; i < ppt.arity(); ++i) out[i].var = static_cast<uint16_t>(i);
  return out;
}

std::vector<PairValueSet> make_pair_sets(const ProgramPoint& ppt) {
  const std::size_t n = ppt.arity();
  std::vector<uint16_t> by_name(n);
  for (std::size_t i = 0; i < n; ++i) by_name[i] = static_cast<uint16_t>(i);
  std::sort(by_name.begin(), by_name.end(), [&](uint16_t a, uint16_t b) {
    return ppt.decls[a].name < ppt.decls[b].name;
  });
  std::vector<PairValueSet> out;
  out.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      out.push_back({by_name[i], by_name[j], {}});
  return out;
}

void update_value_sets(std::vector<ValueSet>& vsets,
                       std::vector<PairValueSet>& psets,
                       std::span<const int64_t> values) {
  for (ValueSet& vs : vsets) vs.values.insert(values[vs.var]);
  for (PairValueSet& ps : psets)
    ps.pairs.emplace(values[ps.var_a], values[ps.var_b]);
}

void AnalysisConfig::validate() const {
  if (schemas.empty() && !value_sets && !pair_sets)
    throw std::invalid_argument(
        "configuration disables all schemata and all value sets");
}

PointEngine::PointEngine(const ProgramPoint& ppt, const AnalysisConfig& cfg)
    : arity_(ppt.arity()), instances_(instantiate_all(ppt, cfg.schemas)) {
  if (cfg.value_sets) vsets_ = make_value_sets(ppt);
  if (cfg.pair_sets) psets_ = make_pair_sets(ppt);
}

void PointEngine::observe(std::span<const int64_t> values) {
  if (values.size() != arity_)
    throw std::invalid_argument("sample arity does not match point");
  for (InvariantInstance& inv : instances_) update_invariant(inv, values);
  update_value_sets(vsets_, psets_, values);
  ++samples_;
}

std::vector<InvariantInstance> PointEngine::live() const {
  std::vector<InvariantInstance> out;
  for (const InvariantInstance& inv : instances_)
    if (inv.status == InvStatus::Live) out.push_back(inv);
  return out;
}

}  // namespace carrot
