#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "carrot/trace.hpp"

namespace carrot {

enum class SchemaKind : uint8_t {
  Equality = 0,         // a == b
  Sum = 1,              // a + b == c, c learned from the first sample
  LessThan = 2,         // a < b (strict)
  ConstantEquality = 3  // a == c, c learned from the first sample
};

inline constexpr std::array<SchemaKind, 4> all_schema_kinds = {
    SchemaKind::Equality, SchemaKind::Sum, SchemaKind::LessThan,
    SchemaKind::ConstantEquality};

std::string_view schema_name(SchemaKind kind);
std::optional<SchemaKind> schema_from_name(std::string_view name);
// CLI spelling: eq, sum, lessthan, const.
std::optional<SchemaKind> schema_from_flag(std::string_view flag);

class SchemaSet {
public:
  static SchemaSet all();
  static SchemaSet none() { return SchemaSet{}; }
  static SchemaSet of(std::initializer_list<SchemaKind> kinds);

  void insert(SchemaKind k) { bits_ |= bit(k); }
  bool contains(SchemaKind k) const { return bits_ & bit(k); }
  std::size_t count() const;
  bool empty() const { return bits_ == 0; }

  // Canonical comma-joined schema names in enum order, or "none".
  std::string to_string() const;
  static std::optional<SchemaSet> from_string(std::string_view s);

  friend bool operator==(const SchemaSet&, const SchemaSet&) = default;

private:
  static uint8_t bit(SchemaKind k) { return uint8_t(1u << static_cast<uint8_t>(k)); }
  uint8_t bits_ = 0;
};

enum class InvStatus : uint8_t { Unbound, Live, Falsified };

/// One schema applied to concrete variable slots of a program point.
/// Identity is (kind, slots, learned_const); status is tracking state.
/// Symmetric schemata (Equality, Sum) keep slots sorted by variable name;
/// LessThan slots are an ordered pair; ConstantEquality uses slot_a only.
struct InvariantInstance {
  SchemaKind kind = SchemaKind::Equality;
  uint16_t slot_a = 0;
  uint16_t slot_b = 0;
  InvStatus status = InvStatus::Unbound;
  std::optional<int64_t> learned_const;

  bool is_pair() const { return kind != SchemaKind::ConstantEquality; }
};

bool same_invariant(const InvariantInstance& a, const InvariantInstance& b);

/// Canonical order within one program point: (kind, slot names, constant).
struct InvariantOrder {
  const ProgramPoint* ppt;
  bool operator()(const InvariantInstance& a, const InvariantInstance& b) const;
};

/// All instances of the enabled schemata over a point's variables, in
/// canonical order. For n variables: n(n-1) LessThan, n(n-1)/2 Equality,
/// n(n-1)/2 Sum, n ConstantEquality. Equality/LessThan start Live,
/// Sum/ConstantEquality start Unbound.
std::vector<InvariantInstance> instantiate_all(const ProgramPoint& ppt,
                                               SchemaSet enabled);

std::size_t instantiation_count(std::size_t variable_count, SchemaSet enabled);

/// Feeds one sample to an instance. No-op when already Falsified;
/// falsification is permanent. Throws std::invalid_argument when the
/// slots don't fit the sample (engine/point mismatch).
void update_invariant(InvariantInstance& inv, std::span<const int64_t> values);

struct ValueSet {
  uint16_t var = 0;
  std::set<int64_t> values;

  friend bool operator==(const ValueSet&, const ValueSet&) = default;
};

struct PairValueSet {
  uint16_t var_a = 0;  // name-lexicographically first variable
  uint16_t var_b = 0;
  std::set<std::pair<int64_t, int64_t>> pairs;

  friend bool operator==(const PairValueSet&, const PairValueSet&) = default;
};

std::vector<ValueSet> make_value_sets(const ProgramPoint& ppt);
std::vector<PairValueSet> make_pair_sets(const ProgramPoint& ppt);

void update_value_sets(std::vector<ValueSet>& vsets,
                       std::vector<PairValueSet>& psets,
                       std::span<const int64_t> values);

struct AnalysisConfig {
  SchemaSet schemas = SchemaSet::all();
  bool value_sets = true;
  bool pair_sets = true;

  // At least one signal source must be on.
  void validate() const;

  friend bool operator==(const AnalysisConfig&, const AnalysisConfig&) = default;
};

/// Streaming state for one program point: candidate instances plus value
/// and pair sets, updated sample by sample.
class PointEngine {
public:
  PointEngine() = default;
  PointEngine(const ProgramPoint& ppt, const AnalysisConfig& cfg);

  void observe(std::span<const int64_t> values);

  uint64_t samples_seen() const { return samples_; }
  const std::vector<InvariantInstance>& instances() const { return instances_; }
  const std::vector<ValueSet>& value_sets() const { return vsets_; }
  const std::vector<PairValueSet>& pair_sets() const { return psets_; }
  std::vector<InvariantInstance> live() const;

private:
  std::size_t arity_ = 0;
  std::vector<InvariantInstance> instances_;
  std::vector<ValueSet> vsets_;
  std::vector<PairValueSet> psets_;
  uint64_t samples_ = 0;
};

}  // namespace carrot
