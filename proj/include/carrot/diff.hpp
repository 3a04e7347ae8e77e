#pragma once

#include "carrot/spectrum.hpp"

namespace carrot {

enum class ReportFormat : uint8_t { Text, Structured };

struct ValueExtension {
  std::size_t point = 0;  // index into DiffReport::table
  uint16_t var = 0;
  std::vector<int64_t> added;  // ascending
};

struct PairExtension {
  std::size_t point = 0;
  uint16_t var_a = 0;
  uint16_t var_b = 0;
  std::vector<std::pair<int64_t, int64_t>> added;  // ascending
};

struct UnmodeledPoint {
  std::size_t point = 0;
  uint64_t bad_samples = 0;
};

/// Localization output. `invalidated` holds model invariants the bad run
/// falsified; extensions hold bad-run values outside the model's sets.
/// Points the bad run exercised but no good run ever did are listed as
/// unmodeled instead of producing extensions — "no model" and "model
/// violated" are different findings.
struct DiffReport {
  std::string bad_run_id;
  PointTable table;  // model table merged with the bad run's
  std::vector<std::pair<std::size_t, InvariantInstance>> invalidated;
  std::vector<ValueExtension> value_extensions;
  std::vector<PairExtension> pair_extensions;
  std::vector<UnmodeledPoint> unmodeled;

  bool empty() const;
  // One record per finding, matching the structured rendering.
  std::size_t finding_count() const;
};

/// invalidated == model.live \ absorb(model, bad).live, pointwise.
/// Throws CompatibilityError on mismatched point tables or configs.
DiffReport diff(const Model& model, const Spectrum& bad);

/// Text: one finding per line, invalidations first, then value/pair set
/// extensions, then unmodeled points. Structured: one JSON object per
/// line with fields {category, ppt, kind, vars, detail}.
std::string render_report(const DiffReport& report, ReportFormat format);

}  // namespace carrot
