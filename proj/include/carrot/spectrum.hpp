#pragma once

#include <span>
#include <string>
#include <vector>

#include "carrot/engine.hpp"
#include "carrot/trace.hpp"

namespace carrot {

/// Two runs disagree about instrumentation: same point label with
/// different declarations, or spectra built under different configs.
class CompatibilityError : public std::runtime_error {
public:
  explicit CompatibilityError(const std::string& what) : std::runtime_error(what) {}
};

struct PointTable {
  std::vector<ProgramPoint> points;  // sorted by (name, kind)

  std::optional<std::size_t> find(std::string_view name, PptKind kind) const;
  std::optional<std::size_t> find_label(std::string_view label) const;

  static PointTable of_trace(const Trace& t);

  friend bool operator==(const PointTable&, const PointTable&) = default;
};

/// Throws CompatibilityError when a shared label has different decls.
void check_compatible(const PointTable& a, const PointTable& b);
PointTable merge_tables(const PointTable& a, const PointTable& b);

struct PointSummary {
  std::vector<InvariantInstance> live;  // canonical order; empty when unobserved
  std::vector<ValueSet> vsets;
  std::vector<PairValueSet> psets;
  uint64_t samples_seen = 0;

  bool observed() const { return samples_seen > 0; }
};

/// Per-run behavior summary: live invariant instances plus value and pair
/// sets. Candidates at points the run never observed are excluded.
struct Spectrum {
  std::string run_id;
  AnalysisConfig config;
  PointTable table;
  std::vector<PointSummary> by_point;  // parallel to table.points

  uint64_t live_count() const;
};

/// Combined good-run behavior: live
/// instances are intersected per point (over the runs that observed the
/// point), value and pair sets are unioned.
struct Model {
  AnalysisConfig config;
  PointTable table;
  std::vector<PointSummary> by_point;
  uint64_t runs_absorbed = 0;

  uint64_t live_count() const;
};

/// Streaming consumer of ordered samples. One engine per run yields that
/// run's spectrum; one engine over many traces yields the streamed model
/// directly (constants bind at the globally first observation).
class RunEngine {
public:
  explicit RunEngine(AnalysisConfig cfg);

  void absorb_trace(const Trace& t);

  Spectrum to_spectrum(std::string run_id) const;
  Model to_model(uint64_t runs_absorbed) const;

private:
  AnalysisConfig cfg_;
  std::vector<ProgramPoint> points_;  // insertion order
  std::vector<PointEngine> engines_;
  std::optional<std::size_t> find(const ProgramPoint& p) const;
};

Spectrum compute_spectrum(const Trace& t, const AnalysisConfig& cfg);

Model model_of_spectrum(const Spectrum& s);
Model build_model(std::span<const Spectrum> spectra);
Model absorb(Model m, const Spectrum& s);
Model merge_models(Model a, const Model& b);

/// Single engine streamed over all traces in order; equals build_model
/// over per-run spectra, but does not keep per-run state.
Model stream_model(std::span<const Trace> traces, const AnalysisConfig& cfg);

/// Canonical text form:
///   spectrum <run_id>       (or: model <runs_absorbed>)
///   schemata <names|none>
///   sets vsets=<on|off> psets=<on|off>
///   ppt/var blocks as in the trace format, then per point:
///   obs <ppt> <sample_count>
///   inv <ppt> <kind> <slots...> [const]
///   vset <ppt> <var> <v1> <v2> ...
///   pset <ppt> <a> <b> (v,w) (v,w) ...
std::string write_spectrum(const Spectrum& s);
std::string write_model(const Model& m);
Spectrum parse_spectrum(std::string_view text);
Model parse_model(std::string_view text);

std::string render_invariant(const InvariantInstance& inv, const ProgramPoint& ppt);

}  // namespace carrot
