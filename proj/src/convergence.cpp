#include "carrot/convergence.hpp"

#include <stdexcept>

namespace carrot {

namespace {

struct Sizes {
  uint64_t bound = 0;  // candidates at observed points
  uint64_t live = 0;
  uint64_t vset = 0;
  uint64_t pset = 0;
};

Sizes measure(const Model& m) {
  Sizes s;
  for (std::size_t i = 0; i < m.table.points.size(); ++i) {
    const PointSummary& ps = m.by_point[i];
    if (!ps.observed()) continue;
    s.bound += instantiation_count(m.table.points[i].arity(), m.config.schemas);
    s.live += ps.live.size();
    for (const ValueSet& vs : ps.vsets) s.vset += vs.values.size();
    for (const PairValueSet& pvs : ps.psets) s.pset += pvs.pairs.size();
  }
  return s;
}

}  // namespace

ConvergenceCurve convergence_curve(std::span<const Spectrum> spectra) {
  if (spectra.empty())
    throw std::invalid_argument("convergence_curve needs at least one spectrum");
  ConvergenceCurve curve;
  curve.records.reserve(spectra.size());
  Model m = model_of_spectrum(spectra[0]);
  Sizes prev;  // zero: before any run, nothing is bound or recorded
  for (std::size_t k = 0; k < spectra.size(); ++k) {
    if (k > 0) m = absorb(std::move(m), spectra[k]);
    const Sizes now = measure(m);
    const uint64_t deaths = now.bound - now.live;
    const uint64_t deaths_before = prev.bound - prev.live;
    curve.records.push_back({uint64_t(k + 1), now.live, deaths - deaths_before,
                             now.vset - prev.vset, now.pset - prev.pset});
    prev = now;
  }
  return curve;
}

std::optional<std::size_t> steady_state(const ConvergenceCurve& curve,
                                        std::size_t window) {
  if (window < 1) throw std::invalid_argument("steady-state window must be >= 1");
  const std::size_t n = curve.records.size();
  for (std::size_t i = 0; i + window <= n; ++i) {
    bool quiet = true;
    for (std::size_t j = i; j < i + window; ++j)
      if (curve.records[j].falsified != 0) {
        quiet = false;
        break;
      }
    if (quiet) return i;
  }
  return std::nullopt;
}

std::string curve_to_csv(const ConvergenceCurve& curve) {
  std::string out = "run,live,falsified,vset_ins,pset_ins\n";
  for (const ConvergenceRecord& r : curve.records) {
    out += std::to_string(r.run) + "," + std::to_string(r.live) + "," +
           std::to_string(r.falsified) + "," + std::to_string(r.vset_ins) + "," +
           std::to_string(r.pset_ins) + "\n";
  }
  return out;
}

}  // namespace carrot
