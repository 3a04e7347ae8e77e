#pragma once

#include "carrot/spectrum.hpp"

namespace carrot {

struct ConvergenceRecord {
  uint64_t run = 0;  // 1-based absorption order
  uint64_t live = 0;
  uint64_t falsified = 0;  // instance deaths attributed to this run
  uint64_t vset_ins = 0;   // value-set insertions this run
  uint64_t pset_ins = 0;

  friend bool operator==(const ConvergenceRecord&, const ConvergenceRecord&) = default;
};

struct ConvergenceCurve {
  std::vector<ConvergenceRecord> records;
};

/// Record k describes the model of the first k spectra. A run's falsified
/// count includes within-run deaths at points it observed first, so the
/// curve's falsifications always sum to (candidates bound − live).
ConvergenceCurve convergence_curve(std::span<const Spectrum> spectra);

/// Smallest index i (0-based, i runs absorbed) such that runs i+1..i+window
/// all caused zero falsifications. A full window of evidence is required:
/// i + window must not exceed the run count.
std::optional<std::size_t> steady_state(const ConvergenceCurve& curve,
                                        std::size_t window);

// Header: run,live,falsified,vset_ins,pset_ins
std::string curve_to_csv(const ConvergenceCurve& curve);

}  // namespace carrot
