#pragma once

#include "carrot/spectrum.hpp"

namespace carrot {

/// Corpus kernels run per-trace work across OpenMP threads in Parallel
/// mode. Results are bit-identical to Serial: runs are independent, and
/// model merging is reduced pairwise in a fixed tree order.
enum class ExecMode : uint8_t { Serial, Parallel };

std::string_view to_string(ExecMode mode);

std::vector<Spectrum> compute_spectra(std::span<const Trace> traces,
                                      const AnalysisConfig& cfg,
                                      ExecMode mode = ExecMode::Parallel);

/// Spectra first, then a tree reduction of merges. Agrees with
/// stream_model over the same traces. Throws on an empty corpus.
Model model_of_traces(std::span<const Trace> traces, const AnalysisConfig& cfg,
                      ExecMode mode = ExecMode::Parallel);

}  // namespace carrot
