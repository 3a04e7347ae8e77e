#include "carrot/corpus.hpp"

#include <cstddef>
#include <stdexcept>
#include <utility>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace carrot {

std::string_view to_string(ExecMode mode) {
  return mode == ExecMode::Serial ? "serial" : "parallel";
}

std::vector<Spectrum> compute_spectra(std::span<const Trace> traces,
                                      const AnalysisConfig& cfg, ExecMode mode) {
  cfg.validate();
  std::vector<Spectrum> out(traces.size());
  if (mode == ExecMode::Parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < std::ptrdiff_t(traces.size()); ++i)
      out[std::size_t(i)] = compute_spectrum(traces[std::size_t(i)], cfg);
    return out;
#endif
  }
  for (std::size_t i = 0; i < traces.size(); ++i)
    out[i] = compute_spectrum(traces[i], cfg);
  return out;
}

namespace {

// Pairwise reduction rounds. Merging is associative and commutative
// (set intersection/union plus counter sums), so any tree shape yields
// the sequential fold's result; a fixed shape keeps runs reproducible.
Model reduce_models(std::vector<Model> models, ExecMode mode) {
  while (models.size() > 1) {
    const std::size_t pairs = models.size() / 2;
    std::vector<Model> next(pairs + models.size() % 2);
    if (mode == ExecMode::Parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
      for (std::ptrdiff_t i = 0; i < std::ptrdiff_t(pairs); ++i)
        next[std::size_t(i)] =
            merge_models(std::move(models[2 * std::size_t(i)]),
                         models[2 * std::size_t(i) + 1]);
#else
      for (std::size_t i = 0; i < pairs; ++i)
        next[i] = merge_models(std::move(models[2 * i]), models[2 * i + 1]);
#endif
    } else {
      for (std::size_t i = 0; i < pairs; ++i)
        next[i] = merge_models(std::move(models[2 * i]), models[2 * i + 1]);
    }
    if (models.size() % 2) next.back() = std::move(models.back());
    models = std::move(next);
  }
  return std::move(models.front());
}

}  // namespace

Model model_of_traces(std::span<const Trace> traces, const AnalysisConfig& cfg,
                      ExecMode mode) {
  if (traces.empty())
    throw std::invalid_argument("model_of_traces needs at least one trace");
  std::vector<Spectrum> spectra = compute_spectra(traces, cfg, mode);
  std::vector<Model> models;
  models.reserve(spectra.size());
  for (const Spectrum& s : spectra) models.push_back(model_of_spectrum(s));
  return reduce_models(std::move(models), mode);
}

}  // namespace carrot
