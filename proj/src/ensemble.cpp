#include "cuecrit/ensemble.hpp"

namespace cuecrit {

int default_thread_count() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

std::vector<MatrixSample> sample_critical_ensemble(const EnsembleConfig& config, int threads,
                                                   const ProgressFn& progress) {
  return map_ensemble(
      config, threads,
      [n = config.n](std::size_t, std::uint64_t seed) {
        EigenPhaseSpectrum spectrum = sample_eigenphases(n, seed);
        CriticalPointSet critical = critical_points(spectrum);
        return MatrixSample{std::move(spectrum), std::move(critical)};
      },
      progress);
}

std::vector<EigenPhaseSpectrum> sample_spectrum_ensemble(const EnsembleConfig& config, int threads,
                                                         const ProgressFn& progress) {
  return map_ensemble(
      config, threads,
      [n = config.n](std::size_t, std::uint64_t seed) { return sample_eigenphases(n, seed); },
      progress);
}

}  // namespace cuecrit
