#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <thread>
#include <type_traits>
#include <vector>

#include "cuecrit/critical.hpp"
#include "cuecrit/haar.hpp"

namespace cuecrit {

// Called with (completed, total) after each sample finishes.
using ProgressFn = std::function<void(std::size_t, std::size_t)>;

int default_thread_count();

// Evaluates fn(index, derive_seed(master_seed, index)) for every sample index
// on `threads` workers. Results come back in index order, so any reduction
// over them is independent of scheduling. The first exception thrown by a
// worker is rethrown after all workers stop.
template <class Fn>
auto map_ensemble(const EnsembleConfig& config, int threads, Fn&& fn, const ProgressFn& progress = {})
    -> std::vector<std::invoke_result_t<Fn&, std::size_t, std::uint64_t>> {
  using Result = std::invoke_result_t<Fn&, std::size_t, std::uint64_t>;
  config.validate();
  const auto total = static_cast<std::size_t>(config.num_samples);
  std::vector<std::optional<Result>> slots(total);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex mutex;
  std::size_t completed = 0;

  auto worker = [&] {
    for (;;) {
      if (failed.load()) return;
      const std::size_t i = next.fetch_add(1);
      if (i >= total) return;
      try {
        slots[i].emplace(fn(i, derive_seed(config.master_seed, i)));
      } catch (...) {
        std::lock_guard lock(mutex);
        if (!error) error = std::current_exception();
        failed.store(true);
        return;
      }
      if (progress) {
        std::lock_guard lock(mutex);
        progress(++completed, total);
      }
    }
  };

  const int workers = std::max(1, std::min<int>(threads, static_cast<int>(total)));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);

  std::vector<Result> out;
  out.reserve(total);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

struct MatrixSample {
  EigenPhaseSpectrum spectrum;
  CriticalPointSet critical;
};

// Eigenphases and critical points for every matrix of the ensemble.
std::vector<MatrixSample> sample_critical_ensemble(const EnsembleConfig& config, int threads,
                                                   const ProgressFn& progress = {});

std::vector<EigenPhaseSpectrum> sample_spectrum_ensemble(const EnsembleConfig& config, int threads,
                                                         const ProgressFn& progress = {});

}  // namespace cuecrit
