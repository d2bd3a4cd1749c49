#pragma once

#include <cstddef>
#include <functional>

namespace chainlab {

/// Selects between the OpenMP kernels and their serial reference versions.
/// Both produce bit-identical results; the serial path exists for testing.
enum class Execution { kSerial, kParallel };

/// Caps the OpenMP worker count (0 restores the default). Results never
/// depend on the cap.
void set_worker_cap(int workers);

/// Applies CHAINLAB_THREADS from the environment, if set and positive.
void apply_worker_cap_from_env();

int worker_count();

/// Runs body(i) for i in [0, n), in parallel when `exec` is kParallel.
/// Bodies must write only to per-index state.
void for_each_index(std::size_t n, Execution exec, const std::function<void(std::size_t)>& body);

}  // namespace chainlab
