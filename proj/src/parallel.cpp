#include "chainlab/parallel.hpp"

#include <cstdlib>
#include <exception>
#include <string>

#include <omp.h>

namespace chainlab {

namespace {
int g_default_workers = 0;
}

void set_worker_cap(int workers) {
  if (g_default_workers == 0) g_default_workers = omp_get_max_threads();
  omp_set_num_threads(workers > 0 ? workers : g_default_workers);
}

void apply_worker_cap_from_env() {
  if (const char* env = std::getenv("CHAINLAB_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) set_worker_cap(n);
    } catch (const std::exception&) {
      // ignored: an unparsable cap leaves the default in place
    }
  }
}

int worker_count() { return omp_get_max_threads(); }

void for_each_index(std::size_t n, Execution exec, const std::function<void(std::size_t)>& body) {
  const auto count = static_cast<long long>(n);
  if (exec == Execution::kSerial) {
    for (long long i = 0; i < count; ++i) body(static_cast<std::size_t>(i));
    return;
  }
  // exceptions may not cross the parallel region; the lowest failing index wins
  std::exception_ptr error;
  long long error_index = count;
#pragma omp parallel for schedule(dynamic)
  for (long long i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(chainlab_for_each_error)
      if (i < error_index) {
        error_index = i;
        error = std::current_exception();
      }
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace chainlab
