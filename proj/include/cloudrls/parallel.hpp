#pragma once

#include <exception>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace cloudrls {

/// Execution policy for the data-parallel per-agent kernels. Serial is the
/// reference path; Parallel runs the same per-agent body under OpenMP.
/// Results are identical for both policies and for any thread count: each
/// agent writes only its own slots and all cross-agent reductions are done
/// serially in fixed agent order.
enum class ExecPolicy { Serial, Parallel };

/// Runs `body(n)` for n = 0..count-1. Exceptions thrown by the body are
/// captured and rethrown after the loop so they never cross an OpenMP region.
template <class Body>
void for_each_agent(int count, ExecPolicy policy, Body&& body) {
  if (policy == ExecPolicy::Serial) {
    for (int n = 0; n < count; ++n) body(n);
    return;
  }
  std::exception_ptr error = nullptr;
#pragma omp parallel for schedule(static)
  for (int n = 0; n < count; ++n) {
    try {
      body(n);
    } catch (...) {
#pragma omp critical(cloudrls_for_each_agent_error)
      {
        if (!error) error = std::current_exception();
      }
    }
  }
  if (error) std::rethrow_exception(error);
}

inline int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace cloudrls
