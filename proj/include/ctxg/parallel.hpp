#ifndef CTXG_PARALLEL_HPP
#define CTXG_PARALLEL_HPP

#include <cstddef>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ctxg::par {

inline int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

// threads <= 0 means "use the OpenMP default".
inline int resolve_threads(int threads) {
  return threads > 0 ? threads : max_threads();
}

// Runs fn(i) for i in [0, n). Iterations must be independent; callers that
// need determinism reduce the per-index results in index order afterwards.
template <class Fn>
void for_each_index(std::size_t n, int threads, Fn&& fn) {
#ifdef _OPENMP
  const int t = resolve_threads(threads);
  if (t > 1 && n > 1) {
    const long long count = static_cast<long long>(n);
#pragma omp parallel for schedule(static) num_threads(t)
    for (long long i = 0; i < count; ++i) {
      fn(static_cast<std::size_t>(i));
    }
    return;
  }
#else
  (void)threads;
#endif
  for (std::size_t i = 0; i < n; ++i) fn(i);
}

}  // namespace ctxg::par

#endif  // CTXG_PARALLEL_HPP
