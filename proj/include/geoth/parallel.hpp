#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace geoth::par {

enum class Mode { Serial, OpenMP };

// Process-wide default, settable by the CLI / benchmarks.
Mode default_mode();
void set_default_mode(Mode m);

// Index-space parallel loop. Bodies must not touch shared mutable state;
// results are written into per-index slots so ordering stays deterministic.
void for_each_index(std::size_t n, const std::function<void(std::size_t)>& body, Mode mode);

inline void for_each_index(std::size_t n, const std::function<void(std::size_t)>& body) {
  for_each_index(n, body, default_mode());
}

// Deterministic parallel map: out[i] = f(i), order preserved.
template <typename T, typename F>
std::vector<T> map_index(std::size_t n, F&& f, Mode mode) {
  std::vector<T> out(n);
  for_each_index(
      n, [&](std::size_t i) { out[i] = f(i); }, mode);
  return out;
}

template <typename T, typename F>
std::vector<T> map_index(std::size_t n, F&& f) {
  return map_index<T>(n, std::forward<F>(f), default_mode());
}

}  // namespace geoth::par
