#include "geoth/parallel.hpp"

#include <atomic>

namespace geoth::par {

namespace {
std::atomic<Mode> g_mode{
#ifdef _OPENMP
    Mode::OpenMP
#else
    Mode::Serial
#endif
};
}  // namespace

Mode default_mode() { return g_mode.load(); }

void set_default_mode(Mode m) { g_mode.store(m); }

void for_each_index(std::size_t n, const std::function<void(std::size_t)>& body, Mode mode) {
#ifdef _OPENMP
  if (mode == Mode::OpenMP && n > 1) {
    #pragma omp parallel for schedule(dynamic)
    for (long long i = 0; i < static_cast<long long>(n); i++) body(static_cast<std::size_t>(i));
    return;
  }
#else
  (void)mode;
#endif
  for (std::size_t i = 0; i < n; i++) body(i);
}

}  // namespace geoth::par
