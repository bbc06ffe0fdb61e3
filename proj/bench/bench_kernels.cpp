// Compares the serial reference kernels against the OpenMP ones on the
// enumeration-heavy workloads: batch sequent checking and model-extension
// enumeration. Both paths must produce identical results; the table reports
// wall times and the speedup.

#include <chrono>
#include <cstdio>
#include <vector>

#include "geoth/library.hpp"
#include "geoth/model.hpp"
#include "geoth/parallel.hpp"

using namespace geoth;
using clk = std::chrono::steady_clock;

namespace {

double ms_since(clk::time_point t0) {
  return std::chrono::duration<double, std::milli>(clk::now() - t0).count();
}

template <typename F>
double timed(F&& f, int reps = 3) {
  double best = 1e18;
  for (int i = 0; i < reps; i++) {
    auto t0 = clk::now();
    f();
    best = std::min(best, ms_since(t0));
  }
  return best;
}

}  // namespace

int main() {
  std::printf("%-34s %10s %10s %8s\n", "kernel", "serial/ms", "openmp/ms", "speedup");

  {
    // batch theory checking over a sweep of ring models
    Theory fin = apply_extension(ring_theory(), builtin_loc(LocVariant::Finite));
    Theory sch = apply_extension(ring_theory(), builtin_loc(LocVariant::Schematic));
    std::vector<PresheafModel> models;
    for (uint64_t m = 2; m <= 40; m++) models.push_back(zmod_ring_model(m));
    size_t holds_serial = 0, holds_omp = 0;
    auto work = [&](const PresheafModel& M) {
      char c = 0;
      if (check_theory(M, fin, par::Mode::Serial).holds) c++;
      // the schematic check enumerates element subsets; keep it to desk scale
      if (M.max_sort_size() <= 12 && check_theory(M, sch, par::Mode::Serial).holds) c++;
      return c;
    };
    double ts = timed([&] {
      holds_serial = 0;
      for (const auto& M : models) holds_serial += work(M);
    });
    double tp = timed([&] {
      holds_omp = 0;
      std::vector<char> r =
          par::map_index<char>(models.size(), [&](size_t i) { return work(models[i]); },
                               par::Mode::OpenMP);
      for (char c : r) holds_omp += c;
    });
    if (holds_serial != holds_omp) {
      std::fprintf(stderr, "kernel disagreement in theory checking\n");
      return 1;
    }
    std::printf("%-34s %10.2f %10.2f %7.2fx\n", "locality sweep (Z/2..Z/40)", ts, tp, ts / tp);
  }

  {
    // extension enumeration with axiom filtering: 2^12 relation candidates
    Theory r = ring_theory();
    RelDef def;
    def.ctx = {{"x", "A"}};
    def.phi = inv_formula(Term::mkvar("x"), RingOps::on("A"), {"x"});
    TheoryExtension e = extension_by_definitions(r, {{"invr", def}}, {});
    PresheafModel M = zmod_ring_model(12);
    size_t ns = 0, np = 0;
    double ts = timed([&] { ns = enumerate_extensions(M, e, 12, par::Mode::Serial).size(); }, 1);
    double tp = timed([&] { np = enumerate_extensions(M, e, 12, par::Mode::OpenMP).size(); }, 1);
    if (ns != np) {
      std::fprintf(stderr, "kernel disagreement in extension enumeration\n");
      return 1;
    }
    std::printf("%-34s %10.2f %10.2f %7.2fx\n", "extension enumeration (Z/12)", ts, tp, ts / tp);
  }
  return 0;
}
