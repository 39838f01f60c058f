#include <chrono>
#include <cstdio>
#include <random>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "CLI11.hpp"
#include "sksynth/random_spec.hpp"
#include "sksynth/truth_table.hpp"
#include "sksynth/verify.hpp"

using namespace sksynth;
using Clock = std::chrono::steady_clock;

namespace {

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

// random AIG over `nvars` variables, roughly `gates` AND nodes
NodeRef random_cone(AigManager& m, std::mt19937_64& rng, int nvars, int gates) {
  std::vector<NodeRef> pool;
  for (VarId v = 1; v <= static_cast<VarId>(nvars); ++v) pool.push_back(m.mk_var(v));
  NodeRef last = pool[0];
  for (int g = 0; g < gates; ++g) {
    NodeRef a = pool[rng() % pool.size()];
    NodeRef b = pool[rng() % pool.size()];
    if (rng() % 2) a = m.mk_not(a);
    if (rng() % 2) b = m.mk_not(b);
    last = m.mk_and(a, b);
    pool.push_back(last);
  }
  return last;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Compare the OpenMP evaluation kernels against their serial references"};
  int nvars = 18;
  int gates = 600;
  int reps = 3;
  std::uint64_t seed = 7;
  app.add_option("--vars", nvars, "Variables in the truth-table sweep")->check(CLI::Range(6, 24));
  app.add_option("--gates", gates, "AND gates in the random cone");
  app.add_option("--reps", reps, "Repetitions per kernel");
  app.add_option("--seed", seed, "Generator seed");
  CLI11_PARSE(app, argc, argv);

#ifdef _OPENMP
  std::printf("threads: %d\n", omp_get_max_threads());
#else
  std::printf("threads: 1 (compiled without OpenMP)\n");
#endif
  std::printf("%-28s %12s %12s %12s %8s\n", "kernel", "rows", "serial ms", "parallel ms",
              "speedup");

  std::mt19937_64 rng(seed);

  {
    AigManager m;
    const NodeRef f = random_cone(m, rng, nvars, gates);
    std::vector<VarId> vars;
    for (VarId v = 1; v <= static_cast<VarId>(nvars); ++v) vars.push_back(v);

    double serial_ms = 1e300, parallel_ms = 1e300;
    TruthTable a, b;
    for (int rep = 0; rep < reps; ++rep) {
      auto t0 = Clock::now();
      a = truth_table_serial(m, f, vars);
      serial_ms = std::min(serial_ms, ms_since(t0));
      t0 = Clock::now();
      b = truth_table(m, f, vars);
      parallel_ms = std::min(parallel_ms, ms_since(t0));
    }
    std::printf("%-28s %12zu %12.1f %12.1f %7.1fx%s\n", "truth_table", a.rows(), serial_ms,
                parallel_ms, serial_ms / parallel_ms, a == b ? "" : "  MISMATCH");
  }

  {
    // exhaustive certification sweep on a synthesized vector
    const RandomSpecParams params{.max_x = 6, .max_y = 6, .max_factors = 10, .max_width = 4};
    FactoredSpec spec = order_variables(parse_factored(random_factored_text(seed, params)));
    // widen Y so the sweep has real volume
    std::ostringstream extra;
    extra << random_factored_text(seed, params);
    for (int j = 7; j <= 16; ++j) extra << "var yy" << j << " : y;\n";
    extra << "(y1 | yy7);\n";
    spec = order_variables(parse_factored(extra.str()));

    SatOracle oracle;
    const SynthResult r = cegar_skolem(spec, oracle, {});
    if (r.status != SynthStatus::ok) {
      std::printf("certify_exhaustive: generator produced an unusable instance\n");
      return 1;
    }
    double serial_ms = 1e300, parallel_ms = 1e300;
    bool va = false, vb = false;
    for (int rep = 0; rep < reps; ++rep) {
      auto t0 = Clock::now();
      va = certify_exhaustive_serial(spec, r.vector);
      serial_ms = std::min(serial_ms, ms_since(t0));
      t0 = Clock::now();
      vb = certify_exhaustive(spec, r.vector, oracle);
      parallel_ms = std::min(parallel_ms, ms_since(t0));
    }
    std::printf("%-28s %12zu %12.1f %12.1f %7.1fx%s\n", "certify_exhaustive",
                std::size_t(1) << spec.y_vars.size(), serial_ms, parallel_ms,
                serial_ms / parallel_ms, va == vb ? "" : "  MISMATCH");
  }
  return 0;
}
