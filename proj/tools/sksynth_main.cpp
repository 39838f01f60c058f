#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "sksynth/aiger_io.hpp"
#include "sksynth/bench.hpp"
#include "sksynth/errors.hpp"
#include "sksynth/verify.hpp"

namespace fs = std::filesystem;
using namespace sksynth;

namespace {

// exit codes: 0 success, 1 usage, 2 parse, 3 budget, 4 verification failed
constexpr int kExitOk = 0, kExitUsage = 1, kExitParse = 2, kExitBudget = 3, kExitVerify = 4;

struct CommonFlags {
  std::string engine = "cegar";
  std::string generalize = "element";
  std::string order = "occurrence";
  std::string verify = "none";
  std::string solver;
  std::uint64_t budget_iterations = 1'000'000;
  double budget_seconds = 60.0;
  // ~2 GB of node table + unique table at ~20 bytes per node
  std::size_t budget_nodes = 100'000'000;

  void attach(CLI::App* cmd) {
    cmd->add_option("--engine", engine, "Synthesis engine")
        ->check(CLI::IsMember({"mono", "cegar"}));
    cmd->add_option("--generalize", generalize, "Counterexample generalization strategy")
        ->check(CLI::IsMember({"cube", "whole", "element"}));
    cmd->add_option("--order", order, "Variable order")
        ->check(CLI::IsMember({"given", "occurrence"}));
    cmd->add_option("--verify", verify, "Check the result before reporting success")
        ->check(CLI::IsMember({"none", "sat", "exhaustive"}));
    cmd->add_option("--solver", solver, "External SAT solver command (DIMACS in, s/v lines out)");
    cmd->add_option("--budget-iterations", budget_iterations, "Refinement iteration budget");
    cmd->add_option("--budget-seconds", budget_seconds, "Wall-clock budget per run (0 = none)");
    cmd->add_option("--budget-nodes", budget_nodes, "AIG node budget per run (0 = none)");
  }

  EngineOptions engine_options() const {
    EngineOptions opts;
    opts.max_refinements = budget_iterations;
    opts.time_limit_s = budget_seconds;
    opts.node_limit = budget_nodes;
    if (generalize == "cube")
      opts.generalize = GeneralizeStrategy::cube;
    else if (generalize == "whole")
      opts.generalize = GeneralizeStrategy::whole;
    else
      opts.generalize = GeneralizeStrategy::element;
    return opts;
  }
};

int fail(const char* reason, const std::string& detail, int code) {
  std::cerr << "error: " << detail << "\n";
  std::cerr << "reason=" << reason << "\n";
  return code;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

FactoredSpec load_spec(const fs::path& path, const std::string& order) {
  const std::string ext = path.extension().string();
  if (ext != ".qdimacs" && ext != ".fctr")
    throw UsageError("unknown input extension `" + ext + "` (expected .qdimacs or .fctr)");
  std::string text;
  try {
    text = read_file(path);
  } catch (const UsageError& e) {
    throw ParseError(e.what(), 0);  // unreadable instance counts as a parse failure
  }
  FactoredSpec spec = ext == ".qdimacs" ? parse_qdimacs(text) : parse_factored(text);
  if (order == "occurrence") spec = order_variables(std::move(spec));
  return spec;
}

int run_synth(const std::string& input, const CommonFlags& flags, const std::string& emit,
              std::string out_path) {
  FactoredSpec spec = load_spec(input, flags.order);

  SatOracle oracle;
  if (!flags.solver.empty()) oracle.set_backend_external(flags.solver);
  const EngineOptions opts = flags.engine_options();

  const SynthResult result = flags.engine == "mono" ? mono_skolem(spec, opts)
                                                    : cegar_skolem(spec, oracle, opts);

  char line[256];
  std::snprintf(line, sizeof line,
                "status=%s engine=%s n=%zu m=%zu r=%zu refinements=%llu sat_calls=%llu "
                "sat_time_frac=%.3f avg_size=%.2f max_size=%zu time_ms=%.1f",
                to_string(result.status), flags.engine.c_str(), spec.x_order.size(),
                spec.y_vars.size(), spec.factors.size(),
                static_cast<unsigned long long>(result.stats.refinements),
                static_cast<unsigned long long>(result.stats.sat_calls),
                result.stats.total_seconds > 0
                    ? result.stats.sat_seconds / result.stats.total_seconds
                    : 0.0,
                result.stats.avg_size, result.stats.max_size,
                result.stats.total_seconds * 1e3);
  std::cout << line << "\n";
  if (result.status != SynthStatus::ok)
    return fail(to_string(result.status), "synthesis stopped before completion", kExitBudget);

  if (flags.verify != "none") {
    bool pass = true;
    std::string mode = flags.verify;
    if (flags.verify == "exhaustive") {
      try {
        pass = certify_exhaustive(spec, result.vector, oracle);
      } catch (const BoundError&) {
        pass = certify_sat(spec, result.vector, oracle);
        mode = "sat (exhaustive out of bounds)";
      }
    } else {
      pass = certify_sat(spec, result.vector, oracle);
    }
    std::cout << "verify=" << (pass ? "pass" : "FAIL") << " mode=" << mode << "\n";
    if (!pass)
      return fail("verification-failed", "synthesized vector failed verification", kExitVerify);
  }

  if (out_path.empty()) out_path = input + (emit == "dot" ? ".skolem.dot" : ".skolem.aag");
  std::vector<NamedRoot> outputs;
  for (std::size_t i = 0; i < spec.x_order.size(); ++i)
    outputs.push_back({spec.mgr->var_name(spec.x_order[i]), result.vector.psi[i]});
  std::ofstream out(out_path);
  if (!out) throw UsageError("cannot write " + out_path);
  if (emit == "dot")
    out << write_dot(*spec.mgr, outputs);
  else
    out << write_aag(*spec.mgr, outputs, spec.y_vars);
  std::cout << "out=" << out_path << "\n";
  return kExitOk;
}

int run_verify(const std::string& input, const std::string& vector_path,
               const CommonFlags& flags) {
  FactoredSpec spec = load_spec(input, flags.order);

  std::unordered_map<std::string, VarId> names;
  for (VarId v : spec.y_vars) names.emplace(spec.mgr->var_name(v), v);
  for (VarId v : spec.x_order) names.emplace(spec.mgr->var_name(v), v);
  const auto outputs = read_aag(*spec.mgr, read_file(vector_path), names);

  SkolemVector vec;
  vec.psi.reserve(spec.x_order.size());
  for (VarId x : spec.x_order) {
    const std::string want = spec.mgr->var_name(x);
    const NamedRoot* found = nullptr;
    for (const auto& out : outputs)
      if (out.name == want) found = &out;
    if (!found) throw UsageError("vector file has no output named `" + want + "`");
    vec.psi.push_back(found->root);
  }
  // Y-only when no existential variable appears in any component
  vec.phase = SkolemPhase::y_only;
  for (NodeRef r : vec.psi)
    for (VarId v : spec.mgr->support(r))
      if (spec.is_existential(v)) vec.phase = SkolemPhase::chained;

  SatOracle oracle;
  if (!flags.solver.empty()) oracle.set_backend_external(flags.solver);

  const bool sat_ok = certify_sat(spec, vec, oracle);
  std::cout << "certify_sat=" << (sat_ok ? "pass" : "FAIL") << "\n";
  bool exhaustive_ok = true;
  if (vec.phase == SkolemPhase::y_only) {
    try {
      exhaustive_ok = certify_exhaustive(spec, vec, oracle);
      std::cout << "certify_exhaustive=" << (exhaustive_ok ? "pass" : "FAIL") << "\n";
    } catch (const BoundError&) {
      std::cout << "certify_exhaustive=skipped (out of bounds)\n";
    }
  }
  const bool pass = sat_ok && exhaustive_ok;
  std::cout << (pass ? "PASS" : "FAIL") << "\n";
  return pass ? kExitOk : fail("verification-failed", "vector is not a Skolem vector", kExitVerify);
}

int run_bench(const std::string& dir, std::size_t random_count, std::uint64_t seed,
              const CommonFlags& flags, int jobs, const std::string& csv_path,
              const std::string& scatter_path) {
  std::vector<BenchInput> inputs;
  if (random_count > 0)
    inputs = random_instances(random_count, seed);
  else if (!dir.empty())
    inputs = collect_instances(dir);
  else
    throw UsageError("bench needs an instance directory or --random N");

  BenchOptions opts;
  opts.engine = flags.engine_options();
  opts.solver_command = flags.solver;
  opts.jobs = jobs;
  opts.order_occurrence = flags.order == "occurrence";
  if (flags.verify == "sat")
    opts.verify = VerifyMode::sat;
  else if (flags.verify == "exhaustive")
    opts.verify = VerifyMode::exhaustive;

  const auto rows = run_bench(inputs, opts);
  if (csv_path.empty()) {
    write_csv(std::cout, rows);
  } else {
    std::ofstream out(csv_path);
    if (!out) throw UsageError("cannot write " + csv_path);
    write_csv(out, rows);
    std::cout << "csv=" << csv_path << " rows=" << rows.size() << "\n";
  }
  if (!scatter_path.empty()) {
    std::ofstream out(scatter_path);
    if (!out) throw UsageError("cannot write " + scatter_path);
    write_scatter_csv(out, rows);
    std::cout << "scatter=" << scatter_path << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Skolem function synthesis for factored formulas"};
  app.require_subcommand(1);

  CommonFlags flags;

  auto* synth = app.add_subcommand("synth", "Synthesize a Skolem vector and export it");
  std::string synth_input, emit = "aiger", out_path;
  synth->add_option("input", synth_input, "Instance file (.qdimacs or .fctr)")->required();
  synth->add_option("--emit", emit, "Output format")->check(CLI::IsMember({"aiger", "dot"}));
  synth->add_option("--out", out_path, "Output path (default: <input>.skolem.<ext>)");
  flags.attach(synth);

  auto* verify = app.add_subcommand("verify", "Check an exported vector against its instance");
  std::string verify_input, vector_path;
  verify->add_option("input", verify_input, "Instance file")->required();
  verify->add_option("vector", vector_path, "Skolem vector in ASCII AIGER")->required();
  flags.attach(verify);

  auto* bench = app.add_subcommand("bench", "Run both engines over a set of instances");
  std::string bench_dir, csv_path, scatter_path;
  std::size_t random_count = 0;
  std::uint64_t seed = 1;
  int jobs = 1;
  bench->add_option("dir", bench_dir, "Directory of .qdimacs/.fctr instances");
  bench->add_option("--random", random_count, "Generate this many random instances instead");
  bench->add_option("--seed", seed, "Seed for --random");
  bench->add_option("--jobs", jobs, "Parallel instance workers");
  bench->add_option("--csv", csv_path, "CSV output path (default: stdout)");
  bench->add_option("--scatter", scatter_path, "Per-instance engine-pair CSV for plotting");
  flags.attach(bench);

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed()) return run_synth(synth_input, flags, emit, out_path);
    if (verify->parsed()) return run_verify(verify_input, vector_path, flags);
    return run_bench(bench_dir, random_count, seed, flags, jobs, csv_path, scatter_path);
  } catch (const ParseError& e) {
    return fail("parse-error", e.what(), kExitParse);
  } catch (const UsageError& e) {
    return fail("usage-error", e.what(), kExitUsage);
  } catch (const OracleError& e) {
    return fail("oracle-error", e.what(), kExitUsage);
  } catch (const BoundError& e) {
    return fail("bound-exceeded", e.what(), kExitUsage);
  } catch (const std::exception& e) {
    return fail("internal-error", e.what(), kExitUsage);
  }
}
