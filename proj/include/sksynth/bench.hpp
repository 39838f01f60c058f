#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "sksynth/random_spec.hpp"
#include "sksynth/skolem.hpp"

namespace sksynth {

enum class VerifyMode { none, sat, exhaustive };

struct BenchOptions {
  EngineOptions engine;  // budgets and generalization strategy
  VerifyMode verify = VerifyMode::none;
  std::string solver_command;  // empty = internal backend
  int jobs = 1;                // instance-level worker pool
  bool order_occurrence = true;
};

struct BenchRow {
  std::string instance;
  std::string engine;
  std::string status;
  std::size_t n = 0, m = 0, r = 0;
  std::uint64_t refinements = 0, sat_calls = 0;
  double sat_time_frac = 0.0;
  double avg_size = 0.0;
  std::size_t max_size = 0;
  double total_ms = 0.0;
};

inline constexpr const char* kBenchCsvSchema = "sksynth-bench-v1";

struct BenchInput {
  enum class Format { qdimacs, fctr };
  std::string name;
  std::string text;
  Format format = Format::fctr;
};

// *.qdimacs and *.fctr files of a directory, sorted by name.
std::vector<BenchInput> collect_instances(const std::filesystem::path& dir);

// `count` random factored instances, named by seed offset.
std::vector<BenchInput> random_instances(std::size_t count, std::uint64_t seed,
                                         const RandomSpecParams& params = {});

// Runs both engines on every instance (one fresh manager per run). Failures
// become rows with a status; the sweep never aborts. Rows come back sorted
// by (instance, engine).
std::vector<BenchRow> run_bench(const std::vector<BenchInput>& inputs, const BenchOptions& opts);

void write_csv(std::ostream& out, const std::vector<BenchRow>& rows);

// Per-instance engine pairing (sizes and times side by side) for scatter
// plots by external tooling.
void write_scatter_csv(std::ostream& out, const std::vector<BenchRow>& rows);

}  // namespace sksynth
