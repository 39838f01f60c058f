#include "sksynth/bench.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "sksynth/errors.hpp"
#include "sksynth/verify.hpp"

namespace sksynth {

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

BenchRow run_one(const BenchInput& input, const std::string& engine_name,
                 const BenchOptions& opts) {
  BenchRow row;
  row.instance = input.name;
  row.engine = engine_name;
  try {
    FactoredSpec spec = input.format == BenchInput::Format::qdimacs
                            ? parse_qdimacs(input.text)
                            : parse_factored(input.text);
    if (opts.order_occurrence) spec = order_variables(std::move(spec));
    row.n = spec.x_order.size();
    row.m = spec.y_vars.size();
    row.r = spec.factors.size();

    SatOracle oracle;
    if (!opts.solver_command.empty()) oracle.set_backend_external(opts.solver_command);

    SynthResult result = engine_name == "mono" ? mono_skolem(spec, opts.engine)
                                               : cegar_skolem(spec, oracle, opts.engine);
    row.status = to_string(result.status);
    row.refinements = result.stats.refinements;
    row.sat_calls = result.stats.sat_calls;
    row.total_ms = result.stats.total_seconds * 1e3;
    row.sat_time_frac = result.stats.total_seconds > 0
                            ? result.stats.sat_seconds / result.stats.total_seconds
                            : 0.0;
    row.avg_size = result.stats.avg_size;
    row.max_size = result.stats.max_size;

    if (result.status == SynthStatus::ok && opts.verify != VerifyMode::none) {
      bool pass = true;
      if (opts.verify == VerifyMode::exhaustive) {
        try {
          pass = certify_exhaustive(spec, result.vector, oracle);
        } catch (const BoundError&) {
          pass = certify_sat(spec, result.vector, oracle);  // out of sweep range
        }
      } else {
        pass = certify_sat(spec, result.vector, oracle);
      }
      if (!pass) row.status = "verify-failed";
    }
  } catch (const ParseError&) {
    row.status = "parse-error";
  } catch (const OracleError&) {
    row.status = "oracle-error";
  } catch (const std::exception&) {
    row.status = "error";
  }
  return row;
}

}  // namespace

std::vector<BenchInput> collect_instances(const std::filesystem::path& dir) {
  std::vector<BenchInput> inputs;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const auto ext = entry.path().extension().string();
    if (ext != ".qdimacs" && ext != ".fctr") continue;
    inputs.push_back(BenchInput{entry.path().stem().string(), read_file(entry.path()),
                                ext == ".qdimacs" ? BenchInput::Format::qdimacs
                                                  : BenchInput::Format::fctr});
  }
  std::sort(inputs.begin(), inputs.end(),
            [](const BenchInput& a, const BenchInput& b) { return a.name < b.name; });
  return inputs;
}

std::vector<BenchInput> random_instances(std::size_t count, std::uint64_t seed,
                                         const RandomSpecParams& params) {
  std::vector<BenchInput> inputs;
  inputs.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::ostringstream name;
    name << "random-" << seed << "-";
    name.width(4);
    name.fill('0');
    name << i;
    inputs.push_back(
        BenchInput{name.str(), random_factored_text(seed + i, params), BenchInput::Format::fctr});
  }
  return inputs;
}

std::vector<BenchRow> run_bench(const std::vector<BenchInput>& inputs, const BenchOptions& opts) {
  static const char* kEngines[2] = {"mono", "cegar"};
  std::vector<BenchRow> rows(2 * inputs.size());

#pragma omp parallel for schedule(dynamic) num_threads(opts.jobs > 0 ? opts.jobs : 1) \
    if (opts.jobs > 1)
  for (std::int64_t t = 0; t < static_cast<std::int64_t>(rows.size()); ++t) {
    const auto idx = static_cast<std::size_t>(t);
    rows[idx] = run_one(inputs[idx / 2], kEngines[idx % 2], opts);
  }

  std::sort(rows.begin(), rows.end(), [](const BenchRow& a, const BenchRow& b) {
    return a.instance != b.instance ? a.instance < b.instance : a.engine < b.engine;
  });
  return rows;
}

void write_csv(std::ostream& out, const std::vector<BenchRow>& rows) {
  out << "# schema: " << kBenchCsvSchema << '\n';
  out << "instance,engine,status,n,m,r,refinements,sat_calls,sat_time_frac,avg_size,max_size,"
         "total_ms\n";
  for (const auto& r : rows) {
    out << r.instance << ',' << r.engine << ',' << r.status << ',' << r.n << ',' << r.m << ','
        << r.r << ',' << r.refinements << ',' << r.sat_calls << ',';
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f", r.sat_time_frac);
    out << buf << ',';
    std::snprintf(buf, sizeof buf, "%.2f", r.avg_size);
    out << buf << ',' << r.max_size << ',';
    std::snprintf(buf, sizeof buf, "%.1f", r.total_ms);
    out << buf << '\n';
  }
}

void write_scatter_csv(std::ostream& out, const std::vector<BenchRow>& rows) {
  struct Pair {
    const BenchRow* mono = nullptr;
    const BenchRow* cegar = nullptr;
  };
  std::map<std::string, Pair> pairs;
  for (const auto& r : rows) {
    if (r.engine == "mono")
      pairs[r.instance].mono = &r;
    else
      pairs[r.instance].cegar = &r;
  }
  out << "# schema: " << kBenchCsvSchema << "-scatter\n";
  out << "instance,mono_status,cegar_status,mono_avg_size,cegar_avg_size,mono_total_ms,"
         "cegar_total_ms\n";
  for (const auto& [name, p] : pairs) {
    if (!p.mono || !p.cegar) continue;
    char a[64], b[64], c[64], d[64];
    std::snprintf(a, sizeof a, "%.2f", p.mono->avg_size);
    std::snprintf(b, sizeof b, "%.2f", p.cegar->avg_size);
    std::snprintf(c, sizeof c, "%.1f", p.mono->total_ms);
    std::snprintf(d, sizeof d, "%.1f", p.cegar->total_ms);
    out << name << ',' << p.mono->status << ',' << p.cegar->status << ',' << a << ',' << b << ','
        << c << ',' << d << '\n';
  }
}

}  // namespace sksynth
