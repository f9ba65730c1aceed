// Command-line front end: `tabeval evaluate` and `tabeval benchmark`.

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "tabeval/framework.hpp"
#include "tabeval/report.hpp"
#include "tabeval/util.hpp"

namespace fs = std::filesystem;
using namespace tabeval;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;
constexpr int kExitMetric = 3;

const char* kExitHelp =
    "Exit codes: 0 success, 1 invalid arguments, config or data, 2 file I/O error, "
    "3 at least one metric failed (all other results are still written).";

struct CommonArgs {
  std::string real;
  std::optional<std::string> holdout;
  std::optional<std::string> target;
  std::optional<std::string> preset;
  std::optional<std::string> config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> distance;
  std::string out = ".";
  std::optional<std::string> kinds;
  bool plots = false;
  bool timestamp = false;
  std::size_t threads = 0;
};

void add_common(CLI::App& app, CommonArgs& a) {
  app.add_option("--real", a.real, "Real (training) data CSV")->required();
  app.add_option("--holdout", a.holdout, "Holdout real data CSV");
  app.add_option("--target", a.target, "Categorical target column for the model-based metrics");
  auto* preset = app.add_option("--preset", a.preset, "full_eval, fast_eval or priv_eval (default full_eval)");
  auto* config = app.add_option("--config", a.config, "JSON config file");
  preset->excludes(config);
  app.add_option("--seed", a.seed, "Master seed (falls back to the config seed, then SYNTHEVAL_SEED, then 0)");
  app.add_option("--distance", a.distance, "gower or euclidean")->check(CLI::IsMember({"gower", "euclidean"}));
  app.add_option("--out", a.out, "Output directory");
  app.add_option("--kinds", a.kinds, "JSON map of column name to \"num\" or \"cat\"");
  app.add_flag("--plots", a.plots, "Also write SVG plots");
  app.add_flag("--timestamp", a.timestamp, "Record the generation time in the report");
  app.add_option("--threads", a.threads, "Worker thread cap (0 = all cores)");
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

struct Resolved {
  EvalConfig config;
  KindMap kinds;
};

Resolved resolve(const CommonArgs& a, const MetricRegistry& registry) {
  Resolved r;
  std::optional<std::uint64_t> config_seed;
  if (a.config) {
    Json doc;
    try {
      doc = Json::parse(read_file(*a.config));
    } catch (const Json::parse_error& e) {
      throw ConfigError("malformed config '" + *a.config + "': " + e.what());
    }
    r.config = EvalConfig::from_json(doc, registry);
    if (doc.contains("seed")) config_seed = r.config.seed;
  } else {
    r.config = resolve_preset(a.preset.value_or("full_eval"), registry);
  }
  if (a.seed) {
    r.config.seed = *a.seed;
  } else if (config_seed) {
    r.config.seed = *config_seed;
  } else if (const char* env = std::getenv("SYNTHEVAL_SEED"); env && *env) {
    try {
      std::size_t used = 0;
      const auto v = std::stoull(env, &used);
      if (used != std::string(env).size()) throw std::invalid_argument(env);
      r.config.seed = v;
    } catch (const std::exception&) {
      throw ConfigError(std::string("SYNTHEVAL_SEED is not a non-negative integer: '") + env + "'");
    }
  }
  if (a.distance) r.config.distance = parse_distance_kind(*a.distance);
  if (a.kinds) r.kinds = load_kind_map(*a.kinds);
  return r;
}

/// Config with every option spelled out, so it reproduces the run on its own.
Json used_config(const EvalConfig& config, const MetricRegistry& registry) {
  EvalConfig full = config;
  for (auto& m : full.metrics) m.options = merged_options(registry.at(m.key), m.options);
  return full.to_json();
}

std::string now_utc() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

bool any_failed(const std::vector<MetricResult>& results) {
  for (const auto& r : results) {
    if (r.failure) return true;
  }
  return false;
}

void write_plots(const fs::path& out, const std::vector<MetricResult>& results, bool svg) {
  Json payloads = Json::object();
  for (const auto& r : results) {
    if (r.ok() && !r.plots.empty()) payloads[r.key] = r.plots;
  }
  write_file(out / "plots.json", payloads.dump(2) + "\n");
  if (!svg) return;
  fs::create_directories(out / "plots");
  for (const auto& [name, text] : render_svg_plots(results)) write_file(out / "plots" / name, text);
}

int run_evaluate(const CommonArgs& a, const std::string& synthetic) {
  const auto registry = MetricRegistry::builtin();
  const auto [config, kinds] = resolve(a, registry);
  const Table real = load_csv(a.real, kinds);
  const Table syn = load_csv(synthetic, kinds);
  std::optional<Table> holdout;
  if (a.holdout) holdout = load_csv(*a.holdout, kinds);
  const auto ctx = validate_context(real, syn, holdout, a.target, config.seed, config.distance);

  ReportDocument doc;
  doc.command = "evaluate";
  doc.inputs.push_back({"real", a.real, sha256_file(a.real)});
  doc.inputs.push_back({"synthetic", synthetic, sha256_file(synthetic)});
  if (a.holdout) doc.inputs.push_back({"holdout", *a.holdout, sha256_file(*a.holdout)});
  doc.config = used_config(config, registry);
  doc.results = evaluate(ctx, config, registry);
  if (a.timestamp) doc.generated_at = now_utc();

  const fs::path out(a.out);
  fs::create_directories(out);
  const Json j = to_json(doc);
  write_file(out / "report.json", j.dump(2) + "\n");
  write_file(out / "report.txt", render_report(j));
  write_file(out / "used-config.json", doc.config.dump(2) + "\n");
  write_plots(out, doc.results, a.plots);

  for (const auto& r : doc.results) {
    if (r.failure) std::cerr << "metric '" << r.key << "' failed: " << *r.failure << "\n";
  }
  return any_failed(doc.results) ? kExitMetric : kExitOk;
}

int run_benchmark(const CommonArgs& a, const std::vector<std::string>& synthetics, const std::string& strategy_text) {
  const auto registry = MetricRegistry::builtin();
  const auto [config, kinds] = resolve(a, registry);
  const auto strategy = parse_rank_strategy(strategy_text);
  if (synthetics.size() < 2) throw DataError("benchmark needs at least two --synthetic NAME=PATH entries");
  const Table real = load_csv(a.real, kinds);
  std::optional<Table> holdout;
  if (a.holdout) holdout = load_csv(*a.holdout, kinds);

  ReportDocument doc;
  doc.command = "benchmark";
  doc.inputs.push_back({"real", a.real, sha256_file(a.real)});
  if (a.holdout) doc.inputs.push_back({"holdout", *a.holdout, sha256_file(*a.holdout)});
  std::vector<DatasetInput> inputs;
  for (const auto& spec : synthetics) {
    const auto eq = spec.find('=');
    const std::string path = eq == std::string::npos ? spec : spec.substr(eq + 1);
    const std::string name = eq == std::string::npos ? fs::path(spec).stem().string() : spec.substr(0, eq);
    inputs.push_back({name, load_csv(path, kinds)});
    doc.inputs.push_back({"synthetic:" + name, path, sha256_file(path)});
  }
  doc.config = used_config(config, registry);
  auto report = benchmark(real, inputs, holdout, a.target, config, registry, strategy);
  if (a.timestamp) doc.generated_at = now_utc();
  for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";

  const fs::path out(a.out);
  fs::create_directories(out);
  write_file(out / "benchmark_raw.csv", benchmark_raw_csv(report));
  write_file(out / "benchmark_scores.csv", benchmark_scores_csv(report));
  bool failed = false;
  for (const auto& list : report.results) failed = failed || any_failed(list);
  doc.benchmark = std::move(report);
  const Json j = to_json(doc);
  write_file(out / "report.json", j.dump(2) + "\n");
  write_file(out / "report.txt", render_report(j));
  write_file(out / "used-config.json", doc.config.dump(2) + "\n");
  return failed ? kExitMetric : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Utility and privacy evaluation of synthetic tabular data"};
  app.footer(kExitHelp);
  app.require_subcommand(1);

  CommonArgs eval_args;
  std::string eval_synthetic;
  auto* eval = app.add_subcommand("evaluate", "Evaluate one synthetic dataset against the real data");
  add_common(*eval, eval_args);
  eval->add_option("--synthetic", eval_synthetic, "Synthetic data CSV")->required();
  eval->footer(kExitHelp);

  CommonArgs bench_args;
  std::vector<std::string> bench_synthetics;
  std::string strategy = "linear";
  auto* bench = app.add_subcommand("benchmark", "Evaluate and rank several synthetic datasets");
  add_common(*bench, bench_args);
  bench->add_option("--synthetic", bench_synthetics, "Synthetic dataset as NAME=PATH (repeat)")->required();
  bench->add_option("--strategy", strategy, "linear, normal or quantile")
      ->check(CLI::IsMember({"linear", "normal", "quantile"}));
  bench->footer(kExitHelp);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (*eval) {
      set_thread_limit(eval_args.threads);
      return run_evaluate(eval_args, eval_synthetic);
    }
    set_thread_limit(bench_args.threads);
    return run_benchmark(bench_args, bench_synthetics, strategy);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitMetric;
  }
}
