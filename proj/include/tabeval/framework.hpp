#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tabeval/dataset.hpp"
#include "tabeval/metric_result.hpp"

namespace tabeval {

/// Raised for unknown presets, unknown metric keys or options, and malformed
/// configuration documents.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using MetricFn = std::function<MetricResult(const EvalContext&, const Json& options)>;

/// One registered metric. `defaults` is a JSON object holding every accepted
/// option with its default value; the evaluate function receives the merged
/// options.
struct MetricDescriptor {
  std::string key;
  Category category = Category::Utility;
  Json defaults = Json::object();
  MetricFn evaluate;
};

class MetricRegistry {
 public:
  MetricRegistry() = default;

  /// Registry holding the eighteen built-in metrics.
  static MetricRegistry builtin();

  /// Throws ConfigError on a duplicate key or an invalid descriptor.
  void register_plugin(MetricDescriptor descriptor);

  const MetricDescriptor* find(const std::string& key) const;
  const MetricDescriptor& at(const std::string& key) const;
  const std::vector<MetricDescriptor>& descriptors() const { return descriptors_; }
  std::vector<std::string> keys() const;

 private:
  std::vector<MetricDescriptor> descriptors_;
};

struct MetricSelection {
  std::string key;
  /// Overrides only; merged over the descriptor defaults at run time.
  Json options = Json::object();
  bool operator==(const MetricSelection&) const = default;
};

struct EvalConfig {
  std::vector<MetricSelection> metrics;
  std::uint64_t seed = 0;
  DistanceKind distance = DistanceKind::Gower;

  /// {"metrics": {...}, "seed": N, "distance": "..."}.
  Json to_json() const;
  /// Validates keys and option names against the registry. Missing "seed"
  /// and "distance" keep their defaults.
  static EvalConfig from_json(const Json& doc, const MetricRegistry& registry);
  bool operator==(const EvalConfig&) const = default;
};

inline const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {"full_eval", "fast_eval", "priv_eval"};
  return names;
}

/// A preset name or a path to a JSON config file.
EvalConfig resolve_preset(const std::string& name_or_path, const MetricRegistry& registry);

/// Defaults overlaid with the selection's overrides; throws ConfigError on
/// an unknown option or a type mismatch.
Json merged_options(const MetricDescriptor& descriptor, const Json& overrides);

/// Runs every configured metric concurrently. The config's seed and distance
/// replace the context's. Exceptions become failed results.
std::vector<MetricResult> evaluate(const EvalContext& ctx, const EvalConfig& config,
                                   const MetricRegistry& registry);

// ---- ranking ---------------------------------------------------------------

enum class RankStrategy { Linear, Normal, Quantile };
std::string to_string(RankStrategy s);
RankStrategy parse_rank_strategy(const std::string& text);

/// Min-max scores in [0, 1], best 1; all-equal values score 0.5.
std::vector<double> rank_linear(std::span<const double> values, Direction direction);
/// Best 1, worst 0, everything else 0.5; tied extremes share the score.
std::vector<double> rank_normal(std::span<const double> values, Direction direction);
/// Quartile scores 3 (best) to 0 from each value's first position in the
/// best-to-worst order.
std::vector<double> rank_quantile(std::span<const double> values, Direction direction);
std::vector<double> rank(RankStrategy strategy, std::span<const double> values, Direction direction);

struct DatasetInput {
  std::string name;
  Table table;
};

/// One directed output across all datasets. Datasets lacking the output hold
/// NaN in `raw` and score 0.
struct RankedOutput {
  std::string metric;
  std::string output;
  Category category = Category::Utility;
  Direction direction = Direction::LowerBetter;
  std::vector<double> raw;
  std::vector<double> scores;

  std::string column() const { return metric + ":" + output; }
};

struct BenchmarkReport {
  RankStrategy strategy = RankStrategy::Linear;
  std::vector<std::string> datasets;
  std::vector<std::vector<MetricResult>> results;
  std::vector<RankedOutput> outputs;
  std::vector<double> utility;
  std::vector<double> privacy;
  std::vector<double> total;
  std::vector<std::string> warnings;
};

/// Evaluates every synthetic dataset under one config and ranks the
/// directed outputs. Throws DataError naming the dataset that fails
/// validation.
BenchmarkReport benchmark(const Table& real, const std::vector<DatasetInput>& synthetics,
                          const std::optional<Table>& holdout, const std::optional<std::string>& target,
                          const EvalConfig& config, const MetricRegistry& registry,
                          RankStrategy strategy = RankStrategy::Linear);

/// Pure ranking step over already collected results.
void rank_results(BenchmarkReport& report);

/// datasets x (ranked outputs + utility, privacy, total) with a leading
/// "dataset" index column.
std::string benchmark_raw_csv(const BenchmarkReport& report);
std::string benchmark_scores_csv(const BenchmarkReport& report);

Json to_json(const BenchmarkReport& report);
BenchmarkReport benchmark_report_from_json(const Json& doc);

}  // namespace tabeval
