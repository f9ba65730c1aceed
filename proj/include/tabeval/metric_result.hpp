#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace tabeval {

using Json = nlohmann::ordered_json;

enum class Direction { HigherBetter, LowerBetter, Unranked };
enum class Category { Utility, Privacy };

std::string to_string(Direction d);
std::string to_string(Category c);
Direction parse_direction(const std::string& text);
Category parse_category(const std::string& text);

struct MetricOutput {
  std::string name;
  double value = 0.0;
  Direction direction = Direction::Unranked;
  std::optional<double> error;
  Category category = Category::Utility;
};

/// Outputs of one metric run. A disabled metric carries a reason and no
/// outputs; a failed one carries the error text.
struct MetricResult {
  std::string key;
  Category category = Category::Utility;
  std::vector<MetricOutput> outputs;
  Json plots = Json::object();
  std::vector<std::string> notes;
  std::optional<std::string> disabled;
  std::optional<std::string> failure;

  MetricResult() = default;
  MetricResult(std::string key, Category category) : key(std::move(key)), category(category) {}

  static MetricResult make_disabled(std::string key, Category category, std::string reason);
  static MetricResult make_failed(std::string key, Category category, std::string error);

  bool ok() const { return !disabled && !failure; }
  MetricOutput& add(std::string name, double value, Direction direction,
                    std::optional<double> error = std::nullopt);
  MetricOutput& add(std::string name, double value, Direction direction,
                    std::optional<double> error, Category output_category);
  const MetricOutput* find(const std::string& name) const;
  /// Throws std::out_of_range when the output is absent.
  double value(const std::string& name) const;
};

Json to_json(const MetricResult& result);
MetricResult metric_result_from_json(const Json& j);

}  // namespace tabeval
