#include "tabeval/metric_result.hpp"

#include <stdexcept>

namespace tabeval {

std::string to_string(Direction d) {
  switch (d) {
    case Direction::HigherBetter:
      return "higher_better";
    case Direction::LowerBetter:
      return "lower_better";
    case Direction::Unranked:
      return "unranked";
  }
  return "unranked";
}

std::string to_string(Category c) { return c == Category::Utility ? "utility" : "privacy"; }

Direction parse_direction(const std::string& text) {
  if (text == "higher_better") return Direction::HigherBetter;
  if (text == "lower_better") return Direction::LowerBetter;
  if (text == "unranked") return Direction::Unranked;
  throw std::invalid_argument("unknown direction '" + text + "'");
}

Category parse_category(const std::string& text) {
  if (text == "utility") return Category::Utility;
  if (text == "privacy") return Category::Privacy;
  throw std::invalid_argument("unknown category '" + text + "'");
}

MetricResult MetricResult::make_disabled(std::string key, Category category, std::string reason) {
  MetricResult r(std::move(key), category);
  r.disabled = std::move(reason);
  return r;
}

MetricResult MetricResult::make_failed(std::string key, Category category, std::string error) {
  MetricResult r(std::move(key), category);
  r.failure = std::move(error);
  return r;
}

MetricOutput& MetricResult::add(std::string name, double value, Direction direction,
                                std::optional<double> error) {
  return add(std::move(name), value, direction, error, category);
}

MetricOutput& MetricResult::add(std::string name, double value, Direction direction,
                                std::optional<double> error, Category output_category) {
  outputs.push_back({std::move(name), value, direction, error, output_category});
  return outputs.back();
}

const MetricOutput* MetricResult::find(const std::string& name) const {
  for (const auto& o : outputs) {
    if (o.name == name) return &o;
  }
  return nullptr;
}

double MetricResult::value(const std::string& name) const {
  if (const auto* o = find(name)) return o->value;
  throw std::out_of_range("metric '" + key + "' has no output '" + name + "'");
}

Json to_json(const MetricResult& r) {
  Json j;
  j["key"] = r.key;
  j["category"] = to_string(r.category);
  if (r.disabled) {
    j["status"] = "disabled";
    j["reason"] = *r.disabled;
  } else if (r.failure) {
    j["status"] = "failed";
    j["error"] = *r.failure;
  } else {
    j["status"] = "ok";
  }
  Json outs = Json::array();
  for (const auto& o : r.outputs) {
    Json oj;
    oj["name"] = o.name;
    oj["value"] = o.value;
    oj["direction"] = to_string(o.direction);
    oj["category"] = to_string(o.category);
    if (o.error) oj["error"] = *o.error;
    outs.push_back(std::move(oj));
  }
  j["outputs"] = std::move(outs);
  j["notes"] = r.notes;
  j["plots"] = r.plots;
  return j;
}

MetricResult metric_result_from_json(const Json& j) {
  MetricResult r(j.at("key").get<std::string>(), parse_category(j.at("category").get<std::string>()));
  const auto status = j.at("status").get<std::string>();
  if (status == "disabled") r.disabled = j.at("reason").get<std::string>();
  if (status == "failed") r.failure = j.at("error").get<std::string>();
  for (const auto& oj : j.at("outputs")) {
    std::optional<double> err;
    if (oj.contains("error")) err = oj.at("error").get<double>();
    r.add(oj.at("name").get<std::string>(), oj.at("value").get<double>(),
          parse_direction(oj.at("direction").get<std::string>()), err,
          parse_category(oj.at("category").get<std::string>()));
  }
  r.notes = j.at("notes").get<std::vector<std::string>>();
  r.plots = j.at("plots");
  return r;
}

}  // namespace tabeval
