#include "tabeval/framework.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "tabeval/metrics.hpp"
#include "tabeval/util.hpp"

namespace tabeval {

namespace {

double opt_double(const Json& o, const char* name) { return o.at(name).get<double>(); }
std::size_t opt_count(const Json& o, const char* name) { return o.at(name).get<std::size_t>(); }
bool opt_bool(const Json& o, const char* name) { return o.at(name).get<bool>(); }
std::string opt_string(const Json& o, const char* name) { return o.at(name).get<std::string>(); }

MetricDescriptor make(std::string key, Category category, Json defaults, MetricFn fn) {
  return {std::move(key), category, std::move(defaults), std::move(fn)};
}

bool valid_key(const std::string& key) {
  if (key.empty()) return false;
  return std::all_of(key.begin(), key.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' || c == '-';
  });
}

const std::vector<std::string> kFastEval = {"dwm", "cio", "corr_diff", "ks_test", "h_dist", "hit_rate", "dcr", "nndr"};

std::string format_number(double v) {
  if (std::isnan(v)) return "";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

Json number_or_null(double v) { return std::isnan(v) ? Json(nullptr) : Json(v); }
double number_from(const Json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

}  // namespace

MetricRegistry MetricRegistry::builtin() {
  using C = Category;
  MetricRegistry r;
  const Json none = Json::object();
  r.register_plugin(make("dwm", C::Utility, none, [](const EvalContext& c, const Json&) { return dwm(c); }));
  r.register_plugin(make("pca", C::Utility, none, [](const EvalContext& c, const Json&) { return pca_plot(c); }));
  r.register_plugin(make("cio", C::Utility, {{"confidence", 95.0}}, [](const EvalContext& c, const Json& o) {
    return cio(c, {opt_double(o, "confidence")});
  }));
  r.register_plugin(make("corr_diff", C::Utility, {{"mixed_corr", true}}, [](const EvalContext& c, const Json& o) {
    return corr_diff(c, {opt_bool(o, "mixed_corr")});
  }));
  r.register_plugin(make("mi_diff", C::Utility, none, [](const EvalContext& c, const Json&) { return mi_diff(c); }));
  r.register_plugin(make("ks_test", C::Utility, {{"sig_lvl", 0.05}, {"n_perms", 1000u}},
                         [](const EvalContext& c, const Json& o) {
                           return ks_test(c, {opt_double(o, "sig_lvl"), opt_count(o, "n_perms")});
                         }));
  r.register_plugin(make("h_dist", C::Utility, none, [](const EvalContext& c, const Json&) { return h_dist(c); }));
  r.register_plugin(make("p_mse", C::Utility, {{"k_folds", 5u}, {"max_iter", 5000u}},
                         [](const EvalContext& c, const Json& o) {
                           return p_mse(c, {opt_count(o, "k_folds"), opt_count(o, "max_iter")});
                         }));
  r.register_plugin(make("nnaa", C::Utility, {{"n_resample", 30u}}, [](const EvalContext& c, const Json& o) {
    return nnaa(c, {opt_count(o, "n_resample")});
  }));
  r.register_plugin(make("auroc_diff", C::Utility, {{"model", "log_reg"}}, [](const EvalContext& c, const Json& o) {
    return auroc_diff(c, {opt_string(o, "model")});
  }));
  r.register_plugin(make("cls_acc", C::Utility, {{"F1_type", "micro"}, {"k_folds", 5u}},
                         [](const EvalContext& c, const Json& o) {
                           return cls_acc(c, {opt_string(o, "F1_type"), opt_count(o, "k_folds")});
                         }));
  r.register_plugin(make("nndr", C::Privacy, none, [](const EvalContext& c, const Json&) { return nndr(c); }));
  r.register_plugin(make("nnaa_privacy_loss", C::Privacy, {{"n_resample", 30u}},
                         [](const EvalContext& c, const Json& o) {
                           return nnaa_privacy_loss(c, {opt_count(o, "n_resample")});
                         }));
  r.register_plugin(make("dcr", C::Privacy, none, [](const EvalContext& c, const Json&) { return dcr(c); }));
  r.register_plugin(make("hit_rate", C::Privacy, {{"thres_percent", 1.0 / 30.0}},
                         [](const EvalContext& c, const Json& o) {
                           return hit_rate(c, {opt_double(o, "thres_percent")});
                         }));
  r.register_plugin(make("eps_risk", C::Privacy, none, [](const EvalContext& c, const Json&) { return eps_risk(c); }));
  r.register_plugin(make("mia_risk", C::Privacy, {{"num_eval_iter", 5u}}, [](const EvalContext& c, const Json& o) {
    return mia_risk(c, {opt_count(o, "num_eval_iter")});
  }));
  r.register_plugin(make("att_discl", C::Privacy, {{"tau", 1.0 / 30.0}}, [](const EvalContext& c, const Json& o) {
    return att_discl(c, {opt_double(o, "tau")});
  }));
  return r;
}

void MetricRegistry::register_plugin(MetricDescriptor descriptor) {
  if (!valid_key(descriptor.key)) {
    throw ConfigError("invalid metric key '" + descriptor.key + "' (use letters, digits, '_' or '-')");
  }
  if (find(descriptor.key)) throw ConfigError("metric '" + descriptor.key + "' is already registered");
  if (!descriptor.evaluate) throw ConfigError("metric '" + descriptor.key + "' has no evaluate function");
  if (descriptor.defaults.is_null()) descriptor.defaults = Json::object();
  if (!descriptor.defaults.is_object()) {
    throw ConfigError("metric '" + descriptor.key + "': option defaults must be a JSON object");
  }
  for (const auto& [name, value] : descriptor.defaults.items()) {
    if (!(value.is_number() || value.is_boolean() || value.is_string())) {
      throw ConfigError("metric '" + descriptor.key + "': option '" + name + "' must be a number, boolean or string");
    }
  }
  descriptors_.push_back(std::move(descriptor));
}

const MetricDescriptor* MetricRegistry::find(const std::string& key) const {
  for (const auto& d : descriptors_) {
    if (d.key == key) return &d;
  }
  return nullptr;
}

const MetricDescriptor& MetricRegistry::at(const std::string& key) const {
  if (const auto* d = find(key)) return *d;
  throw ConfigError("unknown metric '" + key + "'");
}

std::vector<std::string> MetricRegistry::keys() const {
  std::vector<std::string> out;
  for (const auto& d : descriptors_) out.push_back(d.key);
  return out;
}

Json merged_options(const MetricDescriptor& descriptor, const Json& overrides) {
  Json merged = descriptor.defaults;
  if (overrides.is_null()) return merged;
  if (!overrides.is_object()) throw ConfigError("options for '" + descriptor.key + "' must be a JSON object");
  for (const auto& [name, value] : overrides.items()) {
    if (!descriptor.defaults.contains(name)) {
      throw ConfigError("unknown option '" + name + "' for metric '" + descriptor.key + "'");
    }
    const Json& def = descriptor.defaults.at(name);
    const std::string where = "option '" + name + "' of metric '" + descriptor.key + "'";
    if (def.is_number_unsigned() || def.is_number_integer()) {
      if (!value.is_number_integer() || (def.is_number_unsigned() && value.get<std::int64_t>() < 0)) {
        throw ConfigError(where + " must be a non-negative integer");
      }
    } else if (def.is_number()) {
      if (!value.is_number()) throw ConfigError(where + " must be a number");
    } else if (def.is_boolean()) {
      if (!value.is_boolean()) throw ConfigError(where + " must be true or false");
    } else if (def.is_string()) {
      if (!value.is_string()) throw ConfigError(where + " must be a string");
    }
    merged[name] = value;
  }
  return merged;
}

Json EvalConfig::to_json() const {
  Json doc;
  Json m = Json::object();
  for (const auto& s : metrics) m[s.key] = s.options.is_null() ? Json::object() : s.options;
  doc["metrics"] = std::move(m);
  doc["seed"] = seed;
  doc["distance"] = to_string(distance);
  return doc;
}

EvalConfig EvalConfig::from_json(const Json& doc, const MetricRegistry& registry) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  EvalConfig config;
  for (const auto& [name, value] : doc.items()) {
    if (name != "metrics" && name != "seed" && name != "distance") {
      throw ConfigError("unknown config key '" + name + "'");
    }
  }
  if (!doc.contains("metrics") || !doc.at("metrics").is_object()) {
    throw ConfigError("config needs a \"metrics\" object");
  }
  for (const auto& [key, options] : doc.at("metrics").items()) {
    const auto& descriptor = registry.at(key);
    merged_options(descriptor, options);
    config.metrics.push_back({key, options.is_null() ? Json::object() : options});
  }
  if (doc.contains("seed")) {
    const auto& s = doc.at("seed");
    if (!s.is_number_integer() || (s.is_number_integer() && !s.is_number_unsigned() && s.get<std::int64_t>() < 0)) {
      throw ConfigError("\"seed\" must be a non-negative integer");
    }
    config.seed = s.get<std::uint64_t>();
  }
  if (doc.contains("distance")) {
    if (!doc.at("distance").is_string()) throw ConfigError("\"distance\" must be \"gower\" or \"euclidean\"");
    try {
      config.distance = parse_distance_kind(doc.at("distance").get<std::string>());
    } catch (const std::exception& e) {
      throw ConfigError(e.what());
    }
  }
  return config;
}

EvalConfig resolve_preset(const std::string& name_or_path, const MetricRegistry& registry) {
  EvalConfig config;
  if (name_or_path == "full_eval") {
    for (const auto& d : registry.descriptors()) config.metrics.push_back({d.key, Json::object()});
    return config;
  }
  if (name_or_path == "priv_eval") {
    for (const auto& d : registry.descriptors()) {
      if (d.category == Category::Privacy) config.metrics.push_back({d.key, Json::object()});
    }
    return config;
  }
  if (name_or_path == "fast_eval") {
    for (const auto& key : kFastEval) {
      if (registry.find(key)) config.metrics.push_back({key, Json::object()});
    }
    return config;
  }
  std::ifstream in(name_or_path, std::ios::binary);
  if (!in) {
    throw ConfigError("'" + name_or_path + "' is neither a preset (full_eval, fast_eval, priv_eval) nor a readable config file");
  }
  std::stringstream buf;
  buf << in.rdbuf();
  Json doc;
  try {
    doc = Json::parse(buf.str());
  } catch (const Json::parse_error& e) {
    throw ConfigError("malformed config '" + name_or_path + "': " + e.what());
  }
  return EvalConfig::from_json(doc, registry);
}

std::vector<MetricResult> evaluate(const EvalContext& ctx, const EvalConfig& config, const MetricRegistry& registry) {
  EvalContext run = ctx;
  run.seed = config.seed;
  run.distance = config.distance;
  std::vector<const MetricDescriptor*> descriptors;
  std::vector<Json> options;
  for (const auto& s : config.metrics) {
    descriptors.push_back(&registry.at(s.key));
    options.push_back(merged_options(*descriptors.back(), s.options));
  }
  std::vector<MetricResult> results(descriptors.size());
  parallel_for(
      descriptors.size(),
      [&](std::size_t i) {
        const auto& d = *descriptors[i];
        try {
          results[i] = d.evaluate(run, options[i]);
          results[i].key = d.key;
          results[i].category = d.category;
        } catch (const std::exception& e) {
          results[i] = MetricResult::make_failed(d.key, d.category, e.what());
        } catch (...) {
          results[i] = MetricResult::make_failed(d.key, d.category, "unknown error");
        }
      },
      1);
  return results;
}

// ---- ranking ---------------------------------------------------------------

std::string to_string(RankStrategy s) {
  switch (s) {
    case RankStrategy::Linear:
      return "linear";
    case RankStrategy::Normal:
      return "normal";
    case RankStrategy::Quantile:
      return "quantile";
  }
  return "linear";
}

RankStrategy parse_rank_strategy(const std::string& text) {
  if (text == "linear") return RankStrategy::Linear;
  if (text == "normal") return RankStrategy::Normal;
  if (text == "quantile") return RankStrategy::Quantile;
  throw ConfigError("unknown ranking strategy '" + text + "' (use linear, normal or quantile)");
}

namespace {

void require_ranked(Direction d) {
  if (d == Direction::Unranked) throw std::invalid_argument("unranked outputs cannot be scored");
}

// Larger goodness is better regardless of direction.
double goodness(double v, Direction d) { return d == Direction::HigherBetter ? v : -v; }

}  // namespace

std::vector<double> rank_linear(std::span<const double> values, Direction direction) {
  require_ranked(direction);
  std::vector<double> out(values.size(), 0.5);
  if (values.empty()) return out;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  const double span = *hi - *lo;
  if (!(span > 0.0)) return out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    out[i] = direction == Direction::HigherBetter ? (values[i] - *lo) / span : (*hi - values[i]) / span;
  }
  return out;
}

std::vector<double> rank_normal(std::span<const double> values, Direction direction) {
  require_ranked(direction);
  std::vector<double> out(values.size(), 0.5);
  if (values.empty()) return out;
  double best = goodness(values[0], direction), worst = best;
  for (double v : values) {
    best = std::max(best, goodness(v, direction));
    worst = std::min(worst, goodness(v, direction));
  }
  if (best == worst) return out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double g = goodness(values[i], direction);
    if (g == best) out[i] = 1.0;
    else if (g == worst) out[i] = 0.0;
  }
  return out;
}

std::vector<double> rank_quantile(std::span<const double> values, Direction direction) {
  require_ranked(direction);
  const std::size_t n = values.size();
  std::vector<double> out(n, 3.0);
  auto order = iota_ids(n);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return goodness(values[a], direction) > goodness(values[b], direction);
  });
  std::size_t first = 0;
  for (std::size_t pos = 0; pos < n; ++pos) {
    if (pos > 0 && values[order[pos]] != values[order[pos - 1]]) first = pos;
    out[order[pos]] = 3.0 - std::floor(4.0 * static_cast<double>(first) / static_cast<double>(n));
  }
  return out;
}

std::vector<double> rank(RankStrategy strategy, std::span<const double> values, Direction direction) {
  switch (strategy) {
    case RankStrategy::Linear:
      return rank_linear(values, direction);
    case RankStrategy::Normal:
      return rank_normal(values, direction);
    case RankStrategy::Quantile:
      return rank_quantile(values, direction);
  }
  return rank_linear(values, direction);
}

void rank_results(BenchmarkReport& report) {
  const std::size_t n = report.datasets.size();
  report.outputs.clear();
  report.warnings.clear();
  if (report.strategy == RankStrategy::Quantile && n < 4) {
    report.warnings.push_back("quantile ranking with " + std::to_string(n) +
                              " datasets; it is meant for comparing many datasets");
  }
  auto locate = [&](const std::string& metric, const std::string& output) -> RankedOutput* {
    for (auto& o : report.outputs) {
      if (o.metric == metric && o.output == output) return &o;
    }
    return nullptr;
  };
  for (std::size_t d = 0; d < n; ++d) {
    for (const auto& result : report.results[d]) {
      if (!result.ok()) continue;
      for (const auto& out : result.outputs) {
        if (out.direction == Direction::Unranked) continue;
        auto* slot = locate(result.key, out.name);
        if (!slot) {
          report.outputs.push_back({result.key, out.name, out.category, out.direction,
                                    std::vector<double>(n, std::numeric_limits<double>::quiet_NaN()),
                                    std::vector<double>(n, 0.0)});
          slot = &report.outputs.back();
        }
        slot->raw[d] = out.value;
      }
    }
  }
  report.utility.assign(n, 0.0);
  report.privacy.assign(n, 0.0);
  report.total.assign(n, 0.0);
  for (auto& o : report.outputs) {
    std::vector<std::size_t> present;
    std::vector<double> values;
    for (std::size_t d = 0; d < n; ++d) {
      if (!std::isnan(o.raw[d])) {
        present.push_back(d);
        values.push_back(o.raw[d]);
      }
    }
    if (present.size() < n) {
      report.warnings.push_back("'" + o.column() + "' is missing for some datasets; they score 0 on it");
    }
    const auto s = rank(report.strategy, values, o.direction);
    for (std::size_t a = 0; a < present.size(); ++a) o.scores[present[a]] = s[a];
    for (std::size_t d = 0; d < n; ++d) {
      (o.category == Category::Utility ? report.utility : report.privacy)[d] += o.scores[d];
    }
  }
  for (std::size_t d = 0; d < n; ++d) report.total[d] = report.utility[d] + report.privacy[d];
}

BenchmarkReport benchmark(const Table& real, const std::vector<DatasetInput>& synthetics,
                          const std::optional<Table>& holdout, const std::optional<std::string>& target,
                          const EvalConfig& config, const MetricRegistry& registry, RankStrategy strategy) {
  if (synthetics.size() < 2) throw DataError("benchmark needs at least two synthetic datasets");
  BenchmarkReport report;
  report.strategy = strategy;
  std::vector<EvalContext> contexts;
  for (const auto& s : synthetics) {
    if (std::find(report.datasets.begin(), report.datasets.end(), s.name) != report.datasets.end()) {
      throw DataError("duplicate dataset name '" + s.name + "'");
    }
    try {
      contexts.push_back(validate_context(real, s.table, holdout, target, config.seed, config.distance));
    } catch (const DataError& e) {
      throw DataError("dataset '" + s.name + "': " + e.what());
    }
    report.datasets.push_back(s.name);
  }
  for (const auto& ctx : contexts) report.results.push_back(evaluate(ctx, config, registry));
  rank_results(report);
  return report;
}

namespace {

std::string table_csv(const BenchmarkReport& report, bool scores) {
  std::string out = "dataset";
  for (const auto& o : report.outputs) out += "," + csv_field(o.column());
  out += ",utility_rank,privacy_rank,total_rank\n";
  for (std::size_t d = 0; d < report.datasets.size(); ++d) {
    out += csv_field(report.datasets[d]);
    for (const auto& o : report.outputs) out += "," + format_number(scores ? o.scores[d] : o.raw[d]);
    out += "," + format_number(report.utility[d]) + "," + format_number(report.privacy[d]) + "," +
           format_number(report.total[d]) + "\n";
  }
  return out;
}

}  // namespace

std::string benchmark_raw_csv(const BenchmarkReport& report) { return table_csv(report, false); }
std::string benchmark_scores_csv(const BenchmarkReport& report) { return table_csv(report, true); }

Json to_json(const BenchmarkReport& report) {
  Json doc;
  doc["strategy"] = to_string(report.strategy);
  doc["datasets"] = report.datasets;
  Json results = Json::array();
  for (const auto& list : report.results) {
    Json per = Json::array();
    for (const auto& r : list) per.push_back(to_json(r));
    results.push_back(std::move(per));
  }
  doc["results"] = std::move(results);
  Json outputs = Json::array();
  for (const auto& o : report.outputs) {
    Json j;
    j["metric"] = o.metric;
    j["output"] = o.output;
    j["category"] = to_string(o.category);
    j["direction"] = to_string(o.direction);
    Json raw = Json::array();
    for (double v : o.raw) raw.push_back(number_or_null(v));
    j["raw"] = std::move(raw);
    j["scores"] = o.scores;
    outputs.push_back(std::move(j));
  }
  doc["outputs"] = std::move(outputs);
  doc["utility_rank"] = report.utility;
  doc["privacy_rank"] = report.privacy;
  doc["total_rank"] = report.total;
  doc["warnings"] = report.warnings;
  return doc;
}

BenchmarkReport benchmark_report_from_json(const Json& doc) {
  BenchmarkReport r;
  r.strategy = parse_rank_strategy(doc.at("strategy").get<std::string>());
  r.datasets = doc.at("datasets").get<std::vector<std::string>>();
  for (const auto& list : doc.at("results")) {
    std::vector<MetricResult> per;
    for (const auto& j : list) per.push_back(metric_result_from_json(j));
    r.results.push_back(std::move(per));
  }
  for (const auto& j : doc.at("outputs")) {
    RankedOutput o;
    o.metric = j.at("metric").get<std::string>();
    o.output = j.at("output").get<std::string>();
    o.category = parse_category(j.at("category").get<std::string>());
    o.direction = parse_direction(j.at("direction").get<std::string>());
    for (const auto& v : j.at("raw")) o.raw.push_back(number_from(v));
    o.scores = j.at("scores").get<std::vector<double>>();
    r.outputs.push_back(std::move(o));
  }
  r.utility = doc.at("utility_rank").get<std::vector<double>>();
  r.privacy = doc.at("privacy_rank").get<std::vector<double>>();
  r.total = doc.at("total_rank").get<std::vector<double>>();
  r.warnings = doc.at("warnings").get<std::vector<std::string>>();
  return r;
}

}  // namespace tabeval
