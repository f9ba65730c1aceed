#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "tabeval/framework.hpp"
#include "tabeval/stats.hpp"
#include "test_support.hpp"

using namespace tabeval;
using testing_support::random_table;

namespace {

using V = std::vector<double>;

const std::set<std::string> kPrivacyKeys{"nndr", "nnaa_privacy_loss", "dcr", "hit_rate", "eps_risk", "mia_risk",
                                         "att_discl"};

std::set<std::string> keys_of(const EvalConfig& c) {
  std::set<std::string> out;
  for (const auto& m : c.metrics) out.insert(m.key);
  return out;
}

// Distance of the synthetic mean of "num0" from the real one, reported as
// one utility and one privacy output.
MetricRegistry toy_registry() {
  MetricRegistry r;
  auto gap = [](const EvalContext& c) {
    return std::abs(mean(c.real().column("num0").numbers()) - mean(c.synthetic().column("num0").numbers()));
  };
  r.register_plugin({"u_gap", Category::Utility, Json::object(), [gap](const EvalContext& c, const Json&) {
                       MetricResult m("u_gap", Category::Utility);
                       m.add("gap", gap(c), Direction::LowerBetter);
                       m.add("helper", 123.0, Direction::Unranked);
                       return m;
                     }});
  r.register_plugin({"p_gap", Category::Privacy, Json::object(), [gap](const EvalContext& c, const Json&) {
                       MetricResult m("p_gap", Category::Privacy);
                       m.add("closeness", -gap(c), Direction::LowerBetter);
                       m.add("distance", gap(c), Direction::HigherBetter);
                       return m;
                     }});
  return r;
}

EvalConfig all_of(const MetricRegistry& r) {
  EvalConfig c;
  for (const auto& k : r.keys()) c.metrics.push_back({k, Json::object()});
  return c;
}

std::size_t csv_fields(const std::string& line) { return static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1; }

}  // namespace

TEST(Registry, HoldsEighteenBuiltins) {
  const auto r = MetricRegistry::builtin();
  EXPECT_EQ(r.keys().size(), 18u);
  std::set<std::string> privacy;
  for (const auto& d : r.descriptors()) {
    if (d.category == Category::Privacy) privacy.insert(d.key);
  }
  EXPECT_EQ(privacy, kPrivacyKeys);
  EXPECT_EQ(r.at("ks_test").defaults["n_perms"], 1000);
  EXPECT_THROW(r.at("nope"), ConfigError);
}

TEST(Registry, PluginValidation) {
  auto r = MetricRegistry::builtin();
  const MetricFn fn = [](const EvalContext&, const Json&) { return MetricResult("x", Category::Utility); };
  EXPECT_THROW(r.register_plugin({"ks_test", Category::Utility, Json::object(), fn}), ConfigError);
  EXPECT_THROW(r.register_plugin({"bad key", Category::Utility, Json::object(), fn}), ConfigError);
  EXPECT_THROW(r.register_plugin({"nofn", Category::Utility, Json::object(), nullptr}), ConfigError);
  EXPECT_THROW(r.register_plugin({"arr", Category::Utility, Json::array(), fn}), ConfigError);
  EXPECT_THROW(r.register_plugin({"nested", Category::Utility, Json{{"a", Json::array()}}, fn}), ConfigError);
}

TEST(Registry, PluginRunsFromConfigAndFullPreset) {
  auto r = MetricRegistry::builtin();
  r.register_plugin({"my_metric", Category::Utility, Json{{"scale", 2.0}}, [](const EvalContext& c, const Json& o) {
                       MetricResult m("my_metric", Category::Utility);
                       m.add("rows", o["scale"].get<double>() * static_cast<double>(c.real().n_rows()),
                             Direction::LowerBetter);
                       return m;
                     }});
  EXPECT_EQ(resolve_preset("full_eval", r).metrics.size(), 19u);
  const auto cfg = EvalConfig::from_json(Json::parse(R"({"metrics": {"my_metric": {"scale": 3}}})"), r);
  Rng rng(1);
  const auto t = random_table(rng, 10, 1, 1);
  const auto results = evaluate(validate_context(t, t), cfg, r);
  ASSERT_EQ(results.size(), 1u);
  EXPECT_EQ(results[0].value("rows"), 30.0);
}

TEST(Presets, Membership) {
  const auto r = MetricRegistry::builtin();
  EXPECT_EQ(keys_of(resolve_preset("priv_eval", r)), kPrivacyKeys);
  EXPECT_EQ(resolve_preset("full_eval", r).metrics.size(), 18u);
  EXPECT_EQ(keys_of(resolve_preset("fast_eval", r)),
            (std::set<std::string>{"dwm", "cio", "corr_diff", "ks_test", "h_dist", "hit_rate", "dcr", "nndr"}));
  EXPECT_THROW(resolve_preset("/nonexistent/config.json", r), ConfigError);
}

TEST(Config, RoundTripsThroughJsonAndFiles) {
  const auto r = MetricRegistry::builtin();
  EvalConfig c;
  c.metrics = {{"ks_test", Json{{"n_perms", 50}}}, {"cio", Json::object()}, {"cls_acc", Json{{"F1_type", "macro"}}}};
  c.seed = 77;
  c.distance = DistanceKind::Euclidean;
  EXPECT_EQ(EvalConfig::from_json(c.to_json(), r), c);
  const auto path = std::filesystem::temp_directory_path() / "tabeval_cfg_roundtrip.json";
  std::ofstream(path) << c.to_json().dump(2);
  EXPECT_EQ(resolve_preset(path.string(), r), c);
  // Metric order survives.
  EXPECT_EQ(resolve_preset(path.string(), r).metrics[0].key, "ks_test");
}

TEST(Config, RejectsBadDocuments) {
  const auto r = MetricRegistry::builtin();
  for (const char* text : {
           R"({"metrics": {"ks_test": {"n_perm": 5}}})",
           R"({"metrics": {"ks_test": {"n_perms": "many"}}})",
           R"({"metrics": {"ks_test": {"n_perms": -1}}})",
           R"({"metrics": {"unknown_metric": {}}})",
           R"({"metrics": {}, "color": "red"})",
           R"({"metrics": {}, "distance": "manhattan"})",
           R"({"metrics": {}, "seed": -4})",
           R"({"seed": 1})",
           R"([1, 2])",
       }) {
    EXPECT_THROW(EvalConfig::from_json(Json::parse(text), r), ConfigError) << text;
  }
  const auto path = std::filesystem::temp_directory_path() / "tabeval_cfg_bad.json";
  std::ofstream(path) << "{ not json";
  EXPECT_THROW(resolve_preset(path.string(), r), ConfigError);
}

TEST(Config, MergedOptionsOverlayDefaults) {
  const auto r = MetricRegistry::builtin();
  const auto merged = merged_options(r.at("ks_test"), Json{{"sig_lvl", 0.01}});
  EXPECT_EQ(merged["sig_lvl"], 0.01);
  EXPECT_EQ(merged["n_perms"], 1000);
}

TEST(Evaluate, SingleMetricAndDeterminism) {
  const auto r = MetricRegistry::builtin();
  Rng rng(2);
  const auto real = random_table(rng, 80, 2, 2);
  const auto syn = random_table(rng, 80, 2, 2, 4, 0.2);
  const auto ctx = validate_context(real, syn);
  const auto one = EvalConfig::from_json(Json::parse(R"({"metrics": {"ks_test": {"n_perms": 100}}})"), r);
  ASSERT_EQ(evaluate(ctx, one, r).size(), 1u);
  auto full = resolve_preset("full_eval", r);
  full.seed = 5;
  const auto a = evaluate(ctx, full, r), b = evaluate(ctx, full, r);
  ASSERT_EQ(a.size(), 18u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(to_json(a[i]), to_json(b[i]));
    EXPECT_EQ(a[i].key, full.metrics[i].key);
  }
}

TEST(Evaluate, FailingPluginDoesNotStopTheRun) {
  auto r = MetricRegistry::builtin();
  r.register_plugin({"boom", Category::Privacy, Json::object(),
                     [](const EvalContext&, const Json&) -> MetricResult { throw std::runtime_error("kaput"); }});
  const auto cfg = EvalConfig::from_json(Json::parse(R"({"metrics": {"boom": {}, "dwm": {}}})"), r);
  Rng rng(3);
  const auto t = random_table(rng, 20, 2, 1);
  const auto results = evaluate(validate_context(t, t), cfg, r);
  ASSERT_EQ(results.size(), 2u);
  ASSERT_TRUE(results[0].failure);
  EXPECT_NE(results[0].failure->find("kaput"), std::string::npos);
  EXPECT_TRUE(results[1].ok());
}

TEST(Ranking, HandExamples) {
  EXPECT_EQ(rank_linear(V{2, 4, 6}, Direction::LowerBetter), (V{1, 0.5, 0}));
  EXPECT_EQ(rank_linear(V{2, 4, 6}, Direction::HigherBetter), (V{0, 0.5, 1}));
  EXPECT_EQ(rank_linear(V{5, 5, 5}, Direction::LowerBetter), (V{0.5, 0.5, 0.5}));
  EXPECT_EQ(rank_normal(V{2, 4, 6}, Direction::LowerBetter), (V{1, 0.5, 0}));
  EXPECT_EQ(rank_normal(V{1, 1, 3}, Direction::LowerBetter), (V{1, 1, 0}));
  EXPECT_EQ(rank_normal(V{7, 3}, Direction::HigherBetter), (V{1, 0}));
  EXPECT_EQ(rank_quantile(V{1, 2, 3, 4, 5, 6, 7, 8}, Direction::LowerBetter), (V{3, 3, 2, 2, 1, 1, 0, 0}));
  EXPECT_EQ(rank_quantile(V{8, 1, 6, 3, 2, 7, 4, 5}, Direction::HigherBetter), (V{3, 0, 2, 1, 0, 3, 1, 2}));
  EXPECT_EQ(rank_quantile(V{10, 20, 30, 40}, Direction::HigherBetter), (V{0, 1, 2, 3}));
  EXPECT_EQ(rank_quantile(V{4, 4, 4, 4, 4}, Direction::LowerBetter), (V{3, 3, 3, 3, 3}));
  EXPECT_THROW(rank_linear(V{1, 2}, Direction::Unranked), std::invalid_argument);
}

TEST(Ranking, MonotonicityProperty) {
  Rng rng(4);
  for (int t = 0; t < 1000; ++t) {
    const std::size_t n = 2 + uniform_index(rng, 11);
    V values(n);
    // Small integers make ties frequent.
    for (auto& v : values) v = static_cast<double>(uniform_index(rng, 6));
    const std::size_t i = uniform_index(rng, n);
    V better = values;
    better[i] -= 1.0 + static_cast<double>(uniform_index(rng, 3));
    for (auto s : {RankStrategy::Linear, RankStrategy::Normal, RankStrategy::Quantile}) {
      const auto before = rank(s, values, Direction::LowerBetter);
      const auto after = rank(s, better, Direction::LowerBetter);
      ASSERT_GE(after[i], before[i]) << to_string(s) << " trial " << t;
    }
  }
}

TEST(Ranking, ArgmaxInvarianceProperty) {
  Rng rng(5);
  for (int t = 0; t < 1000; ++t) {
    const std::size_t n = 2 + uniform_index(rng, 11);
    V values(n), moved(n);
    for (auto& v : values) v = static_cast<double>(uniform_index(rng, 8)) - 3.0;
    for (std::size_t k = 0; k < n; ++k) moved[k] = std::exp(values[k]) + values[k] * values[k] * values[k];
    for (auto d : {Direction::LowerBetter, Direction::HigherBetter}) {
      ASSERT_EQ(rank_normal(values, d), rank_normal(moved, d));
      ASSERT_EQ(rank_quantile(values, d), rank_quantile(moved, d));
      const auto a = rank_linear(values, d), b = rank_linear(moved, d);
      for (std::size_t k = 0; k < n; ++k) {
        ASSERT_EQ(a[k] == 1.0, b[k] == 1.0);
        ASSERT_EQ(a[k] == 0.0, b[k] == 0.0);
        ASSERT_GE(a[k], 0.0);
        ASSERT_LE(a[k], 1.0);
      }
    }
  }
}

TEST(Benchmark, DominatingDatasetWinsEveryRank) {
  const auto r = toy_registry();
  Rng rng(6);
  const auto real = random_table(rng, 50, 1, 1);
  const auto close = random_table(rng, 50, 1, 1, 4, 0.1);
  const auto far = random_table(rng, 50, 1, 1, 4, 3.0);
  for (auto s : {RankStrategy::Linear, RankStrategy::Normal, RankStrategy::Quantile}) {
    const auto rep = benchmark(real, {{"close", close}, {"far", far}}, std::nullopt, std::nullopt, all_of(r), r, s);
    EXPECT_EQ(rep.datasets, (std::vector<std::string>{"close", "far"}));
    EXPECT_GT(rep.utility[0], rep.utility[1]);
    EXPECT_LT(rep.privacy[0], rep.privacy[1]);
    EXPECT_DOUBLE_EQ(rep.total[0], rep.utility[0] + rep.privacy[0]);
  }
}

TEST(Benchmark, UnrankedOutputsAreExcluded) {
  const auto r = toy_registry();
  Rng rng(7);
  const auto real = random_table(rng, 30, 1, 1);
  const auto rep = benchmark(real, {{"a", random_table(rng, 30, 1, 1)}, {"b", random_table(rng, 30, 1, 1)}},
                             std::nullopt, std::nullopt, all_of(r), r);
  ASSERT_EQ(rep.outputs.size(), 3u);
  for (const auto& o : rep.outputs) EXPECT_NE(o.output, "helper");
  const auto header = benchmark_scores_csv(rep).substr(0, benchmark_scores_csv(rep).find('\n'));
  EXPECT_EQ(csv_fields(header), 1 + rep.outputs.size() + 3);
  EXPECT_EQ(header.rfind("dataset,", 0), 0u);
  EXPECT_NE(header.find("utility_rank,privacy_rank,total_rank"), std::string::npos);
}

TEST(Benchmark, EqualCopiesTie) {
  const auto r = MetricRegistry::builtin();
  Rng rng(8);
  const auto real = random_table(rng, 60, 2, 2);
  const auto syn = random_table(rng, 60, 2, 2, 4, 0.3);
  const auto rep = benchmark(real, {{"a", syn}, {"b", syn}}, std::nullopt, std::nullopt,
                             resolve_preset("fast_eval", r), r);
  EXPECT_EQ(rep.total[0], rep.total[1]);
  EXPECT_EQ(rep.utility[0], rep.utility[1]);
}

TEST(Benchmark, StrategyChangeKeepsRawValues) {
  const auto r = toy_registry();
  Rng rng(9);
  const auto real = random_table(rng, 30, 1, 1);
  std::vector<DatasetInput> inputs;
  for (int k = 0; k < 5; ++k) inputs.push_back({"d" + std::to_string(k), random_table(rng, 30, 1, 1, 4, 0.2 * k)});
  auto rep = benchmark(real, inputs, std::nullopt, std::nullopt, all_of(r), r, RankStrategy::Linear);
  std::vector<V> raw;
  for (const auto& o : rep.outputs) raw.push_back(o.raw);
  const auto linear_scores = benchmark_scores_csv(rep);
  rep.strategy = RankStrategy::Quantile;
  rank_results(rep);
  ASSERT_EQ(rep.outputs.size(), raw.size());
  for (std::size_t k = 0; k < raw.size(); ++k) EXPECT_EQ(rep.outputs[k].raw, raw[k]);
  EXPECT_NE(benchmark_scores_csv(rep), linear_scores);
  for (const auto& o : rep.outputs) {
    for (double s : o.scores) EXPECT_TRUE(s == 0 || s == 1 || s == 2 || s == 3);
  }
}

TEST(Benchmark, QuantileWithFewDatasetsWarns) {
  const auto r = toy_registry();
  Rng rng(10);
  const auto real = random_table(rng, 30, 1, 1);
  const auto rep = benchmark(real, {{"a", random_table(rng, 30, 1, 1)}, {"b", random_table(rng, 30, 1, 1)}},
                             std::nullopt, std::nullopt, all_of(r), r, RankStrategy::Quantile);
  EXPECT_FALSE(rep.warnings.empty());
}

TEST(Benchmark, MissingOutputsScoreZero) {
  BenchmarkReport rep;
  rep.datasets = {"a", "b"};
  MetricResult with("m", Category::Utility);
  with.add("x", 1.0, Direction::LowerBetter);
  rep.results = {{with}, {MetricResult::make_disabled("m", Category::Utility, "no data")}};
  rank_results(rep);
  ASSERT_EQ(rep.outputs.size(), 1u);
  EXPECT_TRUE(std::isnan(rep.outputs[0].raw[1]));
  EXPECT_EQ(rep.outputs[0].scores[1], 0.0);
  EXPECT_FALSE(rep.warnings.empty());
}

TEST(Benchmark, ValidationErrorsNameTheDataset) {
  const auto r = toy_registry();
  Rng rng(11);
  const auto real = random_table(rng, 30, 1, 1);
  const Table broken({Column::numerical("other", std::vector<double>(30, 1.0))});
  try {
    benchmark(real, {{"ok", real}, {"broken_one", broken}}, std::nullopt, std::nullopt, all_of(r), r);
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("broken_one"), std::string::npos);
  }
  EXPECT_THROW(benchmark(real, {{"only", real}}, std::nullopt, std::nullopt, all_of(r), r), DataError);
  EXPECT_THROW(benchmark(real, {{"x", real}, {"x", real}}, std::nullopt, std::nullopt, all_of(r), r), DataError);
}

TEST(Benchmark, JsonRoundTrip) {
  const auto r = toy_registry();
  Rng rng(12);
  const auto real = random_table(rng, 30, 1, 1);
  const auto rep = benchmark(real, {{"a", random_table(rng, 30, 1, 1)}, {"b", random_table(rng, 30, 1, 1)}},
                             std::nullopt, std::nullopt, all_of(r), r, RankStrategy::Normal);
  const auto again = benchmark_report_from_json(to_json(rep));
  EXPECT_EQ(to_json(again), to_json(rep));
  EXPECT_EQ(benchmark_scores_csv(again), benchmark_scores_csv(rep));
}
