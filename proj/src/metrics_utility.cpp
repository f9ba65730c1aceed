#include <algorithm>
#include <cmath>

#include "metric_common.hpp"
#include "tabeval/distance.hpp"
#include "tabeval/metrics.hpp"

namespace tabeval {

using namespace internal;

namespace {

constexpr std::size_t kDwmScatterThreshold = 10;

std::vector<double> codes_for(const EncodedTable& t, std::size_t j) { return t.column(j); }

// Columns as integer codes; numericals binned with Scott edges over the
// pooled real and synthetic values.
std::pair<EncodedTable, EncodedTable> discretize_pair(const EvalContext& ctx) {
  EncodedTable real = ctx.real_encoded();
  EncodedTable syn = ctx.synthetic_encoded();
  for (std::size_t j = 0; j < real.cols; ++j) {
    if (real.kinds[j] != ColumnKind::Numerical) continue;
    const auto& r = ctx.real().column(j).numbers();
    const auto& s = ctx.synthetic().column(j).numbers();
    std::vector<double> pooled(r.begin(), r.end());
    pooled.insert(pooled.end(), s.begin(), s.end());
    const auto edges = scott_bins(pooled);
    for (std::size_t i = 0; i < real.rows; ++i) real.values[i * real.cols + j] = static_cast<double>(bin_index(edges, r[i]));
    for (std::size_t i = 0; i < syn.rows; ++i) syn.values[i * syn.cols + j] = static_cast<double>(bin_index(edges, s[i]));
    real.n_levels[j] = syn.n_levels[j] = edges.size() - 1;
  }
  return {std::move(real), std::move(syn)};
}

}  // namespace

MetricResult dwm(const EvalContext& ctx) {
  const std::string key = "dwm";
  const auto nums = numerical_indices(ctx.real());
  if (nums.empty()) return MetricResult::make_disabled(key, Category::Utility, "no numerical columns");
  MetricResult result(key, Category::Utility);
  std::vector<double> diffs;
  Json attributes = Json::array();
  const double z = normal_quantile(0.975);
  for (auto j : nums) {
    const auto r = codes_for(ctx.real_encoded(), j);
    const auto s = codes_for(ctx.synthetic_encoded(), j);
    const double mr = mean(r), ms = mean(s);
    diffs.push_back(std::abs(mr - ms));
    const double ser = std_error(r), ses = std_error(s);
    const double se_diff = std::sqrt(ser * ser + ses * ses);
    Json a;
    a["name"] = ctx.real().column(j).name();
    a["real_mean"] = mr;
    a["synthetic_mean"] = ms;
    a["real_ci"] = {mr - z * ser, mr + z * ser};
    a["synthetic_ci"] = {ms - z * ses, ms + z * ses};
    a["difference"] = mr - ms;
    a["difference_ci"] = {mr - ms - z * se_diff, mr - ms + z * se_diff};
    attributes.push_back(std::move(a));
  }
  result.add("avg", mean(diffs), Direction::LowerBetter, std_error(diffs));
  Json plot;
  plot["variant"] = nums.size() < kDwmScatterThreshold ? "difference_ci" : "mean_scatter";
  plot["attributes"] = std::move(attributes);
  result.plots["dwm"] = std::move(plot);
  return result;
}

MetricResult pca_plot(const EvalContext& ctx) {
  const std::string key = "pca";
  const auto nums = numerical_indices(ctx.real());
  if (nums.size() < 2) {
    return MetricResult::make_disabled(key, Category::Utility, "fewer than two numerical columns");
  }
  if (ctx.real().n_rows() < 2) return MetricResult::make_disabled(key, Category::Utility, "fewer than two rows");
  auto gather = [&](const Table& t) {
    std::vector<double> out;
    out.reserve(t.n_rows() * nums.size());
    for (std::size_t i = 0; i < t.n_rows(); ++i) {
      for (auto j : nums) out.push_back(t.column(j).numbers()[i]);
    }
    return out;
  };
  const auto real = gather(ctx.real());
  const auto syn = gather(ctx.synthetic());
  const auto model = pca_fit(real, ctx.real().n_rows(), nums.size());
  MetricResult result(key, Category::Utility);
  double total = 0.0;
  for (double v : model.explained_variance) total += v;
  const double r1 = total > 0.0 ? model.explained_variance[0] / total : 0.0;
  const double r2 = total > 0.0 ? model.explained_variance[1] / total : 0.0;
  result.add("var_ratio_pc1", r1, Direction::Unranked);
  result.add("var_ratio_pc2", r2, Direction::Unranked);
  auto points = [](const std::vector<std::pair<double, double>>& pts) {
    Json arr = Json::array();
    for (const auto& [a, b] : pts) arr.push_back({a, b});
    return arr;
  };
  Json plot;
  Json columns = Json::array();
  for (auto j : nums) columns.push_back(ctx.real().column(j).name());
  plot["columns"] = std::move(columns);
  plot["explained_variance"] = model.explained_variance;
  plot["real"] = points(model.project(real));
  plot["synthetic"] = points(model.project(syn));
  result.plots["pca"] = std::move(plot);
  return result;
}

MetricResult cio(const EvalContext& ctx, const CioOptions& opts) {
  const std::string key = "cio";
  const auto nums = numerical_indices(ctx.real());
  if (nums.empty()) return MetricResult::make_disabled(key, Category::Utility, "no numerical columns");
  if (ctx.real().n_rows() < 2 || ctx.synthetic().n_rows() < 2) {
    return MetricResult::make_disabled(key, Category::Utility, "confidence intervals need two rows");
  }
  MetricResult result(key, Category::Utility);
  std::vector<double> overlaps;
  std::size_t non_overlapping = 0;
  Json per_column = Json::array();
  for (auto j : nums) {
    const auto [lr, ur] = mean_ci(ctx.real().column(j).numbers(), opts.confidence);
    const auto [ls, us] = mean_ci(ctx.synthetic().column(j).numbers(), opts.confidence);
    const double shared = std::min(ur, us) - std::max(lr, ls);
    auto ratio = [shared](double width) {
      if (width > 0.0) return shared / width;
      return shared >= 0.0 ? 1.0 : 0.0;
    };
    const double overlap = std::max(0.0, 0.5 * (ratio(ur - lr) + ratio(us - ls)));
    overlaps.push_back(overlap);
    if (overlap <= 0.0) ++non_overlapping;
    Json c;
    c["name"] = ctx.real().column(j).name();
    c["real_ci"] = {lr, ur};
    c["synthetic_ci"] = {ls, us};
    c["overlap"] = overlap;
    per_column.push_back(std::move(c));
  }
  result.add("avg_overlap", mean(overlaps), Direction::HigherBetter, std_error(overlaps));
  result.add("num_non_overlaps", static_cast<double>(non_overlapping), Direction::LowerBetter);
  result.add("frac_non_overlaps", static_cast<double>(non_overlapping) / static_cast<double>(nums.size()),
             Direction::LowerBetter);
  result.plots["cio"] = std::move(per_column);
  return result;
}

MetricResult corr_diff(const EvalContext& ctx, const CorrDiffOptions& opts) {
  const std::string key = "corr_diff";
  if (ctx.real().n_rows() < 2 || ctx.synthetic().n_rows() < 2) {
    return MetricResult::make_disabled(key, Category::Utility, "fewer than two rows");
  }
  MatrixSummary real, syn;
  if (opts.mixed_corr) {
    if (ctx.real().n_cols() < 2) return MetricResult::make_disabled(key, Category::Utility, "fewer than two columns");
    real = mixed_correlation_matrix(ctx.real_encoded(), ctx.real().names());
    syn = mixed_correlation_matrix(ctx.synthetic_encoded(), ctx.real().names());
  } else {
    if (numerical_indices(ctx.real()).size() < 2) {
      return MetricResult::make_disabled(key, Category::Utility, "fewer than two numerical columns");
    }
    real = pearson_matrix(ctx.real_encoded(), ctx.real().names());
    syn = pearson_matrix(ctx.synthetic_encoded(), ctx.real().names());
  }
  MetricResult result(key, Category::Utility);
  result.add("diff", frobenius_diff(real, syn), Direction::LowerBetter);
  result.plots["real"] = matrix_json(real);
  result.plots["synthetic"] = matrix_json(syn);
  result.plots["difference"] = matrix_json(matrix_difference(real, syn));
  return result;
}

MetricResult mi_diff(const EvalContext& ctx) {
  const std::string key = "mi_diff";
  if (ctx.real().n_cols() < 2) return MetricResult::make_disabled(key, Category::Utility, "fewer than two columns");
  if (ctx.real().n_rows() + ctx.synthetic().n_rows() < 2) {
    return MetricResult::make_disabled(key, Category::Utility, "fewer than two rows");
  }
  const auto [real_codes, syn_codes] = discretize_pair(ctx);
  const auto real = mutual_information_matrix(real_codes, ctx.real().names());
  const auto syn = mutual_information_matrix(syn_codes, ctx.real().names());
  MetricResult result(key, Category::Utility);
  result.add("diff", frobenius_diff(real, syn), Direction::LowerBetter);
  result.plots["real"] = matrix_json(real);
  result.plots["synthetic"] = matrix_json(syn);
  result.plots["difference"] = matrix_json(matrix_difference(real, syn));
  return result;
}

MetricResult ks_test(const EvalContext& ctx, const KsTestOptions& opts) {
  const std::string key = "ks_test";
  if (opts.n_perms == 0) throw DataError("ks_test: n_perms must be >= 1");
  const std::uint64_t seed = metric_seed(ctx.seed, key);
  MetricResult result(key, Category::Utility);
  std::vector<double> stats, pvals, ks_stats, tvd_stats;
  std::vector<std::string> significant;
  Json per_column = Json::array();
  for (std::size_t j = 0; j < ctx.real().n_cols(); ++j) {
    const auto& col = ctx.real().column(j);
    double stat, p;
    if (col.is_numerical()) {
      const auto ks = ks_statistic(col.numbers(), ctx.synthetic().column(j).numbers());
      stat = ks.statistic;
      p = ks.p_value;
      ks_stats.push_back(stat);
    } else {
      auto r = ctx.real_encoded().column(j);
      auto s = ctx.synthetic_encoded().column(j);
      // Codes ranked by label and sorted, so the permutation stream does not
      // depend on row order.
      const auto& labels = ctx.spec().entries[j].levels;
      std::vector<double> rank(labels.size());
      for (std::size_t a = 0; a < labels.size(); ++a) {
        rank[a] = static_cast<double>(std::count_if(labels.begin(), labels.end(),
                                                    [&](const std::string& l) { return l < labels[a]; }));
      }
      for (auto& v : r) v = rank[static_cast<std::size_t>(v)];
      for (auto& v : s) v = rank[static_cast<std::size_t>(v)];
      std::sort(r.begin(), r.end());
      std::sort(s.begin(), s.end());
      const std::size_t levels = ctx.real_encoded().n_levels[j];
      const TwoSampleStatistic statistic = [levels](std::span<const double> a, std::span<const double> b) {
        return categorical_tvd(a, b, levels);
      };
      stat = statistic(r, s);
      p = permutation_pvalue(r, s, statistic, opts.n_perms, derive_seed(seed, col.name()));
      tvd_stats.push_back(stat);
    }
    stats.push_back(stat);
    pvals.push_back(p);
    const bool sig = p < opts.sig_lvl;
    if (sig) significant.push_back(col.name());
    Json c;
    c["name"] = col.name();
    c["test"] = col.is_numerical() ? "ks" : "tvd";
    c["statistic"] = stat;
    c["p_value"] = p;
    c["significant"] = sig;
    per_column.push_back(std::move(c));
  }
  result.add("avg_stat", mean(stats), Direction::LowerBetter, std_error(stats));
  if (!ks_stats.empty()) result.add("avg_ks_stat", mean(ks_stats), Direction::Unranked, std_error(ks_stats));
  if (!tvd_stats.empty()) result.add("avg_tvd_stat", mean(tvd_stats), Direction::Unranked, std_error(tvd_stats));
  result.add("avg_pval", mean(pvals), Direction::Unranked, std_error(pvals));
  result.add("num_sig", static_cast<double>(significant.size()), Direction::LowerBetter);
  result.add("frac_sig", static_cast<double>(significant.size()) / static_cast<double>(stats.size()),
             Direction::LowerBetter);
  result.plots["columns"] = std::move(per_column);
  result.plots["significant_columns"] = significant;
  return result;
}

MetricResult h_dist(const EvalContext& ctx) {
  const std::string key = "h_dist";
  MetricResult result(key, Category::Utility);
  std::vector<double> dists;
  Json per_column = Json::array();
  for (std::size_t j = 0; j < ctx.real().n_cols(); ++j) {
    const auto& col = ctx.real().column(j);
    double h;
    if (col.is_numerical()) {
      const auto& r = col.numbers();
      const auto& s = ctx.synthetic().column(j).numbers();
      std::vector<double> pooled(r.begin(), r.end());
      pooled.insert(pooled.end(), s.begin(), s.end());
      if (pooled.size() < 2) return MetricResult::make_disabled(key, Category::Utility, "fewer than two values");
      const auto edges = scott_bins(pooled);
      const std::size_t bins = edges.size() - 1;
      h = hellinger(level_frequencies(bin_codes(r, edges), bins), level_frequencies(bin_codes(s, edges), bins));
    } else {
      const std::size_t levels = ctx.real_encoded().n_levels[j];
      h = hellinger(level_frequencies(ctx.real_encoded().column(j), levels),
                    level_frequencies(ctx.synthetic_encoded().column(j), levels));
    }
    dists.push_back(h);
    Json c;
    c["name"] = col.name();
    c["hellinger"] = h;
    per_column.push_back(std::move(c));
  }
  result.add("avg", mean(dists), Direction::LowerBetter, std_error(dists));
  result.plots["columns"] = std::move(per_column);
  return result;
}

double pmse_score(std::span<const double> propensities, double base_rate) {
  if (propensities.empty()) throw DataError("pmse_score: no propensities");
  double s = 0.0;
  for (double p : propensities) s += (p - base_rate) * (p - base_rate);
  return s / static_cast<double>(propensities.size());
}

MetricResult p_mse(const EvalContext& ctx, const PmseOptions& opts) {
  const std::string key = "p_mse";
  const std::uint64_t seed = metric_seed(ctx.seed, key);
  const Table* tables[] = {&ctx.real(), &ctx.synthetic()};
  const auto pooled = NormalizationSpec::fit_pooled(tables);
  const CanonicalLayout layout(pooled);
  const auto real = layout.apply(normalize(ctx.real(), pooled));
  const auto syn = layout.apply(normalize(ctx.synthetic(), pooled));
  const std::size_t n = real.rows + syn.rows;
  if (opts.k_folds < 2 || opts.k_folds > std::min(real.rows, syn.rows)) {
    return MetricResult::make_disabled(key, Category::Utility, "too few rows for the requested folds");
  }
  FeatureMatrix x{n, real.cols, real.values};
  x.values.insert(x.values.end(), syn.values.begin(), syn.values.end());
  std::vector<double> labels(real.rows, 0.0);
  labels.resize(n, 1.0);
  const double base_rate = static_cast<double>(syn.rows) / static_cast<double>(n);
  const auto plan = kfold(n, opts.k_folds, labels, seed);
  std::vector<double> pmses(plan.k), accs(plan.k);
  parallel_for(
      plan.k,
      [&](std::size_t f) {
        const auto& fold = plan.folds[f];
        std::vector<double> y_train;
        for (auto i : fold.train) y_train.push_back(labels[i]);
        auto spec = ModelSpec::of(ModelKind::LogReg, derive_seed(seed, f));
        spec.max_iter = opts.max_iter;
        const auto model = fit(spec, x.take_rows(fold.train), y_train);
        const auto test = x.take_rows(fold.test);
        const auto proba = model.predict_proba(test);
        std::vector<double> p(fold.test.size());
        double correct = 0.0;
        for (std::size_t a = 0; a < fold.test.size(); ++a) {
          p[a] = proba[a][1];
          const double predicted = p[a] > 0.5 ? 1.0 : 0.0;
          if (predicted == labels[fold.test[a]]) correct += 1.0;
        }
        pmses[f] = pmse_score(p, base_rate);
        accs[f] = correct / static_cast<double>(fold.test.size());
      },
      1);
  MetricResult result(key, Category::Utility);
  result.add("pmse", mean(pmses), Direction::LowerBetter, std_error(pmses));
  result.add("acc", mean(accs), Direction::LowerBetter, std_error(accs));
  return result;
}

double adversarial_accuracy(const EncodedTable& a, const EncodedTable& b, DistanceKind kind) {
  if (a.rows < 2 || b.rows < 2) throw DataError("adversarial accuracy needs two rows per table");
  const DistanceIndex index_a(a, kind);
  const DistanceIndex index_b(b, kind);
  const auto d_ab = index_b.query(a, 1).distances();
  const auto d_aa = index_a.query(a, 1, true).distances();
  const auto d_ba = index_a.query(b, 1).distances();
  const auto d_bb = index_b.query(b, 1, true).distances();
  double left = 0.0, right = 0.0;
  for (std::size_t i = 0; i < a.rows; ++i) left += d_ab[i] > d_aa[i] ? 1.0 : 0.0;
  for (std::size_t j = 0; j < b.rows; ++j) right += d_ba[j] > d_bb[j] ? 1.0 : 0.0;
  return 0.5 * (left / static_cast<double>(a.rows) + right / static_cast<double>(b.rows));
}

namespace internal {

std::pair<double, std::optional<double>> resampled_nnaa(const EncodedTable& reference,
                                                        const EncodedTable& synthetic,
                                                        DistanceKind kind, std::size_t n_resample,
                                                        std::uint64_t seed) {
  if (synthetic.rows <= 2 * reference.rows || n_resample == 0) {
    return {adversarial_accuracy(reference, synthetic, kind), std::nullopt};
  }
  const auto canonical = canonical_rows(synthetic);
  std::vector<double> values(n_resample);
  for (std::size_t r = 0; r < n_resample; ++r) {
    Rng rng(derive_seed(seed, r));
    values[r] = adversarial_accuracy(reference, sample_rows(canonical, reference.rows, rng), kind);
  }
  return {mean(values), std_error(values)};
}

}  // namespace internal

MetricResult nnaa(const EvalContext& ctx, const NnaaOptions& opts) {
  const std::string key = "nnaa";
  if (ctx.real().n_rows() < 2 || ctx.synthetic().n_rows() < 2) {
    return MetricResult::make_disabled(key, Category::Utility, "fewer than two rows");
  }
  const CanonicalLayout layout(ctx.spec());
  const auto [value, err] = resampled_nnaa(layout.apply(ctx.real_encoded()), layout.apply(ctx.synthetic_encoded()), ctx.distance,
                                           opts.n_resample, metric_seed(ctx.seed, key));
  MetricResult result(key, Category::Utility);
  result.add("avg", value, Direction::LowerBetter, err);
  return result;
}

MetricResult auroc_diff(const EvalContext& ctx, const AurocDiffOptions& opts) {
  const std::string key = "auroc_diff";
  if (opts.model != "log_reg") throw DataError("auroc_diff: unsupported model '" + opts.model + "'");
  if (!ctx.target()) return MetricResult::make_disabled(key, Category::Utility, "no target column");
  if (!ctx.has_holdout()) return MetricResult::make_disabled(key, Category::Utility, "no holdout data");
  const std::size_t t = *ctx.real().index_of(*ctx.target());
  if (ctx.real_encoded().n_levels[t] != 2) {
    return MetricResult::make_disabled(key, Category::Utility, "target is not binary");
  }
  const std::uint64_t seed = metric_seed(ctx.seed, key);
  const CanonicalLayout layout(ctx.spec());
  const std::size_t tc = layout.position(t);
  const auto [x_real, y_real] = split_target(layout.apply(ctx.real_encoded()), tc);
  const auto [x_syn, y_syn] = split_target(layout.apply(ctx.synthetic_encoded()), tc);
  const auto [x_hold, y_hold] = split_target(layout.apply(*ctx.holdout_encoded(), false), tc);
  auto single_class = [](const std::vector<double>& y) {
    return std::adjacent_find(y.begin(), y.end(), std::not_equal_to<>()) == y.end();
  };
  if (single_class(y_real) || single_class(y_syn)) {
    return MetricResult::make_disabled(key, Category::Utility, "training target holds a single class");
  }
  if (single_class(y_hold)) return MetricResult::make_disabled(key, Category::Utility, "holdout target holds a single class");
  std::vector<bool> positive(y_hold.size());
  for (std::size_t i = 0; i < y_hold.size(); ++i) positive[i] = y_hold[i] == 1.0;
  auto evaluate = [&](const FeatureMatrix& x, const std::vector<double>& y, std::uint64_t s) {
    const auto model = fit(ModelSpec::of(ModelKind::LogReg, s), x, y);
    const auto proba = model.predict_proba(x_hold);
    std::vector<double> score(proba.size());
    for (std::size_t i = 0; i < proba.size(); ++i) score[i] = proba[i][1];
    return score;
  };
  const auto score_real = evaluate(x_real, y_real, derive_seed(seed, "real"));
  const auto score_syn = evaluate(x_syn, y_syn, derive_seed(seed, "synthetic"));
  const double a_real = auroc(positive, score_real);
  const double a_syn = auroc(positive, score_syn);
  MetricResult result(key, Category::Utility);
  result.add("diff", std::abs(a_real - a_syn), Direction::LowerBetter);
  result.add("auroc_real", a_real, Direction::Unranked);
  result.add("auroc_synthetic", a_syn, Direction::Unranked);
  auto curve = [](const std::vector<RocPoint>& pts) {
    Json arr = Json::array();
    for (const auto& p : pts) arr.push_back({p.fpr, p.tpr});
    return arr;
  };
  result.plots["roc_real"] = curve(roc_curve(positive, score_real));
  result.plots["roc_synthetic"] = curve(roc_curve(positive, score_syn));
  return result;
}

MetricResult cls_acc(const EvalContext& ctx, const ClsAccOptions& opts) {
  const std::string key = "cls_acc";
  if (opts.f1_type != "micro" && opts.f1_type != "macro") {
    throw DataError("cls_acc: F1_type must be 'micro' or 'macro'");
  }
  if (!ctx.target()) return MetricResult::make_disabled(key, Category::Utility, "no target column");
  const std::size_t t = *ctx.real().index_of(*ctx.target());
  const std::uint64_t seed = metric_seed(ctx.seed, key);
  const CanonicalLayout layout(ctx.spec());
  const std::size_t tc = layout.position(t);
  const auto [x_real, y_real] = split_target(layout.apply(ctx.real_encoded()), tc);
  const auto [x_syn, y_syn] = split_target(layout.apply(ctx.synthetic_encoded()), tc);
  if (opts.k_folds < 2 || opts.k_folds > std::min(x_real.rows, x_syn.rows)) {
    return MetricResult::make_disabled(key, Category::Utility, "too few rows for the requested folds");
  }
  if (std::adjacent_find(y_real.begin(), y_real.end(), std::not_equal_to<>()) == y_real.end()) {
    return MetricResult::make_disabled(key, Category::Utility, "real target holds a single class");
  }
  const bool macro = opts.f1_type == "macro";
  auto f1 = [macro](std::span<const double> truth, std::span<const double> pred) {
    const auto s = scores(truth, pred);
    return macro ? s.f1_macro : s.f1_micro;
  };
  const auto real_plan = kfold(x_real.rows, opts.k_folds, y_real, derive_seed(seed, "folds"));
  const auto syn_plan = kfold(x_syn.rows, opts.k_folds, y_syn, derive_seed(seed, "folds"));

  struct Family {
    const char* name;
    ModelKind kind;
  };
  const Family families[] = {{"decision_tree", ModelKind::DecisionTree},
                             {"adaboost", ModelKind::AdaBoost},
                             {"random_forest", ModelKind::RandomForestClf},
                             {"logistic_regression", ModelKind::LogReg}};
  constexpr std::size_t n_families = 4;
  std::vector<double> train_real(n_families), train_syn(n_families), test_real(n_families), test_syn(n_families);
  const bool with_test = ctx.has_holdout();
  FeatureMatrix x_hold;
  std::vector<double> y_hold;
  if (with_test) std::tie(x_hold, y_hold) = split_target(layout.apply(*ctx.holdout_encoded(), false), tc);

  parallel_for(
      n_families,
      [&](std::size_t c) {
        const auto spec_seed = derive_seed(seed, families[c].name);
        std::vector<double> fr, fs;
        for (std::size_t f = 0; f < opts.k_folds; ++f) {
          const auto spec = ModelSpec::of(families[c].kind, derive_seed(spec_seed, f));
          const auto& rf = real_plan.folds[f];
          const auto& sf = syn_plan.folds[f];
          std::vector<double> yr, ys, truth;
          for (auto i : rf.train) yr.push_back(y_real[i]);
          for (auto i : sf.train) ys.push_back(y_syn[i]);
          for (auto i : rf.test) truth.push_back(y_real[i]);
          const auto test = x_real.take_rows(rf.test);
          const LabelPredictor real_model(spec, x_real.take_rows(rf.train), yr);
          const LabelPredictor syn_model(spec, x_syn.take_rows(sf.train), ys);
          fr.push_back(f1(truth, real_model.predict(test)));
          fs.push_back(f1(truth, syn_model.predict(test)));
        }
        train_real[c] = mean(fr);
        train_syn[c] = mean(fs);
        if (with_test) {
          const auto spec = ModelSpec::of(families[c].kind, derive_seed(spec_seed, "holdout"));
          const LabelPredictor real_model(spec, x_real, y_real);
          const LabelPredictor syn_model(spec, x_syn, y_syn);
          test_real[c] = f1(y_hold, real_model.predict(x_hold));
          test_syn[c] = f1(y_hold, syn_model.predict(x_hold));
        }
      },
      1);

  MetricResult result(key, Category::Utility);
  std::vector<double> train_diff(n_families), test_diff(n_families);
  Json per_model = Json::array();
  for (std::size_t c = 0; c < n_families; ++c) {
    train_diff[c] = std::abs(train_real[c] - train_syn[c]);
    test_diff[c] = std::abs(test_real[c] - test_syn[c]);
    Json m;
    m["model"] = families[c].name;
    m["train_real_f1"] = train_real[c];
    m["train_synthetic_f1"] = train_syn[c];
    if (with_test) {
      m["test_real_f1"] = test_real[c];
      m["test_synthetic_f1"] = test_syn[c];
    }
    per_model.push_back(std::move(m));
  }
  result.add("diff_train", mean(train_diff), Direction::LowerBetter, std_error(train_diff));
  if (with_test) {
    result.add("diff_test", mean(test_diff), Direction::LowerBetter, std_error(test_diff));
  } else {
    result.notes.push_back("no holdout data: test variant omitted");
  }
  result.plots["models"] = std::move(per_model);
  return result;
}

}  // namespace tabeval
