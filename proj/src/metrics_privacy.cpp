#include <algorithm>
#include <cmath>

#include "metric_common.hpp"
#include "tabeval/distance.hpp"
#include "tabeval/metrics.hpp"

namespace tabeval {

using namespace internal;

namespace {

// Real and holdout subsampled to a common size so train and holdout
// statistics see the same amount of reference data.
std::pair<EncodedTable, EncodedTable> equalize(const EvalContext& ctx, std::uint64_t seed) {
  const CanonicalLayout layout(ctx.spec());
  const auto real = layout.apply(ctx.real_encoded());
  const auto holdout = layout.apply(*ctx.holdout_encoded());
  const std::size_t n = std::min(real.rows, holdout.rows);
  Rng rng(seed);
  auto a = sample_rows(real, n, rng);
  auto b = sample_rows(holdout, n, rng);
  return {std::move(a), std::move(b)};
}

struct RatioSummary {
  double mean = 0.0;
  std::optional<double> error;
  std::size_t excluded = 0;
};

// Mean nearest / next-nearest distance ratio of query rows against the
// reference; rows whose second distance is zero are skipped.
RatioSummary nn_ratio(const EncodedTable& query, const EncodedTable& reference, DistanceKind kind) {
  const DistanceIndex index(reference, kind);
  const auto nn = index.query(query, 2);
  std::vector<double> ratios;
  RatioSummary out;
  for (std::size_t i = 0; i < nn.size(); ++i) {
    const double d2 = nn[i][1].distance;
    if (d2 <= 0.0) {
      ++out.excluded;
      continue;
    }
    ratios.push_back(nn[i][0].distance / d2);
  }
  if (ratios.empty()) throw DataError("every synthetic row has two real neighbours at distance zero");
  out.mean = mean(ratios);
  out.error = std_error(ratios);
  return out;
}

}  // namespace

MetricResult nndr(const EvalContext& ctx) {
  const std::string key = "nndr";
  if (ctx.real().n_rows() < 2) return MetricResult::make_disabled(key, Category::Privacy, "fewer than two real rows");
  MetricResult result(key, Category::Privacy);
  const auto train = nn_ratio(ctx.synthetic_encoded(), ctx.real_encoded(), ctx.distance);
  result.add("avg", train.mean, Direction::HigherBetter, train.error);
  if (train.excluded > 0) {
    result.notes.push_back(std::to_string(train.excluded) + " rows with zero next-nearest distance excluded");
  }
  if (ctx.has_holdout() && ctx.holdout()->n_rows() >= 2) {
    const auto [real, hold] = equalize(ctx, metric_seed(ctx.seed, key));
    const auto syn = CanonicalLayout(ctx.spec()).apply(ctx.synthetic_encoded());
    const double on_train = nn_ratio(syn, real, ctx.distance).mean;
    const double on_hold = nn_ratio(syn, hold, ctx.distance).mean;
    result.add("privacy_loss", std::max(0.0, on_hold - on_train), Direction::LowerBetter);
  }
  return result;
}

MetricResult nnaa_privacy_loss(const EvalContext& ctx, const NnaaOptions& opts) {
  const std::string key = "nnaa_privacy_loss";
  if (!ctx.has_holdout()) return MetricResult::make_disabled(key, Category::Privacy, "no holdout data");
  if (std::min(ctx.real().n_rows(), ctx.holdout()->n_rows()) < 2 || ctx.synthetic().n_rows() < 2) {
    return MetricResult::make_disabled(key, Category::Privacy, "fewer than two rows");
  }
  const std::uint64_t seed = metric_seed(ctx.seed, key);
  const auto [real, hold] = equalize(ctx, derive_seed(seed, "equalize"));
  const auto syn = CanonicalLayout(ctx.spec()).apply(ctx.synthetic_encoded());
  const double on_train = resampled_nnaa(real, syn, ctx.distance, opts.n_resample, derive_seed(seed, "train")).first;
  const double on_hold = resampled_nnaa(hold, syn, ctx.distance, opts.n_resample, derive_seed(seed, "holdout")).first;
  MetricResult result(key, Category::Privacy);
  result.add("privacy_loss", std::max(0.0, on_hold - on_train), Direction::LowerBetter);
  result.add("nnaa_train", on_train, Direction::Unranked);
  result.add("nnaa_holdout", on_hold, Direction::Unranked);
  return result;
}

MetricResult dcr(const EvalContext& ctx) {
  const std::string key = "dcr";
  if (ctx.real().n_rows() < 2) return MetricResult::make_disabled(key, Category::Privacy, "fewer than two real rows");
  const DistanceIndex index(ctx.real_encoded(), ctx.distance);
  const double numerator = median(index.query(ctx.synthetic_encoded(), 1).distances());
  const double denominator = median(index.query(ctx.real_encoded(), 1, true).distances());
  if (denominator <= 0.0) {
    throw DataError("dcr: median real-to-real nearest distance is zero (more than half the real rows are duplicated)");
  }
  MetricResult result(key, Category::Privacy);
  result.add("median_ratio", numerator / denominator, Direction::HigherBetter);
  result.add("median_synthetic_to_real", numerator, Direction::Unranked);
  result.add("median_real_to_real", denominator, Direction::Unranked);
  return result;
}

MetricResult hit_rate(const EvalContext& ctx, const HitRateOptions& opts) {
  const std::string key = "hit_rate";
  if (!(opts.thres_percent > 0.0 && opts.thres_percent < 1.0)) {
    throw DataError("hit_rate: thres_percent must lie in (0, 1)");
  }
  const Table& real = ctx.real();
  const Table& syn = ctx.synthetic();
  const std::size_t p = real.n_cols();
  std::vector<double> tolerance(p, 0.0);
  for (std::size_t j = 0; j < p; ++j) {
    if (!real.column(j).is_numerical()) continue;
    const double range = ctx.spec().entries[j].range();
    tolerance[j] = opts.thres_percent * range;
    // Absorbs rounding so a gap of exactly tau * range counts as a hit.
    tolerance[j] += 1e-12 * std::max(1.0, std::abs(range));
  }
  const EncodedTable& re = ctx.real_encoded();
  const EncodedTable& se = ctx.synthetic_encoded();
  std::vector<char> hit(real.n_rows(), 0);
  parallel_for(real.n_rows(), [&](std::size_t i) {
    for (std::size_t s = 0; s < syn.n_rows() && !hit[i]; ++s) {
      bool match = true;
      for (std::size_t j = 0; j < p && match; ++j) {
        if (real.column(j).is_numerical()) {
          match = std::abs(real.column(j).numbers()[i] - syn.column(j).numbers()[s]) <= tolerance[j];
        } else {
          match = re.at(i, j) == se.at(s, j);
        }
      }
      hit[i] = match ? 1 : 0;
    }
  });
  double hits = 0.0;
  for (char h : hit) hits += h;
  MetricResult result(key, Category::Privacy);
  result.add("rate", real.n_rows() > 0 ? hits / static_cast<double>(real.n_rows()) : 0.0, Direction::LowerBetter);
  return result;
}

std::vector<double> inverse_entropy_weights(const Table& real) {
  const auto spec = NormalizationSpec::fit(real);
  const auto encoded = normalize(real, spec);
  const std::size_t p = real.n_cols();
  std::vector<double> weights(p, 0.0);
  double total = 0.0;
  for (std::size_t j = 0; j < p; ++j) {
    std::vector<double> codes;
    if (real.column(j).is_numerical()) {
      const auto& values = real.column(j).numbers();
      codes = values.size() < 2 ? std::vector<double>(values.size(), 0.0) : bin_codes(values, scott_bins(values));
    } else {
      codes = encoded.column(j);
    }
    const double h = entropy(codes);
    weights[j] = h > 0.0 ? 1.0 / h : 0.0;
    total += weights[j];
  }
  if (total <= 0.0) return std::vector<double>(p, 1.0);
  for (auto& w : weights) w *= static_cast<double>(p) / total;
  return weights;
}

MetricResult eps_risk(const EvalContext& ctx) {
  const std::string key = "eps_risk";
  if (ctx.real().n_rows() < 2) return MetricResult::make_disabled(key, Category::Privacy, "fewer than two real rows");
  const auto weights = inverse_entropy_weights(ctx.real());
  const DistanceIndex real_index(ctx.real_encoded(), ctx.distance, weights);
  const DistanceIndex syn_index(ctx.synthetic_encoded(), ctx.distance, weights);
  const auto d_real = real_index.query(ctx.real_encoded(), 1, true).distances();
  const auto d_syn = syn_index.query(ctx.real_encoded(), 1).distances();
  double closer = 0.0;
  for (std::size_t i = 0; i < d_real.size(); ++i) closer += d_syn[i] < d_real[i] ? 1.0 : 0.0;
  MetricResult result(key, Category::Privacy);
  result.add("risk", closer / static_cast<double>(d_real.size()), Direction::LowerBetter);
  Json w = Json::object();
  for (std::size_t j = 0; j < weights.size(); ++j) w[ctx.real().column(j).name()] = weights[j];
  result.plots["weights"] = std::move(w);
  return result;
}

MetricResult mia_risk(const EvalContext& ctx, const MiaOptions& opts) {
  const std::string key = "mia_risk";
  if (!ctx.has_holdout()) return MetricResult::make_disabled(key, Category::Privacy, "no holdout data");
  if (opts.num_eval_iter == 0) throw DataError("mia_risk: num_eval_iter must be >= 1");
  const CanonicalLayout layout(ctx.spec());
  const auto hold = layout.apply(*ctx.holdout_encoded());
  const auto real = layout.apply(ctx.real_encoded());
  const auto syn = layout.apply(ctx.synthetic_encoded());
  const std::size_t half = hold.rows / 2;
  if (half < 1 || real.rows < 1 || syn.rows < 1) {
    return MetricResult::make_disabled(key, Category::Privacy, "holdout needs at least two rows");
  }
  const std::uint64_t seed = metric_seed(ctx.seed, key);
  std::vector<double> f1s(opts.num_eval_iter), precisions(opts.num_eval_iter), recalls(opts.num_eval_iter);
  parallel_for(
      opts.num_eval_iter,
      [&](std::size_t it) {
        Rng rng(derive_seed(seed, it));
        auto hold_ids = iota_ids(hold.rows);
        shuffle(hold_ids, rng);
        // Half of the holdout trains the attacker, the other half is only
        // ever seen at evaluation time.
        std::vector<std::size_t> train_out(hold_ids.begin(), hold_ids.begin() + static_cast<std::ptrdiff_t>(half));
        std::vector<std::size_t> eval_out(hold_ids.begin() + static_cast<std::ptrdiff_t>(half), hold_ids.end());
        const auto in_rows = sample_rows(syn, std::min(half, syn.rows), rng);
        const auto out_rows = hold.take_rows(train_out);
        FeatureMatrix x = FeatureMatrix::from(in_rows);
        const auto x_out = FeatureMatrix::from(out_rows);
        x.values.insert(x.values.end(), x_out.values.begin(), x_out.values.end());
        x.rows += x_out.rows;
        std::vector<double> y(in_rows.rows, 1.0);
        y.resize(x.rows, 0.0);
        const LabelPredictor attacker(ModelSpec::of(ModelKind::RandomForestClf, derive_seed(seed, it + 1000)), x, y);

        const auto members = sample_rows(real, std::min(eval_out.size(), real.rows), rng);
        FeatureMatrix ex = FeatureMatrix::from(members);
        const auto ex_out = FeatureMatrix::from(hold.take_rows(eval_out));
        ex.values.insert(ex.values.end(), ex_out.values.begin(), ex_out.values.end());
        ex.rows += ex_out.rows;
        std::vector<double> truth(members.rows, 1.0);
        truth.resize(ex.rows, 0.0);
        const auto pred = attacker.predict(ex);
        double tp = 0.0, fp = 0.0, fn = 0.0;
        for (std::size_t i = 0; i < truth.size(); ++i) {
          if (pred[i] == 1.0 && truth[i] == 1.0) tp += 1.0;
          if (pred[i] == 1.0 && truth[i] == 0.0) fp += 1.0;
          if (pred[i] == 0.0 && truth[i] == 1.0) fn += 1.0;
        }
        precisions[it] = tp + fp > 0.0 ? tp / (tp + fp) : 0.0;
        recalls[it] = tp + fn > 0.0 ? tp / (tp + fn) : 0.0;
        f1s[it] = scores(truth, pred).f1_macro;
      },
      1);
  MetricResult result(key, Category::Privacy);
  result.add("f1_macro", mean(f1s), Direction::LowerBetter, std_error(f1s));
  result.add("precision", mean(precisions), Direction::LowerBetter, std_error(precisions));
  result.add("recall", mean(recalls), Direction::LowerBetter, std_error(recalls));
  return result;
}

MetricResult att_discl(const EvalContext& ctx, const AttDisclOptions& opts) {
  const std::string key = "att_discl";
  if (!(opts.tau > 0.0 && opts.tau < 1.0)) throw DataError("att_discl: tau must lie in (0, 1)");
  const std::size_t p = ctx.real().n_cols();
  if (p < 2) return MetricResult::make_disabled(key, Category::Privacy, "fewer than two columns");
  if (ctx.synthetic().n_rows() < 1 || ctx.real().n_rows() < 1) {
    return MetricResult::make_disabled(key, Category::Privacy, "empty table");
  }
  const std::uint64_t seed = metric_seed(ctx.seed, key);
  const CanonicalLayout layout(ctx.spec());
  const auto syn = layout.apply(ctx.synthetic_encoded());
  const auto real = layout.apply(ctx.real_encoded(), false);
  std::vector<double> f1s(p), precisions(p), recalls(p);
  parallel_for(
      p,
      [&](std::size_t t) {
        const std::size_t tc = layout.position(t);
        const auto [x_syn, y_syn] = split_target(syn, tc);
        const auto [x_real, y_real] = split_target(real, tc);
        const auto column_seed = derive_seed(seed, ctx.real().column(t).name());
        if (real.kinds[tc] == ColumnKind::Categorical) {
          const LabelPredictor model(ModelSpec::of(ModelKind::RandomForestClf, column_seed), x_syn, y_syn);
          const auto s = scores(y_real, model.predict(x_real));
          f1s[t] = s.f1_macro;
          precisions[t] = s.precision_macro;
          recalls[t] = s.recall_macro;
        } else {
          const auto model = fit(ModelSpec::of(ModelKind::RandomForestReg, column_seed), x_syn, y_syn);
          const auto pred = model.predict(x_real);
          double hits = 0.0;
          for (std::size_t i = 0; i < pred.size(); ++i) {
            hits += std::abs(pred[i] - y_real[i]) <= opts.tau + 1e-12 ? 1.0 : 0.0;
          }
          const double rate = hits / static_cast<double>(pred.size());
          f1s[t] = precisions[t] = recalls[t] = rate;
        }
      },
      1);
  MetricResult result(key, Category::Privacy);
  result.add("f1_macro", mean(f1s), Direction::LowerBetter, std_error(f1s));
  result.add("precision", mean(precisions), Direction::LowerBetter, std_error(precisions));
  result.add("recall", mean(recalls), Direction::LowerBetter, std_error(recalls));
  Json per_column = Json::array();
  for (std::size_t t = 0; t < p; ++t) {
    Json c;
    c["name"] = ctx.real().column(t).name();
    c["f1"] = f1s[t];
    per_column.push_back(std::move(c));
  }
  result.plots["columns"] = std::move(per_column);
  return result;
}

}  // namespace tabeval
