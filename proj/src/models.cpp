#include "tabeval/models.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tabeval/util.hpp"

namespace tabeval {

FeatureMatrix FeatureMatrix::from(const EncodedTable& table) {
  return FeatureMatrix{table.rows, table.cols, table.values};
}

FeatureMatrix FeatureMatrix::take_rows(std::span<const std::size_t> ids) const {
  FeatureMatrix out{ids.size(), cols, {}};
  out.values.reserve(ids.size() * cols);
  for (auto i : ids) {
    auto r = row(i);
    out.values.insert(out.values.end(), r.begin(), r.end());
  }
  return out;
}

std::pair<FeatureMatrix, std::vector<double>> split_target(const EncodedTable& table,
                                                           std::size_t target) {
  if (target >= table.cols) throw DataError("target column index out of range");
  return {FeatureMatrix::from(table.drop_column(target)), table.column(target)};
}

bool is_classifier(ModelKind kind) { return kind != ModelKind::RandomForestReg; }

namespace detail {

struct ModelImpl {
  virtual ~ModelImpl() = default;
  std::vector<double> classes;

  virtual std::vector<double> proba(std::span<const double>) const {
    throw DataError("model is not a classifier");
  }
  virtual double value(std::span<const double>) const { throw DataError("model is not a regressor"); }
};

}  // namespace detail

namespace {

// ---------------------------------------------------------------------------
// CART

struct TreeParams {
  std::size_t max_depth = 8;
  std::size_t min_leaf = 2;
  std::size_t max_features = 0;  // 0 = all
  bool classification = true;
  std::size_t n_classes = 0;
};

struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  std::vector<double> value;  // class distribution, or {mean}
};

class Tree {
 public:
  // `targets` are class indices for classification.
  void build(const FeatureMatrix& x, std::span<const double> targets,
             std::span<const double> weights, const TreeParams& params, Rng& rng) {
    x_ = &x;
    y_ = targets;
    w_ = weights;
    params_ = params;
    rng_ = &rng;
    nodes_.clear();
    std::vector<std::size_t> ids;
    for (std::size_t i = 0; i < x.rows; ++i) {
      if (weights[i] > 0.0) ids.push_back(i);
    }
    grow(ids, 0);
    x_ = nullptr;
    rng_ = nullptr;
  }

  const std::vector<double>& leaf(std::span<const double> row) const {
    std::size_t n = 0;
    while (nodes_[n].feature >= 0) {
      const auto& node = nodes_[n];
      n = static_cast<std::size_t>(row[static_cast<std::size_t>(node.feature)] <= node.threshold
                                       ? node.left
                                       : node.right);
    }
    return nodes_[n].value;
  }

 private:
  struct Split {
    int feature = -1;
    double threshold = 0.0;
    double impurity = 0.0;
  };

  std::vector<double> node_value(const std::vector<std::size_t>& ids) const {
    if (params_.classification) {
      std::vector<double> dist(params_.n_classes, 0.0);
      double total = 0.0;
      for (auto i : ids) {
        dist[static_cast<std::size_t>(y_[i])] += w_[i];
        total += w_[i];
      }
      for (double& d : dist) d /= total;
      return dist;
    }
    double sw = 0.0, swy = 0.0;
    for (auto i : ids) {
      sw += w_[i];
      swy += w_[i] * y_[i];
    }
    return {swy / sw};
  }

  double impurity(const std::vector<std::size_t>& ids) const {
    if (params_.classification) {
      std::vector<double> counts(params_.n_classes, 0.0);
      double total = 0.0;
      for (auto i : ids) {
        counts[static_cast<std::size_t>(y_[i])] += w_[i];
        total += w_[i];
      }
      double g = total;
      for (double c : counts) g -= c * c / total;
      return g;
    }
    double sw = 0.0, swy = 0.0, swyy = 0.0;
    for (auto i : ids) {
      sw += w_[i];
      swy += w_[i] * y_[i];
      swyy += w_[i] * y_[i] * y_[i];
    }
    return std::max(0.0, swyy - swy * swy / sw);
  }

  Split best_split(const std::vector<std::size_t>& ids, double parent) {
    const std::size_t p = x_->cols;
    std::vector<std::size_t> features;
    if (params_.max_features == 0 || params_.max_features >= p) {
      features = iota_ids(p);
    } else {
      features = sample_without_replacement(p, params_.max_features, *rng_);
      std::sort(features.begin(), features.end());
    }
    Split best;
    best.impurity = parent;
    const double min_gain = 1e-12 * std::max(1.0, parent);
    std::vector<std::pair<double, std::size_t>> order(ids.size());
    const std::size_t m = ids.size();
    const std::size_t k = params_.n_classes;
    std::vector<double> left(k), total(k);
    for (auto f : features) {
      for (std::size_t a = 0; a < m; ++a) order[a] = {x_->at(ids[a], f), ids[a]};
      std::sort(order.begin(), order.end());
      if (order.front().first == order.back().first) continue;
      if (params_.classification) {
        std::fill(total.begin(), total.end(), 0.0);
        std::fill(left.begin(), left.end(), 0.0);
        double wt = 0.0;
        for (auto& [v, i] : order) {
          total[static_cast<std::size_t>(y_[i])] += w_[i];
          wt += w_[i];
        }
        double wl = 0.0;
        for (std::size_t a = 0; a + 1 < m; ++a) {
          const auto i = order[a].second;
          left[static_cast<std::size_t>(y_[i])] += w_[i];
          wl += w_[i];
          if (order[a].first == order[a + 1].first) continue;
          if (a + 1 < params_.min_leaf || m - a - 1 < params_.min_leaf) continue;
          const double wr = wt - wl;
          if (wl <= 0.0 || wr <= 0.0) continue;
          double sl = 0.0, sr = 0.0;
          for (std::size_t c = 0; c < k; ++c) {
            sl += left[c] * left[c];
            const double rc = total[c] - left[c];
            sr += rc * rc;
          }
          const double imp = (wl - sl / wl) + (wr - sr / wr);
          if (imp < best.impurity - min_gain) {
            best = {static_cast<int>(f), midpoint(order[a].first, order[a + 1].first), imp};
          }
        }
      } else {
        double sw = 0.0, swy = 0.0, swyy = 0.0;
        for (auto& [v, i] : order) {
          sw += w_[i];
          swy += w_[i] * y_[i];
          swyy += w_[i] * y_[i] * y_[i];
        }
        double lw = 0.0, lwy = 0.0, lwyy = 0.0;
        for (std::size_t a = 0; a + 1 < m; ++a) {
          const auto i = order[a].second;
          lw += w_[i];
          lwy += w_[i] * y_[i];
          lwyy += w_[i] * y_[i] * y_[i];
          if (order[a].first == order[a + 1].first) continue;
          if (a + 1 < params_.min_leaf || m - a - 1 < params_.min_leaf) continue;
          const double rw = sw - lw;
          if (lw <= 0.0 || rw <= 0.0) continue;
          const double rwy = swy - lwy, rwyy = swyy - lwyy;
          const double imp = std::max(0.0, lwyy - lwy * lwy / lw) + std::max(0.0, rwyy - rwy * rwy / rw);
          if (imp < best.impurity - min_gain) {
            best = {static_cast<int>(f), midpoint(order[a].first, order[a + 1].first), imp};
          }
        }
      }
    }
    return best;
  }

  static double midpoint(double a, double b) {
    const double mid = a + (b - a) / 2.0;
    return mid < b ? mid : a;
  }

  int grow(const std::vector<std::size_t>& ids, std::size_t depth) {
    const int index = static_cast<int>(nodes_.size());
    nodes_.push_back({});
    nodes_[static_cast<std::size_t>(index)].value = node_value(ids);
    const double parent = impurity(ids);
    if (depth >= params_.max_depth || ids.size() < 2 * params_.min_leaf || parent <= 1e-12) {
      return index;
    }
    const Split split = best_split(ids, parent);
    if (split.feature < 0) return index;
    std::vector<std::size_t> left, right;
    for (auto i : ids) {
      (x_->at(i, static_cast<std::size_t>(split.feature)) <= split.threshold ? left : right).push_back(i);
    }
    const int l = grow(left, depth + 1);
    const int r = grow(right, depth + 1);
    auto& node = nodes_[static_cast<std::size_t>(index)];
    node.feature = split.feature;
    node.threshold = split.threshold;
    node.left = l;
    node.right = r;
    return index;
  }

  const FeatureMatrix* x_ = nullptr;
  std::span<const double> y_;
  std::span<const double> w_;
  TreeParams params_;
  Rng* rng_ = nullptr;
  std::vector<TreeNode> nodes_;
};

// ---------------------------------------------------------------------------
// Class bookkeeping

std::vector<double> distinct_sorted(std::span<const double> labels) {
  std::vector<double> classes(labels.begin(), labels.end());
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
  return classes;
}

std::vector<std::size_t> class_indices(std::span<const double> labels, const std::vector<double>& classes) {
  std::vector<std::size_t> out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    out[i] = static_cast<std::size_t>(std::lower_bound(classes.begin(), classes.end(), labels[i]) -
                                      classes.begin());
  }
  return out;
}

std::size_t argmax(const std::vector<double>& v) {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

// ---------------------------------------------------------------------------
// Logistic regression

struct LogisticModel final : detail::ModelImpl {
  std::vector<double> means, scales, params;
  std::size_t n_features = 0;

  std::vector<double> proba(std::span<const double> row) const override {
    const std::size_t k = classes.size();
    std::vector<double> z(k, 0.0);
    for (std::size_t c = 0; c < k; ++c) {
      const double* w = params.data() + c * (n_features + 1);
      double s = w[n_features];
      for (std::size_t j = 0; j < n_features; ++j) s += w[j] * (row[j] - means[j]) / scales[j];
      z[c] = s;
    }
    const double top = *std::max_element(z.begin(), z.end());
    double total = 0.0;
    for (double& v : z) {
      v = std::exp(v - top);
      total += v;
    }
    for (double& v : z) v /= total;
    return z;
  }
};

std::shared_ptr<const detail::ModelImpl> fit_logistic(const ModelSpec& spec, const FeatureMatrix& x,
                                                      std::span<const double> labels) {
  auto model = std::make_shared<LogisticModel>();
  model->classes = distinct_sorted(labels);
  const std::size_t k = model->classes.size();
  const std::size_t p = x.cols;
  model->n_features = p;
  model->means.assign(p, 0.0);
  model->scales.assign(p, 1.0);
  const double n = static_cast<double>(x.rows);
  for (std::size_t j = 0; j < p; ++j) {
    double m = 0.0;
    for (std::size_t i = 0; i < x.rows; ++i) m += x.at(i, j);
    m /= n;
    double ss = 0.0;
    for (std::size_t i = 0; i < x.rows; ++i) ss += (x.at(i, j) - m) * (x.at(i, j) - m);
    const double sd = std::sqrt(ss / n);
    model->means[j] = m;
    model->scales[j] = sd > 0.0 ? sd : 1.0;
  }
  FeatureMatrix z{x.rows, p, std::vector<double>(x.values.size())};
  for (std::size_t i = 0; i < x.rows; ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      z.values[i * p + j] = (x.at(i, j) - model->means[j]) / model->scales[j];
    }
  }
  const auto y = class_indices(labels, model->classes);
  const double l2 = spec.l2 >= 0.0 ? spec.l2 : 1.0 / n;
  std::vector<double> params(k * (p + 1), 0.0), grad;
  for (std::size_t it = 0; it < spec.max_iter; ++it) {
    softmax_loss(params, z, y, k, l2, &grad);
    double gmax = 0.0;
    for (double g : grad) gmax = std::max(gmax, std::abs(g));
    if (gmax < spec.tolerance) break;
    for (std::size_t q = 0; q < params.size(); ++q) params[q] -= spec.learning_rate * grad[q];
  }
  model->params = std::move(params);
  return model;
}

// ---------------------------------------------------------------------------
// Tree ensembles

struct TreeClassifier final : detail::ModelImpl {
  std::vector<Tree> trees;
  std::vector<double> tree_weights;  // empty = soft-vote average
  bool hard_vote = false;

  std::vector<double> proba(std::span<const double> row) const override {
    std::vector<double> out(classes.size(), 0.0);
    double total = 0.0;
    for (std::size_t t = 0; t < trees.size(); ++t) {
      const auto& leaf = trees[t].leaf(row);
      const double w = tree_weights.empty() ? 1.0 : tree_weights[t];
      if (hard_vote) {
        out[argmax(leaf)] += w;
      } else {
        for (std::size_t c = 0; c < out.size(); ++c) out[c] += w * leaf[c];
      }
      total += w;
    }
    if (total > 0.0) {
      for (double& v : out) v /= total;
    }
    return out;
  }
};

struct TreeRegressor final : detail::ModelImpl {
  std::vector<Tree> trees;

  double value(std::span<const double> row) const override {
    double s = 0.0;
    for (const auto& t : trees) s += t.leaf(row)[0];
    return s / static_cast<double>(trees.size());
  }
};

std::size_t forest_features(const ModelSpec& spec, std::size_t p) {
  if (spec.max_features > 0) return std::min(spec.max_features, p);
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(p)))));
}

std::shared_ptr<const detail::ModelImpl> fit_tree(const ModelSpec& spec, const FeatureMatrix& x,
                                                  std::span<const double> labels) {
  auto model = std::make_shared<TreeClassifier>();
  model->classes = distinct_sorted(labels);
  const auto idx = class_indices(labels, model->classes);
  std::vector<double> y(idx.begin(), idx.end());
  std::vector<double> w(x.rows, 1.0);
  TreeParams params{spec.max_depth, spec.min_leaf, spec.max_features, true, model->classes.size()};
  Rng rng(spec.seed);
  model->trees.resize(1);
  model->trees[0].build(x, y, w, params, rng);
  return model;
}

std::shared_ptr<const detail::ModelImpl> fit_adaboost(const ModelSpec& spec, const FeatureMatrix& x,
                                                      std::span<const double> labels) {
  auto model = std::make_shared<TreeClassifier>();
  model->hard_vote = true;
  model->classes = distinct_sorted(labels);
  const std::size_t k = model->classes.size();
  const auto idx = class_indices(labels, model->classes);
  std::vector<double> y(idx.begin(), idx.end());
  const double n = static_cast<double>(x.rows);
  std::vector<double> w(x.rows, 1.0 / n);
  const std::size_t rounds = spec.n_estimators > 0 ? spec.n_estimators : 50;
  TreeParams params{1, 1, 0, true, k};
  Rng rng(spec.seed);
  for (std::size_t m = 0; m < rounds; ++m) {
    Tree stump;
    stump.build(x, y, w, params, rng);
    double err = 0.0, total = 0.0;
    std::vector<char> miss(x.rows, 0);
    for (std::size_t i = 0; i < x.rows; ++i) {
      miss[i] = argmax(stump.leaf(x.row(i))) != idx[i];
      if (miss[i]) err += w[i];
      total += w[i];
    }
    err /= total;
    if (err <= 0.0) {
      model->trees.push_back(std::move(stump));
      model->tree_weights.push_back(1.0);
      break;
    }
    if (err >= 1.0 - 1.0 / static_cast<double>(k)) {
      if (model->trees.empty()) {
        model->trees.push_back(std::move(stump));
        model->tree_weights.push_back(1.0);
      }
      break;
    }
    const double alpha = std::log((1.0 - err) / err) + std::log(static_cast<double>(k) - 1.0);
    model->trees.push_back(std::move(stump));
    model->tree_weights.push_back(alpha);
    double sum = 0.0;
    for (std::size_t i = 0; i < x.rows; ++i) {
      if (miss[i]) w[i] *= std::exp(alpha);
      sum += w[i];
    }
    for (double& v : w) v /= sum;
  }
  return model;
}

template <class Model>
void grow_forest(Model& model, const ModelSpec& spec, const FeatureMatrix& x,
                 std::span<const double> y, const TreeParams& params) {
  const std::size_t n_trees = spec.n_estimators > 0 ? spec.n_estimators : 100;
  model.trees.resize(n_trees);
  parallel_for(
      n_trees,
      [&](std::size_t t) {
        Rng rng(derive_seed(spec.seed, t));
        std::vector<double> counts(x.rows, 0.0);
        for (std::size_t i = 0; i < x.rows; ++i) counts[uniform_index(rng, x.rows)] += 1.0;
        model.trees[t].build(x, y, counts, params, rng);
      },
      1);
}

std::shared_ptr<const detail::ModelImpl> fit_forest_classifier(const ModelSpec& spec, const FeatureMatrix& x,
                                                               std::span<const double> labels) {
  auto model = std::make_shared<TreeClassifier>();
  model->classes = distinct_sorted(labels);
  const auto idx = class_indices(labels, model->classes);
  std::vector<double> y(idx.begin(), idx.end());
  TreeParams params{spec.max_depth, spec.min_leaf, forest_features(spec, x.cols), true, model->classes.size()};
  grow_forest(*model, spec, x, y, params);
  return model;
}

std::shared_ptr<const detail::ModelImpl> fit_forest_regressor(const ModelSpec& spec, const FeatureMatrix& x,
                                                              std::span<const double> targets) {
  auto model = std::make_shared<TreeRegressor>();
  TreeParams params{spec.max_depth, spec.min_leaf, forest_features(spec, x.cols), false, 0};
  grow_forest(*model, spec, x, targets, params);
  return model;
}

}  // namespace

double softmax_loss(std::span<const double> params, const FeatureMatrix& x,
                    std::span<const std::size_t> labels, std::size_t n_classes, double l2,
                    std::vector<double>* gradient) {
  const std::size_t p = x.cols;
  const std::size_t stride = p + 1;
  if (params.size() != n_classes * stride) throw DataError("softmax_loss: parameter size mismatch");
  if (gradient) gradient->assign(params.size(), 0.0);
  std::vector<double> z(n_classes);
  double loss = 0.0;
  for (std::size_t i = 0; i < x.rows; ++i) {
    const auto row = x.row(i);
    for (std::size_t c = 0; c < n_classes; ++c) {
      const double* w = params.data() + c * stride;
      double s = w[p];
      for (std::size_t j = 0; j < p; ++j) s += w[j] * row[j];
      z[c] = s;
    }
    const double top = *std::max_element(z.begin(), z.end());
    double total = 0.0;
    for (double v : z) total += std::exp(v - top);
    const double log_norm = top + std::log(total);
    loss += log_norm - z[labels[i]];
    if (gradient) {
      for (std::size_t c = 0; c < n_classes; ++c) {
        const double r = std::exp(z[c] - log_norm) - (labels[i] == c ? 1.0 : 0.0);
        double* g = gradient->data() + c * stride;
        for (std::size_t j = 0; j < p; ++j) g[j] += r * row[j];
        g[p] += r;
      }
    }
  }
  const double n = static_cast<double>(std::max<std::size_t>(x.rows, 1));
  loss /= n;
  double penalty = 0.0;
  for (std::size_t c = 0; c < n_classes; ++c) {
    for (std::size_t j = 0; j < p; ++j) {
      const double w = params[c * stride + j];
      penalty += w * w;
      if (gradient) (*gradient)[c * stride + j] = (*gradient)[c * stride + j] / n + l2 * w;
    }
    if (gradient) (*gradient)[c * stride + p] /= n;
  }
  return loss + 0.5 * l2 * penalty;
}

FittedModel fit(const ModelSpec& spec, const FeatureMatrix& features, std::span<const double> labels) {
  if (features.rows != labels.size()) throw DataError("features and labels differ in length");
  if (features.rows == 0) throw DataError("cannot fit a model on zero rows");
  if (is_classifier(spec.kind) && distinct_sorted(labels).size() < 2) {
    throw DataError("classifier training labels contain a single class");
  }
  switch (spec.kind) {
    case ModelKind::LogReg:
      return FittedModel(fit_logistic(spec, features, labels));
    case ModelKind::DecisionTree:
      return FittedModel(fit_tree(spec, features, labels));
    case ModelKind::AdaBoost:
      return FittedModel(fit_adaboost(spec, features, labels));
    case ModelKind::RandomForestClf:
      return FittedModel(fit_forest_classifier(spec, features, labels));
    case ModelKind::RandomForestReg:
      return FittedModel(fit_forest_regressor(spec, features, labels));
  }
  throw DataError("unknown model kind");
}

std::vector<double> FittedModel::predict(const FeatureMatrix& x) const {
  std::vector<double> out(x.rows);
  if (impl_->classes.empty()) {
    for (std::size_t i = 0; i < x.rows; ++i) out[i] = impl_->value(x.row(i));
  } else {
    for (std::size_t i = 0; i < x.rows; ++i) out[i] = impl_->classes[argmax(impl_->proba(x.row(i)))];
  }
  return out;
}

std::vector<std::vector<double>> FittedModel::predict_proba(const FeatureMatrix& x) const {
  std::vector<std::vector<double>> out(x.rows);
  for (std::size_t i = 0; i < x.rows; ++i) out[i] = impl_->proba(x.row(i));
  return out;
}

const std::vector<double>& FittedModel::classes() const { return impl_->classes; }

bool FittedModel::is_classifier() const { return !impl_->classes.empty(); }

FoldPlan kfold(std::size_t n_rows, std::size_t k, std::span<const double> labels, std::uint64_t seed) {
  if (k < 2) throw DataError("k-fold needs k >= 2");
  if (k > n_rows) {
    throw DataError("k = " + std::to_string(k) + " exceeds the " + std::to_string(n_rows) + " rows");
  }
  if (!labels.empty() && labels.size() != n_rows) throw DataError("fold labels differ in length");
  Rng rng(seed);
  std::vector<std::vector<std::size_t>> groups;
  if (labels.empty()) {
    groups.push_back(iota_ids(n_rows));
  } else {
    const auto classes = distinct_sorted(labels);
    const auto idx = class_indices(labels, classes);
    groups.resize(classes.size());
    for (std::size_t i = 0; i < n_rows; ++i) groups[idx[i]].push_back(i);
  }
  FoldPlan plan;
  plan.k = k;
  plan.seed = seed;
  plan.folds.resize(k);
  std::vector<std::size_t> assignment(n_rows);
  std::size_t counter = 0;
  for (auto& g : groups) {
    shuffle(g, rng);
    for (auto i : g) assignment[i] = counter++ % k;
  }
  for (std::size_t i = 0; i < n_rows; ++i) {
    for (std::size_t f = 0; f < k; ++f) {
      (assignment[i] == f ? plan.folds[f].test : plan.folds[f].train).push_back(i);
    }
  }
  return plan;
}

Scores scores(std::span<const double> y_true, std::span<const double> y_pred,
              std::span<const double> y_prob) {
  if (y_true.size() != y_pred.size()) throw DataError("scores: label vectors differ in length");
  if (!y_prob.empty() && y_prob.size() != y_true.size()) throw DataError("scores: probabilities differ in length");
  Scores s;
  if (y_true.empty()) return s;
  std::vector<double> all(y_true.begin(), y_true.end());
  all.insert(all.end(), y_pred.begin(), y_pred.end());
  const auto classes = distinct_sorted(all);
  const auto t = class_indices(y_true, classes);
  const auto p = class_indices(y_pred, classes);
  const std::size_t k = classes.size();
  std::vector<double> tp(k, 0.0), fp(k, 0.0), fn(k, 0.0);
  double correct = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] == p[i]) {
      tp[t[i]] += 1.0;
      correct += 1.0;
    } else {
      fp[p[i]] += 1.0;
      fn[t[i]] += 1.0;
    }
  }
  s.f1_micro = correct / static_cast<double>(t.size());
  for (std::size_t c = 0; c < k; ++c) {
    const double prec = tp[c] + fp[c] > 0.0 ? tp[c] / (tp[c] + fp[c]) : 0.0;
    const double rec = tp[c] + fn[c] > 0.0 ? tp[c] / (tp[c] + fn[c]) : 0.0;
    s.precision_macro += prec;
    s.recall_macro += rec;
    s.f1_macro += prec + rec > 0.0 ? 2.0 * prec * rec / (prec + rec) : 0.0;
  }
  s.precision_macro /= static_cast<double>(k);
  s.recall_macro /= static_cast<double>(k);
  s.f1_macro /= static_cast<double>(k);

  const auto true_classes = distinct_sorted(y_true);
  if (!y_prob.empty() && true_classes.size() == 2) {
    std::vector<bool> positive(y_true.size());
    for (std::size_t i = 0; i < y_true.size(); ++i) positive[i] = y_true[i] == true_classes[1];
    s.auroc = auroc(positive, y_prob);
  }
  return s;
}

double auroc(const std::vector<bool>& positive, std::span<const double> score) {
  if (positive.size() != score.size()) throw DataError("auroc: inputs differ in length");
  std::vector<std::size_t> order = iota_ids(score.size());
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return score[a] < score[b]; });
  double rank_sum = 0.0, n_pos = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && score[order[j + 1]] == score[order[i]]) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t q = i; q <= j; ++q) {
      if (positive[order[q]]) {
        rank_sum += avg_rank;
        n_pos += 1.0;
      }
    }
    i = j + 1;
  }
  const double n_neg = static_cast<double>(score.size()) - n_pos;
  if (n_pos == 0.0 || n_neg == 0.0) throw DataError("auroc needs both classes present");
  return (rank_sum - n_pos * (n_pos + 1.0) / 2.0) / (n_pos * n_neg);
}

std::vector<RocPoint> roc_curve(const std::vector<bool>& positive, std::span<const double> score) {
  if (positive.size() != score.size()) throw DataError("roc_curve: inputs differ in length");
  std::vector<std::size_t> order = iota_ids(score.size());
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return score[a] > score[b]; });
  double n_pos = 0.0;
  for (bool p : positive) n_pos += p ? 1.0 : 0.0;
  const double n_neg = static_cast<double>(score.size()) - n_pos;
  std::vector<RocPoint> out{{0.0, 0.0}};
  double tp = 0.0, fp = 0.0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    (positive[order[i]] ? tp : fp) += 1.0;
    if (i + 1 < order.size() && score[order[i + 1]] == score[order[i]]) continue;
    out.push_back({n_neg > 0 ? fp / n_neg : 0.0, n_pos > 0 ? tp / n_pos : 0.0});
  }
  return out;
}

}  // namespace tabeval
