#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "tabeval/dataset.hpp"

namespace tabeval {

/// Dense row-major feature matrix.
struct FeatureMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  std::span<const double> row(std::size_t i) const { return {values.data() + i * cols, cols}; }
  double at(std::size_t i, std::size_t j) const { return values[i * cols + j]; }

  static FeatureMatrix from(const EncodedTable& table);
  FeatureMatrix take_rows(std::span<const std::size_t> ids) const;
};

/// Encoded table split into predictors (every other column) and a target.
std::pair<FeatureMatrix, std::vector<double>> split_target(const EncodedTable& table,
                                                           std::size_t target);

enum class ModelKind { LogReg, DecisionTree, AdaBoost, RandomForestClf, RandomForestReg };

struct ModelSpec {
  ModelKind kind = ModelKind::LogReg;
  std::uint64_t seed = 0;

  // Logistic regression.
  std::size_t max_iter = 5000;
  double learning_rate = 0.1;
  double tolerance = 1e-6;
  /// L2 strength on the mean log-loss; negative selects 1 / n_rows.
  double l2 = -1.0;

  // Trees and ensembles.
  std::size_t max_depth = 8;
  std::size_t min_leaf = 2;
  /// Features tried per split; 0 selects all for a single tree and
  /// round(sqrt(p)) for forests.
  std::size_t max_features = 0;
  /// 0 selects 50 boosting rounds or 100 forest trees.
  std::size_t n_estimators = 0;

  static ModelSpec of(ModelKind kind, std::uint64_t seed = 0) {
    ModelSpec s;
    s.kind = kind;
    s.seed = seed;
    return s;
  }
};

bool is_classifier(ModelKind kind);

namespace detail {
struct ModelImpl;
}

/// Immutable fitted model. Classifier labels are arbitrary reals (usually
/// level codes); predict_proba columns follow classes().
class FittedModel {
 public:
  std::vector<double> predict(const FeatureMatrix& x) const;
  std::vector<std::vector<double>> predict_proba(const FeatureMatrix& x) const;
  const std::vector<double>& classes() const;
  bool is_classifier() const;

 private:
  explicit FittedModel(std::shared_ptr<const detail::ModelImpl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const detail::ModelImpl> impl_;

  friend FittedModel fit(const ModelSpec&, const FeatureMatrix&, std::span<const double>);
};

/// Throws DataError when a classifier sees fewer than two classes.
FittedModel fit(const ModelSpec& spec, const FeatureMatrix& features, std::span<const double> labels);

/// Mean softmax cross-entropy plus (l2 / 2) * |W|^2 over non-bias weights.
/// `params` is classes x (features + 1), bias last in each row; labels are
/// class indices.
double softmax_loss(std::span<const double> params, const FeatureMatrix& x,
                    std::span<const std::size_t> labels, std::size_t n_classes, double l2,
                    std::vector<double>* gradient = nullptr);

struct Fold {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

struct FoldPlan {
  std::size_t k = 0;
  std::uint64_t seed = 0;
  std::vector<Fold> folds;
};

/// Seeded k-fold split; stratified on `labels` when given.
FoldPlan kfold(std::size_t n_rows, std::size_t k, std::span<const double> labels = {},
               std::uint64_t seed = 0);

struct Scores {
  double f1_micro = 0.0;
  double f1_macro = 0.0;
  double precision_macro = 0.0;
  double recall_macro = 0.0;
  std::optional<double> auroc;
};

/// `y_prob` is the probability of the larger label; AUROC is only reported
/// when y_true holds exactly two classes.
Scores scores(std::span<const double> y_true, std::span<const double> y_pred,
              std::span<const double> y_prob = {});

/// Mann-Whitney form of the area under the ROC curve; ties count one half.
double auroc(const std::vector<bool>& positive, std::span<const double> score);

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
};
std::vector<RocPoint> roc_curve(const std::vector<bool>& positive, std::span<const double> score);

}  // namespace tabeval
