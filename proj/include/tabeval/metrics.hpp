#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "tabeval/dataset.hpp"
#include "tabeval/metric_result.hpp"

namespace tabeval {

// Every metric derives its random stream from (ctx.seed, metric key), so a
// direct call and a framework run with the same master seed agree.
// Metrics whose preconditions fail return a disabled result instead of
// throwing.

// ---- utility -------------------------------------------------------------

/// Mean absolute difference of min-max normalized column means.
MetricResult dwm(const EvalContext& ctx);

/// Real and synthetic numericals projected on the real data's top two
/// principal components (plot only).
MetricResult pca_plot(const EvalContext& ctx);

struct CioOptions {
  double confidence = 95.0;
};
/// Average overlap of per-column confidence intervals for the mean.
MetricResult cio(const EvalContext& ctx, const CioOptions& opts = {});

struct CorrDiffOptions {
  bool mixed_corr = true;
};
MetricResult corr_diff(const EvalContext& ctx, const CorrDiffOptions& opts = {});

MetricResult mi_diff(const EvalContext& ctx);

struct KsTestOptions {
  double sig_lvl = 0.05;
  std::size_t n_perms = 1000;
};
/// KS distance for numericals, TVD with a permutation p-value for
/// categoricals.
MetricResult ks_test(const EvalContext& ctx, const KsTestOptions& opts = {});

MetricResult h_dist(const EvalContext& ctx);

struct PmseOptions {
  std::size_t k_folds = 5;
  std::size_t max_iter = 5000;
};
/// Propensity mean squared error of a cross-validated logistic model
/// separating real from synthetic rows.
MetricResult p_mse(const EvalContext& ctx, const PmseOptions& opts = {});
/// mean((p_i - c)^2) over the given propensities.
double pmse_score(std::span<const double> propensities, double base_rate);

struct NnaaOptions {
  std::size_t n_resample = 30;
};
/// Nearest-neighbour adversarial accuracy between real and synthetic rows.
MetricResult nnaa(const EvalContext& ctx, const NnaaOptions& opts = {});
/// Adversarial accuracy of two encoded tables, no resampling.
double adversarial_accuracy(const EncodedTable& a, const EncodedTable& b, DistanceKind kind);

struct AurocDiffOptions {
  std::string model = "log_reg";
};
MetricResult auroc_diff(const EvalContext& ctx, const AurocDiffOptions& opts = {});

struct ClsAccOptions {
  std::string f1_type = "micro";
  std::size_t k_folds = 5;
};
/// F1 gap between models trained on real and on synthetic data, for four
/// classifier families.
MetricResult cls_acc(const EvalContext& ctx, const ClsAccOptions& opts = {});

// ---- privacy -------------------------------------------------------------

/// Mean nearest / next-nearest real-neighbour distance ratio of synthetic
/// rows, with a holdout-based privacy loss when a holdout exists.
MetricResult nndr(const EvalContext& ctx);

MetricResult nnaa_privacy_loss(const EvalContext& ctx, const NnaaOptions& opts = {});

/// Median synthetic-to-real over median real-to-real nearest distance.
/// Throws DataError when the denominator is zero.
MetricResult dcr(const EvalContext& ctx);

struct HitRateOptions {
  double thres_percent = 1.0 / 30.0;
};
MetricResult hit_rate(const EvalContext& ctx, const HitRateOptions& opts = {});

/// Per-column weights 1/H normalized to sum to the column count; zero-entropy
/// columns get 0.
std::vector<double> inverse_entropy_weights(const Table& real);
MetricResult eps_risk(const EvalContext& ctx);

struct MiaOptions {
  std::size_t num_eval_iter = 5;
};
MetricResult mia_risk(const EvalContext& ctx, const MiaOptions& opts = {});

struct AttDisclOptions {
  double tau = 1.0 / 30.0;
};
MetricResult att_discl(const EvalContext& ctx, const AttDisclOptions& opts = {});

}  // namespace tabeval
