#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tabeval/dataset.hpp"

namespace tabeval {

double mean(std::span<const double> x);
/// Sample variance (n - 1 denominator); 0 for fewer than two values.
double variance(std::span<const double> x);
double stddev(std::span<const double> x);
/// Standard error of the mean; 0 for fewer than two values.
double std_error(std::span<const double> x);
double median(std::vector<double> x);

/// Non-negative weights summing to one (within 1e-9).
class ProbabilityVector {
 public:
  explicit ProbabilityVector(std::vector<double> weights);
  static ProbabilityVector from_counts(std::span<const double> counts);

  std::size_t size() const { return weights_.size(); }
  double operator[](std::size_t i) const { return weights_[i]; }
  const std::vector<double>& weights() const { return weights_; }

 private:
  std::vector<double> weights_;
};

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// Two-sample Kolmogorov-Smirnov distance with its asymptotic p-value.
KsResult ks_statistic(std::span<const double> x, std::span<const double> y);
/// Survival function of the limiting Kolmogorov distribution.
double kolmogorov_sf(double lambda);

double tvd(const ProbabilityVector& p, const ProbabilityVector& q);
double hellinger(const ProbabilityVector& p, const ProbabilityVector& q);

/// Level frequencies of integer codes in [0, n_levels).
ProbabilityVector level_frequencies(std::span<const double> codes, std::size_t n_levels);
/// TVD between the level distributions of two code samples.
double categorical_tvd(std::span<const double> x, std::span<const double> y, std::size_t n_levels);

using TwoSampleStatistic = std::function<double(std::span<const double>, std::span<const double>)>;

/// Smoothed permutation p-value (1 + #{permuted >= observed}) / (n_perms + 1).
double permutation_pvalue(std::span<const double> x, std::span<const double> y,
                          const TwoSampleStatistic& statistic, std::size_t n_perms,
                          std::uint64_t seed);

/// Scott's reference-rule bin width 3.49 s / cbrt(n).
double scott_width(double s, std::size_t n);
/// ceil(range / width), at least one bin.
std::size_t scott_bin_count(double range, double s, std::size_t n);
/// Uniform bin edges over [min, max] of the sample.
std::vector<double> scott_bins(std::span<const double> sample);
/// Bin of `x`; values outside the edges clamp to the first/last bin.
std::size_t bin_index(std::span<const double> edges, double x);
std::vector<double> bin_codes(std::span<const double> sample, std::span<const double> edges);

double pearson_corr(std::span<const double> x, std::span<const double> y);
double cramers_v(std::span<const double> x, std::span<const double> y);
double correlation_ratio(std::span<const double> categories, std::span<const double> values);

/// Square matrix indexed by column names.
struct MatrixSummary {
  std::vector<std::string> names;
  std::vector<double> values;  // row-major

  std::size_t dim() const { return names.size(); }
  double operator()(std::size_t i, std::size_t j) const { return values[i * dim() + j]; }
  double& operator()(std::size_t i, std::size_t j) { return values[i * dim() + j]; }
};

/// Pearson for numerical pairs, Cramer's V for categorical pairs and the
/// correlation ratio for mixed pairs; unit diagonal.
MatrixSummary mixed_correlation_matrix(const EncodedTable& table, std::vector<std::string> names);
MatrixSummary mixed_correlation_matrix(const Table& table);
/// Pearson matrix over the numerical columns only.
MatrixSummary pearson_matrix(const EncodedTable& table, std::vector<std::string> names);

double entropy(std::span<const double> codes);
/// MI(x, y) / mean(H(x), H(y)); 1 when both entropies vanish.
double normalized_mutual_information(std::span<const double> x, std::span<const double> y);
/// Pairwise NMI over columns of integer codes; unit diagonal.
MatrixSummary mutual_information_matrix(const EncodedTable& codes, std::vector<std::string> names);

double frobenius_diff(const MatrixSummary& a, const MatrixSummary& b);
MatrixSummary matrix_difference(const MatrixSummary& a, const MatrixSummary& b);

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
/// Eigenvalues descending; eigenvectors[k] is the unit vector for value k.
struct SymmetricEigen {
  std::vector<double> values;
  std::vector<std::vector<double>> vectors;
};
SymmetricEigen symmetric_eigen(std::vector<double> matrix, std::size_t n);

/// Principal components of standardized columns.
struct PcaModel {
  std::vector<double> means;
  std::vector<double> scales;
  std::vector<double> explained_variance;  // every component, descending
  std::vector<std::vector<double>> components;  // the top two

  /// Rows of `data` (row-major, `means.size()` columns) to 2-D coordinates.
  std::vector<std::pair<double, double>> project(std::span<const double> data) const;
};
PcaModel pca_fit(std::span<const double> data, std::size_t rows, std::size_t cols);

/// Normal-approximation confidence interval for the mean.
std::pair<double, double> mean_ci(std::span<const double> sample, double confidence_percent);
double normal_quantile(double p);

}  // namespace tabeval
