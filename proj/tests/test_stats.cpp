#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>

#include "tabeval/stats.hpp"
#include "test_support.hpp"

using namespace tabeval;

namespace {

// Largest eCDF gap over every pooled point.
double ecdf_sweep(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> pooled(x);
  pooled.insert(pooled.end(), y.begin(), y.end());
  double best = 0.0;
  for (double t : pooled) {
    const double fx = static_cast<double>(std::count_if(x.begin(), x.end(), [t](double v) { return v <= t; })) /
                      static_cast<double>(x.size());
    const double fy = static_cast<double>(std::count_if(y.begin(), y.end(), [t](double v) { return v <= t; })) /
                      static_cast<double>(y.size());
    best = std::max(best, std::abs(fx - fy));
  }
  return best;
}

std::vector<double> codes(std::initializer_list<int> v) { return std::vector<double>(v.begin(), v.end()); }

}  // namespace

TEST(Ks, HandExamples) {
  EXPECT_DOUBLE_EQ(ks_statistic(codes({1, 2, 3, 4}), codes({2, 3, 4, 5})).statistic, 0.25);
  EXPECT_DOUBLE_EQ(ks_statistic(codes({0, 0, 0}), codes({1, 1, 1})).statistic, 1.0);
  const auto same = ks_statistic(codes({3, 1, 2}), codes({1, 2, 3}));
  EXPECT_EQ(same.statistic, 0.0);
  EXPECT_EQ(same.p_value, 1.0);
  EXPECT_THROW(ks_statistic({}, codes({1})), DataError);
}

TEST(Ks, MatchesEcdfSweep) {
  Rng rng(42);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + uniform_index(rng, 60), m = 1 + uniform_index(rng, 60);
    std::vector<double> x(n), y(m);
    // Integer values force ties inside and across samples.
    for (auto& v : x) v = static_cast<double>(uniform_index(rng, 12));
    for (auto& v : y) v = static_cast<double>(uniform_index(rng, 12)) + (trial % 3 == 0 ? 0.5 : 0.0);
    const auto r = ks_statistic(x, y);
    EXPECT_NEAR(r.statistic, ecdf_sweep(x, y), 1e-12);
    EXPECT_GT(r.p_value, 0.0);
    EXPECT_LE(r.p_value, 1.0);
  }
}

TEST(Ks, KolmogorovSurvivalKnownValues) {
  EXPECT_NEAR(kolmogorov_sf(1.0), 0.26999967167735456, 1e-10);
  EXPECT_NEAR(kolmogorov_sf(1.3581), 0.05, 1e-4);
  EXPECT_DOUBLE_EQ(kolmogorov_sf(0.0), 1.0);
}

TEST(Divergence, TvdExamples) {
  EXPECT_DOUBLE_EQ(tvd(ProbabilityVector({0.5, 0.5}), ProbabilityVector({0.5, 0.5})), 0.0);
  EXPECT_DOUBLE_EQ(tvd(ProbabilityVector({1, 0}), ProbabilityVector({0, 1})), 1.0);
  EXPECT_NEAR(tvd(ProbabilityVector({0.6, 0.4}), ProbabilityVector({0.4, 0.6})), 0.2, 1e-12);
  EXPECT_THROW(tvd(ProbabilityVector({1.0}), ProbabilityVector({0.5, 0.5})), DataError);
}

TEST(Divergence, HellingerExamples) {
  EXPECT_DOUBLE_EQ(hellinger(ProbabilityVector({0.3, 0.7}), ProbabilityVector({0.3, 0.7})), 0.0);
  EXPECT_NEAR(hellinger(ProbabilityVector({1, 0}), ProbabilityVector({0, 1})), 1.0, 1e-12);
  EXPECT_NEAR(hellinger(ProbabilityVector({1, 0}), ProbabilityVector({0.5, 0.5})), std::sqrt(1 - std::sqrt(0.5)),
              1e-12);
  EXPECT_NEAR(hellinger(ProbabilityVector({1, 0}), ProbabilityVector({0.5, 0.5})), 0.5412, 1e-4);
}

TEST(Divergence, SymmetricAndBounded) {
  Rng rng(1);
  for (int t = 0; t < 50; ++t) {
    std::vector<double> a(5), b(5);
    for (auto& v : a) v = uniform_real(rng);
    for (auto& v : b) v = uniform_real(rng);
    const auto p = ProbabilityVector::from_counts(a), q = ProbabilityVector::from_counts(b);
    EXPECT_DOUBLE_EQ(tvd(p, q), tvd(q, p));
    EXPECT_DOUBLE_EQ(hellinger(p, q), hellinger(q, p));
    EXPECT_GE(tvd(p, q), 0.0);
    EXPECT_LE(tvd(p, q), 1.0);
    EXPECT_LE(hellinger(p, q), 1.0);
  }
}

TEST(Divergence, ProbabilityVectorValidation) {
  EXPECT_THROW(ProbabilityVector({0.5, 0.6}), DataError);
  EXPECT_THROW(ProbabilityVector({-0.1, 1.1}), DataError);
}

TEST(Divergence, CategoricalTvdIgnoresLevelOrder) {
  const auto x = codes({0, 0, 1, 2, 2, 2}), y = codes({0, 1, 1, 1, 2, 2});
  // Relabel 0 -> 2, 1 -> 0, 2 -> 1.
  auto relabel = [](std::vector<double> v) {
    for (auto& c : v) c = c == 0 ? 2 : (c == 1 ? 0 : 1);
    return v;
  };
  EXPECT_DOUBLE_EQ(categorical_tvd(x, y, 3), categorical_tvd(relabel(x), relabel(y), 3));
}

TEST(Permutation, IdenticalConstantSamplesGiveOne) {
  const std::vector<double> x(10, 1.0);
  const TwoSampleStatistic stat = [](std::span<const double> a, std::span<const double> b) {
    return categorical_tvd(a, b, 2);
  };
  EXPECT_EQ(permutation_pvalue(x, x, stat, 200, 1), 1.0);
}

TEST(Permutation, DisjointSamplesAreSignificantAndDeterministic) {
  const std::vector<double> x(200, 0.0), y(200, 1.0);
  const TwoSampleStatistic stat = [](std::span<const double> a, std::span<const double> b) {
    return categorical_tvd(a, b, 2);
  };
  const double p = permutation_pvalue(x, y, stat, 1000, 77);
  EXPECT_LE(p, 0.01);
  EXPECT_EQ(p, permutation_pvalue(x, y, stat, 1000, 77));
  EXPECT_THROW(permutation_pvalue(x, y, stat, 0, 1), DataError);
}

TEST(Scott, WidthAndBinCounts) {
  EXPECT_NEAR(scott_width(1.0, 1000), 0.349, 1e-12);
  EXPECT_EQ(scott_bin_count(3.49, 1.0, 1000), 10u);
  EXPECT_EQ(scott_bins(std::vector<double>(5, 2.0)).size(), 2u);
}

TEST(Scott, EdgesCoverTheSample) {
  Rng rng(3);
  std::normal_distribution<double> normal;
  std::vector<double> x(500);
  for (auto& v : x) v = normal(rng);
  const auto edges = scott_bins(x);
  EXPECT_DOUBLE_EQ(edges.front(), *std::min_element(x.begin(), x.end()));
  EXPECT_DOUBLE_EQ(edges.back(), *std::max_element(x.begin(), x.end()));
  for (double v : x) EXPECT_LT(bin_index(edges, v), edges.size() - 1);
}

TEST(Correlation, PearsonExamples) {
  EXPECT_NEAR(pearson_corr(codes({1, 2, 3}), codes({1, 2, 3})), 1.0, 1e-12);
  EXPECT_NEAR(pearson_corr(codes({1, 2, 3}), codes({-1, -2, -3})), -1.0, 1e-12);
  EXPECT_NEAR(pearson_corr(codes({1, 2, 3}), codes({1, 3, 2})), 0.5, 1e-12);
  EXPECT_EQ(pearson_corr(codes({1, 1, 1}), codes({1, 2, 3})), 0.0);
}

namespace {

// Expands a contingency table into paired code vectors.
std::pair<std::vector<double>, std::vector<double>> from_table(const std::vector<std::vector<int>>& counts) {
  std::vector<double> x, y;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    for (std::size_t j = 0; j < counts[i].size(); ++j) {
      for (int c = 0; c < counts[i][j]; ++c) {
        x.push_back(static_cast<double>(i));
        y.push_back(static_cast<double>(j));
      }
    }
  }
  return {x, y};
}

}  // namespace

TEST(Correlation, CramersVExamples) {
  auto [a, b] = from_table({{10, 0}, {0, 10}});
  EXPECT_NEAR(cramers_v(a, b), 1.0, 1e-9);
  auto [c, d] = from_table({{5, 5}, {5, 5}});
  EXPECT_NEAR(cramers_v(c, d), 0.0, 1e-9);
  auto [e, f] = from_table({{8, 2}, {2, 8}});
  EXPECT_NEAR(cramers_v(e, f), 0.6, 1e-9);
  EXPECT_EQ(cramers_v(codes({0, 0, 0}), codes({0, 1, 2})), 0.0);
}

TEST(Correlation, CorrelationRatioExamples) {
  EXPECT_NEAR(correlation_ratio(codes({0, 0, 1, 1}), codes({0, 0, 1, 1})), 1.0, 1e-9);
  EXPECT_NEAR(correlation_ratio(codes({0, 0, 1, 1}), codes({0, 1, 0, 1})), 0.0, 1e-9);
  EXPECT_EQ(correlation_ratio(codes({0, 1, 0}), codes({4, 4, 4})), 0.0);
}

TEST(Correlation, MixedMatrixComposesKernels) {
  const Table t({Column::categorical("c", {"a", "a", "b", "b"}), Column::numerical("x", {0, 0, 1, 1}),
                 Column::numerical("y", {1, 2, 3, 4})});
  const auto m = mixed_correlation_matrix(t);
  EXPECT_NEAR(m(0, 1), 1.0, 1e-9);
  EXPECT_NEAR(m(0, 2), correlation_ratio(codes({0, 0, 1, 1}), codes({1, 2, 3, 4})), 1e-12);
  EXPECT_NEAR(m(1, 2), pearson_corr(codes({0, 0, 1, 1}), codes({1, 2, 3, 4})), 1e-12);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(m(i, i), 1.0);
    for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(m(i, j), m(j, i));
  }
}

TEST(Correlation, SingleColumnAndDuplicatedColumn) {
  const auto one = mixed_correlation_matrix(Table({Column::numerical("x", {1, 2, 3})}));
  EXPECT_EQ(one.dim(), 1u);
  EXPECT_EQ(one(0, 0), 1.0);
  const auto dup = mixed_correlation_matrix(Table({Column::numerical("x", {1, 5, 2}), Column::numerical("y", {1, 5, 2})}));
  EXPECT_NEAR(dup(0, 1), 1.0, 1e-12);
}

TEST(MutualInformation, Examples) {
  EXPECT_NEAR(normalized_mutual_information(codes({0, 1, 0, 1}), codes({0, 1, 0, 1})), 1.0, 1e-12);
  EXPECT_NEAR(normalized_mutual_information(codes({0, 0, 1, 1}), codes({0, 1, 0, 1})), 0.0, 1e-12);
  EXPECT_EQ(normalized_mutual_information(codes({0, 0, 0}), codes({0, 1, 2})), 0.0);
  EXPECT_EQ(normalized_mutual_information(codes({0, 0, 0}), codes({1, 1, 1})), 1.0);
}

TEST(MutualInformation, MatrixIsSymmetricWithUnitDiagonal) {
  Rng rng(4);
  EncodedTable t;
  t.rows = 100;
  t.cols = 3;
  t.kinds.assign(3, ColumnKind::Categorical);
  t.n_levels.assign(3, 3);
  for (std::size_t i = 0; i < 300; ++i) t.values.push_back(static_cast<double>(uniform_index(rng, 3)));
  const auto m = mutual_information_matrix(t, {"a", "b", "c"});
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(m(i, i), 1.0);
    for (std::size_t j = 0; j < 3; ++j) {
      EXPECT_EQ(m(i, j), m(j, i));
      EXPECT_GE(m(i, j), 0.0);
      EXPECT_LE(m(i, j), 1.0);
    }
  }
}

TEST(Matrix, FrobeniusDiff) {
  const MatrixSummary a{{"x", "y"}, {1, 0.5, 0.5, 1}};
  const MatrixSummary b{{"x", "y"}, {0.5, 0, 0, 0.5}};
  EXPECT_DOUBLE_EQ(frobenius_diff(a, b), 1.0);
  EXPECT_EQ(frobenius_diff(a, a), 0.0);
  EXPECT_THROW(frobenius_diff(a, MatrixSummary{{"x"}, {1}}), DataError);
}

TEST(Eigen, JacobiMatchesDenseSolver) {
  Rng rng(8);
  for (std::size_t n : {2u, 3u, 6u, 9u}) {
    Eigen::MatrixXd a(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j <= i; ++j) a(i, j) = a(j, i) = uniform_real(rng) - 0.5;
    }
    std::vector<double> flat(a.data(), a.data() + n * n);
    const auto mine = symmetric_eigen(flat, n);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a);
    for (std::size_t k = 0; k < n; ++k) {
      EXPECT_NEAR(mine.values[k], solver.eigenvalues()(static_cast<Eigen::Index>(n - 1 - k)), 1e-10);
      Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(mine.vectors[k].data(), static_cast<Eigen::Index>(n));
      EXPECT_NEAR(v.norm(), 1.0, 1e-10);
      EXPECT_NEAR((a * v - mine.values[k] * v).norm(), 0.0, 1e-9);
    }
  }
}

TEST(Pca, ExplainedVarianceMatchesDenseSolver) {
  Rng rng(10);
  std::normal_distribution<double> normal;
  const std::size_t rows = 100, cols = 5;
  std::vector<double> data(rows * cols);
  for (std::size_t i = 0; i < rows; ++i) {
    const double shared = normal(rng);
    for (std::size_t j = 0; j < cols; ++j) data[i * cols + j] = shared * static_cast<double>(j) + normal(rng) * (j + 1);
  }
  const auto model = pca_fit(data, rows, cols);

  Eigen::MatrixXd x(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) x(i, j) = data[i * cols + j];
  }
  Eigen::RowVectorXd mu = x.colwise().mean();
  Eigen::MatrixXd centered = x.rowwise() - mu;
  for (std::size_t j = 0; j < cols; ++j) {
    const double sd = std::sqrt(centered.col(j).squaredNorm() / rows);
    centered.col(j) /= sd;
  }
  const Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(rows - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  for (std::size_t k = 0; k < cols; ++k) {
    EXPECT_NEAR(model.explained_variance[k], solver.eigenvalues()(static_cast<Eigen::Index>(cols - 1 - k)), 1e-8);
    if (k > 0) EXPECT_LE(model.explained_variance[k], model.explained_variance[k - 1]);
  }
  double dot = 0.0;
  for (std::size_t j = 0; j < cols; ++j) dot += model.components[0][j] * model.components[1][j];
  EXPECT_NEAR(dot, 0.0, 1e-10);
}

TEST(Pca, RankOneDataHasNoSecondVariance) {
  std::vector<double> data;
  for (int i = 0; i < 20; ++i) {
    data.push_back(i);
    data.push_back(2.0 * i);
  }
  const auto model = pca_fit(data, 20, 2);
  EXPECT_NEAR(model.explained_variance[1], 0.0, 1e-12);
}

TEST(Pca, UncorrelatedInputsProjectToStandardizedAxes) {
  const std::vector<double> data{1, 0, -1, 0, 0, 2, 0, -2};
  const auto model = pca_fit(data, 4, 2);
  const auto pts = model.project(data);
  for (std::size_t i = 0; i < 4; ++i) {
    const double sx = data[2 * i] / std::sqrt(0.5), sy = data[2 * i + 1] / std::sqrt(2.0);
    EXPECT_NEAR(std::abs(pts[i].first) + std::abs(pts[i].second), std::abs(sx) + std::abs(sy), 1e-12);
  }
}

TEST(ConfidenceInterval, NormalApproximation) {
  const double a = std::sqrt(0.99);
  std::vector<double> x(50, a);
  x.insert(x.end(), 50, -a);
  const auto [lo, hi] = mean_ci(x, 95);
  EXPECT_NEAR(lo, -0.196, 1e-4);
  EXPECT_NEAR(hi, 0.196, 1e-4);
  const auto [clo, chi] = mean_ci(std::vector<double>(5, 3.0), 95);
  EXPECT_EQ(clo, 3.0);
  EXPECT_EQ(chi, 3.0);
  EXPECT_THROW(mean_ci(std::vector<double>{1.0}, 95), DataError);
  EXPECT_NEAR(normal_quantile(0.975), 1.959963984540054, 1e-12);
}

TEST(Summary, MeanVarianceMedian) {
  EXPECT_DOUBLE_EQ(mean(codes({1, 2, 3, 4})), 2.5);
  EXPECT_DOUBLE_EQ(variance(codes({1, 2, 3, 4})), 5.0 / 3.0);
  EXPECT_DOUBLE_EQ(median(codes({4, 1, 3, 2})), 2.5);
  EXPECT_DOUBLE_EQ(median(codes({5, 1, 3})), 3.0);
  EXPECT_EQ(std_error(codes({7})), 0.0);
}
