#include "tabeval/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <boost/math/distributions/normal.hpp>

#include "tabeval/util.hpp"

namespace tabeval {

namespace {

std::size_t code_of(double v) { return static_cast<std::size_t>(v); }

std::size_t level_count(std::span<const double> codes) {
  std::size_t n = 0;
  for (double c : codes) n = std::max(n, code_of(c) + 1);
  return n;
}

double clamp_unit(double v) { return std::clamp(v, 0.0, 1.0); }

void require_same_size(const ProbabilityVector& p, const ProbabilityVector& q, const char* what) {
  if (p.size() != q.size()) throw DataError(std::string(what) + ": distributions have different supports");
}

}  // namespace

double mean(std::span<const double> x) {
  if (x.empty()) return 0.0;
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double variance(std::span<const double> x) {
  if (x.size() < 2) return 0.0;
  const double m = mean(x);
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  return ss / static_cast<double>(x.size() - 1);
}

double stddev(std::span<const double> x) { return std::sqrt(variance(x)); }

double std_error(std::span<const double> x) {
  if (x.size() < 2) return 0.0;
  return stddev(x) / std::sqrt(static_cast<double>(x.size()));
}

double median(std::vector<double> x) {
  if (x.empty()) throw DataError("median of an empty sample");
  const std::size_t mid = x.size() / 2;
  std::nth_element(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(mid), x.end());
  const double upper = x[mid];
  if (x.size() % 2 == 1) return upper;
  const double lower = *std::max_element(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

ProbabilityVector::ProbabilityVector(std::vector<double> weights) : weights_(std::move(weights)) {
  double total = 0.0;
  for (double w : weights_) {
    if (!(w >= 0.0)) throw DataError("probability weights must be non-negative");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9) throw DataError("probability weights must sum to 1");
}

ProbabilityVector ProbabilityVector::from_counts(std::span<const double> counts) {
  const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
  if (!(total > 0.0)) throw DataError("cannot normalize an all-zero count vector");
  std::vector<double> w(counts.begin(), counts.end());
  for (double& v : w) v /= total;
  return ProbabilityVector(std::move(w));
}

double kolmogorov_sf(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 1.18) {
    // Jacobi-theta form, convergent for small arguments.
    const double pi = std::acos(-1.0);
    double cdf = 0.0;
    for (int k = 1; k <= 20; ++k) {
      const double a = (2.0 * k - 1.0) * pi / lambda;
      cdf += std::exp(-a * a / 8.0);
    }
    cdf *= std::sqrt(2.0 * pi) / lambda;
    return clamp_unit(1.0 - cdf);
  }
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-300) break;
  }
  return clamp_unit(2.0 * sum);
}

KsResult ks_statistic(std::span<const double> x, std::span<const double> y) {
  if (x.empty() || y.empty()) throw DataError("ks_statistic needs two non-empty samples");
  std::vector<double> a(x.begin(), x.end());
  std::vector<double> b(y.begin(), y.end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() || j < b.size()) {
    double t;
    if (j >= b.size() || (i < a.size() && a[i] <= b[j])) {
      t = a[i];
    } else {
      t = b[j];
    }
    while (i < a.size() && a[i] <= t) ++i;
    while (j < b.size() && b[j] <= t) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  const double en = std::sqrt(na * nb / (na + nb));
  double p = kolmogorov_sf((en + 0.12 + 0.11 / en) * d);
  p = std::max(p, std::numeric_limits<double>::min());
  return {d, p};
}

double tvd(const ProbabilityVector& p, const ProbabilityVector& q) {
  require_same_size(p, q, "tvd");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
  return clamp_unit(0.5 * s);
}

double hellinger(const ProbabilityVector& p, const ProbabilityVector& q) {
  require_same_size(p, q, "hellinger");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double d = std::sqrt(p[i]) - std::sqrt(q[i]);
    s += d * d;
  }
  return clamp_unit(std::sqrt(s) / std::sqrt(2.0));
}

ProbabilityVector level_frequencies(std::span<const double> codes, std::size_t n_levels) {
  std::vector<double> counts(n_levels, 0.0);
  for (double c : codes) {
    const auto k = code_of(c);
    if (k >= n_levels) throw DataError("level code out of range");
    counts[k] += 1.0;
  }
  return ProbabilityVector::from_counts(counts);
}

double categorical_tvd(std::span<const double> x, std::span<const double> y, std::size_t n_levels) {
  return tvd(level_frequencies(x, n_levels), level_frequencies(y, n_levels));
}

double permutation_pvalue(std::span<const double> x, std::span<const double> y,
                          const TwoSampleStatistic& statistic, std::size_t n_perms,
                          std::uint64_t seed) {
  if (x.empty() || y.empty()) throw DataError("permutation test needs two non-empty samples");
  if (n_perms == 0) throw DataError("permutation test needs n_perms >= 1");
  const double observed = statistic(x, y);
  const double tolerance = 1e-12 * std::max(1.0, std::abs(observed));
  std::vector<double> pooled(x.begin(), x.end());
  pooled.insert(pooled.end(), y.begin(), y.end());
  Rng rng(seed);
  std::size_t at_least = 0;
  const std::span<const double> all(pooled);
  for (std::size_t p = 0; p < n_perms; ++p) {
    shuffle(pooled, rng);
    const double s = statistic(all.first(x.size()), all.subspan(x.size()));
    if (s >= observed - tolerance) ++at_least;
  }
  return static_cast<double>(at_least + 1) / static_cast<double>(n_perms + 1);
}

double scott_width(double s, std::size_t n) {
  return 3.49 * s / std::cbrt(static_cast<double>(n));
}

std::size_t scott_bin_count(double range, double s, std::size_t n) {
  const double width = scott_width(s, n);
  if (!(width > 0.0) || !(range > 0.0)) return 1;
  // The slack absorbs rounding when range is an exact multiple of width.
  const double bins = std::ceil(range / width - 1e-9);
  return std::max<std::size_t>(1, static_cast<std::size_t>(bins));
}

std::vector<double> scott_bins(std::span<const double> sample) {
  if (sample.size() < 2) throw DataError("scott_bins needs at least two values");
  auto [lo, hi] = std::minmax_element(sample.begin(), sample.end());
  const double range = *hi - *lo;
  const std::size_t bins = scott_bin_count(range, stddev(sample), sample.size());
  std::vector<double> edges(bins + 1);
  for (std::size_t k = 0; k <= bins; ++k) {
    edges[k] = *lo + range * static_cast<double>(k) / static_cast<double>(bins);
  }
  edges.back() = *hi;
  return edges;
}

std::size_t bin_index(std::span<const double> edges, double x) {
  const std::size_t bins = edges.size() - 1;
  if (bins <= 1) return 0;
  auto it = std::upper_bound(edges.begin() + 1, edges.end() - 1, x);
  return static_cast<std::size_t>(it - (edges.begin() + 1));
}

std::vector<double> bin_codes(std::span<const double> sample, std::span<const double> edges) {
  std::vector<double> out(sample.size());
  for (std::size_t i = 0; i < sample.size(); ++i) {
    out[i] = static_cast<double>(bin_index(edges, sample[i]));
  }
  return out;
}

double pearson_corr(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DataError("pearson_corr: samples differ in length");
  const double mx = mean(x), my = mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx <= 0.0 || syy <= 0.0) return 0.0;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double cramers_v(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DataError("cramers_v: samples differ in length");
  const std::size_t r = level_count(x), c = level_count(y);
  std::vector<double> table(r * c, 0.0), rows(r, 0.0), cols(c, 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto a = code_of(x[i]), b = code_of(y[i]);
    table[a * c + b] += 1.0;
    rows[a] += 1.0;
    cols[b] += 1.0;
  }
  const auto used_r = static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [](double v) { return v > 0; }));
  const auto used_c = static_cast<std::size_t>(std::count_if(cols.begin(), cols.end(), [](double v) { return v > 0; }));
  const std::size_t k = std::min(used_r, used_c);
  if (k <= 1) return 0.0;
  const double n = static_cast<double>(x.size());
  double chi2 = 0.0;
  for (std::size_t a = 0; a < r; ++a) {
    if (rows[a] == 0.0) continue;
    for (std::size_t b = 0; b < c; ++b) {
      if (cols[b] == 0.0) continue;
      const double expected = rows[a] * cols[b] / n;
      const double d = table[a * c + b] - expected;
      chi2 += d * d / expected;
    }
  }
  return clamp_unit(std::sqrt(chi2 / (n * static_cast<double>(k - 1))));
}

double correlation_ratio(std::span<const double> categories, std::span<const double> values) {
  if (categories.size() != values.size()) throw DataError("correlation_ratio: samples differ in length");
  const std::size_t levels = level_count(categories);
  std::vector<double> sums(levels, 0.0), counts(levels, 0.0);
  for (std::size_t i = 0; i < values.size(); ++i) {
    sums[code_of(categories[i])] += values[i];
    counts[code_of(categories[i])] += 1.0;
  }
  const double m = mean(values);
  double between = 0.0;
  for (std::size_t k = 0; k < levels; ++k) {
    if (counts[k] == 0.0) continue;
    const double d = sums[k] / counts[k] - m;
    between += counts[k] * d * d;
  }
  double total = 0.0;
  for (double v : values) total += (v - m) * (v - m);
  if (total <= 0.0) return 0.0;
  return clamp_unit(std::sqrt(between / total));
}

MatrixSummary mixed_correlation_matrix(const EncodedTable& table, std::vector<std::string> names) {
  const std::size_t p = table.cols;
  if (names.size() != p) throw DataError("matrix names do not match the column count");
  MatrixSummary m{std::move(names), std::vector<double>(p * p, 0.0)};
  std::vector<std::vector<double>> cols(p);
  for (std::size_t j = 0; j < p; ++j) cols[j] = table.column(j);
  for (std::size_t i = 0; i < p; ++i) {
    m(i, i) = 1.0;
    for (std::size_t j = i + 1; j < p; ++j) {
      const bool ni = table.kinds[i] == ColumnKind::Numerical;
      const bool nj = table.kinds[j] == ColumnKind::Numerical;
      double v;
      if (ni && nj) {
        v = pearson_corr(cols[i], cols[j]);
      } else if (!ni && !nj) {
        v = cramers_v(cols[i], cols[j]);
      } else if (ni) {
        v = correlation_ratio(cols[j], cols[i]);
      } else {
        v = correlation_ratio(cols[i], cols[j]);
      }
      m(i, j) = v;
      m(j, i) = v;
    }
  }
  return m;
}

MatrixSummary mixed_correlation_matrix(const Table& table) {
  if (table.n_rows() < 2) throw DataError("correlation matrix needs at least two rows");
  auto spec = NormalizationSpec::fit(table);
  return mixed_correlation_matrix(normalize(table, spec), table.names());
}

MatrixSummary pearson_matrix(const EncodedTable& table, std::vector<std::string> names) {
  std::vector<std::size_t> numeric;
  for (std::size_t j = 0; j < table.cols; ++j) {
    if (table.kinds[j] == ColumnKind::Numerical) numeric.push_back(j);
  }
  const std::size_t p = numeric.size();
  MatrixSummary m;
  for (auto j : numeric) m.names.push_back(names.at(j));
  m.values.assign(p * p, 0.0);
  std::vector<std::vector<double>> cols;
  for (auto j : numeric) cols.push_back(table.column(j));
  for (std::size_t i = 0; i < p; ++i) {
    m(i, i) = 1.0;
    for (std::size_t j = i + 1; j < p; ++j) {
      m(i, j) = m(j, i) = pearson_corr(cols[i], cols[j]);
    }
  }
  return m;
}

double entropy(std::span<const double> codes) {
  if (codes.empty()) return 0.0;
  std::vector<double> counts(level_count(codes), 0.0);
  for (double c : codes) counts[code_of(c)] += 1.0;
  const double n = static_cast<double>(codes.size());
  double h = 0.0;
  for (double k : counts) {
    if (k > 0.0) h -= (k / n) * std::log(k / n);
  }
  return std::max(h, 0.0);
}

double normalized_mutual_information(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DataError("mutual information: samples differ in length");
  const double hx = entropy(x), hy = entropy(y);
  if (hx <= 0.0 && hy <= 0.0) return 1.0;
  if (hx <= 0.0 || hy <= 0.0) return 0.0;
  const std::size_t r = level_count(x), c = level_count(y);
  std::vector<double> joint(r * c, 0.0), px(r, 0.0), py(c, 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    joint[code_of(x[i]) * c + code_of(y[i])] += 1.0;
    px[code_of(x[i])] += 1.0;
    py[code_of(y[i])] += 1.0;
  }
  const double n = static_cast<double>(x.size());
  double mi = 0.0;
  for (std::size_t a = 0; a < r; ++a) {
    for (std::size_t b = 0; b < c; ++b) {
      const double nab = joint[a * c + b];
      if (nab > 0.0) mi += (nab / n) * std::log(nab * n / (px[a] * py[b]));
    }
  }
  return clamp_unit(mi / (0.5 * (hx + hy)));
}

MatrixSummary mutual_information_matrix(const EncodedTable& codes, std::vector<std::string> names) {
  const std::size_t p = codes.cols;
  if (names.size() != p) throw DataError("matrix names do not match the column count");
  MatrixSummary m{std::move(names), std::vector<double>(p * p, 0.0)};
  std::vector<std::vector<double>> cols(p);
  for (std::size_t j = 0; j < p; ++j) cols[j] = codes.column(j);
  for (std::size_t i = 0; i < p; ++i) {
    m(i, i) = 1.0;
    for (std::size_t j = i + 1; j < p; ++j) {
      m(i, j) = m(j, i) = normalized_mutual_information(cols[i], cols[j]);
    }
  }
  return m;
}

MatrixSummary matrix_difference(const MatrixSummary& a, const MatrixSummary& b) {
  if (a.names != b.names || a.values.size() != b.values.size()) {
    throw DataError("matrix difference: shapes or index orders differ");
  }
  MatrixSummary d{a.names, a.values};
  for (std::size_t k = 0; k < d.values.size(); ++k) d.values[k] -= b.values[k];
  return d;
}

double frobenius_diff(const MatrixSummary& a, const MatrixSummary& b) {
  const auto d = matrix_difference(a, b);
  double s = 0.0;
  for (double v : d.values) s += v * v;
  return std::sqrt(s);
}

SymmetricEigen symmetric_eigen(std::vector<double> a, std::size_t n) {
  if (a.size() != n * n) throw DataError("symmetric_eigen: matrix is not n x n");
  std::vector<double> v(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0, total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        total += a[i * n + j] * a[i * n + j];
        if (i != j) off += a[i * n + j] * a[i * n + j];
      }
    }
    if (off <= 1e-30 * std::max(total, 1e-300)) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a[p * n + q];
        if (apq == 0.0) continue;
        const double theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k * n + p], akq = a[k * n + q];
          a[k * n + p] = c * akp - s * akq;
          a[k * n + q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p * n + k], aqk = a[q * n + k];
          a[p * n + k] = c * apk - s * aqk;
          a[q * n + k] = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v[k * n + p], vkq = v[k * n + q];
          v[k * n + p] = c * vkp - s * vkq;
          v[k * n + q] = s * vkp + c * vkq;
        }
      }
    }
  }
  std::vector<std::size_t> order = iota_ids(n);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return a[x * n + x] > a[y * n + y]; });
  SymmetricEigen out;
  for (auto k : order) {
    out.values.push_back(a[k * n + k]);
    std::vector<double> vec(n);
    for (std::size_t i = 0; i < n; ++i) vec[i] = v[i * n + k];
    // Fix the sign so the largest-magnitude entry is positive.
    std::size_t big = 0;
    for (std::size_t i = 1; i < n; ++i) {
      if (std::abs(vec[i]) > std::abs(vec[big])) big = i;
    }
    if (vec[big] < 0.0) {
      for (double& e : vec) e = -e;
    }
    out.vectors.push_back(std::move(vec));
  }
  return out;
}

PcaModel pca_fit(std::span<const double> data, std::size_t rows, std::size_t cols) {
  if (cols < 2) throw DataError("PCA needs at least two numerical columns");
  if (rows < 2) throw DataError("PCA needs at least two rows");
  PcaModel model;
  model.means.assign(cols, 0.0);
  model.scales.assign(cols, 1.0);
  for (std::size_t j = 0; j < cols; ++j) {
    double m = 0.0;
    for (std::size_t i = 0; i < rows; ++i) m += data[i * cols + j];
    m /= static_cast<double>(rows);
    double ss = 0.0;
    for (std::size_t i = 0; i < rows; ++i) ss += (data[i * cols + j] - m) * (data[i * cols + j] - m);
    const double sd = std::sqrt(ss / static_cast<double>(rows));
    model.means[j] = m;
    model.scales[j] = sd > 0.0 ? sd : 1.0;
  }
  std::vector<double> cov(cols * cols, 0.0);
  std::vector<double> z(cols);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) z[j] = (data[i * cols + j] - model.means[j]) / model.scales[j];
    for (std::size_t a = 0; a < cols; ++a) {
      for (std::size_t b = a; b < cols; ++b) cov[a * cols + b] += z[a] * z[b];
    }
  }
  for (std::size_t a = 0; a < cols; ++a) {
    for (std::size_t b = a; b < cols; ++b) {
      cov[a * cols + b] /= static_cast<double>(rows - 1);
      cov[b * cols + a] = cov[a * cols + b];
    }
  }
  auto eig = symmetric_eigen(std::move(cov), cols);
  model.explained_variance = eig.values;
  for (double& v : model.explained_variance) v = std::max(v, 0.0);
  model.components = {eig.vectors[0], eig.vectors[1]};
  return model;
}

std::vector<std::pair<double, double>> PcaModel::project(std::span<const double> data) const {
  const std::size_t cols = means.size();
  const std::size_t rows = cols ? data.size() / cols : 0;
  std::vector<std::pair<double, double>> out(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    double a = 0.0, b = 0.0;
    for (std::size_t j = 0; j < cols; ++j) {
      const double z = (data[i * cols + j] - means[j]) / scales[j];
      a += z * components[0][j];
      b += z * components[1][j];
    }
    out[i] = {a, b};
  }
  return out;
}

double normal_quantile(double p) {
  return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

std::pair<double, double> mean_ci(std::span<const double> sample, double confidence_percent) {
  if (sample.size() < 2) throw DataError("confidence interval needs at least two values");
  if (!(confidence_percent > 0.0 && confidence_percent < 100.0)) {
    throw DataError("confidence must lie in (0, 100)");
  }
  const double z = normal_quantile(1.0 - (1.0 - confidence_percent / 100.0) / 2.0);
  const double m = mean(sample);
  const double half = z * stddev(sample) / std::sqrt(static_cast<double>(sample.size()));
  return {m - half, m + half};
}

}  // namespace tabeval
