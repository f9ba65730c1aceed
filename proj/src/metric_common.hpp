#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "tabeval/dataset.hpp"
#include "tabeval/metric_result.hpp"
#include "tabeval/models.hpp"
#include "tabeval/stats.hpp"
#include "tabeval/util.hpp"

namespace tabeval::internal {

/// Rows sorted lexicographically, so seeded resampling and fold plans do not
/// depend on the input row order.
inline EncodedTable canonical_rows(const EncodedTable& t) {
  auto ids = iota_ids(t.rows);
  std::stable_sort(ids.begin(), ids.end(), [&](std::size_t a, std::size_t b) {
    auto ra = t.row(a), rb = t.row(b);
    return std::lexicographical_compare(ra.begin(), ra.end(), rb.begin(), rb.end());
  });
  return t.take_rows(ids);
}

/// Column order by name and categorical codes ranked by label, so models and
/// resampling see the same input however the caller ordered rows, columns or
/// first appearances of levels.
class CanonicalLayout {
 public:
  explicit CanonicalLayout(const NormalizationSpec& spec) {
    order_ = iota_ids(spec.size());
    std::sort(order_.begin(), order_.end(),
              [&](std::size_t a, std::size_t b) { return spec.entries[a].name < spec.entries[b].name; });
    position_.resize(order_.size());
    for (std::size_t p = 0; p < order_.size(); ++p) position_[order_[p]] = p;
    recode_.resize(spec.size());
    for (std::size_t j = 0; j < spec.size(); ++j) {
      const auto& levels = spec.entries[j].levels;
      auto ids = iota_ids(levels.size());
      std::sort(ids.begin(), ids.end(), [&](std::size_t a, std::size_t b) { return levels[a] < levels[b]; });
      recode_[j].resize(levels.size());
      for (std::size_t r = 0; r < ids.size(); ++r) recode_[j][ids[r]] = static_cast<double>(r);
    }
  }

  /// Canonical position of original column j.
  std::size_t position(std::size_t j) const { return position_[j]; }
  std::size_t original(std::size_t p) const { return order_[p]; }

  EncodedTable apply(const EncodedTable& t, bool sort_rows = true) const {
    EncodedTable out;
    out.rows = t.rows;
    out.cols = t.cols;
    out.values.resize(t.values.size());
    for (std::size_t p = 0; p < t.cols; ++p) {
      const std::size_t j = order_[p];
      out.kinds.push_back(t.kinds[j]);
      out.n_levels.push_back(t.n_levels[j]);
      for (std::size_t i = 0; i < t.rows; ++i) {
        const double v = t.values[i * t.cols + j];
        out.values[i * t.cols + p] =
            t.kinds[j] == ColumnKind::Categorical ? recode_[j][static_cast<std::size_t>(v)] : v;
      }
    }
    return sort_rows ? canonical_rows(out) : out;
  }

 private:
  std::vector<std::size_t> order_;
  std::vector<std::size_t> position_;
  std::vector<std::vector<double>> recode_;
};

inline EncodedTable sample_rows(const EncodedTable& t, std::size_t k, Rng& rng) {
  if (k >= t.rows) return t;
  auto ids = sample_without_replacement(t.rows, k, rng);
  std::sort(ids.begin(), ids.end());
  return t.take_rows(ids);
}

inline std::vector<std::size_t> numerical_indices(const Table& t) {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < t.n_cols(); ++j) {
    if (t.column(j).is_numerical()) out.push_back(j);
  }
  return out;
}

inline Json matrix_json(const MatrixSummary& m) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < m.dim(); ++i) {
    Json row = Json::array();
    for (std::size_t j = 0; j < m.dim(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  Json j;
  j["names"] = m.names;
  j["values"] = std::move(rows);
  return j;
}

/// A fitted classifier, or a constant prediction when the training labels
/// hold a single class.
class LabelPredictor {
 public:
  LabelPredictor(const ModelSpec& spec, const FeatureMatrix& x, std::span<const double> y) {
    std::vector<double> distinct(y.begin(), y.end());
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (distinct.size() < 2) {
      constant_ = distinct.empty() ? 0.0 : distinct.front();
    } else {
      model_ = fit(spec, x, y);
    }
  }

  std::vector<double> predict(const FeatureMatrix& x) const {
    if (model_) return model_->predict(x);
    return std::vector<double>(x.rows, constant_);
  }

  bool is_constant() const { return !model_; }

 private:
  std::optional<FittedModel> model_;
  double constant_ = 0.0;
};

/// NNAA of `reference` against `synthetic`, averaged over equal-sized
/// synthetic batches when the synthetic rows outnumber the reference by more
/// than a factor of two. The error is set only when resampling happened.
std::pair<double, std::optional<double>> resampled_nnaa(const EncodedTable& reference,
                                                        const EncodedTable& synthetic,
                                                        DistanceKind kind, std::size_t n_resample,
                                                        std::uint64_t seed);

inline std::uint64_t metric_seed(std::uint64_t master, const std::string& key) {
  return derive_seed(master, key);
}

}  // namespace tabeval::internal
