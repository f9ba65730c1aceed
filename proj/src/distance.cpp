#include "tabeval/distance.hpp"

#include <algorithm>
#include <cmath>

#include "tabeval/util.hpp"

namespace tabeval {

double gower_distance(const Record& a, const Record& b, std::span<const double> ranges) {
  if (a.size() != b.size() || a.size() != ranges.size()) {
    throw DataError("gower_distance: records and ranges differ in length");
  }
  if (a.empty()) return 0.0;
  double total = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    if (a[j].index() != b[j].index()) throw DataError("gower_distance: column types differ");
    if (const auto* x = std::get_if<double>(&a[j])) {
      const double y = std::get<double>(b[j]);
      if (ranges[j] > 0.0) total += std::abs(*x - y) / ranges[j];
    } else if (std::get<std::string>(a[j]) != std::get<std::string>(b[j])) {
      total += 1.0;
    }
  }
  return total / static_cast<double>(a.size());
}

double euclidean_distance(const Record& a, const Record& b) {
  if (a.size() != b.size()) throw DataError("euclidean_distance: records differ in length");
  double sq = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    if (a[j].index() != b[j].index()) throw DataError("euclidean_distance: column types differ");
    if (const auto* x = std::get_if<double>(&a[j])) {
      const double d = *x - std::get<double>(b[j]);
      sq += d * d;
    } else if (std::get<std::string>(a[j]) != std::get<std::string>(b[j])) {
      sq += 2.0;
    }
  }
  return std::sqrt(sq);
}

RowDistance::RowDistance(DistanceKind kind, std::vector<ColumnKind> kinds,
                         std::vector<double> weights)
    : kind_(kind), weights_(std::move(weights)) {
  numerical_.reserve(kinds.size());
  for (auto k : kinds) numerical_.push_back(k == ColumnKind::Numerical ? 1 : 0);
  if (!weights_.empty() && weights_.size() != kinds.size()) {
    throw DataError("distance weights do not match the column count");
  }
  if (weights_.empty()) {
    weight_sum_ = static_cast<double>(kinds.size());
  } else {
    for (double w : weights_) {
      if (!(w >= 0.0) || !std::isfinite(w)) throw DataError("distance weights must be finite and >= 0");
      weight_sum_ += w;
    }
  }
}

double RowDistance::operator()(std::span<const double> a, std::span<const double> b) const {
  const std::size_t p = numerical_.size();
  double total = 0.0;
  if (kind_ == DistanceKind::Gower) {
    for (std::size_t j = 0; j < p; ++j) {
      const double term = numerical_[j] ? std::abs(a[j] - b[j]) : (a[j] != b[j] ? 1.0 : 0.0);
      total += weights_.empty() ? term : weights_[j] * term;
    }
    return weight_sum_ > 0.0 ? total / weight_sum_ : 0.0;
  }
  for (std::size_t j = 0; j < p; ++j) {
    double term;
    if (numerical_[j]) {
      const double d = a[j] - b[j];
      term = d * d;
    } else {
      term = a[j] != b[j] ? 2.0 : 0.0;
    }
    total += weights_.empty() ? term : weights_[j] * term;
  }
  return std::sqrt(total);
}

std::vector<double> NeighborResult::distances(std::size_t k) const {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.at(k).distance);
  return out;
}

DistanceIndex::DistanceIndex(EncodedTable reference, DistanceKind kind, std::vector<double> weights)
    : reference_(std::move(reference)),
      distance_(kind, reference_.kinds, std::move(weights)) {}

NeighborResult DistanceIndex::query(const EncodedTable& query, std::size_t k,
                                    bool leave_one_out) const {
  if (k == 0) throw DataError("nearest-neighbour query needs k >= 1");
  if (query.cols != reference_.cols) throw DataError("query and reference schemas differ");
  if (leave_one_out && query.rows != reference_.rows) {
    throw DataError("leave-one-out queries require the reference table itself");
  }
  const std::size_t available = reference_.rows - (leave_one_out ? 1 : 0);
  if (reference_.rows == 0 || k > available) {
    throw DataError("k = " + std::to_string(k) + " exceeds the " + std::to_string(available) +
                    " available reference rows");
  }
  auto closer = [](const Neighbor& x, const Neighbor& y) {
    return x.distance < y.distance || (x.distance == y.distance && x.id < y.id);
  };

  NeighborResult result;
  result.rows.resize(query.rows);
  parallel_for(query.rows, [&](std::size_t i) {
    std::vector<Neighbor> all;
    all.reserve(reference_.rows);
    const auto q = query.row(i);
    for (std::size_t r = 0; r < reference_.rows; ++r) {
      if (leave_one_out && r == i) continue;
      all.push_back({r, distance_(q, reference_.row(r))});
    }
    std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k), all.end(), closer);
    all.resize(k);
    result.rows[i] = std::move(all);
  });
  return result;
}

NeighborResult nn_distances(const EncodedTable& query, const EncodedTable& reference,
                            std::size_t k, bool leave_one_out, DistanceKind kind) {
  return DistanceIndex(reference, kind).query(query, k, leave_one_out);
}

}  // namespace tabeval
