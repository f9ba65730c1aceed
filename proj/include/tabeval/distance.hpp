#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "tabeval/dataset.hpp"

namespace tabeval {

/// One cell of a raw mixed-type record.
using Cell = std::variant<double, std::string>;
using Record = std::vector<Cell>;

/// Gower distance between raw records. `ranges` holds one entry per column;
/// entries for categorical columns are ignored, a zero range makes a
/// numerical column contribute 0.
double gower_distance(const Record& a, const Record& b, std::span<const double> ranges);

/// Euclidean distance between normalized raw records with categoricals
/// one-hot expanded (a level mismatch contributes 2 to the squared norm).
double euclidean_distance(const Record& a, const Record& b);

/// Distance between two rows of encoded tables sharing one schema. Optional
/// per-column weights scale each attribute's contribution; for Gower the
/// weighted sum is divided by the total weight.
class RowDistance {
 public:
  RowDistance(DistanceKind kind, std::vector<ColumnKind> kinds, std::vector<double> weights = {});

  double operator()(std::span<const double> a, std::span<const double> b) const;
  DistanceKind kind() const { return kind_; }

 private:
  DistanceKind kind_;
  std::vector<char> numerical_;
  std::vector<double> weights_;
  double weight_sum_ = 0.0;
};

struct Neighbor {
  std::size_t id = 0;
  double distance = 0.0;

  bool operator==(const Neighbor&) const = default;
};

/// For every query row, its k nearest reference rows by increasing distance.
struct NeighborResult {
  std::vector<std::vector<Neighbor>> rows;

  std::size_t size() const { return rows.size(); }
  const std::vector<Neighbor>& operator[](std::size_t i) const { return rows[i]; }
  /// Distances to the nearest (k = 0) or k-th nearest neighbour, per query row.
  std::vector<double> distances(std::size_t k = 0) const;
};

/// Exact nearest-neighbour search over an immutable encoded reference table.
class DistanceIndex {
 public:
  DistanceIndex(EncodedTable reference, DistanceKind kind, std::vector<double> weights = {});

  /// Ties are broken by the lower reference row id. With `leave_one_out`,
  /// query row i never matches reference row i (query must be the reference).
  NeighborResult query(const EncodedTable& query, std::size_t k, bool leave_one_out = false) const;

  const EncodedTable& reference() const { return reference_; }
  const RowDistance& metric() const { return distance_; }

 private:
  EncodedTable reference_;
  RowDistance distance_;
};

NeighborResult nn_distances(const EncodedTable& query, const EncodedTable& reference,
                            std::size_t k, bool leave_one_out, DistanceKind kind);

}  // namespace tabeval
