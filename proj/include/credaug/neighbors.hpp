#pragma once

#include <cstddef>
#include <vector>

#include "credaug/matrix.hpp"

namespace credaug {

struct NeighborTable {
  std::size_t k = 0;
  std::vector<std::size_t> indices;  // n_queries x k, row-major
  std::vector<double> distances;     // n_queries x k, row-major

  std::size_t queries() const noexcept { return k ? indices.size() / k : 0; }
  std::size_t index(std::size_t q, std::size_t r) const noexcept {
    return indices[q * k + r];
  }
  double distance(std::size_t q, std::size_t r) const noexcept {
    return distances[q * k + r];
  }
};

/// Exact k nearest references for every query under Euclidean distance.
/// Neighbors are ordered by (distance, reference index), so ties always go
/// to the smaller index.
///
/// With exclude_self, query row q is taken to be reference row q and is never
/// returned as its own neighbor. This covers both queries == references and
/// the case where the queries are a leading block of the references (minority
/// rows stacked above majority rows).
///
/// Throws InsufficientNeighborsError if fewer than k references remain.
NeighborTable knn(const Matrix& queries, const Matrix& references,
                  std::size_t k, bool exclude_self);

}  // namespace credaug
