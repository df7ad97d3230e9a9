#include "credaug/neighbors.hpp"

#include <cmath>
#include <string>

#include "credaug/error.hpp"
#include "credaug/parallel.hpp"

namespace credaug {

NeighborTable knn(const Matrix& queries, const Matrix& references,
                  std::size_t k, bool exclude_self) {
  if (k == 0) throw InsufficientNeighborsError("k must be positive");
  if (!queries.empty() && !references.empty() &&
      queries.cols() != references.cols()) {
    throw SchemaError("query and reference widths differ");
  }
  if (exclude_self && queries.rows() > references.rows()) {
    throw SchemaError("exclude_self needs queries to be a prefix of references");
  }
  const std::size_t usable = references.rows() - (exclude_self ? 1 : 0);
  if (references.rows() == 0 || k > usable) {
    throw InsufficientNeighborsError(
        "requested k=" + std::to_string(k) + " neighbors but only " +
        std::to_string(references.empty() ? 0 : usable) +
        " references are available");
  }

  NeighborTable table;
  table.k = k;
  table.indices.resize(queries.rows() * k);
  table.distances.resize(queries.rows() * k);
  const std::size_t dims = references.cols();

  parallel_for(queries.rows(), [&](std::size_t q) {
    auto idx = std::span(table.indices).subspan(q * k, k);
    auto dist = std::span(table.distances).subspan(q * k, k);
    std::size_t filled = 0;
    const double* qp = queries.row(q).data();
    for (std::size_t r = 0; r < references.rows(); ++r) {
      if (exclude_self && r == q) continue;
      const double* rp = references.row(r).data();
      double d2 = 0;
      for (std::size_t j = 0; j < dims; ++j) {
        const double diff = qp[j] - rp[j];
        d2 += diff * diff;
      }
      // References arrive in ascending index order, so an equal distance
      // never displaces an earlier entry.
      if (filled == k && !(d2 < dist[k - 1])) continue;
      std::size_t pos = filled < k ? filled++ : k - 1;
      while (pos > 0 && d2 < dist[pos - 1]) {
        dist[pos] = dist[pos - 1];
        idx[pos] = idx[pos - 1];
        --pos;
      }
      dist[pos] = d2;
      idx[pos] = r;
    }
    for (auto& d : dist) d = std::sqrt(d);
  });
  return table;
}

}  // namespace credaug
