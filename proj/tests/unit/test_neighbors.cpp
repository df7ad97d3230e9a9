#include <doctest.h>

#include <cmath>
#include <random>

#include "credaug/error.hpp"
#include "credaug/neighbors.hpp"
#include "credaug/parallel.hpp"
#include "oracles.hpp"

using namespace credaug;

TEST_CASE("knn agrees with a full sort, including ties") {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    std::mt19937_64 gen(seed);
    const std::size_t n = 8 + gen() % 60;
    const std::size_t k = 1 + gen() % 7;
    // Coarse integer grid so distance ties are common.
    Matrix refs(n, 2);
    for (std::size_t i = 0; i < n; ++i) {
      refs(i, 0) = static_cast<double>(gen() % 5);
      refs(i, 1) = static_cast<double>(gen() % 5);
    }
    const bool exclude = seed % 2 == 0;
    const Matrix queries = exclude ? refs : oracle::blob(gen, 10, 2, 2.0);
    const auto t = knn(queries, refs, k, exclude);
    for (std::size_t q = 0; q < queries.rows(); ++q) {
      const auto expect = oracle::neighbors_by_sorting(refs, queries.row(q), q, exclude);
      for (std::size_t r = 0; r < k; ++r) {
        REQUIRE(t.index(q, r) == expect[r]);
        CHECK(t.distance(q, r) ==
              std::sqrt(oracle::squared_distance(queries.row(q), refs.row(expect[r]))));
      }
    }
  }
}

TEST_CASE("exclude_self with queries as a prefix of references") {
  Matrix refs{{0, 0}, {1, 0}, {0, 0}, {5, 5}};
  Matrix queries{{0, 0}, {1, 0}};
  const auto t = knn(queries, refs, 2, true);
  CHECK(t.index(0, 0) == 2);  // duplicate point, not itself
  CHECK(t.distance(0, 0) == 0.0);
  CHECK(t.index(0, 1) == 1);
  CHECK(t.index(1, 0) == 0);  // tie between rows 0 and 2 goes to 0
  CHECK(t.index(1, 1) == 2);
}

TEST_CASE("knn errors") {
  Matrix refs{{0, 0}, {1, 1}, {2, 2}};
  CHECK_THROWS_AS(knn(refs, refs, 3, true), InsufficientNeighborsError);
  CHECK_NOTHROW(knn(refs, refs, 3, false));
  CHECK_THROWS_AS(knn(refs, refs, 0, false), InsufficientNeighborsError);
  CHECK_THROWS_AS(knn(Matrix{{1, 2, 3}}, refs, 1, false), SchemaError);
}

TEST_CASE("knn output does not depend on the thread count") {
  std::mt19937_64 gen(3);
  const Matrix refs = oracle::blob(gen, 500, 4, 0.0);
  set_num_threads(1);
  const auto a = knn(refs, refs, 5, true);
  set_num_threads(4);
  const auto b = knn(refs, refs, 5, true);
  set_num_threads(1);
  CHECK(a.indices == b.indices);
  CHECK(a.distances == b.distances);
}
