#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>
#include <vector>

#include "shapekit/common.hpp"
#include "shapekit/multiindex.hpp"

using namespace shapekit;

namespace {

long binom(int n, int k) {
  long v = 1;
  for (int j = 1; j <= k; ++j) v = v * (n - k + j) / j;
  return v;
}

}  // namespace

TEST_CASE("one-dimensional enumeration") {
  MultiIndexSet s = enumerate(1, 2);
  REQUIRE(s.m() == 3);
  CHECK(s.indices[0] == MultiIndex{0});
  CHECK(s.indices[1] == MultiIndex{1});
  CHECK(s.indices[2] == MultiIndex{2});
}

TEST_CASE("two-dimensional graded order") {
  MultiIndexSet s1 = enumerate(2, 1);
  REQUIRE(s1.m() == 3);
  CHECK(s1.indices == std::vector<MultiIndex>{{0, 0}, {1, 0}, {0, 1}});

  MultiIndexSet s2 = enumerate(2, 2);
  REQUIRE(s2.m() == 6);
  CHECK(s2.indices[3] == MultiIndex{2, 0});
  CHECK(s2.indices[4] == MultiIndex{1, 1});
  CHECK(s2.indices[5] == MultiIndex{0, 2});
}

TEST_CASE("size, distinctness, degree bound, grading") {
  for (int d = 1; d <= 4; ++d) {
    for (int s = 0; s <= 2; ++s) {
      MultiIndexSet set = enumerate(d, s);
      CHECK(set.m() == binom(s + d, d));
      std::set<MultiIndex> uniq(set.indices.begin(), set.indices.end());
      CHECK(static_cast<int>(uniq.size()) == set.m());
      CHECK(total_order(set.indices[0]) == 0);
      for (int p = 0; p < set.m(); ++p) {
        CHECK(total_order(set.indices[p]) <= s);
        if (p > 0)
          CHECK(total_order(set.indices[p - 1]) <= total_order(set.indices[p]));
      }
    }
  }
}

TEST_CASE("enumeration is deterministic") {
  MultiIndexSet a = enumerate(3, 2);
  MultiIndexSet b = enumerate(3, 2);
  CHECK(a.indices == b.indices);
}

TEST_CASE("argument validation") {
  CHECK_THROWS_AS(enumerate(0, 1), input_error);
  CHECK_THROWS_AS(enumerate(1, -1), input_error);
  CHECK_THROWS_AS(enumerate(1, 3), input_error);  // above the kernel ceiling
}

TEST_CASE("flat index block layout") {
  MultiIndexSet set = enumerate(1, 2);
  CHECK(flat_index(set, 0, 0, 3) == 0);
  CHECK(flat_index(set, 2, 1, 3) == 5);
  CHECK_THROWS_AS(flat_index(set, 3, 0, 3), input_error);
  CHECK_THROWS_AS(flat_index(set, 0, 3, 3), input_error);
  CHECK_THROWS_AS(unflatten(set, 9, 3), input_error);
}

TEST_CASE("flat index is a bijection onto 0..M-1") {
  MultiIndexSet set = enumerate(2, 2);
  const long N = 5;
  std::set<long> seen;
  for (int a = 0; a < set.m(); ++a) {
    for (long i = 0; i < N; ++i) {
      const long f = flat_index(set, i, a, N);
      CHECK(f >= 0);
      CHECK(f < N * set.m());
      seen.insert(f);
      auto [ri, ra] = unflatten(set, f, N);
      CHECK(ri == i);
      CHECK(ra == a);
    }
  }
  CHECK(static_cast<long>(seen.size()) == N * set.m());
}

TEST_CASE("string form round trip") {
  CHECK(to_string(MultiIndex{1, 0}) == "1.0");
  CHECK(to_string(MultiIndex{2}) == "2");
  CHECK(parse_multi_index("1.0", 2) == MultiIndex{1, 0});
  CHECK(parse_multi_index("0.0.2", 3) == MultiIndex{0, 0, 2});
  CHECK_THROWS_AS(parse_multi_index("1.x", 2), input_error);
  CHECK_THROWS_AS(parse_multi_index("1", 2), input_error);
  CHECK_THROWS_AS(parse_multi_index("-1.0", 2), input_error);
  CHECK_THROWS_AS(parse_multi_index("1.", 2), input_error);
}

TEST_CASE("find and active set") {
  MultiIndexSet set = enumerate(2, 2);
  CHECK(set.find(MultiIndex{1, 1}) == 4);
  CHECK(set.find(MultiIndex{3, 0}) == -1);
  ActiveSet all = ActiveSet::all(set);
  CHECK(all.count() == set.m());
  for (int p = 0; p < set.m(); ++p) CHECK(all.positions[p] == p);
}
