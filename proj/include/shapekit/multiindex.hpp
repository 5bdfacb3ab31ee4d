#pragma once

#include <string>
#include <vector>

namespace shapekit {

using MultiIndex = std::vector<int>;

// All multi-indices with |alpha| <= s in d variables, graded order: total
// degree ascending, and within a degree earlier coordinates carry the higher
// order first, so in d=2 the order is (0,0), (1,0), (0,1), (2,0), (1,1),
// (0,2).  Position 0 is always the plain function value.
struct MultiIndexSet {
  int d = 0;
  int s = 0;
  std::vector<MultiIndex> indices;

  int m() const { return static_cast<int>(indices.size()); }
  int find(const MultiIndex& a) const;  // position, or -1
};

// Subset of MultiIndexSet positions whose weights are not identically zero.
// Dropping a position is equivalent to keeping it with zero weights; the
// Gram blocks for dropped positions are simply never built.
struct ActiveSet {
  std::vector<int> positions;  // sorted, unique, non-empty

  static ActiveSet all(const MultiIndexSet& set);
  int count() const { return static_cast<int>(positions.size()); }
};

MultiIndexSet enumerate(int d, int s);

int total_order(const MultiIndex& a);

// Flat position of (sample i, multi-index block a) in the stacked basis:
// block-major, all N samples of block a are contiguous.
long flat_index(const MultiIndexSet& set, long i, int a, long N);
std::pair<long, int> unflatten(const MultiIndexSet& set, long flat, long N);

// Dot-separated string form "a1.a2...ad" used in CSV headers and config.
std::string to_string(const MultiIndex& a);
MultiIndex parse_multi_index(const std::string& text, int d);

}  // namespace shapekit
