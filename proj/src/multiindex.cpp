#include "shapekit/multiindex.hpp"

#include <algorithm>
#include <sstream>

#include "shapekit/common.hpp"
#include "shapekit/kernel.hpp"

namespace shapekit {

int total_order(const MultiIndex& a) {
  int t = 0;
  for (int v : a) t += v;
  return t;
}

namespace {

void tuples_of_degree(int d, int degree, MultiIndex& prefix,
                      std::vector<MultiIndex>& out) {
  if (d == 1) {
    prefix.push_back(degree);
    out.push_back(prefix);
    prefix.pop_back();
    return;
  }
  for (int v = 0; v <= degree; ++v) {
    prefix.push_back(v);
    tuples_of_degree(d - 1, degree - v, prefix, out);
    prefix.pop_back();
  }
}

}  // namespace

MultiIndexSet enumerate(int d, int s) {
  if (d < 1) throw input_error("multi-index dimension must be >= 1");
  if (s < 0) throw input_error("multi-index order must be >= 0");
  if (s > kmax_derivative_order)
    throw input_error("derivative order s exceeds the supported maximum of " +
                      std::to_string(kmax_derivative_order));
  MultiIndexSet set;
  set.d = d;
  set.s = s;
  for (int degree = 0; degree <= s; ++degree) {
    std::vector<MultiIndex> level;
    MultiIndex prefix;
    tuples_of_degree(d, degree, prefix, level);
    // Within a degree the leading variables come first: (1,0) before (0,1),
    // (2,0) before (1,1) before (0,2).
    std::sort(level.begin(), level.end(), std::greater<MultiIndex>());
    set.indices.insert(set.indices.end(), level.begin(), level.end());
  }
  return set;
}

int MultiIndexSet::find(const MultiIndex& a) const {
  for (int p = 0; p < m(); ++p)
    if (indices[p] == a) return p;
  return -1;
}

ActiveSet ActiveSet::all(const MultiIndexSet& set) {
  ActiveSet active;
  active.positions.resize(set.m());
  for (int p = 0; p < set.m(); ++p) active.positions[p] = p;
  return active;
}

long flat_index(const MultiIndexSet& set, long i, int a, long N) {
  if (i < 0 || i >= N) throw input_error("flat_index: sample index out of range");
  if (a < 0 || a >= set.m())
    throw input_error("flat_index: multi-index position out of range");
  return static_cast<long>(a) * N + i;
}

std::pair<long, int> unflatten(const MultiIndexSet& set, long flat, long N) {
  if (flat < 0 || flat >= N * set.m())
    throw input_error("unflatten: flat index out of range");
  return {flat % N, static_cast<int>(flat / N)};
}

std::string to_string(const MultiIndex& a) {
  std::ostringstream os;
  for (size_t j = 0; j < a.size(); ++j) {
    if (j) os << '.';
    os << a[j];
  }
  return os.str();
}

MultiIndex parse_multi_index(const std::string& text, int d) {
  MultiIndex a;
  std::istringstream is(text);
  std::string part;
  while (std::getline(is, part, '.')) {
    size_t used = 0;
    int v;
    try {
      v = std::stoi(part, &used);
    } catch (const std::exception&) {
      throw input_error("bad multi-index component '" + part + "' in '" + text + "'");
    }
    if (used != part.size() || v < 0)
      throw input_error("bad multi-index component '" + part + "' in '" + text + "'");
    a.push_back(v);
  }
  if (static_cast<int>(a.size()) != d)
    throw input_error("multi-index '" + text + "' has " +
                      std::to_string(a.size()) + " components, expected " +
                      std::to_string(d));
  return a;
}

}  // namespace shapekit
