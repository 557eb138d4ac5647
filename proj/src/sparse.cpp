#include "coreball/sparse.hpp"

namespace coreball {

double dot(const SparseVector& a, const SparseVector& b) {
  double sum = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.idx.size() && j < b.idx.size()) {
    if (a.idx[i] == b.idx[j]) {
      sum += a.val[i] * b.val[j];
      ++i;
      ++j;
    } else if (a.idx[i] < b.idx[j]) {
      ++i;
    } else {
      ++j;
    }
  }
  return sum;
}

double norm2(const SparseVector& a) {
  double sum = 0.0;
  for (double v : a.val) sum += v * v;
  return sum;
}

double squared_distance(const SparseVector& a, const SparseVector& b) {
  return norm2(a) + norm2(b) - 2.0 * dot(a, b);
}

}  // namespace coreball
