#pragma once

#include <cstddef>
#include <vector>

namespace coreball {

// Sparse feature row. Indices are 0-based internally (the LIBSVM parser
// converts from the 1-based on-disk convention), strictly increasing, and
// never paired with a stored zero.
struct SparseVector {
  std::vector<int> idx;
  std::vector<double> val;

  std::size_t nnz() const { return idx.size(); }

  void push_back(int i, double v) {
    idx.push_back(i);
    val.push_back(v);
  }

  bool operator==(const SparseVector&) const = default;
};

double dot(const SparseVector& a, const SparseVector& b);
double norm2(const SparseVector& a);
double squared_distance(const SparseVector& a, const SparseVector& b);

struct Sample {
  SparseVector features;
  int label = 0;

  bool operator==(const Sample&) const = default;
};

struct Dataset {
  std::vector<Sample> samples;
  int num_features = 0;        // highest 1-based feature index seen
  std::vector<int> classes;    // sorted distinct labels

  std::size_t size() const { return samples.size(); }

  bool operator==(const Dataset&) const = default;
};

// One binary task of the one-versus-one decomposition. The class with the
// smaller id is always mapped to y = +1 so a pair trains identically no
// matter how the dataset was ordered.
struct BinarySubproblem {
  int positive_class = 0;
  int negative_class = 0;
  std::vector<std::pair<int, int>> rows;  // (dataset row, y = +-1)
};

}  // namespace coreball
