#pragma once

#include <span>
#include <vector>

#include "coreball/kernel.hpp"
#include "coreball/sparse.hpp"

namespace coreball {

// Labeled, regularized kernel over the rows of one binary task:
//
//   ktilde(i,j) = y_i y_j (k(x_i,x_j) + 1) + [i==j]/C
//
// For a normalized base kernel every diagonal entry equals 2 + 1/C and that
// constant is delta2(). Otherwise delta2() is the largest diagonal entry,
// which keeps delta2 - a'Ka nonnegative over the simplex so the relative
// stopping test stays meaningful.
//
// Immutable after construction; safe to share across concurrent solvers.
class TildeKernel {
 public:
  TildeKernel(std::vector<const SparseVector*> rows, std::vector<int> labels,
              KernelSpec spec, double C, bool treat_as_normalized);

  TildeKernel(std::vector<const SparseVector*> rows, std::vector<int> labels,
              KernelSpec spec, double C)
      : TildeKernel(std::move(rows), std::move(labels), spec, C, spec.normalized()) {}

  int rows() const { return static_cast<int>(rows_.size()); }
  double eval(int i, int j) const;
  double diag(int i) const { return diag_[i]; }
  std::span<const double> diag() const { return diag_; }
  double delta2() const { return delta2_; }
  bool normalized() const { return normalized_; }
  double C() const { return C_; }
  const KernelSpec& spec() const { return spec_; }
  const SparseVector& point(int i) const { return *rows_[i]; }
  int label(int i) const { return labels_[i]; }

 private:
  std::vector<const SparseVector*> rows_;
  std::vector<int> labels_;
  KernelSpec spec_;
  double C_;
  bool normalized_;
  std::vector<double> norms_;  // per-row ||x||^2, the hot term of the RBF path
  std::vector<double> diag_;
  double delta2_ = 0.0;
};

}  // namespace coreball
