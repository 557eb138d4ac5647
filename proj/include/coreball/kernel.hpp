#pragma once

#include <string>

#include "coreball/sparse.hpp"

namespace coreball {

// Base Mercer kernel. `normalized()` reports whether k(x,x) is the same
// constant for every input, the condition the ball-equivalence (and hence
// the BC solver) depends on.
struct KernelSpec {
  enum class Kind { Rbf, Linear, PolyInhomogeneous, PolyHomogeneous };

  Kind kind = Kind::Rbf;
  double sigma2 = 1.0;  // Rbf
  double gamma = 1.0;   // PolyHomogeneous
  int degree = 2;       // both polynomial variants

  bool normalized() const { return kind == Kind::Rbf; }

  void validate() const;

  // Textual form used in model files, e.g. "rbf sigma2=0.5".
  std::string describe() const;
  static KernelSpec parse(const std::string& text);

  bool operator==(const KernelSpec&) const = default;
};

double kernel_eval(const KernelSpec& spec, const SparseVector& a, const SparseVector& b);

// x^d by plain left-to-right multiplication, so the result is reproducible
// across platforms (std::pow is not).
double ipow(double x, int d);

}  // namespace coreball
