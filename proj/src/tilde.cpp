#include "coreball/tilde.hpp"

#include <cmath>
#include <stdexcept>

namespace coreball {

TildeKernel::TildeKernel(std::vector<const SparseVector*> rows, std::vector<int> labels,
                         KernelSpec spec, double C, bool treat_as_normalized)
    : rows_(std::move(rows)),
      labels_(std::move(labels)),
      spec_(spec),
      C_(C),
      normalized_(treat_as_normalized) {
  spec_.validate();
  if (!(C_ > 0.0)) throw std::invalid_argument("C must be > 0");
  if (rows_.size() != labels_.size())
    throw std::invalid_argument("rows/labels size mismatch");
  for (int y : labels_)
    if (y != 1 && y != -1) throw std::invalid_argument("labels must be +-1");

  const int m = static_cast<int>(rows_.size());
  norms_.resize(m);
  diag_.resize(m);
  for (int i = 0; i < m; ++i) {
    norms_[i] = norm2(*rows_[i]);
    double k_ii = 0.0;
    switch (spec_.kind) {
      case KernelSpec::Kind::Rbf:
        k_ii = 1.0;
        break;
      case KernelSpec::Kind::Linear:
        k_ii = norms_[i];
        break;
      case KernelSpec::Kind::PolyInhomogeneous:
        k_ii = ipow(norms_[i] + 1.0, spec_.degree);
        break;
      case KernelSpec::Kind::PolyHomogeneous:
        k_ii = ipow(spec_.gamma * norms_[i], spec_.degree);
        break;
    }
    diag_[i] = (k_ii + 1.0) + 1.0 / C_;
  }

  if (normalized_) {
    delta2_ = 2.0 + 1.0 / C_;
    for (int i = 0; i < m; ++i)
      if (std::abs(diag_[i] - delta2_) > 1e-12)
        throw std::logic_error("kernel flagged normalized but diagonal is not constant");
  } else {
    delta2_ = diag_[0];
    for (int i = 1; i < m; ++i) delta2_ = std::max(delta2_, diag_[i]);
  }
}

double TildeKernel::eval(int i, int j) const {
  if (i < 0 || i >= rows() || j < 0 || j >= rows())
    throw std::out_of_range("TildeKernel row index out of range");
  if (i == j) return diag_[i];
  double k;
  switch (spec_.kind) {
    case KernelSpec::Kind::Rbf: {
      const double d2 = norms_[i] + norms_[j] - 2.0 * dot(*rows_[i], *rows_[j]);
      k = std::exp(-d2 / (2.0 * spec_.sigma2));
      break;
    }
    case KernelSpec::Kind::Linear:
      k = dot(*rows_[i], *rows_[j]);
      break;
    case KernelSpec::Kind::PolyInhomogeneous:
      k = ipow(dot(*rows_[i], *rows_[j]) + 1.0, spec_.degree);
      break;
    case KernelSpec::Kind::PolyHomogeneous:
      k = ipow(spec_.gamma * dot(*rows_[i], *rows_[j]), spec_.degree);
      break;
    default:
      k = 0.0;
  }
  return static_cast<double>(labels_[i] * labels_[j]) * (k + 1.0);
}

}  // namespace coreball
