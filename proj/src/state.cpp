#include "coreball/state.hpp"

#include <algorithm>

namespace coreball {

int DualState::insert(int row, double w, double cdot) {
  const auto it = std::lower_bound(coreset_.begin(), coreset_.end(), row);
  const int p = static_cast<int>(it - coreset_.begin());
  coreset_.insert(it, row);
  weight_.insert(weight_.begin() + p, w);
  center_dot_.insert(center_dot_.begin() + p, cdot);
  pos_[row] = p;
  for (std::size_t q = p + 1; q < coreset_.size(); ++q) pos_[coreset_[q]] = static_cast<int>(q);
  return p;
}

void DualState::remove_at(int p) {
  pos_[coreset_[p]] = -1;
  coreset_.erase(coreset_.begin() + p);
  weight_.erase(weight_.begin() + p);
  center_dot_.erase(center_dot_.begin() + p);
  for (std::size_t q = p; q < coreset_.size(); ++q) pos_[coreset_[q]] = static_cast<int>(q);
}

}  // namespace coreball
