#pragma once

#include <span>
#include <vector>

namespace coreball {

// Iterate of the ball solvers: simplex weights stored sparsely over the
// coreset (the support), plus the cached quadratic form R = a'Ka and squared
// radius r2 = delta2 - R. center_dot keeps (Ka)_j for every coreset row j,
// the quantity every gradient expression is built from; the solver maintains
// it incrementally alongside the weights.
class DualState {
 public:
  void reset(int m) {
    pos_.assign(m, -1);
    coreset_.clear();
    weight_.clear();
    center_dot_.clear();
    R_ = r2_ = 0.0;
    iteration_ = 0;
  }

  // Empties the support but keeps the iteration counter (used when a whole
  // new weight vector replaces the old one, as after a reduced QP solve).
  void clear_support() {
    for (int row : coreset_) pos_[row] = -1;
    coreset_.clear();
    weight_.clear();
    center_dot_.clear();
  }

  int support_size() const { return static_cast<int>(coreset_.size()); }
  std::span<const int> coreset() const { return coreset_; }
  std::span<const double> weights() const { return weight_; }
  std::span<const double> center_dot() const { return center_dot_; }

  bool in_coreset(int row) const { return pos_[row] >= 0; }
  int position(int row) const { return pos_[row]; }

  double alpha(int row) const {
    const int p = pos_[row];
    return p < 0 ? 0.0 : weight_[p];
  }

  double sum_weights() const {
    double s = 0.0;
    for (double w : weight_) s += w;
    return s;
  }

  double R() const { return R_; }
  double r2() const { return r2_; }
  long iteration() const { return iteration_; }

  // Mutators used by the solver. Insertion keeps the coreset sorted by row
  // so scans (and therefore tie-breaks) are deterministic.
  int insert(int row, double w, double cdot);
  void remove_at(int p);
  double& weight_at(int p) { return weight_[p]; }
  double& center_dot_at(int p) { return center_dot_[p]; }
  void set_R(double R, double delta2) {
    R_ = R;
    r2_ = delta2 - R;
  }
  void set_r2(double r2, double delta2) {
    r2_ = r2;
    R_ = delta2 - r2;
  }
  void bump_iteration() { ++iteration_; }

 private:
  std::vector<int> coreset_;
  std::vector<double> weight_;
  std::vector<double> center_dot_;
  std::vector<int> pos_;  // row -> position in coreset_, -1 if absent
  double R_ = 0.0;
  double r2_ = 0.0;
  long iteration_ = 0;
};

}  // namespace coreball
