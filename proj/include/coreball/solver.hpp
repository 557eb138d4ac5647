#pragma once

#include <vector>

#include "coreball/cache.hpp"
#include "coreball/config.hpp"
#include "coreball/reduced_qp.hpp"
#include "coreball/rng.hpp"
#include "coreball/state.hpp"
#include "coreball/tilde.hpp"

namespace coreball {

// Trains the ball formulation of the L2-SVM dual:
//
//   maximize g(a) = delta2 - a'Ka   over the unit simplex,
//
// by one of three strategies sharing the same furthest-point machinery and
// stopping rule:
//
//   Fw   toward-vertex steps with a closed-form line search;
//   Mfw  adds away steps that shrink (and eventually drop) coreset weights,
//        choosing whichever direction has the larger directional derivative;
//   Bc   grows the index set one furthest point at a time and re-solves the
//        reduced QP with a pairwise coordinate solver (needs a kernel with
//        constant diagonal).
//
// All comparisons driving selection and stopping are expressed through
//
//   gamma2(i) = delta2 + R - 2 (Ka)_i,
//
// which for a normalized kernel is the squared distance of point i from the
// current center; in general it is an affine image of the objective gradient,
// so the same code certifies (1 - (2e+e^2)) optimality for any Mercer kernel.
// Line searches use the exact single-coordinate maximizer of g, which reduces
// to the familiar radius-ratio formula when the diagonal is constant.
//
// A solver owns its state, RNG and kernel cache; instances over the same
// TildeKernel may run concurrently.
class MebSolver {
 public:
  struct Candidate {
    int row = -1;
    double gamma2 = 0.0;
    double center_dot = 0.0;  // (Ka)_row at evaluation time
    double weight = 0.0;      // alpha_row, filled for coreset candidates
  };

  MebSolver(const TildeKernel& tk, const SolverConfig& cfg);

  // Initialization strategies.
  void init_two_point();
  void init_random_meb();

  // Gradient-driven primitives.
  double center_dot(int row);
  double gamma2(int row);
  Candidate furthest_candidate();
  Candidate furthest_exhaustive();
  Candidate nearest_in_coreset() const;
  bool check_stop(double delta_plus) const;

  // Step primitives. Line searches return the clipped optimal stepsize;
  // apply steps keep weights, coreset, center products and radius in sync.
  double fw_line_search(const Candidate& c) const;
  void fw_apply_step(const Candidate& c, double lambda);
  double away_line_search(const Candidate& c) const;
  void away_apply_step(const Candidate& c, double lambda);

  TrainStats train(Algorithm alg);

  const DualState& state() const { return state_; }
  const TrainStats& stats() const { return stats_; }
  const TildeKernel& kernel() const { return *tk_; }
  Rng& rng() { return rng_; }

  // Rebuilds the state from explicit weights (testing and BC refresh).
  void load_state(std::span<const int> rows, std::span<const double> weights);

 private:
  void init();
  void apply_common(int protect_row);
  void prune_small_weights(int protect_row);
  void drop_row(int p);
  void renormalize();
  void periodic_resync();
  void dense_verify() const;
  void rebuild_all_dot();
  void step_all_dot(int vertex, double scale, double step);
  int m() const { return tk_->rows(); }

  void train_fw_mfw(Algorithm alg);
  void train_bc();

  const TildeKernel* tk_;
  SolverConfig cfg_;
  Rng rng_;
  KernelCache cache_;
  DualState state_;
  TrainStats stats_;
  std::vector<double> col_;  // scratch column

  // With sample_size >= m every furthest-point search walks all rows, so the
  // products (Ka)_i are kept for the whole dataset and updated per step. One
  // kernel column per iteration replaces an m * |coreset| rescan.
  bool track_all_rows_ = false;
  std::vector<double> all_dot_;
  std::vector<int> all_rows_;  // 0..m-1, the column request for all_dot_
};

// Convenience wrappers: construct, train, and hand back the final iterate.
std::pair<DualState, TrainStats> train_fw(const TildeKernel& tk, const SolverConfig& cfg);
std::pair<DualState, TrainStats> train_mfw(const TildeKernel& tk, const SolverConfig& cfg);
std::pair<DualState, TrainStats> train_bc(const TildeKernel& tk, const SolverConfig& cfg);
std::pair<DualState, TrainStats> train_with(Algorithm alg, const TildeKernel& tk,
                                            const SolverConfig& cfg);

}  // namespace coreball
