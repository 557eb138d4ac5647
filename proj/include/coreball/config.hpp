#pragma once

#include <cstdint>
#include <functional>

namespace coreball {

enum class Algorithm { Fw, Mfw, Bc };

enum class InitPolicy { TwoPoint, RandomMeb };

// One line of the per-iteration trace, also fed to test observers.
struct IterationTrace {
  long iteration = 0;
  char step = '?';       // 'f' FW, 'a' away, 'd' drop, 'q' reduced-QP (BC)
  double delta_plus = 0.0;
  double delta_minus = 0.0;  // NaN when the algorithm does not compute it
  double r2 = 0.0;
  int coreset_size = 0;
};

struct SolverConfig {
  double epsilon = 1e-6;         // relative stopping tolerance, in (0,1)
  int sample_size = 59;          // rows scanned per furthest-point search
  long max_iterations = 10'000'000;
  std::uint64_t seed = 0;
  InitPolicy init = InitPolicy::RandomMeb;
  int init_subset = 20;          // p for the random-ball initialization
  double zero_tolerance = 1e-12; // weights at or below this are pruned
  std::size_t cache_bytes = 256ull << 20;
  bool exact_final_check = true; // certify termination with a full scan

  // Test hook: when > 0, recompute the quadratic form densely every
  // `dense_check_every` steps and fail loudly on >1e-8 relative drift.
  long dense_check_every = 0;

  std::function<void(const IterationTrace&)> trace;

  void validate(int m) const;
};

struct TrainStats {
  long iterations = 0;
  long fw_steps = 0;
  long away_steps = 0;
  long drop_steps = 0;
  long inner_qp_steps = 0;  // pairwise updates spent in reduced QP solves
  std::uint64_t kernel_evals = 0;
  std::uint64_t cache_hits = 0;
  double wall_time_seconds = 0.0;
  double final_objective = 0.0;  // SVM dual value -a'Ka
  double final_r2 = 0.0;
  int coreset_size = 0;
  bool converged = false;
  bool init_fallback = false;  // random-ball init fell back to two-point
};

}  // namespace coreball
