#pragma once

#include <span>
#include <vector>

#include "coreball/cache.hpp"
#include "coreball/config.hpp"
#include "coreball/tilde.hpp"

namespace coreball {

struct ReducedQpResult {
  bool converged = false;
  long steps = 0;
  double R = 0.0;                  // final a'Ka over the index set
  std::vector<double> center_dot;  // final (Ka)_j, parallel to index_set
};

// Maximizes -a'Ka over the simplex restricted to `index_set` (sorted) by
// most-violating-pair coordinate steps: pick the largest gradient component
// over the set and the smallest over the support, move the exact two-variable
// optimum between them, repeat until
//
//   max_i grad_i - min_{j: a_j>0} grad_j <= inner_eps * (delta2 - a'Ka).
//
// `alpha` enters as a feasible warm start on index_set and leaves holding the
// solution.
ReducedQpResult reduced_qp_solve(const TildeKernel& tk, KernelCache& cache,
                                 std::span<const int> index_set,
                                 std::vector<double>& alpha, double inner_eps,
                                 long iter_cap, TrainStats& stats);

}  // namespace coreball
