#include "coreball/reduced_qp.hpp"

#include <cmath>
#include <stdexcept>

namespace coreball {

ReducedQpResult reduced_qp_solve(const TildeKernel& tk, KernelCache& cache,
                                 std::span<const int> index_set,
                                 std::vector<double>& alpha, double inner_eps,
                                 long iter_cap, TrainStats& stats) {
  const int n = static_cast<int>(index_set.size());
  if (n == 0) throw std::invalid_argument("reduced QP needs a non-empty index set");
  if (static_cast<int>(alpha.size()) != n)
    throw std::invalid_argument("warm start size mismatch");

  ReducedQpResult res;
  if (n == 1) {
    alpha[0] = 1.0;
    res.R = tk.diag(index_set[0]);
    res.center_dot = {res.R};
    res.converged = true;
    return res;
  }

  // d_p = (Ka)_p over the index set, assembled column by column.
  std::vector<double> d(n, 0.0);
  std::vector<double> col(n);
  double R = 0.0;
  for (int p = 0; p < n; ++p) {
    if (alpha[p] == 0.0) continue;
    cache.column(tk, index_set[p], index_set, col, stats);
    for (int q = 0; q < n; ++q) d[q] += alpha[p] * col[q];
  }
  for (int p = 0; p < n; ++p) R += alpha[p] * d[p];

  std::vector<double> col_i(n), col_j(n);
  for (res.steps = 0; res.steps < iter_cap; ++res.steps) {
    // Gradient of the maximized objective is -2d, so the most violating pair
    // is (argmin d, argmax d over the support). Ties go to the smaller row.
    int i_up = -1, j_dn = -1;
    for (int p = 0; p < n; ++p) {
      if (i_up < 0 || d[p] < d[i_up]) i_up = p;
      if (alpha[p] > 0.0 && (j_dn < 0 || d[p] > d[j_dn])) j_dn = p;
    }
    const double gap = 2.0 * (d[j_dn] - d[i_up]);
    const double g = tk.delta2() - R;
    if (gap <= inner_eps * g || i_up == j_dn) {
      res.converged = true;
      break;
    }

    cache.column(tk, index_set[i_up], index_set, col_i, stats);
    cache.column(tk, index_set[j_dn], index_set, col_j, stats);
    const double q_ii = col_i[i_up], q_jj = col_j[j_dn], q_ij = col_i[j_dn];
    const double curv = q_ii - 2.0 * q_ij + q_jj;  // >= 2/C for distinct rows
    double t = (d[j_dn] - d[i_up]) / curv;
    bool drops = false;
    if (t >= alpha[j_dn]) {
      t = alpha[j_dn];
      drops = true;
    }

    R += 2.0 * t * (d[i_up] - d[j_dn]) + t * t * curv;
    for (int p = 0; p < n; ++p) d[p] += t * (col_i[p] - col_j[p]);
    alpha[i_up] += t;
    alpha[j_dn] = drops ? 0.0 : alpha[j_dn] - t;
  }
  stats.inner_qp_steps += res.steps;

  // Polish R from the maintained products; steps only rounded it.
  R = 0.0;
  for (int p = 0; p < n; ++p) R += alpha[p] * d[p];
  res.R = R;
  res.center_dot = std::move(d);
  return res;
}

}  // namespace coreball
