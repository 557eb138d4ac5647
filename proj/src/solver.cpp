#include "coreball/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace coreball {

namespace {

// Fixed bookkeeping cadence: resynchronizing at a constant period keeps
// trajectories independent of every tunable except the algorithm inputs.
constexpr long kResyncEvery = 100;
constexpr long kInnerQpCap = 1'000'000;

double now_seconds() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

}  // namespace

MebSolver::MebSolver(const TildeKernel& tk, const SolverConfig& cfg)
    : tk_(&tk), cfg_(cfg), rng_(cfg.seed), cache_(cfg.cache_bytes) {
  cfg_.validate(tk.rows());
  state_.reset(tk.rows());
  track_all_rows_ = cfg_.sample_size >= tk.rows();
  if (track_all_rows_) {
    all_rows_.resize(tk.rows());
    for (int i = 0; i < tk.rows(); ++i) all_rows_[i] = i;
  }
}

void MebSolver::rebuild_all_dot() {
  if (!track_all_rows_) return;
  all_dot_.assign(m(), 0.0);
  const auto rows = state_.coreset();
  const auto w = state_.weights();
  for (std::size_t k = 0; k < rows.size(); ++k)
    for (int i = 0; i < m(); ++i) all_dot_[i] += w[k] * tk_->eval(rows[k], i);
  stats_.kernel_evals += static_cast<std::uint64_t>(m()) * rows.size();
}

// all_dot <- scale * all_dot + step * column(vertex), using one cached column.
void MebSolver::step_all_dot(int vertex, double scale, double step) {
  if (!track_all_rows_) return;
  cache_.column(*tk_, vertex, all_rows_, col_, stats_);
  for (int i = 0; i < m(); ++i) all_dot_[i] = scale * all_dot_[i] + step * col_[i];
}

void MebSolver::init_two_point() {
  state_.reset(m());
  const int a = static_cast<int>(rng_.uniform_index(static_cast<std::uint64_t>(m())));

  // b = farthest point from z_a; ties resolved toward the smaller row.
  int b = -1;
  double best = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < m(); ++i) {
    if (i == a) continue;
    const double dist2 = tk_->diag(i) + tk_->diag(a) - 2.0 * tk_->eval(a, i);
    if (dist2 > best) {
      best = dist2;
      b = i;
    }
  }
  stats_.kernel_evals += static_cast<std::uint64_t>(m());

  const double kab = tk_->eval(a, b);
  const double R = 0.25 * (tk_->diag(a) + tk_->diag(b) + 2.0 * kab);
  state_.insert(a, 0.5, 0.5 * tk_->diag(a) + 0.5 * kab);
  state_.insert(b, 0.5, 0.5 * kab + 0.5 * tk_->diag(b));
  state_.set_R(R, tk_->delta2());
  rebuild_all_dot();
}

void MebSolver::init_random_meb() {
  state_.reset(m());
  const std::vector<int> subset = rng_.sample_distinct_sorted(m(), cfg_.init_subset);
  std::vector<double> alpha(subset.size(), 1.0 / static_cast<double>(subset.size()));

  const auto res = reduced_qp_solve(*tk_, cache_, subset, alpha, cfg_.epsilon / 10.0,
                                    kInnerQpCap, stats_);
  if (!res.converged) {
    stats_.init_fallback = true;
    init_two_point();
    return;
  }

  for (std::size_t p = 0; p < subset.size(); ++p)
    if (alpha[p] > 0.0) state_.insert(subset[p], alpha[p], res.center_dot[p]);
  state_.set_R(res.R, tk_->delta2());
  rebuild_all_dot();
  if (std::abs(state_.sum_weights() - 1.0) > 1e-10) renormalize();
  prune_small_weights(-1);
}

double MebSolver::center_dot(int row) {
  cache_.column(*tk_, row, state_.coreset(), col_, stats_);
  const auto w = state_.weights();
  double s = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) s += w[k] * col_[k];
  return s;
}

double MebSolver::gamma2(int row) {
  return tk_->delta2() + state_.R() - 2.0 * center_dot(row);
}

MebSolver::Candidate MebSolver::furthest_candidate() {
  if (cfg_.sample_size >= m()) return furthest_exhaustive();
  const std::vector<int> rows =
      rng_.sample_distinct_sorted(m(), cfg_.sample_size);
  Candidate best;
  for (int row : rows) {
    const double cd = center_dot(row);
    const double g2 = tk_->delta2() + state_.R() - 2.0 * cd;
    if (best.row < 0 || g2 > best.gamma2) best = {row, g2, cd, state_.alpha(row)};
  }
  return best;
}

MebSolver::Candidate MebSolver::furthest_exhaustive() {
  Candidate best;
  if (track_all_rows_) {
    for (int row = 0; row < m(); ++row) {
      const double g2 = tk_->delta2() + state_.R() - 2.0 * all_dot_[row];
      if (best.row < 0 || g2 > best.gamma2)
        best = {row, g2, all_dot_[row], state_.alpha(row)};
    }
    return best;
  }
  const auto rows = state_.coreset();
  const auto w = state_.weights();
  for (int row = 0; row < m(); ++row) {
    double cd = 0.0;
    for (std::size_t k = 0; k < rows.size(); ++k) cd += w[k] * tk_->eval(row, rows[k]);
    const double g2 = tk_->delta2() + state_.R() - 2.0 * cd;
    if (best.row < 0 || g2 > best.gamma2) best = {row, g2, cd, state_.alpha(row)};
  }
  stats_.kernel_evals += static_cast<std::uint64_t>(m()) * rows.size();
  return best;
}

MebSolver::Candidate MebSolver::nearest_in_coreset() const {
  if (state_.support_size() == 0) throw std::logic_error("nearest point of an empty coreset");
  const auto rows = state_.coreset();
  const auto w = state_.weights();
  const auto d = state_.center_dot();
  Candidate best;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const double g2 = tk_->delta2() + state_.R() - 2.0 * d[k];
    if (best.row < 0 || g2 < best.gamma2) best = {rows[k], g2, d[k], w[k]};
  }
  return best;
}

bool MebSolver::check_stop(double delta_plus) const {
  const double threshold = (1.0 + cfg_.epsilon) * (1.0 + cfg_.epsilon) - 1.0;
  return delta_plus <= threshold;
}

double MebSolver::fw_line_search(const Candidate& c) const {
  double lambda;
  if (tk_->normalized()) {
    if (!(c.gamma2 > 0.0))
      throw std::domain_error("degenerate toward direction: candidate coincides with the center");
    lambda = 0.5 * (1.0 - state_.r2() / c.gamma2);
  } else {
    const double dist2 = state_.R() - 2.0 * c.center_dot + tk_->diag(c.row);
    if (!(dist2 > 0.0))
      throw std::domain_error("degenerate toward direction: candidate coincides with the center");
    lambda = (state_.R() - c.center_dot) / dist2;
  }
  return std::clamp(lambda, 0.0, 1.0);
}

void MebSolver::fw_apply_step(const Candidate& c, double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0))
    throw std::invalid_argument("fw stepsize outside [0,1]");
  if (lambda == 0.0) return;

  cache_.column(*tk_, c.row, state_.coreset(), col_, stats_);

  if (tk_->normalized()) {
    const double dplus = c.gamma2 / state_.r2() - 1.0;
    state_.set_r2(state_.r2() * (1.0 + dplus * dplus / (4.0 * (1.0 + dplus))), tk_->delta2());
  } else {
    const double Rn = (1.0 - lambda) * (1.0 - lambda) * state_.R() +
                      2.0 * lambda * (1.0 - lambda) * c.center_dot +
                      lambda * lambda * tk_->diag(c.row);
    state_.set_R(Rn, tk_->delta2());
  }

  const int n = state_.support_size();
  for (int k = 0; k < n; ++k) {
    state_.weight_at(k) *= (1.0 - lambda);
    state_.center_dot_at(k) = (1.0 - lambda) * state_.center_dot_at(k) + lambda * col_[k];
  }
  const int p = state_.position(c.row);
  if (p >= 0)
    state_.weight_at(p) += lambda;
  else
    state_.insert(c.row, lambda, (1.0 - lambda) * c.center_dot + lambda * tk_->diag(c.row));
  step_all_dot(c.row, 1.0 - lambda, lambda);

  ++stats_.fw_steps;
  apply_common(c.row);
}

double MebSolver::away_line_search(const Candidate& c) const {
  if (!(c.weight < 1.0))
    throw std::logic_error("away step undefined when the coreset is a single point");
  const double bound = c.weight / (1.0 - c.weight);
  double lambda;
  if (tk_->normalized()) {
    const double dminus = 1.0 - c.gamma2 / state_.r2();
    if (dminus <= 0.0) return 0.0;
    lambda = (1.0 - dminus > 0.0) ? dminus / (2.0 * (1.0 - dminus)) : bound;
  } else {
    const double dist2 = state_.R() - 2.0 * c.center_dot + tk_->diag(c.row);
    if (!(dist2 > 0.0)) return 0.0;
    lambda = (c.center_dot - state_.R()) / dist2;
  }
  return std::clamp(lambda, 0.0, bound);
}

void MebSolver::away_apply_step(const Candidate& c, double lambda) {
  const int p = state_.position(c.row);
  if (p < 0) throw std::invalid_argument("away step target is not in the coreset");
  if (lambda == 0.0) return;
  const double w = state_.weights()[p];
  if (!(w < 1.0) || lambda > w / (1.0 - w) * (1.0 + 1e-12) || lambda < 0.0)
    throw std::invalid_argument("away stepsize violates the feasible interval");

  cache_.column(*tk_, c.row, state_.coreset(), col_, stats_);

  if (tk_->normalized()) {
    state_.set_r2((1.0 + lambda) * state_.r2() - lambda * (1.0 + lambda) * c.gamma2,
                  tk_->delta2());
  } else {
    const double Rn = (1.0 + lambda) * (1.0 + lambda) * state_.R() -
                      2.0 * lambda * (1.0 + lambda) * c.center_dot +
                      lambda * lambda * tk_->diag(c.row);
    state_.set_R(Rn, tk_->delta2());
  }

  const int n = state_.support_size();
  for (int k = 0; k < n; ++k) {
    state_.weight_at(k) *= (1.0 + lambda);
    state_.center_dot_at(k) = (1.0 + lambda) * state_.center_dot_at(k) - lambda * col_[k];
  }
  step_all_dot(c.row, 1.0 + lambda, -lambda);
  double& wj = state_.weight_at(p);
  wj -= lambda;
  ++stats_.away_steps;
  if (wj <= cfg_.zero_tolerance) {
    ++stats_.drop_steps;
    drop_row(p);
    renormalize();
  }
  apply_common(-1);
}

void MebSolver::drop_row(int p) {
  const int row = state_.coreset()[p];
  const double w = state_.weights()[p];
  const double dd = state_.center_dot()[p];
  state_.set_R(state_.R() - 2.0 * w * dd + w * w * tk_->diag(row), tk_->delta2());
  if (w != 0.0) {
    cache_.column(*tk_, row, state_.coreset(), col_, stats_);
    const int n = state_.support_size();
    for (int k = 0; k < n; ++k) state_.center_dot_at(k) -= w * col_[k];
    step_all_dot(row, 1.0, -w);
  }
  state_.remove_at(p);
}

void MebSolver::renormalize() {
  const double s = state_.sum_weights();
  if (!(s > 0.0)) throw std::logic_error("all simplex weights vanished");
  if (s == 1.0) return;
  const int n = state_.support_size();
  for (int k = 0; k < n; ++k) {
    state_.weight_at(k) /= s;
    state_.center_dot_at(k) /= s;
  }
  if (track_all_rows_)
    for (double& v : all_dot_) v /= s;
  state_.set_R(state_.R() / (s * s), tk_->delta2());
}

void MebSolver::prune_small_weights(int protect_row) {
  bool pruned = false;
  for (;;) {
    int victim = -1;
    const auto rows = state_.coreset();
    const auto w = state_.weights();
    for (std::size_t k = 0; k < rows.size(); ++k) {
      if (rows[k] != protect_row && w[k] <= cfg_.zero_tolerance) {
        victim = static_cast<int>(k);
        break;
      }
    }
    if (victim < 0) break;
    drop_row(victim);
    pruned = true;
  }
  if (pruned) renormalize();
}

void MebSolver::apply_common(int protect_row) {
  state_.bump_iteration();
  ++stats_.iterations;
  prune_small_weights(protect_row);
  periodic_resync();
}

void MebSolver::periodic_resync() {
  if (state_.iteration() % kResyncEvery == 0) {
    if (std::abs(state_.sum_weights() - 1.0) > 1e-10) renormalize();
    const auto w = state_.weights();
    const auto d = state_.center_dot();
    double R = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) R += w[k] * d[k];
    state_.set_R(R, tk_->delta2());
    rebuild_all_dot();
  }
  if (cfg_.dense_check_every > 0 && state_.iteration() % cfg_.dense_check_every == 0)
    dense_verify();
}

void MebSolver::dense_verify() const {
  const auto rows = state_.coreset();
  const auto w = state_.weights();
  const auto d = state_.center_dot();
  double sum = 0.0;
  for (double v : w) sum += v;
  if (std::abs(sum - 1.0) > 1e-9)
    throw std::logic_error("simplex weight sum drifted beyond tolerance");

  double R_dense = 0.0;
  for (std::size_t j = 0; j < rows.size(); ++j) {
    double dj = 0.0;
    for (std::size_t l = 0; l < rows.size(); ++l) dj += w[l] * tk_->eval(rows[j], rows[l]);
    if (std::abs(dj - d[j]) > 1e-8 * std::max(1.0, std::abs(dj)))
      throw std::logic_error("maintained center products drifted from dense recomputation");
    R_dense += w[j] * dj;
  }
  if (std::abs(state_.R() - R_dense) > 1e-8 * R_dense)
    throw std::logic_error("maintained quadratic form drifted from dense recomputation");
  const double r2_dense = tk_->delta2() - R_dense;
  if (std::abs(state_.r2() - r2_dense) > 1e-8 * std::max(r2_dense, 1e-300))
    throw std::logic_error("maintained radius drifted from dense recomputation");
}

void MebSolver::load_state(std::span<const int> rows, std::span<const double> weights) {
  state_.reset(m());
  for (std::size_t k = 0; k < rows.size(); ++k)
    if (weights[k] > 0.0) state_.insert(rows[k], weights[k], 0.0);
  const auto cs = state_.coreset();
  const auto w = state_.weights();
  double R = 0.0;
  for (std::size_t j = 0; j < cs.size(); ++j) {
    double dj = 0.0;
    for (std::size_t l = 0; l < cs.size(); ++l) dj += w[l] * tk_->eval(cs[j], cs[l]);
    state_.center_dot_at(static_cast<int>(j)) = dj;
    R += w[j] * dj;
  }
  stats_.kernel_evals += cs.size() * cs.size();
  state_.set_R(R, tk_->delta2());
  rebuild_all_dot();
}

void MebSolver::init() {
  if (cfg_.init == InitPolicy::TwoPoint)
    init_two_point();
  else
    init_random_meb();
}

TrainStats MebSolver::train(Algorithm alg) {
  if (alg == Algorithm::Bc && !tk_->normalized())
    throw std::invalid_argument(
        "the bc solver needs a kernel with constant k(x,x) (the ball equivalence "
        "breaks otherwise); fw and mfw handle general kernels");
  const double t0 = now_seconds();
  stats_ = TrainStats{};
  cache_.clear();
  init();
  if (alg == Algorithm::Bc)
    train_bc();
  else
    train_fw_mfw(alg);
  stats_.wall_time_seconds = now_seconds() - t0;
  stats_.final_r2 = state_.r2();
  stats_.final_objective = -state_.R();
  stats_.coreset_size = state_.support_size();
  return stats_;
}

void MebSolver::train_fw_mfw(Algorithm alg) {
  const bool sampling = cfg_.sample_size < m();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (;;) {
    if (stats_.iterations >= cfg_.max_iterations) return;  // converged stays false

    Candidate up = furthest_candidate();
    double dplus = up.gamma2 / state_.r2() - 1.0;
    if (check_stop(dplus)) {
      if (!(sampling && cfg_.exact_final_check)) {
        stats_.converged = true;
        return;
      }
      up = furthest_exhaustive();
      dplus = up.gamma2 / state_.r2() - 1.0;
      if (check_stop(dplus)) {
        stats_.converged = true;
        return;
      }
    }

    if (alg == Algorithm::Mfw && state_.support_size() > 1) {
      const Candidate down = nearest_in_coreset();
      const double dminus = 1.0 - down.gamma2 / state_.r2();
      if (dminus > dplus) {
        const long drops_before = stats_.drop_steps;
        away_apply_step(down, away_line_search(down));
        if (cfg_.trace)
          cfg_.trace({state_.iteration(), stats_.drop_steps > drops_before ? 'd' : 'a',
                      dplus, dminus, state_.r2(), state_.support_size()});
        continue;
      }
      fw_apply_step(up, fw_line_search(up));
      if (cfg_.trace)
        cfg_.trace({state_.iteration(), 'f', dplus, dminus, state_.r2(), state_.support_size()});
      continue;
    }

    fw_apply_step(up, fw_line_search(up));
    if (cfg_.trace)
      cfg_.trace({state_.iteration(), 'f', dplus, nan, state_.r2(), state_.support_size()});
  }
}

void MebSolver::train_bc() {
  const bool sampling = cfg_.sample_size < m();
  const double nan = std::numeric_limits<double>::quiet_NaN();

  // The working index set keeps every row ever added, even ones the inner
  // solver currently assigns zero weight; the public state tracks the support.
  std::vector<int> work(state_.coreset().begin(), state_.coreset().end());
  std::vector<double> walpha(state_.weights().begin(), state_.weights().end());

  for (;;) {
    if (stats_.iterations >= cfg_.max_iterations) return;

    Candidate up = furthest_candidate();
    double dplus = up.gamma2 / state_.r2() - 1.0;
    if (check_stop(dplus)) {
      if (!(sampling && cfg_.exact_final_check)) {
        stats_.converged = true;
        return;
      }
      up = furthest_exhaustive();
      dplus = up.gamma2 / state_.r2() - 1.0;
      if (check_stop(dplus)) {
        stats_.converged = true;
        return;
      }
    }

    const auto it = std::lower_bound(work.begin(), work.end(), up.row);
    if (it == work.end() || *it != up.row) {
      walpha.insert(walpha.begin() + (it - work.begin()), 0.0);
      work.insert(it, up.row);
    }

    const auto res =
        reduced_qp_solve(*tk_, cache_, work, walpha, cfg_.epsilon / 10.0, kInnerQpCap, stats_);
    if (!res.converged) return;  // inner cap exhausted: report non-convergence

    double s = 0.0;
    for (double v : walpha) s += v;
    const bool rescale = std::abs(s - 1.0) > 1e-10;

    state_.clear_support();
    for (std::size_t p = 0; p < work.size(); ++p) {
      if (rescale) walpha[p] /= s;
      if (walpha[p] > cfg_.zero_tolerance)
        state_.insert(work[p], walpha[p], rescale ? res.center_dot[p] / s : res.center_dot[p]);
    }
    state_.set_R(rescale ? res.R / (s * s) : res.R, tk_->delta2());
    rebuild_all_dot();

    state_.bump_iteration();
    ++stats_.iterations;
    if (cfg_.trace)
      cfg_.trace({state_.iteration(), 'q', dplus, nan, state_.r2(), state_.support_size()});
    if (cfg_.dense_check_every > 0 && state_.iteration() % cfg_.dense_check_every == 0)
      dense_verify();
  }
}

std::pair<DualState, TrainStats> train_with(Algorithm alg, const TildeKernel& tk,
                                            const SolverConfig& cfg) {
  MebSolver solver(tk, cfg);
  const TrainStats st = solver.train(alg);
  return {solver.state(), st};
}

std::pair<DualState, TrainStats> train_fw(const TildeKernel& tk, const SolverConfig& cfg) {
  return train_with(Algorithm::Fw, tk, cfg);
}
std::pair<DualState, TrainStats> train_mfw(const TildeKernel& tk, const SolverConfig& cfg) {
  return train_with(Algorithm::Mfw, tk, cfg);
}
std::pair<DualState, TrainStats> train_bc(const TildeKernel& tk, const SolverConfig& cfg) {
  return train_with(Algorithm::Bc, tk, cfg);
}

}  // namespace coreball
