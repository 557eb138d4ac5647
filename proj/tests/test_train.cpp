#include <cmath>
#include <sstream>
#include <vector>

#include "coreball/solver.hpp"
#include "coreball/train.hpp"
#include "doctest.h"
#include "oracle.hpp"
#include "synth.hpp"

using namespace coreball;

namespace {

const KernelSpec kRbf{KernelSpec::Kind::Rbf, 1.0, 1.0, 2};
const KernelSpec kLinear{KernelSpec::Kind::Linear, 1.0, 1.0, 2};

SolverConfig checked_config(std::uint64_t seed) {
  SolverConfig cfg;
  cfg.seed = seed;
  cfg.dense_check_every = 1;  // loud drift detection on these small runs
  return cfg;
}

struct Trajectory {
  std::vector<long> iters;
  std::vector<char> steps;
  std::vector<double> r2;
  std::vector<int> coreset;

  bool operator==(const Trajectory&) const = default;
};

SolverConfig traced(SolverConfig cfg, Trajectory& out) {
  cfg.trace = [&out](const IterationTrace& t) {
    out.iters.push_back(t.iteration);
    out.steps.push_back(t.step);
    out.r2.push_back(t.r2);
    out.coreset.push_back(t.coreset_size);
  };
  return cfg;
}

}  // namespace

TEST_CASE("two points stop at iteration zero for every solver") {
  const Dataset d = synth::make_blobs(2, 3, 1.0, 7);
  const auto view = synth::binary_view(d);
  const TildeKernel tk(view.features, view.labels, kRbf, 10.0);
  for (Algorithm alg : {Algorithm::Fw, Algorithm::Mfw, Algorithm::Bc}) {
    auto [state, stats] = train_with(alg, tk, checked_config(3));
    CHECK(stats.converged);
    CHECK(stats.iterations == 0);
    // both points end on the boundary of the ball
    MebSolver probe(tk, checked_config(3));
    probe.load_state(state.coreset(), state.weights());
    CHECK(probe.gamma2(0) == doctest::Approx(state.r2()).epsilon(1e-6));
    CHECK(probe.gamma2(1) == doctest::Approx(state.r2()).epsilon(1e-6));
  }
}

TEST_CASE("all solvers reach the dense optimum within the stopping guarantee") {
  // 30-point blobs, both kernel families, the guarantee of the stopping rule:
  // g >= (1 - (2e + e^2)) g*.
  for (const bool linear : {false, true}) {
    const Dataset d = synth::make_blobs(30, 4, 0.8, linear ? 51 : 52);
    const auto view = synth::binary_view(d);
    const TildeKernel tk(view.features, view.labels, linear ? kLinear : kRbf, 10.0);
    const auto sol = oracle::solve_dual(tk, 1e-13);
    const double eps = 1e-6;
    const double floor = (1.0 - (2.0 * eps + eps * eps)) * (sol.g + sol.gap);

    for (Algorithm alg : {Algorithm::Fw, Algorithm::Mfw, Algorithm::Bc}) {
      if (alg == Algorithm::Bc && linear) continue;  // guard tested elsewhere
      auto [state, stats] = train_with(alg, tk, checked_config(4));
      CHECK(stats.converged);
      const auto dense = oracle::dense_state(tk, state);
      CHECK(dense.r2 >= floor);
      CHECK(dense.r2 <= (sol.g + sol.gap) * (1.0 + 1e-10));
      // simplex feasibility of the returned weights
      double sum = 0.0;
      for (double w : state.weights()) {
        CHECK(w > 0.0);
        sum += w;
      }
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-10));
    }
  }
}

TEST_CASE("the bc solver refuses kernels without a constant diagonal") {
  const Dataset d = synth::make_blobs(10, 3, 1.0, 9);
  const auto view = synth::binary_view(d);
  const TildeKernel tk(view.features, view.labels, kLinear, 10.0);
  MebSolver solver(tk, checked_config(1));
  CHECK_THROWS_AS(solver.train(Algorithm::Bc), std::invalid_argument);
}

TEST_CASE("fw radius sequence never decreases; mfw objective never decreases") {
  const Dataset d = synth::make_blobs(40, 4, 0.6, 61);
  const auto view = synth::binary_view(d);
  const TildeKernel tk(view.features, view.labels, kRbf, 50.0);

  for (Algorithm alg : {Algorithm::Fw, Algorithm::Mfw, Algorithm::Bc}) {
    Trajectory tr;
    auto cfg = traced(checked_config(8), tr);
    auto [state, stats] = train_with(alg, tk, cfg);
    CHECK(stats.converged);
    REQUIRE(!tr.r2.empty());
    for (std::size_t k = 1; k < tr.r2.size(); ++k)
      CHECK(tr.r2[k] >= tr.r2[k - 1] * (1.0 - 1e-12));
    if (alg == Algorithm::Fw) CHECK(stats.away_steps == 0);
    if (alg == Algorithm::Mfw) {
      CHECK(stats.fw_steps + stats.away_steps == stats.iterations);
      CHECK(stats.drop_steps <= stats.away_steps);
    }
  }
}

TEST_CASE("identical inputs and seeds give bit-identical trajectories") {
  const Dataset d = synth::make_blobs(80, 4, 0.7, 71);
  const auto view = synth::binary_view(d);
  const TildeKernel tk(view.features, view.labels, kRbf, 10.0);

  // sample_size 59 exercises the sampled scan, 100 the exhaustive one
  for (const int sample_size : {59, 100}) {
    for (Algorithm alg : {Algorithm::Fw, Algorithm::Mfw, Algorithm::Bc}) {
      Trajectory a, b;
      SolverConfig cfg = checked_config(123);
      cfg.dense_check_every = 0;
      cfg.sample_size = sample_size;
      auto [s1, st1] = train_with(alg, tk, traced(cfg, a));
      auto [s2, st2] = train_with(alg, tk, traced(cfg, b));
      CHECK(a == b);
      CHECK(st1.iterations == st2.iterations);
      REQUIRE(s1.support_size() == s2.support_size());
      for (int k = 0; k < s1.support_size(); ++k) {
        CHECK(s1.coreset()[k] == s2.coreset()[k]);
        CHECK(s1.weights()[k] == s2.weights()[k]);  // bitwise
      }
    }
  }
}

TEST_CASE("cache capacity never changes a trajectory") {
  const Dataset d = synth::make_blobs(60, 4, 0.7, 81);
  const auto view = synth::binary_view(d);
  const TildeKernel tk(view.features, view.labels, kRbf, 10.0);

  for (Algorithm alg : {Algorithm::Fw, Algorithm::Mfw, Algorithm::Bc}) {
    Trajectory uncached, tiny, roomy;
    SolverConfig cfg = checked_config(55);
    cfg.dense_check_every = 0;
    cfg.cache_bytes = 0;
    auto [s0, st0] = train_with(alg, tk, traced(cfg, uncached));
    cfg.cache_bytes = 512;  // a few short columns at most
    auto [s1, st1] = train_with(alg, tk, traced(cfg, tiny));
    cfg.cache_bytes = 64 << 20;
    auto [s2, st2] = train_with(alg, tk, traced(cfg, roomy));
    CHECK(uncached == tiny);
    CHECK(uncached == roomy);
    for (int k = 0; k < s0.support_size(); ++k) {
      CHECK(s0.weights()[k] == s1.weights()[k]);
      CHECK(s0.weights()[k] == s2.weights()[k]);
    }
    CHECK(st2.cache_hits >= st1.cache_hits);
    (void)st0;
  }
}

TEST_CASE("an rbf kernel forced down the general path reproduces the normalized run") {
  const Dataset d = synth::make_blobs(20, 3, 0.8, 91);
  const auto view = synth::binary_view(d);
  const TildeKernel tk(view.features, view.labels, kRbf, 10.0);
  const TildeKernel tk_forced(view.features, view.labels, kRbf, 10.0, false);
  REQUIRE(tk.delta2() == tk_forced.delta2());

  for (Algorithm alg : {Algorithm::Fw, Algorithm::Mfw}) {
    SolverConfig cfg = checked_config(31);
    cfg.dense_check_every = 0;
    cfg.epsilon = 1e-5;

    // record selected rows and stepsizes through per-iteration snapshots
    std::vector<int> rows_a, rows_b;
    std::vector<double> r2_a, r2_b;
    SolverConfig ca = cfg, cb = cfg;
    ca.trace = [&](const IterationTrace& t) { r2_a.push_back(t.r2); rows_a.push_back(t.coreset_size); };
    cb.trace = [&](const IterationTrace& t) { r2_b.push_back(t.r2); rows_b.push_back(t.coreset_size); };
    auto [s1, st1] = train_with(alg, tk, ca);
    auto [s2, st2] = train_with(alg, tk_forced, cb);

    CHECK(st1.iterations == st2.iterations);
    CHECK(rows_a == rows_b);
    REQUIRE(s1.support_size() == s2.support_size());
    for (int k = 0; k < s1.support_size(); ++k) {
      CHECK(s1.coreset()[k] == s2.coreset()[k]);
      CHECK(s1.weights()[k] == doctest::Approx(s2.weights()[k]).epsilon(1e-9));
    }
    for (std::size_t k = 0; k < r2_a.size(); ++k)
      CHECK(r2_a[k] == doctest::Approx(r2_b[k]).epsilon(1e-9));
  }
}

TEST_CASE("sampled training still certifies its final iterate") {
  const Dataset d = synth::make_blobs(400, 4, 0.7, 101);
  const auto view = synth::binary_view(d);
  const TildeKernel tk(view.features, view.labels, kRbf, 10.0);
  const auto sol = oracle::solve_dual(tk, 1e-13);

  SolverConfig cfg = checked_config(6);
  cfg.sample_size = 59;  // < m, so sampling and the exhaustive recheck engage
  cfg.dense_check_every = 0;
  for (Algorithm alg : {Algorithm::Fw, Algorithm::Mfw, Algorithm::Bc}) {
    auto [state, stats] = train_with(alg, tk, cfg);
    CHECK(stats.converged);
    const auto dense = oracle::dense_state(tk, state);
    const double eps = 1e-6;
    CHECK(dense.r2 >= (1.0 - (2.0 * eps + eps * eps)) * (sol.g + sol.gap));
  }
}

TEST_CASE("max_iterations returns a flagged, feasible iterate") {
  const Dataset d = synth::make_blobs(60, 4, 0.5, 111);
  const auto view = synth::binary_view(d);
  const TildeKernel tk(view.features, view.labels, kRbf, 100.0);
  SolverConfig cfg = checked_config(2);
  cfg.max_iterations = 5;
  auto [state, stats] = train_with(Algorithm::Fw, tk, cfg);
  CHECK_FALSE(stats.converged);
  CHECK(stats.iterations == 5);
  CHECK(state.sum_weights() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("ovo training end to end on three classes") {
  // three separated blobs on a ring
  coreball::Rng rng(121);
  Dataset d;
  d.num_features = 2;
  d.classes = {0, 1, 2};
  const double cx[3] = {0.0, 4.0, 2.0};
  const double cy[3] = {0.0, 0.0, 3.5};
  for (int i = 0; i < 90; ++i) {
    const int c = i % 3;
    Sample s;
    s.label = c;
    s.features.push_back(0, cx[c] + 0.3 * rng.normal());
    s.features.push_back(1, cy[c] + 0.3 * rng.normal());
    d.samples.push_back(std::move(s));
  }

  TrainOptions opt;
  opt.algorithm = Algorithm::Mfw;
  opt.kernel = kRbf;
  opt.C = 100.0;
  opt.solver = checked_config(5);
  opt.solver.dense_check_every = 0;

  const TrainResult res = train_ovo(d, opt);
  CHECK(res.converged);
  CHECK(res.model.machines.size() == 3);
  CHECK(accuracy_percent(res.model, d) >= 99.0);

  // parallel and sequential schedules must agree (seeds are per machine)
  TrainOptions seq = opt;
  seq.parallel = false;
  const TrainResult res2 = train_ovo(d, seq);
  for (std::size_t k = 0; k < res.model.machines.size(); ++k) {
    REQUIRE(res.model.machines[k].support.size() == res2.model.machines[k].support.size());
    for (std::size_t s = 0; s < res.model.machines[k].support.size(); ++s)
      CHECK(res.model.machines[k].support[s].second ==
            res2.model.machines[k].support[s].second);
  }
}

TEST_CASE("separable data with a large C trains to >= 99 percent") {
  const Dataset d = synth::make_blobs(100, 3, 6.0, 131);
  TrainOptions opt;
  opt.algorithm = Algorithm::Fw;
  opt.kernel = kRbf;
  opt.C = 1e4;
  opt.solver = checked_config(9);
  opt.solver.dense_check_every = 0;
  const TrainResult res = train_ovo(d, opt);
  CHECK(accuracy_percent(res.model, d) >= 99.0);
}
