#pragma once

#include <optional>
#include <vector>

#include "coreball/config.hpp"
#include "coreball/io.hpp"
#include "coreball/model.hpp"
#include "coreball/solver.hpp"
#include "coreball/sparse.hpp"
#include "coreball/tilde.hpp"

namespace coreball {

struct TrainOptions {
  Algorithm algorithm = Algorithm::Mfw;
  KernelSpec kernel;
  double C = 1.0;
  SolverConfig solver;   // solver.seed is the base seed; machine i uses seed+i
  bool parallel = true;  // train OVO subproblems concurrently
};

struct TrainResult {
  OvoModel model;
  std::vector<TrainStats> per_machine;  // parallel to model.machines
  double solver_seconds = 0.0;          // summed solver wall time, parsing excluded
  bool converged = true;                // all machines converged
};

// Trains one machine per class pair (a single machine when K = 2). Each
// subproblem gets an independently derived seed so results do not depend on
// scheduling.
TrainResult train_ovo(const Dataset& data, const TrainOptions& opt);

// Trains one explicit subproblem; exposed for the benchmark harness.
std::pair<BinaryModel, TrainStats> train_subproblem(const Dataset& data,
                                                    const BinarySubproblem& sub,
                                                    const TrainOptions& opt,
                                                    std::uint64_t seed);

std::vector<int> predict_all(const OvoModel& model, const Dataset& data);

// Percent of rows whose predicted class matches the stored label.
double accuracy_percent(const OvoModel& model, const Dataset& data);

}  // namespace coreball
