#include "coreball/train.hpp"

#include <future>
#include <stdexcept>

namespace coreball {

std::pair<BinaryModel, TrainStats> train_subproblem(const Dataset& data,
                                                    const BinarySubproblem& sub,
                                                    const TrainOptions& opt,
                                                    std::uint64_t seed) {
  std::vector<const SparseVector*> features;
  std::vector<int> labels;
  features.reserve(sub.rows.size());
  labels.reserve(sub.rows.size());
  for (const auto& [row, y] : sub.rows) {
    features.push_back(&data.samples[row].features);
    labels.push_back(y);
  }

  const TildeKernel tk(features, labels, opt.kernel, opt.C);
  SolverConfig cfg = opt.solver;
  cfg.seed = seed;
  MebSolver solver(tk, cfg);
  TrainStats stats = solver.train(opt.algorithm);
  BinaryModel model = build_binary(solver.state(), features, labels, opt.kernel, opt.C,
                                   sub.positive_class, sub.negative_class);
  return {std::move(model), stats};
}

TrainResult train_ovo(const Dataset& data, const TrainOptions& opt) {
  if (data.classes.size() < 2)
    throw std::invalid_argument("training needs at least 2 classes");
  const std::vector<BinarySubproblem> subs = split_ovo(data);

  TrainResult result;
  result.model.classes = data.classes;
  result.model.machines.resize(subs.size());
  result.per_machine.resize(subs.size());

  auto run_one = [&](std::size_t i) {
    auto [model, stats] =
        train_subproblem(data, subs[i], opt, opt.solver.seed + static_cast<std::uint64_t>(i));
    result.model.machines[i] = std::move(model);
    result.per_machine[i] = stats;
  };

  // A trace sink must stay single-writer, so it forces sequential training.
  if (opt.parallel && subs.size() > 1 && !opt.solver.trace) {
    std::vector<std::future<void>> jobs;
    jobs.reserve(subs.size());
    for (std::size_t i = 0; i < subs.size(); ++i)
      jobs.push_back(std::async(std::launch::async, run_one, i));
    for (auto& job : jobs) job.get();
  } else {
    for (std::size_t i = 0; i < subs.size(); ++i) run_one(i);
  }

  for (const TrainStats& st : result.per_machine) {
    result.solver_seconds += st.wall_time_seconds;
    result.converged = result.converged && st.converged;
  }
  return result;
}

std::vector<int> predict_all(const OvoModel& model, const Dataset& data) {
  std::vector<int> out;
  out.reserve(data.samples.size());
  if (model.machines.size() == 1) {
    for (const Sample& s : data.samples)
      out.push_back(predict_binary(model.machines.front(), s.features));
  } else {
    for (const Sample& s : data.samples) out.push_back(predict_ovo(model, s.features));
  }
  return out;
}

double accuracy_percent(const OvoModel& model, const Dataset& data) {
  if (data.samples.empty()) throw std::invalid_argument("empty evaluation set");
  const std::vector<int> pred = predict_all(model, data);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < pred.size(); ++i)
    if (pred[i] == data.samples[i].label) ++correct;
  return 100.0 * static_cast<double>(correct) / static_cast<double>(pred.size());
}

}  // namespace coreball
