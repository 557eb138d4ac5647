// coreball command line: train / predict / bench.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 non-convergence.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "coreball/io.hpp"
#include "coreball/model.hpp"
#include "coreball/train.hpp"

using namespace coreball;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNonConvergence = 3;

struct KernelFlags {
  std::string kernel = "rbf";
  std::string sigma2 = "auto";
  std::string gamma = "auto";
  int degree = 2;
};

struct SolverFlags {
  std::string solver = "mfw";
  double C = 1.0;
  double epsilon = 1e-6;
  int sample_size = 59;
  std::string init = "random-meb:20";
  std::uint64_t seed = 0;
  long max_iter = 10'000'000;
  double cache_mb = 256.0;
};

void add_kernel_flags(CLI::App* cmd, KernelFlags& kf) {
  cmd->add_option("--kernel", kf.kernel, "rbf|linear|poly|polyh")
      ->check(CLI::IsMember({"rbf", "linear", "poly", "polyh"}));
  cmd->add_option("--sigma2", kf.sigma2,
                  "rbf width, or 'auto' for the mean squared training distance");
  cmd->add_option("--gamma", kf.gamma,
                  "polyh scale, or 'auto' for the inverse mean squared distance");
  cmd->add_option("--degree", kf.degree, "polynomial degree")->check(CLI::PositiveNumber);
}

void add_solver_flags(CLI::App* cmd, SolverFlags& sf, bool with_solver) {
  if (with_solver)
    cmd->add_option("--solver", sf.solver, "fw|mfw|bc")
        ->check(CLI::IsMember({"fw", "mfw", "bc"}));
  cmd->add_option("--C", sf.C, "penalty parameter")->required();
  cmd->add_option("--epsilon", sf.epsilon, "stopping tolerance");
  cmd->add_option("--sample-size", sf.sample_size, "rows per furthest-point sample");
  cmd->add_option("--init", sf.init, "two-point | random-meb:<p>");
  cmd->add_option("--seed", sf.seed, "rng seed");
  cmd->add_option("--max-iter", sf.max_iter, "iteration cap");
  cmd->add_option("--cache-mb", sf.cache_mb, "kernel cache budget in MiB");
}

Algorithm parse_algorithm(const std::string& s) {
  if (s == "fw") return Algorithm::Fw;
  if (s == "mfw") return Algorithm::Mfw;
  if (s == "bc") return Algorithm::Bc;
  throw CLI::ValidationError("--solver", "unknown solver '" + s + "'");
}

KernelSpec resolve_kernel(const KernelFlags& kf, const Dataset& train, std::uint64_t seed) {
  KernelSpec spec;
  if (kf.kernel == "rbf") {
    spec.kind = KernelSpec::Kind::Rbf;
    spec.sigma2 =
        (kf.sigma2 == "auto") ? avg_sq_distance(train, 100'000, seed) : std::stod(kf.sigma2);
  } else if (kf.kernel == "linear") {
    spec.kind = KernelSpec::Kind::Linear;
  } else if (kf.kernel == "poly") {
    spec.kind = KernelSpec::Kind::PolyInhomogeneous;
    spec.degree = kf.degree;
  } else {
    spec.kind = KernelSpec::Kind::PolyHomogeneous;
    spec.degree = kf.degree;
    spec.gamma =
        (kf.gamma == "auto") ? 1.0 / avg_sq_distance(train, 100'000, seed) : std::stod(kf.gamma);
  }
  spec.validate();
  return spec;
}

SolverConfig resolve_solver_config(const SolverFlags& sf) {
  SolverConfig cfg;
  cfg.epsilon = sf.epsilon;
  cfg.sample_size = sf.sample_size;
  cfg.max_iterations = sf.max_iter;
  cfg.seed = sf.seed;
  cfg.cache_bytes = static_cast<std::size_t>(sf.cache_mb * 1024.0 * 1024.0);
  if (sf.init == "two-point") {
    cfg.init = InitPolicy::TwoPoint;
  } else if (sf.init.rfind("random-meb:", 0) == 0) {
    cfg.init = InitPolicy::RandomMeb;
    cfg.init_subset = std::stoi(sf.init.substr(11));
  } else {
    throw CLI::ValidationError("--init", "expected two-point or random-meb:<p>");
  }
  return cfg;
}

void print_stats(const std::string& label, const TrainStats& st) {
  std::printf("%s: iters=%ld (fw=%ld away=%ld drop=%ld qp=%ld) kernel_evals=%llu "
              "cache_hits=%llu coreset=%d r2=%.9g obj=%.9g time=%.3fs%s%s\n",
              label.c_str(), st.iterations, st.fw_steps, st.away_steps, st.drop_steps,
              st.inner_qp_steps, static_cast<unsigned long long>(st.kernel_evals),
              static_cast<unsigned long long>(st.cache_hits), st.coreset_size, st.final_r2,
              st.final_objective, st.wall_time_seconds, st.converged ? "" : " NOT-CONVERGED",
              st.init_fallback ? " init-fallback" : "");
}

void write_trace_header(std::ostream& out) {
  out << "machine,iteration,step,delta_plus,delta_minus,r2,coreset\n";
}

auto make_trace_sink(std::ostream& out, const std::string& machine) {
  return [&out, machine](const IterationTrace& t) {
    out << machine << ',' << t.iteration << ',' << t.step << ','
        << format_double(t.delta_plus) << ',';
    if (!std::isnan(t.delta_minus)) out << format_double(t.delta_minus);
    out << ',' << format_double(t.r2) << ',' << t.coreset_size << '\n';
  };
}

int cmd_train(const std::string& data_path, const std::string& model_path,
              const KernelFlags& kf, const SolverFlags& sf, const std::string& trace_path) {
  const Dataset train = parse_libsvm_file(data_path);

  TrainOptions opt;
  opt.algorithm = parse_algorithm(sf.solver);
  opt.kernel = resolve_kernel(kf, train, sf.seed);
  opt.C = sf.C;
  opt.solver = resolve_solver_config(sf);

  if (opt.algorithm == Algorithm::Bc && !opt.kernel.normalized()) {
    std::cerr << "error: the bc solver needs a kernel with constant k(x,x); '" << kf.kernel
              << "' does not satisfy that, so the ball equivalence breaks. "
                 "Use --solver fw or --solver mfw, which handle any Mercer kernel.\n";
    return kExitUsage;
  }

  TrainResult result;
  if (!trace_path.empty()) {
    // per-machine trace labels need the subproblem loop here (single writer)
    std::ofstream trace(trace_path);
    if (!trace) throw std::runtime_error("cannot write '" + trace_path + "'");
    write_trace_header(trace);
    const auto subs = split_ovo(train);
    result.model.classes = train.classes;
    for (std::size_t i = 0; i < subs.size(); ++i) {
      TrainOptions one = opt;
      const std::string label = std::to_string(subs[i].positive_class) + ":" +
                                std::to_string(subs[i].negative_class);
      one.solver.trace = make_trace_sink(trace, label);
      auto [machine, stats] = train_subproblem(train, subs[i], one,
                                               opt.solver.seed + static_cast<std::uint64_t>(i));
      result.model.machines.push_back(std::move(machine));
      result.per_machine.push_back(stats);
      result.solver_seconds += stats.wall_time_seconds;
      result.converged = result.converged && stats.converged;
    }
  } else {
    result = train_ovo(train, opt);
  }

  save_model(result.model, model_path);
  for (std::size_t i = 0; i < result.per_machine.size(); ++i) {
    const auto& machine = result.model.machines[i];
    print_stats("machine " + std::to_string(machine.positive_class) + ":" +
                    std::to_string(machine.negative_class),
                result.per_machine[i]);
  }
  std::printf("kernel: %s\n", opt.kernel.describe().c_str());
  std::printf("training accuracy: %.4f%%\n", accuracy_percent(result.model, train));
  std::printf("total solver time: %.3fs, model written to %s\n", result.solver_seconds,
              model_path.c_str());
  return result.converged ? 0 : kExitNonConvergence;
}

int cmd_predict(const std::string& data_path, const std::string& model_path,
                const std::string& output_path) {
  const OvoModel model = load_model(model_path);
  const Dataset data = parse_libsvm_file(data_path);
  const std::vector<int> pred = predict_all(model, data);

  if (!output_path.empty()) {
    std::ofstream out(output_path);
    if (!out) throw std::runtime_error("cannot write '" + output_path + "'");
    for (int p : pred) out << p << '\n';
  }

  std::size_t correct = 0;
  for (std::size_t i = 0; i < pred.size(); ++i)
    if (pred[i] == data.samples[i].label) ++correct;
  const double acc = 100.0 * static_cast<double>(correct) / static_cast<double>(pred.size());
  std::printf("accuracy: %.4f%% (%zu/%zu)\n", acc, correct, pred.size());
  return 0;
}

int cmd_bench(const std::string& train_path, const std::string& test_path,
              const std::vector<std::string>& solvers, const KernelFlags& kf,
              const SolverFlags& sf, const std::string& out_path,
              const std::string& trace_dir) {
  const Dataset train = parse_libsvm_file(train_path);
  const Dataset test = parse_libsvm_file(test_path);
  const std::string dataset_name = std::filesystem::path(train_path).stem().string();

  TrainOptions base;
  base.kernel = resolve_kernel(kf, train, sf.seed);
  base.C = sf.C;
  base.solver = resolve_solver_config(sf);

  struct Row {
    std::string solver;
    double accuracy = 0.0;
    double time_s = 0.0;
    int coreset = 0;
    long iters = 0;
    bool converged = true;
  };
  std::vector<Row> rows;
  std::optional<double> bc_time;

  for (const std::string& name : solvers) {
    const Algorithm alg = parse_algorithm(name);
    if (alg == Algorithm::Bc && !base.kernel.normalized()) {
      std::cerr << "warning: skipping bc (kernel '" << kf.kernel
                << "' has no constant diagonal); speedups left blank\n";
      continue;
    }
    TrainOptions opt = base;
    opt.algorithm = alg;

    std::ofstream trace;
    if (!trace_dir.empty()) {
      std::filesystem::create_directories(trace_dir);
      trace.open(trace_dir + "/" + dataset_name + "_" + name + ".csv");
      write_trace_header(trace);
      opt.solver.trace = make_trace_sink(trace, name);
    }

    const TrainResult res = train_ovo(train, opt);
    Row row;
    row.solver = name;
    row.time_s = res.solver_seconds;
    row.accuracy = accuracy_percent(res.model, test);
    row.converged = res.converged;
    for (const auto& st : res.per_machine) {
      row.coreset += st.coreset_size;
      row.iters += st.iterations;
    }
    if (alg == Algorithm::Bc) bc_time = row.time_s;
    rows.push_back(row);
    std::printf("%s %s: accuracy=%.4f%% time=%.3fs coreset=%d iters=%ld%s\n",
                dataset_name.c_str(), name.c_str(), row.accuracy, row.time_s, row.coreset,
                row.iters, row.converged ? "" : " NOT-CONVERGED");
  }

  std::ofstream out;
  std::ostream* os = &std::cout;
  if (!out_path.empty()) {
    out.open(out_path);
    if (!out) throw std::runtime_error("cannot write '" + out_path + "'");
    os = &out;
  }
  *os << "dataset,solver,accuracy,time_s,speedup,coreset,iters\n";
  bool all_converged = true;
  for (const Row& row : rows) {
    *os << dataset_name << ',' << row.solver << ',' << format_double(row.accuracy) << ','
        << format_double(row.time_s) << ',';
    if (bc_time) *os << format_double(*bc_time / row.time_s);
    *os << ',' << row.coreset << ',' << row.iters << '\n';
    all_converged = all_converged && row.converged;
  }
  return all_converged ? 0 : kExitNonConvergence;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kernel SVM training via ball-formulation Frank-Wolfe solvers"};
  app.require_subcommand(1);

  // train
  auto* train = app.add_subcommand("train", "train a model");
  std::string train_data, train_model, train_trace;
  KernelFlags train_kf;
  SolverFlags train_sf;
  train->add_option("--data", train_data, "training file (LIBSVM format)")->required();
  train->add_option("--model", train_model, "output model file")->required();
  train->add_option("--trace", train_trace, "per-iteration CSV trace");
  add_kernel_flags(train, train_kf);
  add_solver_flags(train, train_sf, true);

  // predict
  auto* predict = app.add_subcommand("predict", "predict labels with a model");
  std::string pred_data, pred_model, pred_out;
  predict->add_option("--data", pred_data, "input file (LIBSVM format)")->required();
  predict->add_option("--model", pred_model, "model file")->required();
  predict->add_option("--output", pred_out, "write one predicted class id per line");

  // bench
  auto* bench = app.add_subcommand("bench", "compare solvers on a train/test pair");
  std::string bench_train, bench_test, bench_out, bench_trace_dir;
  std::vector<std::string> bench_solvers = {"bc", "fw", "mfw"};
  KernelFlags bench_kf;
  SolverFlags bench_sf;
  bench->add_option("--train", bench_train, "training file")->required();
  bench->add_option("--test", bench_test, "test file")->required();
  bench->add_option("--solvers", bench_solvers, "subset of bc,fw,mfw")->delimiter(',');
  bench->add_option("--output", bench_out, "CSV report path (stdout when absent)");
  bench->add_option("--trace-dir", bench_trace_dir, "directory for per-solver traces");
  add_kernel_flags(bench, bench_kf);
  add_solver_flags(bench, bench_sf, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);  // 0
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (train->parsed())
      return cmd_train(train_data, train_model, train_kf, train_sf, train_trace);
    if (predict->parsed()) return cmd_predict(pred_data, pred_model, pred_out);
    if (bench->parsed())
      return cmd_bench(bench_train, bench_test, bench_solvers, bench_kf, bench_sf, bench_out,
                       bench_trace_dir);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}
