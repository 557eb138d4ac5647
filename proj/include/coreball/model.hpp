#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "coreball/kernel.hpp"
#include "coreball/sparse.hpp"
#include "coreball/state.hpp"

namespace coreball {

// Binary classifier extracted from a converged dual iterate. Support vectors
// are stored inline with coefficients alpha_i * y_i; the bias is not a
// separate number, it lives in the "+1" added to every kernel term of the
// decision function.
struct BinaryModel {
  KernelSpec kernel;
  double C = 1.0;
  int positive_class = 0;
  int negative_class = 0;
  std::vector<std::pair<SparseVector, double>> support;  // (features, coef)
};

struct OvoModel {
  std::vector<int> classes;  // sorted
  std::vector<BinaryModel> machines;  // one per unordered class pair
};

// Pulls the support rows (alpha_i > 0) out of a dual state. `rows` maps
// subproblem row -> (features, y).
BinaryModel build_binary(const DualState& state,
                         const std::vector<const SparseVector*>& features,
                         const std::vector<int>& labels, const KernelSpec& kernel,
                         double C, int positive_class, int negative_class);

// h(x) = sum_i coef_i (k(sv_i, x) + 1). Positive means positive_class.
double decision_value(const BinaryModel& model, const SparseVector& x);

int predict_binary(const BinaryModel& model, const SparseVector& x);

// Majority vote over all machines; a tie goes to the smallest class id.
int predict_ovo(const OvoModel& model, const SparseVector& x);

void serialize_model(const OvoModel& model, std::ostream& out);
std::string serialize_model(const OvoModel& model);
OvoModel deserialize_model(std::istream& in);
OvoModel deserialize_model(const std::string& text);

void save_model(const OvoModel& model, const std::string& path);
OvoModel load_model(const std::string& path);

}  // namespace coreball
