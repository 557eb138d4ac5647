#include "coreball/model.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "coreball/io.hpp"

namespace coreball {

namespace {
constexpr const char* kMagic = "coreball-svm v1";
}

BinaryModel build_binary(const DualState& state,
                         const std::vector<const SparseVector*>& features,
                         const std::vector<int>& labels, const KernelSpec& kernel,
                         double C, int positive_class, int negative_class) {
  BinaryModel model;
  model.kernel = kernel;
  model.C = C;
  model.positive_class = positive_class;
  model.negative_class = negative_class;
  const auto rows = state.coreset();
  const auto w = state.weights();
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (w[k] <= 0.0) continue;
    model.support.emplace_back(*features[rows[k]], w[k] * labels[rows[k]]);
  }
  if (model.support.empty()) throw std::logic_error("model has no support vectors");
  return model;
}

double decision_value(const BinaryModel& model, const SparseVector& x) {
  double h = 0.0;
  for (const auto& [sv, coef] : model.support)
    h += coef * (kernel_eval(model.kernel, sv, x) + 1.0);
  return h;
}

int predict_binary(const BinaryModel& model, const SparseVector& x) {
  return decision_value(model, x) >= 0.0 ? model.positive_class : model.negative_class;
}

int predict_ovo(const OvoModel& model, const SparseVector& x) {
  if (model.machines.empty()) throw std::invalid_argument("empty model");
  std::map<int, int> votes;
  for (int c : model.classes) votes[c] = 0;
  for (const auto& machine : model.machines) ++votes[predict_binary(machine, x)];
  int best_class = model.classes.front();
  int best_votes = -1;
  for (int c : model.classes) {  // ascending ids, so ties keep the smallest
    if (votes[c] > best_votes) {
      best_votes = votes[c];
      best_class = c;
    }
  }
  return best_class;
}

void serialize_model(const OvoModel& model, std::ostream& out) {
  const std::size_t expected = model.classes.size() * (model.classes.size() - 1) / 2;
  if (model.classes.size() < 2 || model.machines.size() != expected)
    throw std::invalid_argument("model does not hold one machine per class pair");

  out << kMagic << '\n';
  out << "kernel " << model.machines.front().kernel.describe() << '\n';
  out << "C " << format_double(model.machines.front().C) << '\n';
  out << "classes " << model.classes.size();
  for (int c : model.classes) out << ' ' << c;
  out << '\n';
  for (const auto& machine : model.machines) {
    if (machine.support.empty()) throw std::logic_error("model has no support vectors");
    out << "machine " << machine.positive_class << ' ' << machine.negative_class
        << " nsv=" << machine.support.size() << '\n';
    for (const auto& [sv, coef] : machine.support) {
      out << format_double(coef);
      for (std::size_t k = 0; k < sv.nnz(); ++k)
        out << ' ' << (sv.idx[k] + 1) << ':' << format_double(sv.val[k]);
      out << '\n';
    }
  }
}

std::string serialize_model(const OvoModel& model) {
  std::ostringstream oss;
  serialize_model(model, oss);
  return oss.str();
}

namespace {

double read_double_token(const std::string& tok, const char* what) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || ptr != tok.data() + tok.size())
    throw ParseError(std::string("bad ") + what + " '" + tok + "' in model file");
  return v;
}

}  // namespace

OvoModel deserialize_model(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kMagic)
    throw ParseError("unsupported model file (expected '" + std::string(kMagic) + "')");

  if (!std::getline(in, line) || line.rfind("kernel ", 0) != 0)
    throw ParseError("model file is missing the kernel line");
  const KernelSpec kernel = [&] {
    try {
      return KernelSpec::parse(line.substr(7));
    } catch (const std::exception& e) {
      throw ParseError(std::string("bad kernel line in model file: ") + e.what());
    }
  }();

  if (!std::getline(in, line) || line.rfind("C ", 0) != 0)
    throw ParseError("model file is missing the C line");
  const double C = read_double_token(line.substr(2), "C");

  if (!std::getline(in, line) || line.rfind("classes ", 0) != 0)
    throw ParseError("model file is missing the classes line");
  OvoModel model;
  {
    std::istringstream cls(line.substr(8));
    std::size_t k = 0;
    cls >> k;
    int c;
    while (cls >> c) model.classes.push_back(c);
    if (k < 2 || model.classes.size() != k)
      throw ParseError("classes line does not match its declared count");
  }

  const std::size_t expected = model.classes.size() * (model.classes.size() - 1) / 2;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream hdr(line);
    std::string tag, nsv_tok;
    BinaryModel machine;
    machine.kernel = kernel;
    machine.C = C;
    hdr >> tag >> machine.positive_class >> machine.negative_class >> nsv_tok;
    if (!hdr || tag != "machine" || nsv_tok.rfind("nsv=", 0) != 0)
      throw ParseError("malformed machine header '" + line + "'");
    std::size_t nsv = 0;
    try {
      nsv = std::stoul(nsv_tok.substr(4));
    } catch (const std::exception&) {
      throw ParseError("malformed machine header '" + line + "'");
    }
    if (nsv == 0) throw ParseError("machine without support vectors");
    for (std::size_t s = 0; s < nsv; ++s) {
      if (!std::getline(in, line)) throw ParseError("truncated support vector block");
      std::istringstream sv_line(line);
      std::string tok;
      sv_line >> tok;
      SparseVector sv;
      const double coef = read_double_token(tok, "coefficient");
      int prev = 0;
      while (sv_line >> tok) {
        const auto colon = tok.find(':');
        if (colon == std::string::npos) throw ParseError("malformed support vector entry '" + tok + "'");
        int idx = 0;
        try {
          idx = std::stoi(tok.substr(0, colon));
        } catch (const std::exception&) {
          throw ParseError("malformed support vector entry '" + tok + "'");
        }
        if (idx <= prev) throw ParseError("non-increasing support vector index");
        prev = idx;
        sv.push_back(idx - 1, read_double_token(tok.substr(colon + 1), "value"));
      }
      machine.support.emplace_back(std::move(sv), coef);
    }
    model.machines.push_back(std::move(machine));
  }
  if (model.machines.size() != expected)
    throw ParseError("model does not hold one machine per class pair");
  return model;
}

OvoModel deserialize_model(const std::string& text) {
  std::istringstream iss(text);
  return deserialize_model(iss);
}

void save_model(const OvoModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  serialize_model(model, out);
}

OvoModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  return deserialize_model(in);
}

}  // namespace coreball
