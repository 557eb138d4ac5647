#include "coreball/kernel.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "coreball/io.hpp"

namespace coreball {

double ipow(double x, int d) {
  double r = 1.0;
  for (int i = 0; i < d; ++i) r *= x;
  return r;
}

void KernelSpec::validate() const {
  switch (kind) {
    case Kind::Rbf:
      if (!(sigma2 > 0.0)) throw std::invalid_argument("rbf kernel needs sigma2 > 0");
      break;
    case Kind::Linear:
      break;
    case Kind::PolyInhomogeneous:
      if (degree < 1) throw std::invalid_argument("poly kernel needs degree >= 1");
      break;
    case Kind::PolyHomogeneous:
      if (degree < 1) throw std::invalid_argument("polyh kernel needs degree >= 1");
      if (!(gamma > 0.0)) throw std::invalid_argument("polyh kernel needs gamma > 0");
      break;
  }
}

double kernel_eval(const KernelSpec& spec, const SparseVector& a, const SparseVector& b) {
  switch (spec.kind) {
    case KernelSpec::Kind::Rbf: {
      const double d2 = norm2(a) + norm2(b) - 2.0 * dot(a, b);
      return std::exp(-d2 / (2.0 * spec.sigma2));
    }
    case KernelSpec::Kind::Linear:
      return dot(a, b);
    case KernelSpec::Kind::PolyInhomogeneous:
      return ipow(dot(a, b) + 1.0, spec.degree);
    case KernelSpec::Kind::PolyHomogeneous:
      return ipow(spec.gamma * dot(a, b), spec.degree);
  }
  return 0.0;  // unreachable
}

std::string KernelSpec::describe() const {
  std::ostringstream oss;
  switch (kind) {
    case Kind::Rbf:
      oss << "rbf sigma2=" << format_double(sigma2);
      break;
    case Kind::Linear:
      oss << "linear";
      break;
    case Kind::PolyInhomogeneous:
      oss << "poly degree=" << degree;
      break;
    case Kind::PolyHomogeneous:
      oss << "polyh gamma=" << format_double(gamma) << " degree=" << degree;
      break;
  }
  return oss.str();
}

KernelSpec KernelSpec::parse(const std::string& text) {
  std::istringstream in(text);
  std::string name;
  in >> name;
  KernelSpec spec;
  auto read_param = [&](const std::string& key) {
    std::string tok;
    if (!(in >> tok) || tok.rfind(key + "=", 0) != 0)
      throw std::invalid_argument("bad kernel description '" + text + "'");
    return tok.substr(key.size() + 1);
  };
  if (name == "rbf") {
    spec.kind = Kind::Rbf;
    spec.sigma2 = std::stod(read_param("sigma2"));
  } else if (name == "linear") {
    spec.kind = Kind::Linear;
  } else if (name == "poly") {
    spec.kind = Kind::PolyInhomogeneous;
    spec.degree = std::stoi(read_param("degree"));
  } else if (name == "polyh") {
    spec.kind = Kind::PolyHomogeneous;
    spec.gamma = std::stod(read_param("gamma"));
    spec.degree = std::stoi(read_param("degree"));
  } else {
    throw std::invalid_argument("unknown kernel '" + name + "'");
  }
  spec.validate();
  return spec;
}

}  // namespace coreball
