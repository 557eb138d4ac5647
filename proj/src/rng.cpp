#include "coreball/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

namespace coreball {

double Rng::normal() {
  double u1 = uniform_real();
  while (u1 <= 0.0) u1 = uniform_real();
  const double u2 = uniform_real();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

std::vector<int> Rng::sample_distinct_sorted(int n, int k) {
  std::vector<int> out;
  if (k >= n) {
    out.resize(static_cast<std::size_t>(n));
    std::iota(out.begin(), out.end(), 0);
    return out;
  }
  out.reserve(static_cast<std::size_t>(k));
  std::unordered_set<int> seen;
  seen.reserve(static_cast<std::size_t>(k) * 2);
  while (static_cast<int>(out.size()) < k) {
    const int idx = static_cast<int>(uniform_index(static_cast<std::uint64_t>(n)));
    if (seen.insert(idx).second) out.push_back(idx);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace coreball
