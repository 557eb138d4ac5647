#include "coreball/config.hpp"

#include <stdexcept>

namespace coreball {

void SolverConfig::validate(int m) const {
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw std::invalid_argument("epsilon must lie in (0, 1)");
  if (sample_size < 1) throw std::invalid_argument("sample_size must be >= 1");
  if (max_iterations < 1) throw std::invalid_argument("max_iterations must be >= 1");
  if (init == InitPolicy::RandomMeb && init_subset < 2)
    throw std::invalid_argument("random-ball init needs a subset of >= 2 points");
  if (!(zero_tolerance >= 0.0)) throw std::invalid_argument("zero_tolerance must be >= 0");
  if (m < 2) throw std::invalid_argument("training needs at least 2 rows");
}

}  // namespace coreball
