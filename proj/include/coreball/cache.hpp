#pragma once

#include <cstddef>
#include <list>
#include <span>
#include <unordered_map>
#include <vector>

#include "coreball/config.hpp"
#include "coreball/tilde.hpp"

namespace coreball {

// LRU cache of kernel columns. An entry holds the ktilde(x_i, .) values this
// run has already computed for row i, keyed and sorted by the partner row;
// a request covered by the entry performs no kernel evaluations, a partially
// covered one computes and merges only the missing rows. Values are stored
// verbatim, so cached and uncached runs see bit-identical numbers.
//
// Single-writer: one cache per solver instance.
class KernelCache {
 public:
  explicit KernelCache(std::size_t capacity_bytes) : capacity_(capacity_bytes) {}

  // Fills out[k] = ktilde(x_i, x_{rows[k]}). `rows` must be sorted ascending.
  void column(const TildeKernel& tk, int i, std::span<const int> rows,
              std::vector<double>& out, TrainStats& stats);

  void clear();
  std::size_t used_bytes() const { return used_; }

 private:
  struct Entry {
    std::vector<int> rows;  // sorted
    std::vector<double> vals;
    std::list<int>::iterator lru_it;
  };

  static std::size_t entry_bytes(std::size_t n) {
    return n * (sizeof(int) + sizeof(double));
  }

  void evict_until_fits(int keep_key);

  std::size_t capacity_;
  std::size_t used_ = 0;
  std::unordered_map<int, Entry> entries_;
  std::list<int> lru_;  // front = most recently used
};

}  // namespace coreball
