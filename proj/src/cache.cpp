#include "coreball/cache.hpp"

#include <algorithm>

namespace coreball {

void KernelCache::column(const TildeKernel& tk, int i, std::span<const int> rows,
                         std::vector<double>& out, TrainStats& stats) {
  out.resize(rows.size());

  if (capacity_ == 0) {
    for (std::size_t k = 0; k < rows.size(); ++k) out[k] = tk.eval(i, rows[k]);
    stats.kernel_evals += rows.size();
    return;
  }

  auto it = entries_.find(i);
  if (it == entries_.end()) {
    Entry e;
    e.rows.assign(rows.begin(), rows.end());
    e.vals.resize(rows.size());
    for (std::size_t k = 0; k < rows.size(); ++k) e.vals[k] = tk.eval(i, rows[k]);
    stats.kernel_evals += rows.size();
    out.assign(e.vals.begin(), e.vals.end());
    lru_.push_front(i);
    e.lru_it = lru_.begin();
    used_ += entry_bytes(e.rows.size());
    entries_.emplace(i, std::move(e));
    evict_until_fits(i);
    return;
  }

  Entry& e = it->second;
  lru_.splice(lru_.begin(), lru_, e.lru_it);  // mark as most recent

  // Merge-walk entry rows vs requested rows, collecting what is missing.
  std::vector<int> missing;
  {
    std::size_t a = 0;
    for (int row : rows) {
      while (a < e.rows.size() && e.rows[a] < row) ++a;
      if (a == e.rows.size() || e.rows[a] != row) missing.push_back(row);
    }
  }

  if (missing.empty()) {
    ++stats.cache_hits;
  } else {
    std::vector<int> merged_rows;
    std::vector<double> merged_vals;
    merged_rows.reserve(e.rows.size() + missing.size());
    merged_vals.reserve(e.rows.size() + missing.size());
    std::size_t a = 0, b = 0;
    while (a < e.rows.size() || b < missing.size()) {
      if (b == missing.size() || (a < e.rows.size() && e.rows[a] < missing[b])) {
        merged_rows.push_back(e.rows[a]);
        merged_vals.push_back(e.vals[a]);
        ++a;
      } else {
        merged_rows.push_back(missing[b]);
        merged_vals.push_back(tk.eval(i, missing[b]));
        ++b;
      }
    }
    stats.kernel_evals += missing.size();
    used_ += entry_bytes(merged_rows.size()) - entry_bytes(e.rows.size());
    e.rows = std::move(merged_rows);
    e.vals = std::move(merged_vals);
  }

  std::size_t a = 0;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    while (e.rows[a] < rows[k]) ++a;
    out[k] = e.vals[a];
  }

  evict_until_fits(i);
}

void KernelCache::evict_until_fits(int keep_key) {
  // Evict least-recently-used first; keep_key goes last, and goes too if it
  // alone exceeds the budget (callers copy results out before this runs).
  while (used_ > capacity_ && !lru_.empty()) {
    int victim = lru_.back();
    if (victim == keep_key && lru_.size() > 1) victim = *std::prev(lru_.end(), 2);
    auto it = entries_.find(victim);
    used_ -= entry_bytes(it->second.rows.size());
    lru_.erase(it->second.lru_it);
    entries_.erase(it);
  }
}

void KernelCache::clear() {
  entries_.clear();
  lru_.clear();
  used_ = 0;
}

}  // namespace coreball
