#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace martbound {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

// Relative difference scaled by the larger magnitude; 0 when both are 0.
inline double rel_diff(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  if (scale == 0.0) return 0.0;
  return std::abs(a - b) / scale;
}

// Accumulates log(sum(exp(log_term))) without leaving log space.
// Terms may span hundreds of orders of magnitude.
class LogSum {
 public:
  void add(double log_term) {
    if (log_term == -kInf) return;
    if (max_ == -kInf) {
      max_ = log_term;
      sum_ = 1.0;
      return;
    }
    if (log_term > max_) {
      sum_ = sum_ * std::exp(max_ - log_term) + 1.0;
      max_ = log_term;
    } else {
      sum_ += std::exp(log_term - max_);
    }
  }

  double log() const {
    if (max_ == -kInf) return -kInf;
    return max_ + std::log(sum_);
  }

  bool empty() const { return max_ == -kInf; }

 private:
  double max_ = -kInf;
  double sum_ = 0.0;
};

// Runs fn(i) for i in [0, count). Work is chunked over a fixed number of
// threads; fn must only touch state owned by index i so any worker count
// yields the same result.
template <typename Fn>
void parallel_for(std::size_t count, Fn&& fn, unsigned workers = 0) {
  if (count == 0) return;
  unsigned hw = std::thread::hardware_concurrency();
  if (workers == 0) workers = hw ? hw : 1;
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (count + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const std::size_t lo = static_cast<std::size_t>(w) * chunk;
    const std::size_t hi = std::min(count, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn] {
      for (std::size_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace martbound
