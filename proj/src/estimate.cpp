#include "perc/estimate.hpp"

#include <algorithm>
#include <exception>
#include <stdexcept>
#include <thread>
#include <vector>

namespace perc {

Estimate make_estimate(std::uint64_t successes, std::uint64_t trials) {
  if (trials == 0) throw std::invalid_argument("estimate needs at least one trial");
  const double mean = static_cast<double>(successes) / static_cast<double>(trials);
  return {mean, std::sqrt(mean * (1.0 - mean) / static_cast<double>(trials)), successes, trials};
}

unsigned default_workers() { return std::max(1u, std::thread::hardware_concurrency()); }

Estimate estimate_bernoulli(std::uint64_t trials, unsigned workers,
                            const std::function<bool(std::uint64_t)>& trial) {
  if (trials == 0) throw std::invalid_argument("estimate needs at least one trial");
  if (workers == 0) workers = default_workers();
  workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, trials));
  if (workers == 1) {
    std::uint64_t hits = 0;
    for (std::uint64_t t = 0; t < trials; ++t) hits += trial(t) ? 1 : 0;
    return make_estimate(hits, trials);
  }

  std::vector<std::uint64_t> hits(workers, 0);
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::uint64_t t = w; t < trials; t += workers) hits[w] += trial(t) ? 1 : 0;
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::uint64_t total = 0;
  for (auto h : hits) total += h;
  return make_estimate(total, trials);
}

}  // namespace perc
