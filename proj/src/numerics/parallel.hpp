#pragma once

#include <mpfr.h>

#include <algorithm>
#include <atomic>
#include <exception>
#include <optional>
#include <thread>
#include <vector>

namespace wml {

inline int default_jobs() {
  unsigned n = std::thread::hardware_concurrency();
  return n ? static_cast<int>(n) : 1;
}

// Evaluates f(0..n-1) on up to `jobs` threads; results keep index order.
// Workers inherit the caller's MPFR default precision. The exception from the
// lowest failing index is rethrown after all workers finish.
template <typename F>
auto parallel_map(std::size_t n, int jobs, F&& f) -> std::vector<decltype(f(std::size_t{0}))> {
  using T = decltype(f(std::size_t{0}));
  std::vector<std::optional<T>> slots(n);
  std::vector<std::exception_ptr> errors(n);
  mpfr_prec_t bits = mpfr_get_default_prec();
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    mpfr_prec_t saved = mpfr_get_default_prec();
    mpfr_set_default_prec(bits);
    for (std::size_t i; (i = next.fetch_add(1)) < n;) {
      try {
        slots[i].emplace(f(i));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
    mpfr_set_default_prec(saved);
  };
  int workers = std::max(1, std::min<int>(jobs, static_cast<int>(n)));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<T> out;
  out.reserve(n);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

}  // namespace wml
