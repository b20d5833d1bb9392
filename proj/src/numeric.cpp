#include "shearlet/numeric.hpp"

#include <algorithm>
#include <exception>
#include <thread>
#include <vector>

namespace shearlet {

namespace {

constexpr std::size_t kLeaf = 64;

template <class T>
T pairwise(const T* v, std::size_t n) {
  if (n <= kLeaf) {
    T acc{};
    for (std::size_t i = 0; i < n; ++i) acc += v[i];
    return acc;
  }
  std::size_t half = n / 2;
  return pairwise(v, half) + pairwise(v + half, n - half);
}

double pairwise_fn(std::size_t lo, std::size_t n, const std::function<double(std::size_t)>& f) {
  if (n <= kLeaf) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += f(lo + i);
    return acc;
  }
  std::size_t half = n / 2;
  return pairwise_fn(lo, half, f) + pairwise_fn(lo + half, n - half, f);
}

}  // namespace

double pairwise_sum(std::span<const double> values) { return pairwise(values.data(), values.size()); }

cplx pairwise_sum(std::span<const cplx> values) { return pairwise(values.data(), values.size()); }

double pairwise_sum(std::size_t count, const std::function<double(std::size_t)>& f) {
  return pairwise_fn(0, count, f);
}

unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t, unsigned)>& body) {
  threads = std::max(1u, std::min<unsigned>(resolve_threads(threads), static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i, 0);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      std::size_t lo = count * w / threads;
      std::size_t hi = count * (w + 1) / threads;
      try {
        for (std::size_t i = lo; i < hi; ++i) body(i, w);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace shearlet
