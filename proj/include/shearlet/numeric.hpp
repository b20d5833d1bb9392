#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace shearlet {

using cplx = std::complex<double>;

// Pairwise summation with a fixed split order, so results do not depend on
// thread count or call site.
double pairwise_sum(std::span<const double> values);
cplx pairwise_sum(std::span<const cplx> values);

// Sum of f(i) for i in [0, count) with the same fixed tree as pairwise_sum.
double pairwise_sum(std::size_t count, const std::function<double(std::size_t)>& f);

struct ParallelOptions {
  unsigned threads = 1;
};

// Runs body(i) for every i in [0, count). Each index runs exactly once.
// Work is distributed in contiguous blocks; body must only write to slots
// owned by index i.
void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t index, unsigned worker)>& body);

unsigned resolve_threads(unsigned requested);

}  // namespace shearlet
