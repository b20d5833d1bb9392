#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "shearlet/numeric.hpp"

namespace shearlet {

// Aligned complex buffer owned by FFTW's allocator.
class FftBuffer {
 public:
  FftBuffer() = default;
  explicit FftBuffer(std::size_t size);
  FftBuffer(FftBuffer&&) noexcept;
  FftBuffer& operator=(FftBuffer&&) noexcept;
  FftBuffer(const FftBuffer&) = delete;
  FftBuffer& operator=(const FftBuffer&) = delete;
  ~FftBuffer();

  cplx* data() { return data_; }
  const cplx* data() const { return data_; }
  std::size_t size() const { return size_; }
  cplx& operator[](std::size_t i) { return data_[i]; }
  const cplx& operator[](std::size_t i) const { return data_[i]; }
  void fill_zero();

 private:
  cplx* data_ = nullptr;
  std::size_t size_ = 0;
};

// In-place unnormalized multidimensional DFT. sign = -1 is exp(-2 pi i k m / N).
// Plans are created once with FFTW_ESTIMATE and shared; execute() is safe to
// call from several threads on distinct buffers.
class FftPlan {
 public:
  FftPlan(const std::vector<std::size_t>& shape, int sign);
  ~FftPlan();
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;

  void execute(FftBuffer& buffer) const;
  std::size_t size() const { return size_; }

 private:
  void* plan_ = nullptr;
  std::size_t size_ = 0;
};

std::shared_ptr<const FftPlan> cached_plan(const std::vector<std::size_t>& shape, int sign);

}  // namespace shearlet
