#include "shearlet/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>

#include "shearlet/error.hpp"

namespace shearlet {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

FftBuffer::FftBuffer(std::size_t size) : size_(size) {
  data_ = reinterpret_cast<cplx*>(fftw_malloc(sizeof(fftw_complex) * size));
  if (data_ == nullptr && size > 0) throw Error(Errc::memory_budget, "fftw_malloc failed");
  fill_zero();
}

FftBuffer::FftBuffer(FftBuffer&& other) noexcept : data_(other.data_), size_(other.size_) {
  other.data_ = nullptr;
  other.size_ = 0;
}

FftBuffer& FftBuffer::operator=(FftBuffer&& other) noexcept {
  if (this != &other) {
    if (data_) fftw_free(data_);
    data_ = std::exchange(other.data_, nullptr);
    size_ = std::exchange(other.size_, 0);
  }
  return *this;
}

FftBuffer::~FftBuffer() {
  if (data_) fftw_free(data_);
}

void FftBuffer::fill_zero() {
  for (std::size_t i = 0; i < size_; ++i) data_[i] = 0.0;
}

FftPlan::FftPlan(const std::vector<std::size_t>& shape, int sign) {
  std::vector<int> dims(shape.begin(), shape.end());
  size_ = 1;
  for (std::size_t d : shape) size_ *= d;
  FftBuffer scratch(size_);
  std::lock_guard<std::mutex> lock(planner_mutex());
  auto* p = reinterpret_cast<fftw_complex*>(scratch.data());
  plan_ = fftw_plan_dft(static_cast<int>(dims.size()), dims.data(), p, p, sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD,
                        FFTW_ESTIMATE);
  if (plan_ == nullptr) throw Error(Errc::invalid_grid, "FFTW could not create a plan");
}

FftPlan::~FftPlan() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(plan_));
}

void FftPlan::execute(FftBuffer& buffer) const {
  if (buffer.size() != size_) throw Error(Errc::grid_mismatch, "FFT buffer size differs from plan");
  auto* p = reinterpret_cast<fftw_complex*>(buffer.data());
  fftw_execute_dft(static_cast<fftw_plan>(plan_), p, p);
}

std::shared_ptr<const FftPlan> cached_plan(const std::vector<std::size_t>& shape, int sign) {
  static std::mutex m;
  static std::map<std::pair<std::vector<std::size_t>, int>, std::shared_ptr<const FftPlan>> cache;
  std::lock_guard<std::mutex> lock(m);
  auto key = std::make_pair(shape, sign < 0 ? -1 : 1);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto plan = std::make_shared<const FftPlan>(shape, sign);
  cache.emplace(key, plan);
  return plan;
}

}  // namespace shearlet
