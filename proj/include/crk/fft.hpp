#pragma once

// Thin RAII layer over FFTW: aligned complex buffers and in-place n-dimensional
// plans cached per (n, N). Planning is serialized; execution is thread-safe.

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <utility>
#include <vector>

#include "crk/error.hpp"

namespace crk {

class ComplexBuffer {
 public:
  explicit ComplexBuffer(std::size_t size)
      : size_(size), data_(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * size))) {
    if (!data_) throw Error("fftw_malloc failed");
    for (std::size_t i = 0; i < size; ++i) data()[i] = 0.0;
  }
  ~ComplexBuffer() { fftw_free(data_); }
  ComplexBuffer(ComplexBuffer&& o) noexcept : size_(std::exchange(o.size_, 0)), data_(std::exchange(o.data_, nullptr)) {}
  ComplexBuffer& operator=(ComplexBuffer&& o) noexcept {
    std::swap(size_, o.size_);
    std::swap(data_, o.data_);
    return *this;
  }
  ComplexBuffer(const ComplexBuffer&) = delete;
  ComplexBuffer& operator=(const ComplexBuffer&) = delete;

  std::size_t size() const { return size_; }
  std::complex<double>* data() { return reinterpret_cast<std::complex<double>*>(data_); }
  const std::complex<double>* data() const { return reinterpret_cast<const std::complex<double>*>(data_); }
  std::complex<double>& operator[](std::size_t i) { return data()[i]; }
  const std::complex<double>& operator[](std::size_t i) const { return data()[i]; }
  fftw_complex* raw() { return data_; }

 private:
  std::size_t size_;
  fftw_complex* data_;
};

class FftPlan {
 public:
  /// Shared plan for an n-dimensional cube of N points per axis.
  static const FftPlan& get(int n, int points) {
    static std::mutex mutex;
    static std::map<std::pair<int, int>, std::unique_ptr<FftPlan>> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto& slot = cache[{n, points}];
    if (!slot) slot.reset(new FftPlan(n, points));
    return *slot;
  }

  ~FftPlan() {
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(backward_);
  }
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;

  std::size_t size() const { return size_; }

  /// Unnormalized in-place transforms (sign -1 forward, +1 backward).
  void forward(ComplexBuffer& buf) const { execute(forward_, buf); }
  void backward(ComplexBuffer& buf) const { execute(backward_, buf); }

 private:
  FftPlan(int n, int points) : size_(1) {
    std::vector<int> dims(static_cast<std::size_t>(n), points);
    for (int d : dims) size_ *= static_cast<std::size_t>(d);
    ComplexBuffer scratch(size_);
    forward_ = fftw_plan_dft(n, dims.data(), scratch.raw(), scratch.raw(), FFTW_FORWARD, FFTW_ESTIMATE);
    backward_ = fftw_plan_dft(n, dims.data(), scratch.raw(), scratch.raw(), FFTW_BACKWARD, FFTW_ESTIMATE);
    if (!forward_ || !backward_) throw Error("FFTW planning failed");
  }

  void execute(fftw_plan plan, ComplexBuffer& buf) const {
    if (buf.size() != size_) throw ShapeMismatch("buffer size does not match FFT plan");
    fftw_execute_dft(plan, buf.raw(), buf.raw());
  }

  std::size_t size_;
  fftw_plan forward_ = nullptr;
  fftw_plan backward_ = nullptr;
};

}  // namespace crk
