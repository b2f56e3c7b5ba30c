#include "fracsar/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cstring>
#include <memory>
#include <mutex>

#include "fracsar/error.hpp"

namespace fracsar::fft {
namespace {

// FFTW planning is not reentrant; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const noexcept { fftw_free(p); }
};
template <class T>
using FftwBuffer = std::unique_ptr<T[], FftwFree>;

template <class T>
FftwBuffer<T> allocate(std::size_t n) {
  auto* p = static_cast<T*>(fftw_malloc(sizeof(T) * n));
  if (p == nullptr) throw std::bad_alloc();
  return FftwBuffer<T>(p);
}

struct Plan {
  fftw_plan handle = nullptr;
  ~Plan() {
    if (handle != nullptr) {
      std::lock_guard lock(planner_mutex());
      fftw_destroy_plan(handle);
    }
  }
};

std::size_t area(int h, int w) { return static_cast<std::size_t>(h) * static_cast<std::size_t>(w); }

void check_size(std::size_t got, std::size_t want) {
  if (got != want) throw DimensionError("FFT input size does not match the requested grid");
}

std::vector<Complex> run_c2c(int h, int w, std::span<const Complex> in, int sign) {
  const std::size_t n = area(h, w);
  check_size(in.size(), n);
  auto buf = allocate<fftw_complex>(n);
  std::memcpy(static_cast<void*>(buf.get()), static_cast<const void*>(in.data()), sizeof(fftw_complex) * n);
  Plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan.handle = fftw_plan_dft_2d(h, w, buf.get(), buf.get(), sign, FFTW_ESTIMATE);
  }
  fftw_execute(plan.handle);
  std::vector<Complex> out(n);
  std::memcpy(static_cast<void*>(out.data()), static_cast<const void*>(buf.get()), sizeof(fftw_complex) * n);
  return out;
}

}  // namespace

std::vector<Complex> forward_real(int h, int w, std::span<const double> in) {
  const std::size_t n = area(h, w);
  check_size(in.size(), n);
  const std::size_t nh = area(h, half_width(w));
  auto src = allocate<double>(n);
  auto dst = allocate<fftw_complex>(nh);
  std::copy(in.begin(), in.end(), src.get());
  Plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan.handle = fftw_plan_dft_r2c_2d(h, w, src.get(), dst.get(), FFTW_ESTIMATE);
  }
  fftw_execute(plan.handle);
  std::vector<Complex> out(nh);
  std::memcpy(static_cast<void*>(out.data()), static_cast<const void*>(dst.get()), sizeof(fftw_complex) * nh);
  return out;
}

std::vector<double> inverse_real(int h, int w, std::span<const Complex> half) {
  const std::size_t n = area(h, w);
  const std::size_t nh = area(h, half_width(w));
  check_size(half.size(), nh);
  auto src = allocate<fftw_complex>(nh);
  auto dst = allocate<double>(n);
  // c2r destroys its input; src is a private copy.
  std::memcpy(static_cast<void*>(src.get()), static_cast<const void*>(half.data()), sizeof(fftw_complex) * nh);
  Plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan.handle = fftw_plan_dft_c2r_2d(h, w, src.get(), dst.get(), FFTW_ESTIMATE);
  }
  fftw_execute(plan.handle);
  const double scale = 1.0 / static_cast<double>(n);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = dst[i] * scale;
  return out;
}

std::vector<Complex> forward(int h, int w, std::span<const Complex> in) {
  return run_c2c(h, w, in, FFTW_FORWARD);
}

std::vector<Complex> inverse(int h, int w, std::span<const Complex> in) {
  auto out = run_c2c(h, w, in, FFTW_BACKWARD);
  const double scale = 1.0 / static_cast<double>(area(h, w));
  for (auto& v : out) v *= scale;
  return out;
}

}  // namespace fracsar::fft
