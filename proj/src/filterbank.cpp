#include "fracsar/filterbank.hpp"

#include <algorithm>
#include <cmath>

#include "fracsar/error.hpp"
#include "fracsar/fft.hpp"

namespace fracsar {

std::string to_string(KernelFamily family) {
  switch (family) {
    case KernelFamily::LaplacianOfGaussian:
      return "log";
  }
  return "unknown";
}

KernelFamily parse_kernel_family(std::string_view name) {
  if (name == "log" || name == "laplacian-of-gaussian") return KernelFamily::LaplacianOfGaussian;
  throw ConfigError("unknown kernel family '" + std::string(name) + "'");
}

double log_profile(double x) noexcept { return x * x * std::exp(-0.5 * x * x); }

WaveletKernel::WaveletKernel(GridSpec spec, KernelFamily family, double scale, double gain)
    : spec_(spec), family_(family), scale_(scale), gain_(gain) {
  spec_.validate();
  response_.resize(spec_.pixel_count());
  std::size_t i = 0;
  for (int r = 0; r < spec_.height; ++r) {
    for (int c = 0; c < spec_.width; ++c) response_[i++] = evaluate(radial_frequency(spec_, r, c));
  }
}

double WaveletKernel::evaluate(double omega) const noexcept {
  return gain_ * log_profile(scale_ * omega);
}

WaveletKernel build_log_kernel(const GridSpec& spec, double scale) {
  spec.validate();
  const double limit = std::min(spec.width, spec.height) * spec.spacing / 8.0;
  if (!(scale > 0.0) || scale > limit) {
    throw DomainError("kernel scale " + std::to_string(scale) + " outside (0, " +
                      std::to_string(limit) + "] for this grid");
  }
  return WaveletKernel(spec, KernelFamily::LaplacianOfGaussian, scale, 1.0);
}

WaveletKernel dilate_kernel(const WaveletKernel& kernel) {
  // gain*f(s*2w)*4 == (4*gain)*f((2s)*w)
  return WaveletKernel(kernel.spec(), kernel.family(), 2.0 * kernel.scale(), 4.0 * kernel.gain());
}

namespace {

void require_same_grid(const GridSpec& a, const GridSpec& b) {
  if (a.width != b.width || a.height != b.height || a.spacing != b.spacing) {
    throw DimensionError("kernel grid does not match field grid");
  }
}

FieldGrid filter_spectrum(const GridSpec& spec, std::span<const fft::Complex> half,
                          const WaveletKernel& kernel) {
  const int h = spec.height;
  const int w = spec.width;
  const int hw = fft::half_width(w);
  std::vector<fft::Complex> product(half.begin(), half.end());
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < hw; ++c) product[static_cast<std::size_t>(r) * hw + c] *= kernel.response(r, c);
  }
  return FieldGrid(spec, fft::inverse_real(h, w, product));
}

}  // namespace

FieldGrid apply_filter(const FieldGrid& field, const WaveletKernel& kernel) {
  require_same_grid(field.spec(), kernel.spec());
  const auto half = fft::forward_real(field.height(), field.width(), field.values());
  return filter_spectrum(field.spec(), half, kernel);
}

FilterBank::FilterBank(const GridSpec& spec, std::vector<double> scales, KernelFamily family)
    : spec_(spec), family_(family), scales_(std::move(scales)) {
  if (scales_.size() < 3) throw ConfigError("filter bank needs at least 3 scales");
  for (std::size_t i = 1; i < scales_.size(); ++i) {
    if (!(scales_[i] > scales_[i - 1])) throw ConfigError("bank scales must be strictly increasing");
  }
  pairs_.reserve(scales_.size());
  for (double s : scales_) {
    auto base = build_log_kernel(spec_, s);
    auto dilated = dilate_kernel(base);
    pairs_.push_back({std::move(base), std::move(dilated)});
  }
}

const KernelPair& FilterBank::pair(std::size_t i) const {
  if (i >= pairs_.size()) throw ConfigError("scale index " + std::to_string(i) + " out of range");
  return pairs_[i];
}

FilteredPair filter_pair(const FieldGrid& field, const FilterBank& bank, std::size_t scale_index) {
  const auto& kp = bank.pair(scale_index);
  require_same_grid(field.spec(), bank.spec());
  const auto half = fft::forward_real(field.height(), field.width(), field.values());
  return {bank.scales()[scale_index], filter_spectrum(field.spec(), half, kp.base),
          filter_spectrum(field.spec(), half, kp.dilated)};
}

}  // namespace fracsar
