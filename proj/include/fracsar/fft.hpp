#pragma once

#include <complex>
#include <span>
#include <vector>

namespace fracsar::fft {

using Complex = std::complex<double>;

/// Number of columns kept by a real-to-complex transform of width w.
inline int half_width(int w) noexcept { return w / 2 + 1; }

/// Unnormalized forward DFT of a real row-major (h x w) array. Returns the
/// non-redundant half spectrum, h x (w/2+1), row-major.
std::vector<Complex> forward_real(int h, int w, std::span<const double> in);

/// Inverse of forward_real including the 1/(h*w) factor.
std::vector<double> inverse_real(int h, int w, std::span<const Complex> half);

/// Unnormalized forward complex DFT, full h x w spectrum.
std::vector<Complex> forward(int h, int w, std::span<const Complex> in);

/// Inverse complex DFT including the 1/(h*w) factor.
std::vector<Complex> inverse(int h, int w, std::span<const Complex> in);

}  // namespace fracsar::fft
