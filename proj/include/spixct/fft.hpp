#pragma once

#include <complex>
#include <vector>

namespace spixct::fft {

/// In-place complex DFT of arbitrary length (radix-2 for powers of two,
/// Bluestein otherwise). The inverse applies the 1/n scale.
void transform(std::vector<std::complex<double>>& a, bool inverse);

/// Row-column 2D transform of a rows*cols array stored row-major.
void transform_2d(std::vector<std::complex<double>>& a, int rows, int cols, bool inverse);

}  // namespace spixct::fft
