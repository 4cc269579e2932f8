#pragma once

#include "spixct/grid.hpp"
#include "spixct/projector.hpp"

namespace spixct {

/// |D| is nonlocal, so the padded transform controls periodization error.
struct SpectralConfig {
    int pad_factor = 2;  // valid values: 2, 3, 4
    enum class Taper { none, cosine } taper = Taper::none;
};

/// Inversion constant c_2 = (2*pi*|S^0|)^(-1) with |S^0| = 2, derived from
/// the formula rather than hard-coded as a decimal.
double inversion_constant();

/// |D| = (-Delta)^(1/2): zero-pad to pad_factor*n, multiply the discrete
/// spectrum by |xi| (zero at the zero frequency, so constants are
/// annihilated), inverse transform, crop. The imaginary residue is checked
/// against 1e-10 relative and discarded.
ImageGrid half_laplacian(const ImageGrid& image, const SpectralConfig& config = {});

/// The multiplier core without padding, acting on the grid's own torus.
/// Exact grid-frequency tones are exact eigenvectors of this variant, which
/// is what the symbol tests exercise; half_laplacian wraps it with
/// pad / crop.
ImageGrid half_laplacian_periodic(const ImageGrid& image);

/// |D| for X'X-type data known only on the square: the slowly decaying
/// A/|x| tail is split off as A/sqrt(r^2+b^2), whose half-Laplacian is the
/// closed form A*b/(b^2+r^2)^(3/2), and only the fast-decaying residue goes
/// through the padded multiplier. Both linear inversions route through this.
ImageGrid half_laplacian_tail_aware(const ImageGrid& field, const SpectralConfig& config = {});

/// Linear inversion f = c_2 |D| (X'X f) applied to a precomputed normal image.
ImageGrid invert_xray_normal(const ImageGrid& normal_image, const SpectralConfig& config = {});

/// Backproject, then filter: c_2 |D| X' applied to a sinogram.
ImageGrid filtered_backprojection(const Sinogram& sinogram, const GridSpec& target,
                                  const SpectralConfig& config = {});

}  // namespace spixct
