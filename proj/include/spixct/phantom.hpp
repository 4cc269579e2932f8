#pragma once

#include <vector>

#include "spixct/grid.hpp"

namespace spixct {

/// One additive ellipse of a composite phantom.
struct EllipseSpec {
    double center_x = 0.0;
    double center_y = 0.0;
    double semi_axis_a = 0.0;  // along the rotated x direction
    double semi_axis_b = 0.0;  // along the rotated y direction
    double rotation = 0.0;     // radians, counterclockwise
    double additive_intensity = 0.0;
};

/// The standard ten-ellipse Shepp-Logan parameter table (head phantom).
/// The same table ships as a machine-readable fixture in
/// data/shepp_logan_ellipses.csv; a unit test keeps the two in sync.
const std::vector<EllipseSpec>& shepp_logan_ellipses();

/// Sum of additive ellipse intensities at each pixel center.
ImageGrid rasterize_ellipses(const std::vector<EllipseSpec>& ellipses, int n_pixels,
                             double half_width);

/// Standard Shepp-Logan head phantom; requires n_pixels >= 8.
ImageGrid generate_shepp_logan(int n_pixels, double half_width);

/// Centered disk: amplitude inside radius, zero outside (pixel-center sampling).
ImageGrid generate_disk(int n_pixels, double half_width, double radius, double amplitude);

/// Centered Gaussian amplitude*exp(-|x|^2/(2 sigma^2)), truncated to zero
/// below 1e-12*amplitude to keep the support effectively compact.
ImageGrid generate_gaussian(int n_pixels, double half_width, double sigma, double amplitude);

}  // namespace spixct
