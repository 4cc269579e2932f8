#pragma once

#include <cstddef>
#include <vector>

namespace spixct {

inline constexpr double kSupportFraction = 0.95;

/// Square pixel lattice covering [-half_width, half_width]^2.
/// Row 0 is the top of the image (y = +half_width), column 0 the left
/// (x = -half_width); values live at pixel centers.
///
/// The reconstruction domain Omega is the inscribed disk of radius
/// support_radius (default 0.95 * half_width); Omega_1, the observation
/// domain, is the full square.
struct GridSpec {
    int n = 0;
    double half_width = 1.0;
    double support_radius = 0.0;

    double pixel_spacing() const { return 2.0 * half_width / (n - 1); }

    // Centered coordinates so that x(n-1-j) == -x(j) exactly in floating point.
    double x(int j) const { return (j - 0.5 * (n - 1)) * pixel_spacing(); }
    double y(int i) const { return (0.5 * (n - 1) - i) * pixel_spacing(); }

    bool operator==(const GridSpec&) const = default;
};

/// Validates and fills defaults (support_radius = 0 picks 0.95 * half_width).
GridSpec make_grid_spec(int n, double half_width, double support_radius = 0.0);

/// A real-valued function f on the lattice; the reconstruction unknown.
struct ImageGrid {
    GridSpec grid;
    std::vector<double> values;  // row-major, [i*n + j]

    double& at(int i, int j) { return values[static_cast<size_t>(i) * grid.n + j]; }
    double at(int i, int j) const { return values[static_cast<size_t>(i) * grid.n + j]; }
};

/// Per-pixel measurement data (Kf or derivative fields) on the same lattice
/// as ImageGrid. Kept as a distinct type: a ScalarField is data attached to
/// source locations, not a density.
struct ScalarField {
    GridSpec grid;
    std::vector<double> values;

    double& at(int i, int j) { return values[static_cast<size_t>(i) * grid.n + j]; }
    double at(int i, int j) const { return values[static_cast<size_t>(i) * grid.n + j]; }
};

ImageGrid make_image(const GridSpec& spec);
ScalarField make_field(const GridSpec& spec);

bool all_finite(const std::vector<double>& values);
double max_abs(const std::vector<double>& values);

/// Discrete L2 inner product with uniform weight pixel_spacing^2.
double dot_image(const ImageGrid& a, const ImageGrid& b);
double dot_field(const ScalarField& a, const ScalarField& b);

}  // namespace spixct
