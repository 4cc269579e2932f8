#pragma once

#include <vector>

#include "spixct/grid.hpp"

namespace spixct {

/// Parallel-beam ray sampling. Angles theta_k = pi*k/n_angles cover [0, pi)
/// only, since the line integral satisfies Xf(.,theta) == Xf(.,theta+pi).
/// Offsets s_j are uniform on [-offset_extent, offset_extent] along
/// theta_perp = (-sin theta, cos theta).
struct RayGeometry {
    int n_angles = 0;
    int n_offsets = 0;
    double offset_extent = 0.0;
    double step_along_ray = 0.0;

    double angle(int k) const;
    double offset_spacing() const { return 2.0 * offset_extent / (n_offsets - 1); }
    double offset(int j) const { return (j - 0.5 * (n_offsets - 1)) * offset_spacing(); }
};

/// Geometry matched to a grid: offset_extent = sqrt(2)*half_width (every ray
/// meeting the square is represented), offset spacing <= pixel spacing, ray
/// step = pixel_spacing/2.
RayGeometry default_geometry(const GridSpec& grid, int n_angles);

/// Line integrals indexed by (angle, offset).
struct Sinogram {
    RayGeometry geometry;
    std::vector<double> values;  // [k * n_offsets + j]

    double& at(int k, int j) { return values[static_cast<size_t>(k) * geometry.n_offsets + j]; }
    double at(int k, int j) const {
        return values[static_cast<size_t>(k) * geometry.n_offsets + j];
    }
};

/// Xf(x, theta) for every pixel center x and every angle on the full circle,
/// theta_k = 2*pi*k/n_angles_full. Satisfies at(p,k) == at(p,k+n/2) exactly
/// (the second half is constructed by symmetry, never recomputed).
struct PixelRayField {
    GridSpec grid;
    int n_angles_full = 0;
    std::vector<double> values;  // [pixel * n_angles_full + k]

    double& at(size_t pixel, int k) { return values[pixel * n_angles_full + k]; }
    double at(size_t pixel, int k) const { return values[pixel * n_angles_full + k]; }
};

/// The one angular quadrature constant of the project. A stored set of
/// `count` angles always stands for the full circle: directly for a
/// PixelRayField on [0, 2*pi), via evenness for a Sinogram on [0, pi), where
/// each angle represents both theta and theta + pi.
double angle_weight(int count);

/// Weighted inner products under which the discrete adjoints are exact
/// transposes: sinogram weight angle_weight(n_angles)*offset_spacing,
/// pixel-ray-field weight angle_weight(n_angles_full)*pixel_spacing^2,
/// image weight pixel_spacing^2 (dot_image).
double dot_sinogram(const Sinogram& a, const Sinogram& b);
double dot_pixel_ray(const PixelRayField& a, const PixelRayField& b);

/// X-ray transform: composite-midpoint quadrature of the bilinear
/// interpolant along each ray. Exactly zero for rays missing the square.
Sinogram xray_forward(const ImageGrid& image, const RayGeometry& geometry);

/// Exact algebraic transpose of xray_forward with respect to the weighted
/// inner products above (weight replay, not an independent discretization).
ImageGrid xray_adjoint(const Sinogram& sinogram, const GridSpec& target);

/// X'X via the sinogram route; approximates 2 * integral f(y)/|x-y| dy.
ImageGrid normal_operator(const ImageGrid& image, const RayGeometry& geometry);

/// Brute-force Riesz potential 2 * sum_y f(y) px^2 / |x-y|, the singular
/// y == x term replaced by the exact integral of 1/|y| over one pixel,
/// 4*px*log(1+sqrt(2)). O(n^4); independent oracle for normal_operator.
ImageGrid riesz_oracle(const ImageGrid& image);

/// Xf(x_i, theta_k) by direct ray integration from each pixel center
/// (not by sinogram interpolation). step_along_ray = 0 picks px/2.
PixelRayField pixel_ray_field(const ImageGrid& image, int n_angles_full,
                              double step_along_ray = 0.0);

/// Exact transpose of pixel_ray_field applied to a field of weights.
ImageGrid pixel_ray_adjoint(const PixelRayField& weights, double step_along_ray = 0.0);

/// X'X through the pixel-ray discretization:
/// angle_weight(n_angles_full) * sum_k Xf(x, theta_k).
ScalarField pixel_ray_normal(const ImageGrid& image, int n_angles_full,
                             double step_along_ray = 0.0);

/// Line integral of the bilinear interpolant through one physical point in
/// direction theta; same quadrature as the field/sinogram routes.
double xray_at_point(const ImageGrid& image, double x, double y, double theta,
                     double step_along_ray = 0.0);

}  // namespace spixct
