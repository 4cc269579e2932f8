#pragma once

#include <vector>

#include "spixct/grid.hpp"
#include "spixct/projector.hpp"
#include "spixct/spectral.hpp"

namespace spixct {

/// Kf(x) = integral over the circle of exp(-Xf(x,theta)) via full-circle
/// trapezoid quadrature with n_angles_full samples (exact for f == 0, where
/// every value is 2*pi).
ScalarField single_pixel_forward(const ImageGrid& image, int n_angles_full,
                                 double step_along_ray = 0.0);

/// Kf evaluated at one source point (x, y); same quadrature as the field
/// version without materializing the whole lattice.
double single_pixel_forward_at(const ImageGrid& image, double x, double y, int n_angles_full,
                               double step_along_ray = 0.0);

/// K'[f](h)(x) = integral exp(-Xf(x,theta)) * (-Xh(x,theta)) dtheta.
/// At base == 0 this equals the negative pixel-ray normal operator exactly.
ScalarField frechet_derivative(const ImageGrid& base, const ImageGrid& direction,
                               int n_angles_full, double step_along_ray = 0.0);

/// Exact transpose of frechet_derivative(base, .) under the weighted inner
/// products; implemented as pixel_ray_adjoint of -exp(-Xf(x,theta)) * r(x).
ImageGrid frechet_adjoint(const ImageGrid& base, const ScalarField& residual, int n_angles_full,
                          double step_along_ray = 0.0);

/// Theorem-side inversion of linearized data: -c_2 |D| applied to a field
/// approximating the derivative of K[eps*g] at eps = 0.
ImageGrid linearized_reconstruction(const ScalarField& derivative_field,
                                    const SpectralConfig& config = {});

struct EpsilonLinearization {
    ScalarField field;  // (K[eps*g] - 2*pi)/eps for the smallest epsilon
    struct Row {
        double epsilon;
        double distance_to_analytic;  // weighted L2 distance to K'[0]g
    };
    std::vector<Row> table;
};

/// Finite-difference linearization (K[eps*g] - 2*pi)/eps over a decreasing
/// epsilon schedule, with a convergence table against the analytic
/// derivative. Epsilons must be nonzero and sorted decreasing in magnitude.
EpsilonLinearization linearize_by_epsilon(const ImageGrid& g, const std::vector<double>& epsilons,
                                          int n_angles_full);

namespace detail {

/// Pixel-ray field of a base image converted to exp(-Xf) weights plus the
/// forward data. The Gauss-Newton solver builds this once per outer
/// iteration and reuses it across conjugate-gradient matvecs.
struct ExpField {
    PixelRayField exp_field;  // exp(-Xf(x,theta))
    ScalarField forward;      // Kf
};

ExpField make_exp_field(const ImageGrid& base, int n_angles_full, double step_along_ray = 0.0);
ScalarField apply_derivative(const ExpField& lin, const ImageGrid& direction,
                             double step_along_ray = 0.0);
ImageGrid apply_derivative_adjoint(const ExpField& lin, const ScalarField& residual,
                                   double step_along_ray = 0.0);

}  // namespace detail

}  // namespace spixct
