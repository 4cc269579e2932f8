#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "spixct/grid.hpp"

namespace spixct {

/// Discrete L2 norm sqrt(sum v^2 * pixel_spacing^2).
double l2_norm(const ImageGrid& f);
double l2_norm(const ScalarField& f);

/// L2 norm of the discrete gradient: central differences in the interior,
/// one-sided at the outermost ring.
double gradient_l2_norm(const ImageGrid& f);
double gradient_l2_norm(const ScalarField& f);

/// H1 over Omega_1 (the full square): sqrt(l2^2 + |grad|_2^2).
double h1_norm(const ImageGrid& f);
double h1_norm(const ScalarField& f);

double relative_l2_error(const ImageGrid& approx, const ImageGrid& truth);

/// Relative L2 error restricted to the centered window of side
/// window_fraction * full side.
double relative_l2_error_interior(const ImageGrid& approx, const ImageGrid& truth,
                                  double window_fraction);

/// Gaussian noise calibrated against data - baseline, the measurement's
/// deviation from the empty-scene value (2*pi in 2D). Per-pixel sigma is
/// relative_level times the global RMS of (data - baseline); the pixelwise
/// flag switches to relative_level * |data_i - baseline| per pixel.
struct NoiseSpec {
    double relative_level = 0.0;
    std::uint64_t seed = 0;
    double baseline = 6.283185307179586476925286766559;  // 2*pi
    bool pixelwise = false;
};

ScalarField add_relative_noise(const ScalarField& data, const NoiseSpec& spec);

struct StabilityRecord {
    double max_norm_bound = 0.0;  // M = max of the pair's sup norms
    double l2_diff = 0.0;         // |f1 - f2|_L2
    double h1_grad_diff = 0.0;    // |grad(f1 - f2)|_L2
    double data_h1_diff = 0.0;    // |Kf1 - Kf2|_H1(Omega_1)
    double lower_ratio = 0.0;     // data_h1_diff / l2_diff; NaN when l2_diff == 0
};

struct StabilityAudit {
    std::vector<StabilityRecord> records;
    double min_lower_ratio = 0.0;   // over records with l2_diff > 0
    double fitted_exponent = 0.0;   // log-log slope of data_h1_diff vs l2_diff
};

StabilityAudit stability_audit(const std::vector<std::pair<ImageGrid, ImageGrid>>& pairs,
                               int n_angles_full);

/// |f1 - f2|_L2 / |grad(f1 - f2)|_L2; +infinity when the gradient vanishes.
double inverse_poincare_ratio(const ImageGrid& f1, const ImageGrid& f2);

}  // namespace spixct
