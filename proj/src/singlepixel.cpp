#include "spixct/singlepixel.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <string>

#include "spixct/parallel.hpp"

namespace spixct {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;
constexpr double kExpOverflowLimit = -700.0;  // exp(700) is the last safe double decade

void require_same_grid(const GridSpec& a, const GridSpec& b, const char* what) {
    if (!(a == b)) throw std::invalid_argument(std::string(what) + ": grid mismatch");
}

void require_k_angles(int n_angles_full) {
    if (n_angles_full < 16 || n_angles_full % 2 != 0)
        throw std::invalid_argument(
            "single pixel transform: n_angles_full must be even and >= 16");
}

}  // namespace

namespace detail {

ExpField make_exp_field(const ImageGrid& base, int n_angles_full, double step_along_ray) {
    ExpField out{pixel_ray_field(base, n_angles_full, step_along_ray), make_field(base.grid)};
    const double dtheta = angle_weight(n_angles_full);
    const int na = n_angles_full;
    const size_t npix = out.forward.values.size();
    std::atomic<bool> overflow{false};
    parallel_for_blocks(0, static_cast<int>(npix), [&](int lo, int hi) {
        for (int p = lo; p < hi; ++p) {
            double* row = &out.exp_field.values[static_cast<size_t>(p) * na];
            double sum = 0.0;
            for (int k = 0; k < na; ++k) {
                if (row[k] < kExpOverflowLimit) {
                    overflow.store(true, std::memory_order_relaxed);
                    return;
                }
                row[k] = std::exp(-row[k]);
                sum += row[k];
            }
            out.forward.values[p] = dtheta * sum;
        }
    });
    if (overflow.load())
        throw std::runtime_error("single pixel transform: exp(-Xf) overflows (Xf < -700)");
    return out;
}

ScalarField apply_derivative(const ExpField& lin, const ImageGrid& direction,
                             double step_along_ray) {
    require_same_grid(lin.forward.grid, direction.grid, "apply_derivative");
    const int na = lin.exp_field.n_angles_full;
    const PixelRayField dir_field = pixel_ray_field(direction, na, step_along_ray);
    const double dtheta = angle_weight(na);
    ScalarField out = make_field(direction.grid);
    const size_t npix = out.values.size();
    parallel_for_blocks(0, static_cast<int>(npix), [&](int lo, int hi) {
        for (int p = lo; p < hi; ++p) {
            const double* ew = &lin.exp_field.values[static_cast<size_t>(p) * na];
            const double* dv = &dir_field.values[static_cast<size_t>(p) * na];
            double sum = 0.0;
            for (int k = 0; k < na; ++k) sum += ew[k] * dv[k];
            out.values[p] = -dtheta * sum;
        }
    });
    return out;
}

ImageGrid apply_derivative_adjoint(const ExpField& lin, const ScalarField& residual,
                                   double step_along_ray) {
    require_same_grid(lin.forward.grid, residual.grid, "apply_derivative_adjoint");
    const int na = lin.exp_field.n_angles_full;
    PixelRayField w{residual.grid, na, std::vector<double>(lin.exp_field.values.size(), 0.0)};
    const size_t npix = residual.values.size();
    parallel_for_blocks(0, static_cast<int>(npix), [&](int lo, int hi) {
        for (int p = lo; p < hi; ++p) {
            const double r = residual.values[p];
            const double* ew = &lin.exp_field.values[static_cast<size_t>(p) * na];
            double* wp = &w.values[static_cast<size_t>(p) * na];
            for (int k = 0; k < na; ++k) wp[k] = -ew[k] * r;
        }
    });
    return pixel_ray_adjoint(w, step_along_ray);
}

}  // namespace detail

ScalarField single_pixel_forward(const ImageGrid& image, int n_angles_full,
                                 double step_along_ray) {
    require_k_angles(n_angles_full);
    return detail::make_exp_field(image, n_angles_full, step_along_ray).forward;
}

double single_pixel_forward_at(const ImageGrid& image, double x, double y, int n_angles_full,
                               double step_along_ray) {
    require_k_angles(n_angles_full);
    const int n_half = n_angles_full / 2;
    double sum = 0.0;
    for (int k = 0; k < n_half; ++k) {
        const double theta = kTwoPi * k / n_angles_full;
        const double v = xray_at_point(image, x, y, theta, step_along_ray);
        if (v < kExpOverflowLimit)
            throw std::runtime_error("single pixel transform: exp(-Xf) overflows (Xf < -700)");
        sum += 2.0 * std::exp(-v);  // theta and theta + pi share the line integral
    }
    return angle_weight(n_angles_full) * sum;
}

ScalarField frechet_derivative(const ImageGrid& base, const ImageGrid& direction,
                               int n_angles_full, double step_along_ray) {
    require_same_grid(base.grid, direction.grid, "frechet_derivative");
    require_k_angles(n_angles_full);
    const detail::ExpField lin = detail::make_exp_field(base, n_angles_full, step_along_ray);
    return detail::apply_derivative(lin, direction, step_along_ray);
}

ImageGrid frechet_adjoint(const ImageGrid& base, const ScalarField& residual, int n_angles_full,
                          double step_along_ray) {
    require_same_grid(base.grid, residual.grid, "frechet_adjoint");
    require_k_angles(n_angles_full);
    const detail::ExpField lin = detail::make_exp_field(base, n_angles_full, step_along_ray);
    return detail::apply_derivative_adjoint(lin, residual, step_along_ray);
}

ImageGrid linearized_reconstruction(const ScalarField& derivative_field,
                                    const SpectralConfig& config) {
    ImageGrid as_image{derivative_field.grid, derivative_field.values};
    ImageGrid out = half_laplacian_tail_aware(as_image, config);
    const double scale = -inversion_constant();
    for (double& v : out.values) v *= scale;
    return out;
}

EpsilonLinearization linearize_by_epsilon(const ImageGrid& g, const std::vector<double>& epsilons,
                                          int n_angles_full) {
    if (epsilons.empty())
        throw std::invalid_argument("linearize_by_epsilon: need at least one epsilon");
    for (size_t i = 0; i < epsilons.size(); ++i) {
        if (epsilons[i] == 0.0)
            throw std::invalid_argument("linearize_by_epsilon: epsilon must be nonzero");
        if (i > 0 && std::abs(epsilons[i]) > std::abs(epsilons[i - 1]))
            throw std::invalid_argument(
                "linearize_by_epsilon: epsilons must be sorted decreasing in magnitude");
    }
    require_k_angles(n_angles_full);

    // Analytic derivative at zero: -X'X g through the pixel-ray discretization.
    ScalarField analytic = pixel_ray_normal(g, n_angles_full);
    for (double& v : analytic.values) v = -v;

    const double h = g.grid.pixel_spacing();
    EpsilonLinearization result;
    for (double eps : epsilons) {
        ImageGrid scaled{g.grid, g.values};
        for (double& v : scaled.values) v *= eps;
        const ScalarField k_eps = single_pixel_forward(scaled, n_angles_full);
        ScalarField fd = make_field(g.grid);
        for (size_t p = 0; p < fd.values.size(); ++p)
            fd.values[p] = (k_eps.values[p] - kTwoPi) / eps;
        double d2 = 0.0;
        for (size_t p = 0; p < fd.values.size(); ++p) {
            const double d = fd.values[p] - analytic.values[p];
            d2 += d * d;
        }
        result.table.push_back({eps, h * std::sqrt(d2)});
        result.field = std::move(fd);
    }
    return result;
}

}  // namespace spixct
