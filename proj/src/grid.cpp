#include "spixct/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace spixct {

GridSpec make_grid_spec(int n, double half_width, double support_radius) {
    if (n < 2)
        throw std::invalid_argument("grid: n_pixels_per_side must be >= 2");
    if (!(half_width > 0.0))
        throw std::invalid_argument("grid: half_width must be positive");
    if (support_radius == 0.0)
        support_radius = kSupportFraction * half_width;
    if (!(support_radius > 0.0) || support_radius > half_width)
        throw std::invalid_argument("grid: support_radius must lie in (0, half_width]");
    return GridSpec{n, half_width, support_radius};
}

ImageGrid make_image(const GridSpec& spec) {
    return ImageGrid{spec, std::vector<double>(static_cast<size_t>(spec.n) * spec.n, 0.0)};
}

ScalarField make_field(const GridSpec& spec) {
    return ScalarField{spec, std::vector<double>(static_cast<size_t>(spec.n) * spec.n, 0.0)};
}

bool all_finite(const std::vector<double>& values) {
    for (double v : values)
        if (!std::isfinite(v)) return false;
    return true;
}

double max_abs(const std::vector<double>& values) {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
}

namespace {
double weighted_dot(const std::vector<double>& a, const std::vector<double>& b, double w) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return w * s;
}
}  // namespace

double dot_image(const ImageGrid& a, const ImageGrid& b) {
    const double h = a.grid.pixel_spacing();
    return weighted_dot(a.values, b.values, h * h);
}

double dot_field(const ScalarField& a, const ScalarField& b) {
    const double h = a.grid.pixel_spacing();
    return weighted_dot(a.values, b.values, h * h);
}

}  // namespace spixct
