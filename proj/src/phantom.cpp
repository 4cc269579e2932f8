#include "spixct/phantom.hpp"

#include <cmath>
#include <stdexcept>

namespace spixct {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kDegToRad = kPi / 180.0;
}  // namespace

const std::vector<EllipseSpec>& shepp_logan_ellipses() {
    // The ten-ellipse head phantom with the contrast-enhanced (modified)
    // intensities in universal use for numerical work:
    //   {cx, cy, a, b, rotation, intensity}
    static const std::vector<EllipseSpec> table = {
        {0.0, 0.0, 0.69, 0.92, 0.0, 1.0},
        {0.0, -0.0184, 0.6624, 0.874, 0.0, -0.8},
        {0.22, 0.0, 0.11, 0.31, -18.0 * kDegToRad, -0.2},
        {-0.22, 0.0, 0.16, 0.41, 18.0 * kDegToRad, -0.2},
        {0.0, 0.35, 0.21, 0.25, 0.0, 0.1},
        {0.0, 0.1, 0.046, 0.046, 0.0, 0.1},
        {0.0, -0.1, 0.046, 0.046, 0.0, 0.1},
        {-0.08, -0.605, 0.046, 0.023, 0.0, 0.1},
        {0.0, -0.605, 0.023, 0.023, 0.0, 0.1},
        {0.06, -0.605, 0.023, 0.046, 0.0, 0.1},
    };
    return table;
}

ImageGrid rasterize_ellipses(const std::vector<EllipseSpec>& ellipses, int n_pixels,
                             double half_width) {
    ImageGrid img = make_image(make_grid_spec(n_pixels, half_width));
    const GridSpec& g = img.grid;
    for (const EllipseSpec& e : ellipses) {
        if (!(e.semi_axis_a > 0.0) || !(e.semi_axis_b > 0.0))
            throw std::invalid_argument("ellipse: semi-axes must be positive");
        const double c = std::cos(e.rotation);
        const double s = std::sin(e.rotation);
        for (int i = 0; i < g.n; ++i) {
            const double y = g.y(i) - e.center_y;
            for (int j = 0; j < g.n; ++j) {
                const double x = g.x(j) - e.center_x;
                const double u = (x * c + y * s) / e.semi_axis_a;
                const double v = (-x * s + y * c) / e.semi_axis_b;
                if (u * u + v * v <= 1.0) img.at(i, j) += e.additive_intensity;
            }
        }
    }
    return img;
}

ImageGrid generate_shepp_logan(int n_pixels, double half_width) {
    if (n_pixels < 8)
        throw std::invalid_argument("shepp-logan: n_pixels must be >= 8");
    return rasterize_ellipses(shepp_logan_ellipses(), n_pixels, half_width);
}

ImageGrid generate_disk(int n_pixels, double half_width, double radius, double amplitude) {
    if (!(radius > 0.0) || radius > half_width)
        throw std::invalid_argument("disk: radius must lie in (0, half_width]");
    ImageGrid img = make_image(make_grid_spec(n_pixels, half_width));
    const GridSpec& g = img.grid;
    const double r2 = radius * radius;
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j) {
            const double x = g.x(j), y = g.y(i);
            if (x * x + y * y <= r2) img.at(i, j) = amplitude;
        }
    return img;
}

ImageGrid generate_gaussian(int n_pixels, double half_width, double sigma, double amplitude) {
    if (!(sigma > 0.0))
        throw std::invalid_argument("gaussian: sigma must be positive");
    ImageGrid img = make_image(make_grid_spec(n_pixels, half_width));
    const GridSpec& g = img.grid;
    const double cutoff = 1e-12 * std::abs(amplitude);
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j) {
            const double x = g.x(j), y = g.y(i);
            const double v = amplitude * std::exp(-(x * x + y * y) / (2.0 * sigma * sigma));
            img.at(i, j) = std::abs(v) < cutoff ? 0.0 : v;
        }
    return img;
}

}  // namespace spixct
