#include "spixct/spectral.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "spixct/fft.hpp"

namespace spixct {

namespace {

constexpr double kPi = 3.14159265358979323846;
using cd = std::complex<double>;

void validate(const SpectralConfig& config) {
    if (config.pad_factor < 2 || config.pad_factor > 4)
        throw std::invalid_argument("spectral: pad_factor must be 2, 3 or 4");
}

// Signed DFT frequency index: k for k <= n/2, k - n beyond.
double freq_index(int k, int n) { return k <= n / 2 ? k : k - n; }

// Multiply the spectrum of an n x n periodic field (spacing px) by |xi|,
// with |xi| = 0 at the zero frequency. Returns the real part after checking
// that the imaginary residue is below 1e-10 relative.
std::vector<double> apply_abs_xi(const std::vector<double>& values, int n, double px) {
    const double period = n * px;
    std::vector<cd> a(values.begin(), values.end());
    fft::transform_2d(a, n, n, false);
    for (int i = 0; i < n; ++i) {
        const double xi_y = 2.0 * kPi * freq_index(i, n) / period;
        for (int j = 0; j < n; ++j) {
            const double xi_x = 2.0 * kPi * freq_index(j, n) / period;
            a[static_cast<size_t>(i) * n + j] *= std::sqrt(xi_x * xi_x + xi_y * xi_y);
        }
    }
    fft::transform_2d(a, n, n, true);

    double re_max = 0.0, im_max = 0.0, in_max = 0.0;
    for (double v : values) in_max = std::max(in_max, std::abs(v));
    for (const cd& v : a) {
        re_max = std::max(re_max, std::abs(v.real()));
        im_max = std::max(im_max, std::abs(v.imag()));
    }
    const double scale = std::max(re_max, in_max);
    if (scale > 0.0 && im_max > 1e-10 * scale)
        throw std::runtime_error("half_laplacian: imaginary residue exceeds 1e-10 relative");

    std::vector<double> out(a.size());
    for (size_t i = 0; i < a.size(); ++i) out[i] = a[i].real();
    return out;
}

}  // namespace

double inversion_constant() {
    const double sphere_measure_s0 = 2.0;  // |S^0|: two points
    return 1.0 / (2.0 * kPi * sphere_measure_s0);
}

ImageGrid half_laplacian_periodic(const ImageGrid& image) {
    ImageGrid out{image.grid,
                  apply_abs_xi(image.values, image.grid.n, image.grid.pixel_spacing())};
    return out;
}

ImageGrid half_laplacian(const ImageGrid& image, const SpectralConfig& config) {
    validate(config);
    const int n = image.grid.n;
    const int padded = config.pad_factor * n;
    const int off = (padded - n) / 2;
    const double px = image.grid.pixel_spacing();

    std::vector<double> big(static_cast<size_t>(padded) * padded, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            big[static_cast<size_t>(i + off) * padded + (j + off)] = image.at(i, j);

    if (config.taper == SpectralConfig::Taper::cosine) {
        // Raised-cosine roll-off over the outer eighth of the embedded block.
        const int roll = std::max(1, n / 8);
        std::vector<double> window(padded, 0.0);
        for (int t = 0; t < padded; ++t) {
            const int d = std::min(t - off, off + n - 1 - t);  // depth into the block
            if (d < 0)
                window[t] = 0.0;
            else if (d >= roll)
                window[t] = 1.0;
            else
                window[t] = 0.5 * (1.0 - std::cos(kPi * (d + 0.5) / roll));
        }
        for (int i = 0; i < padded; ++i)
            for (int j = 0; j < padded; ++j)
                big[static_cast<size_t>(i) * padded + j] *= window[i] * window[j];
    }

    const std::vector<double> filtered = apply_abs_xi(big, padded, px);

    ImageGrid out = make_image(image.grid);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            out.at(i, j) = filtered[static_cast<size_t>(i + off) * padded + (j + off)];
    return out;
}

namespace {

// X'X-type data decays like A/|x| but is only known on the square, and the
// missing tail is a first-order error under |D|. Split off the template
// A/sqrt(r^2+b^2), whose half-Laplacian has the closed form
// A*b/(b^2+r^2)^(3/2); the padded multiplier then only sees a fast-decaying
// residue. The fit is linear in the data, so the whole inversion stays
// linear and sign-symmetric.
struct TailTemplate {
    double amplitude = 0.0;
    double softening = 0.0;
};

TailTemplate fit_tail(const ImageGrid& field) {
    const GridSpec& g = field.grid;
    TailTemplate t;
    t.softening = 0.5 * g.half_width;
    const double ring = 0.9 * g.half_width;
    double num = 0.0, den = 0.0;
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j) {
            const double x = g.x(j), y = g.y(i);
            if (std::max(std::abs(x), std::abs(y)) < ring) continue;
            const double w = 1.0 / std::sqrt(x * x + y * y + t.softening * t.softening);
            num += field.at(i, j) * w;
            den += w * w;
        }
    t.amplitude = den > 0.0 ? num / den : 0.0;
    return t;
}

}  // namespace

ImageGrid half_laplacian_tail_aware(const ImageGrid& field, const SpectralConfig& config) {
    const TailTemplate t = fit_tail(field);
    const GridSpec& g = field.grid;
    const double b2 = t.softening * t.softening;

    ImageGrid residue = field;
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j) {
            const double r2 = g.x(j) * g.x(j) + g.y(i) * g.y(i);
            residue.at(i, j) -= t.amplitude / std::sqrt(r2 + b2);
        }

    ImageGrid out = half_laplacian(residue, config);
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j) {
            const double r2 = g.x(j) * g.x(j) + g.y(i) * g.y(i);
            out.at(i, j) += t.amplitude * t.softening / std::pow(b2 + r2, 1.5);
        }
    return out;
}

ImageGrid invert_xray_normal(const ImageGrid& normal_image, const SpectralConfig& config) {
    ImageGrid out = half_laplacian_tail_aware(normal_image, config);
    const double c2 = inversion_constant();
    for (double& v : out.values) v *= c2;
    return out;
}

ImageGrid filtered_backprojection(const Sinogram& sinogram, const GridSpec& target,
                                  const SpectralConfig& config) {
    return invert_xray_normal(xray_adjoint(sinogram, target), config);
}

}  // namespace spixct
