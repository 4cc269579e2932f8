#include "spixct/metrics.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "spixct/singlepixel.hpp"

namespace spixct {

namespace {

constexpr double kPi = 3.14159265358979323846;

double l2_norm_impl(const std::vector<double>& v, const GridSpec& g) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return g.pixel_spacing() * std::sqrt(s);
}

double gradient_l2_impl(const std::vector<double>& v, const GridSpec& g) {
    const int n = g.n;
    const double h = g.pixel_spacing();
    const auto at = [&](int i, int j) { return v[static_cast<size_t>(i) * n + j]; };
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            double gx, gy;
            if (j == 0)
                gx = (at(i, 1) - at(i, 0)) / h;
            else if (j == n - 1)
                gx = (at(i, n - 1) - at(i, n - 2)) / h;
            else
                gx = (at(i, j + 1) - at(i, j - 1)) / (2.0 * h);
            if (i == 0)
                gy = (at(1, j) - at(0, j)) / h;
            else if (i == n - 1)
                gy = (at(n - 1, j) - at(n - 2, j)) / h;
            else
                gy = (at(i + 1, j) - at(i - 1, j)) / (2.0 * h);
            s += gx * gx + gy * gy;
        }
    }
    return h * std::sqrt(s);
}

// Deterministic standard normal: Box-Muller over mt19937_64 draws. The
// standard library's normal_distribution is implementation-defined, this
// is not.
class GaussianSampler {
  public:
    explicit GaussianSampler(std::uint64_t seed) : rng_(seed) {}

    double next() {
        const double u1 = uniform_open();
        const double u2 = uniform_open();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
    }

  private:
    double uniform_open() {
        // (0, 1]: never feeds log() a zero
        return (static_cast<double>(rng_() >> 11) + 1.0) * 0x1.0p-53;
    }
    std::mt19937_64 rng_;
};

}  // namespace

double l2_norm(const ImageGrid& f) { return l2_norm_impl(f.values, f.grid); }
double l2_norm(const ScalarField& f) { return l2_norm_impl(f.values, f.grid); }

double gradient_l2_norm(const ImageGrid& f) { return gradient_l2_impl(f.values, f.grid); }
double gradient_l2_norm(const ScalarField& f) { return gradient_l2_impl(f.values, f.grid); }

double h1_norm(const ImageGrid& f) {
    const double a = l2_norm(f), b = gradient_l2_norm(f);
    return std::sqrt(a * a + b * b);
}
double h1_norm(const ScalarField& f) {
    const double a = l2_norm(f), b = gradient_l2_norm(f);
    return std::sqrt(a * a + b * b);
}

double relative_l2_error(const ImageGrid& approx, const ImageGrid& truth) {
    if (!(approx.grid == truth.grid))
        throw std::invalid_argument("relative_l2_error: grid mismatch");
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < truth.values.size(); ++i) {
        const double d = approx.values[i] - truth.values[i];
        num += d * d;
        den += truth.values[i] * truth.values[i];
    }
    return std::sqrt(num / den);
}

double relative_l2_error_interior(const ImageGrid& approx, const ImageGrid& truth,
                                  double window_fraction) {
    if (!(approx.grid == truth.grid))
        throw std::invalid_argument("relative_l2_error_interior: grid mismatch");
    const GridSpec& g = truth.grid;
    const double lim = window_fraction * g.half_width;
    double num = 0.0, den = 0.0;
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j) {
            if (std::abs(g.x(j)) > lim || std::abs(g.y(i)) > lim) continue;
            const double d = approx.at(i, j) - truth.at(i, j);
            num += d * d;
            den += truth.at(i, j) * truth.at(i, j);
        }
    return std::sqrt(num / den);
}

ScalarField add_relative_noise(const ScalarField& data, const NoiseSpec& spec) {
    if (spec.relative_level < 0.0)
        throw std::invalid_argument("noise: relative_level must be nonnegative");
    if (spec.relative_level == 0.0) return data;
    GaussianSampler gauss(spec.seed);
    ScalarField out = data;
    if (spec.pixelwise) {
        for (size_t i = 0; i < out.values.size(); ++i)
            out.values[i] += spec.relative_level *
                             std::abs(data.values[i] - spec.baseline) * gauss.next();
        return out;
    }
    double s = 0.0;
    for (double v : data.values) {
        const double d = v - spec.baseline;
        s += d * d;
    }
    const double rms = std::sqrt(s / static_cast<double>(data.values.size()));
    const double sigma = spec.relative_level * rms;
    for (double& v : out.values) v += sigma * gauss.next();
    return out;
}

StabilityAudit stability_audit(const std::vector<std::pair<ImageGrid, ImageGrid>>& pairs,
                               int n_angles_full) {
    StabilityAudit audit;
    audit.min_lower_ratio = std::numeric_limits<double>::infinity();
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int fit_count = 0;

    for (const auto& [f1, f2] : pairs) {
        if (!(f1.grid == f2.grid))
            throw std::invalid_argument("stability_audit: pair grids mismatch");
        StabilityRecord rec;
        rec.max_norm_bound = std::max(max_abs(f1.values), max_abs(f2.values));

        ImageGrid diff{f1.grid, f1.values};
        for (size_t i = 0; i < diff.values.size(); ++i) diff.values[i] -= f2.values[i];
        rec.l2_diff = l2_norm(diff);
        rec.h1_grad_diff = gradient_l2_norm(diff);

        const ScalarField k1 = single_pixel_forward(f1, n_angles_full);
        const ScalarField k2 = single_pixel_forward(f2, n_angles_full);
        ScalarField kdiff{k1.grid, k1.values};
        for (size_t i = 0; i < kdiff.values.size(); ++i) kdiff.values[i] -= k2.values[i];
        rec.data_h1_diff = h1_norm(kdiff);

        if (rec.l2_diff > 0.0) {
            rec.lower_ratio = rec.data_h1_diff / rec.l2_diff;
            audit.min_lower_ratio = std::min(audit.min_lower_ratio, rec.lower_ratio);
            if (rec.data_h1_diff > 0.0) {
                const double lx = std::log(rec.l2_diff), ly = std::log(rec.data_h1_diff);
                sx += lx;
                sy += ly;
                sxx += lx * lx;
                sxy += lx * ly;
                ++fit_count;
            }
        } else {
            rec.lower_ratio = std::numeric_limits<double>::quiet_NaN();  // undefined, not an error
        }
        audit.records.push_back(rec);
    }

    const double denom = fit_count * sxx - sx * sx;
    audit.fitted_exponent =
        (fit_count >= 2 && std::abs(denom) > 0.0) ? (fit_count * sxy - sx * sy) / denom : 0.0;
    return audit;
}

double inverse_poincare_ratio(const ImageGrid& f1, const ImageGrid& f2) {
    if (!(f1.grid == f2.grid))
        throw std::invalid_argument("inverse_poincare_ratio: grid mismatch");
    ImageGrid diff{f1.grid, f1.values};
    for (size_t i = 0; i < diff.values.size(); ++i) diff.values[i] -= f2.values[i];
    const double grad = gradient_l2_norm(diff);
    if (grad == 0.0) return std::numeric_limits<double>::infinity();
    return l2_norm(diff) / grad;
}

}  // namespace spixct
