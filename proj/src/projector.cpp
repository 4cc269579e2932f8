#include "spixct/projector.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "spixct/parallel.hpp"

namespace spixct {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr int kScatterBlocks = 8;  // fixed partial-sum count, independent of thread count

// Sample displacements along one direction for the global midpoint lattice
// t_m = -T + (m + 0.5) * step. Displacements are tabulated in pixel units,
// so a ray from pixel (i, j) samples at exactly (j + dq[m], i + dr[m]); rays
// from integer-shifted pixels therefore reuse bit-identical interpolation
// weights, which is what makes the pixel-ray normal operator translation
// covariant to rounding error.
struct AngleTable {
    std::vector<double> dq;
    std::vector<double> dr;
    double dq_dt = 0.0;
    double dr_dt = 0.0;
    double t_origin = 0.0;
    double step = 0.0;
    int count = 0;
};

AngleTable make_angle_table(double theta, double extent, double step, double px) {
    AngleTable tab;
    tab.step = step;
    tab.t_origin = -extent;
    tab.count = static_cast<int>(std::ceil(2.0 * extent / step));
    tab.dq_dt = std::cos(theta) / px;
    tab.dr_dt = -std::sin(theta) / px;
    tab.dq.resize(tab.count);
    tab.dr.resize(tab.count);
    for (int m = 0; m < tab.count; ++m) {
        const double t = tab.t_origin + (m + 0.5) * step;
        tab.dq[m] = t * tab.dq_dt;
        tab.dr[m] = t * tab.dr_dt;
    }
    return tab;
}

// Conservative sample-index range for which the ray point can touch the
// grid's interpolation support (-1, n) x (-1, n); rounded outward so that
// no contributing sample is dropped.
bool clip_range(const AngleTable& tab, double q0, double r0, int n, int& m_lo, int& m_hi) {
    double t_lo = -1e300, t_hi = 1e300;
    const auto clip_axis = [&](double p0, double v) {
        if (std::abs(v) > 1e-14) {
            double a = (-1.0 - p0) / v;
            double b = (static_cast<double>(n) - p0) / v;
            if (a > b) std::swap(a, b);
            t_lo = std::max(t_lo, a);
            t_hi = std::min(t_hi, b);
        } else if (p0 <= -1.0 || p0 >= static_cast<double>(n)) {
            t_lo = 1.0;
            t_hi = 0.0;
        }
    };
    clip_axis(q0, tab.dq_dt);
    clip_axis(r0, tab.dr_dt);
    if (!(t_lo < t_hi)) return false;
    const double a = (t_lo - tab.t_origin) / tab.step - 0.5;
    const double b = (t_hi - tab.t_origin) / tab.step - 0.5;
    m_lo = std::max(0, static_cast<int>(std::floor(a)));
    m_hi = std::min(tab.count, static_cast<int>(std::ceil(b)) + 1);
    return m_lo < m_hi;
}

// One compiled loop serves both the forward gather and the transpose
// scatter, so both sides of every adjoint identity see bit-identical
// interpolation weights. Out-of-grid neighbors gather zero / drop deposits.
double trace_ray(const double* img, double* out, int n, double q0, double r0,
                 const AngleTable& tab, int m_lo, int m_hi, bool gather, double deposit) {
    double acc = 0.0;
    const double* dq = tab.dq.data();
    const double* dr = tab.dr.data();
    const double nd = static_cast<double>(n);
    for (int m = m_lo; m < m_hi; ++m) {
        const double q = q0 + dq[m];
        const double r = r0 + dr[m];
        if (!(q > -1.0 && q < nd && r > -1.0 && r < nd)) continue;
        const int jq = static_cast<int>(q + 1.0) - 1;
        const int ir = static_cast<int>(r + 1.0) - 1;
        const double fq = q - jq;
        const double fr = r - ir;
        const double w00 = (1.0 - fr) * (1.0 - fq);
        const double w01 = (1.0 - fr) * fq;
        const double w10 = fr * (1.0 - fq);
        const double w11 = fr * fq;
        if (ir >= 0 && jq >= 0 && ir < n - 1 && jq < n - 1) {
            const size_t idx = static_cast<size_t>(ir) * n + jq;
            if (gather) {
                acc += w00 * img[idx] + w01 * img[idx + 1] + w10 * img[idx + n] +
                       w11 * img[idx + n + 1];
            } else {
                out[idx] += w00 * deposit;
                out[idx + 1] += w01 * deposit;
                out[idx + n] += w10 * deposit;
                out[idx + n + 1] += w11 * deposit;
            }
        } else {
            const auto cell = [&](int i, int j, double w) {
                if (i < 0 || j < 0 || i >= n || j >= n) return;
                const size_t idx = static_cast<size_t>(i) * n + j;
                if (gather)
                    acc += w * img[idx];
                else
                    out[idx] += w * deposit;
            };
            cell(ir, jq, w00);
            cell(ir, jq + 1, w01);
            cell(ir + 1, jq, w10);
            cell(ir + 1, jq + 1, w11);
        }
    }
    return acc;
}

double resolve_step(double requested, const GridSpec& grid) {
    return requested > 0.0 ? requested : 0.5 * grid.pixel_spacing();
}

void require_compatible(const RayGeometry& geom, const GridSpec& grid) {
    if (geom.n_angles < 1 || geom.n_offsets < 2)
        throw std::invalid_argument("ray geometry: need n_angles >= 1 and n_offsets >= 2");
    const double needed = std::sqrt(2.0) * grid.half_width;
    if (geom.offset_extent < needed * (1.0 - 1e-12))
        throw std::invalid_argument(
            "ray geometry: offset_extent must be >= half_width*sqrt(2) so every ray meeting "
            "the square is represented");
}

void require_even_angles(int n_angles_full) {
    if (n_angles_full < 2 || n_angles_full % 2 != 0)
        throw std::invalid_argument("n_angles_full must be even and >= 2");
}

}  // namespace

double RayGeometry::angle(int k) const { return kPi * k / n_angles; }

double angle_weight(int count) { return 2.0 * kPi / count; }

RayGeometry default_geometry(const GridSpec& grid, int n_angles) {
    RayGeometry geom;
    geom.n_angles = n_angles;
    geom.offset_extent = std::sqrt(2.0) * grid.half_width;
    geom.n_offsets =
        static_cast<int>(std::ceil(2.0 * geom.offset_extent / grid.pixel_spacing())) + 1;
    geom.step_along_ray = 0.5 * grid.pixel_spacing();
    return geom;
}

double dot_sinogram(const Sinogram& a, const Sinogram& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.values.size(); ++i) s += a.values[i] * b.values[i];
    return angle_weight(a.geometry.n_angles) * a.geometry.offset_spacing() * s;
}

double dot_pixel_ray(const PixelRayField& a, const PixelRayField& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.values.size(); ++i) s += a.values[i] * b.values[i];
    const double h = a.grid.pixel_spacing();
    return angle_weight(a.n_angles_full) * h * h * s;
}

Sinogram xray_forward(const ImageGrid& image, const RayGeometry& geometry) {
    require_compatible(geometry, image.grid);
    if (!all_finite(image.values))
        throw std::invalid_argument("xray_forward: image has non-finite values");
    const GridSpec& g = image.grid;
    const double px = g.pixel_spacing();
    const double step = resolve_step(geometry.step_along_ray, g);
    const double extent = std::sqrt(2.0) * g.half_width + 2.0 * px;
    const double c = 0.5 * (g.n - 1);

    Sinogram sino{geometry, std::vector<double>(static_cast<size_t>(geometry.n_angles) *
                                                    geometry.n_offsets,
                                                0.0)};
    parallel_for_blocks(0, geometry.n_angles, [&](int k_lo, int k_hi) {
        for (int k = k_lo; k < k_hi; ++k) {
            const double theta = geometry.angle(k);
            const AngleTable tab = make_angle_table(theta, extent, step, px);
            const double sn = std::sin(theta), cs = std::cos(theta);
            for (int j = 0; j < geometry.n_offsets; ++j) {
                const double s = geometry.offset(j);
                const double q0 = c - s * sn / px;
                const double r0 = c - s * cs / px;
                int m_lo, m_hi;
                if (!clip_range(tab, q0, r0, g.n, m_lo, m_hi)) continue;
                const double acc = trace_ray(image.values.data(), nullptr, g.n, q0, r0, tab,
                                             m_lo, m_hi, true, 0.0);
                sino.at(k, j) = step * acc;
            }
        }
    });
    return sino;
}

ImageGrid xray_adjoint(const Sinogram& sinogram, const GridSpec& target) {
    require_compatible(sinogram.geometry, target);
    if (!all_finite(sinogram.values))
        throw std::invalid_argument("xray_adjoint: sinogram has non-finite values");
    const RayGeometry& geom = sinogram.geometry;
    const double px = target.pixel_spacing();
    const double step = resolve_step(geom.step_along_ray, target);
    const double extent = std::sqrt(2.0) * target.half_width + 2.0 * px;
    const double c = 0.5 * (target.n - 1);
    const double scale = angle_weight(geom.n_angles) * geom.offset_spacing() / (px * px);
    const size_t npix = static_cast<size_t>(target.n) * target.n;

    std::vector<std::vector<double>> partial(kScatterBlocks, std::vector<double>(npix, 0.0));
    const int per_block = (geom.n_angles + kScatterBlocks - 1) / kScatterBlocks;
    parallel_for_blocks(0, kScatterBlocks, [&](int b_lo, int b_hi) {
        for (int b = b_lo; b < b_hi; ++b) {
            double* out = partial[b].data();
            const int k_end = std::min(geom.n_angles, (b + 1) * per_block);
            for (int k = b * per_block; k < k_end; ++k) {
                const double theta = geom.angle(k);
                const AngleTable tab = make_angle_table(theta, extent, step, px);
                const double sn = std::sin(theta), cs = std::cos(theta);
                for (int j = 0; j < geom.n_offsets; ++j) {
                    const double psi = sinogram.at(k, j);
                    if (psi == 0.0) continue;
                    const double s = geom.offset(j);
                    const double q0 = c - s * sn / px;
                    const double r0 = c - s * cs / px;
                    int m_lo, m_hi;
                    if (!clip_range(tab, q0, r0, target.n, m_lo, m_hi)) continue;
                    trace_ray(nullptr, out, target.n, q0, r0, tab, m_lo, m_hi, false,
                              psi * step * scale);
                }
            }
        }
    });

    ImageGrid result = make_image(target);
    for (int b = 0; b < kScatterBlocks; ++b)
        for (size_t i = 0; i < npix; ++i) result.values[i] += partial[b][i];
    return result;
}

ImageGrid normal_operator(const ImageGrid& image, const RayGeometry& geometry) {
    return xray_adjoint(xray_forward(image, geometry), image.grid);
}

ImageGrid riesz_oracle(const ImageGrid& image) {
    const GridSpec& g = image.grid;
    if (g.n > 64)
        std::fprintf(stderr,
                     "riesz_oracle: O(n^4) brute force on a %dx%d grid, expect it to be slow\n",
                     g.n, g.n);
    const double px = g.pixel_spacing();
    // Exact integral of 1/|y| over one pixel square centered at the origin.
    const double self_term = 4.0 * px * std::log(1.0 + std::sqrt(2.0));
    const double cell = px * px;

    std::vector<double> xs(g.n), ys(g.n);
    for (int j = 0; j < g.n; ++j) xs[j] = g.x(j);
    for (int i = 0; i < g.n; ++i) ys[i] = g.y(i);

    ImageGrid result = make_image(g);
    parallel_for_blocks(0, g.n, [&](int i_lo, int i_hi) {
        for (int i = i_lo; i < i_hi; ++i) {
            for (int j = 0; j < g.n; ++j) {
                double sum = image.at(i, j) * self_term;
                for (int iy = 0; iy < g.n; ++iy) {
                    const double dy = ys[iy] - ys[i];
                    const double dy2 = dy * dy;
                    for (int jx = 0; jx < g.n; ++jx) {
                        if (iy == i && jx == j) continue;
                        const double dx = xs[jx] - xs[j];
                        sum += image.at(iy, jx) * cell / std::sqrt(dx * dx + dy2);
                    }
                }
                result.at(i, j) = 2.0 * sum;
            }
        }
    });
    return result;
}

PixelRayField pixel_ray_field(const ImageGrid& image, int n_angles_full, double step_along_ray) {
    require_even_angles(n_angles_full);
    if (!all_finite(image.values))
        throw std::invalid_argument("pixel_ray_field: image has non-finite values");
    const GridSpec& g = image.grid;
    const double px = g.pixel_spacing();
    const double step = resolve_step(step_along_ray, g);
    const double extent = 2.0 * std::sqrt(2.0) * g.half_width + 2.0 * px;
    const int n_half = n_angles_full / 2;

    PixelRayField field{g, n_angles_full,
                        std::vector<double>(static_cast<size_t>(g.n) * g.n * n_angles_full, 0.0)};
    parallel_for_blocks(0, n_half, [&](int k_lo, int k_hi) {
        for (int k = k_lo; k < k_hi; ++k) {
            const double theta = 2.0 * kPi * k / n_angles_full;
            const AngleTable tab = make_angle_table(theta, extent, step, px);
            size_t p = 0;
            for (int i = 0; i < g.n; ++i) {
                for (int j = 0; j < g.n; ++j, ++p) {
                    int m_lo, m_hi;
                    double v = 0.0;
                    if (clip_range(tab, static_cast<double>(j), static_cast<double>(i), g.n,
                                   m_lo, m_hi))
                        v = step * trace_ray(image.values.data(), nullptr, g.n,
                                             static_cast<double>(j), static_cast<double>(i), tab,
                                             m_lo, m_hi, true, 0.0);
                    field.at(p, k) = v;
                    field.at(p, k + n_half) = v;  // Xf(x,theta) == Xf(x,theta+pi)
                }
            }
        }
    });
    return field;
}

ImageGrid pixel_ray_adjoint(const PixelRayField& weights, double step_along_ray) {
    require_even_angles(weights.n_angles_full);
    const GridSpec& g = weights.grid;
    const size_t npix = static_cast<size_t>(g.n) * g.n;
    if (weights.values.size() != npix * weights.n_angles_full)
        throw std::invalid_argument("pixel_ray_adjoint: weight array shape mismatch");
    if (!all_finite(weights.values))
        throw std::invalid_argument("pixel_ray_adjoint: weights have non-finite values");
    const double px = g.pixel_spacing();
    const double step = resolve_step(step_along_ray, g);
    const double extent = 2.0 * std::sqrt(2.0) * g.half_width + 2.0 * px;
    const int n_half = weights.n_angles_full / 2;
    const double dtheta = angle_weight(weights.n_angles_full);

    std::vector<std::vector<double>> partial(kScatterBlocks, std::vector<double>(npix, 0.0));
    const int per_block = (n_half + kScatterBlocks - 1) / kScatterBlocks;
    parallel_for_blocks(0, kScatterBlocks, [&](int b_lo, int b_hi) {
        for (int b = b_lo; b < b_hi; ++b) {
            double* out = partial[b].data();
            const int k_end = std::min(n_half, (b + 1) * per_block);
            for (int k = b * per_block; k < k_end; ++k) {
                const double theta = 2.0 * kPi * k / weights.n_angles_full;
                const AngleTable tab = make_angle_table(theta, extent, step, px);
                size_t p = 0;
                for (int i = 0; i < g.n; ++i) {
                    for (int j = 0; j < g.n; ++j, ++p) {
                        const double w = weights.at(p, k) + weights.at(p, k + n_half);
                        if (w == 0.0) continue;
                        int m_lo, m_hi;
                        if (!clip_range(tab, static_cast<double>(j), static_cast<double>(i), g.n,
                                        m_lo, m_hi))
                            continue;
                        trace_ray(nullptr, out, g.n, static_cast<double>(j),
                                  static_cast<double>(i), tab, m_lo, m_hi, false,
                                  dtheta * step * w);
                    }
                }
            }
        }
    });

    ImageGrid result = make_image(g);
    for (int b = 0; b < kScatterBlocks; ++b)
        for (size_t i = 0; i < npix; ++i) result.values[i] += partial[b][i];
    return result;
}

double xray_at_point(const ImageGrid& image, double x, double y, double theta,
                     double step_along_ray) {
    const GridSpec& g = image.grid;
    const double px = g.pixel_spacing();
    const double step = resolve_step(step_along_ray, g);
    const double extent = 2.0 * std::sqrt(2.0) * g.half_width + 2.0 * px;
    const double c = 0.5 * (g.n - 1);
    const AngleTable tab = make_angle_table(theta, extent, step, px);
    const double q0 = c + x / px;
    const double r0 = c - y / px;
    int m_lo, m_hi;
    if (!clip_range(tab, q0, r0, g.n, m_lo, m_hi)) return 0.0;
    return step * trace_ray(image.values.data(), nullptr, g.n, q0, r0, tab, m_lo, m_hi, true, 0.0);
}

ScalarField pixel_ray_normal(const ImageGrid& image, int n_angles_full, double step_along_ray) {
    const PixelRayField field = pixel_ray_field(image, n_angles_full, step_along_ray);
    const double dtheta = angle_weight(n_angles_full);
    ScalarField out = make_field(image.grid);
    const size_t npix = out.values.size();
    for (size_t p = 0; p < npix; ++p) {
        double s = 0.0;
        for (int k = 0; k < n_angles_full; ++k) s += field.at(p, k);
        out.values[p] = dtheta * s;
    }
    return out;
}

}  // namespace spixct
