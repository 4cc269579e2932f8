// Acceptance suite: one checkable criterion per function, one PASS/FAIL
// line each. Usage: acceptance [criterion ...] (default: all).
//
// Criterion 11 shells out to the CLI named by the SPIXCT_CLI environment
// variable.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

#include "spixct/io.hpp"
#include "spixct/metrics.hpp"
#include "spixct/phantom.hpp"
#include "spixct/projector.hpp"
#include "spixct/singlepixel.hpp"
#include "spixct/solver.hpp"
#include "spixct/spectral.hpp"

using namespace spixct;
namespace fs = std::filesystem;

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

struct Check {
    bool ok = true;
    std::string detail;

    void require(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            if (!detail.empty()) detail += "; ";
            detail += "FAILED " + what;
        }
    }
    void note(const std::string& what) {
        if (!detail.empty()) detail += "; ";
        detail += what;
    }
};

double uniform(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * ((rng() >> 11) * 0x1.0p-53);
}

ImageGrid random_image(const GridSpec& g, uint64_t seed) {
    std::mt19937_64 rng(seed);
    ImageGrid img = make_image(g);
    for (double& v : img.values) v = uniform(rng, -1.0, 1.0);
    return img;
}

ImageGrid random_bumps(const GridSpec& g, std::mt19937_64& rng, int count, double sigma_lo,
                       double sigma_hi) {
    ImageGrid img = make_image(g);
    for (int b = 0; b < count; ++b) {
        const double r = 0.5 * g.half_width * std::sqrt(uniform(rng, 0.0, 1.0));
        const double phi = uniform(rng, 0.0, kTwoPi);
        const double cx = r * std::cos(phi), cy = r * std::sin(phi);
        const double s = uniform(rng, sigma_lo, sigma_hi) * g.half_width;
        const double amp = uniform(rng, 0.4, 1.0) * (rng() % 2 ? 1.0 : -1.0);
        for (int i = 0; i < g.n; ++i)
            for (int j = 0; j < g.n; ++j) {
                const double dx = g.x(j) - cx, dy = g.y(i) - cy;
                img.at(i, j) += amp * std::exp(-(dx * dx + dy * dy) / (2.0 * s * s));
            }
    }
    return img;
}

ImageGrid scaled_to_sup(ImageGrid img, double target_sup) {
    const double sup = max_abs(img.values);
    if (sup > 0.0)
        for (double& v : img.values) v *= target_sup / sup;
    return img;
}

double rel_l2(const std::vector<double>& a, const std::vector<double>& b) {
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        num += d * d;
        den += b[i] * b[i];
    }
    return std::sqrt(num / den);
}

RayGeometry inversion_geometry(const GridSpec& g, int n_angles) {
    // offset and step sampling at px/4 keep backprojection lattice noise
    // out of the |D| amplification range
    RayGeometry geom = default_geometry(g, n_angles);
    geom.n_offsets = 4 * (geom.n_offsets - 1) + 1;
    geom.step_along_ray = g.pixel_spacing() / 4.0;
    return geom;
}

// ---------------------------------------------------------------- criteria

Check criterion_1_adjoint_exactness() {
    Check c;
    double worst_sino = 0.0, worst_pix = 0.0;
    for (uint64_t seed : {1ull, 2ull, 3ull}) {
        for (int n : {16, 24, 32}) {
            const GridSpec g = make_grid_spec(n, 1.0);
            const ImageGrid f = random_image(g, seed * 100 + n);

            const RayGeometry geom = default_geometry(g, 20 + n);
            const Sinogram xf = xray_forward(f, geom);
            Sinogram psi = xf;
            std::mt19937_64 rng(seed * 977 + n);
            for (double& v : psi.values) v = uniform(rng, -1.0, 1.0);
            const ImageGrid bp = xray_adjoint(psi, g);
            const double resid_sino =
                std::abs(dot_sinogram(xf, psi) - dot_image(f, bp)) /
                (std::sqrt(dot_sinogram(xf, xf)) * std::sqrt(dot_sinogram(psi, psi)));
            worst_sino = std::max(worst_sino, resid_sino);

            const PixelRayField field = pixel_ray_field(f, 2 * (10 + n / 2));
            PixelRayField w = field;
            for (double& v : w.values) v = uniform(rng, -1.0, 1.0);
            const ImageGrid adj = pixel_ray_adjoint(w);
            const double resid_pix =
                std::abs(dot_pixel_ray(field, w) - dot_image(f, adj)) /
                (std::sqrt(dot_pixel_ray(field, field)) * std::sqrt(dot_pixel_ray(w, w)));
            worst_pix = std::max(worst_pix, resid_pix);
        }
    }
    c.require(worst_sino < 1e-12, "sinogram adjoint identity < 1e-12");
    c.require(worst_pix < 1e-12, "pixel-ray adjoint identity < 1e-12");
    std::ostringstream ss;
    ss << "worst sino " << worst_sino << ", worst pixel-ray " << worst_pix;
    c.note(ss.str());
    return c;
}

Check criterion_2_normal_oracle() {
    Check c;
    const GridSpec g = make_grid_spec(24, 1.0);
    std::mt19937_64 rng(9);  // seeded random smooth image
    const ImageGrid f = random_bumps(g, rng, 6, 0.1, 0.25);
    const ImageGrid oracle = riesz_oracle(f);
    const ImageGrid n180 = normal_operator(f, default_geometry(g, 180));
    const ImageGrid n360 = normal_operator(f, default_geometry(g, 360));
    const double e180 = rel_l2(n180.values, oracle.values);
    const double e360 = rel_l2(n360.values, oracle.values);
    c.require(e180 < 0.05, "relative error < 0.05 at 180 angles");
    c.require(e360 < e180, "error decreases when angles double");
    std::ostringstream ss;
    ss << "err(180) = " << e180 << ", err(360) = " << e360;
    c.note(ss.str());
    return c;
}

Check criterion_3_linear_inversion() {
    Check c;
    const ImageGrid f = generate_gaussian(128, 1.0, 0.15, 1.0);
    const ImageGrid rec =
        invert_xray_normal(normal_operator(f, inversion_geometry(f.grid, 180)), {});
    const double err = relative_l2_error_interior(rec, f, 0.8);
    c.require(err < 0.05, "interior relative L2 error < 0.05");
    std::ostringstream ss;
    ss << "interior error = " << err;
    c.note(ss.str());
    return c;
}

Check criterion_4_theorem_pipeline() {
    Check c;
    const ImageGrid gph = generate_gaussian(128, 1.0, 0.15, 1.0);
    const int angles = 360;

    // analytic-derivative variant matches criterion 3's tolerance
    const ScalarField analytic = frechet_derivative(make_image(gph.grid), gph, angles);
    const ImageGrid rec_analytic = linearized_reconstruction(analytic, {});
    const double floor_err = relative_l2_error_interior(rec_analytic, gph, 0.8);
    c.require(floor_err < 0.05, "analytic-derivative variant < 0.05");

    // finite-eps variant: first order in the field, image error decreasing
    // to the discretization floor (eps are exact powers of two, ratio 4)
    const std::vector<double> epsilons{0.5, 0.125, 0.03125};
    std::vector<double> field_dist, image_err;
    for (double eps : epsilons) {
        ImageGrid scaled = gph;
        for (double& v : scaled.values) v *= eps;
        const ScalarField k_eps = single_pixel_forward(scaled, angles);
        ScalarField fd = make_field(gph.grid);
        for (size_t p = 0; p < fd.values.size(); ++p)
            fd.values[p] = (k_eps.values[p] - kTwoPi) / eps;
        field_dist.push_back(rel_l2(fd.values, analytic.values));
        image_err.push_back(
            relative_l2_error_interior(linearized_reconstruction(fd, {}), gph, 0.8));
    }
    for (size_t i = 1; i < epsilons.size(); ++i) {
        const double ratio = field_dist[i - 1] / field_dist[i];
        c.require(ratio > 2.5 && ratio < 6.4,
                  "first-order field convergence (eps ratio 4 gives defect ratio ~4)");
        c.require(image_err[i] < image_err[i - 1], "image error decreases with eps");
    }
    c.require(image_err.back() <= std::max(1.3 * floor_err, floor_err + 0.01),
              "smallest eps reaches the discretization floor");

    std::ostringstream ss;
    ss << "floor = " << floor_err << ", field ratios " << field_dist[0] / field_dist[1] << ", "
       << field_dist[1] / field_dist[2] << ", image errs " << image_err[0] << " > "
       << image_err[1] << " > " << image_err[2];
    c.note(ss.str());
    return c;
}

Check criterion_5_k_sanity() {
    Check c;
    const GridSpec g = make_grid_spec(64, 1.0);
    const ScalarField k0 = single_pixel_forward(make_image(g), 360);
    double worst = 0.0;
    for (double v : k0.values) worst = std::max(worst, std::abs(v - kTwoPi));
    c.require(worst < 1e-12, "K[0] == 2*pi to 1e-12 at every pixel");

    // fine grid so the disk rim smear stays below the 1e-3 contract
    const ImageGrid disk = generate_disk(3001, 0.6, 0.5, 1.0);
    const double k_origin = single_pixel_forward_at(disk, 0.0, 0.0, 360);
    const double expect = kTwoPi * std::exp(-1.0);
    const double rel = std::abs(k_origin - expect) / expect;
    c.require(rel < 1e-3, "K[disk](origin) == 2*pi*exp(-1) within 1e-3 relative");
    std::ostringstream ss;
    ss << "max |K0 - 2pi| = " << worst << ", disk relative error = " << rel;
    c.note(ss.str());
    return c;
}

Check criterion_6_frechet() {
    Check c;
    const GridSpec g = make_grid_spec(48, 1.0);
    std::mt19937_64 rng(31);
    ImageGrid f = scaled_to_sup(random_bumps(g, rng, 5, 0.12, 0.25), 0.5);
    for (double& v : f.values) v = std::abs(v);
    const ImageGrid h = random_bumps(g, rng, 5, 0.12, 0.25);
    const int angles = 120;

    const ScalarField df = frechet_derivative(f, h, angles);
    const ScalarField kf = single_pixel_forward(f, angles);
    std::vector<double> defects;
    for (double eps : {1e-2, 1e-3, 1e-4}) {
        ImageGrid fp = f;
        for (size_t i = 0; i < fp.values.size(); ++i) fp.values[i] += eps * h.values[i];
        const ScalarField kp = single_pixel_forward(fp, angles);
        double d2 = 0.0;
        for (size_t i = 0; i < kp.values.size(); ++i) {
            const double fd = (kp.values[i] - kf.values[i]) / eps;
            d2 += (fd - df.values[i]) * (fd - df.values[i]);
        }
        defects.push_back(std::sqrt(d2));
    }
    for (size_t i = 1; i < defects.size(); ++i) {
        const double ratio = defects[i - 1] / defects[i];
        c.require(ratio > 8.0 && ratio < 12.0, "first-order ratios 10 +- 2");
    }

    // Gauss-Newton gradient against central differences of the functional
    const GridSpec gs = make_grid_spec(24, 1.0);
    std::mt19937_64 rng2(77);
    ImageGrid fs = scaled_to_sup(random_bumps(gs, rng2, 4, 0.15, 0.3), 0.3);
    const ImageGrid truth = generate_gaussian(24, 1.0, 0.2, 0.4);
    const ScalarField data = single_pixel_forward(truth, 60);
    const auto [res, res_norm] = residual(fs, data, 60);
    const ImageGrid grad = frechet_adjoint(fs, res, 60);
    double worst_rel = 0.0;
    for (int dir = 0; dir < 5; ++dir) {
        ImageGrid d = random_image(gs, 500 + dir);
        const double dn = l2_norm(d);
        for (double& v : d.values) v /= dn;
        const double eps = 1e-5;
        ImageGrid fp = fs, fm = fs;
        for (size_t i = 0; i < fs.values.size(); ++i) {
            fp.values[i] += eps * d.values[i];
            fm.values[i] -= eps * d.values[i];
        }
        const auto [rp, np] = residual(fp, data, 60);
        const auto [rm, nm] = residual(fm, data, 60);
        const double fd = (0.5 * np * np - 0.5 * nm * nm) / (2.0 * eps);
        const double an = dot_image(grad, d);
        worst_rel = std::max(worst_rel, std::abs(fd - an) / std::abs(an));
    }
    c.require(worst_rel < 1e-4, "gradient matches directional differences to 1e-4");
    std::ostringstream ss;
    ss << "fd ratios " << defects[0] / defects[1] << ", " << defects[1] / defects[2]
       << "; worst gradient rel dev " << worst_rel;
    c.note(ss.str());
    return c;
}

SolverConfig experiment_config() {
    // Deep inner solves keep the outer contraction fast; the stop tolerance
    // sits below the noise floor of every sweep level so noisy runs stop by
    // stagnation, not by the residual target.
    SolverConfig cfg;
    cfg.n_angles_full = 360;
    cfg.max_outer_iters = 30;
    cfg.cg_max_iters = 30;
    cfg.stop_tolerance = 4e-4;
    return cfg;
}

Check criterion_7_figure1() {
    Check c;
    const ImageGrid truth = generate_shepp_logan(101, 1.0);
    const ScalarField data = single_pixel_forward(truth, 360);
    const auto [rec, rep] = gauss_newton_reconstruct(data, experiment_config(), truth);
    const double err = rep.records.back().error_rel;
    c.require(rep.records.size() - 1 <= 30, "within 30 outer iterations");
    c.require(err < 0.15, "relative L2 error below the frozen bound 0.15");
    std::ostringstream ss;
    ss << "error = " << err << " after " << rep.records.size() - 1 << " iterations ("
       << to_string(rep.termination) << ")";
    c.note(ss.str());
    return c;
}

Check criterion_8_figure2() {
    Check c;
    const ImageGrid truth = generate_shepp_logan(101, 1.0);
    const ScalarField data = single_pixel_forward(truth, 360);
    std::vector<double> errors;
    const std::vector<double> levels{0.001, 0.005, 0.01};
    for (size_t i = 0; i < levels.size(); ++i) {
        const ScalarField noisy =
            add_relative_noise(data, NoiseSpec{levels[i], 1000 + i});
        const auto [rec, rep] = gauss_newton_reconstruct(noisy, experiment_config(), truth);
        errors.push_back(rep.records.back().error_l2);
    }
    const double r_half = errors[1] / errors[0];
    const double r_full = errors[2] / errors[0];
    c.require(r_half > 3.5 && r_half < 6.5, "error(0.5%)/error(0.1%) in [3.5, 6.5]");
    c.require(r_full > 7.0 && r_full < 13.0, "error(1%)/error(0.1%) in [7, 13]");
    std::ostringstream ss;
    ss << "errors " << errors[0] << " / " << errors[1] << " / " << errors[2] << ", ratios "
       << r_half << ", " << r_full;
    c.note(ss.str());
    return c;
}

Check criterion_9_figure3() {
    Check c;
    const ImageGrid base = generate_shepp_logan(101, 1.0);
    std::ostringstream ss;
    for (double m : {1.0, 10.0, 40.0}) {
        ImageGrid truth = base;
        for (double& v : truth.values) v *= m;
        const ScalarField data = single_pixel_forward(truth, 360);
        SolverConfig cfg = experiment_config();
        if (m == 10.0) {
            // the 10x case converges but takes more steps; let it run deeper
            cfg.stop_tolerance = 1e-4;
            cfg.max_outer_iters = 45;
        } else if (m == 40.0) {
            cfg.max_outer_iters = 25;  // expected to fail; bound the runtime
        }
        double err = 1.0;
        std::string term = "diverged";
        try {
            const auto [rec, rep] = gauss_newton_reconstruct(data, cfg, truth);
            err = rep.records.back().error_rel;
            term = to_string(rep.termination);
        } catch (const SolveDiverged& e) {
            err = e.report().records.back().error_rel;
        }
        ss << "m=" << m << ": err " << err << " (" << term << ")  ";
        if (m < 20.0)
            c.require(err < 0.15, "multiplier " + std::to_string(int(m)) + " succeeds");
        else
            c.require(err > 0.5 || term == "stagnated" || term == "diverged",
                      "multiplier 40 fails as expected");
    }
    c.note(ss.str());
    return c;
}

Check criterion_10_stability() {
    Check c;
    const GridSpec g = make_grid_spec(48, 1.0);
    const int angles = 180;

    // attenuation regime: nonnegative densities, both buckets
    std::mt19937_64 rng(4242);
    const auto draw = [&](double sup) {
        ImageGrid img = random_bumps(g, rng, 5, 0.12, 0.2);
        for (double& v : img.values) v = std::abs(v);
        return scaled_to_sup(std::move(img), sup);
    };
    std::vector<std::pair<ImageGrid, ImageGrid>> small_pairs, large_pairs;
    for (int i = 0; i < 22; ++i)
        small_pairs.emplace_back(draw(0.18), draw(0.18));
    for (int i = 0; i < 10; ++i)
        large_pairs.emplace_back(draw(6.0), draw(6.0));
    const StabilityAudit small = stability_audit(small_pairs, angles);
    const StabilityAudit large = stability_audit(large_pairs, angles);

    std::vector<double> rs, rl;
    for (const auto& r : small.records)
        if (r.l2_diff > 0.0) rs.push_back(r.lower_ratio);
    for (const auto& r : large.records)
        if (r.l2_diff > 0.0) rl.push_back(r.lower_ratio);
    std::sort(rs.begin(), rs.end());
    std::sort(rl.begin(), rl.end());
    const double med_s = rs[rs.size() / 2], med_l = rl[rl.size() / 2];

    c.require(rs.size() >= 20, "at least 20 small pairs audited");
    c.require(small.min_lower_ratio > 0.0, "min lower ratio positive");
    c.require(rs.back() / rs.front() < 2.0, "small-M ratio spread within a factor 2");
    c.require(med_l < med_s, "large-M median strictly below small-M median");
    std::ostringstream ss;
    ss << "small: min " << rs.front() << " max " << rs.back() << " median " << med_s
       << "; large median " << med_l;
    c.note(ss.str());
    return c;
}

int run_cli(const std::string& args) {
    const char* bin = std::getenv("SPIXCT_CLI");
    if (!bin) return -1;
    const std::string cmd = std::string(bin) + " " + args + " >/dev/null 2>&1";
    return WEXITSTATUS(std::system(cmd.c_str()));
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Check criterion_11_determinism() {
    Check c;
    if (!std::getenv("SPIXCT_CLI")) {
        c.require(false, "SPIXCT_CLI must point at the CLI binary");
        return c;
    }
    const fs::path root =
        fs::temp_directory_path() / ("spixct_acc11_" + std::to_string(getpid()));
    fs::create_directories(root);

    const std::vector<std::pair<std::string, std::string>> cases = {
        {"forward", "forward --phantom disk --n 21 --angles 24 --seed 5"},
        {"reconstruct",
         "reconstruct --phantom gaussian --sigma 0.22 --amplitude 0.4 --n 20 --angles 24 "
         "--max-iters 2 --noise 0.01 --seed 11 --threads 1"},
        {"invert-linear",
         "invert-linear --phantom gaussian --sigma 0.25 --n 24 --angles 24 --epsilons 0.1,0.01"},
        {"stability-audit", "stability-audit --n 16 --angles 24 --pairs 2 --seed 3"},
        {"noise-sweep",
         "noise-sweep --phantom disk --radius 0.4 --amplitude 0.3 --n 16 --angles 24 "
         "--max-iters 2 --levels 0,0.01 --seed 13 --threads 1"},
        {"magnitude-sweep",
         "magnitude-sweep --phantom gaussian --sigma 0.3 --amplitude 0.2 --n 16 --angles 24 "
         "--max-iters 2 --multipliers 1,2 --seed 17 --threads 1"},
    };
    for (const auto& [name, args] : cases) {
        const fs::path a = root / (name + "_a"), b = root / (name + "_b");
        fs::create_directories(a);
        fs::create_directories(b);
        const int code_a = run_cli(args + " --out " + a.string());
        const int code_b = run_cli(args + " --out " + b.string());
        c.require(code_a == 0 && code_b == 0, name + " runs succeed");
        int compared = 0;
        for (const auto& entry : fs::directory_iterator(a)) {
            if (entry.path().extension() != ".csv") continue;
            ++compared;
            const std::string fa = slurp(entry.path());
            const std::string fb = slurp(b / entry.path().filename());
            c.require(!fa.empty() && fa == fb,
                      name + ": " + entry.path().filename().string() + " byte-identical");
        }
        c.require(compared > 0, name + " produced CSV output");
    }
    fs::remove_all(root);
    return c;
}

struct Criterion {
    int id;
    const char* title;
    std::function<Check()> fn;
};

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> criteria = {
        {1, "adjoint exactness", criterion_1_adjoint_exactness},
        {2, "normal-operator oracle equivalence", criterion_2_normal_oracle},
        {3, "linear inversion formula", criterion_3_linear_inversion},
        {4, "linearized inversion pipeline", criterion_4_theorem_pipeline},
        {5, "single-pixel transform sanity", criterion_5_k_sanity},
        {6, "frechet derivative correctness", criterion_6_frechet},
        {7, "noiseless reconstruction quality", criterion_7_figure1},
        {8, "noise-linearity of the error", criterion_8_figure2},
        {9, "magnitude breakdown", criterion_9_figure3},
        {10, "stability audit", criterion_10_stability},
        {11, "CLI determinism", criterion_11_determinism},
    };

    std::vector<int> selected;
    for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));

    int failures = 0;
    for (const Criterion& crit : criteria) {
        if (!selected.empty() &&
            std::find(selected.begin(), selected.end(), crit.id) == selected.end())
            continue;
        Check result;
        try {
            result = crit.fn();
        } catch (const std::exception& e) {
            result.ok = false;
            result.note(std::string("exception: ") + e.what());
        }
        std::printf("criterion %2d %s: %s%s%s\n", crit.id, result.ok ? "PASS" : "FAIL",
                    crit.title, result.detail.empty() ? "" : " -- ", result.detail.c_str());
        std::fflush(stdout);
        if (!result.ok) ++failures;
    }
    return failures;
}
