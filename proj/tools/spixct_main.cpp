// spixct: command-line driver for the single-pixel X-ray transform toolkit.
//
// Exit codes: 0 success, 1 usage error, 2 validation/input error,
// 3 numeric failure (artifacts written where possible).

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "spixct/io.hpp"
#include "spixct/metrics.hpp"
#include "spixct/parallel.hpp"
#include "spixct/phantom.hpp"
#include "spixct/projector.hpp"
#include "spixct/singlepixel.hpp"
#include "spixct/solver.hpp"
#include "spixct/spectral.hpp"

namespace fs = std::filesystem;
using namespace spixct;

namespace {

struct Options {
    std::string phantom = "shepplogan";
    int n = 101;
    double half_width = 1.0;
    int angles = 360;  // full-circle sample count for K; sinogram routes use angles/2 on [0,pi)
    double magnitude = 1.0;
    double noise = 0.0;
    std::uint64_t seed = 1;
    std::string out;
    int threads = 0;

    double radius = 0.5;
    double sigma = 0.15;
    double amplitude = 1.0;

    int max_iters = 30;
    int cg_iters = 20;
    double cg_tol = 1e-2;
    double damping = 1e-6;
    double stop_tol = 4e-4;
    bool no_backtracking = false;

    int pad = 2;
    std::string taper = "none";

    std::string epsilons = "0.1,0.01,0.001";
    bool analytic = false;
    std::string levels = "0,0.001,0.005,0.01";
    std::string multipliers = "1,10,20,40";
    int pairs = 24;
    double small_max_norm = 0.2;
    double large_min_norm = 5.0;
};

void register_common(CLI::App* sub, Options& o) {
    sub->set_config("--config", "", "flat key=value config file; command-line flags win");
    sub->add_option("--phantom", o.phantom, "shepplogan|disk|gaussian|file:<path>");
    sub->add_option("--n", o.n, "pixels per side");
    sub->add_option("--half-width", o.half_width, "half side of the physical domain");
    sub->add_option("--angles", o.angles, "full-circle angle count");
    sub->add_option("--magnitude", o.magnitude, "phantom magnitude multiplier");
    sub->add_option("--noise", o.noise, "relative noise level (e.g. 0.001 = 0.1%)");
    sub->add_option("--seed", o.seed, "noise / sampling seed");
    sub->add_option("--out", o.out, "output directory (must exist)")->required();
    sub->add_option("--threads", o.threads, "worker threads (0 = auto)");
    sub->add_option("--radius", o.radius, "disk phantom radius");
    sub->add_option("--sigma", o.sigma, "gaussian phantom width");
    sub->add_option("--amplitude", o.amplitude, "disk/gaussian amplitude");
    sub->add_option("--max-iters", o.max_iters, "Gauss-Newton outer iterations");
    sub->add_option("--cg-iters", o.cg_iters, "inner CG iteration cap");
    sub->add_option("--cg-tol", o.cg_tol, "inner CG relative tolerance");
    sub->add_option("--damping", o.damping, "relative Levenberg-Marquardt damping");
    sub->add_option("--stop-tol", o.stop_tol, "relative residual decrease threshold");
    sub->add_flag("--no-backtracking", o.no_backtracking, "disable step halving");
    sub->add_option("--pad", o.pad, "spectral zero-padding factor (2..4)");
    sub->add_option("--taper", o.taper, "spectral taper: none|cosine");
    sub->add_option("--epsilons", o.epsilons, "comma list for the finite-eps linearization");
    sub->add_flag("--analytic", o.analytic, "use the analytic derivative instead of finite eps");
    sub->add_option("--levels", o.levels, "comma list of noise levels for noise-sweep");
    sub->add_option("--multipliers", o.multipliers, "comma list for magnitude-sweep");
    sub->add_option("--pairs", o.pairs, "pair count per stability bucket");
    sub->add_option("--small-max-norm", o.small_max_norm, "sup-norm bound of the small bucket");
    sub->add_option("--large-min-norm", o.large_min_norm, "sup-norm floor of the large bucket");
}

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string token;
    while (std::getline(ss, token, ',')) {
        if (token.empty()) continue;
        out.push_back(std::stod(token));
    }
    if (out.empty()) throw std::invalid_argument("expected a comma-separated number list");
    return out;
}

std::uint64_t fnv1a(const std::string& text) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

// Stamp written as the first comment line of every output file.
std::string config_stamp(const std::string& subcommand, const Options& o) {
    std::ostringstream ss;
    ss << "subcommand=" << subcommand << " phantom=" << o.phantom << " n=" << o.n
       << " half_width=" << format_double(o.half_width) << " angles=" << o.angles
       << " magnitude=" << format_double(o.magnitude) << " noise=" << format_double(o.noise)
       << " radius=" << format_double(o.radius) << " sigma=" << format_double(o.sigma)
       << " amplitude=" << format_double(o.amplitude) << " max_iters=" << o.max_iters
       << " cg_iters=" << o.cg_iters << " cg_tol=" << format_double(o.cg_tol)
       << " damping=" << format_double(o.damping) << " stop_tol=" << format_double(o.stop_tol)
       << " backtracking=" << (o.no_backtracking ? 0 : 1) << " pad=" << o.pad
       << " taper=" << o.taper << " epsilons=" << o.epsilons << " analytic=" << o.analytic
       << " levels=" << o.levels << " multipliers=" << o.multipliers << " pairs=" << o.pairs
       << " small_max_norm=" << format_double(o.small_max_norm)
       << " large_min_norm=" << format_double(o.large_min_norm);
    char hex[32];
    std::snprintf(hex, sizeof(hex), "%016llx",
                  static_cast<unsigned long long>(fnv1a(ss.str())));
    return "config_hash=" + std::string(hex) + " seed=" + std::to_string(o.seed);
}

ImageGrid make_phantom(const Options& o) {
    ImageGrid img = [&] {
        if (o.phantom == "shepplogan") return generate_shepp_logan(o.n, o.half_width);
        if (o.phantom == "disk") return generate_disk(o.n, o.half_width, o.radius, o.amplitude);
        if (o.phantom == "gaussian")
            return generate_gaussian(o.n, o.half_width, o.sigma, o.amplitude);
        if (o.phantom.rfind("file:", 0) == 0) return read_image_csv(o.phantom.substr(5));
        throw std::invalid_argument("unknown phantom '" + o.phantom + "'");
    }();
    if (o.magnitude != 1.0)
        for (double& v : img.values) v *= o.magnitude;
    return img;
}

void prepare(const Options& o) {
    if (!fs::is_directory(o.out))
        throw std::invalid_argument("output directory does not exist: " + o.out);
    set_max_threads(o.threads);
}

SolverConfig solver_config(const Options& o) {
    SolverConfig cfg;
    cfg.n_angles_full = o.angles;
    cfg.max_outer_iters = o.max_iters;
    cfg.cg_max_iters = o.cg_iters;
    cfg.cg_tolerance = o.cg_tol;
    cfg.damping = o.damping;
    cfg.stop_tolerance = o.stop_tol;
    cfg.backtracking = !o.no_backtracking;
    return cfg;
}

SpectralConfig spectral_config(const Options& o) {
    SpectralConfig cfg;
    cfg.pad_factor = o.pad;
    if (o.taper == "none")
        cfg.taper = SpectralConfig::Taper::none;
    else if (o.taper == "cosine")
        cfg.taper = SpectralConfig::Taper::cosine;
    else
        throw std::invalid_argument("taper must be none or cosine");
    return cfg;
}

std::string out_path(const Options& o, const std::string& name) {
    return (fs::path(o.out) / name).string();
}

void write_kv_csv(const std::string& path, const std::string& stamp,
                  const std::vector<std::pair<std::string, std::string>>& rows) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    out << "# " << stamp << "\n";
    out << "key,value\n";
    for (const auto& [k, v] : rows) out << k << "," << v << "\n";
}

int cmd_forward(const Options& o) {
    prepare(o);
    const std::string stamp = config_stamp("forward", o);
    const ImageGrid phantom = make_phantom(o);
    write_image_csv(phantom, out_path(o, "phantom.csv"), {stamp});
    write_image_pgm(phantom, out_path(o, "phantom.pgm"));

    ScalarField kf = single_pixel_forward(phantom, o.angles);
    if (o.noise > 0.0) kf = add_relative_noise(kf, NoiseSpec{o.noise, o.seed});
    write_field_csv(kf, out_path(o, "kf.csv"), {stamp});
    write_field_pgm(kf, out_path(o, "kf.pgm"));
    std::cout << "forward: wrote " << out_path(o, "kf.csv") << "\n";
    return 0;
}

int cmd_invert_linear(const Options& o) {
    prepare(o);
    const std::string stamp = config_stamp("invert-linear", o);
    const ImageGrid g = make_phantom(o);
    const SpectralConfig spec_cfg = spectral_config(o);

    ScalarField derivative;
    if (o.analytic) {
        derivative = frechet_derivative(make_image(g.grid), g, o.angles);
    } else {
        const EpsilonLinearization lin = linearize_by_epsilon(g, parse_list(o.epsilons), o.angles);
        std::ofstream table(out_path(o, "epsilon_table.csv"));
        table << "# " << stamp << "\n";
        table << "epsilon,distance_to_analytic\n";
        for (const auto& row : lin.table)
            table << format_double(row.epsilon) << "," << format_double(row.distance_to_analytic)
                  << "\n";
        derivative = lin.field;
    }

    const ImageGrid recon = linearized_reconstruction(derivative, spec_cfg);
    write_image_csv(recon, out_path(o, "recon.csv"), {stamp});
    write_image_pgm(recon, out_path(o, "recon.pgm"));

    write_kv_csv(out_path(o, "summary.csv"), stamp,
                 {{"interior_rel_error_80", format_double(relative_l2_error_interior(recon, g, 0.8))},
                  {"rel_error", format_double(relative_l2_error(recon, g))}});
    std::cout << "invert-linear: wrote " << out_path(o, "recon.csv") << "\n";
    return 0;
}

int run_reconstruction(const Options& o, const std::string& stamp, const ImageGrid& truth,
                       double noise_level, std::uint64_t seed, const std::string& suffix,
                       SolveRecord& final_rec, Termination& term) {
    ScalarField data = single_pixel_forward(truth, o.angles);
    if (noise_level > 0.0) data = add_relative_noise(data, NoiseSpec{noise_level, seed});

    int exit_code = 0;
    ImageGrid recon = make_image(truth.grid);
    SolveReport report;
    try {
        auto [rec, rep] = gauss_newton_reconstruct(data, solver_config(o), truth);
        recon = std::move(rec);
        report = std::move(rep);
    } catch (const SolveDiverged& e) {
        recon = e.iterate();
        report = e.report();
        exit_code = 3;
    }

    write_image_csv(recon, out_path(o, "recon" + suffix + ".csv"), {stamp});
    write_image_pgm(recon, out_path(o, "recon" + suffix + ".pgm"));
    write_report_csv(report, out_path(o, "report" + suffix + ".csv"), {stamp});
    final_rec = report.records.back();
    term = report.termination;
    return exit_code;
}

int cmd_reconstruct(const Options& o) {
    prepare(o);
    const std::string stamp = config_stamp("reconstruct", o);
    const ImageGrid truth = make_phantom(o);
    write_image_csv(truth, out_path(o, "phantom.csv"), {stamp});

    SolveRecord last;
    Termination term;
    const int code = run_reconstruction(o, stamp, truth, o.noise, o.seed, "", last, term);
    write_kv_csv(out_path(o, "summary.csv"), stamp,
                 {{"final_residual", format_double(last.residual_norm)},
                  {"final_error_l2", format_double(last.error_l2)},
                  {"final_error_rel", format_double(last.error_rel)},
                  {"iterations", std::to_string(last.iteration)},
                  {"termination", to_string(term)}});
    std::cout << "reconstruct: termination=" << to_string(term)
              << " final_error_rel=" << format_double(last.error_rel) << "\n";
    return code;
}

int cmd_noise_sweep(Options o, const CLI::App* sub) {
    // The sweep compares errors across noise levels, so every level runs the
    // same fixed iteration protocol: with a data-dependent stopping rule the
    // low-noise runs would stop bias-dominated and the near-linear error
    // scaling would be invisible.
    if (!sub->count("--max-iters")) o.max_iters = 8;
    if (!sub->count("--stop-tol")) o.stop_tol = 1e-9;
    prepare(o);
    const std::string stamp = config_stamp("noise-sweep", o);
    const ImageGrid truth = make_phantom(o);
    const std::vector<double> levels = parse_list(o.levels);

    std::ofstream sweep(out_path(o, "noise_sweep.csv"));
    sweep << "# " << stamp << "\n";
    sweep << "level,seed,final_error_l2,final_error_rel,final_residual,iterations,termination\n";
    int code = 0;
    for (size_t i = 0; i < levels.size(); ++i) {
        SolveRecord last;
        Termination term;
        const std::uint64_t seed = o.seed + i;  // shared seed base
        code = std::max(code, run_reconstruction(o, stamp, truth, levels[i], seed,
                                                 "_level" + std::to_string(i), last, term));
        sweep << format_double(levels[i]) << "," << seed << "," << format_double(last.error_l2)
              << "," << format_double(last.error_rel) << ","
              << format_double(last.residual_norm) << "," << last.iteration << ","
              << to_string(term) << "\n";
        std::cout << "noise-sweep: level=" << levels[i]
                  << " final_error_l2=" << format_double(last.error_l2) << "\n";
    }
    return code;
}

int cmd_magnitude_sweep(const Options& o) {
    prepare(o);
    const std::string stamp = config_stamp("magnitude-sweep", o);
    const ImageGrid base = make_phantom(o);
    const std::vector<double> multipliers = parse_list(o.multipliers);

    std::ofstream sweep(out_path(o, "magnitude_sweep.csv"));
    sweep << "# " << stamp << "\n";
    sweep << "multiplier,final_error_l2,error_over_multiplier,final_error_rel,iterations,"
             "termination\n";
    int code = 0;
    for (double m : multipliers) {
        ImageGrid truth = base;
        for (double& v : truth.values) v *= m;
        SolveRecord last;
        Termination term;
        std::ostringstream tag;
        tag << "_m" << m;
        code = std::max(code, run_reconstruction(o, stamp, truth, 0.0, o.seed, tag.str(), last,
                                                 term));
        sweep << format_double(m) << "," << format_double(last.error_l2) << ","
              << format_double(last.error_l2 / m) << "," << format_double(last.error_rel) << ","
              << last.iteration << "," << to_string(term) << "\n";
        // normalized errors-versus-steps curve for this multiplier
        {
            std::ifstream rep_in(out_path(o, "report" + tag.str() + ".csv"));
            std::ofstream curve(out_path(o, "errors_vs_steps" + tag.str() + ".csv"));
            curve << "# " << stamp << "\n";
            curve << "iteration,error_over_multiplier\n";
            std::string line;
            while (std::getline(rep_in, line)) {
                if (line.empty() || line[0] == '#' || line[0] == 'i') continue;
                std::stringstream ss(line);
                std::string iter, res, err;
                std::getline(ss, iter, ',');
                std::getline(ss, res, ',');
                std::getline(ss, err, ',');
                curve << iter << "," << format_double(std::stod(err) / m) << "\n";
            }
        }
        std::cout << "magnitude-sweep: m=" << m
                  << " final_error_rel=" << format_double(last.error_rel)
                  << " termination=" << to_string(term) << "\n";
    }
    return code;
}

ImageGrid random_bumps(const GridSpec& grid, std::mt19937_64& rng, double target_sup) {
    const auto uniform = [&](double lo, double hi) {
        const double u = (rng() >> 11) * 0x1.0p-53;
        return lo + (hi - lo) * u;
    };
    ImageGrid img = make_image(grid);
    const int count = 3 + static_cast<int>(rng() % 3);
    for (int b = 0; b < count; ++b) {
        const double r = 0.5 * grid.half_width * std::sqrt(uniform(0.0, 1.0));
        const double phi = uniform(0.0, 2.0 * 3.14159265358979323846);
        const double cx = r * std::cos(phi), cy = r * std::sin(phi);
        const double sigma = uniform(0.12, 0.22) * grid.half_width;
        const double amp = uniform(0.4, 1.0) * (rng() % 2 ? 1.0 : -1.0);
        for (int i = 0; i < grid.n; ++i)
            for (int j = 0; j < grid.n; ++j) {
                const double dx = grid.x(j) - cx, dy = grid.y(i) - cy;
                img.at(i, j) += amp * std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
            }
    }
    for (double& v : img.values) v = std::abs(v);  // attenuation regime
    const double sup = max_abs(img.values);
    const double scale = sup > 0.0 ? target_sup / sup : 0.0;
    for (double& v : img.values) v *= scale;
    return img;
}

std::vector<std::pair<ImageGrid, ImageGrid>> random_pairs(const GridSpec& grid,
                                                          std::uint64_t seed, int count,
                                                          double sup) {
    std::mt19937_64 rng(seed);
    std::vector<std::pair<ImageGrid, ImageGrid>> pairs;
    pairs.reserve(count);
    for (int i = 0; i < count; ++i)
        pairs.emplace_back(random_bumps(grid, rng, sup), random_bumps(grid, rng, sup));
    return pairs;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

int cmd_stability_audit(const Options& o) {
    prepare(o);
    const std::string stamp = config_stamp("stability-audit", o);
    const GridSpec grid = make_grid_spec(o.n, o.half_width);

    const auto small_pairs = random_pairs(grid, o.seed, o.pairs, o.small_max_norm);
    const auto large_pairs = random_pairs(grid, o.seed + 1000003, o.pairs, o.large_min_norm);

    const StabilityAudit small = stability_audit(small_pairs, o.angles);
    const StabilityAudit large = stability_audit(large_pairs, o.angles);
    write_stability_csv(small, out_path(o, "stability_small.csv"), {stamp});
    write_stability_csv(large, out_path(o, "stability_large.csv"), {stamp});

    std::vector<double> rs, rl;
    for (const auto& r : small.records)
        if (r.l2_diff > 0.0) rs.push_back(r.lower_ratio);
    for (const auto& r : large.records)
        if (r.l2_diff > 0.0) rl.push_back(r.lower_ratio);
    write_kv_csv(out_path(o, "summary.csv"), stamp,
                 {{"small_min_lower_ratio", format_double(small.min_lower_ratio)},
                  {"small_median_lower_ratio", format_double(median(rs))},
                  {"small_fitted_exponent", format_double(small.fitted_exponent)},
                  {"large_median_lower_ratio", format_double(median(rl))},
                  {"large_fitted_exponent", format_double(large.fitted_exponent)}});
    std::cout << "stability-audit: small median=" << format_double(median(rs))
              << " large median=" << format_double(median(rl)) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"single-pixel X-ray transform toolkit"};
    app.require_subcommand(1);
    Options o;

    CLI::App* forward = app.add_subcommand("forward", "simulate Kf for a phantom");
    CLI::App* invert = app.add_subcommand("invert-linear", "linearized inversion -c2|D| dK");
    CLI::App* reconstruct = app.add_subcommand("reconstruct", "Gauss-Newton reconstruction");
    CLI::App* noise_sweep = app.add_subcommand("noise-sweep", "reconstructions across noise levels");
    CLI::App* magnitude_sweep =
        app.add_subcommand("magnitude-sweep", "reconstructions across phantom magnitudes");
    CLI::App* stability = app.add_subcommand("stability-audit", "empirical stability ratios");
    for (CLI::App* sub : {forward, invert, reconstruct, noise_sweep, magnitude_sweep, stability})
        register_common(sub, o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (forward->parsed()) return cmd_forward(o);
        if (invert->parsed()) return cmd_invert_linear(o);
        if (reconstruct->parsed()) return cmd_reconstruct(o);
        if (noise_sweep->parsed()) return cmd_noise_sweep(o, noise_sweep);
        if (magnitude_sweep->parsed()) return cmd_magnitude_sweep(o);
        if (stability->parsed()) return cmd_stability_audit(o);
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return 3;
    }
    return 1;
}
