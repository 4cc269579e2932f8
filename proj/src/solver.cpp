#include "spixct/solver.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "spixct/metrics.hpp"
#include "spixct/singlepixel.hpp"

namespace spixct {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

double plain_dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

void validate(const SolverConfig& cfg) {
    if (cfg.max_outer_iters < 1 || cfg.cg_max_iters < 1)
        throw std::invalid_argument("solver: iteration limits must be >= 1");
    if (!(cfg.cg_tolerance > 0.0 && cfg.cg_tolerance < 1.0))
        throw std::invalid_argument("solver: cg_tolerance must lie in (0,1)");
    if (!(cfg.stop_tolerance > 0.0 && cfg.stop_tolerance < 1.0))
        throw std::invalid_argument("solver: stop_tolerance must lie in (0,1)");
    if (cfg.damping < 0.0 || cfg.tikhonov_weight < 0.0)
        throw std::invalid_argument("solver: damping and tikhonov_weight must be nonnegative");
}

void apply_support_mask(ImageGrid& f) {
    const GridSpec& g = f.grid;
    const double r2 = g.support_radius * g.support_radius;
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j) {
            const double x = g.x(j), y = g.y(i);
            if (x * x + y * y > r2) f.at(i, j) = 0.0;
        }
}

struct CgResult {
    ImageGrid step;
    int iterations = 0;
};

// CG on (J'J + lambda I + tikhonov I) delta = rhs, matrix-free through the
// cached linearization. lambda is damping relative to a Rayleigh estimate of
// J'J taken on the first search direction.
CgResult solve_normal_equations(const detail::ExpField& lin, const ImageGrid& rhs,
                                const SolverConfig& cfg) {
    CgResult out{make_image(rhs.grid), 0};
    ImageGrid r = rhs;
    ImageGrid p = r;
    double rr = plain_dot(r.values, r.values);
    const double rr0 = rr;
    if (rr0 == 0.0) return out;

    double lambda = 0.0;
    for (int it = 0; it < cfg.cg_max_iters; ++it) {
        apply_support_mask(p);
        const ScalarField jp = detail::apply_derivative(lin, p);
        ImageGrid ap = detail::apply_derivative_adjoint(lin, jp);
        apply_support_mask(ap);
        if (it == 0 && cfg.damping > 0.0) {
            const double pp = plain_dot(p.values, p.values);
            const double rayleigh = pp > 0.0 ? plain_dot(ap.values, p.values) / pp : 0.0;
            lambda = cfg.damping * rayleigh;
        }
        const double shift = lambda + cfg.tikhonov_weight;
        if (shift != 0.0)
            for (size_t i = 0; i < ap.values.size(); ++i) ap.values[i] += shift * p.values[i];

        const double app = plain_dot(ap.values, p.values);
        if (!(app > 0.0)) break;  // numerically rank-deficient direction
        const double alpha = rr / app;
        for (size_t i = 0; i < out.step.values.size(); ++i) {
            out.step.values[i] += alpha * p.values[i];
            r.values[i] -= alpha * ap.values[i];
        }
        ++out.iterations;
        const double rr_new = plain_dot(r.values, r.values);
        if (rr_new <= cfg.cg_tolerance * cfg.cg_tolerance * rr0) break;
        const double beta = rr_new / rr;
        for (size_t i = 0; i < p.values.size(); ++i)
            p.values[i] = r.values[i] + beta * p.values[i];
        rr = rr_new;
    }
    apply_support_mask(out.step);
    return out;
}

double residual_norm(const detail::ExpField& lin, const ScalarField& data, ScalarField& res) {
    res = lin.forward;
    for (size_t i = 0; i < res.values.size(); ++i) res.values[i] -= data.values[i];
    return l2_norm(res);
}

}  // namespace

std::string to_string(Termination t) {
    switch (t) {
        case Termination::converged: return "converged";
        case Termination::stagnated: return "stagnated";
        case Termination::max_iterations: return "max_iterations";
        case Termination::diverged: return "diverged";
    }
    return "unknown";
}

std::pair<ScalarField, double> residual(const ImageGrid& f, const ScalarField& data,
                                        int n_angles_full) {
    if (!(f.grid == data.grid)) throw std::invalid_argument("residual: grid mismatch");
    ScalarField res = single_pixel_forward(f, n_angles_full);
    for (size_t i = 0; i < res.values.size(); ++i) res.values[i] -= data.values[i];
    const double norm = l2_norm(res);
    return {std::move(res), norm};
}

std::pair<ImageGrid, SolveReport> gauss_newton_reconstruct(
    const ScalarField& data, const SolverConfig& config, const std::optional<ImageGrid>& truth) {
    validate(config);
    if (truth && !(truth->grid == data.grid))
        throw std::invalid_argument("gauss_newton_reconstruct: truth grid mismatch");
    if (config.initial_guess && !(config.initial_guess->grid == data.grid))
        throw std::invalid_argument("gauss_newton_reconstruct: initial guess grid mismatch");

    const auto t_start = std::chrono::steady_clock::now();
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const double truth_norm = truth ? l2_norm(*truth) : nan;

    // Scale for "residual is already small": the data's deviation from the
    // empty-scene measurement K[0] = 2*pi.
    ScalarField dev = data;
    for (double& v : dev.values) v -= kTwoPi;
    const double signal_norm = l2_norm(dev);

    ImageGrid f = config.initial_guess ? *config.initial_guess : make_image(data.grid);
    apply_support_mask(f);

    SolveReport report;
    const auto record_state = [&](int iter, double res_norm, double step_norm, int cg_iters) {
        SolveRecord rec;
        rec.iteration = iter;
        rec.residual_norm = res_norm;
        if (truth) {
            ImageGrid diff = f;
            for (size_t i = 0; i < diff.values.size(); ++i) diff.values[i] -= truth->values[i];
            rec.error_l2 = l2_norm(diff);
            rec.error_rel = truth_norm > 0.0 ? rec.error_l2 / truth_norm : nan;
        } else {
            rec.error_l2 = nan;
            rec.error_rel = nan;
        }
        rec.step_norm = step_norm;
        rec.cg_iterations = cg_iters;
        rec.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
        report.records.push_back(rec);
    };

    detail::ExpField lin = detail::make_exp_field(f, config.n_angles_full);
    ScalarField res = make_field(data.grid);
    double res_norm = residual_norm(lin, data, res);
    record_state(0, res_norm, 0.0, 0);

    if (!std::isfinite(res_norm)) {
        report.termination = Termination::diverged;
        throw SolveDiverged(report, f);
    }
    if (res_norm <= config.stop_tolerance * signal_norm) {
        report.termination = Termination::converged;
        return {std::move(f), std::move(report)};
    }

    for (int outer = 1; outer <= config.max_outer_iters; ++outer) {
        // rhs = -J' r, masked to the support
        ImageGrid rhs = detail::apply_derivative_adjoint(lin, res);
        for (double& v : rhs.values) v = -v;
        if (config.tikhonov_weight > 0.0)
            for (size_t i = 0; i < rhs.values.size(); ++i)
                rhs.values[i] -= config.tikhonov_weight * f.values[i];
        apply_support_mask(rhs);

        const CgResult cg = solve_normal_equations(lin, rhs, config);

        double alpha = 1.0;
        ImageGrid trial = f;
        detail::ExpField trial_lin;
        ScalarField trial_res = make_field(data.grid);
        double trial_norm = std::numeric_limits<double>::infinity();
        bool accepted = false;
        const int tries = config.backtracking ? config.backtracking_max_halvings + 1 : 1;
        for (int attempt = 0; attempt < tries; ++attempt) {
            for (size_t i = 0; i < trial.values.size(); ++i)
                trial.values[i] = f.values[i] + alpha * cg.step.values[i];
            apply_support_mask(trial);
            trial_lin = detail::make_exp_field(trial, config.n_angles_full);
            trial_norm = residual_norm(trial_lin, data, trial_res);
            if (!std::isfinite(trial_norm)) {
                report.termination = Termination::diverged;
                throw SolveDiverged(report, f);
            }
            if (!config.backtracking || trial_norm <= (1.0 - 1e-4 * alpha) * res_norm) {
                accepted = true;
                break;
            }
            alpha *= config.backtracking_shrink;
        }
        if (!accepted) {
            report.termination = Termination::stagnated;
            return {std::move(f), std::move(report)};
        }

        double step2 = 0.0;
        for (size_t i = 0; i < trial.values.size(); ++i) {
            const double d = trial.values[i] - f.values[i];
            step2 += d * d;
        }
        const double step_norm = data.grid.pixel_spacing() * std::sqrt(step2);

        const double prev_norm = res_norm;
        f = std::move(trial);
        lin = std::move(trial_lin);
        res = std::move(trial_res);
        res_norm = trial_norm;
        record_state(outer, res_norm, step_norm, cg.iterations);

        if (res_norm <= config.stop_tolerance * signal_norm) {
            report.termination = Termination::converged;
            return {std::move(f), std::move(report)};
        }
        if (prev_norm - res_norm < config.stop_tolerance * prev_norm) {
            report.termination = Termination::stagnated;
            return {std::move(f), std::move(report)};
        }
    }
    report.termination = Termination::max_iterations;
    return {std::move(f), std::move(report)};
}

}  // namespace spixct
