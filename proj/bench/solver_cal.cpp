// Calibration: magnitude, noise level, cg budget, stop tol, max outers.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include "spixct/metrics.hpp"
#include "spixct/phantom.hpp"
#include "spixct/solver.hpp"
#include "spixct/singlepixel.hpp"
using namespace spixct;

int main(int argc, char** argv) {
    if (argc < 6) return 1;
    double mag = atof(argv[1]);
    double noise = atof(argv[2]);
    int cg = atoi(argv[3]);
    double stop = atof(argv[4]);
    int maxit = atoi(argv[5]);
    auto t0 = std::chrono::steady_clock::now();
    ImageGrid truth = generate_shepp_logan(101, 1.0);
    for (double& v : truth.values) v *= mag;
    ScalarField data = single_pixel_forward(truth, 360);
    if (noise > 0) data = add_relative_noise(data, NoiseSpec{noise, 1000});
    SolverConfig cfg;
    cfg.cg_max_iters = cg;
    cfg.stop_tolerance = stop;
    cfg.max_outer_iters = maxit;
    try {
        auto [rec, rep] = gauss_newton_reconstruct(data, cfg, truth);
        double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        printf("mag=%g noise=%g cg=%d stop=%g: %zu iters %s err_rel %.4f err_l2 %.4f (%.0f s)\n",
               mag, noise, cg, stop, rep.records.size() - 1,
               to_string(rep.termination).c_str(), rep.records.back().error_rel,
               rep.records.back().error_l2, dt);
        for (const auto& r : rep.records)
            printf("  it %2d res %.4e err %.4f cg %2d wall %.0f\n", r.iteration, r.residual_norm,
                   r.error_rel, r.cg_iterations, r.wall_seconds);
    } catch (const SolveDiverged& e) {
        printf("mag=%g noise=%g: DIVERGED after %zu records\n", mag, noise,
               e.report().records.size());
    }
    fflush(stdout);
    return 0;
}
