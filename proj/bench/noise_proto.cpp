// Criterion-8 candidate: fixed-iteration protocol across noise levels.
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
    int outers = argc > 1 ? atoi(argv[1]) : 8;
    int cg = argc > 2 ? atoi(argv[2]) : 20;
    auto t0 = std::chrono::steady_clock::now();
    ImageGrid truth = generate_shepp_logan(101, 1.0);
    ScalarField data = single_pixel_forward(truth, 360);
    SolverConfig cfg;
    cfg.cg_max_iters = cg;
    cfg.max_outer_iters = outers;
    cfg.stop_tolerance = 1e-9;  // fixed protocol: run all outers
    double errs[3];
    const double levels[3] = {0.001, 0.005, 0.01};
    for (int i = 0; i < 3; ++i) {
        ScalarField noisy = add_relative_noise(data, NoiseSpec{levels[i], 1000 + (uint64_t)i});
        auto [rec, rep] = gauss_newton_reconstruct(noisy, cfg, truth);
        errs[i] = rep.records.back().error_l2;
        double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        printf("level %.3f: err_l2 %.4f err_rel %.4f iters %zu %s (t=%.0f)\n", levels[i],
               errs[i], rep.records.back().error_rel, rep.records.size() - 1,
               to_string(rep.termination).c_str(), dt);
        fflush(stdout);
    }
    printf("ratios: %.2f (want 3.5-6.5), %.2f (want 7-13)\n", errs[1] / errs[0],
           errs[2] / errs[0]);
    return 0;
}
