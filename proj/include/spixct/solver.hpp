#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "spixct/grid.hpp"

namespace spixct {

struct SolverConfig {
    int n_angles_full = 360;
    int max_outer_iters = 30;
    int cg_max_iters = 10;
    double cg_tolerance = 1e-2;    // relative residual of the inner solve
    double damping = 1e-6;         // diagonal shift relative to a J'J scale estimate
    double stop_tolerance = 1e-3;  // relative residual decrease threshold
    double tikhonov_weight = 0.0;  // optional; 0 keeps the plain functional
    bool backtracking = true;      // Armijo-style halving on the residual norm
    double backtracking_shrink = 0.5;
    int backtracking_max_halvings = 10;
    std::optional<ImageGrid> initial_guess;  // default: zero image
};

enum class Termination { converged, stagnated, max_iterations, diverged };

std::string to_string(Termination t);

struct SolveRecord {
    int iteration = 0;
    double residual_norm = 0.0;  // |Kf_k - g|_L2
    double error_l2 = 0.0;       // |f_k - f_true|_L2 when truth supplied, else NaN
    double error_rel = 0.0;      // error_l2 / |f_true|_L2, else NaN
    double step_norm = 0.0;      // |f_k - f_{k-1}|_L2
    int cg_iterations = 0;
    double wall_seconds = 0.0;
};

struct SolveReport {
    std::vector<SolveRecord> records;
    Termination termination = Termination::max_iterations;
};

/// Thrown when the residual goes non-finite; carries the partial report.
class SolveDiverged : public std::runtime_error {
  public:
    SolveDiverged(SolveReport report, ImageGrid iterate)
        : std::runtime_error("gauss_newton_reconstruct: residual became non-finite"),
          report_(std::move(report)),
          iterate_(std::move(iterate)) {}
    const SolveReport& report() const { return report_; }
    const ImageGrid& iterate() const { return iterate_; }

  private:
    SolveReport report_;
    ImageGrid iterate_;
};

/// Gauss-Newton for argmin_f |Kf - g|_L2: each step solves the damped normal
/// equations (J'J + damping) delta = -J'(Kf - g) by matrix-free conjugate
/// gradients with J = K'[f]. Iterates are masked to the support disk Omega.
std::pair<ImageGrid, SolveReport> gauss_newton_reconstruct(
    const ScalarField& data, const SolverConfig& config,
    const std::optional<ImageGrid>& truth = std::nullopt);

/// Kf - data and its weighted L2 norm.
std::pair<ScalarField, double> residual(const ImageGrid& f, const ScalarField& data,
                                        int n_angles_full);

}  // namespace spixct
