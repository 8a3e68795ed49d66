#pragma once

#include <string>

#include "cutsv/assembly.hpp"

namespace cutsv {

struct SolveOptions {
    enum class Engine { Auto, Direct, SchurCg };
    Engine engine = Engine::Auto;
    double rtol = 1e-10;
    int direct_max_unknowns = 20000; // Auto switches to SchurCg above this
    int max_cg_iterations = 20000;
};

struct SaddleSolution {
    Eigen::VectorXd u, p;
    double lambda = 0;
    double res_momentum = 0;   // relative to ||[F;G]||
    double res_continuity = 0;
    double res_constraint = 0;
    double pressure_mean = 0;  // integral of p_h over the interior macro domain
    std::string engine;
    int iterations = 0; // CG iterations, 0 for the direct engine
};

/// Solve [[A, B^T, 0], [B, -J/(1+gamma), m], [0, m^T, 0]] [u; p; lambda] = [F; G; 0].
SaddleSolution solve(const AssembledSystem& sys, const MethodParams& params,
                     const SolveOptions& opts = {});

struct InfSupEstimate {
    double theta = 0;      // sqrt of the smallest generalized eigenvalue
    int iterations = 0;
    bool converged = false;
    int kernel_dim = 0;    // detected kernel of B^T on mean-zero pressures
};

/// Inverse iteration on the pressure Schur complement of the gamma=0 system:
/// smallest eigenvalue of (B A0^-1 B^T + J) q = lambda M q on m^T q = 0, with
/// M the pressure mass over the physical domain. params.gamma is forced to 0.
InfSupEstimate estimate_infsup(const AssembledSystem& sys, const SvSpace& sp,
                               const RuleSet& rules, const MethodParams& params,
                               double tol = 1e-6, int maxit = 3000);

} // namespace cutsv
