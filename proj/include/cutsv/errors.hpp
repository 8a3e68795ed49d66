#pragma once

#include <functional>

#include "cutsv/space.hpp"

namespace cutsv {

/// Exact (u, p) pair with derived fields; f = -lap(u) + grad(p), g = u|_Gamma.
struct ManufacturedSolution {
    std::function<Vec2(const Vec2&)> u;
    std::function<Eigen::Matrix2d(const Vec2&)> grad_u; // (i,j) = d u_i / d x_j
    std::function<Vec2(const Vec2&)> laplace_u;
    std::function<double(const Vec2&)> p;
    std::function<Vec2(const Vec2&)> grad_p;
    std::function<Vec2(const Vec2&)> f;
    std::function<Vec2(const Vec2&)> g;
};

/// The vortex/quartic-pressure pair used by the convergence study:
/// u = 2((x-1/2)^2 + (y-1/2)^2 - 1/4) (2y-1, -(2x-1)), p = 1e4 (x^2-y^2)^2.
ManufacturedSolution make_vortex_solution();

struct ErrorReport {
    double err_h1_u = 0;          // |u - u_h|_{H^1(Omega)}
    double err_l2_p = 0;          // min_c ||(p+c) - p_h||_{L^2(Omega)}
    double err_div = 0;           // ||div u_h||_{L^2(Omega)}
    double err_div_interior = 0;  // max_K ||div u_h||_{L^2(K)} over the strip complement
    double div_interior_global = 0;
    double div_strip = 0;         // ||div u_h||_{L^2(Omega intersect strip)}
    double flux = 0;              // integral of u_h . n over the interior-domain boundary
    int n_u = 0, n_p = 0;
};

ErrorReport compute_errors(const SvSpace& sp, const RuleSet& rules, const Eigen::VectorXd& u,
                           const Eigen::VectorXd& p, const ManufacturedSolution& exact);

/// (max elementwise L2 norm, global interior L2 norm) of div u_h over the
/// strip complement, with exact full-cell quadrature.
std::pair<double, double> check_interior_divfree(const SvSpace& sp, const Eigen::VectorXd& u);

/// Boundary flux of u_h across the boundary of the interior macro domain.
double interior_boundary_flux(const SvSpace& sp, const Eigen::VectorXd& u);

/// rates[i] = log2(e[i-1]/e[i]); rates[0] is NaN (no predecessor).
std::vector<double> compute_eoc(const std::vector<double>& errors);

} // namespace cutsv
