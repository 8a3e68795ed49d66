#pragma once

#include <functional>

#include <Eigen/Sparse>

#include "cutsv/geometry.hpp"
#include "cutsv/space.hpp"

namespace cutsv {

using SpMat = Eigen::SparseMatrix<double>;
using VectorField = std::function<Vec2(const Vec2&)>;

struct MethodParams {
    double gamma = 0.0; // grad-div parameter
    double eta = 100.0; // Nitsche penalty
    int k = 2;
};

/// Assembled blocks of the method. Velocity pieces are kept separate so a
/// gamma/eta sweep recomposes without reassembly; the 1/(1+gamma) scaling of
/// J is applied at solve time only.
struct AssembledSystem {
    int n_u = 0, n_p = 0;

    SpMat A_grad;    // (grad u, grad v) over the cut domain
    SpMat A_graddiv; // (div u, div v), unscaled
    SpMat A_nitsche; // -int_Gamma (dn u . v + dn v . u)
    SpMat A_penalty; // sum_K h_K^-1 int_{K_Gamma} u.v, unscaled
    SpMat A_vghost;  // velocity ghost penalty, orders 1..k

    SpMat B; // n_p x n_u, b(q, v)
    SpMat J; // pressure ghost penalty, orders 0..k-1, unscaled

    Eigen::VectorXd m;  // mean-constraint row: integrals of pressure modes over the interior domain
    Eigen::VectorXd F0; // f-volume plus Nitsche-consistency boundary data
    Eigen::VectorXd Fp; // boundary penalty data part, scaled by eta at compose time
    Eigen::VectorXd G;  // continuity right-hand side

    SpMat A(const MethodParams& p) const {
        return A_grad + p.gamma * A_graddiv + A_nitsche + A_vghost + p.eta * A_penalty;
    }
    Eigen::VectorXd F(const MethodParams& p) const { return F0 + p.eta * Fp; }
    /// Matrix of the mesh-dependent norm ||.||_{V0h}^2 = |.|_H1^2 + eta j_h + bold j_h.
    SpMat v0h_norm(const MethodParams& p) const {
        return A_grad + p.eta * A_penalty + A_vghost;
    }
    SpMat vh_norm(const MethodParams& p) const { return v0h_norm(p) + p.gamma * A_graddiv; }
};

struct VelocityForms {
    SpMat grad, graddiv, nitsche, penalty, vghost;
};

VelocityForms assemble_a(const SvSpace& sp, const RuleSet& rules);
SpMat assemble_b(const SvSpace& sp, const RuleSet& rules);
/// Pressure ghost penalty sum_F sum_l w_l h_F^{2l+1} int_F [dn^l q][dn^l p].
/// order_weights[l] scales the order-l term; empty means all ones.
SpMat assemble_J(const SvSpace& sp, const std::vector<double>& order_weights = {});
/// Method default for the pressure ghost: the full derivative stack scaled
/// by a small stabilization constant. Keeps the inf-sup constant uniform in
/// the cut position while not flooding the continuity equation with jump
/// consistency error from steep pressures.
std::vector<double> default_pressure_ghost_weights(int k);
Eigen::VectorXd assemble_mean_row(const SvSpace& sp);
/// Returns (F0, Fp, G); F = F0 + eta*Fp.
void assemble_rhs(const SvSpace& sp, const RuleSet& rules, const VectorField& f,
                  const VectorField& g, Eigen::VectorXd& F0, Eigen::VectorXd& Fp,
                  Eigen::VectorXd& G);

/// jweights empty selects default_pressure_ghost_weights(sp.k).
AssembledSystem assemble_system(const SvSpace& sp, const RuleSet& rules, const VectorField& f,
                                const VectorField& g,
                                const std::vector<double>& jweights = {});

/// Pressure mass matrix over the physical domain (cut quadrature).
SpMat assemble_pressure_mass(const SvSpace& sp, const RuleSet& rules);

/// Matrix Market coordinate-format export.
void write_matrix_market(const SpMat& mat, const std::string& path);

} // namespace cutsv
