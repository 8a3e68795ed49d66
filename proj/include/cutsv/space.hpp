#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "cutsv/geometry.hpp"
#include "cutsv/mesh.hpp"
#include "cutsv/poly.hpp"

namespace cutsv {

/// Cut Scott-Vogelius pair on the active CT mesh: continuous vector P_k
/// Lagrange velocity, discontinuous orthonormal-modal P_{k-1} pressure per
/// cell. Velocity scalar dofs are numbered vertices, then faces, then cell
/// interiors (ascending entity id); vector dof = 2*scalar + component.
/// Pressure dofs are blocked per active cell.
struct SvSpace {
    int k = 2;
    const CtMesh* mesh = nullptr;
    const CutTopology* topo = nullptr;

    int n_scalar = 0, n_u = 0, n_p = 0;
    int n_loc = 0;   // scalar Lagrange shapes per cell
    int np_loc = 0;  // pressure modes per cell

    // reference Lagrange basis: shape_j = sum_m ref_coeff(m,j) xi^mono[m][0] eta^mono[m][1]
    std::vector<std::array<int, 2>> ref_nodes; // lattice coordinates, i+j <= k
    std::vector<std::array<int, 2>> mono;
    Eigen::MatrixXd ref_coeff;

    std::vector<int> vertex_dof;
    std::vector<int> face_dof0;
    std::vector<int> cell_dof0;
    std::vector<Vec2> dof_point; // per scalar dof
    std::vector<int> cell_dofs_flat; // [active][n_loc]

    // pressure monomial exponents and per-cell orthonormalization
    std::vector<std::array<int, 2>> pmono;
    std::vector<Eigen::MatrixXd> pressure_coeff; // mode_i = sum_m P(m,i) mu_m
    std::vector<Vec2> pcell_center;
    std::vector<double> pcell_scale;

    std::span<const int> cell_scalar_dofs(int active_index) const {
        return {cell_dofs_flat.data() + static_cast<size_t>(active_index) * n_loc,
                static_cast<size_t>(n_loc)};
    }
    int pressure_dof0(int active_index) const { return np_loc * active_index; }
};

/// k >= 2 is required for inf-sup stability of the pair.
SvSpace build_space(const CtMesh& ct, const CutTopology& topo, int k);

/// Reference coordinates of x in cell; throws if x is outside (beyond tol).
Vec2 reference_coords(const SvSpace& sp, int ct_cell, const Vec2& x, double tol = 1e-10);

/// Scalar shape values at x in the given cell (n_loc).
Eigen::VectorXd eval_basis_values(const SvSpace& sp, int ct_cell, const Vec2& x);
/// Scalar shape gradients at x (n_loc x 2).
Eigen::MatrixXd eval_basis_gradients(const SvSpace& sp, int ct_cell, const Vec2& x);

/// Shape values/gradients at a reference point (no containment check).
void ref_basis(const SvSpace& sp, const Vec2& xi, Eigen::VectorXd* values,
               Eigen::MatrixXd* dref);

/// Local scalar shape as a polynomial in physical coordinates relative to
/// origin (evaluate at x - origin). A nearby origin keeps the monomial
/// representation well conditioned.
Poly2 physical_shape(const SvSpace& sp, int ct_cell, int local,
                     const Vec2& origin = Vec2::Zero());
/// Pressure mode as a polynomial in physical coordinates relative to origin.
Poly2 physical_pressure_mode(const SvSpace& sp, int active_index, int mode,
                             const Vec2& origin = Vec2::Zero());

/// Pressure mode values at x (np_loc).
Eigen::VectorXd pressure_mode_values(const SvSpace& sp, int active_index, const Vec2& x);

/// Jump of the order-ell normal derivative across an interior face of the
/// active mesh, evaluated at the given points; sign follows the stored face
/// normal (out of the lower-indexed cell). Velocity: 1 <= ell <= k, result
/// 2 x n. Pressure: 0 <= ell <= k-1, result 1 x n.
Eigen::MatrixXd face_normal_jump_velocity(const SvSpace& sp, int face, int ell,
                                          const Eigen::VectorXd& u,
                                          const std::vector<Vec2>& points);
Eigen::VectorXd face_normal_jump_pressure(const SvSpace& sp, int face, int ell,
                                          const Eigen::VectorXd& p,
                                          const std::vector<Vec2>& points);

// field evaluation on a cell
Vec2 velocity_value(const SvSpace& sp, const Eigen::VectorXd& u, int ct_cell, const Vec2& x);
Eigen::Matrix2d velocity_gradient(const SvSpace& sp, const Eigen::VectorXd& u, int ct_cell,
                                  const Vec2& x); // (i,j) = d u_i / d x_j
double velocity_divergence(const SvSpace& sp, const Eigen::VectorXd& u, int ct_cell,
                           const Vec2& x);
double pressure_value(const SvSpace& sp, const Eigen::VectorXd& p, int ct_cell, const Vec2& x);

/// Nodal interpolant of a smooth vector field (length n_u).
Eigen::VectorXd interpolate_velocity(const SvSpace& sp,
                                     const std::function<Vec2(const Vec2&)>& f);
/// Cellwise L2 projection of a scalar field onto the pressure space (length n_p).
Eigen::VectorXd project_pressure(const SvSpace& sp,
                                 const std::function<double(const Vec2&)>& f);

} // namespace cutsv
