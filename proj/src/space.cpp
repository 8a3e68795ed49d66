#include "cutsv/space.hpp"

#include <functional>
#include <stdexcept>

#include "cutsv/quadrature.hpp"

namespace cutsv {

namespace {

std::vector<std::array<int, 2>> lattice_nodes(int k) {
    std::vector<std::array<int, 2>> nodes;
    nodes.push_back({0, 0});
    nodes.push_back({k, 0});
    nodes.push_back({0, k});
    for (int m = 1; m < k; ++m)
        nodes.push_back({m, 0}); // edge v0->v1
    for (int m = 1; m < k; ++m)
        nodes.push_back({k - m, m}); // edge v1->v2
    for (int m = 1; m < k; ++m)
        nodes.push_back({0, k - m}); // edge v2->v0
    for (int i = 1; i < k; ++i)
        for (int j = 1; i + j <= k - 1; ++j)
            nodes.push_back({i, j});
    return nodes;
}

std::vector<std::array<int, 2>> total_degree_monomials(int k) {
    std::vector<std::array<int, 2>> m;
    for (int d = 0; d <= k; ++d)
        for (int i = d; i >= 0; --i)
            m.push_back({i, d - i});
    return m;
}

struct CellMap {
    Vec2 v0;
    Eigen::Matrix2d jac, jinv;
};

CellMap cell_map(const CtMesh& mesh, int ct_cell) {
    const auto& tr = mesh.triangles.at(ct_cell);
    CellMap cm;
    cm.v0 = mesh.vertices[tr[0]];
    cm.jac.col(0) = mesh.vertices[tr[1]] - cm.v0;
    cm.jac.col(1) = mesh.vertices[tr[2]] - cm.v0;
    cm.jinv = cm.jac.inverse();
    return cm;
}

} // namespace

SvSpace build_space(const CtMesh& ct, const CutTopology& topo, int k) {
    if (k < 2)
        throw std::invalid_argument("build_space: k must be >= 2 for the cut SV pair");
    SvSpace sp;
    sp.k = k;
    sp.mesh = &ct;
    sp.topo = &topo;
    sp.n_loc = (k + 1) * (k + 2) / 2;
    sp.np_loc = k * (k + 1) / 2;
    sp.ref_nodes = lattice_nodes(k);
    sp.mono = total_degree_monomials(k);
    sp.pmono = total_degree_monomials(k - 1);

    Eigen::MatrixXd vand(sp.n_loc, sp.n_loc);
    for (int i = 0; i < sp.n_loc; ++i) {
        const double xi = double(sp.ref_nodes[i][0]) / k;
        const double eta = double(sp.ref_nodes[i][1]) / k;
        for (int m = 0; m < sp.n_loc; ++m)
            vand(i, m) = std::pow(xi, sp.mono[m][0]) * std::pow(eta, sp.mono[m][1]);
    }
    sp.ref_coeff = vand.inverse();

    // mark entities of active cells
    std::vector<bool> v_used(ct.vertices.size(), false), f_used(ct.faces.size(), false),
        c_used(ct.triangles.size(), false);
    for (int cell : topo.active_cells) {
        for (int v : ct.triangles[cell])
            v_used[v] = true;
        for (int f : ct.tri_faces[cell])
            f_used[f] = true;
        c_used[cell] = true;
    }

    sp.vertex_dof.assign(ct.vertices.size(), -1);
    sp.face_dof0.assign(ct.faces.size(), -1);
    sp.cell_dof0.assign(ct.triangles.size(), -1);
    int next = 0;
    for (size_t v = 0; v < ct.vertices.size(); ++v)
        if (v_used[v]) {
            sp.vertex_dof[v] = next++;
            sp.dof_point.push_back(ct.vertices[v]);
        }
    const int n_edge = k - 1;
    for (size_t f = 0; f < ct.faces.size(); ++f)
        if (f_used[f]) {
            sp.face_dof0[f] = next;
            const Vec2 lo = ct.vertices[ct.faces[f].v[0]], hi = ct.vertices[ct.faces[f].v[1]];
            for (int m = 1; m < k; ++m)
                sp.dof_point.push_back(lo + (double(m) / k) * (hi - lo));
            next += n_edge;
        }
    const int n_int = (k - 1) * (k - 2) / 2;
    if (n_int > 0) {
        for (size_t c = 0; c < ct.triangles.size(); ++c)
            if (c_used[c]) {
                sp.cell_dof0[c] = next;
                const auto& tr = ct.triangles[c];
                const Vec2 &a = ct.vertices[tr[0]], &b = ct.vertices[tr[1]],
                           &cc = ct.vertices[tr[2]];
                for (int i = 1; i < k; ++i)
                    for (int j = 1; i + j <= k - 1; ++j)
                        sp.dof_point.push_back(a + (double(i) / k) * (b - a) +
                                               (double(j) / k) * (cc - a));
                next += n_int;
            }
    }
    sp.n_scalar = next;
    sp.n_u = 2 * next;
    sp.n_p = sp.np_loc * static_cast<int>(topo.active_cells.size());

    // local -> global scalar dofs per active cell
    sp.cell_dofs_flat.resize(topo.active_cells.size() * sp.n_loc);
    for (size_t ai = 0; ai < topo.active_cells.size(); ++ai) {
        const int cell = topo.active_cells[ai];
        const auto& tr = ct.triangles[cell];
        int* dofs = sp.cell_dofs_flat.data() + ai * sp.n_loc;
        int loc = 0;
        for (int v = 0; v < 3; ++v)
            dofs[loc++] = sp.vertex_dof[tr[v]];
        for (int e = 0; e < 3; ++e) {
            const int f = ct.tri_faces[cell][e];
            const bool fwd = ct.faces[f].v[0] == tr[e];
            for (int m = 1; m < k; ++m)
                dofs[loc++] = sp.face_dof0[f] + (fwd ? m - 1 : k - 1 - m);
        }
        for (int i = 0; i < n_int; ++i)
            dofs[loc++] = sp.cell_dof0[cell] + i;
    }

    // orthonormal modal pressure basis per active cell
    sp.pressure_coeff.resize(topo.active_cells.size());
    sp.pcell_center.resize(topo.active_cells.size());
    sp.pcell_scale.resize(topo.active_cells.size());
    for (size_t ai = 0; ai < topo.active_cells.size(); ++ai) {
        const int cell = topo.active_cells[ai];
        const auto& tr = ct.triangles[cell];
        const Vec2 &a = ct.vertices[tr[0]], &b = ct.vertices[tr[1]], &c = ct.vertices[tr[2]];
        sp.pcell_center[ai] = (a + b + c) / 3.0;
        sp.pcell_scale[ai] = ct.tri_diameter(cell);
        const QuadRule q = triangle_rule(a, b, c, 2 * (k - 1));
        Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(sp.np_loc, sp.np_loc);
        Eigen::VectorXd mu(sp.np_loc);
        for (size_t ip = 0; ip < q.size(); ++ip) {
            const Vec2 z = (q.points[ip] - sp.pcell_center[ai]) / sp.pcell_scale[ai];
            for (int m = 0; m < sp.np_loc; ++m)
                mu(m) = std::pow(z.x(), sp.pmono[m][0]) * std::pow(z.y(), sp.pmono[m][1]);
            gram += q.weights[ip] * mu * mu.transpose();
        }
        Eigen::LLT<Eigen::MatrixXd> llt(gram);
        sp.pressure_coeff[ai] =
            llt.matrixL().solve(Eigen::MatrixXd::Identity(sp.np_loc, sp.np_loc)).transpose();
    }
    return sp;
}

Vec2 reference_coords(const SvSpace& sp, int ct_cell, const Vec2& x, double tol) {
    const CellMap cm = cell_map(*sp.mesh, ct_cell);
    const Vec2 xi = cm.jinv * (x - cm.v0);
    if (xi.x() < -tol || xi.y() < -tol || xi.x() + xi.y() > 1.0 + tol)
        throw std::invalid_argument("eval_basis: point outside cell");
    return xi;
}

void ref_basis(const SvSpace& sp, const Vec2& xi, Eigen::VectorXd* values,
               Eigen::MatrixXd* dref) {
    const int n = sp.n_loc;
    Eigen::VectorXd mono_v(n), mono_dx(n), mono_dy(n);
    // powers up to k
    std::vector<double> px(sp.k + 1, 1.0), py(sp.k + 1, 1.0);
    for (int i = 1; i <= sp.k; ++i) {
        px[i] = px[i - 1] * xi.x();
        py[i] = py[i - 1] * xi.y();
    }
    for (int m = 0; m < n; ++m) {
        const int a = sp.mono[m][0], b = sp.mono[m][1];
        mono_v(m) = px[a] * py[b];
        mono_dx(m) = a > 0 ? a * px[a - 1] * py[b] : 0.0;
        mono_dy(m) = b > 0 ? b * px[a] * py[b - 1] : 0.0;
    }
    if (values)
        *values = sp.ref_coeff.transpose() * mono_v;
    if (dref) {
        dref->resize(n, 2);
        dref->col(0) = sp.ref_coeff.transpose() * mono_dx;
        dref->col(1) = sp.ref_coeff.transpose() * mono_dy;
    }
}

Eigen::VectorXd eval_basis_values(const SvSpace& sp, int ct_cell, const Vec2& x) {
    Eigen::VectorXd v;
    ref_basis(sp, reference_coords(sp, ct_cell, x), &v, nullptr);
    return v;
}

Eigen::MatrixXd eval_basis_gradients(const SvSpace& sp, int ct_cell, const Vec2& x) {
    const CellMap cm = cell_map(*sp.mesh, ct_cell);
    Eigen::MatrixXd d;
    ref_basis(sp, reference_coords(sp, ct_cell, x), nullptr, &d);
    return d * cm.jinv; // row i: grad_x shape_i = (dref_i^T Jinv)
}

Poly2 physical_shape(const SvSpace& sp, int ct_cell, int local, const Vec2& origin) {
    const CellMap cm = cell_map(*sp.mesh, ct_cell);
    // xi = Jinv (x - v0), expanded around origin: x = origin + xhat
    const Vec2 xi0 = cm.jinv * (origin - cm.v0);
    Poly2 r(sp.k);
    for (int m = 0; m < sp.n_loc; ++m) {
        const double w = sp.ref_coeff(m, local);
        if (w == 0.0)
            continue;
        r.axpy(w, Poly2::affine_monomial(sp.mono[m][0], sp.mono[m][1], xi0.x(), cm.jinv(0, 0),
                                         cm.jinv(0, 1), xi0.y(), cm.jinv(1, 0), cm.jinv(1, 1)));
    }
    return r;
}

Poly2 physical_pressure_mode(const SvSpace& sp, int active_index, int mode,
                             const Vec2& origin) {
    const Vec2 c = sp.pcell_center[active_index];
    const double s = sp.pcell_scale[active_index];
    const Vec2 z0 = (origin - c) / s;
    Poly2 r(sp.k - 1);
    const Eigen::MatrixXd& P = sp.pressure_coeff[active_index];
    for (int m = 0; m < sp.np_loc; ++m) {
        if (P(m, mode) == 0.0)
            continue;
        r.axpy(P(m, mode), Poly2::affine_monomial(sp.pmono[m][0], sp.pmono[m][1], z0.x(),
                                                  1.0 / s, 0.0, z0.y(), 0.0, 1.0 / s));
    }
    return r;
}

Eigen::VectorXd pressure_mode_values(const SvSpace& sp, int active_index, const Vec2& x) {
    const Vec2 z = (x - sp.pcell_center[active_index]) / sp.pcell_scale[active_index];
    Eigen::VectorXd mu(sp.np_loc);
    for (int m = 0; m < sp.np_loc; ++m)
        mu(m) = std::pow(z.x(), sp.pmono[m][0]) * std::pow(z.y(), sp.pmono[m][1]);
    return sp.pressure_coeff[active_index].transpose() * mu;
}

namespace {

void check_face_interior(const SvSpace& sp, int face) {
    const Face& fc = sp.mesh->faces.at(face);
    if (fc.tri[1] < 0 || !sp.topo->is_active(fc.tri[0]) || !sp.topo->is_active(fc.tri[1]))
        throw std::invalid_argument("face_normal_jump: face is not interior to the active mesh");
}

} // namespace

Eigen::MatrixXd face_normal_jump_velocity(const SvSpace& sp, int face, int ell,
                                          const Eigen::VectorXd& u,
                                          const std::vector<Vec2>& points) {
    if (ell < 1 || ell > sp.k)
        throw std::invalid_argument("face_normal_jump: velocity order must be in [1,k]");
    check_face_interior(sp, face);
    const Face& fc = sp.mesh->faces[face];
    const Vec2 n = sp.mesh->face_normal(face);
    const Vec2 origin = sp.mesh->face_midpoint(face);
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(2, points.size());
    for (int side = 0; side < 2; ++side) {
        const int cell = fc.tri[side];
        const int ai = sp.topo->active_index[cell];
        const double sgn = side == 0 ? 1.0 : -1.0;
        const auto dofs = sp.cell_scalar_dofs(ai);
        for (int loc = 0; loc < sp.n_loc; ++loc) {
            const Poly2 dn = physical_shape(sp, cell, loc, origin).dirn(ell, n);
            for (int comp = 0; comp < 2; ++comp) {
                const double coef = u(2 * dofs[loc] + comp);
                if (coef == 0.0)
                    continue;
                for (size_t q = 0; q < points.size(); ++q)
                    out(comp, q) += sgn * coef * dn.eval(points[q] - origin);
            }
        }
    }
    return out;
}

Eigen::VectorXd face_normal_jump_pressure(const SvSpace& sp, int face, int ell,
                                          const Eigen::VectorXd& p,
                                          const std::vector<Vec2>& points) {
    if (ell < 0 || ell > sp.k - 1)
        throw std::invalid_argument("face_normal_jump: pressure order must be in [0,k-1]");
    check_face_interior(sp, face);
    const Face& fc = sp.mesh->faces[face];
    const Vec2 n = sp.mesh->face_normal(face);
    const Vec2 origin = sp.mesh->face_midpoint(face);
    Eigen::VectorXd out = Eigen::VectorXd::Zero(points.size());
    for (int side = 0; side < 2; ++side) {
        const int cell = fc.tri[side];
        const int ai = sp.topo->active_index[cell];
        const double sgn = side == 0 ? 1.0 : -1.0;
        for (int mode = 0; mode < sp.np_loc; ++mode) {
            const double coef = p(sp.pressure_dof0(ai) + mode);
            if (coef == 0.0)
                continue;
            const Poly2 dn = physical_pressure_mode(sp, ai, mode, origin).dirn(ell, n);
            for (size_t q = 0; q < points.size(); ++q)
                out(q) += sgn * coef * dn.eval(points[q] - origin);
        }
    }
    return out;
}

Vec2 velocity_value(const SvSpace& sp, const Eigen::VectorXd& u, int ct_cell, const Vec2& x) {
    const int ai = sp.topo->active_index[ct_cell];
    const Eigen::VectorXd vals = eval_basis_values(sp, ct_cell, x);
    const auto dofs = sp.cell_scalar_dofs(ai);
    Vec2 r = Vec2::Zero();
    for (int loc = 0; loc < sp.n_loc; ++loc)
        for (int comp = 0; comp < 2; ++comp)
            r[comp] += u(2 * dofs[loc] + comp) * vals(loc);
    return r;
}

Eigen::Matrix2d velocity_gradient(const SvSpace& sp, const Eigen::VectorXd& u, int ct_cell,
                                  const Vec2& x) {
    const int ai = sp.topo->active_index[ct_cell];
    const Eigen::MatrixXd g = eval_basis_gradients(sp, ct_cell, x);
    const auto dofs = sp.cell_scalar_dofs(ai);
    Eigen::Matrix2d r = Eigen::Matrix2d::Zero();
    for (int loc = 0; loc < sp.n_loc; ++loc)
        for (int comp = 0; comp < 2; ++comp)
            r.row(comp) += u(2 * dofs[loc] + comp) * g.row(loc);
    return r;
}

double velocity_divergence(const SvSpace& sp, const Eigen::VectorXd& u, int ct_cell,
                           const Vec2& x) {
    const Eigen::Matrix2d g = velocity_gradient(sp, u, ct_cell, x);
    return g(0, 0) + g(1, 1);
}

double pressure_value(const SvSpace& sp, const Eigen::VectorXd& p, int ct_cell, const Vec2& x) {
    const int ai = sp.topo->active_index[ct_cell];
    const Eigen::VectorXd vals = pressure_mode_values(sp, ai, x);
    double r = 0;
    for (int mode = 0; mode < sp.np_loc; ++mode)
        r += p(sp.pressure_dof0(ai) + mode) * vals(mode);
    return r;
}

Eigen::VectorXd interpolate_velocity(const SvSpace& sp,
                                     const std::function<Vec2(const Vec2&)>& f) {
    Eigen::VectorXd u(sp.n_u);
    for (int i = 0; i < sp.n_scalar; ++i) {
        const Vec2 v = f(sp.dof_point[i]);
        u(2 * i) = v.x();
        u(2 * i + 1) = v.y();
    }
    return u;
}

Eigen::VectorXd project_pressure(const SvSpace& sp,
                                 const std::function<double(const Vec2&)>& f) {
    Eigen::VectorXd p = Eigen::VectorXd::Zero(sp.n_p);
    const CtMesh& ct = *sp.mesh;
    for (size_t ai = 0; ai < sp.topo->active_cells.size(); ++ai) {
        const int cell = sp.topo->active_cells[ai];
        const auto& tr = ct.triangles[cell];
        const QuadRule q = triangle_rule(ct.vertices[tr[0]], ct.vertices[tr[1]],
                                         ct.vertices[tr[2]], 2 * sp.k + 2);
        for (size_t ip = 0; ip < q.size(); ++ip) {
            const Eigen::VectorXd vals = pressure_mode_values(sp, static_cast<int>(ai),
                                                              q.points[ip]);
            p.segment(sp.pressure_dof0(static_cast<int>(ai)), sp.np_loc) +=
                q.weights[ip] * f(q.points[ip]) * vals;
        }
    }
    return p;
}

} // namespace cutsv
