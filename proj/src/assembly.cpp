#include "cutsv/assembly.hpp"

#include <fstream>
#include <stdexcept>

namespace cutsv {

namespace {

using Trips = std::vector<Eigen::Triplet<double>>;

void add_sym(Trips& t, const std::vector<int>& rows, const Eigen::MatrixXd& local) {
    const int n = static_cast<int>(rows.size());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            t.emplace_back(rows[i], rows[j], local(i, j));
}

struct CellGeom {
    Eigen::Matrix2d jinv;
    Vec2 v0;
    double diam;
};

CellGeom cell_geom(const CtMesh& ct, int cell) {
    const auto& tr = ct.triangles[cell];
    CellGeom g;
    g.v0 = ct.vertices[tr[0]];
    Eigen::Matrix2d jac;
    jac.col(0) = ct.vertices[tr[1]] - g.v0;
    jac.col(1) = ct.vertices[tr[2]] - g.v0;
    g.jinv = jac.inverse();
    g.diam = ct.tri_diameter(cell);
    return g;
}

/// values (n_q x n_loc) and physical gradients (n_q x n_loc x 2, flattened per
/// component) of the scalar shapes at the given physical points.
void basis_at_points(const SvSpace& sp, const CellGeom& g, const std::vector<Vec2>& pts,
                     Eigen::MatrixXd& vals, Eigen::MatrixXd& gx, Eigen::MatrixXd& gy) {
    const int nq = static_cast<int>(pts.size());
    vals.resize(nq, sp.n_loc);
    gx.resize(nq, sp.n_loc);
    gy.resize(nq, sp.n_loc);
    Eigen::VectorXd v;
    Eigen::MatrixXd d;
    for (int q = 0; q < nq; ++q) {
        const Vec2 xi = g.jinv * (pts[q] - g.v0);
        ref_basis(sp, xi, &v, &d);
        const Eigen::MatrixXd dp = d * g.jinv;
        vals.row(q) = v.transpose();
        gx.row(q) = dp.col(0).transpose();
        gy.row(q) = dp.col(1).transpose();
    }
}

std::vector<int> velocity_dofs(const SvSpace& sp, int ai) {
    const auto sd = sp.cell_scalar_dofs(ai);
    std::vector<int> dofs(2 * sp.n_loc);
    for (int i = 0; i < sp.n_loc; ++i) {
        dofs[i] = 2 * sd[i];                // component 0 block
        dofs[sp.n_loc + i] = 2 * sd[i] + 1; // component 1 block
    }
    return dofs;
}

} // namespace

VelocityForms assemble_a(const SvSpace& sp, const RuleSet& rules) {
    const CtMesh& ct = *sp.mesh;
    const CutTopology& topo = *sp.topo;
    const int n_loc = sp.n_loc, k = sp.k;
    Trips t_grad, t_gd, t_nit, t_pen, t_gh;

    Eigen::MatrixXd vals, gx, gy;
    for (size_t ai = 0; ai < topo.active_cells.size(); ++ai) {
        const int cell = topo.active_cells[ai];
        const QuadRule vol = rules.volume(ct, topo, cell);
        const CellGeom g = cell_geom(ct, cell);
        std::vector<int> vdofs = velocity_dofs(sp, static_cast<int>(ai));

        if (!vol.empty()) {
            basis_at_points(sp, g, vol.points, vals, gx, gy);
            Eigen::MatrixXd stiff = Eigen::MatrixXd::Zero(n_loc, n_loc);
            Eigen::MatrixXd gd = Eigen::MatrixXd::Zero(2 * n_loc, 2 * n_loc);
            Eigen::VectorXd dv(2 * n_loc);
            for (size_t q = 0; q < vol.size(); ++q) {
                const double w = vol.weights[q];
                // outer products materialized before scaling so the local
                // matrices stay bitwise symmetric
                const Eigen::MatrixXd s1 = gx.row(q).transpose() * gx.row(q);
                const Eigen::MatrixXd s2 = gy.row(q).transpose() * gy.row(q);
                stiff += w * s1;
                stiff += w * s2;
                dv.head(n_loc) = gx.row(q).transpose(); // div contribution of comp 0
                dv.tail(n_loc) = gy.row(q).transpose(); // and comp 1
                const Eigen::MatrixXd dd = dv * dv.transpose();
                gd += w * dd;
            }
            // per-component stiffness
            std::vector<int> d0(n_loc), d1(n_loc);
            for (int i = 0; i < n_loc; ++i) {
                d0[i] = vdofs[i];
                d1[i] = vdofs[n_loc + i];
            }
            add_sym(t_grad, d0, stiff);
            add_sym(t_grad, d1, stiff);
            add_sym(t_gd, vdofs, gd);
        }

        const QuadRule* arc = rules.interface(topo, cell);
        if (arc) {
            basis_at_points(sp, g, arc->points, vals, gx, gy);
            Eigen::MatrixXd nit = Eigen::MatrixXd::Zero(n_loc, n_loc);
            Eigen::MatrixXd pen = Eigen::MatrixXd::Zero(n_loc, n_loc);
            for (size_t q = 0; q < arc->size(); ++q) {
                const double w = arc->weights[q];
                const Vec2 n = arc->normals[q];
                const Eigen::VectorXd dn =
                    n.x() * gx.row(q).transpose() + n.y() * gy.row(q).transpose();
                const Eigen::VectorXd ph = vals.row(q).transpose();
                const Eigen::MatrixXd cons = dn * ph.transpose() + ph * dn.transpose();
                const Eigen::MatrixXd mass = ph * ph.transpose();
                nit -= w * cons;
                pen += (w / g.diam) * mass;
            }
            std::vector<int> d0(n_loc), d1(n_loc);
            for (int i = 0; i < n_loc; ++i) {
                d0[i] = vdofs[i];
                d1[i] = vdofs[n_loc + i];
            }
            add_sym(t_nit, d0, nit);
            add_sym(t_nit, d1, nit);
            add_sym(t_pen, d0, pen);
            add_sym(t_pen, d1, pen);
        }
    }

    // velocity ghost penalty on faces of cut-parent cells
    for (int f : topo.ghost_faces) {
        const Face& fc = ct.faces[f];
        const double hf = ct.face_length(f);
        const Vec2 n = ct.face_normal(f);
        const QuadRule line = segment_rule(ct.vertices[fc.v[0]], ct.vertices[fc.v[1]], k + 1);
        const int nq = static_cast<int>(line.size());

        // trace of order-l normal derivatives of both cells' shapes
        std::vector<int> dofs2(2 * n_loc);
        for (int side = 0; side < 2; ++side) {
            const auto sd = sp.cell_scalar_dofs(topo.active_index[fc.tri[side]]);
            for (int i = 0; i < n_loc; ++i)
                dofs2[side * n_loc + i] = sd[i];
        }
        const Vec2 origin = ct.face_midpoint(f);
        Eigen::MatrixXd local = Eigen::MatrixXd::Zero(2 * n_loc, 2 * n_loc);
        for (int ell = 1; ell <= k; ++ell) {
            Eigen::MatrixXd jmp(2 * n_loc, nq);
            for (int side = 0; side < 2; ++side) {
                const double sgn = side == 0 ? 1.0 : -1.0;
                for (int loc = 0; loc < n_loc; ++loc) {
                    const Poly2 dpoly =
                        physical_shape(sp, fc.tri[side], loc, origin).dirn(ell, n);
                    for (int q = 0; q < nq; ++q)
                        jmp(side * n_loc + loc, q) = sgn * dpoly.eval(line.points[q] - origin);
                }
            }
            const double scale = std::pow(hf, 2 * ell - 1);
            for (int q = 0; q < nq; ++q) {
                const Eigen::MatrixXd outer = jmp.col(q) * jmp.col(q).transpose();
                local += (scale * line.weights[q]) * outer;
            }
        }
        // the two cells share entities, so dofs2 contains duplicates;
        // condense and mirror so the global matrix stays bitwise symmetric
        std::vector<int> uniq, where(2 * n_loc);
        for (int a = 0; a < 2 * n_loc; ++a) {
            const auto it = std::find(uniq.begin(), uniq.end(), dofs2[a]);
            where[a] = static_cast<int>(it - uniq.begin());
            if (it == uniq.end())
                uniq.push_back(dofs2[a]);
        }
        Eigen::MatrixXd cond =
            Eigen::MatrixXd::Zero(static_cast<int>(uniq.size()), static_cast<int>(uniq.size()));
        for (int a = 0; a < 2 * n_loc; ++a)
            for (int b = 0; b < 2 * n_loc; ++b)
                cond(where[a], where[b]) += local(a, b);
        for (int i = 0; i < cond.rows(); ++i)
            for (int j = i + 1; j < cond.cols(); ++j)
                cond(j, i) = cond(i, j);
        std::vector<int> d0(uniq.size()), d1(uniq.size());
        for (size_t i = 0; i < uniq.size(); ++i) {
            d0[i] = 2 * uniq[i];
            d1[i] = 2 * uniq[i] + 1;
        }
        add_sym(t_gh, d0, cond);
        add_sym(t_gh, d1, cond);
    }

    VelocityForms out;
    auto build = [&](Trips& t) {
        SpMat mat(sp.n_u, sp.n_u);
        mat.setFromTriplets(t.begin(), t.end());
        return mat;
    };
    out.grad = build(t_grad);
    out.graddiv = build(t_gd);
    out.nitsche = build(t_nit);
    out.penalty = build(t_pen);
    out.vghost = build(t_gh);
    return out;
}

SpMat assemble_b(const SvSpace& sp, const RuleSet& rules) {
    const CtMesh& ct = *sp.mesh;
    const CutTopology& topo = *sp.topo;
    const int n_loc = sp.n_loc, np = sp.np_loc;
    Trips trips;
    Eigen::MatrixXd vals, gx, gy;
    for (size_t ai = 0; ai < topo.active_cells.size(); ++ai) {
        const int cell = topo.active_cells[ai];
        const CellGeom g = cell_geom(ct, cell);
        const std::vector<int> vdofs = velocity_dofs(sp, static_cast<int>(ai));
        const int p0 = sp.pressure_dof0(static_cast<int>(ai));
        Eigen::MatrixXd local = Eigen::MatrixXd::Zero(np, 2 * n_loc);

        const QuadRule vol = rules.volume(ct, topo, cell);
        if (!vol.empty()) {
            basis_at_points(sp, g, vol.points, vals, gx, gy);
            for (size_t q = 0; q < vol.size(); ++q) {
                const Eigen::VectorXd psi =
                    pressure_mode_values(sp, static_cast<int>(ai), vol.points[q]);
                Eigen::VectorXd dv(2 * n_loc);
                dv.head(n_loc) = gx.row(q).transpose();
                dv.tail(n_loc) = gy.row(q).transpose();
                local -= vol.weights[q] * psi * dv.transpose();
            }
        }
        const QuadRule* arc = rules.interface(topo, cell);
        if (arc) {
            basis_at_points(sp, g, arc->points, vals, gx, gy);
            for (size_t q = 0; q < arc->size(); ++q) {
                const Eigen::VectorXd psi =
                    pressure_mode_values(sp, static_cast<int>(ai), arc->points[q]);
                Eigen::VectorXd vn(2 * n_loc);
                vn.head(n_loc) = arc->normals[q].x() * vals.row(q).transpose();
                vn.tail(n_loc) = arc->normals[q].y() * vals.row(q).transpose();
                local += arc->weights[q] * psi * vn.transpose();
            }
        }
        if (local.cwiseAbs().maxCoeff() == 0.0)
            continue;
        for (int i = 0; i < np; ++i)
            for (int j = 0; j < 2 * n_loc; ++j)
                trips.emplace_back(p0 + i, vdofs[j], local(i, j));
    }
    SpMat B(sp.n_p, sp.n_u);
    B.setFromTriplets(trips.begin(), trips.end());
    return B;
}

SpMat assemble_J(const SvSpace& sp, const std::vector<double>& order_weights) {
    const CtMesh& ct = *sp.mesh;
    const CutTopology& topo = *sp.topo;
    const int np = sp.np_loc, k = sp.k;
    auto weight = [&](int ell) {
        if (order_weights.empty())
            return 1.0;
        return ell < static_cast<int>(order_weights.size()) ? order_weights[ell] : 0.0;
    };
    Trips trips;
    for (int f : topo.ghost_faces) {
        const Face& fc = ct.faces[f];
        const double hf = ct.face_length(f);
        const Vec2 n = ct.face_normal(f);
        const QuadRule line = segment_rule(ct.vertices[fc.v[0]], ct.vertices[fc.v[1]], k + 1);
        const int nq = static_cast<int>(line.size());
        std::vector<int> dofs(2 * np);
        const int ai0 = topo.active_index[fc.tri[0]], ai1 = topo.active_index[fc.tri[1]];
        for (int i = 0; i < np; ++i) {
            dofs[i] = sp.pressure_dof0(ai0) + i;
            dofs[np + i] = sp.pressure_dof0(ai1) + i;
        }
        const Vec2 origin = ct.face_midpoint(f);
        Eigen::MatrixXd local = Eigen::MatrixXd::Zero(2 * np, 2 * np);
        for (int ell = 0; ell <= k - 1; ++ell) {
            if (weight(ell) == 0.0)
                continue;
            Eigen::MatrixXd jmp(2 * np, nq);
            for (int side = 0; side < 2; ++side) {
                const int ai = side == 0 ? ai0 : ai1;
                const double sgn = side == 0 ? 1.0 : -1.0;
                for (int mode = 0; mode < np; ++mode) {
                    const Poly2 dpoly =
                        physical_pressure_mode(sp, ai, mode, origin).dirn(ell, n);
                    for (int q = 0; q < nq; ++q)
                        jmp(side * np + mode, q) = sgn * dpoly.eval(line.points[q] - origin);
                }
            }
            const double scale = weight(ell) * std::pow(hf, 2 * ell + 1);
            for (int q = 0; q < nq; ++q) {
                const Eigen::MatrixXd outer = jmp.col(q) * jmp.col(q).transpose();
                local += (scale * line.weights[q]) * outer;
            }
        }
        add_sym(trips, dofs, local);
    }
    SpMat J(sp.n_p, sp.n_p);
    J.setFromTriplets(trips.begin(), trips.end());
    return J;
}

Eigen::VectorXd assemble_mean_row(const SvSpace& sp) {
    const CtMesh& ct = *sp.mesh;
    const CutTopology& topo = *sp.topo;
    Eigen::VectorXd m = Eigen::VectorXd::Zero(sp.n_p);
    for (size_t ai = 0; ai < topo.active_cells.size(); ++ai) {
        const int cell = topo.active_cells[ai];
        if (topo.ct_class[cell] != CellClass::Interior)
            continue;
        const auto& tr = ct.triangles[cell];
        const QuadRule q = triangle_rule(ct.vertices[tr[0]], ct.vertices[tr[1]],
                                         ct.vertices[tr[2]], sp.k);
        for (size_t ip = 0; ip < q.size(); ++ip)
            m.segment(sp.pressure_dof0(static_cast<int>(ai)), sp.np_loc) +=
                q.weights[ip] * pressure_mode_values(sp, static_cast<int>(ai), q.points[ip]);
    }
    return m;
}

void assemble_rhs(const SvSpace& sp, const RuleSet& rules, const VectorField& f,
                  const VectorField& g, Eigen::VectorXd& F0, Eigen::VectorXd& Fp,
                  Eigen::VectorXd& G) {
    const CtMesh& ct = *sp.mesh;
    const CutTopology& topo = *sp.topo;
    const int n_loc = sp.n_loc;
    F0 = Eigen::VectorXd::Zero(sp.n_u);
    Fp = Eigen::VectorXd::Zero(sp.n_u);
    G = Eigen::VectorXd::Zero(sp.n_p);
    Eigen::MatrixXd vals, gx, gy;
    for (size_t ai = 0; ai < topo.active_cells.size(); ++ai) {
        const int cell = topo.active_cells[ai];
        const CellGeom geo = cell_geom(ct, cell);
        const auto sd = sp.cell_scalar_dofs(static_cast<int>(ai));

        const QuadRule vol = rules.volume(ct, topo, cell);
        if (!vol.empty()) {
            basis_at_points(sp, geo, vol.points, vals, gx, gy);
            for (size_t q = 0; q < vol.size(); ++q) {
                const Vec2 fv = f(vol.points[q]);
                const double w = vol.weights[q];
                for (int i = 0; i < n_loc; ++i) {
                    F0(2 * sd[i]) += w * fv.x() * vals(q, i);
                    F0(2 * sd[i] + 1) += w * fv.y() * vals(q, i);
                }
            }
        }
        const QuadRule* arc = rules.interface(topo, cell);
        if (arc) {
            basis_at_points(sp, geo, arc->points, vals, gx, gy);
            for (size_t q = 0; q < arc->size(); ++q) {
                const double w = arc->weights[q];
                const Vec2 n = arc->normals[q];
                const Vec2 gv = g(arc->points[q]);
                const Eigen::VectorXd psi =
                    pressure_mode_values(sp, static_cast<int>(ai), arc->points[q]);
                G.segment(sp.pressure_dof0(static_cast<int>(ai)), sp.np_loc) +=
                    w * gv.dot(n) * psi;
                for (int i = 0; i < n_loc; ++i) {
                    const double dn = n.x() * gx(q, i) + n.y() * gy(q, i);
                    F0(2 * sd[i]) -= w * dn * gv.x();
                    F0(2 * sd[i] + 1) -= w * dn * gv.y();
                    Fp(2 * sd[i]) += (w / geo.diam) * gv.x() * vals(q, i);
                    Fp(2 * sd[i] + 1) += (w / geo.diam) * gv.y() * vals(q, i);
                }
            }
        }
    }
}

std::vector<double> default_pressure_ghost_weights(int k) {
    // calibrated once against the reference convergence study; see README
    return std::vector<double>(k, 0.011);
}

AssembledSystem assemble_system(const SvSpace& sp, const RuleSet& rules, const VectorField& f,
                                const VectorField& g, const std::vector<double>& jweights) {
    AssembledSystem sys;
    sys.n_u = sp.n_u;
    sys.n_p = sp.n_p;
    VelocityForms a = assemble_a(sp, rules);
    sys.A_grad = std::move(a.grad);
    sys.A_graddiv = std::move(a.graddiv);
    sys.A_nitsche = std::move(a.nitsche);
    sys.A_penalty = std::move(a.penalty);
    sys.A_vghost = std::move(a.vghost);
    sys.B = assemble_b(sp, rules);
    sys.J = assemble_J(sp, jweights.empty() ? default_pressure_ghost_weights(sp.k) : jweights);
    sys.m = assemble_mean_row(sp);
    assemble_rhs(sp, rules, f, g, sys.F0, sys.Fp, sys.G);
    return sys;
}

SpMat assemble_pressure_mass(const SvSpace& sp, const RuleSet& rules) {
    const CtMesh& ct = *sp.mesh;
    const CutTopology& topo = *sp.topo;
    Trips trips;
    for (size_t ai = 0; ai < topo.active_cells.size(); ++ai) {
        const int cell = topo.active_cells[ai];
        const QuadRule vol = rules.volume(ct, topo, cell);
        if (vol.empty())
            continue;
        Eigen::MatrixXd local = Eigen::MatrixXd::Zero(sp.np_loc, sp.np_loc);
        for (size_t q = 0; q < vol.size(); ++q) {
            const Eigen::VectorXd psi =
                pressure_mode_values(sp, static_cast<int>(ai), vol.points[q]);
            const Eigen::MatrixXd outer = psi * psi.transpose();
            local += vol.weights[q] * outer;
        }
        const int p0 = sp.pressure_dof0(static_cast<int>(ai));
        for (int i = 0; i < sp.np_loc; ++i)
            for (int j = 0; j < sp.np_loc; ++j)
                trips.emplace_back(p0 + i, p0 + j, local(i, j));
    }
    SpMat M(sp.n_p, sp.n_p);
    M.setFromTriplets(trips.begin(), trips.end());
    return M;
}

void write_matrix_market(const SpMat& mat, const std::string& path) {
    std::ofstream os(path);
    if (!os)
        throw std::runtime_error("cannot open " + path);
    os << "%%MatrixMarket matrix coordinate real general\n";
    os << mat.rows() << " " << mat.cols() << " " << mat.nonZeros() << "\n";
    os.precision(16);
    for (int k = 0; k < mat.outerSize(); ++k)
        for (SpMat::InnerIterator it(mat, k); it; ++it)
            os << it.row() + 1 << " " << it.col() + 1 << " " << it.value() << "\n";
}

} // namespace cutsv
