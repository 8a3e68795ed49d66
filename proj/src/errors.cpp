#include "cutsv/errors.hpp"

#include <cmath>
#include <limits>

#include "cutsv/quadrature.hpp"

namespace cutsv {

ManufacturedSolution make_vortex_solution() {
    ManufacturedSolution s;
    auto rad2 = [](const Vec2& x) {
        const double X = x.x() - 0.5, Y = x.y() - 0.5;
        return X * X + Y * Y - 0.25;
    };
    s.u = [rad2](const Vec2& x) {
        const double q = 2.0 * rad2(x);
        return Vec2(q * (2.0 * x.y() - 1.0), -q * (2.0 * x.x() - 1.0));
    };
    s.grad_u = [rad2](const Vec2& x) {
        const double X = x.x() - 0.5, Y = x.y() - 0.5;
        Eigen::Matrix2d g;
        g(0, 0) = 8.0 * X * Y;
        g(0, 1) = 4.0 * rad2(x) + 8.0 * Y * Y;
        g(1, 0) = -4.0 * rad2(x) - 8.0 * X * X;
        g(1, 1) = -8.0 * X * Y;
        return g;
    };
    s.laplace_u = [](const Vec2& x) {
        return Vec2(32.0 * (x.y() - 0.5), -32.0 * (x.x() - 0.5));
    };
    s.p = [](const Vec2& x) {
        const double d = x.x() * x.x() - x.y() * x.y();
        return 1e4 * d * d;
    };
    s.grad_p = [](const Vec2& x) {
        const double d = x.x() * x.x() - x.y() * x.y();
        return Vec2(4e4 * d * x.x(), -4e4 * d * x.y());
    };
    s.f = [s](const Vec2& x) { return Vec2(-s.laplace_u(x) + s.grad_p(x)); };
    s.g = s.u;
    return s;
}

ErrorReport compute_errors(const SvSpace& sp, const RuleSet& rules, const Eigen::VectorXd& u,
                           const Eigen::VectorXd& p, const ManufacturedSolution& exact) {
    const CtMesh& ct = *sp.mesh;
    const CutTopology& topo = *sp.topo;
    ErrorReport rep;
    rep.n_u = sp.n_u;
    rep.n_p = sp.n_p;
    double h1 = 0, p_sq = 0, p_lin = 0, area = 0, div_sq = 0, div_strip_sq = 0;
    for (size_t ai = 0; ai < topo.active_cells.size(); ++ai) {
        const int cell = topo.active_cells[ai];
        const QuadRule vol = rules.volume(ct, topo, cell);
        for (size_t q = 0; q < vol.size(); ++q) {
            const double w = vol.weights[q];
            const Vec2& x = vol.points[q];
            const Eigen::Matrix2d gh = velocity_gradient(sp, u, cell, x);
            const Eigen::Matrix2d ge = exact.grad_u(x);
            h1 += w * (gh - ge).squaredNorm();
            const double pe = exact.p(x) - pressure_value(sp, p, cell, x);
            p_sq += w * pe * pe;
            p_lin += w * pe;
            area += w;
            const double dv = gh(0, 0) + gh(1, 1);
            div_sq += w * dv * dv;
            if (topo.in_strip[cell])
                div_strip_sq += w * dv * dv;
        }
    }
    rep.err_h1_u = std::sqrt(h1);
    rep.err_l2_p = std::sqrt(std::max(p_sq - p_lin * p_lin / area, 0.0));
    rep.err_div = std::sqrt(div_sq);
    rep.div_strip = std::sqrt(div_strip_sq);
    const auto [div_max, div_glob] = check_interior_divfree(sp, u);
    rep.err_div_interior = div_max;
    rep.div_interior_global = div_glob;
    rep.flux = interior_boundary_flux(sp, u);
    return rep;
}

std::pair<double, double> check_interior_divfree(const SvSpace& sp, const Eigen::VectorXd& u) {
    const CtMesh& ct = *sp.mesh;
    const CutTopology& topo = *sp.topo;
    double max_cell = 0, glob_sq = 0;
    for (int cell : topo.active_cells) {
        if (topo.in_strip[cell])
            continue;
        const auto& tr = ct.triangles[cell];
        const QuadRule q = triangle_rule(ct.vertices[tr[0]], ct.vertices[tr[1]],
                                         ct.vertices[tr[2]], 2 * (sp.k - 1));
        double cell_sq = 0;
        for (size_t ip = 0; ip < q.size(); ++ip) {
            const double dv = velocity_divergence(sp, u, cell, q.points[ip]);
            cell_sq += q.weights[ip] * dv * dv;
        }
        glob_sq += cell_sq;
        max_cell = std::max(max_cell, std::sqrt(cell_sq));
    }
    return {max_cell, std::sqrt(glob_sq)};
}

double interior_boundary_flux(const SvSpace& sp, const Eigen::VectorXd& u) {
    const CtMesh& ct = *sp.mesh;
    const CutTopology& topo = *sp.topo;
    double flux = 0;
    for (int f = 0; f < static_cast<int>(ct.faces.size()); ++f) {
        const Face& fc = ct.faces[f];
        const bool i0 = fc.tri[0] >= 0 && topo.ct_class[fc.tri[0]] == CellClass::Interior;
        const bool i1 = fc.tri[1] >= 0 && topo.ct_class[fc.tri[1]] == CellClass::Interior;
        if (i0 == i1)
            continue; // interior-interior or fully outside the interior domain
        Vec2 n = ct.face_normal(f); // out of tri[0]
        if (!i0)
            n = -n;
        const int cell = i0 ? fc.tri[0] : fc.tri[1];
        const QuadRule line = segment_rule(ct.vertices[fc.v[0]], ct.vertices[fc.v[1]], sp.k + 1);
        for (size_t q = 0; q < line.size(); ++q)
            flux += line.weights[q] * velocity_value(sp, u, cell, line.points[q]).dot(n);
    }
    return flux;
}

std::vector<double> compute_eoc(const std::vector<double>& errors) {
    std::vector<double> rates(errors.size(), std::numeric_limits<double>::quiet_NaN());
    for (size_t i = 1; i < errors.size(); ++i)
        rates[i] = std::log2(errors[i - 1] / errors[i]);
    return rates;
}

} // namespace cutsv
