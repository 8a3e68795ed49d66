#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <fstream>
#include <random>

#include "cutsv/assembly.hpp"
#include "cutsv/errors.hpp"
#include "oracle_quadrature.hpp"

using namespace cutsv;

namespace {

const Circle disk{{0.5, 0.5}, 0.2};

struct Fixture {
    CtMesh ct;
    CutTopology topo;
    SvSpace sp;
    RuleSet rules;
    Fixture(int n, int degree = 6)
        : ct(clough_tocher_refine(build_type1_mesh(n))), topo(classify(ct, disk)),
          sp(build_space(ct, topo, 2)), rules(build_rules(ct, topo, disk, degree)) {}
};

Eigen::VectorXd random_vector(int n, unsigned seed) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> N(0, 1);
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i)
        v(i) = N(rng);
    return v;
}

// cancellation-free evaluation of the velocity ghost form: per-face sums of
// squared normal-derivative jumps (the assembled quadratic form has an
// O(1e-10) rounding floor for O(1) fields)
double vghost_form(const Fixture& f, const Eigen::VectorXd& u) {
    double total = 0;
    for (int face : f.topo.ghost_faces) {
        const Face& fc = f.ct.faces[face];
        const double hf = f.ct.face_length(face);
        const QuadRule line = segment_rule(f.ct.vertices[fc.v[0]], f.ct.vertices[fc.v[1]], 3);
        for (int ell = 1; ell <= f.sp.k; ++ell) {
            const Eigen::MatrixXd jmp = face_normal_jump_velocity(f.sp, face, ell, u, line.points);
            double s = 0;
            for (size_t q = 0; q < line.size(); ++q)
                s += line.weights[q] * jmp.col(q).squaredNorm();
            total += std::pow(hf, 2 * ell - 1) * s;
        }
    }
    return total;
}

double pressure_ghost_form(const Fixture& f, const Eigen::VectorXd& p) {
    double total = 0;
    for (int face : f.topo.ghost_faces) {
        const Face& fc = f.ct.faces[face];
        const double hf = f.ct.face_length(face);
        const QuadRule line = segment_rule(f.ct.vertices[fc.v[0]], f.ct.vertices[fc.v[1]], 3);
        for (int ell = 0; ell <= f.sp.k - 1; ++ell) {
            const Eigen::VectorXd jmp = face_normal_jump_pressure(f.sp, face, ell, p, line.points);
            double s = 0;
            for (size_t q = 0; q < line.size(); ++q)
                s += line.weights[q] * jmp(q) * jmp(q);
            total += std::pow(hf, 2 * ell + 1) * s;
        }
    }
    return total;
}

} // namespace

TEST_CASE("constant field: only the boundary penalty survives") {
    Fixture f(5);
    const VelocityForms a = assemble_a(f.sp, f.rules);
    const Vec2 cvec{0.7, -1.3};
    const Eigen::VectorXd u = interpolate_velocity(f.sp, [&](const Vec2&) { return cvec; });
    CHECK(std::abs(u.dot(a.grad * u)) < 1e-12);
    CHECK(std::abs(u.dot(a.graddiv * u)) < 1e-12);
    CHECK(std::abs(u.dot(a.nitsche * u)) < 1e-12);
    CHECK(vghost_form(f, u) < 1e-12);
    CHECK(std::abs(u.dot(a.vghost * u)) < 1e-8); // rounding floor of the matrix route
    // eta * |c|^2 * sum_K h_K^-1 |K_Gamma| against the arc-length oracle
    double expected = 0;
    for (int cell : f.topo.active_cells)
        if (const QuadRule* arc = f.rules.interface(f.topo, cell))
            expected += arc->weight_sum() / f.ct.tri_diameter(cell);
    expected *= cvec.squaredNorm();
    CHECK(u.dot(a.penalty * u) == doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("rigid rotation: viscous energy is twice the disk area") {
    Fixture f(20, 8);
    const VelocityForms a = assemble_a(f.sp, f.rules);
    const Eigen::VectorXd u = interpolate_velocity(
        f.sp, [](const Vec2& x) { return Vec2(-(x.y() - 0.5), x.x() - 0.5); });
    CHECK(u.dot(a.grad * u) == doctest::Approx(2.0 * M_PI * 0.2).epsilon(1e-9));
    CHECK(std::abs(u.dot(a.graddiv * u)) < 1e-12);
    CHECK(vghost_form(f, u) < 1e-12);
}

TEST_CASE("ghost terms vanish on global polynomials") {
    Fixture f(5);
    const Eigen::VectorXd u = interpolate_velocity(f.sp, [](const Vec2& x) {
        return Vec2(1.0 + x.x() * x.x() - 2 * x.x() * x.y(), x.y() * x.y() + 3 * x.x());
    });
    CHECK(vghost_form(f, u) < 1e-12);
    // pressure ghost with the full derivative stack
    const SpMat Jfull = assemble_J(f.sp, {1.0, 1.0});
    const Eigen::VectorXd q =
        project_pressure(f.sp, [](const Vec2& x) { return 2.0 - x.x() + 3 * x.y(); });
    CHECK(pressure_ghost_form(f, q) < 1e-12);
    CHECK(std::abs(q.dot(Jfull * q)) < 1e-10);
    const Eigen::VectorXd qc = project_pressure(f.sp, [](const Vec2&) { return 1.0; });
    CHECK((Jfull * qc).cwiseAbs().maxCoeff() < 1e-11);
}

TEST_CASE("pressure ghost matches a one-sided finite-difference oracle") {
    Fixture f(5);
    const SpMat J = assemble_J(f.sp, {1.0, 1.0});
    const Eigen::VectorXd q = random_vector(f.sp.n_p, 31);
    auto p_at = [&](int cell, const Vec2& x) {
        const int ai = f.topo.active_index[cell];
        const Eigen::VectorXd psi = pressure_mode_values(f.sp, ai, x);
        double r = 0;
        for (int m = 0; m < f.sp.np_loc; ++m)
            r += q(f.sp.pressure_dof0(ai) + m) * psi(m);
        return r;
    };
    double oracle = 0;
    for (int face : f.topo.ghost_faces) {
        const Face& fc = f.ct.faces[face];
        const double hf = f.ct.face_length(face);
        const Vec2 n = f.ct.face_normal(face);
        const QuadRule line = segment_rule(f.ct.vertices[fc.v[0]], f.ct.vertices[fc.v[1]], 4);
        const double d = 1e-3;
        for (size_t g = 0; g < line.size(); ++g) {
            const Vec2 x = line.points[g];
            const double j0 = p_at(fc.tri[0], x) - p_at(fc.tri[1], x);
            const double j1 = (p_at(fc.tri[0], x + d * n) - p_at(fc.tri[0], x - d * n) -
                               p_at(fc.tri[1], x + d * n) + p_at(fc.tri[1], x - d * n)) /
                              (2 * d);
            oracle += line.weights[g] * (hf * j0 * j0 + hf * hf * hf * j1 * j1);
        }
    }
    CHECK(q.dot(J * q) == doctest::Approx(oracle).epsilon(1e-11));
}

TEST_CASE("divergence theorem identities for b") {
    Fixture f(10, 8);
    const SpMat B = assemble_b(f.sp, f.rules);
    const Eigen::VectorXd one = project_pressure(f.sp, [](const Vec2&) { return 1.0; });
    // b(1, v) = 0 for smooth interpolated fields
    const Eigen::VectorXd v1 = interpolate_velocity(
        f.sp, [](const Vec2& x) { return Vec2(x.x(), 0.0); });
    CHECK(std::abs(one.dot(B * v1)) < 1e-10);
    const Eigen::VectorXd v2 = interpolate_velocity(f.sp, [](const Vec2& x) {
        return Vec2(x.x() * x.y(), 0.3 * x.y() * x.y() - x.x());
    });
    CHECK(std::abs(one.dot(B * v2)) < 1e-10);
}

TEST_CASE("b on a cut cell against the slab-integration oracle") {
    Fixture f(5, 8);
    const SpMat B = assemble_b(f.sp, f.rules);
    // pick a genuinely cut cell
    int cell = -1, ai = -1;
    for (int c : f.topo.active_cells)
        if (f.rules.vol_kind[f.topo.active_index[c]] == 1) {
            cell = c;
            ai = f.topo.active_index[c];
            break;
        }
    REQUIRE(cell >= 0);
    const Eigen::VectorXd v = random_vector(f.sp.n_u, 77);
    const Eigen::VectorXd q = random_vector(f.sp.n_p, 78);
    // volume part: -int_{K cap Omega} q div v, via polynomial expansion
    const auto& tr = f.ct.triangles[cell];
    const Vec2 &A = f.ct.vertices[tr[0]], &Bv = f.ct.vertices[tr[1]], &C = f.ct.vertices[tr[2]];
    const auto dofs = f.sp.cell_scalar_dofs(ai);
    Poly2 divv(f.sp.k);
    for (int loc = 0; loc < f.sp.n_loc; ++loc) {
        const Poly2 ph = physical_shape(f.sp, cell, loc);
        divv.axpy(v(2 * dofs[loc]), ph.dx());
        divv.axpy(v(2 * dofs[loc] + 1), ph.dy());
    }
    Poly2 qp(f.sp.k - 1);
    for (int m = 0; m < f.sp.np_loc; ++m)
        qp.axpy(q(f.sp.pressure_dof0(ai) + m), physical_pressure_mode(f.sp, ai, m));
    const double vol_oracle = -testing::oracle_poly_cut(qp * divv, A, Bv, C, disk, 1e-12);
    // boundary part with the interface rule (verified elsewhere against arc length)
    double bnd = 0;
    const QuadRule* arc = f.rules.interface(f.topo, cell);
    REQUIRE(arc);
    for (size_t g = 0; g < arc->size(); ++g) {
        const Vec2 vv = velocity_value(f.sp, v, cell, arc->points[g]);
        bnd += arc->weights[g] * vv.dot(arc->normals[g]) *
               pressure_value(f.sp, q, cell, arc->points[g]);
    }
    // compare against the assembled row restricted to this cell's pressure dofs
    double assembled = 0;
    const Eigen::VectorXd Bv_full = B * v;
    for (int m = 0; m < f.sp.np_loc; ++m)
        assembled += q(f.sp.pressure_dof0(ai) + m) * Bv_full(f.sp.pressure_dof0(ai) + m);
    CHECK(assembled == doctest::Approx(vol_oracle + bnd).epsilon(1e-9));
}

TEST_CASE("rhs examples") {
    Fixture f(5);
    Eigen::VectorXd F0, Fp, G;
    // zero data
    assemble_rhs(f.sp, f.rules, [](const Vec2&) { return Vec2(0, 0); },
                 [](const Vec2&) { return Vec2(0, 0); }, F0, Fp, G);
    CHECK(F0.norm() == 0.0);
    CHECK(Fp.norm() == 0.0);
    CHECK(G.norm() == 0.0);

    // f = (1,0): entries over an uncut cell equal the exact shape integrals
    assemble_rhs(f.sp, f.rules, [](const Vec2&) { return Vec2(1, 0); },
                 [](const Vec2&) { return Vec2(0, 0); }, F0, Fp, G);
    int cell = -1;
    for (int c : f.topo.active_cells) {
        // interior-parent cell whose entities touch no cut cell
        if (f.topo.ct_class[c] != CellClass::Interior)
            continue;
        bool isolated = true;
        for (int other : f.topo.active_cells) {
            if (f.topo.ct_class[other] == CellClass::Interior)
                continue;
            for (int va : f.ct.triangles[c])
                for (int vb : f.ct.triangles[other])
                    if (va == vb)
                        isolated = false;
        }
        if (isolated) {
            cell = c;
            break;
        }
    }
    REQUIRE(cell >= 0);
    // P2 exact integrals on a triangle: vertex shapes 0, edge shapes |K|/3,
    // but entries accumulate over all cells sharing the dof
    const int ai = f.topo.active_index[cell];
    const auto dofs = f.sp.cell_scalar_dofs(ai);
    for (int loc = 3; loc < 6; ++loc) { // edge nodes of this cell
        const int sd = dofs[loc];
        // sum of |K|/3 over cells containing this edge dof
        double expected = 0;
        for (int other : f.topo.active_cells) {
            const auto od = f.sp.cell_scalar_dofs(f.topo.active_index[other]);
            for (int l2 = 3; l2 < 6; ++l2)
                if (od[l2] == sd)
                    expected += f.ct.tri_area(other) / 3.0;
        }
        CHECK(F0(2 * sd) == doctest::Approx(expected).epsilon(1e-13));
        CHECK(F0(2 * sd + 1) == doctest::Approx(0.0));
    }

    // g = exact solution trace: G pairs to zero with the constant pressure
    const ManufacturedSolution ex = make_vortex_solution();
    assemble_rhs(f.sp, f.rules, [](const Vec2&) { return Vec2(0, 0); }, ex.g, F0, Fp, G);
    const Eigen::VectorXd one = project_pressure(f.sp, [](const Vec2&) { return 1.0; });
    CHECK(std::abs(one.dot(G)) < 1e-10);
}

TEST_CASE("assembled matrices are bitwise symmetric") {
    Fixture f(5);
    AssembledSystem sys =
        assemble_system(f.sp, f.rules, [](const Vec2&) { return Vec2(0, 0); },
                        [](const Vec2&) { return Vec2(0, 0); });
    MethodParams prm;
    const SpMat A = sys.A(prm);
    CHECK(SpMat(A - SpMat(A.transpose())).norm() == 0.0);
    CHECK(SpMat(sys.J - SpMat(sys.J.transpose())).norm() == 0.0);
    // J is positive semidefinite
    for (int trial = 0; trial < 20; ++trial) {
        const Eigen::VectorXd q = random_vector(sys.n_p, 100 + trial);
        CHECK(q.dot(sys.J * q) >= 0.0);
    }
}

TEST_CASE("coercivity and continuity probes") {
    std::vector<double> continuity;
    for (int n : {10, 20, 40}) {
        Fixture f(n);
        const ManufacturedSolution ex = make_vortex_solution();
        AssembledSystem sys = assemble_system(f.sp, f.rules, ex.f, ex.g);
        MethodParams prm; // eta = 100, gamma = 0
        const SpMat A = sys.A(prm);
        const SpMat N0 = sys.v0h_norm(prm);
        double cmin = 1e300, cmax = 0;
        for (int trial = 0; trial < 200; ++trial) {
            const Eigen::VectorXd v = random_vector(sys.n_u, 1000 + trial);
            const double num = v.dot(A * v), den = v.dot(N0 * v);
            cmin = std::min(cmin, num / den);
            cmax = std::max(cmax, num / den);
        }
        CHECK(cmin > 0.0);
        continuity.push_back(cmax);
    }
    // sampled continuity constant stable within a factor 2 across meshes
    const double lo = *std::min_element(continuity.begin(), continuity.end());
    const double hi = *std::max_element(continuity.begin(), continuity.end());
    CHECK(hi / lo < 2.0);
}

TEST_CASE("consistency residual of interpolants decays at order k") {
    const ManufacturedSolution ex = make_vortex_solution();
    std::vector<double> resid;
    for (int n : {5, 10, 20, 40}) {
        Fixture f(n, 8);
        AssembledSystem sys = assemble_system(f.sp, f.rules, ex.f, ex.g);
        MethodParams prm;
        const Eigen::VectorXd uI = interpolate_velocity(f.sp, ex.u);
        const Eigen::VectorXd pI = project_pressure(f.sp, ex.p);
        const Eigen::VectorXd r = sys.F(prm) - sys.A(prm) * uI - sys.B.transpose() * pI;
        const SpMat N = sys.vh_norm(prm);
        double proxy = 0;
        for (int i = 0; i < sys.n_u; ++i)
            proxy = std::max(proxy, std::abs(r(i)) / std::sqrt(N.coeff(i, i)));
        resid.push_back(proxy);
    }
    const double rate = std::log2(resid[resid.size() - 2] / resid.back());
    CHECK(rate >= 2.0);
}

TEST_CASE("matrix market export round-trips") {
    Fixture f(2);
    const SpMat B = assemble_b(f.sp, f.rules);
    const std::string path = "b_export_test.mtx";
    write_matrix_market(B, path);
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "%%MatrixMarket matrix coordinate real general");
    int rows, cols, nnz;
    in >> rows >> cols >> nnz;
    CHECK(rows == f.sp.n_p);
    CHECK(cols == f.sp.n_u);
    CHECK(nnz == static_cast<int>(B.nonZeros()));
    // spot-check the first listed entry
    int r, c;
    double val;
    in >> r >> c >> val;
    CHECK(B.coeff(r - 1, c - 1) == doctest::Approx(val).epsilon(1e-14));
    std::remove(path.c_str());
}
