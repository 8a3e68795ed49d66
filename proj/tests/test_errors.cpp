#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "cutsv/errors.hpp"
#include "cutsv/solver.hpp"

using namespace cutsv;

namespace {

const Circle disk{{0.5, 0.5}, 0.2};

struct Fixture {
    CtMesh ct;
    CutTopology topo;
    SvSpace sp;
    RuleSet rules;
    Fixture(int n, int deg = 8)
        : ct(clough_tocher_refine(build_type1_mesh(n))), topo(classify(ct, disk)),
          sp(build_space(ct, topo, 2)), rules(build_rules(ct, topo, disk, deg)) {}
};

} // namespace

TEST_CASE("forcing field is consistent with the stated exact solution") {
    // second-order finite differences of u and p, Richardson-extrapolated
    const ManufacturedSolution ex = make_vortex_solution();
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> U(0.1, 0.9);
    auto lap_fd = [&](const std::function<double(const Vec2&)>& f, const Vec2& x, double h) {
        return (f({x.x() + h, x.y()}) + f({x.x() - h, x.y()}) + f({x.x(), x.y() + h}) +
                f({x.x(), x.y() - h}) - 4.0 * f(x)) /
               (h * h);
    };
    auto grad_fd = [&](const std::function<double(const Vec2&)>& f, const Vec2& x, double h) {
        return Vec2((f({x.x() + h, x.y()}) - f({x.x() - h, x.y()})) / (2 * h),
                    (f({x.x(), x.y() + h}) - f({x.x(), x.y() - h})) / (2 * h));
    };
    for (int trial = 0; trial < 100; ++trial) {
        const Vec2 x{U(rng), U(rng)};
        Vec2 f_fd = Vec2::Zero();
        for (int comp = 0; comp < 2; ++comp) {
            auto uc = [&](const Vec2& y) { return ex.u(y)[comp]; };
            const double l1 = lap_fd(uc, x, 1e-3), l2 = lap_fd(uc, x, 5e-4);
            f_fd[comp] -= (4.0 * l2 - l1) / 3.0;
        }
        const Vec2 g1 = grad_fd(ex.p, x, 1e-3), g2 = grad_fd(ex.p, x, 5e-4);
        f_fd += (4.0 * g2 - g1) / 3.0;
        CHECK((f_fd - ex.f(x)).norm() < 1e-6);
        // div u vanishes identically, laplacian and boundary trace agree
        CHECK(std::abs(ex.grad_u(x)(0, 0) + ex.grad_u(x)(1, 1)) < 1e-14);
        CHECK((ex.g(x) - ex.u(x)).norm() == 0.0);
    }
}

TEST_CASE("exact-vs-exact errors vanish") {
    // representable polynomial of degree <= k with p in P_{k-1}
    Fixture f(5);
    ManufacturedSolution poly;
    poly.u = [](const Vec2& x) { return Vec2(x.y() * x.y() + x.x(), 2.0 * x.y() - x.x()); };
    poly.grad_u = [](const Vec2& x) {
        Eigen::Matrix2d g;
        g << 1.0, 2.0 * x.y(), -1.0, 2.0;
        return g;
    };
    poly.p = [](const Vec2& x) { return 3.0 * x.x() - x.y() + 0.2; };
    const Eigen::VectorXd u = interpolate_velocity(f.sp, poly.u);
    const Eigen::VectorXd p = project_pressure(f.sp, poly.p);
    const ErrorReport rep = compute_errors(f.sp, f.rules, u, p, poly);
    CHECK(rep.err_h1_u < 1e-12);
    CHECK(rep.err_l2_p < 1e-12);
}

TEST_CASE("interpolant errors decay at the expected orders") {
    const ManufacturedSolution ex = make_vortex_solution();
    std::vector<double> h1, l2p;
    for (int n : {5, 10, 20, 40}) {
        Fixture f(n);
        const Eigen::VectorXd uI = interpolate_velocity(f.sp, ex.u);
        const Eigen::VectorXd pI = project_pressure(f.sp, ex.p);
        const ErrorReport rep = compute_errors(f.sp, f.rules, uI, pI, ex);
        h1.push_back(rep.err_h1_u);
        l2p.push_back(rep.err_l2_p);
    }
    const auto rates_u = compute_eoc(h1);
    const auto rates_p = compute_eoc(l2p);
    for (size_t i = 1; i < rates_u.size(); ++i) {
        CHECK(rates_u[i] >= 1.8); // k - 0.2
        CHECK(rates_p[i] >= 1.8);
    }
}

TEST_CASE("injected linear field has exact per-cell divergence norms") {
    Fixture f(5);
    const Eigen::VectorXd u =
        interpolate_velocity(f.sp, [](const Vec2& x) { return Vec2(x.x(), x.y()); });
    const auto [max_cell, glob] = check_interior_divfree(f.sp, u);
    // div = 2 on every cell: per-cell norm is 2 sqrt(|K|)
    double expect_max = 0, area = 0;
    for (int cell : f.topo.active_cells) {
        if (f.topo.in_strip[cell])
            continue;
        expect_max = std::max(expect_max, 2.0 * std::sqrt(f.ct.tri_area(cell)));
        area += f.ct.tri_area(cell);
    }
    CHECK(max_cell == doctest::Approx(expect_max).epsilon(1e-12));
    CHECK(glob == doctest::Approx(2.0 * std::sqrt(area)).epsilon(1e-12));

    const Eigen::VectorXd z = Eigen::VectorXd::Zero(f.sp.n_u);
    const auto [zmax, zglob] = check_interior_divfree(f.sp, z);
    CHECK(zmax == 0.0);
    CHECK(zglob == 0.0);
}

TEST_CASE("eoc extraction") {
    const auto r1 = compute_eoc({1e-2, 2.5e-3});
    CHECK(std::isnan(r1[0]));
    CHECK(r1[1] == doctest::Approx(2.0));
    const auto r2 = compute_eoc({1e-2, 1e-2});
    CHECK(r2[1] == doctest::Approx(0.0));
    // final rate of the reference velocity series
    const auto r3 = compute_eoc({1.79, 0.500, 0.117, 2.22e-2, 3.91e-3, 7.30e-4});
    CHECK(r3.back() == doctest::Approx(2.4214).epsilon(1e-3));
}

TEST_CASE("solved system at n=20 lands on the reference error level") {
    Fixture f(20, 6);
    const ManufacturedSolution ex = make_vortex_solution();
    const AssembledSystem sys = assemble_system(f.sp, f.rules, ex.f, ex.g);
    MethodParams prm; // gamma = 0, eta = 100
    const SaddleSolution sol = solve(sys, prm);
    const RuleSet erules = build_rules(f.ct, f.topo, disk, 8);
    const ErrorReport rep = compute_errors(f.sp, erules, sol.u, sol.p, ex);
    CHECK(rep.err_h1_u > 1.17e-1 / 2.0);
    CHECK(rep.err_h1_u < 1.17e-1 * 2.0);

    // interior divergence-free property at solver accuracy
    CHECK(rep.err_div_interior <= 1e-9 * rep.err_h1_u);
    // violation localizes to the strip
    CHECK(rep.div_strip * rep.div_strip >= 0.99 * rep.err_div * rep.err_div);
    // discrete pressure mean over the interior domain vanishes
    const SaddleSolution again = solve(sys, prm);
    CHECK(std::abs(again.pressure_mean) <= 1e-10 * again.p.norm());
}
