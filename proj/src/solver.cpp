#include "cutsv/solver.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <cmath>
#include <stdexcept>

namespace cutsv {

namespace {

SpMat bordered_matrix(const AssembledSystem& sys, const MethodParams& params) {
    const int nu = sys.n_u, np = sys.n_p;
    const int n = nu + np + 1;
    const SpMat A = sys.A(params);
    const double jscale = 1.0 / (1.0 + params.gamma);
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(A.nonZeros() + 2 * sys.B.nonZeros() + sys.J.nonZeros() + 2 * np);
    for (int k = 0; k < A.outerSize(); ++k)
        for (SpMat::InnerIterator it(A, k); it; ++it)
            trips.emplace_back(it.row(), it.col(), it.value());
    for (int k = 0; k < sys.B.outerSize(); ++k)
        for (SpMat::InnerIterator it(sys.B, k); it; ++it) {
            trips.emplace_back(nu + it.row(), it.col(), it.value());
            trips.emplace_back(it.col(), nu + it.row(), it.value()); // B^T
        }
    for (int k = 0; k < sys.J.outerSize(); ++k)
        for (SpMat::InnerIterator it(sys.J, k); it; ++it)
            trips.emplace_back(nu + it.row(), nu + it.col(), -jscale * it.value());
    for (int i = 0; i < np; ++i) {
        if (sys.m(i) != 0.0) {
            trips.emplace_back(nu + i, nu + np, sys.m(i));
            trips.emplace_back(nu + np, nu + i, sys.m(i));
        }
    }
    SpMat K(n, n);
    K.setFromTriplets(trips.begin(), trips.end());
    return K;
}

void fill_residuals(const AssembledSystem& sys, const MethodParams& params, SaddleSolution& sol) {
    const SpMat A = sys.A(params);
    const Eigen::VectorXd F = sys.F(params);
    const double jscale = 1.0 / (1.0 + params.gamma);
    const Eigen::VectorXd rm = F - A * sol.u - sys.B.transpose() * sol.p;
    const Eigen::VectorXd rc =
        sys.G - (sys.B * sol.u - jscale * (sys.J * sol.p) + sol.lambda * sys.m);
    const double scale = std::max(std::sqrt(F.squaredNorm() + sys.G.squaredNorm()), 1e-300);
    sol.res_momentum = rm.norm() / scale;
    sol.res_continuity = rc.norm() / scale;
    sol.res_constraint = std::abs(sys.m.dot(sol.p)) / scale;
    sol.pressure_mean = sys.m.dot(sol.p);
}

SaddleSolution solve_direct(const AssembledSystem& sys, const MethodParams& params) {
    const int nu = sys.n_u, np = sys.n_p;
    const SpMat K = bordered_matrix(sys, params);
    Eigen::SparseLU<SpMat> lu;
    lu.analyzePattern(K);
    lu.factorize(K);
    if (lu.info() != Eigen::Success)
        throw std::runtime_error("solve: singular factorization (" + lu.lastErrorMessage() + ")");
    Eigen::VectorXd rhs(nu + np + 1);
    rhs.head(nu) = sys.F(params);
    rhs.segment(nu, np) = sys.G;
    rhs(nu + np) = 0.0;
    Eigen::VectorXd x = lu.solve(rhs);
    // one step of iterative refinement
    x += lu.solve(rhs - K * x);
    SaddleSolution sol;
    sol.u = x.head(nu);
    sol.p = x.segment(nu, np);
    sol.lambda = x(nu + np);
    sol.engine = "direct";
    fill_residuals(sys, params, sol);
    return sol;
}

/// Projected preconditioned CG on the pressure Schur complement
/// S = B A^-1 B^T + J/(1+gamma), constrained to m^T p = 0.
SaddleSolution solve_schur_cg(const AssembledSystem& sys, const MethodParams& params,
                              const SolveOptions& opts) {
    const int np = sys.n_p;
    const double jscale = 1.0 / (1.0 + params.gamma);
    const SpMat A = sys.A(params);
    const Eigen::VectorXd F = sys.F(params);

    Eigen::SimplicialLDLT<SpMat> allt;
    allt.compute(A);
    if (allt.info() != Eigen::Success)
        throw std::runtime_error("solve: velocity block factorization failed");

    SpMat Mpre = sys.J * jscale;
    for (int i = 0; i < np; ++i)
        Mpre.coeffRef(i, i) += 1.0; // pressure mass is the identity in the modal basis
    Eigen::SimplicialLDLT<SpMat> pre;
    pre.compute(Mpre);
    if (pre.info() != Eigen::Success)
        throw std::runtime_error("solve: Schur preconditioner factorization failed");

    const double mm = sys.m.squaredNorm();
    auto project = [&](Eigen::VectorXd& v) { v -= (sys.m.dot(v) / mm) * sys.m; };
    auto apply_S = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
        return sys.B * allt.solve(sys.B.transpose() * x) + jscale * (sys.J * x);
    };

    SaddleSolution sol;
    sol.engine = "schur_cg";
    sol.p = Eigen::VectorXd::Zero(np);
    sol.lambda = 0.0;
    int total_it = 0;

    const Eigen::VectorXd r0_full = sys.B * allt.solve(F) - sys.G;

    // outer refinement loop: re-solve on the residual until block residuals meet rtol
    for (int sweep = 0; sweep < 4; ++sweep) {
        Eigen::VectorXd r = r0_full - apply_S(sol.p);
        project(r);
        Eigen::VectorXd z = pre.solve(r);
        project(z);
        Eigen::VectorXd d = z;
        double rz = r.dot(z);
        const double target = 1e-14 * std::max(r0_full.norm(), 1e-300);
        Eigen::VectorXd dp = Eigen::VectorXd::Zero(np);
        for (int it = 0; it < opts.max_cg_iterations; ++it) {
            if (r.norm() <= target || rz <= 0)
                break;
            const Eigen::VectorXd Sd = apply_S(d);
            const double alpha = rz / d.dot(Sd);
            dp += alpha * d;
            r -= alpha * Sd;
            project(r);
            z = pre.solve(r);
            project(z);
            const double rz_new = r.dot(z);
            d = z + (rz_new / rz) * d;
            rz = rz_new;
            ++total_it;
        }
        sol.p += dp;
        project(sol.p);
        sol.u = allt.solve(F - sys.B.transpose() * sol.p);
        const Eigen::VectorXd sres = apply_S(sol.p) - r0_full;
        sol.lambda = sys.m.dot(sres) / mm;
        fill_residuals(sys, params, sol);
        if (std::max({sol.res_momentum, sol.res_continuity, sol.res_constraint}) <= opts.rtol)
            break;
    }
    sol.iterations = total_it;
    if (std::max({sol.res_momentum, sol.res_continuity, sol.res_constraint}) > opts.rtol)
        throw std::runtime_error("solve: iterative engine stalled at relative residual " +
                                 std::to_string(std::max(sol.res_momentum, sol.res_continuity)));
    return sol;
}

} // namespace

SaddleSolution solve(const AssembledSystem& sys, const MethodParams& params,
                     const SolveOptions& opts) {
    SolveOptions::Engine engine = opts.engine;
    if (engine == SolveOptions::Engine::Auto)
        engine = (sys.n_u + sys.n_p + 1 <= opts.direct_max_unknowns)
                     ? SolveOptions::Engine::Direct
                     : SolveOptions::Engine::SchurCg;
    SaddleSolution sol = engine == SolveOptions::Engine::Direct
                             ? solve_direct(sys, params)
                             : solve_schur_cg(sys, params, opts);
    if (std::max({sol.res_momentum, sol.res_continuity, sol.res_constraint}) > opts.rtol)
        throw std::runtime_error("solve: residual " +
                                 std::to_string(std::max(sol.res_momentum, sol.res_continuity)) +
                                 " above rtol");
    return sol;
}

InfSupEstimate estimate_infsup(const AssembledSystem& sys, const SvSpace& sp,
                               const RuleSet& rules, const MethodParams& params, double tol,
                               int maxit) {
    MethodParams p0 = params;
    p0.gamma = 0.0;
    const int np = sys.n_p;
    const SpMat M = assemble_pressure_mass(sp, rules);

    // persistent Schur context: each inverse-iteration step solves
    // (S+J) qn = P(M q) on m^T qn = 0 by projected preconditioned CG
    const SpMat A0 = sys.A(p0);
    Eigen::SimplicialLDLT<SpMat> allt;
    allt.compute(A0);
    if (allt.info() != Eigen::Success)
        throw std::runtime_error("estimate_infsup: velocity block factorization failed");
    SpMat Mpre = sys.J;
    for (int i = 0; i < np; ++i)
        Mpre.coeffRef(i, i) += 1.0;
    Eigen::SimplicialLDLT<SpMat> pre;
    pre.compute(Mpre);
    const double mm = sys.m.squaredNorm();
    auto project = [&](Eigen::VectorXd& v) { v -= (sys.m.dot(v) / mm) * sys.m; };
    auto apply_S = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
        return sys.B * allt.solve(sys.B.transpose() * x) + sys.J * x;
    };
    auto schur_solve = [&](const Eigen::VectorXd& rhs, const Eigen::VectorXd& start) {
        Eigen::VectorXd x = start;
        Eigen::VectorXd r = rhs - apply_S(x);
        project(r);
        Eigen::VectorXd z = pre.solve(r);
        project(z);
        Eigen::VectorXd d = z;
        double rz = r.dot(z);
        const double target = 1e-9 * std::max(rhs.norm(), 1e-300);
        for (int it = 0; it < 100000 && r.norm() > target && rz > 0; ++it) {
            const Eigen::VectorXd Sd = apply_S(d);
            const double alpha = rz / d.dot(Sd);
            x += alpha * d;
            r -= alpha * Sd;
            project(r);
            z = pre.solve(r);
            project(z);
            const double rz_new = r.dot(z);
            d = z + (rz_new / rz) * d;
            rz = rz_new;
        }
        return x;
    };

    Eigen::VectorXd q(np);
    for (int i = 0; i < np; ++i)
        q(i) = std::sin(1.0 + i); // deterministic start
    project(q);
    InfSupEstimate est;
    double rho_prev = 0;
    Eigen::VectorXd qn = Eigen::VectorXd::Zero(np);
    for (int it = 0; it < maxit; ++it) {
        const Eigen::VectorXd Mq = M * q;
        if (q.dot(Mq) <= 0)
            throw std::runtime_error("estimate_infsup: iterate left the mass range");
        qn = schur_solve(Mq, qn * 0.0);
        // (S+J) qn = M q modulo span(m), m.qn = 0: rho = (qn.Mq)/(qn.Mqn)
        const double num = qn.dot(Mq);
        const double den = qn.dot(M * qn);
        const double rho = num / den;
        q = qn / std::sqrt(den);
        est.iterations = it + 1;
        if (it > 2 && std::abs(rho - rho_prev) <= tol * std::abs(rho)) {
            est.theta = std::sqrt(std::abs(rho));
            est.converged = true;
            break;
        }
        rho_prev = rho;
    }
    if (!est.converged)
        est.theta = std::sqrt(std::abs(rho_prev));
    est.kernel_dim = (est.theta > 1e-8) ? 0 : 1;
    return est;
}

} // namespace cutsv
