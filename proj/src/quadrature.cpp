#include "cutsv/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace cutsv {

void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    if (n < 1)
        throw std::invalid_argument("gauss_legendre: n must be >= 1");
    x.resize(n);
    w.resize(n);
    // nodes on [-1,1] by Newton on P_n, then map to [0,1]
    for (int i = 0; i < n; ++i) {
        double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double p0, p1, dp;
        for (int it = 0; it < 100; ++it) {
            p0 = 1.0;
            p1 = t;
            for (int j = 2; j <= n; ++j) {
                double p2 = ((2 * j - 1) * t * p1 - (j - 1) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (t * p1 - p0) / (t * t - 1.0);
            double dt = p1 / dp;
            t -= dt;
            if (std::abs(dt) < 1e-16)
                break;
        }
        x[i] = 0.5 * (1.0 - t); // descending t -> ascending x
        w[i] = 1.0 / ((1.0 - t * t) * dp * dp);
    }
}

QuadRule triangle_rule(const Vec2& a, const Vec2& b, const Vec2& c, int degree) {
    // Collapsed map (u,v) in [0,1]^2 -> (xi,eta) = (u, v(1-u)); the Jacobian
    // factor (1-u) raises the u-degree by one.
    const int nu = (degree + 2 + 1) / 2;
    const int nv = (degree + 1 + 1) / 2;
    std::vector<double> xu, wu, xv, wv;
    gauss_legendre(nu, xu, wu);
    gauss_legendre(nv, xv, wv);
    QuadRule r;
    r.degree = degree;
    r.target = QuadRule::Target::FullCell;
    const double area2 = (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
    r.points.reserve(nu * nv);
    r.weights.reserve(nu * nv);
    for (int i = 0; i < nu; ++i) {
        for (int j = 0; j < nv; ++j) {
            const double xi = xu[i];
            const double eta = xv[j] * (1.0 - xu[i]);
            r.points.push_back(a + xi * (b - a) + eta * (c - a));
            r.weights.push_back(wu[i] * wv[j] * (1.0 - xu[i]) * area2);
        }
    }
    return r;
}

QuadRule segment_rule(const Vec2& a, const Vec2& b, int n) {
    std::vector<double> x, w;
    gauss_legendre(n, x, w);
    QuadRule r;
    r.degree = 2 * n - 1;
    r.target = QuadRule::Target::FullCell;
    const double len = (b - a).norm();
    for (int i = 0; i < n; ++i) {
        r.points.push_back(a + x[i] * (b - a));
        r.weights.push_back(w[i] * len);
    }
    return r;
}

} // namespace cutsv
