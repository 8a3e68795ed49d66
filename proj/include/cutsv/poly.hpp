#pragma once

#include <Eigen/Dense>

#include "cutsv/mesh.hpp"

namespace cutsv {

/// Dense bivariate polynomial, coefficient c(i,j) on x^i y^j.
struct Poly2 {
    Eigen::MatrixXd c; // (deg+1) x (deg+1), entries with i+j > deg unused (zero)

    Poly2() : c(Eigen::MatrixXd::Zero(1, 1)) {}
    explicit Poly2(int deg) : c(Eigen::MatrixXd::Zero(deg + 1, deg + 1)) {}

    int deg() const { return static_cast<int>(c.rows()) - 1; }

    double eval(const Vec2& x) const {
        // Horner in x with inner Horner in y
        double r = 0.0;
        for (int i = deg(); i >= 0; --i) {
            double row = 0.0;
            for (int j = deg(); j >= 0; --j)
                row = row * x.y() + c(i, j);
            r = r * x.x() + row;
        }
        return r;
    }

    Poly2 dx() const {
        Poly2 r(std::max(deg() - 1, 0));
        for (int i = 1; i <= deg(); ++i)
            for (int j = 0; j <= deg() - i; ++j)
                r.c(i - 1, j) = i * c(i, j);
        return r;
    }

    Poly2 dy() const {
        Poly2 r(std::max(deg() - 1, 0));
        for (int i = 0; i <= deg(); ++i)
            for (int j = 1; j <= deg() - i; ++j)
                r.c(i, j - 1) = j * c(i, j);
        return r;
    }

    /// Directional derivative of order ell along the unit vector n.
    Poly2 dirn(int ell, const Vec2& n) const {
        Poly2 r = *this;
        for (int l = 0; l < ell; ++l) {
            Poly2 g(std::max(r.deg() - 1, 0));
            const Poly2 gx = r.dx(), gy = r.dy();
            for (int i = 0; i <= g.deg(); ++i)
                for (int j = 0; j <= g.deg() - i; ++j)
                    g.c(i, j) = n.x() * gx.c(i, j) + n.y() * gy.c(i, j);
            r = g;
        }
        return r;
    }

    Poly2 operator*(const Poly2& o) const {
        Poly2 r(deg() + o.deg());
        for (int i = 0; i <= deg(); ++i)
            for (int j = 0; j <= deg() - i; ++j) {
                if (c(i, j) == 0.0)
                    continue;
                for (int k = 0; k <= o.deg(); ++k)
                    for (int l = 0; l <= o.deg() - k; ++l)
                        r.c(i + k, j + l) += c(i, j) * o.c(k, l);
            }
        return r;
    }

    Poly2& axpy(double a, const Poly2& o) {
        for (int i = 0; i <= o.deg(); ++i)
            for (int j = 0; j <= o.deg() - i; ++j)
                c(i, j) += a * o.c(i, j);
        return *this;
    }

    static Poly2 constant(double v) {
        Poly2 r(0);
        r.c(0, 0) = v;
        return r;
    }

    /// x^i y^j with (x,y) replaced by the affine forms ax + bx*X + cx*Y etc.
    static Poly2 affine_monomial(int i, int j, double ax, double bx, double cx, double ay,
                                 double by, double cy) {
        Poly2 lx(1), ly(1);
        lx.c(0, 0) = ax;
        lx.c(1, 0) = bx;
        lx.c(0, 1) = cx;
        ly.c(0, 0) = ay;
        ly.c(1, 0) = by;
        ly.c(0, 1) = cy;
        Poly2 r = constant(1.0);
        for (int k = 0; k < i; ++k)
            r = r * lx;
        for (int k = 0; k < j; ++k)
            r = r * ly;
        return r;
    }
};

} // namespace cutsv
