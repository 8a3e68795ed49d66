#pragma once

#include <vector>

#include "cutsv/mesh.hpp"

namespace cutsv {

/// Point/weight rule. Volume rules carry no normals; interface rules store
/// the outward unit normal of the physical domain at each point.
struct QuadRule {
    enum class Target { FullCell, CutVolume, InterfaceArc };

    std::vector<Vec2> points;
    std::vector<double> weights;
    std::vector<Vec2> normals;
    int degree = 0;
    Target target = Target::FullCell;

    double weight_sum() const {
        double s = 0;
        for (double w : weights)
            s += w;
        return s;
    }
    bool empty() const { return points.empty(); }
    size_t size() const { return points.size(); }
};

/// Gauss-Legendre nodes/weights on [0,1].
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w);

/// Rule exact for polynomials of total degree <= degree on the triangle
/// (a,b,c), built by collapsing a tensor Gauss rule. All weights positive.
QuadRule triangle_rule(const Vec2& a, const Vec2& b, const Vec2& c, int degree);

/// Gauss rule on the segment [a,b] with n points.
QuadRule segment_rule(const Vec2& a, const Vec2& b, int n);

} // namespace cutsv
