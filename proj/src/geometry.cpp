#include "cutsv/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cutsv {

namespace {

constexpr double two_pi = 2.0 * M_PI;

double point_segment_dist(const Vec2& x, const Vec2& p, const Vec2& q) {
    const Vec2 d = q - p;
    const double t = std::clamp(d.dot(x - p) / d.squaredNorm(), 0.0, 1.0);
    return (p + t * d - x).norm();
}

bool point_in_triangle(const Vec2& x, const Vec2& a, const Vec2& b, const Vec2& c, double tol) {
    auto cross = [](const Vec2& u, const Vec2& v) { return u.x() * v.y() - u.y() * v.x(); };
    const double area2 = cross(b - a, c - a);
    const double l0 = cross(b - a, x - a) / area2;
    const double l1 = cross(c - b, x - b) / area2;
    const double l2 = cross(a - c, x - c) / area2;
    return l0 >= -tol && l1 >= -tol && l2 >= -tol;
}

struct EdgeInterval {
    bool empty = true;
    double a = 0, b = 0; // parameters along p->q
};

/// Sub-interval of the segment p->q lying inside the disk, resolved with the
/// snapped endpoint signs (sp, sq < 0 means inside). Computed in a canonical
/// direction so that the two cells sharing an edge agree bitwise.
EdgeInterval edge_inside_interval(const Vec2& p, const Vec2& q, const Circle& dom, int sp, int sq) {
    const bool flip = (q.x() < p.x()) || (q.x() == p.x() && q.y() < p.y());
    if (flip) {
        EdgeInterval r = edge_inside_interval(q, p, dom, sq, sp);
        if (!r.empty) {
            const double a = 1.0 - r.b, b = 1.0 - r.a;
            r.a = a;
            r.b = b;
        }
        return r;
    }
    EdgeInterval r;
    if (sp < 0 && sq < 0) { // disk is convex
        r = {false, 0.0, 1.0};
        return r;
    }
    const Vec2 d = q - p;
    const double aa = d.squaredNorm();
    const double bb = 2.0 * d.dot(p - dom.center);
    const double cc = dom.phi(p);
    const double disc = bb * bb - 4.0 * aa * cc;
    if (disc <= 0.0) {
        // snapped vertex with the edge otherwise missing the disk: keep a
        // zero-length interval there so the boundary chain stays closed
        if (sp < 0 || sq < 0)
            r = {false, sp < 0 ? 0.0 : 1.0, sp < 0 ? 0.0 : 1.0};
        return r;
    }
    const double sq_disc = std::sqrt(disc);
    const double qq = -0.5 * (bb + (bb >= 0 ? sq_disc : -sq_disc));
    double t0 = qq / aa, t1 = cc / qq;
    if (t0 > t1)
        std::swap(t0, t1);
    if (sp < 0 && sq >= 0) {
        r = {false, 0.0, std::clamp(t1, 0.0, 1.0)};
    } else if (sp >= 0 && sq < 0) {
        r = {false, std::clamp(t0, 0.0, 1.0), 1.0};
    } else {
        // both endpoints outside; keep a genuine interior chord only
        const double a = std::max(t0, 0.0), b = std::min(t1, 1.0);
        if (b - a > 1e-14)
            r = {false, a, b};
    }
    return r;
}

int snapped_sign(double phi, double tol) { return phi <= tol ? -1 : +1; }

double angle_of(const Vec2& x, const Circle& dom) {
    const Vec2 d = x - dom.center;
    return std::atan2(d.y(), d.x());
}

/// Append tensor Gauss points for the sector swept by rays from o to the arc
/// theta in [t0, t1] (ccw). Jacobian s*r*(A.e) with A(theta) = c + r e - o.
void append_arc_sector(QuadRule& rule, const Vec2& o, const Circle& dom, double t0, double t1,
                       int degree) {
    if (t1 - t0 < 1e-14)
        return;
    const double r = dom.radius();
    const int ns = (degree + 3) / 2;
    const int panels = std::max(1, static_cast<int>(std::ceil((t1 - t0) / 0.35)));
    const int na = std::max(4, (degree + 3) / 2 + 2);
    std::vector<double> xs, ws, xa, wa;
    gauss_legendre(ns, xs, ws);
    gauss_legendre(na, xa, wa);
    for (int pnl = 0; pnl < panels; ++pnl) {
        const double a0 = t0 + (t1 - t0) * pnl / panels;
        const double a1 = t0 + (t1 - t0) * (pnl + 1) / panels;
        for (int i = 0; i < na; ++i) {
            const double th = a0 + xa[i] * (a1 - a0);
            const Vec2 e(std::cos(th), std::sin(th));
            const Vec2 A = dom.center + r * e - o;
            const double jth = r * A.dot(e); // det[A, r e'] / r * ... = r (A.e)
            for (int j = 0; j < ns; ++j) {
                const double s = xs[j];
                rule.points.push_back(o + s * A);
                rule.weights.push_back(wa[i] * (a1 - a0) * ws[j] * s * jth);
            }
        }
    }
}

void append_triangle(QuadRule& rule, const Vec2& a, const Vec2& b, const Vec2& c, int degree) {
    if ((b - a).norm() < 1e-15 || (c - a).norm() < 1e-15 || (c - b).norm() < 1e-15)
        return;
    QuadRule t = triangle_rule(a, b, c, degree);
    rule.points.insert(rule.points.end(), t.points.begin(), t.points.end());
    rule.weights.insert(rule.weights.end(), t.weights.begin(), t.weights.end());
}

struct StraightPiece {
    Vec2 p0, p1;
    bool entry_from_arc = false; // p0 is a crossing of the interface
    bool exit_to_arc = false;    // p1 is a crossing of the interface
};

} // namespace

CellClass classify_triangle(const Vec2& a, const Vec2& b, const Vec2& c, const Circle& dom,
                            double tol_geom) {
    const double phi_max = std::max({dom.phi(a), dom.phi(b), dom.phi(c)});
    if (phi_max <= tol_geom)
        return CellClass::Interior;
    double phi_min;
    if (point_in_triangle(dom.center, a, b, c, 0.0)) {
        phi_min = -dom.radius2;
    } else {
        const double dmin = std::min({point_segment_dist(dom.center, a, b),
                                      point_segment_dist(dom.center, b, c),
                                      point_segment_dist(dom.center, c, a)});
        phi_min = dmin * dmin - dom.radius2;
    }
    if (phi_min >= -tol_geom)
        return CellClass::Exterior;
    return CellClass::Cut;
}

QuadRule cut_volume_rule(const Vec2& a, const Vec2& b, const Vec2& c, const Circle& dom,
                         int degree, double tol_geom) {
    QuadRule rule;
    rule.degree = degree;
    const CellClass cls = classify_triangle(a, b, c, dom, tol_geom);
    if (cls == CellClass::Interior)
        return triangle_rule(a, b, c, degree);
    rule.target = QuadRule::Target::CutVolume;
    if (cls == CellClass::Exterior)
        return rule;

    const Vec2 v[3] = {a, b, c};
    int s[3];
    for (int i = 0; i < 3; ++i)
        s[i] = snapped_sign(dom.phi(v[i]), tol_geom);

    std::vector<StraightPiece> pieces;
    for (int e = 0; e < 3; ++e) {
        const Vec2 &p = v[e], &q = v[(e + 1) % 3];
        const EdgeInterval iv = edge_inside_interval(p, q, dom, s[e], s[(e + 1) % 3]);
        if (iv.empty)
            continue;
        StraightPiece sp;
        sp.p0 = p + iv.a * (q - p);
        sp.p1 = p + iv.b * (q - p);
        sp.entry_from_arc = iv.a > 0.0;
        sp.exit_to_arc = iv.b < 1.0;
        pieces.push_back(sp);
    }

    if (pieces.empty()) {
        // cut with no boundary chord: the disk lies strictly inside the cell
        for (int pnl = 0; pnl < 8; ++pnl)
            append_arc_sector(rule, dom.center, dom, two_pi * pnl / 8, two_pi * (pnl + 1) / 8,
                              degree);
        return rule;
    }

    struct Arc {
        double t0, t1;
    };
    std::vector<Arc> arcs;
    const int m = static_cast<int>(pieces.size());
    for (int i = 0; i < m; ++i) {
        const StraightPiece& cur = pieces[i];
        const StraightPiece& nxt = pieces[(i + 1) % m];
        if (cur.exit_to_arc != nxt.entry_from_arc)
            throw std::logic_error("cut_volume_rule: inconsistent boundary chain");
        if (!cur.exit_to_arc)
            continue;
        double t0 = angle_of(cur.p1, dom);
        double t1 = angle_of(nxt.p0, dom);
        while (t1 <= t0 + 1e-14)
            t1 += two_pi;
        arcs.push_back({t0, t1});
    }

    Vec2 o = Vec2::Zero();
    int cnt = 0;
    for (const auto& sp : pieces) {
        o += sp.p0 + sp.p1;
        cnt += 2;
    }
    const double r = dom.radius();
    for (const auto& ar : arcs) {
        const double tm = 0.5 * (ar.t0 + ar.t1);
        o += dom.center + r * Vec2(std::cos(tm), std::sin(tm));
        cnt += 1;
    }
    o /= cnt;

    for (const auto& sp : pieces)
        append_triangle(rule, o, sp.p0, sp.p1, degree);
    for (const auto& ar : arcs)
        append_arc_sector(rule, o, dom, ar.t0, ar.t1, degree);
    return rule;
}

QuadRule interface_rule(const Vec2& a, const Vec2& b, const Vec2& c, const Circle& dom,
                        int degree, double tol_geom) {
    QuadRule rule;
    rule.degree = degree;
    rule.target = QuadRule::Target::InterfaceArc;
    const double r = dom.radius();

    const Vec2 v[3] = {a, b, c};
    int s[3];
    for (int i = 0; i < 3; ++i)
        s[i] = snapped_sign(dom.phi(v[i]), tol_geom);

    std::vector<double> crossings;
    for (int e = 0; e < 3; ++e) {
        const Vec2 &p = v[e], &q = v[(e + 1) % 3];
        const EdgeInterval iv = edge_inside_interval(p, q, dom, s[e], s[(e + 1) % 3]);
        if (iv.empty)
            continue;
        if (iv.a > 0.0)
            crossings.push_back(angle_of(p + iv.a * (q - p), dom));
        if (iv.b < 1.0)
            crossings.push_back(angle_of(p + iv.b * (q - p), dom));
    }
    for (int i = 0; i < 3; ++i)
        if (std::abs(dom.phi(v[i])) <= tol_geom)
            crossings.push_back(angle_of(v[i], dom));

    auto emit_piece = [&](double t0, double t1) {
        if (t1 - t0 < 1e-14)
            return;
        const double tm = 0.5 * (t0 + t1);
        const Vec2 xm = dom.center + r * Vec2(std::cos(tm), std::sin(tm));
        if (!point_in_triangle(xm, a, b, c, 1e-12))
            return;
        const int panels = std::max(1, static_cast<int>(std::ceil((t1 - t0) / 0.35)));
        const int na = std::max(4, degree + 2);
        std::vector<double> xa, wa;
        gauss_legendre(na, xa, wa);
        for (int pnl = 0; pnl < panels; ++pnl) {
            const double a0 = t0 + (t1 - t0) * pnl / panels;
            const double a1 = t0 + (t1 - t0) * (pnl + 1) / panels;
            for (int i = 0; i < na; ++i) {
                const double th = a0 + xa[i] * (a1 - a0);
                const Vec2 e(std::cos(th), std::sin(th));
                rule.points.push_back(dom.center + r * e);
                rule.weights.push_back(wa[i] * (a1 - a0) * r);
                rule.normals.push_back(e);
            }
        }
    };

    if (crossings.empty()) {
        // whole circle inside the cell, or no intersection at all
        if (point_in_triangle(dom.center, a, b, c, 0.0) &&
            classify_triangle(a, b, c, dom, tol_geom) == CellClass::Cut)
            emit_piece(0.0, two_pi);
        return rule;
    }

    std::sort(crossings.begin(), crossings.end());
    crossings.erase(std::unique(crossings.begin(), crossings.end(),
                                [](double x, double y) { return std::abs(x - y) < 1e-12; }),
                    crossings.end());
    if (crossings.size() > 1 && crossings.front() + two_pi - crossings.back() < 1e-12)
        crossings.pop_back();

    const int nc = static_cast<int>(crossings.size());
    for (int i = 0; i < nc; ++i) {
        const double t0 = crossings[i];
        const double t1 = (i + 1 < nc) ? crossings[i + 1] : crossings[0] + two_pi;
        emit_piece(t0, t1);
    }
    return rule;
}

CutTopology classify(const CtMesh& ct, const Circle& dom, double tol_geom) {
    if (dom.radius2 <= 0)
        throw std::invalid_argument("classify: radius must be positive");
    CutTopology topo;
    const int n_macro = static_cast<int>(ct.macro_to_children.size());
    const int n_ct = static_cast<int>(ct.triangles.size());

    topo.macro_class.resize(n_macro);
    for (int t = 0; t < n_macro; ++t) {
        // macro triangle vertices are the outer vertices of its first two children
        const int c0 = ct.macro_to_children[t][0];
        const int c1 = ct.macro_to_children[t][1];
        const Vec2& a = ct.vertices[ct.triangles[c0][0]];
        const Vec2& b = ct.vertices[ct.triangles[c0][1]];
        const Vec2& c = ct.vertices[ct.triangles[c1][1]];
        topo.macro_class[t] = classify_triangle(a, b, c, dom, tol_geom);
        if (topo.macro_class[t] == CellClass::Interior)
            ++topo.n_macro_interior;
        else if (topo.macro_class[t] == CellClass::Cut)
            ++topo.n_macro_cut;
    }

    for (int vtx = 0; vtx < static_cast<int>(ct.vertices.size()); ++vtx)
        if (std::abs(dom.phi(ct.vertices[vtx])) <= tol_geom)
            topo.snapped_vertices.push_back(vtx);

    topo.ct_class.resize(n_ct);
    topo.active_index.assign(n_ct, -1);
    for (int k = 0; k < n_ct; ++k) {
        topo.ct_class[k] = topo.macro_class[ct.child_to_macro[k]];
        if (topo.ct_class[k] != CellClass::Exterior) {
            topo.active_index[k] = static_cast<int>(topo.active_cells.size());
            topo.active_cells.push_back(k);
        }
    }

    for (int f = 0; f < static_cast<int>(ct.faces.size()); ++f) {
        const Face& fc = ct.faces[f];
        if (fc.tri[1] < 0)
            continue;
        const bool act0 = topo.is_active(fc.tri[0]), act1 = topo.is_active(fc.tri[1]);
        if (!act0 || !act1)
            continue;
        topo.active_interior_faces.push_back(f);
        if (topo.ct_class[fc.tri[0]] == CellClass::Cut || topo.ct_class[fc.tri[1]] == CellClass::Cut)
            topo.ghost_faces.push_back(f);
    }

    topo.in_strip.assign(n_ct, false);
    for (int k = 0; k < n_ct; ++k)
        if (topo.ct_class[k] == CellClass::Cut)
            topo.in_strip[k] = true;
    for (int f : topo.active_interior_faces) {
        const Face& fc = ct.faces[f];
        if (topo.ct_class[fc.tri[0]] == CellClass::Cut && topo.is_active(fc.tri[1]))
            topo.in_strip[fc.tri[1]] = true;
        if (topo.ct_class[fc.tri[1]] == CellClass::Cut && topo.is_active(fc.tri[0]))
            topo.in_strip[fc.tri[0]] = true;
    }
    return topo;
}

DomainMeasures boundary_distance_strip(const CtMesh& ct, const CutTopology& topo) {
    DomainMeasures m;
    for (int k : topo.active_cells) {
        const double area = ct.tri_area(k);
        if (topo.in_strip[k])
            m.strip_area += area;
        else
            m.strip_complement_area += area;
        if (topo.ct_class[k] == CellClass::Cut)
            m.cut_macro_area += area;
        else
            m.interior_macro_area += area;
    }
    return m;
}

QuadRule RuleSet::volume(const CtMesh& ct, const CutTopology& topo, int ct_cell) const {
    const int ai = topo.active_index[ct_cell];
    if (ai < 0)
        throw std::invalid_argument("RuleSet::volume: cell not active");
    if (vol_kind[ai] == 2) {
        QuadRule empty;
        empty.degree = degree;
        empty.target = QuadRule::Target::CutVolume;
        return empty;
    }
    if (vol_kind[ai] == 1)
        return cut_rules[vol_index[ai]];
    const auto& tr = ct.triangles[ct_cell];
    return triangle_rule(ct.vertices[tr[0]], ct.vertices[tr[1]], ct.vertices[tr[2]], degree);
}

const QuadRule* RuleSet::interface(const CutTopology& topo, int ct_cell) const {
    const int ai = topo.active_index[ct_cell];
    if (ai < 0 || iface_index[ai] < 0)
        return nullptr;
    return &iface_rules[iface_index[ai]];
}

RuleSet build_rules(const CtMesh& ct, const CutTopology& topo, const Circle& dom, int degree) {
    RuleSet rs;
    rs.degree = degree;
    const int na = static_cast<int>(topo.active_cells.size());
    rs.vol_kind.assign(na, 0);
    rs.vol_index.assign(na, -1);
    rs.iface_index.assign(na, -1);
    for (int ai = 0; ai < na; ++ai) {
        const int k = topo.active_cells[ai];
        if (topo.ct_class[k] != CellClass::Cut)
            continue; // interior macro: full-cell rule
        const auto& tr = ct.triangles[k];
        const Vec2 &a = ct.vertices[tr[0]], &b = ct.vertices[tr[1]], &c = ct.vertices[tr[2]];
        const CellClass cls = classify_triangle(a, b, c, dom);
        if (cls == CellClass::Interior)
            continue;
        if (cls == CellClass::Exterior) {
            rs.vol_kind[ai] = 2;
            continue;
        }
        rs.vol_kind[ai] = 1;
        rs.vol_index[ai] = static_cast<int>(rs.cut_rules.size());
        rs.cut_rules.push_back(cut_volume_rule(a, b, c, dom, degree));
        QuadRule ir = interface_rule(a, b, c, dom, degree);
        if (ir.empty())
            throw std::logic_error("build_rules: cut cell " + std::to_string(k) +
                                   " produced no interface rule");
        rs.iface_index[ai] = static_cast<int>(rs.iface_rules.size());
        rs.iface_rules.push_back(std::move(ir));
    }
    return rs;
}

} // namespace cutsv
