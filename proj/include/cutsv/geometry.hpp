#pragma once

#include <cmath>
#include <vector>

#include "cutsv/mesh.hpp"
#include "cutsv/quadrature.hpp"

namespace cutsv {

/// Implicit circular domain, phi(x) = |x-c|^2 - r^2, inside where phi < 0.
struct Circle {
    Vec2 center{0.5, 0.5};
    double radius2 = 0.2;

    double radius() const { return std::sqrt(radius2); }
    double phi(const Vec2& x) const { return (x - center).squaredNorm() - radius2; }
    Vec2 normal(const Vec2& x) const { return (x - center) / radius(); }
};

enum class CellClass : unsigned char { Interior, Cut, Exterior };

/// Classification of the macro and CT mesh against the implicit domain:
/// cell/face sets of the active submesh and the O(h) strip around the cut.
struct CutTopology {
    std::vector<CellClass> macro_class; // per macro triangle
    std::vector<CellClass> ct_class;    // per CT cell, inherited from the macro parent

    std::vector<int> active_cells;      // CT cell ids with class Interior or Cut, ascending
    std::vector<int> active_index;      // per CT cell: index into active_cells, or -1

    std::vector<int> ghost_faces;           // faces of cut-parent CT cells, not on the active boundary
    std::vector<int> active_interior_faces; // interior faces of the active CT submesh

    std::vector<bool> in_strip; // per CT cell: cut cells plus face-neighbors of cut cells

    int n_macro_interior = 0, n_macro_cut = 0;
    std::vector<int> snapped_vertices; // vertices within tol_geom of the interface

    bool is_active(int ct_cell) const { return active_index[ct_cell] >= 0; }
};

/// Exact circle/triangle classification. A cell is Cut iff the interface
/// meets its closure in a set of positive 1D measure; vertex phi values
/// within tol_geom are snapped to the inside.
CutTopology classify(const CtMesh& ct, const Circle& dom, double tol_geom = 1e-12);

/// Classification of a single triangle, same convention as classify().
CellClass classify_triangle(const Vec2& a, const Vec2& b, const Vec2& c, const Circle& dom,
                            double tol_geom = 1e-12);

/// Rule over K∩Ω: the full-cell rule when K is inside, empty when outside,
/// otherwise a decomposition into straight-sided triangles and exactly
/// parametrized circular-arc sectors.
QuadRule cut_volume_rule(const Vec2& a, const Vec2& b, const Vec2& c, const Circle& dom,
                         int degree, double tol_geom = 1e-12);

/// Gauss rule in angle on the arc K̄∩Γ, with outward normals per point.
QuadRule interface_rule(const Vec2& a, const Vec2& b, const Vec2& c, const Circle& dom,
                        int degree, double tol_geom = 1e-12);

struct DomainMeasures {
    double strip_area = 0;              // |Ω̃_h^{ct,Γ}|
    double strip_complement_area = 0;   // |Ω̃_h^{ct,i}|
    double cut_macro_area = 0;          // |Ω_h^Γ|
    double interior_macro_area = 0;     // |Ω_h^i|
};

DomainMeasures boundary_distance_strip(const CtMesh& ct, const CutTopology& topo);

/// Per-cell quadrature for one mesh/domain pair. Uncut active cells share
/// the reference full-cell rule; cut cells carry explicit rules.
struct RuleSet {
    int degree = 0;
    // per active cell: 0 = full cell, 1 = explicit cut rule, 2 = empty
    std::vector<int> vol_kind;
    std::vector<int> vol_index;       // into cut_rules where vol_kind == 1
    std::vector<QuadRule> cut_rules;
    std::vector<int> iface_index;     // per active cell: into iface_rules, or -1
    std::vector<QuadRule> iface_rules;

    /// Volume rule for active cell (explicit points), full cells mapped on demand.
    QuadRule volume(const CtMesh& ct, const CutTopology& topo, int ct_cell) const;
    const QuadRule* interface(const CutTopology& topo, int ct_cell) const;
};

RuleSet build_rules(const CtMesh& ct, const CutTopology& topo, const Circle& dom, int degree);

} // namespace cutsv
