#pragma once

#include <array>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace cutsv {

using Vec2 = Eigen::Vector2d;

struct Box {
    double x0 = 0.0, y0 = 0.0, x1 = 1.0, y1 = 1.0;
};

/// Mesh edge. Vertices are stored sorted (v[0] < v[1]); tri[1] is -1 for a
/// boundary face, otherwise tri[0] < tri[1]. The stored unit normal points
/// out of tri[0]; jump signs elsewhere are relative to this normal.
struct Face {
    std::array<int, 2> v{-1, -1};
    std::array<int, 2> tri{-1, -1};
};

struct BackgroundMesh {
    std::vector<Vec2> vertices;
    std::vector<std::array<int, 3>> triangles; // counterclockwise
    std::vector<Face> faces;
    std::vector<std::array<int, 3>> tri_faces;  // face k sits between local vertices k, k+1
    std::vector<std::vector<int>> vertex_tris;  // incident triangles, sorted
    double h = 0.0;
    Box box;

    double tri_area(int t) const;
    double tri_diameter(int t) const;
    Vec2 tri_centroid(int t) const;
    double face_length(int f) const;
    Vec2 face_midpoint(int f) const;
    /// Unit normal pointing out of faces[f].tri[0].
    Vec2 face_normal(int f) const;
    int n_interior_faces() const;
};

/// Clough-Tocher (barycentric) refinement of a background mesh. Child cells
/// of macro t are 3t, 3t+1, 3t+2.
struct CtMesh : BackgroundMesh {
    std::vector<int> child_to_macro;
    std::vector<std::array<int, 3>> macro_to_children;
    std::vector<int> barycenter_vertex; // per macro triangle
    std::vector<bool> face_macro_interior;
};

/// Uniform type-I triangulation of an axis-aligned box: n x n squares, each
/// split along the diagonal from its lower-left to its upper-right corner.
BackgroundMesh build_type1_mesh(int n, const Box& box = {});

CtMesh clough_tocher_refine(const BackgroundMesh& mesh);

/// All triangles sharing at least one vertex with t, including t itself.
std::vector<int> element_patch(const BackgroundMesh& mesh, int t);

/// Legacy ASCII VTK dump (POINTS/CELLS/CELL_TYPES, triangle type 5).
void write_vtk_mesh(const BackgroundMesh& mesh, const std::string& path);

/// Legacy ASCII VTK with one scalar per listed cell (CELL_DATA).
void write_vtk_cell_scalar(const BackgroundMesh& mesh, const std::vector<int>& cells,
                           const std::vector<double>& values, const std::string& name,
                           const std::string& path);

} // namespace cutsv
