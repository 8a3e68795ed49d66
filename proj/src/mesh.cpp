#include "cutsv/mesh.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <stdexcept>

namespace cutsv {

double BackgroundMesh::tri_area(int t) const {
    const auto& tr = triangles.at(t);
    const Vec2 &a = vertices[tr[0]], &b = vertices[tr[1]], &c = vertices[tr[2]];
    return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x()));
}

double BackgroundMesh::tri_diameter(int t) const {
    const auto& tr = triangles.at(t);
    const Vec2 &a = vertices[tr[0]], &b = vertices[tr[1]], &c = vertices[tr[2]];
    return std::max({(b - a).norm(), (c - b).norm(), (a - c).norm()});
}

Vec2 BackgroundMesh::tri_centroid(int t) const {
    const auto& tr = triangles.at(t);
    return (vertices[tr[0]] + vertices[tr[1]] + vertices[tr[2]]) / 3.0;
}

double BackgroundMesh::face_length(int f) const {
    const auto& fc = faces.at(f);
    return (vertices[fc.v[1]] - vertices[fc.v[0]]).norm();
}

Vec2 BackgroundMesh::face_midpoint(int f) const {
    const auto& fc = faces.at(f);
    return 0.5 * (vertices[fc.v[0]] + vertices[fc.v[1]]);
}

Vec2 BackgroundMesh::face_normal(int f) const {
    const auto& fc = faces.at(f);
    const Vec2 d = vertices[fc.v[1]] - vertices[fc.v[0]];
    Vec2 n(d.y(), -d.x());
    n.normalize();
    // orient out of tri[0]
    const Vec2 g = tri_centroid(fc.tri[0]);
    if (n.dot(face_midpoint(f) - g) < 0.0)
        n = -n;
    return n;
}

int BackgroundMesh::n_interior_faces() const {
    int n = 0;
    for (const auto& f : faces)
        if (f.tri[1] >= 0)
            ++n;
    return n;
}

namespace {

void build_connectivity(BackgroundMesh& m) {
    std::map<std::pair<int, int>, int> face_of;
    m.faces.clear();
    m.tri_faces.assign(m.triangles.size(), {-1, -1, -1});
    for (int t = 0; t < static_cast<int>(m.triangles.size()); ++t) {
        const auto& tr = m.triangles[t];
        for (int e = 0; e < 3; ++e) {
            int a = tr[e], b = tr[(e + 1) % 3];
            auto key = std::minmax(a, b);
            auto it = face_of.find(key);
            if (it == face_of.end()) {
                Face f;
                f.v = {key.first, key.second};
                f.tri = {t, -1};
                face_of.emplace(key, static_cast<int>(m.faces.size()));
                m.tri_faces[t][e] = static_cast<int>(m.faces.size());
                m.faces.push_back(f);
            } else {
                Face& f = m.faces[it->second];
                if (f.tri[1] != -1)
                    throw std::runtime_error("non-conforming mesh: face shared by >2 triangles");
                f.tri[1] = t;
                m.tri_faces[t][e] = it->second;
            }
        }
    }
    m.vertex_tris.assign(m.vertices.size(), {});
    for (int t = 0; t < static_cast<int>(m.triangles.size()); ++t)
        for (int v : m.triangles[t])
            m.vertex_tris[v].push_back(t);
}

} // namespace

BackgroundMesh build_type1_mesh(int n, const Box& box) {
    if (n < 1)
        throw std::invalid_argument("build_type1_mesh: subdivision count must be >= 1");
    BackgroundMesh m;
    m.box = box;
    const double dx = (box.x1 - box.x0) / n;
    const double dy = (box.y1 - box.y0) / n;
    m.h = 1.0 / n;
    m.vertices.reserve((n + 1) * (n + 1));
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i)
            m.vertices.emplace_back(box.x0 + i * dx, box.y0 + j * dy);
    auto vid = [n](int i, int j) { return j * (n + 1) + i; };
    m.triangles.reserve(2 * n * n);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            int v00 = vid(i, j), v10 = vid(i + 1, j);
            int v01 = vid(i, j + 1), v11 = vid(i + 1, j + 1);
            m.triangles.push_back({v00, v10, v11});
            m.triangles.push_back({v00, v11, v01});
        }
    }
    build_connectivity(m);
    return m;
}

CtMesh clough_tocher_refine(const BackgroundMesh& mesh) {
    CtMesh ct;
    ct.box = mesh.box;
    ct.h = mesh.h;
    ct.vertices = mesh.vertices;
    const int nt = static_cast<int>(mesh.triangles.size());
    ct.triangles.reserve(3 * nt);
    ct.child_to_macro.reserve(3 * nt);
    ct.macro_to_children.resize(nt);
    ct.barycenter_vertex.resize(nt);
    for (int t = 0; t < nt; ++t) {
        const auto& tr = mesh.triangles[t];
        const Vec2 g = (mesh.vertices[tr[0]] + mesh.vertices[tr[1]] + mesh.vertices[tr[2]]) / 3.0;
        const int gv = static_cast<int>(ct.vertices.size());
        ct.vertices.push_back(g);
        ct.barycenter_vertex[t] = gv;
        for (int e = 0; e < 3; ++e) {
            ct.macro_to_children[t][e] = static_cast<int>(ct.triangles.size());
            ct.triangles.push_back({tr[e], tr[(e + 1) % 3], gv});
            ct.child_to_macro.push_back(t);
        }
    }
    build_connectivity(ct);
    ct.face_macro_interior.assign(ct.faces.size(), false);
    for (int f = 0; f < static_cast<int>(ct.faces.size()); ++f) {
        const Face& fc = ct.faces[f];
        if (fc.tri[1] >= 0 && ct.child_to_macro[fc.tri[0]] == ct.child_to_macro[fc.tri[1]])
            ct.face_macro_interior[f] = true;
    }
    return ct;
}

std::vector<int> element_patch(const BackgroundMesh& mesh, int t) {
    if (t < 0 || t >= static_cast<int>(mesh.triangles.size()))
        throw std::out_of_range("element_patch: invalid triangle index");
    std::vector<int> patch;
    for (int v : mesh.triangles[t])
        patch.insert(patch.end(), mesh.vertex_tris[v].begin(), mesh.vertex_tris[v].end());
    std::sort(patch.begin(), patch.end());
    patch.erase(std::unique(patch.begin(), patch.end()), patch.end());
    return patch;
}

namespace {

std::ofstream open_vtk(const BackgroundMesh& mesh, const std::string& path, const std::string& title) {
    std::ofstream os(path);
    if (!os)
        throw std::runtime_error("cannot open " + path);
    os.precision(16);
    os << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
    os << "POINTS " << mesh.vertices.size() << " double\n";
    for (const auto& v : mesh.vertices)
        os << v.x() << " " << v.y() << " 0\n";
    return os;
}

void write_cells(std::ofstream& os, const BackgroundMesh& mesh, const std::vector<int>& cells) {
    os << "CELLS " << cells.size() << " " << 4 * cells.size() << "\n";
    for (int t : cells) {
        const auto& tr = mesh.triangles[t];
        os << "3 " << tr[0] << " " << tr[1] << " " << tr[2] << "\n";
    }
    os << "CELL_TYPES " << cells.size() << "\n";
    for (size_t i = 0; i < cells.size(); ++i)
        os << "5\n";
}

} // namespace

void write_vtk_mesh(const BackgroundMesh& mesh, const std::string& path) {
    std::vector<int> all(mesh.triangles.size());
    for (int t = 0; t < static_cast<int>(all.size()); ++t)
        all[t] = t;
    auto os = open_vtk(mesh, path, "mesh");
    write_cells(os, mesh, all);
}

void write_vtk_cell_scalar(const BackgroundMesh& mesh, const std::vector<int>& cells,
                           const std::vector<double>& values, const std::string& name,
                           const std::string& path) {
    if (cells.size() != values.size())
        throw std::invalid_argument("write_vtk_cell_scalar: cells/values size mismatch");
    auto os = open_vtk(mesh, path, name);
    write_cells(os, mesh, cells);
    os << "CELL_DATA " << cells.size() << "\n";
    os << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (double v : values)
        os << v << "\n";
}

} // namespace cutsv
