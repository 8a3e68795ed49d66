#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <map>
#include <set>

#include "cutsv/mesh.hpp"

using namespace cutsv;

namespace {

// brute-force edge census built directly from the triangle list
struct EdgeCensus {
    int total = 0, interior = 0, boundary = 0;
    explicit EdgeCensus(const BackgroundMesh& m) {
        std::map<std::pair<int, int>, int> count;
        for (const auto& tr : m.triangles)
            for (int e = 0; e < 3; ++e)
                ++count[std::minmax(tr[e], tr[(e + 1) % 3])];
        total = static_cast<int>(count.size());
        for (auto& [k, c] : count)
            (c == 2 ? interior : boundary) += 1;
    }
};

std::vector<int> brute_force_patch(const BackgroundMesh& m, int t) {
    std::set<int> verts(m.triangles[t].begin(), m.triangles[t].end());
    std::vector<int> patch;
    for (int s = 0; s < static_cast<int>(m.triangles.size()); ++s)
        for (int v : m.triangles[s])
            if (verts.count(v)) {
                patch.push_back(s);
                break;
            }
    return patch;
}

} // namespace

TEST_CASE("type-1 mesh, single square") {
    const BackgroundMesh m = build_type1_mesh(1);
    CHECK(m.triangles.size() == 2);
    CHECK(m.vertices.size() == 4);
    CHECK(m.n_interior_faces() == 1);
    CHECK(m.h == doctest::Approx(1.0));
}

TEST_CASE("type-1 mesh counts match brute-force enumeration") {
    for (int n : {2, 3, 5, 8}) {
        const BackgroundMesh m = build_type1_mesh(n);
        CHECK(static_cast<int>(m.triangles.size()) == 2 * n * n);
        CHECK(static_cast<int>(m.vertices.size()) == (n + 1) * (n + 1));
        CHECK(m.h == doctest::Approx(1.0 / n));
        const EdgeCensus census(m);
        CHECK(static_cast<int>(m.faces.size()) == census.total);
        CHECK(m.n_interior_faces() == census.interior);
        for (const auto& v : m.vertices) {
            CHECK(v.x() * n == doctest::Approx(std::round(v.x() * n)).epsilon(1e-12));
            CHECK(v.y() * n == doctest::Approx(std::round(v.y() * n)).epsilon(1e-12));
        }
    }
}

TEST_CASE("n=2 triangles all have signed area 1/8") {
    const BackgroundMesh m = build_type1_mesh(2);
    for (int t = 0; t < 8; ++t)
        CHECK(m.tri_area(t) == doctest::Approx(0.125).epsilon(1e-14));
}

TEST_CASE("invalid subdivision count rejected") {
    CHECK_THROWS_AS(build_type1_mesh(0), std::invalid_argument);
    CHECK_THROWS_AS(build_type1_mesh(-3), std::invalid_argument);
}

TEST_CASE("areas sum to the box area") {
    for (int n : {1, 4, 7, 16}) {
        const BackgroundMesh m = build_type1_mesh(n);
        double sum = 0;
        for (int t = 0; t < static_cast<int>(m.triangles.size()); ++t)
            sum += m.tri_area(t);
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
    }
}

TEST_CASE("shifted box is supported") {
    const BackgroundMesh m = build_type1_mesh(3, Box{-1.0, 2.0, 1.0, 5.0});
    double sum = 0;
    for (int t = 0; t < static_cast<int>(m.triangles.size()); ++t) {
        CHECK(m.tri_area(t) > 0);
        sum += m.tri_area(t);
    }
    CHECK(sum == doctest::Approx(6.0).epsilon(1e-14));
}

TEST_CASE("clough-tocher split of the reference macro triangle") {
    const BackgroundMesh macro = build_type1_mesh(1);
    const CtMesh ct = clough_tocher_refine(macro);
    CHECK(ct.triangles.size() == 6);
    CHECK(ct.vertices.size() == 6);
    for (int t = 0; t < 2; ++t) {
        const auto& tr = macro.triangles[t];
        const Vec2 g =
            (macro.vertices[tr[0]] + macro.vertices[tr[1]] + macro.vertices[tr[2]]) / 3.0;
        CHECK((ct.vertices[ct.barycenter_vertex[t]] - g).norm() == doctest::Approx(0.0));
        double sum = 0;
        for (int c : ct.macro_to_children[t]) {
            CHECK(ct.tri_area(c) == doctest::Approx(macro.tri_area(t) / 3.0).epsilon(1e-14));
            CHECK(ct.child_to_macro[c] == t);
            sum += ct.tri_area(c);
        }
        CHECK(sum == doctest::Approx(macro.tri_area(t)).epsilon(1e-14));
    }
}

TEST_CASE("ct topology census for the n=1 background") {
    const CtMesh ct = clough_tocher_refine(build_type1_mesh(1));
    const EdgeCensus census(ct);
    CHECK(census.total == 11);
    CHECK(census.interior == 7);
    int macro_interior = 0;
    for (int f = 0; f < static_cast<int>(ct.faces.size()); ++f)
        if (ct.face_macro_interior[f])
            ++macro_interior;
    CHECK(macro_interior == 6); // 3 spokes per macro cell
}

TEST_CASE("macro-interior face tags match parenthood") {
    const CtMesh ct = clough_tocher_refine(build_type1_mesh(4));
    for (int f = 0; f < static_cast<int>(ct.faces.size()); ++f) {
        const Face& fc = ct.faces[f];
        if (ct.face_macro_interior[f]) {
            CHECK(fc.tri[1] >= 0);
            CHECK(ct.child_to_macro[fc.tri[0]] == ct.child_to_macro[fc.tri[1]]);
        } else if (fc.tri[1] >= 0) {
            CHECK(ct.child_to_macro[fc.tri[0]] != ct.child_to_macro[fc.tri[1]]);
        }
    }
}

TEST_CASE("refinement preserves total area and orientation") {
    for (int n : {1, 3, 5}) {
        const BackgroundMesh macro = build_type1_mesh(n);
        const CtMesh ct = clough_tocher_refine(macro);
        CHECK(ct.triangles.size() == 3 * macro.triangles.size());
        double sum = 0;
        for (int t = 0; t < static_cast<int>(ct.triangles.size()); ++t) {
            CHECK(ct.tri_area(t) > 0);
            sum += ct.tri_area(t);
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
    }
}

TEST_CASE("element patch on the single-square mesh") {
    const BackgroundMesh m = build_type1_mesh(1);
    CHECK(element_patch(m, 0) == std::vector<int>{0, 1});
    CHECK(element_patch(m, 1) == std::vector<int>{0, 1});
}

TEST_CASE("element patch matches brute-force vertex-incidence scan") {
    const BackgroundMesh m = build_type1_mesh(5);
    int interior_tri = -1;
    for (int t = 0; t < static_cast<int>(m.triangles.size()); ++t) {
        const Vec2 g = m.tri_centroid(t);
        if (g.x() > 0.35 && g.x() < 0.65 && g.y() > 0.35 && g.y() < 0.65) {
            interior_tri = t;
            break;
        }
    }
    REQUIRE(interior_tri >= 0);
    const auto patch = element_patch(m, interior_tri);
    CHECK(patch == brute_force_patch(m, interior_tri));
    CHECK(patch.size() == 13);

    const auto corner = element_patch(m, 0);
    CHECK(corner == brute_force_patch(m, 0));
    CHECK(corner.size() < patch.size());

    CHECK_THROWS_AS(element_patch(m, -1), std::out_of_range);
    CHECK_THROWS_AS(element_patch(m, 50), std::out_of_range);
}

TEST_CASE("face normals point out of the first adjacent triangle") {
    const CtMesh ct = clough_tocher_refine(build_type1_mesh(2));
    for (int f = 0; f < static_cast<int>(ct.faces.size()); ++f) {
        const Vec2 n = ct.face_normal(f);
        CHECK(n.norm() == doctest::Approx(1.0).epsilon(1e-14));
        const Vec2 g = ct.tri_centroid(ct.faces[f].tri[0]);
        CHECK(n.dot(ct.face_midpoint(f) - g) > 0);
    }
}

TEST_CASE("vtk mesh dump is valid legacy vtk") {
    const CtMesh ct = clough_tocher_refine(build_type1_mesh(3));
    const std::string path = "mesh_dump_test.vtk";
    write_vtk_mesh(ct, path);
    std::ifstream in(path);
    std::string first;
    std::getline(in, first);
    CHECK(first.rfind("# vtk DataFile Version", 0) == 0);
    std::string all((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(all.find("POINTS") != std::string::npos);
    CHECK(all.find("CELLS") != std::string::npos);
    CHECK(all.find("CELL_TYPES") != std::string::npos);
    std::remove(path.c_str());
}
