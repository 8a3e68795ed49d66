#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cutsv/study.hpp"

namespace py = pybind11;
using namespace cutsv;

PYBIND11_MODULE(_cutsv, m) {
    m.doc() = "Cut Scott-Vogelius Stokes solver on Clough-Tocher meshes";

    py::class_<Box>(m, "Box")
        .def(py::init<>())
        .def(py::init([](double x0, double y0, double x1, double y1) {
                 return Box{x0, y0, x1, y1};
             }),
             py::arg("x0"), py::arg("y0"), py::arg("x1"), py::arg("y1"))
        .def_readwrite("x0", &Box::x0)
        .def_readwrite("y0", &Box::y0)
        .def_readwrite("x1", &Box::x1)
        .def_readwrite("y1", &Box::y1);

    py::class_<BackgroundMesh>(m, "BackgroundMesh")
        .def_property_readonly("n_vertices",
                               [](const BackgroundMesh& s) { return s.vertices.size(); })
        .def_property_readonly("n_triangles",
                               [](const BackgroundMesh& s) { return s.triangles.size(); })
        .def_property_readonly("n_faces", [](const BackgroundMesh& s) { return s.faces.size(); })
        .def_readonly("h", &BackgroundMesh::h)
        .def("tri_area", &BackgroundMesh::tri_area)
        .def("element_patch", [](const BackgroundMesh& s, int t) { return element_patch(s, t); })
        .def("write_vtk", &write_vtk_mesh);

    py::class_<CtMesh, BackgroundMesh>(m, "CtMesh")
        .def_readonly("child_to_macro", &CtMesh::child_to_macro);

    py::class_<Circle>(m, "Circle")
        .def(py::init([](double cx, double cy, double r2) {
                 return Circle{{cx, cy}, r2};
             }),
             py::arg("center_x") = 0.5, py::arg("center_y") = 0.5,
             py::arg("radius_squared") = 0.2)
        .def_property_readonly("radius", &Circle::radius)
        .def("phi", [](const Circle& c, double x, double y) { return c.phi({x, y}); });

    py::class_<CutTopology>(m, "CutTopology")
        .def_readonly("active_cells", &CutTopology::active_cells)
        .def_readonly("ghost_faces", &CutTopology::ghost_faces)
        .def_readonly("n_macro_interior", &CutTopology::n_macro_interior)
        .def_readonly("n_macro_cut", &CutTopology::n_macro_cut)
        .def_readonly("snapped_vertices", &CutTopology::snapped_vertices);

    py::class_<SvSpace>(m, "SvSpace")
        .def_readonly("k", &SvSpace::k)
        .def_readonly("n_u", &SvSpace::n_u)
        .def_readonly("n_p", &SvSpace::n_p)
        .def_readonly("n_scalar", &SvSpace::n_scalar);

    py::class_<RuleSet>(m, "RuleSet")
        .def_readonly("degree", &RuleSet::degree)
        .def("total_cut_volume",
             [](const RuleSet& rs, const CtMesh& ct, const CutTopology& topo) {
                 double v = 0;
                 for (int cell : topo.active_cells)
                     v += rs.volume(ct, topo, cell).weight_sum();
                 return v;
             })
        .def("total_interface_length", [](const RuleSet& rs, const CutTopology& topo) {
            double v = 0;
            for (int cell : topo.active_cells)
                if (const QuadRule* arc = rs.interface(topo, cell))
                    v += arc->weight_sum();
            return v;
        });

    py::class_<MethodParams>(m, "MethodParams")
        .def(py::init<>())
        .def_readwrite("gamma", &MethodParams::gamma)
        .def_readwrite("eta", &MethodParams::eta)
        .def_readwrite("k", &MethodParams::k);

    py::class_<AssembledSystem>(m, "AssembledSystem")
        .def_readonly("n_u", &AssembledSystem::n_u)
        .def_readonly("n_p", &AssembledSystem::n_p)
        .def("A", &AssembledSystem::A)
        .def_readonly("B", &AssembledSystem::B)
        .def_readonly("J", &AssembledSystem::J)
        .def_readonly("m", &AssembledSystem::m)
        .def("F", &AssembledSystem::F)
        .def_readonly("G", &AssembledSystem::G);

    py::class_<SaddleSolution>(m, "SaddleSolution")
        .def_readonly("u", &SaddleSolution::u)
        .def_readonly("p", &SaddleSolution::p)
        .def_readonly("lam", &SaddleSolution::lambda)
        .def_readonly("res_momentum", &SaddleSolution::res_momentum)
        .def_readonly("res_continuity", &SaddleSolution::res_continuity)
        .def_readonly("res_constraint", &SaddleSolution::res_constraint)
        .def_readonly("pressure_mean", &SaddleSolution::pressure_mean)
        .def_readonly("engine", &SaddleSolution::engine)
        .def_readonly("iterations", &SaddleSolution::iterations);

    py::class_<InfSupEstimate>(m, "InfSupEstimate")
        .def_readonly("theta", &InfSupEstimate::theta)
        .def_readonly("iterations", &InfSupEstimate::iterations)
        .def_readonly("converged", &InfSupEstimate::converged)
        .def_readonly("kernel_dim", &InfSupEstimate::kernel_dim);

    py::class_<ManufacturedSolution>(m, "ManufacturedSolution")
        .def("u", [](const ManufacturedSolution& s, double x, double y) { return s.u({x, y}); })
        .def("p", [](const ManufacturedSolution& s, double x, double y) { return s.p({x, y}); })
        .def("f", [](const ManufacturedSolution& s, double x, double y) { return s.f({x, y}); });

    py::class_<ErrorReport>(m, "ErrorReport")
        .def_readonly("err_h1_u", &ErrorReport::err_h1_u)
        .def_readonly("err_l2_p", &ErrorReport::err_l2_p)
        .def_readonly("err_div", &ErrorReport::err_div)
        .def_readonly("err_div_interior", &ErrorReport::err_div_interior)
        .def_readonly("flux", &ErrorReport::flux)
        .def_readonly("n_u", &ErrorReport::n_u)
        .def_readonly("n_p", &ErrorReport::n_p);

    py::class_<StudyRow>(m, "StudyRow")
        .def_readonly("h", &StudyRow::h)
        .def_readonly("n_u", &StudyRow::n_u)
        .def_readonly("n_p", &StudyRow::n_p)
        .def_readonly("err_h1_u", &StudyRow::err_h1_u)
        .def_readonly("err_l2_p", &StudyRow::err_l2_p)
        .def_readonly("err_div", &StudyRow::err_div)
        .def_readonly("err_div_interior", &StudyRow::err_div_interior)
        .def_readonly("flux", &StudyRow::flux)
        .def_readonly("ok", &StudyRow::ok)
        .def_readonly("error", &StudyRow::error);

    py::class_<StudyResult>(m, "StudyResult")
        .def_readonly("rows", &StudyResult::rows)
        .def_readonly("all_ok", &StudyResult::all_ok)
        .def_readonly("csv_path", &StudyResult::csv_path);

    py::class_<StudyConfig>(m, "StudyConfig")
        .def(py::init<>())
        .def_readwrite("h_list", &StudyConfig::h_list)
        .def_readwrite("degree", &StudyConfig::degree)
        .def_readwrite("out_dir", &StudyConfig::out_dir)
        .def_readwrite("emit_vtk", &StudyConfig::emit_vtk);

    m.def("build_type1_mesh", &build_type1_mesh, py::arg("n"), py::arg("box") = Box{});
    m.def("clough_tocher_refine", &clough_tocher_refine);
    m.def("classify", &classify, py::arg("ct"), py::arg("dom"), py::arg("tol_geom") = 1e-12);
    m.def("build_space", &build_space, py::arg("ct"), py::arg("topo"), py::arg("k") = 2,
          py::keep_alive<0, 1>(), py::keep_alive<0, 2>());
    m.def("build_rules", &build_rules, py::arg("ct"), py::arg("topo"), py::arg("dom"),
          py::arg("degree"));
    m.def("make_vortex_solution", &make_vortex_solution);
    m.def(
        "assemble_system",
        [](const SvSpace& sp, const RuleSet& rules, const ManufacturedSolution& ex) {
            return assemble_system(sp, rules, ex.f, ex.g);
        },
        py::arg("space"), py::arg("rules"), py::arg("exact"));
    m.def(
        "solve",
        [](const AssembledSystem& sys, const MethodParams& prm) { return solve(sys, prm); },
        py::arg("system"), py::arg("params"));
    m.def(
        "estimate_infsup",
        [](const AssembledSystem& sys, const SvSpace& sp, const RuleSet& rules,
           const MethodParams& prm) { return estimate_infsup(sys, sp, rules, prm); },
        py::arg("system"), py::arg("space"), py::arg("rules"), py::arg("params"));
    m.def(
        "compute_errors",
        [](const SvSpace& sp, const RuleSet& rules, const Eigen::VectorXd& u,
           const Eigen::VectorXd& p, const ManufacturedSolution& ex) {
            return compute_errors(sp, rules, u, p, ex);
        },
        py::arg("space"), py::arg("rules"), py::arg("u"), py::arg("p"), py::arg("exact"));
    m.def("compute_eoc", &compute_eoc);
    m.def("parse_config", &parse_config);
    m.def("load_config", &load_config);
    m.def("run_study", &run_study);
}
