"""Smoke tests for the python bindings: build the pipeline at a coarse mesh
and check the headline invariants end to end."""

import math
import os
import sys
import tempfile

import cutsv


def test_mesh_and_topology():
    mesh = cutsv.build_type1_mesh(5)
    assert mesh.n_triangles == 50
    assert mesh.n_vertices == 36
    assert abs(mesh.h - 0.2) < 1e-15
    ct = cutsv.clough_tocher_refine(mesh)
    assert ct.n_triangles == 150
    topo = cutsv.classify(ct, cutsv.Circle())
    assert len(topo.active_cells) == 3 * (topo.n_macro_interior + topo.n_macro_cut)


def test_geometry_measures():
    ct = cutsv.clough_tocher_refine(cutsv.build_type1_mesh(20))
    dom = cutsv.Circle()
    topo = cutsv.classify(ct, dom)
    rules = cutsv.build_rules(ct, topo, dom, 8)
    assert abs(rules.total_cut_volume(ct, topo) - math.pi * 0.2) < 1e-10
    assert abs(rules.total_interface_length(topo) - 2 * math.pi * math.sqrt(0.2)) < 1e-10


def test_solve_and_errors():
    ct = cutsv.clough_tocher_refine(cutsv.build_type1_mesh(10))
    dom = cutsv.Circle()
    topo = cutsv.classify(ct, dom)
    space = cutsv.build_space(ct, topo, 2)
    rules = cutsv.build_rules(ct, topo, dom, 6)
    exact = cutsv.make_vortex_solution()
    system = cutsv.assemble_system(space, rules, exact)
    params = cutsv.MethodParams()
    sol = cutsv.solve(system, params)
    assert sol.res_momentum <= 1e-10
    assert sol.res_continuity <= 1e-10
    rep = cutsv.compute_errors(space, rules, sol.u, sol.p, exact)
    assert rep.err_h1_u < 2.0
    assert rep.err_div_interior <= 1e-9 * rep.err_h1_u


def test_config_and_study():
    cfg = cutsv.parse_config("h_list = 0.2, 0.1\n")
    with tempfile.TemporaryDirectory() as tmp:
        cfg.out_dir = os.path.join(tmp, "study")
        res = cutsv.run_study(cfg)
        assert res.all_ok
        assert len(res.rows) == 2
        assert res.rows[1].err_h1_u < res.rows[0].err_h1_u
        assert os.path.exists(res.csv_path)
        with open(res.csv_path) as fh:
            header = fh.readline().strip()
        assert header == ("h,n_u,n_p,err_h1_u,rate_u,err_l2_p,rate_p,"
                          "err_div,rate_div,err_div_interior,flux,seconds")
    rates = cutsv.compute_eoc([1e-2, 2.5e-3])
    assert abs(rates[1] - 2.0) < 1e-12


def main():
    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_")]
    for t in tests:
        t()
        print(f"ok {t.__name__}")
    print(f"{len(tests)} python smoke tests passed")


if __name__ == "__main__":
    sys.exit(main())
