#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "cutsv/study.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Convergence-study driver for the cut Scott-Vogelius Stokes solver"};

    std::string config_path, h_list, gamma, eta, out_dir;
    int degree = 0;
    int quad_degree = 0;
    bool emit_vtk = false, export_matrices = false, dump_mesh = false;

    app.add_option("-c,--config", config_path, "key=value configuration file");
    app.add_option("--h-list", h_list, "comma-separated mesh sizes, halving (e.g. 0.2,0.1,0.05)");
    app.add_option("--gamma", gamma, "grad-div parameter, literal or c/h");
    app.add_option("--eta", eta, "Nitsche penalty, literal or c/h");
    app.add_option("--degree", degree, "velocity polynomial degree k >= 2");
    app.add_option("--quad-degree", quad_degree, "volume quadrature degree (default 2k+2)");
    app.add_option("-o,--out", out_dir, "output directory");
    app.add_flag("--emit-vtk", emit_vtk, "write the |div u_h| cell field per mesh");
    app.add_flag("--export-matrices", export_matrices, "write A, B, J in Matrix Market format");
    app.add_flag("--dump-mesh", dump_mesh, "write the CT mesh as legacy VTK per row");

    CLI11_PARSE(app, argc, argv);

    cutsv::StudyConfig cfg;
    try {
        if (!config_path.empty())
            cfg = cutsv::load_config(config_path);
        // flags override file values
        std::string overrides;
        if (!h_list.empty())
            overrides += "h_list = " + h_list + "\n";
        if (!gamma.empty())
            overrides += "gamma = " + gamma + "\n";
        if (!eta.empty())
            overrides += "eta = " + eta + "\n";
        if (degree > 0)
            overrides += "degree = " + std::to_string(degree) + "\n";
        if (quad_degree > 0)
            overrides += "quad_degree = " + std::to_string(quad_degree) + "\n";
        if (!overrides.empty()) {
            cutsv::StudyConfig o = cfg;
            cutsv::StudyConfig parsed = cutsv::parse_config(overrides);
            if (!h_list.empty())
                o.h_list = parsed.h_list;
            if (!gamma.empty())
                o.gamma = parsed.gamma;
            if (!eta.empty())
                o.eta = parsed.eta;
            if (degree > 0)
                o.degree = parsed.degree;
            if (quad_degree > 0)
                o.quad_degree = parsed.quad_degree;
            cfg = o;
        }
        if (!out_dir.empty())
            cfg.out_dir = out_dir;
        cfg.emit_vtk |= emit_vtk;
        cfg.export_matrices |= export_matrices;
        cfg.dump_mesh |= dump_mesh;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    }

    cutsv::StudyResult res;
    try {
        res = cutsv::run_study(cfg);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "study failed: %s\n", e.what());
        return 1;
    }
    for (const auto& r : res.rows) {
        if (r.ok)
            std::printf("h=%-9g n_u=%-7d n_p=%-7d err_h1_u=%-11.4e err_l2_p=%-11.4e "
                        "err_div=%-11.4e flux=%-10.3e %.2fs\n",
                        r.h, r.n_u, r.n_p, r.err_h1_u, r.err_l2_p, r.err_div, r.flux, r.seconds);
        else
            std::printf("h=%-9g FAILED: %s\n", r.h, r.error.c_str());
    }
    std::printf("wrote %s\n", res.csv_path.c_str());
    return res.all_ok ? 0 : 1;
}
