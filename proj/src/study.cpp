#include "cutsv/study.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace cutsv {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& s, int line) {
    size_t pos = 0;
    double v;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw ConfigError(line, "malformed number '" + s + "'");
    }
    if (pos != s.size())
        throw ConfigError(line, "malformed number '" + s + "'");
    return v;
}

ParamSpec parse_param(const std::string& s, int line) {
    const auto slash = s.find('/');
    if (slash == std::string::npos)
        return {parse_double(s, line), false};
    const std::string denom = trim(s.substr(slash + 1));
    if (denom != "h")
        throw ConfigError(line, "expected literal or 'c/h', got '" + s + "'");
    return {parse_double(trim(s.substr(0, slash)), line), true};
}

void validate_h_list(const std::vector<double>& hs, int line) {
    if (hs.empty())
        throw ConfigError(line, "h_list is empty");
    for (double h : hs)
        if (!(h > 0))
            throw ConfigError(line, "h values must be positive");
    for (size_t i = 1; i < hs.size(); ++i) {
        if (std::abs(hs[i] - 0.5 * hs[i - 1]) > 1e-9 * hs[i - 1])
            throw ConfigError(line, "h_list must halve between consecutive entries");
    }
}

} // namespace

StudyConfig parse_config(const std::string& text) {
    StudyConfig cfg;
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    int h_line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const auto hash = raw.find('#');
        std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (s.empty())
            continue;
        const auto eq = s.find('=');
        if (eq == std::string::npos)
            throw ConfigError(line, "expected key = value");
        const std::string key = trim(s.substr(0, eq));
        const std::string val = trim(s.substr(eq + 1));
        if (val.empty())
            throw ConfigError(line, "empty value for '" + key + "'");
        if (key == "h_list") {
            cfg.h_list.clear();
            std::istringstream vs(val);
            std::string item;
            while (std::getline(vs, item, ','))
                cfg.h_list.push_back(parse_double(trim(item), line));
            h_line = line;
        } else if (key == "gamma") {
            cfg.gamma = parse_param(val, line);
        } else if (key == "eta") {
            cfg.eta = parse_param(val, line);
        } else if (key == "degree") {
            cfg.degree = static_cast<int>(parse_double(val, line));
            if (cfg.degree < 2)
                throw ConfigError(line, "degree must be >= 2");
        } else if (key == "center_x") {
            cfg.center_x = parse_double(val, line);
        } else if (key == "center_y") {
            cfg.center_y = parse_double(val, line);
        } else if (key == "radius_squared") {
            cfg.radius_squared = parse_double(val, line);
            if (cfg.radius_squared <= 0)
                throw ConfigError(line, "radius_squared must be positive");
        } else if (key == "quad_degree") {
            cfg.quad_degree = static_cast<int>(parse_double(val, line));
        } else if (key == "solver_rtol") {
            cfg.solver_rtol = parse_double(val, line);
        } else if (key == "out_dir") {
            cfg.out_dir = val;
        } else if (key == "emit_vtk") {
            cfg.emit_vtk = val == "1" || val == "true";
        } else if (key == "export_matrices") {
            cfg.export_matrices = val == "1" || val == "true";
        } else if (key == "dump_mesh") {
            cfg.dump_mesh = val == "1" || val == "true";
        } else {
            throw ConfigError(line, "unknown key '" + key + "'");
        }
    }
    validate_h_list(cfg.h_list, h_line);
    return cfg;
}

StudyConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open config " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

void write_svg_loglog(const std::string& path, const std::string& ylabel,
                      const std::vector<double>& hs, const std::vector<double>& errs) {
    std::vector<std::pair<double, double>> data;
    for (size_t i = 0; i < hs.size(); ++i)
        if (errs[i] > 0)
            data.emplace_back(std::log10(hs[i]), std::log10(errs[i]));
    std::ofstream os(path);
    if (!os)
        throw std::runtime_error("cannot open " + path);
    const int W = 480, H = 360, ml = 70, mr = 20, mt = 20, mb = 50;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
       << "\">\n";
    os << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
    if (data.empty()) {
        os << "</svg>\n";
        return;
    }
    double x0 = data.front().first, x1 = data.front().first;
    double y0 = data.front().second, y1 = data.front().second;
    for (auto& d : data) {
        x0 = std::min(x0, d.first);
        x1 = std::max(x1, d.first);
        y0 = std::min(y0, d.second);
        y1 = std::max(y1, d.second);
    }
    x0 = std::floor(x0 - 0.05);
    x1 = std::ceil(x1 + 0.05);
    y0 = std::floor(y0 - 0.05);
    y1 = std::ceil(y1 + 0.05);
    auto px = [&](double lx) { return ml + (lx - x0) / (x1 - x0) * (W - ml - mr); };
    auto py = [&](double ly) { return H - mb - (ly - y0) / (y1 - y0) * (H - mt - mb); };
    for (int d = static_cast<int>(x0); d <= static_cast<int>(x1); ++d)
        os << "<line x1=\"" << px(d) << "\" y1=\"" << py(y0) << "\" x2=\"" << px(d) << "\" y2=\""
           << py(y1) << "\" stroke=\"#ddd\"/>\n"
           << "<text x=\"" << px(d) << "\" y=\"" << H - mb + 18
           << "\" font-size=\"11\" text-anchor=\"middle\">1e" << d << "</text>\n";
    for (int d = static_cast<int>(y0); d <= static_cast<int>(y1); ++d)
        os << "<line x1=\"" << px(x0) << "\" y1=\"" << py(d) << "\" x2=\"" << px(x1) << "\" y2=\""
           << py(d) << "\" stroke=\"#ddd\"/>\n"
           << "<text x=\"" << ml - 6 << "\" y=\"" << py(d) + 4
           << "\" font-size=\"11\" text-anchor=\"end\">1e" << d << "</text>\n";
    os << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << W - ml - mr << "\" height=\""
       << H - mt - mb << "\" fill=\"none\" stroke=\"black\"/>\n";
    os << "<polyline fill=\"none\" stroke=\"#1f5fbf\" stroke-width=\"1.5\" points=\"";
    for (auto& d : data)
        os << px(d.first) << "," << py(d.second) << " ";
    os << "\"/>\n";
    for (auto& d : data)
        os << "<circle cx=\"" << px(d.first) << "\" cy=\"" << py(d.second)
           << "\" r=\"3\" fill=\"#1f5fbf\"/>\n";
    os << "<text x=\"" << (ml + W - mr) / 2 << "\" y=\"" << H - 12
       << "\" font-size=\"12\" text-anchor=\"middle\">h</text>\n";
    os << "<text x=\"16\" y=\"" << (mt + H - mb) / 2
       << "\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
       << (mt + H - mb) / 2 << ")\">" << ylabel << "</text>\n";
    os << "</svg>\n";
}

} // namespace

std::string csv_text(const StudyResult& res) {
    std::ostringstream os;
    os << "h,n_u,n_p,err_h1_u,rate_u,err_l2_p,rate_p,err_div,rate_div,err_div_interior,flux,"
          "seconds\n";
    const StudyRow* prev = nullptr;
    for (const auto& r : res.rows) {
        os << fmt(r.h) << ",";
        if (!r.ok) {
            os << ",,,,,,,,,,\n";
            prev = nullptr;
            continue;
        }
        os << r.n_u << "," << r.n_p << "," << fmt(r.err_h1_u) << ",";
        if (prev)
            os << fmt(std::log2(prev->err_h1_u / r.err_h1_u));
        os << "," << fmt(r.err_l2_p) << ",";
        if (prev)
            os << fmt(std::log2(prev->err_l2_p / r.err_l2_p));
        os << "," << fmt(r.err_div) << ",";
        if (prev)
            os << fmt(std::log2(prev->err_div / r.err_div));
        os << "," << fmt(r.err_div_interior) << "," << fmt(r.flux) << "," << fmt(r.seconds)
           << "\n";
        prev = &r;
    }
    return os.str();
}

StudyResult run_study(const StudyConfig& cfg) {
    namespace fs = std::filesystem;
    fs::create_directories(cfg.out_dir);
    StudyResult res;
    res.all_ok = true;
    const Circle dom = cfg.circle();
    const int qdeg = cfg.resolved_quad_degree();

    for (double h : cfg.h_list) {
        StudyRow row;
        row.h = h;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            const double n_real = 1.0 / h;
            const int n = static_cast<int>(std::lround(n_real));
            if (n < 1 || std::abs(n_real - n) > 1e-6 * n)
                throw std::runtime_error("h must equal 1/N for integer N");
            MethodParams params;
            params.k = cfg.degree;
            params.gamma = cfg.gamma.resolve(h);
            params.eta = cfg.eta.resolve(h);

            const BackgroundMesh macro = build_type1_mesh(n);
            const CtMesh ct = clough_tocher_refine(macro);
            const CutTopology topo = classify(ct, dom);
            const SvSpace sp = build_space(ct, topo, cfg.degree);
            const RuleSet rules = build_rules(ct, topo, dom, qdeg);
            const ManufacturedSolution exact = make_vortex_solution();
            const AssembledSystem sys = assemble_system(sp, rules, exact.f, exact.g);
            SolveOptions sopts;
            sopts.rtol = cfg.solver_rtol;
            const SaddleSolution sol = solve(sys, params, sopts);
            const RuleSet err_rules =
                build_rules(ct, topo, dom, std::max(qdeg, 2 * cfg.degree + 4));
            const ErrorReport rep = compute_errors(sp, err_rules, sol.u, sol.p, exact);

            row.n_u = rep.n_u;
            row.n_p = rep.n_p;
            row.err_h1_u = rep.err_h1_u;
            row.err_l2_p = rep.err_l2_p;
            row.err_div = rep.err_div;
            row.err_div_interior = rep.err_div_interior;
            row.flux = rep.flux;
            row.ok = true;

            const std::string tag = "n" + std::to_string(n);
            if (cfg.dump_mesh)
                write_vtk_mesh(ct, cfg.out_dir + "/mesh_" + tag + ".vtk");
            if (cfg.emit_vtk)
                emit_divergence_field(sp, rules, sol.u, cfg.out_dir + "/div_" + tag + ".vtk");
            if (cfg.export_matrices) {
                write_matrix_market(sys.A(params), cfg.out_dir + "/A_" + tag + ".mtx");
                write_matrix_market(sys.B, cfg.out_dir + "/B_" + tag + ".mtx");
                write_matrix_market(sys.J, cfg.out_dir + "/J_" + tag + ".mtx");
            }
        } catch (const std::exception& e) {
            row.ok = false;
            row.error = e.what();
            res.all_ok = false;
        }
        row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        res.rows.push_back(row);
    }

    res.csv_path = cfg.out_dir + "/study.csv";
    std::ofstream csv(res.csv_path);
    csv << csv_text(res);

    std::vector<double> hs, e1, e2, e3;
    for (const auto& r : res.rows)
        if (r.ok) {
            hs.push_back(r.h);
            e1.push_back(r.err_h1_u);
            e2.push_back(r.err_l2_p);
            e3.push_back(r.err_div);
        }
    write_svg_loglog(cfg.out_dir + "/err_h1_u.svg", "H1 velocity error", hs, e1);
    write_svg_loglog(cfg.out_dir + "/err_l2_p.svg", "L2 pressure error", hs, e2);
    write_svg_loglog(cfg.out_dir + "/err_div.svg", "L2 divergence", hs, e3);
    return res;
}

void emit_divergence_field(const SvSpace& sp, const RuleSet& rules, const Eigen::VectorXd& u,
                           const std::string& path) {
    const CtMesh& ct = *sp.mesh;
    const CutTopology& topo = *sp.topo;
    std::vector<double> values;
    values.reserve(topo.active_cells.size());
    for (int cell : topo.active_cells) {
        if (!topo.in_strip[cell]) {
            values.push_back(0.0); // divergence-free interior
            continue;
        }
        const QuadRule vol = rules.volume(ct, topo, cell);
        double num = 0, den = 0;
        for (size_t q = 0; q < vol.size(); ++q) {
            num += vol.weights[q] * std::abs(velocity_divergence(sp, u, cell, vol.points[q]));
            den += vol.weights[q];
        }
        values.push_back(den > 0 ? num / den : 0.0);
    }
    write_vtk_cell_scalar(ct, topo.active_cells, values, "abs_div_u", path);
}

} // namespace cutsv
