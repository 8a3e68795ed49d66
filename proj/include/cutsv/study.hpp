#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cutsv/errors.hpp"
#include "cutsv/geometry.hpp"
#include "cutsv/solver.hpp"

namespace cutsv {

struct ConfigError : std::runtime_error {
    int line;
    ConfigError(int line_, const std::string& msg)
        : std::runtime_error("line " + std::to_string(line_) + ": " + msg), line(line_) {}
};

/// Parameter given either as a literal or as the rule "c/h".
struct ParamSpec {
    double value = 0;
    bool over_h = false;
    double resolve(double h) const { return over_h ? value / h : value; }
};

struct StudyConfig {
    std::vector<double> h_list{0.2, 0.1, 0.05, 0.025};
    ParamSpec gamma{0.0, false};
    ParamSpec eta{100.0, false};
    int degree = 2;
    double center_x = 0.5, center_y = 0.5, radius_squared = 0.2;
    int quad_degree = 0; // 0 resolves to 2k+2
    double solver_rtol = 1e-10;
    std::string out_dir = "study_out";
    bool emit_vtk = false;
    bool export_matrices = false;
    bool dump_mesh = false;

    Circle circle() const { return Circle{{center_x, center_y}, radius_squared}; }
    int resolved_quad_degree() const { return quad_degree > 0 ? quad_degree : 2 * degree + 2; }
};

/// Flat key=value text, '#' comments. Rejects unknown keys, malformed values
/// and non-halving h lists, reporting the offending line.
StudyConfig parse_config(const std::string& text);
StudyConfig load_config(const std::string& path);

struct StudyRow {
    double h = 0;
    int n_u = 0, n_p = 0;
    double err_h1_u = 0, rate_u = 0, err_l2_p = 0, rate_p = 0, err_div = 0, rate_div = 0;
    double err_div_interior = 0, flux = 0, seconds = 0;
    bool ok = false;
    std::string error;
};

struct StudyResult {
    std::vector<StudyRow> rows;
    bool all_ok = false;
    std::string csv_path;
};

StudyResult run_study(const StudyConfig& cfg);

/// Per-cell mean of |div u_h| over K, written as VTK cell data on the
/// active mesh; cells of the divergence-free interior record zero.
void emit_divergence_field(const SvSpace& sp, const RuleSet& rules, const Eigen::VectorXd& u,
                           const std::string& path);

std::string csv_text(const StudyResult& res);

} // namespace cutsv
