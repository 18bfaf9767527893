#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "levyfem/config.hpp"
#include "levyfem/harness.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitThreshold = 1;
constexpr int kExitConfig = 2;

int cmd_price(const std::string& config_path) {
    const levyfem::RunConfig cfg = levyfem::parse_config_file(config_path);
    const levyfem::PriceResult res = levyfem::price(cfg);
    std::printf("payoff      %s\n", levyfem::payoff_kind_name(cfg.kind));
    std::printf("scheme      %s  dt=%g  steps=%d\n", res.surface.meta.scheme.c_str(),
                res.surface.meta.dt, res.surface.meta.n_steps);
    std::printf("mesh        M=%g  n=%d  h=%.6g  delta=%.6g\n", res.surface.meta.domain_half_width,
                res.surface.meta.n_per_side, res.surface.space.h, res.surface.meta.delta);
    std::printf("spot        (%g, %g)\n", res.report.S1, res.report.S2);
    std::printf("price       %.10g\n", res.report.fem);
    if (res.report.jd) {
        std::printf("bs_analytic %.10g\n", *res.report.bs);
        std::printf("jd_analytic %.10g\n", *res.report.jd);
        std::printf("rel_err     %.4f%%\n", 100.0 * *res.report.rel_err);
    }
    if (!cfg.output_path.empty()) std::printf("surface     %s\n", cfg.output_path.c_str());
    return kExitOk;
}

int cmd_tables(int which, const std::string& out_dir) {
    levyfem::TableOptions opt;
    opt.out_dir = out_dir;
    const levyfem::TableReport rep = levyfem::reproduce_tables(which, opt);
    std::fputs(rep.csv.c_str(), stdout);
    if (rep.any_failed) {
        for (const auto& r : rep.rows)
            if (!r.error.empty())
                std::fprintf(stderr, "row tau=%g sigma=(%g,%g) failed: %s\n", r.tau, r.s1, r.s2,
                             r.error.c_str());
        return kExitThreshold;
    }
    if (rep.any_flagged) {
        std::fprintf(stderr, "threshold %.2f%% exceeded on at least one row\n",
                     100.0 * rep.threshold);
        return kExitThreshold;
    }
    return kExitOk;
}

int cmd_converge(const std::string& axis, const std::string& config_path, int levels,
                 const std::string& out) {
    levyfem::RunConfig base;
    if (!config_path.empty()) {
        base = levyfem::parse_config_file(config_path);
    } else {
        // Polynomial reference setup, suitable for the h and dt axes.
        base.model.r = 0.05;
        base.model.sigma = {0.2, 0.3};
        base.model.rho = 0.3;
        base.model.lambda = {0.1, 0.1};
        base.model.nu = {-0.9, -0.9};
        base.model.gamma = {0.45, 0.45};
        base.model.K = 80.0;
        base.model.T = 0.1;
        base.kind = levyfem::PayoffKind::Polynomial;
        base.n_per_side = 129;
        base.scheme.dt = 0.0025;
        base.quadrature.n_nodes = 64;
        base.window.s1_hi = base.window.s2_hi = 80.0;
    }
    const levyfem::StudyReport rep =
        levyfem::convergence_study(levyfem::study_axis_from_string(axis), base, levels);
    std::fputs(rep.csv.c_str(), stdout);
    if (!out.empty()) {
        std::ofstream os(out);
        os << rep.csv;
    }
    if (!rep.monotone) std::fprintf(stderr, "note: error ladder is not monotone\n");
    return kExitOk;
}

int cmd_dump_mesh(double M, int n, const std::string& out) {
    const levyfem::FemSpace space = levyfem::build_mesh(M, n);
    if (out.empty()) {
        levyfem::dump_mesh_csv(space, std::cout);
    } else {
        std::ofstream os(out);
        levyfem::dump_mesh_csv(space, os);
    }
    return kExitOk;
}

int cmd_dump_quadrature(const std::string& config_path, int axis, const std::string& out) {
    const levyfem::RunConfig cfg = levyfem::parse_config_file(config_path);
    const levyfem::JumpQuadrature q = levyfem::build_quadrature(
        cfg.model, levyfem::Axis(axis), cfg.quadrature.n_nodes, cfg.quadrature.W);
    if (out.empty()) {
        levyfem::dump_quadrature_csv(q, std::cout);
    } else {
        std::ofstream os(out);
        levyfem::dump_quadrature_csv(q, os);
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Finite element pricer for two-asset options under Merton jump-diffusion"};
    app.require_subcommand(1);

    std::string config_path, out_dir, axis = "h", out_file;
    int which = 3, levels = 4, quad_axis = 1;
    double mesh_M = 4.5;
    int mesh_n = 129;

    auto* price_cmd = app.add_subcommand("price", "price one option from a config file");
    price_cmd->add_option("--config", config_path, "run configuration file")->required();

    auto* tables_cmd = app.add_subcommand("tables", "reproduce a published results table");
    tables_cmd->add_option("--which", which, "table number (3, 4 or 6)")
        ->check(CLI::IsMember({3, 4, 6}));
    tables_cmd->add_option("--out", out_dir, "directory for the comparison CSV");

    auto* conv_cmd = app.add_subcommand("converge", "refinement study on one axis");
    conv_cmd->add_option("--axis", axis, "h | dt | delta | M | quad");
    conv_cmd->add_option("--levels", levels, "ladder depth (>= 3)");
    conv_cmd->add_option("--config", config_path, "base run configuration");
    conv_cmd->add_option("--out", out_file, "CSV output path");

    auto* mesh_cmd = app.add_subcommand("dump-mesh", "write the triangulation as CSV");
    mesh_cmd->add_option("--half-width", mesh_M, "domain half-width M");
    mesh_cmd->add_option("--n", mesh_n, "vertices per side");
    mesh_cmd->add_option("--out", out_file, "output path (stdout if omitted)");

    auto* quad_cmd = app.add_subcommand("dump-quadrature", "write jump quadrature nodes/weights");
    quad_cmd->add_option("--config", config_path, "run configuration file")->required();
    quad_cmd->add_option("--axis", quad_axis, "jump component (1 or 2)")
        ->check(CLI::IsMember({1, 2}));
    quad_cmd->add_option("--out", out_file, "output path (stdout if omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (price_cmd->parsed()) return cmd_price(config_path);
        if (tables_cmd->parsed()) return cmd_tables(which, out_dir);
        if (conv_cmd->parsed()) return cmd_converge(axis, config_path, levels, out_file);
        if (mesh_cmd->parsed()) return cmd_dump_mesh(mesh_M, mesh_n, out_file);
        if (quad_cmd->parsed()) return cmd_dump_quadrature(config_path, quad_axis, out_file);
    } catch (const levyfem::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitThreshold;
    }
    return kExitConfig;
}
