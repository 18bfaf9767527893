#include "levyfem/harness.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "levyfem/analytic.hpp"

namespace levyfem {

namespace {

[[noreturn]] void stage_fail(const char* stage, const std::exception& e) {
    throw std::runtime_error(std::string("stage ") + stage + ": " + e.what());
}

void run_parallel(int n_tasks, int threads, const std::function<void(int)>& fn) {
    if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
    threads = std::max(1, std::min(threads, n_tasks));
    if (threads == 1) {
        for (int i = 0; i < n_tasks; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < n_tasks; i = next.fetch_add(1)) fn(i);
        });
    for (auto& th : pool) th.join();
}

int derive_steps(double T, double dt) {
    const double raw = T / dt;
    const int n = static_cast<int>(std::lround(raw));
    if (std::abs(raw - n) > 1e-9)
        throw std::invalid_argument("dt does not divide the maturity into whole steps");
    return n;
}

void write_text_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream os(tmp);
        os << content;
        if (!os) throw std::runtime_error("cannot write " + tmp.string());
    }
    fs::rename(tmp, target);
}

}  // namespace

PriceResult price(const RunConfig& config) {
    try {
        config.validate();
    } catch (const std::exception& e) {
        stage_fail("config", e);
    }

    FemSpace space;
    try {
        space = build_mesh(config.mesh_half_width, config.n_per_side);
    } catch (const std::exception& e) {
        stage_fail("mesh", e);
    }

    PayoffSpec spec = config.make_payoff(space.h);
    SchemeConfig cfg = config.scheme;
    cfg.n_steps = derive_steps(config.model.T, cfg.dt);

    StepObserver observer;
    if (config.checkpoint_every > 0) {
        const int every = config.checkpoint_every;
        const FemSpace* sp = &space;
        const std::string prefix = config.checkpoint_prefix;
        observer = [sp, every, prefix](const SolveState& st) {
            if (st.step_index % every != 0) return;
            char name[64];
            std::snprintf(name, sizeof name, "%s_%05d.csv", prefix.c_str(), st.step_index);
            std::ostringstream os;
            os << "x1,x2,u\n";
            char buf[128];
            for (int i = 0; i < sp->num_vertices(); ++i) {
                std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", sp->vertices[i][0],
                              sp->vertices[i][1], st.u[i]);
                os << buf;
            }
            write_text_atomic(name, os.str());
        };
    }

    PriceResult out;
    try {
        out.surface = run(space, spec, cfg, config.quadrature, observer);
    } catch (const std::exception& e) {
        stage_fail("solve", e);
    }

    try {
        out.report.S1 = config.spot[0];
        out.report.S2 = config.spot[1];
        out.report.fem = out.surface.price(config.spot[0], config.spot[1]);
        if (config.kind == PayoffKind::Polynomial) {
            out.report.bs = bs_polynomial_price(config.model, 0.0, config.spot[0], config.spot[1]);
            out.report.jd = elm_polynomial_price(config.model, 0.0, config.spot[0], config.spot[1]);
            out.report.rel_err = std::abs(out.report.fem - *out.report.jd) / *out.report.jd;
        }
    } catch (const std::exception& e) {
        stage_fail("report", e);
    }

    if (!config.output_path.empty()) {
        try {
            export_surface(out.surface, config.window, config.output_path, config.format);
        } catch (const std::exception& e) {
            stage_fail("export", e);
        }
    }
    return out;
}

// Published polynomial-option rows (prices in units of 1000).
const std::array<PrintedRow34, 12> kPrintedTable3 = {{
    {0.1, 0.3, 0.1, 0.1, 6.4363, 6.4899},
    {0.1, 0.3, 0.1, 0.2, 6.4421, 6.4958},
    {0.1, 0.3, 0.1, 0.3, 6.4511, 6.5050},
    {0.1, 0.3, 0.2, 0.2, 6.4488, 6.5026},
    {0.1, 0.3, 0.2, 0.3, 6.4589, 6.5128},
    {0.1, 0.3, 0.3, 0.3, 6.4699, 6.5239},
    {0.9, 0.3, 0.1, 0.1, 6.7339, 7.2753},
    {0.9, 0.3, 0.1, 0.2, 6.7892, 7.3380},
    {0.9, 0.3, 0.1, 0.3, 6.8781, 7.4398},
    {0.9, 0.3, 0.2, 0.2, 6.8536, 7.5208},
    {0.9, 0.3, 0.2, 0.3, 6.9518, 7.6412},
    {0.9, 0.3, 0.3, 0.3, 7.0593, 7.4098},
}};

const std::array<PrintedRow34, 12> kPrintedTable4 = {{
    {0.1, -0.3, 0.1, 0.1, 6.4343, 6.4880},
    {0.1, -0.3, 0.1, 0.2, 6.4382, 6.4919},
    {0.1, -0.3, 0.1, 0.3, 6.4453, 6.4992},
    {0.1, -0.3, 0.2, 0.2, 6.4411, 6.4949},
    {0.1, -0.3, 0.2, 0.3, 6.4473, 6.5012},
    {0.1, -0.3, 0.3, 0.3, 6.4525, 6.5065},
    {0.9, -0.3, 0.1, 0.1, 6.7158, 7.2572},
    {0.9, -0.3, 0.1, 0.2, 6.7530, 7.3018},
    {0.9, -0.3, 0.1, 0.3, 6.8239, 7.3855},
    {0.9, -0.3, 0.2, 0.2, 6.7813, 7.3375},
    {0.9, -0.3, 0.2, 0.3, 6.8433, 7.4124},
    {0.9, -0.3, 0.3, 0.3, 6.8966, 7.4785},
}};

// Published two-asset put rows (raw currency).
const std::array<PrintedRow6, 12> kPrintedTable6 = {{
    {0.1, 0.1, 0.1, 1.8015, 1.7997, 1.8038},
    {0.1, 0.1, 0.2, 1.8342, 1.8329, 1.8389},
    {0.1, 0.1, 0.3, 1.9127, 1.9096, 1.9161},
    {0.1, 0.2, 0.2, 1.8857, 1.8806, 1.8901},
    {0.1, 0.2, 0.3, 1.9834, 1.9794, 1.9873},
    {0.1, 0.3, 0.3, 2.0723, 2.0702, 2.0782},
    {0.9, 0.1, 0.1, 0.6059, 0.6012, 0.7002},
    {0.9, 0.1, 0.2, 1.2413, 1.2392, 1.2485},
    {0.9, 0.1, 0.3, 1.9280, 1.9231, 1.9317},
    {0.9, 0.2, 0.2, 1.7769, 1.7700, 1.7810},
    {0.9, 0.2, 0.3, 2.4397, 2.4352, 2.4427},
    {0.9, 0.3, 0.3, 3.0011, 2.9923, 3.0123},
}};

namespace {

ModelParams table_model(double tau, double rho, double s1, double s2, double K) {
    ModelParams p;
    p.r = 0.05;
    p.sigma = {s1, s2};
    p.rho = rho;
    p.lambda = {0.1, 0.1};
    p.nu = {-0.9, -0.9};
    p.gamma = {0.45, 0.45};
    p.T = tau;
    p.K = K;
    p.w = {0.5, 0.5};
    return p;
}

RunConfig table_run_config(const TableOptions& opt, const ModelParams& model, PayoffKind kind) {
    RunConfig c;
    c.model = model;
    c.kind = kind;
    c.delta_in_h = !(opt.delta_abs > 0.0);
    c.delta_value = opt.delta_abs > 0.0 ? opt.delta_abs : opt.delta_in_h;
    c.mesh_half_width = opt.mesh_half_width;
    c.n_per_side = opt.n_per_side;
    c.scheme.scheme = opt.scheme;
    c.scheme.dt = opt.dt;
    c.quadrature = opt.quadrature;
    c.spot = {40.0, 40.0};
    c.window.s1_hi = c.window.s2_hi = std::exp(opt.mesh_half_width) * 0.99;
    return c;
}

}  // namespace

TableReport reproduce_tables(int which, const TableOptions& opt) {
    if (which != 3 && which != 4 && which != 6)
        throw std::invalid_argument("reproduce_tables: table must be 3, 4 or 6");

    TableReport rep;
    rep.which = which;
    rep.threshold = opt.threshold > 0.0 ? opt.threshold : (which == 6 ? 0.05 : 0.02);
    rep.rows.resize(12);

    if (which == 3 || which == 4) {
        const auto& printed = which == 3 ? kPrintedTable3 : kPrintedTable4;
        run_parallel(12, opt.threads, [&](int i) {
            const PrintedRow34& pr = printed[i];
            TableRow& row = rep.rows[i];
            row.tau = pr.tau;
            row.rho = pr.rho;
            row.s1 = pr.s1;
            row.s2 = pr.s2;
            try {
                const ModelParams m = table_model(pr.tau, pr.rho, pr.s1, pr.s2, 80.0);
                const RunConfig rc = table_run_config(opt, m, PayoffKind::Polynomial);
                const PriceResult res = price(rc);
                row.bs = *res.report.bs / 1000.0;
                row.jd = *res.report.jd / 1000.0;
                row.fem = res.report.fem / 1000.0;
                row.rel_err = *res.report.rel_err;
                row.flagged = row.rel_err > rep.threshold;
            } catch (const std::exception& e) {
                row.error = e.what();
            }
        });
        std::ostringstream csv;
        csv << "tau,rho,sigma1,sigma2,BS,JD,FEM,rel_err\n";
        char buf[192];
        for (const auto& r : rep.rows) {
            std::snprintf(buf, sizeof buf, "%.2f,%.2f,%.2f,%.2f,%.6f,%.6f,%.6f,%.6f\n", r.tau,
                          r.rho, r.s1, r.s2, r.bs, r.jd, r.fem, r.rel_err);
            csv << buf;
        }
        rep.csv = csv.str();
    } else {
        run_parallel(12, opt.threads, [&](int i) {
            const PrintedRow6& pr = kPrintedTable6[i];
            TableRow& row = rep.rows[i];
            row.tau = pr.tau;
            row.rho = 0.3;
            row.s1 = pr.s1;
            row.s2 = pr.s2;
            try {
                const ModelParams m = table_model(pr.tau, 0.3, pr.s1, pr.s2, 40.0);
                const PayoffKind kinds[3] = {PayoffKind::BasketPut, PayoffKind::WorstOfTwo,
                                             PayoffKind::MinOfTwoPut};
                double v[3];
                for (int k = 0; k < 3; ++k) {
                    const RunConfig rc = table_run_config(opt, m, kinds[k]);
                    v[k] = price(rc).report.fem;
                }
                row.basket = v[0];
                row.max_put = v[1];
                row.min_put = v[2];
                row.ordering_ok = row.max_put <= row.basket + 1e-12 &&
                                  row.basket <= row.min_put + 1e-12;
                const double printed[3] = {pr.basket, pr.max_put, pr.min_put};
                const double got[3] = {v[0], v[1], v[2]};
                for (int k = 0; k < 3; ++k)
                    row.flagged = row.flagged ||
                                  std::abs(got[k] - printed[k]) / printed[k] > rep.threshold;
            } catch (const std::exception& e) {
                row.error = e.what();
            }
        });
        std::ostringstream csv;
        csv << "tau,sigma1,sigma2,basket_put,max_of_2_put,min_of_2_put,ordering_ok\n";
        char buf[192];
        for (const auto& r : rep.rows) {
            std::snprintf(buf, sizeof buf, "%.2f,%.2f,%.2f,%.6f,%.6f,%.6f,%d\n", r.tau, r.s1, r.s2,
                          r.basket, r.max_put, r.min_put, r.ordering_ok ? 1 : 0);
            csv << buf;
        }
        rep.csv = csv.str();
    }

    for (const auto& r : rep.rows) {
        rep.any_flagged = rep.any_flagged || r.flagged || !r.ordering_ok;
        rep.any_failed = rep.any_failed || !r.error.empty();
    }
    if (!opt.out_dir.empty()) {
        write_text_atomic(opt.out_dir + "/table" + std::to_string(which) + ".csv", rep.csv);
    }
    return rep;
}

StudyAxis study_axis_from_string(const std::string& s) {
    if (s == "h") return StudyAxis::h;
    if (s == "dt") return StudyAxis::dt;
    if (s == "delta") return StudyAxis::delta;
    if (s == "M") return StudyAxis::M;
    if (s == "quad") return StudyAxis::quad;
    throw std::invalid_argument("unknown study axis: " + s);
}

const char* study_axis_name(StudyAxis a) {
    switch (a) {
        case StudyAxis::h: return "h";
        case StudyAxis::dt: return "dt";
        case StudyAxis::delta: return "delta";
        case StudyAxis::M: return "M";
        case StudyAxis::quad: return "quad";
    }
    return "?";
}

double fit_order(const std::vector<double>& params, const std::vector<double>& errors) {
    if (params.size() != errors.size() || params.size() < 2)
        throw std::invalid_argument("fit_order: need matching ladders with >= 2 levels");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const int n = static_cast<int>(params.size());
    for (int i = 0; i < n; ++i) {
        const double lx = std::log(params[i]);
        const double ly = std::log(std::max(errors[i], 1e-300));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

namespace {

struct FieldErrors {
    double l2 = 0.0, h1 = 0.0, max = 0.0;
};

/// Triangle-quadrature errors of a nodal solution against an analytic field
/// at fixed tau, normalized by the field norms.
FieldErrors errors_vs_field(const FemSpace& space, const Eigen::VectorXd& u, double tau,
                            const FieldProbe& field) {
    double e2 = 0, eh = 0, n2 = 0, nh = 0, emax = 0, umax = 0;
    for (const auto& t : space.triangles) {
        const Eigen::Vector2d *p[3] = {&space.vertices[t[0]], &space.vertices[t[1]],
                                       &space.vertices[t[2]]};
        const double uv[3] = {u[t[0]], u[t[1]], u[t[2]]};
        const double twoA = ((*p[1] - *p[0])[0] * (*p[2] - *p[0])[1] -
                             (*p[2] - *p[0])[0] * (*p[1] - *p[0])[1]);
        const double area = 0.5 * std::abs(twoA);
        const double gx = (uv[0] * ((*p[1])[1] - (*p[2])[1]) + uv[1] * ((*p[2])[1] - (*p[0])[1]) +
                           uv[2] * ((*p[0])[1] - (*p[1])[1])) / twoA;
        const double gy = (uv[0] * ((*p[2])[0] - (*p[1])[0]) + uv[1] * ((*p[0])[0] - (*p[2])[0]) +
                           uv[2] * ((*p[1])[0] - (*p[0])[0])) / twoA;
        for (int e = 0; e < 3; ++e) {
            const Eigen::Vector2d m = 0.5 * (*p[e] + *p[(e + 1) % 3]);
            const double uh = 0.5 * (uv[e] + uv[(e + 1) % 3]);
            const double ux = field.value(tau, m);
            const Eigen::Vector2d gex = field.gradient(tau, m);
            const double w = area / 3.0;
            e2 += w * (uh - ux) * (uh - ux);
            n2 += w * ux * ux;
            const double gd = (gx - gex[0]) * (gx - gex[0]) + (gy - gex[1]) * (gy - gex[1]);
            eh += w * gd;
            nh += w * gex.squaredNorm();
        }
    }
    for (int i = 0; i < space.num_vertices(); ++i) {
        emax = std::max(emax, std::abs(u[i] - field.value(tau, space.vertices[i])));
        umax = std::max(umax, std::abs(field.value(tau, space.vertices[i])));
    }
    FieldErrors out;
    out.l2 = std::sqrt(e2 / n2);
    out.h1 = std::sqrt((e2 + eh) / (n2 + nh));
    out.max = emax / umax;
    return out;
}

PriceSurface run_config(const RunConfig& rc) {
    RunConfig c = rc;
    c.output_path.clear();
    c.checkpoint_every = 0;
    return price(c).surface;
}

/// Mass-weighted relative L2 and max-norm distance between two nodal vectors
/// on the same mesh.
FieldErrors diff_errors(const FemSpace& space, const Eigen::VectorXd& a,
                        const Eigen::VectorXd& b) {
    const SparseOperator mass = assemble_mass(space);
    const Eigen::VectorXd d = a - b;
    FieldErrors out;
    out.l2 = std::sqrt(d.dot(mass * d) / std::max(1e-300, b.dot(mass * b)));
    out.max = d.lpNorm<Eigen::Infinity>() / b.lpNorm<Eigen::Infinity>();
    out.h1 = 0.0;
    return out;
}

}  // namespace

StudyReport convergence_study(StudyAxis axis, const RunConfig& base, int levels) {
    if (levels < 3) throw std::invalid_argument("convergence_study: levels must be >= 3");
    base.validate();

    StudyReport rep;
    rep.axis = axis;

    switch (axis) {
        case StudyAxis::h: {
            // n-1 halves from the base (finest) down; measured against the
            // closed form for the polynomial payoff, else against the next
            // finer mesh by nodal interpolation.
            std::vector<int> ns;
            for (int k = levels - 1; k >= 0; --k) {
                const int nm1 = (base.n_per_side - 1) >> k;
                if (nm1 < 4 || (nm1 << k) != base.n_per_side - 1)
                    throw std::invalid_argument("h study: n_per_side-1 must halve cleanly");
                ns.push_back(nm1 + 1);
            }
            const bool oracle = base.kind == PayoffKind::Polynomial;
            FieldProbe field;
            if (oracle) field = make_elm_field(base.model);
            std::vector<PriceSurface> runs(ns.size());
            for (std::size_t i = 0; i < ns.size(); ++i) {
                RunConfig c = base;
                c.n_per_side = ns[i];
                runs[i] = run_config(c);
            }
            for (std::size_t i = 0; i < ns.size(); ++i) {
                StudyLevel lv;
                lv.param = runs[i].space.h;
                if (oracle) {
                    const FieldErrors e =
                        errors_vs_field(runs[i].space, runs[i].u, runs[i].tau, field);
                    lv.err_l2 = e.l2;
                    lv.err_h1 = e.h1;
                    lv.err_max = e.max;
                } else {
                    if (i + 1 >= ns.size()) continue;  // finest has no reference
                    const PriceSurface& fine = runs.back();
                    Eigen::VectorXd ref(runs[i].space.num_vertices());
                    for (int v = 0; v < runs[i].space.num_vertices(); ++v)
                        ref[v] = fine.value_u(runs[i].space.vertices[v]);
                    const FieldErrors e = diff_errors(runs[i].space, runs[i].u, ref);
                    lv.err_l2 = e.l2;
                    lv.err_max = e.max;
                }
                rep.levels.push_back(lv);
            }
            break;
        }
        case StudyAxis::dt: {
            std::vector<double> dts;
            for (int k = 0; k < levels; ++k) dts.push_back(base.scheme.dt / (1 << k));
            RunConfig cref = base;
            cref.scheme.dt = dts.back() / 8.0;
            const PriceSurface ref = run_config(cref);
            for (double dt : dts) {
                RunConfig c = base;
                c.scheme.dt = dt;
                const PriceSurface s = run_config(c);
                const FieldErrors e = diff_errors(s.space, s.u, ref.u);
                rep.levels.push_back({dt, e.l2, 0.0, e.max});
            }
            break;
        }
        case StudyAxis::delta: {
            std::vector<double> deltas;
            const double d0 = base.resolved_delta(build_mesh(base.mesh_half_width,
                                                             base.n_per_side).h);
            for (int k = 0; k < levels; ++k) deltas.push_back(d0 / (1 << k));
            RunConfig cref = base;
            cref.delta_in_h = false;
            cref.delta_value = deltas.back() / 4.0;
            const PriceSurface ref = run_config(cref);
            for (double d : deltas) {
                RunConfig c = base;
                c.delta_in_h = false;
                c.delta_value = d;
                const PriceSurface s = run_config(c);
                const FieldErrors e = diff_errors(s.space, s.u, ref.u);
                rep.levels.push_back({d, e.l2, 0.0, e.max});
            }
            break;
        }
        case StudyAxis::M: {
            // Fixed cells-per-unit; error over the inner window against the
            // widest-domain run, compared at shared vertices.
            const double cpu = (base.n_per_side - 1) / (2.0 * base.mesh_half_width);
            if (std::abs(cpu * 0.5 - std::round(cpu * 0.5)) > 1e-9)
                throw std::invalid_argument("M study: cells-per-unit must be even");
            std::vector<double> Ms;
            for (int k = 0; k < levels; ++k) Ms.push_back(base.mesh_half_width + 0.5 * k);
            const double Mref = Ms.back() + 1.0;
            auto make = [&](double M) {
                RunConfig c = base;
                c.mesh_half_width = M;
                c.n_per_side = static_cast<int>(std::lround(2.0 * M * cpu)) + 1;
                c.window.s1_hi = c.window.s2_hi = std::exp(M) * 0.99;
                return run_config(c);
            };
            const PriceSurface ref = make(Mref);
            const double win = 1.5;
            for (double M : Ms) {
                const PriceSurface s = make(M);
                double emax = 0.0, e2 = 0.0, n2 = 0.0;
                const double cell = s.space.spacing * s.space.spacing;
                for (int v = 0; v < s.space.num_vertices(); ++v) {
                    const Eigen::Vector2d& x = s.space.vertices[v];
                    if (std::abs(x[0]) > win || std::abs(x[1]) > win) continue;
                    const double rv = ref.value_u(x);
                    const double dv = s.u[v] - rv;
                    emax = std::max(emax, std::abs(dv));
                    e2 += cell * dv * dv;
                    n2 += cell * rv * rv;
                }
                rep.levels.push_back({M, std::sqrt(e2 / std::max(n2, 1e-300)), 0.0, emax});
            }
            break;
        }
        case StudyAxis::quad: {
            std::vector<int> nodes;
            for (int k = 0; k < levels; ++k) nodes.push_back(base.quadrature.n_nodes << k);
            RunConfig cref = base;
            cref.quadrature.n_nodes = nodes.back() * 2;
            const PriceSurface ref = run_config(cref);
            for (int nn : nodes) {
                RunConfig c = base;
                c.quadrature.n_nodes = nn;
                const PriceSurface s = run_config(c);
                const FieldErrors e = diff_errors(s.space, s.u, ref.u);
                rep.levels.push_back({static_cast<double>(nn), e.l2, 0.0, e.max});
            }
            break;
        }
    }

    std::vector<double> ps, e2s, ehs;
    for (const auto& lv : rep.levels) {
        ps.push_back(lv.param);
        e2s.push_back(lv.err_l2);
        if (lv.err_h1 > 0.0) ehs.push_back(lv.err_h1);
    }
    if (ps.size() >= 2 && axis != StudyAxis::M && axis != StudyAxis::quad) {
        rep.fitted_order_l2 = fit_order(ps, e2s);
        if (ehs.size() == ps.size()) rep.fitted_order_h1 = fit_order(ps, ehs);
    }
    for (std::size_t i = 1; i < rep.levels.size(); ++i) {
        const bool decreasing = axis == StudyAxis::M || axis == StudyAxis::quad
                                    ? rep.levels[i].err_max < rep.levels[i - 1].err_max
                                    : rep.levels[i].err_l2 < rep.levels[i - 1].err_l2;
        rep.monotone = rep.monotone && decreasing;
    }

    std::ostringstream csv;
    csv << "axis,param,err_l2,err_h1,err_max\n";
    char buf[160];
    for (const auto& lv : rep.levels) {
        std::snprintf(buf, sizeof buf, "%s,%.10g,%.10g,%.10g,%.10g\n", study_axis_name(axis),
                      lv.param, lv.err_l2, lv.err_h1, lv.err_max);
        csv << buf;
    }
    std::snprintf(buf, sizeof buf, "# fitted_order_l2=%.4f fitted_order_h1=%.4f monotone=%d\n",
                  rep.fitted_order_l2, rep.fitted_order_h1, rep.monotone ? 1 : 0);
    csv << buf;
    rep.csv = csv.str();
    return rep;
}

JensenReport jensen_bound_check(const RunConfig& base, double slack) {
    if (base.kind != PayoffKind::BasketPut)
        throw std::invalid_argument("jensen_bound_check: base config must be a basket put");
    JensenReport rep;
    rep.basket = price(base).report.fem;

    // Moneyness decomposition K = sum_i w_i k S_i(0) with a common k.
    const double k =
        base.model.K / (base.model.w[0] * base.spot[0] + base.model.w[1] * base.spot[1]);
    double puts[2];
    for (int i = 0; i < 2; ++i) {
        RunConfig c = base;
        c.model.w = i == 0 ? std::array<double, 2>{1.0, 0.0} : std::array<double, 2>{0.0, 1.0};
        c.model.K = k * base.spot[i];
        puts[i] = price(c).report.fem;
    }
    rep.put1 = puts[0];
    rep.put2 = puts[1];
    rep.portfolio = base.model.w[0] * puts[0] + base.model.w[1] * puts[1];
    rep.holds = rep.basket <= rep.portfolio * (1.0 + slack) + 1e-12;
    return rep;
}

}  // namespace levyfem
