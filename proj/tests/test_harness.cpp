#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "levyfem/analytic.hpp"
#include "levyfem/config.hpp"
#include "levyfem/harness.hpp"
#include "support/oracles.hpp"

using namespace levyfem;

namespace {

std::string poly_cfg_text(int n = 33, double T = 0.1) {
    std::ostringstream os;
    os << "[model]\n"
          "diffusion_volatility = 0.1 0.1\n"
          "mean_jump_size = -0.9\n"
          "mean_jump_volatility = 0.45\n"
          "jump_intensity = 0.1\n"
          "correlation = 0.3\n"
          "interest_rate = 0.05\n"
          "strike = 80\n"
       << "maturity = " << T << "\n"
       << "weights = 0.5 0.5\n"
          "[payoff]\n"
          "kind = polynomial\n"
          "smoothing_delta = 2h\n"
          "[mesh]\n"
          "half_width = 4.5\n"
       << "n_per_side = " << n << "\n"
       << "[scheme]\n"
          "method = imex_cn\n"
          "dt = 0.01\n"
          "[quadrature]\n"
          "n_nodes = 64\n"
          "window_multiplier = 8\n"
          "[report]\n"
          "spot = 40 40\n"
          "window = 1 80 1 80\n"
          "window_points = 5\n";
    return os.str();
}

RunConfig poly_config(int n = 33, double T = 0.1) {
    std::istringstream is(poly_cfg_text(n, T));
    return parse_config(is);
}

}  // namespace

TEST(ParseConfig, ReadsAllSections) {
    const RunConfig c = poly_config();
    EXPECT_EQ(c.kind, PayoffKind::Polynomial);
    EXPECT_EQ(c.model.sigma[0], 0.1);
    EXPECT_EQ(c.model.nu[1], -0.9);  // single value broadcast to the pair
    EXPECT_EQ(c.model.K, 80.0);
    EXPECT_TRUE(c.delta_in_h);
    EXPECT_EQ(c.delta_value, 2.0);
    EXPECT_EQ(c.n_per_side, 33);
    EXPECT_EQ(c.scheme.scheme, Scheme::ImexCN);
    EXPECT_EQ(c.quadrature.n_nodes, 64);
    EXPECT_EQ(c.window.points, 5);
}

TEST(ParseConfig, AbsoluteDelta) {
    std::string text = poly_cfg_text();
    const auto pos = text.find("smoothing_delta = 2h");
    text.replace(pos, std::string("smoothing_delta = 2h").size(), "smoothing_delta = 0.15");
    std::istringstream is(text);
    const RunConfig c = parse_config(is);
    EXPECT_FALSE(c.delta_in_h);
    EXPECT_EQ(c.delta_value, 0.15);
    EXPECT_EQ(c.resolved_delta(0.05), 0.15);
}

TEST(ParseConfig, Rejections) {
    auto mutate = [&](const std::string& from, const std::string& to) {
        std::string text = poly_cfg_text();
        const auto pos = text.find(from);
        ASSERT_NE(pos, std::string::npos);
        text.replace(pos, from.size(), to);
        std::istringstream is(text);
        EXPECT_THROW(parse_config(is), ConfigError) << to;
    };
    mutate("correlation = 0.3", "correlation = 1.5");
    mutate("dt = 0.01", "dt = 0.03");            // does not divide maturity
    mutate("strike = 80", "strike = -80");
    mutate("n_nodes = 64", "n_nodes = 4");
    mutate("window = 1 80 1 80", "window = 1 500 1 80");  // outside e^M
    mutate("kind = polynomial", "kind = straddle");
    mutate("diffusion_volatility = 0.1 0.1", "diffusion_volatility = zero");
}

TEST(ParseConfig, MissingKeyReported) {
    std::string text = poly_cfg_text();
    const auto pos = text.find("interest_rate = 0.05\n");
    text.erase(pos, std::string("interest_rate = 0.05\n").size());
    std::istringstream is(text);
    try {
        parse_config(is);
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("interest_rate"), std::string::npos);
    }
}

TEST(Price, ReportsAnalyticColumnsForPolynomial) {
    const RunConfig c = poly_config(33);
    const PriceResult res = price(c);
    ASSERT_TRUE(res.report.bs.has_value());
    ASSERT_TRUE(res.report.jd.has_value());
    EXPECT_NEAR(*res.report.bs, bs_polynomial_price(c.model, 0.0, 40, 40), 1e-9);
    EXPECT_GT(*res.report.jd, *res.report.bs);
    EXPECT_LT(*res.report.rel_err, 0.05);  // coarse 33^2 smoke mesh
}

TEST(Price, StageNamesOnFailure) {
    RunConfig c = poly_config(33);
    c.model.rho = 2.0;  // invalid
    try {
        price(c);
        FAIL() << "expected failure";
    } catch (const std::runtime_error& e) {
        EXPECT_NE(std::string(e.what()).find("stage config"), std::string::npos);
    }
}

TEST(ExportSurface, CsvRoundTripIsLossless) {
    const RunConfig c = poly_config(17);
    const PriceResult res = price(c);
    ReportWindow w;
    w.s1_lo = 5.0;
    w.s1_hi = 75.0;
    w.s2_lo = 5.0;
    w.s2_hi = 75.0;
    w.points = 7;
    std::ostringstream os;
    export_surface(res.surface, w, os, ExportFormat::Csv);
    std::istringstream is(os.str());
    const auto samples = import_surface_csv(is);
    ASSERT_EQ(samples.size(), 49u);
    for (const auto& s : samples)
        EXPECT_EQ(s.value, res.surface.price(s.s1, s.s2));  // bitwise after %.17g
}

TEST(ExportSurface, EmptyWindowIsHeaderOnly) {
    const RunConfig c = poly_config(17);
    const PriceResult res = price(c);
    ReportWindow w;
    w.points = 0;
    std::ostringstream os;
    export_surface(res.surface, w, os, ExportFormat::Csv);
    EXPECT_EQ(os.str(), "S1,S2,V\n");
}

TEST(ExportSurface, JsonCarriesMetadataAndGrid) {
    const RunConfig c = poly_config(17);
    const PriceResult res = price(c);
    ReportWindow w;
    w.points = 3;
    std::ostringstream os;
    export_surface(res.surface, w, os, ExportFormat::Json);
    const std::string doc = os.str();
    EXPECT_NE(doc.find("\"metadata\""), std::string::npos);
    EXPECT_NE(doc.find("\"values\""), std::string::npos);
    EXPECT_NE(doc.find("\"imex_cn\""), std::string::npos);
}

TEST(ExportSurface, JsonValuesRoundTrip) {
    const RunConfig c = poly_config(17);
    const PriceResult res = price(c);
    ReportWindow w;
    w.points = 4;
    std::ostringstream os;
    export_surface(res.surface, w, os, ExportFormat::Json);
    const auto doc = nlohmann::json::parse(os.str());
    const auto s1 = doc["s1"].get<std::vector<double>>();
    const auto s2 = doc["s2"].get<std::vector<double>>();
    const auto vals = doc["values"].get<std::vector<double>>();
    ASSERT_EQ(vals.size(), 16u);
    for (std::size_t j = 0; j < s2.size(); ++j)
        for (std::size_t i = 0; i < s1.size(); ++i)
            EXPECT_EQ(vals[j * s1.size() + i], res.surface.price(s1[i], s2[j]));
}

TEST(ConvergenceStudy, HAxisSelfReferenceForPutPayoff) {
    // No closed form for the basket put: the ladder is measured against the
    // finest mesh. The reference carries its own O(h^2) error, so only a
    // crude second-order trend is asserted.
    std::istringstream is(
        "[model]\n"
        "diffusion_volatility = 0.3 0.3\n"
        "mean_jump_size = -0.9\n"
        "mean_jump_volatility = 0.45\n"
        "jump_intensity = 0.1\n"
        "correlation = 0.3\n"
        "interest_rate = 0.05\n"
        "strike = 40\n"
        "maturity = 0.2\n"
        "weights = 0.5 0.5\n"
        "[payoff]\n"
        "kind = basket_put\n"
        "smoothing_delta = 0.3\n"
        "[mesh]\n"
        "half_width = 4.5\n"
        "n_per_side = 129\n"
        "[scheme]\n"
        "method = imex_cn\n"
        "dt = 0.01\n"
        "[quadrature]\n"
        "n_nodes = 64\n"
        "[report]\n"
        "spot = 40 40\n"
        "window = 1 80 1 80\n");
    const RunConfig c = parse_config(is);
    const StudyReport rep = convergence_study(StudyAxis::h, c, 3);
    ASSERT_EQ(rep.levels.size(), 2u);  // finest level is the reference
    EXPECT_LT(rep.levels[1].err_l2, rep.levels[0].err_l2);
    const double ratio = rep.levels[0].err_l2 / rep.levels[1].err_l2;
    EXPECT_GT(ratio, 2.0);
    EXPECT_LT(ratio, 8.0);
}

TEST(ExportSurface, SpotConsistentWithPriceReport) {
    RunConfig c = poly_config(33);
    c.window.s1_lo = c.window.s2_lo = 40.0;
    c.window.s1_hi = c.window.s2_hi = 40.0;
    c.window.points = 1;
    const PriceResult res = price(c);
    std::ostringstream os;
    export_surface(res.surface, c.window, os, ExportFormat::Csv);
    std::istringstream is(os.str());
    const auto samples = import_surface_csv(is);
    ASSERT_EQ(samples.size(), 1u);
    EXPECT_EQ(samples[0].value, res.report.fem);
}

TEST(ExportSurface, AtomicFileWrite) {
    const RunConfig c = poly_config(17);
    const PriceResult res = price(c);
    const std::string path = ::testing::TempDir() + "/levyfem_surface_test/out.csv";
    ReportWindow w;
    w.points = 3;
    export_surface(res.surface, w, path, ExportFormat::Csv);
    EXPECT_TRUE(std::filesystem::exists(path));
    EXPECT_FALSE(std::filesystem::exists(path + ".tmp"));
    std::filesystem::remove_all(::testing::TempDir() + "/levyfem_surface_test");
}

TEST(Determinism, IdenticalConfigIdenticalBytes) {
    const RunConfig c = poly_config(17);
    std::string a, b;
    for (std::string* out : {&a, &b}) {
        const PriceResult res = price(c);
        ReportWindow w;
        w.points = 9;
        std::ostringstream os;
        export_surface(res.surface, w, os, ExportFormat::Csv);
        *out = os.str();
    }
    EXPECT_EQ(a, b);
}

TEST(FitOrder, RecoversSyntheticSlope) {
    std::vector<double> hs = {0.4, 0.2, 0.1, 0.05};
    std::vector<double> errs;
    for (double h : hs) errs.push_back(3.7 * h * h);
    EXPECT_NEAR(fit_order(hs, errs), 2.0, 1e-12);
    EXPECT_THROW(fit_order({1.0}, {1.0}), std::invalid_argument);
}

TEST(ReproduceTables, Table3SmokeOnCoarserMesh) {
    TableOptions opt;
    opt.n_per_side = 65;
    opt.quadrature.n_nodes = 64;
    opt.threshold = 0.03;  // smoke-level gate; the acceptance suite runs 129^2 at 2%
    const TableReport rep = reproduce_tables(3, opt);
    EXPECT_FALSE(rep.any_failed);
    for (const auto& r : rep.rows) {
        EXPECT_TRUE(r.error.empty()) << r.error;
        EXPECT_LE(r.rel_err, opt.threshold) << "tau=" << r.tau << " s=(" << r.s1 << "," << r.s2
                                            << ")";
        EXPECT_NEAR(r.jd, elm_polynomial_price(
                              [&] {
                                  ModelParams m;
                                  m.r = 0.05;
                                  m.sigma = {r.s1, r.s2};
                                  m.rho = r.rho;
                                  m.lambda = {0.1, 0.1};
                                  m.nu = {-0.9, -0.9};
                                  m.gamma = {0.45, 0.45};
                                  m.T = r.tau;
                                  m.K = 80.0;
                                  return m;
                              }(),
                              0.0, 40, 40) /
                              1000.0,
                    1e-12);
    }
    // CSV is rectangular: header + 12 rows
    int lines = 0;
    for (char ch : rep.csv)
        if (ch == '\n') ++lines;
    EXPECT_EQ(lines, 13);
}

TEST(ReproduceTables, RejectsUnknownTable) {
    EXPECT_THROW(reproduce_tables(5), std::invalid_argument);
}

TEST(ConvergenceStudy, DtAxisSecondOrderSmoke) {
    RunConfig c = poly_config(33, 0.2);
    c.scheme.scheme = Scheme::CrankNicolsonFull;
    c.scheme.dt = 0.04;
    c.scheme.solver_tol = 1e-12;
    c.quadrature.n_nodes = 64;
    const StudyReport rep = convergence_study(StudyAxis::dt, c, 3);
    ASSERT_EQ(rep.levels.size(), 3u);
    EXPECT_GT(rep.fitted_order_l2, 1.5);
    EXPECT_LT(rep.fitted_order_l2, 2.5);
}

TEST(ConvergenceStudy, HAxisSmoke) {
    RunConfig c = poly_config(65, 0.1);
    c.scheme.dt = 0.005;
    c.quadrature.n_nodes = 64;
    const StudyReport rep = convergence_study(StudyAxis::h, c, 3);
    ASSERT_EQ(rep.levels.size(), 3u);
    EXPECT_GT(rep.fitted_order_l2, 1.5);
    EXPECT_LT(rep.fitted_order_l2, 2.5);
    EXPECT_GT(rep.fitted_order_h1, 0.7);
    EXPECT_LT(rep.fitted_order_h1, 1.4);
}

TEST(ConvergenceStudy, DeltaAxisSolutionErrorIsSecondOrder) {
    // The evolved solution's smoothing error is second order in delta once
    // diffusion smears the band (the raw data error is first order in the
    // sup norm; see the payoff tests).
    std::istringstream is(
        "[model]\n"
        "diffusion_volatility = 0.3 0.3\n"
        "mean_jump_size = -0.9\n"
        "mean_jump_volatility = 0.45\n"
        "jump_intensity = 0.1\n"
        "correlation = 0.3\n"
        "interest_rate = 0.05\n"
        "strike = 40\n"
        "maturity = 0.5\n"
        "weights = 0.5 0.5\n"
        "[payoff]\n"
        "kind = basket_put\n"
        "smoothing_delta = 0.4\n"
        "[mesh]\n"
        "half_width = 4.5\n"
        "n_per_side = 129\n"
        "[scheme]\n"
        "method = imex_cn\n"
        "dt = 0.01\n"
        "[quadrature]\n"
        "n_nodes = 64\n"
        "[report]\n"
        "spot = 40 40\n"
        "window = 1 80 1 80\n");
    const RunConfig c = parse_config(is);
    const StudyReport rep = convergence_study(StudyAxis::delta, c, 3);
    EXPECT_GT(rep.fitted_order_l2, 1.7);
    EXPECT_LT(rep.fitted_order_l2, 2.5);
    EXPECT_TRUE(rep.monotone);
}

TEST(Price, CheckpointDumpsWritten) {
    namespace fs = std::filesystem;
    const std::string dir = ::testing::TempDir() + "/levyfem_ckpt";
    fs::create_directories(dir);
    RunConfig c = poly_config(17);
    c.checkpoint_every = 5;
    c.checkpoint_prefix = dir + "/state";
    price(c);
    // steps 0, 5 and 10 of the tau = 0.1 run
    EXPECT_TRUE(fs::exists(dir + "/state_00000.csv"));
    EXPECT_TRUE(fs::exists(dir + "/state_00005.csv"));
    EXPECT_TRUE(fs::exists(dir + "/state_00010.csv"));
    std::ifstream f(dir + "/state_00010.csv");
    std::string header;
    std::getline(f, header);
    EXPECT_EQ(header, "x1,x2,u");
    fs::remove_all(dir);
}

TEST(ConvergenceStudy, QuadAxisConverges) {
    RunConfig c = poly_config(33, 0.1);
    c.quadrature.n_nodes = 16;
    const StudyReport rep = convergence_study(StudyAxis::quad, c, 3);
    ASSERT_EQ(rep.levels.size(), 3u);
    EXPECT_LT(rep.levels.back().err_max, rep.levels.front().err_max + 1e-18);
}

TEST(ConvergenceStudy, RequiresThreeLevels) {
    EXPECT_THROW(convergence_study(StudyAxis::dt, poly_config(), 2), std::invalid_argument);
}

TEST(JensenBound, BasketPutBelowPortfolioOfPuts) {
    std::istringstream is(
        "[model]\n"
        "diffusion_volatility = 0.3 0.3\n"
        "mean_jump_size = -0.9\n"
        "mean_jump_volatility = 0.45\n"
        "jump_intensity = 0.1\n"
        "correlation = 0.3\n"
        "interest_rate = 0.05\n"
        "strike = 40\n"
        "maturity = 0.2\n"
        "weights = 0.5 0.5\n"
        "[payoff]\n"
        "kind = basket_put\n"
        "smoothing_delta = 2h\n"
        "[mesh]\n"
        "half_width = 4.5\n"
        "n_per_side = 65\n"
        "[scheme]\n"
        "method = imex_cn\n"
        "dt = 0.01\n"
        "[quadrature]\n"
        "n_nodes = 64\n"
        "[report]\n"
        "spot = 40 40\n"
        "window = 1 80 1 80\n");
    const RunConfig c = parse_config(is);
    const JensenReport rep = jensen_bound_check(c);
    EXPECT_TRUE(rep.holds) << "basket " << rep.basket << " portfolio " << rep.portfolio;
    EXPECT_GT(rep.basket, 0.0);
}

TEST(MixtureOracle, MatchesClosedFormForPolynomial) {
    // Sanity for the test-side reference itself: on the (smooth) polynomial
    // payoff the mixture quadrature must agree with the closed form.
    ModelParams p;
    p.r = 0.05;
    p.sigma = {0.2, 0.3};
    p.rho = 0.3;
    p.lambda = {0.1, 0.1};
    p.nu = {-0.9, -0.9};
    p.gamma = {0.45, 0.45};
    p.T = 0.9;
    p.K = 80.0;
    const double oracle = levyfem::testing::mixture_price(
        p, 0.9, [](double a, double b) { return (a + b) * (a + b); }, 40.0, 40.0, 801, 10);
    const double closed = elm_polynomial_price(p, 0.0, 40.0, 40.0);
    EXPECT_NEAR(oracle, closed, 2e-4 * closed);
}
