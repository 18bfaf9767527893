#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "levyfem/harness.hpp"
#include "levyfem/payoff.hpp"

using namespace levyfem;

namespace {

PayoffSpec basket_put_spec(double K = 40.0, double delta = 0.1) {
    ModelParams p;
    p.r = 0.05;
    p.sigma = {0.3, 0.3};
    p.rho = 0.3;
    p.lambda = {0.1, 0.1};
    p.nu = {-0.9, -0.9};
    p.gamma = {0.45, 0.45};
    p.T = 1.0;
    p.K = K;
    p.w = {0.5, 0.5};
    return PayoffSpec{PayoffKind::BasketPut, delta, p};
}

}  // namespace

TEST(PayoffValue, Table1Rows) {
    PayoffSpec s = basket_put_spec();
    EXPECT_EQ(payoff_value(s, 40.0, 40.0), 0.0);
    EXPECT_EQ(payoff_value(s, 0.0, 0.0), 40.0);

    s.kind = PayoffKind::BasketCall;
    EXPECT_EQ(payoff_value(s, 50.0, 50.0), 10.0);

    s.kind = PayoffKind::WorstOfTwo;
    EXPECT_EQ(payoff_value(s, 30.0, 35.0), 5.0);
    EXPECT_EQ(payoff_value(s, 30.0, 45.0), 0.0);

    s.kind = PayoffKind::MinOfTwoPut;
    EXPECT_EQ(payoff_value(s, 30.0, 45.0), 10.0);

    s.kind = PayoffKind::Polynomial;
    EXPECT_EQ(payoff_value(s, 40.0, 40.0), 6400.0);
}

TEST(PayoffValue, RejectsNegativePrices) {
    PayoffSpec s = basket_put_spec();
    EXPECT_THROW(payoff_value(s, -1.0, 40.0), std::invalid_argument);
    EXPECT_THROW(payoff_value(s, 40.0, -1.0), std::invalid_argument);
}

TEST(BoundaryG, MatchesPayoffAtTauZero) {
    PayoffSpec s = basket_put_spec();
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> unif(-3.0, 4.3);
    for (int k = 0; k < 100; ++k) {
        const Eigen::Vector2d x(unif(rng), unif(rng));
        EXPECT_NEAR(boundary_g(s, 0.0, x),
                    payoff_value(s, std::exp(x[0]), std::exp(x[1])), 1e-10);
    }
}

TEST(BoundaryG, DeepInTheMoneyLimit) {
    PayoffSpec s = basket_put_spec();
    EXPECT_NEAR(boundary_g(s, 0.37, Eigen::Vector2d(-40.0, -40.0)), 40.0, 1e-12);
}

TEST(BoundaryG, DiscountedForwardValue) {
    PayoffSpec s = basket_put_spec();
    // (K - w1 e^{x1+r tau} - w2 e^{x2+r tau})^+ at S=(10,10), tau=0.5.
    const Eigen::Vector2d x(std::log(10.0), std::log(10.0));
    const double expected = 40.0 - 10.0 * std::exp(0.025);
    EXPECT_NEAR(boundary_g(s, 0.5, x), expected, 1e-12);
    EXPECT_NEAR(expected, 29.747, 5e-4);
}

TEST(ProjectToCurve, SymmetricPointIsFixed) {
    PayoffSpec s = basket_put_spec();
    const double tau = 0.25;
    const double xd = std::log(s.params.K * std::exp(-s.params.r * tau) /
                               (s.params.w[0] + s.params.w[1]));
    const CurvePoint cp = project_to_curve(s, tau, {xd, xd});
    EXPECT_NEAR(cp.n, 0.0, 1e-10);
    EXPECT_NEAR(cp.x_o[0], xd, 1e-10);
    EXPECT_NEAR(cp.x_o[1], xd, 1e-10);
    // symmetric curve: unit normal along the diagonal
    EXPECT_NEAR(cp.normal[0], cp.normal[1], 1e-12);
}

TEST(ProjectToCurve, DiagonalOffsetsHaveSignedDistance) {
    PayoffSpec s = basket_put_spec();
    const double tau = 0.25;
    const double xd = std::log(s.params.K * std::exp(-s.params.r * tau) /
                               (s.params.w[0] + s.params.w[1]));
    for (double t : {-0.07, -0.02, 0.013, 0.06}) {
        const Eigen::Vector2d x = Eigen::Vector2d(xd, xd) +
                                  t / std::sqrt(2.0) * Eigen::Vector2d(1, 1);
        const CurvePoint cp = project_to_curve(s, tau, x);
        EXPECT_NEAR(cp.n, t, 1e-9);
        EXPECT_NEAR(cp.x_o[0], xd, 1e-9);
    }
}

TEST(ProjectToCurve, FootPointInvariants) {
    PayoffSpec s = basket_put_spec();
    const double tau = 0.4;
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> along(-2.0, 2.0);
    std::uniform_real_distribution<double> off(-0.15, 0.15);
    const double Ktil = s.params.K * std::exp(-s.params.r * tau);
    for (int k = 0; k < 50; ++k) {
        // random point near the curve: start on it, move along the normal
        const double t = along(rng);
        const double x2 = std::log((Ktil - s.params.w[0] * std::exp(t)) / s.params.w[1]);
        Eigen::Vector2d grad(s.params.w[0] * std::exp(t), s.params.w[1] * std::exp(x2));
        grad.normalize();
        const Eigen::Vector2d x = Eigen::Vector2d(t, x2) + off(rng) * grad;
        const CurvePoint cp = project_to_curve(s, tau, x);
        // foot point on the curve
        const double on = s.params.w[0] * std::exp(cp.x_o[0] + s.params.r * tau) +
                          s.params.w[1] * std::exp(cp.x_o[1] + s.params.r * tau);
        EXPECT_NEAR(on, s.params.K, 1e-10 * s.params.K);
        // segment parallel to the normal
        const Eigen::Vector2d d = x - cp.x_o;
        EXPECT_NEAR(d[0] * cp.normal[1] - d[1] * cp.normal[0], 0.0, 1e-10);
        EXPECT_NEAR(std::abs(cp.n), d.norm(), 1e-12);
    }
}

TEST(ProjectToCurve, NearestAmongSampledCurvePoints) {
    PayoffSpec s = basket_put_spec();
    const double tau = 0.0;
    const double Ktil = s.params.K;
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> along(-1.5, 3.0);
    std::uniform_real_distribution<double> off(-0.2, 0.2);
    for (int k = 0; k < 10; ++k) {
        const double t0 = along(rng);
        const double x20 = std::log((Ktil - s.params.w[0] * std::exp(t0)) / s.params.w[1]);
        Eigen::Vector2d g(s.params.w[0] * std::exp(t0), s.params.w[1] * std::exp(x20));
        g.normalize();
        const Eigen::Vector2d x = Eigen::Vector2d(t0, x20) + off(rng) * g;

        const CurvePoint cp = project_to_curve(s, tau, x);
        double best = 1e300;
        const int samples = 10000;
        for (int i = 0; i <= samples; ++i) {
            const double t = -6.0 + 10.0 * i / samples;
            if (s.params.w[0] * std::exp(t) >= Ktil) break;
            const double x2 = std::log((Ktil - s.params.w[0] * std::exp(t)) / s.params.w[1]);
            best = std::min(best, (x - Eigen::Vector2d(t, x2)).norm());
        }
        EXPECT_NEAR((x - cp.x_o).norm(), best, 1e-4);
    }
}

TEST(BlendCoefficients, ZeroDataGivesZeroPolynomial) {
    const BlendCoeffs cf = blend_coefficients(0.0, 0.0, 0.0, 0.3);
    EXPECT_EQ(cf.a, 0.0);
    EXPECT_EQ(cf.b, 0.0);
    EXPECT_EQ(cf.c, 0.0);
    EXPECT_EQ(blend_eval(cf, 0.3, 0.11), 0.0);
}

TEST(BlendCoefficients, WorkedExample) {
    const BlendCoeffs cf = blend_coefficients(1.0, 0.0, 0.0, 0.5);
    EXPECT_NEAR(cf.a, -1.0, 1e-14);
    EXPECT_NEAR(cf.b, -3.0, 1e-14);
    EXPECT_NEAR(cf.c, -6.0, 1e-14);
}

TEST(BlendCoefficients, RejectsZeroDelta) {
    EXPECT_THROW(blend_coefficients(1.0, 0.0, 0.0, 0.0), std::invalid_argument);
}

TEST(BlendCoefficients, SixMatchingConditions) {
    // Generic data: all six contact conditions at n = +-delta.
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> unif(-2.0, 2.0);
    for (int k = 0; k < 50; ++k) {
        const double g = unif(rng), dg = unif(rng), d2g = unif(rng);
        const double delta = 0.05 + 0.5 * std::abs(unif(rng));
        const BlendCoeffs cf = blend_coefficients(g, dg, d2g, delta);
        const double scale = std::max({1.0, std::abs(g), std::abs(dg), std::abs(d2g)});
        EXPECT_NEAR(blend_eval(cf, delta, delta), 0.0, 1e-9 * scale);
        EXPECT_NEAR(blend_eval_d1(cf, delta, delta), 0.0, 1e-9 * scale);
        EXPECT_NEAR(blend_eval_d2(cf, delta, delta), 0.0, 1e-9 * scale / delta);
        EXPECT_NEAR(blend_eval(cf, delta, -delta), g, 1e-9 * scale);
        EXPECT_NEAR(blend_eval_d1(cf, delta, -delta), dg, 1e-9 * scale);
        EXPECT_NEAR(blend_eval_d2(cf, delta, -delta), d2g, 1e-9 * scale / delta);
        // cross-check the analytic derivatives by finite differences
        const double h = 1e-6 * delta;
        const double fd1 =
            (blend_eval(cf, delta, 0.1 * delta + h) - blend_eval(cf, delta, 0.1 * delta - h)) /
            (2 * h);
        EXPECT_NEAR(fd1, blend_eval_d1(cf, delta, 0.1 * delta), 1e-5 * scale / delta);
    }
}

TEST(SmoothedG, EqualsGOutsideBand) {
    PayoffSpec s = basket_put_spec(40.0, 0.08);
    const double tau = 0.3;
    std::mt19937 rng(29);
    std::uniform_real_distribution<double> unif(-4.0, 4.4);
    int checked = 0;
    for (int k = 0; k < 500; ++k) {
        const Eigen::Vector2d x(unif(rng), unif(rng));
        double n;
        try {
            n = project_to_curve(s, tau, x).n;
        } catch (const ProjectionFailure&) {
            continue;
        }
        if (std::abs(n) <= s.delta * 1.05) continue;
        ++checked;
        EXPECT_EQ(smoothed_g(s, tau, x), boundary_g(s, tau, x));
    }
    EXPECT_GT(checked, 300);
}

TEST(SmoothedG, VanishesAtOuterEdge) {
    PayoffSpec s = basket_put_spec(40.0, 0.1);
    const double tau = 0.2;
    // point exactly at n = +delta
    const CurvePoint cp =
        project_to_curve(s, tau, {std::log(40.0), std::log(40.0)});
    const Eigen::Vector2d x = cp.x_o + s.delta * cp.normal;
    EXPECT_NEAR(smoothed_g(s, tau, x), 0.0, 1e-9);
    EXPECT_EQ(boundary_g(s, tau, x), 0.0);
}

TEST(SmoothedG, MonotoneDecreasingBlendForPut) {
    PayoffSpec s = basket_put_spec(40.0, 0.1);
    const double tau = 0.15;
    const CurvePoint cp = project_to_curve(s, tau, {std::log(41.0), std::log(39.1)});
    double g, dg, d2g;
    // recompute the blend data the way smoothed_g does
    const Eigen::Vector2d xin = cp.x_o - s.delta * cp.normal;
    const double e1 = s.params.w[0] * std::exp(xin[0] + s.params.r * tau);
    const double e2 = s.params.w[1] * std::exp(xin[1] + s.params.r * tau);
    g = s.params.K - e1 - e2;
    dg = -(cp.normal[0] * e1 + cp.normal[1] * e2);
    d2g = -(cp.normal[0] * cp.normal[0] * e1 + cp.normal[1] * cp.normal[1] * e2);
    const BlendCoeffs cf = blend_coefficients(g, dg, d2g, s.delta);
    for (int i = 0; i <= 400; ++i) {
        const double n = -s.delta + 2.0 * s.delta * i / 400.0;
        EXPECT_LE(blend_eval_d1(cf, s.delta, n), 1e-12);
    }
}

TEST(SmoothedG, ErrorRatesInDelta) {
    // The quintic blend rounds a gradient kink over a width-delta band, so
    // sup |g~ - g| is first order in delta (p(0) = 3 s delta / 16 for a
    // linear kink of slope s); the band-integrated error is second order
    // (width delta x height delta). Both rates are pinned here; the
    // acceptance suite carries the published second-order sup-norm gate and
    // reports its failure against these measurements.
    const double tau = 0.0;
    std::vector<double> deltas = {0.2, 0.1, 0.05};
    std::vector<double> sups, l1s;
    for (double d : deltas) {
        PayoffSpec s = basket_put_spec(40.0, d);
        double sup = 0.0, l1 = 0.0;
        const double cell = 2.4 / 400.0;
        for (int i = 0; i <= 400; ++i) {
            for (int j = 0; j <= 400; ++j) {
                const Eigen::Vector2d x(2.0 + cell * i, 2.0 + cell * j);
                const double e = std::abs(smoothed_g(s, tau, x) - boundary_g(s, tau, x));
                sup = std::max(sup, e);
                l1 += e * cell * cell;
            }
        }
        sups.push_back(sup);
        l1s.push_back(l1);
    }
    const double sup_slope = fit_order(deltas, sups);
    EXPECT_GE(sup_slope, 0.9);
    EXPECT_LE(sup_slope, 1.1);
    const double l1_slope = fit_order(deltas, l1s);
    EXPECT_GE(l1_slope, 1.8);
    EXPECT_LE(l1_slope, 2.2);
    // first-order constant matches the closed-form kink value 3 s delta / 16
    // within the curvature correction
    const double s_kink = 40.0 / std::sqrt(2.0);
    EXPECT_NEAR(sups[0], 3.0 * s_kink * deltas[0] / 16.0, 0.35 * sups[0]);
}

TEST(SmoothedG, BlendScalesWithDelta) {
    // p = O(delta), p' = O(1), p'' = O(1/delta) across a delta sweep.
    const double tau = 0.0;
    std::vector<double> p_scaled, dp_max, d2p_scaled;
    for (double d : {0.2, 0.1, 0.05, 0.025}) {
        PayoffSpec s = basket_put_spec(40.0, d);
        const CurvePoint cp = project_to_curve(s, tau, {std::log(40.0), std::log(40.0)});
        const Eigen::Vector2d xin = cp.x_o - d * cp.normal;
        const double e1 = s.params.w[0] * std::exp(xin[0]);
        const double e2 = s.params.w[1] * std::exp(xin[1]);
        const BlendCoeffs cf = blend_coefficients(
            s.params.K - e1 - e2, -(cp.normal[0] * e1 + cp.normal[1] * e2),
            -(cp.normal[0] * cp.normal[0] * e1 + cp.normal[1] * cp.normal[1] * e2), d);
        double mp = 0, mdp = 0, md2p = 0;
        for (int i = 0; i <= 200; ++i) {
            const double n = -d + 2 * d * i / 200.0;
            mp = std::max(mp, std::abs(blend_eval(cf, d, n)));
            mdp = std::max(mdp, std::abs(blend_eval_d1(cf, d, n)));
            md2p = std::max(md2p, std::abs(blend_eval_d2(cf, d, n)));
        }
        p_scaled.push_back(mp / d);
        dp_max.push_back(mdp);
        d2p_scaled.push_back(md2p * d);
    }
    for (std::size_t i = 1; i < p_scaled.size(); ++i) {
        EXPECT_LT(p_scaled[i], 3.0 * p_scaled[0]);
        EXPECT_LT(dp_max[i], 3.0 * dp_max[0]);
        EXPECT_LT(d2p_scaled[i], 3.0 * d2p_scaled[0]);
    }
}

TEST(SmoothedInitial, AliasAndRange) {
    PayoffSpec s = basket_put_spec(40.0, 0.1);
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> unif(2.5, 4.2);
    for (int k = 0; k < 50; ++k) {
        const Eigen::Vector2d x(unif(rng), unif(rng));
        EXPECT_EQ(smoothed_initial(s, x), smoothed_g(s, 0.0, x));
    }
    // at the symmetric curve point the blend lies strictly between 0 and K
    const double xd = std::log(40.0);
    const double v = smoothed_initial(s, {xd, xd});
    EXPECT_GT(v, 0.0);
    EXPECT_LT(v, 40.0);
}

TEST(SmoothedInitial, MonotoneAlongDiagonal) {
    PayoffSpec s = basket_put_spec(40.0, 0.15);
    double prev = 1e300;
    for (int i = 0; i <= 300; ++i) {
        const double t = 2.0 + 2.0 * i / 300.0;
        const double v = smoothed_initial(s, {t, t});
        EXPECT_LE(v, prev + 1e-12);
        prev = v;
    }
}

TEST(SmoothedG, PolynomialIgnoresDelta) {
    PayoffSpec s = basket_put_spec(40.0, 0.1);
    s.kind = PayoffKind::Polynomial;
    const Eigen::Vector2d x(3.5, 3.6);
    EXPECT_EQ(smoothed_g(s, 0.4, x), boundary_g(s, 0.4, x));
}

TEST(SmoothedG, MinMaxKindsBlendAcrossKink) {
    for (PayoffKind kind : {PayoffKind::WorstOfTwo, PayoffKind::MinOfTwoPut}) {
        PayoffSpec s = basket_put_spec(40.0, 0.1);
        s.kind = kind;
        const double tau = 0.2;
        const double c = std::log(40.0) - 0.05 * tau;
        // far from the kink: exact g; inside: C2 blend
        EXPECT_EQ(smoothed_g(s, tau, {c - 1.0, c - 1.2}), boundary_g(s, tau, {c - 1.0, c - 1.2}));
        const double inside = smoothed_g(s, tau, {c - 1.0, c + 0.001});
        if (kind == PayoffKind::MinOfTwoPut) {
            EXPECT_GT(inside, 0.0);  // min-kink at the lower coordinate
        }
        // continuity at the band edge
        const double a = smoothed_g(s, tau, {c + s.delta - 1e-9, c - 2.0});
        const double b = smoothed_g(s, tau, {c + s.delta + 1e-9, c - 2.0});
        EXPECT_NEAR(a, b, 1e-6);
    }
}

TEST(SmoothedBoundary, MatchesSmoothedG) {
    PayoffSpec s = basket_put_spec(40.0, 0.1);
    const SmoothedBoundary fast(s);
    std::mt19937 rng(37);
    std::uniform_real_distribution<double> unif(-4.0, 4.4);
    for (int k = 0; k < 200; ++k) {
        const Eigen::Vector2d x(unif(rng), unif(rng));
        EXPECT_EQ(fast(0.3, x), smoothed_g(s, 0.3, x));
    }
    PayoffSpec sp = s;
    sp.kind = PayoffKind::Polynomial;
    const SmoothedBoundary fastp(sp);
    for (int k = 0; k < 50; ++k) {
        const Eigen::Vector2d x(unif(rng), unif(rng));
        EXPECT_NEAR(fastp(0.3, x), smoothed_g(sp, 0.3, x), 1e-9 * std::abs(fastp(0.3, x)));
    }
}
