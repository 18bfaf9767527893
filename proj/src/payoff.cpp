#include "levyfem/payoff.hpp"

#include <algorithm>
#include <cmath>

namespace levyfem {

namespace {

struct CurveFrame {
    double Ktil;          // K e^{-r tau}
    double w1, w2;
};

constexpr double kDegenerateWeight = 1e-13;

/// Forward basket value w1 e^{x1+r tau} + w2 e^{x2+r tau}.
double forward_basket(const ModelParams& p, double tau, const Eigen::Vector2d& x) {
    return p.w[0] * std::exp(x[0] + p.r * tau) + p.w[1] * std::exp(x[1] + p.r * tau);
}

double kink_level(const ModelParams& p, double tau) { return std::log(p.K) - p.r * tau; }

/// Blend data for the put branch of the weighted basket at n = -delta:
/// value, first and second derivative of g along the outward normal.
void basket_put_blend_data(const ModelParams& p, double tau, const CurvePoint& cp, double delta,
                           double sign, double* g, double* dg, double* d2g) {
    // sign=+1 samples at n=-delta (put); sign=-1 at n=+delta for the call,
    // whose profile mirrored in n is again put-like (positive, decreasing).
    const double e1 = p.w[0] * std::exp(cp.x_o[0] - sign * delta * cp.normal[0] + p.r * tau);
    const double e2 = p.w[1] * std::exp(cp.x_o[1] - sign * delta * cp.normal[1] + p.r * tau);
    *g = sign * (p.K - e1 - e2);
    *dg = -(cp.normal[0] * e1 + cp.normal[1] * e2);
    *d2g = -sign * (cp.normal[0] * cp.normal[0] * e1 + cp.normal[1] * cp.normal[1] * e2);
}

}  // namespace

const char* payoff_kind_name(PayoffKind k) {
    switch (k) {
        case PayoffKind::BasketCall: return "basket_call";
        case PayoffKind::BasketPut: return "basket_put";
        case PayoffKind::WorstOfTwo: return "worst_of_two";
        case PayoffKind::MinOfTwoPut: return "min_of_two_put";
        case PayoffKind::Polynomial: return "polynomial";
    }
    return "?";
}

double payoff_value(const PayoffSpec& spec, double S1, double S2) {
    if (S1 < 0.0 || S2 < 0.0) throw std::invalid_argument("payoff_value: negative price");
    const ModelParams& p = spec.params;
    switch (spec.kind) {
        case PayoffKind::BasketCall:
            return std::max(p.w[0] * S1 + p.w[1] * S2 - p.K, 0.0);
        case PayoffKind::BasketPut:
            return std::max(p.K - (p.w[0] * S1 + p.w[1] * S2), 0.0);
        case PayoffKind::WorstOfTwo:
            return std::max(p.K - std::max(S1, S2), 0.0);
        case PayoffKind::MinOfTwoPut:
            return std::max(p.K - std::min(S1, S2), 0.0);
        case PayoffKind::Polynomial:
            return (S1 + S2) * (S1 + S2);
    }
    return 0.0;
}

double boundary_g(const PayoffSpec& spec, double tau, const Eigen::Vector2d& x) {
    const ModelParams& p = spec.params;
    switch (spec.kind) {
        case PayoffKind::BasketCall:
            return std::max(forward_basket(p, tau, x) - p.K, 0.0);
        case PayoffKind::BasketPut:
            return std::max(p.K - forward_basket(p, tau, x), 0.0);
        case PayoffKind::WorstOfTwo:
            return std::max(p.K - std::exp(std::max(x[0], x[1]) + p.r * tau), 0.0);
        case PayoffKind::MinOfTwoPut:
            return std::max(p.K - std::exp(std::min(x[0], x[1]) + p.r * tau), 0.0);
        case PayoffKind::Polynomial: {
            const double L1 = jump_moment_Lambda(p, Axis(1));
            const double L2 = jump_moment_Lambda(p, Axis(2));
            const double s1 = p.sigma[0], s2 = p.sigma[1];
            return std::exp(2.0 * x[0] + (2.0 * p.r + s1 * s1 + L1) * tau) +
                   std::exp(2.0 * x[1] + (2.0 * p.r + s2 * s2 + L2) * tau) +
                   2.0 * std::exp(x[0] + x[1] + (2.0 * p.r + p.rho * s1 * s2) * tau);
        }
    }
    return 0.0;
}

CurvePoint project_to_curve(const PayoffSpec& spec, double tau, const Eigen::Vector2d& x) {
    const ModelParams& p = spec.params;

    if (spec.kind == PayoffKind::Polynomial)
        throw std::invalid_argument("project_to_curve: polynomial payoff has no strike curve");

    if (spec.kind == PayoffKind::WorstOfTwo || spec.kind == PayoffKind::MinOfTwoPut) {
        // Axis-parallel kink set {m(x) = ln K - r tau}; 1D normal geometry.
        const double c = kink_level(p, tau);
        const bool use_max = spec.kind == PayoffKind::WorstOfTwo;
        const double m = use_max ? std::max(x[0], x[1]) : std::min(x[0], x[1]);
        const int active = use_max ? (x[0] >= x[1] ? 0 : 1) : (x[0] <= x[1] ? 0 : 1);
        CurvePoint cp;
        cp.normal = active == 0 ? Eigen::Vector2d(1, 0) : Eigen::Vector2d(0, 1);
        cp.n = m - c;
        cp.x_o = x - cp.n * cp.normal;
        return cp;
    }

    const CurveFrame f{p.K * std::exp(-p.r * tau), p.w[0], p.w[1]};
    const double wsum = f.w1 + f.w2;
    if (f.w1 <= kDegenerateWeight * wsum || f.w2 <= kDegenerateWeight * wsum) {
        // One-asset basket: the curve degenerates to an axis-parallel line.
        const int a = f.w1 > f.w2 ? 0 : 1;
        const double c = std::log(f.Ktil / (a == 0 ? f.w1 : f.w2));
        CurvePoint cp;
        cp.normal = a == 0 ? Eigen::Vector2d(1, 0) : Eigen::Vector2d(0, 1);
        cp.n = x[a] - c;
        cp.x_o = x - cp.n * cp.normal;
        return cp;
    }

    // Parametrize the curve along its shallow axis so |dx_other/dt| <= 1 near
    // the foot point; on the steep flank the roles of the coordinates swap.
    const bool swapped = f.w1 * std::exp(x[0]) > f.w2 * std::exp(x[1]);
    const double wa = swapped ? f.w2 : f.w1;  // weight of the parameter axis
    const double wb = swapped ? f.w1 : f.w2;
    const double xa = swapped ? x[1] : x[0];
    const double xb = swapped ? x[0] : x[1];

    const double t_max = std::log(f.Ktil / wa);  // curve exists for xa < t_max
    auto xb_of = [&](double t) { return std::log((f.Ktil - wa * std::exp(t)) / wb); };

    // Initial guess: slide x along the diagonal onto the curve.
    const double shift = std::log(f.Ktil / (wa * std::exp(xa) + wb * std::exp(xb)));
    double t = std::min(xa + shift, t_max - 1e-12);

    const double scale = 1.0 + x.lpNorm<Eigen::Infinity>();
    const double tol = 1e-12 * scale;
    bool converged = false;
    for (int it = 0; it < 50; ++it) {
        const double x2 = xb_of(t);
        const double d2 = -(wa / wb) * std::exp(t - x2);  // dxb/dt, in [-1,0] here
        const double res = (xa - t) + (xb - x2) * d2;
        if (std::abs(res) <= tol) {
            converged = true;
            break;
        }
        const double dd2 = d2 * (1.0 - d2);
        const double dres = -1.0 - d2 * d2 + (xb - x2) * dd2;
        double step = -res / dres;
        // Keep the iterate strictly inside the parameter domain.
        double tn = t + step;
        while (tn >= t_max - 1e-13) {
            step *= 0.5;
            tn = t + step;
            if (std::abs(step) < 1e-16) break;
        }
        if (std::abs(tn - t) <= 1e-15 * scale) {
            t = tn;
            converged = std::abs(res) <= 1e3 * tol;
            break;
        }
        t = tn;
    }

    if (!converged) {
        // Golden-section nearest-point search along the curve parameter.
        auto dist2 = [&](double tt) {
            const double x2 = xb_of(tt);
            const double dx = xa - tt, dy = xb - x2;
            return dx * dx + dy * dy;
        };
        const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
        double lo = t - 10.0, hi = std::min(t + 10.0, t_max - 1e-12);
        double c1 = hi - gr * (hi - lo), c2 = lo + gr * (hi - lo);
        double f1 = dist2(c1), f2 = dist2(c2);
        for (int it = 0; it < 300 && hi - lo > 1e-14; ++it) {
            if (f1 < f2) {
                hi = c2; c2 = c1; f2 = f1;
                c1 = hi - gr * (hi - lo); f1 = dist2(c1);
            } else {
                lo = c1; c1 = c2; f1 = f2;
                c2 = lo + gr * (hi - lo); f2 = dist2(c2);
            }
        }
        t = 0.5 * (lo + hi);
        const double x2 = xb_of(t);
        const double d2 = -(wa / wb) * std::exp(t - x2);
        const double res = (xa - t) + (xb - x2) * d2;
        if (std::abs(res) > 1e-6 * scale)
            throw ProjectionFailure("project_to_curve: no foot point found");
    }

    CurvePoint cp;
    const double xb_foot = xb_of(t);
    cp.x_o = swapped ? Eigen::Vector2d(xb_foot, t) : Eigen::Vector2d(t, xb_foot);
    Eigen::Vector2d grad(f.w1 * std::exp(cp.x_o[0]), f.w2 * std::exp(cp.x_o[1]));
    cp.normal = grad.normalized();
    const Eigen::Vector2d d = x - cp.x_o;
    const double dist = d.norm();
    cp.n = dist < 1e-15 ? 0.0 : (d.dot(cp.normal) >= 0.0 ? dist : -dist);
    return cp;
}

BlendCoeffs blend_coefficients(double g_val, double dg, double d2g, double delta) {
    if (!(delta > 0.0)) throw std::invalid_argument("blend_coefficients: delta must be > 0");
    const double d3 = delta * delta * delta;
    BlendCoeffs cf;
    cf.a = -g_val / (8.0 * d3);
    cf.b = -(1.5 * g_val / delta + dg) / (8.0 * d3);
    cf.c = -(d2g + 3.0 * dg / delta + 3.0 * g_val / (delta * delta)) / (16.0 * d3);
    return cf;
}

double blend_eval(const BlendCoeffs& cf, double delta, double n) {
    const double m = n - delta, s = n + delta;
    return m * m * m * (cf.a + cf.b * s + cf.c * s * s);
}

double blend_eval_d1(const BlendCoeffs& cf, double delta, double n) {
    const double m = n - delta, s = n + delta;
    return 3.0 * m * m * (cf.a + cf.b * s + cf.c * s * s) + m * m * m * (cf.b + 2.0 * cf.c * s);
}

double blend_eval_d2(const BlendCoeffs& cf, double delta, double n) {
    const double m = n - delta, s = n + delta;
    return 6.0 * m * (cf.a + cf.b * s + cf.c * s * s) + 6.0 * m * m * (cf.b + 2.0 * cf.c * s) +
           2.0 * cf.c * m * m * m;
}

double smoothed_g(const PayoffSpec& spec, double tau, const Eigen::Vector2d& x) {
    const ModelParams& p = spec.params;
    const double delta = spec.delta;

    switch (spec.kind) {
        case PayoffKind::Polynomial:
            return boundary_g(spec, tau, x);  // already smooth, delta ignored

        case PayoffKind::WorstOfTwo:
        case PayoffKind::MinOfTwoPut: {
            const double c = kink_level(p, tau);
            const double m = spec.kind == PayoffKind::WorstOfTwo ? std::max(x[0], x[1])
                                                                 : std::min(x[0], x[1]);
            const double n = m - c;
            if (std::abs(n) >= delta) return boundary_g(spec, tau, x);
            // Along the 1D normal: g(n) = K (1 - e^n) on the in-the-money side.
            const double e = p.K * std::exp(-delta);
            const BlendCoeffs cf = blend_coefficients(p.K - e, -e, -e, delta);
            return blend_eval(cf, delta, n);
        }

        case PayoffKind::BasketPut:
        case PayoffKind::BasketCall: {
            // Distance prefilter: |basket - K| bounds K * dist(x, C) on the
            // low side and (basket) * dist on the high side (basket is convex
            // and its gradient 2-norm is bounded by its value).
            const double fval = forward_basket(p, tau, x) - p.K;
            if (delta < 1.0) {
                if (fval <= -p.K * delta) return boundary_g(spec, tau, x);
                if (fval * (1.0 - delta) >= p.K * delta) return boundary_g(spec, tau, x);
            }
            const CurvePoint cp = project_to_curve(spec, tau, x);
            if (std::abs(cp.n) >= delta) return boundary_g(spec, tau, x);
            double g, dg, d2g;
            if (spec.kind == PayoffKind::BasketPut) {
                basket_put_blend_data(p, tau, cp, delta, +1.0, &g, &dg, &d2g);
                return blend_eval(blend_coefficients(g, dg, d2g, delta), delta, cp.n);
            }
            // Call: blend the mirrored profile and evaluate at -n.
            basket_put_blend_data(p, tau, cp, delta, -1.0, &g, &dg, &d2g);
            return blend_eval(blend_coefficients(g, dg, d2g, delta), delta, -cp.n);
        }
    }
    return 0.0;
}

double smoothed_initial(const PayoffSpec& spec, const Eigen::Vector2d& x) {
    return smoothed_g(spec, 0.0, x);
}

SmoothedBoundary::SmoothedBoundary(PayoffSpec spec)
    : spec_(std::move(spec)), polynomial_(spec_.kind == PayoffKind::Polynomial) {
    spec_.validate();
    if (polynomial_) {
        const ModelParams& p = spec_.params;
        a1_ = 2.0 * p.r + p.sigma[0] * p.sigma[0] + jump_moment_Lambda(p, Axis(1));
        a2_ = 2.0 * p.r + p.sigma[1] * p.sigma[1] + jump_moment_Lambda(p, Axis(2));
        a12_ = 2.0 * p.r + p.rho * p.sigma[0] * p.sigma[1];
    }
}

double SmoothedBoundary::operator()(double tau, const Eigen::Vector2d& x) const {
    if (polynomial_) {
        return std::exp(2.0 * x[0] + a1_ * tau) + std::exp(2.0 * x[1] + a2_ * tau) +
               2.0 * std::exp(x[0] + x[1] + a12_ * tau);
    }
    return smoothed_g(spec_, tau, x);
}

}  // namespace levyfem
