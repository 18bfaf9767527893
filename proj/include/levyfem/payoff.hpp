#pragma once

#include <stdexcept>

#include <Eigen/Dense>

#include "levyfem/model.hpp"

namespace levyfem {

/// Two-asset payoffs. WorstOfTwo is priced as a put on the better-performing
/// asset, (K - max(S1,S2))^+, and MinOfTwoPut as (K - min(S1,S2))^+, so that
/// the row-wise ordering
///   WorstOfTwo <= BasketPut <= MinOfTwoPut   (for w1 + w2 = 1)
/// holds pointwise. Polynomial is the smooth test payoff (S1 + S2)^2.
enum class PayoffKind { BasketCall, BasketPut, WorstOfTwo, MinOfTwoPut, Polynomial };

const char* payoff_kind_name(PayoffKind k);

/// Payoff selection plus the smoothing half-width delta, measured as normal
/// distance in log coordinates.
struct PayoffSpec {
    PayoffKind kind = PayoffKind::BasketPut;
    double delta = 0.1;
    ModelParams params;

    void validate() const {
        params.validate();
        if (!(delta > 0.0)) throw std::invalid_argument("PayoffSpec: delta must be > 0");
    }
};

/// Foot point of the normal projection onto the strike curve C.
struct CurvePoint {
    Eigen::Vector2d x_o;     ///< foot point on C
    double n = 0.0;          ///< signed normal distance, positive on the high-price side
    Eigen::Vector2d normal;  ///< unit normal of C at x_o (components > 0)
};

/// Thrown when the Newton projection and its golden-section fallback both
/// fail to locate a foot point.
struct ProjectionFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Terminal payoff H(S1,S2); rejects negative prices.
double payoff_value(const PayoffSpec& spec, double S1, double S2);

/// Far-field/boundary data g(tau,x) in forward-grown log coordinates, e.g.
/// (K - w1 e^{x1+r tau} - w2 e^{x2+r tau})^+ for the basket put. Satisfies
/// g(0,x) = payoff(e^{x1},e^{x2}) and solves the pricing equation on its
/// smooth branches. For Polynomial this is the exact jump-diffusion solution.
double boundary_g(const PayoffSpec& spec, double tau, const Eigen::Vector2d& x);

/// Nearest-point projection onto the weighted strike curve
///   w1 e^{x1 + r tau} + w2 e^{x2 + r tau} = K.
/// Newton on the curve parameter with a golden-section fallback; the returned
/// signed distance n is sgn(x1 - x1_o) ||x - x_o||.
CurvePoint project_to_curve(const PayoffSpec& spec, double tau, const Eigen::Vector2d& x);

/// Coefficients of the C^2 blending polynomial
///   p(n) = (n - delta)^3 (a + b (n + delta) + c (n + delta)^2)
/// matching value/first/second normal derivative of g at n = -delta and
/// vanishing to second order at n = +delta.
struct BlendCoeffs {
    double a, b, c;
};

BlendCoeffs blend_coefficients(double g_val, double dg, double d2g, double delta);

double blend_eval(const BlendCoeffs& cf, double delta, double n);
double blend_eval_d1(const BlendCoeffs& cf, double delta, double n);
double blend_eval_d2(const BlendCoeffs& cf, double delta, double n);

/// The smoothed boundary function g~: equals g outside the band of normal
/// width delta around the payoff kink, and the blending polynomial evaluated
/// at the signed normal distance inside it.
double smoothed_g(const PayoffSpec& spec, double tau, const Eigen::Vector2d& x);

/// Smoothed initial data h~(x) = g~(0,x).
double smoothed_initial(const PayoffSpec& spec, const Eigen::Vector2d& x);

/// g~ bound to one spec with the model-dependent exponents precomputed;
/// used in the time-stepping hot loops (far-field extension, boundary
/// pinning) where smoothed_g would redo the moment algebra per call.
class SmoothedBoundary {
public:
    explicit SmoothedBoundary(PayoffSpec spec);
    double operator()(double tau, const Eigen::Vector2d& x) const;
    const PayoffSpec& spec() const { return spec_; }

private:
    PayoffSpec spec_;
    bool polynomial_;
    double a1_ = 0.0, a2_ = 0.0, a12_ = 0.0;
};

}  // namespace levyfem
