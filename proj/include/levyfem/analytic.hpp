#pragma once

#include <functional>

#include <Eigen/Dense>

#include "levyfem/model.hpp"
#include "levyfem/payoff.hpp"

namespace levyfem {

/// Black-Scholes closed form for the payoff (S1+S2)^2:
///   S1^2 e^{(r+s1^2)(T-t)} + S2^2 e^{(r+s2^2)(T-t)} + 2 S1 S2 e^{(r+rho s1 s2)(T-t)}.
double bs_polynomial_price(const ModelParams& p, double t, double S1, double S2);

/// Jump-diffusion closed form: the squared terms gain Lambda_i in the
/// exponent, the cross term is unchanged (uncorrelated jumps).
double elm_polynomial_price(const ModelParams& p, double t, double S1, double S2);

/// Same shape with externally supplied variance-augmentation coefficients;
/// lets tests probe alternative Lambda values against the PIDE residual.
double elm_polynomial_price_with(const ModelParams& p, double t, double S1, double S2, double L1,
                                 double L2);

/// A space-time field with enough derivatives to evaluate the pricing
/// operator pointwise. All callbacks take (tau, x).
struct FieldProbe {
    std::function<double(double, const Eigen::Vector2d&)> value;
    std::function<Eigen::Vector2d(double, const Eigen::Vector2d&)> gradient;
    std::function<Eigen::Matrix2d(double, const Eigen::Vector2d&)> hessian;
    std::function<double(double, const Eigen::Vector2d&)> dtau;
};

/// Pointwise residual u_tau - D[u] - J[u], with the nonlocal term evaluated
/// by kernel quadrature of the compensated integrand. Vanishes on exact
/// solutions of the pricing equation; certifies the closed forms and the
/// smooth branches of the boundary function.
double pide_residual_at(const ModelParams& p, double tau, const Eigen::Vector2d& x,
                        const FieldProbe& field, int quad_nodes = 256, double W = 10.0);

/// The jump-diffusion polynomial solution as a FieldProbe in (tau,x) form,
/// u(tau,x) = e^{2x1+(2r+s1^2+L1)tau} + e^{2x2+(2r+s2^2+L2)tau}
///          + 2 e^{x1+x2+(2r+rho s1 s2)tau}.
FieldProbe make_elm_field(const ModelParams& p);
FieldProbe make_elm_field_with(const ModelParams& p, double L1, double L2);

/// The strictly-in-the-money branch of the basket-put boundary function,
/// g = K - w1 e^{x1+r tau} - w2 e^{x2+r tau} (no positive part).
FieldProbe make_put_g_field(const ModelParams& p);

}  // namespace levyfem
