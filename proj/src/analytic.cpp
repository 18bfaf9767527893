#include "levyfem/analytic.hpp"

#include <cmath>
#include <stdexcept>

#include "detail/gauss.hpp"

namespace levyfem {

namespace {

void check_time(const ModelParams& p, double t) {
    if (t < 0.0 || t > p.T + 1e-12)
        throw std::invalid_argument("polynomial price: t must lie in [0, T]");
}

}  // namespace

double bs_polynomial_price(const ModelParams& p, double t, double S1, double S2) {
    return elm_polynomial_price_with(p, t, S1, S2, 0.0, 0.0);
}

double elm_polynomial_price(const ModelParams& p, double t, double S1, double S2) {
    return elm_polynomial_price_with(p, t, S1, S2, jump_moment_Lambda(p, Axis(1)),
                                     jump_moment_Lambda(p, Axis(2)));
}

double elm_polynomial_price_with(const ModelParams& p, double t, double S1, double S2, double L1,
                                 double L2) {
    check_time(p, t);
    const double tau = p.T - t;
    const double s1 = p.sigma[0], s2 = p.sigma[1];
    return S1 * S1 * std::exp((p.r + s1 * s1 + L1) * tau) +
           S2 * S2 * std::exp((p.r + s2 * s2 + L2) * tau) +
           2.0 * S1 * S2 * std::exp((p.r + p.rho * s1 * s2) * tau);
}

double pide_residual_at(const ModelParams& p, double tau, const Eigen::Vector2d& x,
                        const FieldProbe& field, int quad_nodes, double W) {
    const Eigen::Matrix2d kappa = diffusion_matrix(p);
    const Eigen::Vector2d alpha = drift_vector(p);

    const double u = field.value(tau, x);
    const Eigen::Vector2d grad = field.gradient(tau, x);
    const Eigen::Matrix2d hess = field.hessian(tau, x);
    const double ut = field.dtau(tau, x);

    double D = alpha.dot(grad);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) D += kappa(i, j) * hess(i, j);

    double J = 0.0;
    const int per_panel = 16;
    const int n_panels = std::max(1, quad_nodes / per_panel);
    const auto [gx, gw] = detail::gauss_legendre(per_panel);
    for (int axis = 0; axis < 2; ++axis) {
        const Axis ax(axis + 1);
        if (p.lambda[axis] == 0.0) continue;
        const double lo = p.nu[axis] - W * p.gamma[axis];
        const double hi = p.nu[axis] + W * p.gamma[axis];
        const double pw = (hi - lo) / n_panels;
        for (int pnl = 0; pnl < n_panels; ++pnl) {
            const double mid = lo + (pnl + 0.5) * pw;
            for (int j = 0; j < per_panel; ++j) {
                const double y = mid + 0.5 * pw * gx[j];
                const double w = 0.5 * pw * gw[j] * kernel_density(p, ax, y);
                Eigen::Vector2d xs = x;
                xs[axis] += y;
                J += w * (field.value(tau, xs) - u - std::expm1(y) * grad[axis]);
            }
        }
    }
    return ut - D - J;
}

FieldProbe make_elm_field(const ModelParams& p) {
    return make_elm_field_with(p, jump_moment_Lambda(p, Axis(1)), jump_moment_Lambda(p, Axis(2)));
}

FieldProbe make_elm_field_with(const ModelParams& p, double L1, double L2) {
    const double a1 = 2.0 * p.r + p.sigma[0] * p.sigma[0] + L1;
    const double a2 = 2.0 * p.r + p.sigma[1] * p.sigma[1] + L2;
    const double a12 = 2.0 * p.r + p.rho * p.sigma[0] * p.sigma[1];
    auto terms = [=](double tau, const Eigen::Vector2d& x) {
        return Eigen::Vector3d(std::exp(2.0 * x[0] + a1 * tau), std::exp(2.0 * x[1] + a2 * tau),
                               2.0 * std::exp(x[0] + x[1] + a12 * tau));
    };
    FieldProbe f;
    f.value = [=](double tau, const Eigen::Vector2d& x) { return terms(tau, x).sum(); };
    f.gradient = [=](double tau, const Eigen::Vector2d& x) {
        const Eigen::Vector3d t = terms(tau, x);
        return Eigen::Vector2d(2.0 * t[0] + t[2], 2.0 * t[1] + t[2]);
    };
    f.hessian = [=](double tau, const Eigen::Vector2d& x) {
        const Eigen::Vector3d t = terms(tau, x);
        Eigen::Matrix2d h;
        h << 4.0 * t[0] + t[2], t[2], t[2], 4.0 * t[1] + t[2];
        return h;
    };
    f.dtau = [=](double tau, const Eigen::Vector2d& x) {
        const Eigen::Vector3d t = terms(tau, x);
        return a1 * t[0] + a2 * t[1] + a12 * t[2];
    };
    return f;
}

FieldProbe make_put_g_field(const ModelParams& p) {
    auto e = [=](double tau, const Eigen::Vector2d& x) {
        return Eigen::Vector2d(p.w[0] * std::exp(x[0] + p.r * tau),
                               p.w[1] * std::exp(x[1] + p.r * tau));
    };
    FieldProbe f;
    f.value = [=](double tau, const Eigen::Vector2d& x) {
        const Eigen::Vector2d v = e(tau, x);
        return p.K - v[0] - v[1];
    };
    f.gradient = [=](double tau, const Eigen::Vector2d& x) { return Eigen::Vector2d(-e(tau, x)); };
    f.hessian = [=](double tau, const Eigen::Vector2d& x) {
        const Eigen::Vector2d v = e(tau, x);
        Eigen::Matrix2d h;
        h << -v[0], 0.0, 0.0, -v[1];
        return h;
    };
    f.dtau = [=](double tau, const Eigen::Vector2d& x) {
        const Eigen::Vector2d v = e(tau, x);
        return -p.r * (v[0] + v[1]);
    };
    return f;
}

}  // namespace levyfem
