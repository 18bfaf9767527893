#include "levyfem/model.hpp"

#include <numbers>

namespace levyfem {

namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014326779;

double norm_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }
double norm_ccdf(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

}  // namespace

void ModelParams::validate() const {
    auto fail = [](const std::string& what) {
        throw std::invalid_argument("ModelParams: " + what);
    };
    for (int i = 0; i < 2; ++i) {
        if (!(sigma[i] > 0.0)) fail("sigma must be > 0");
        if (!(gamma[i] > 0.0)) fail("gamma must be > 0");
        if (!(lambda[i] >= 0.0)) fail("lambda must be >= 0");
        if (!(w[i] >= 0.0)) fail("weights must be >= 0");
        if (!std::isfinite(nu[i])) fail("nu must be finite");
    }
    if (!(std::abs(rho) < 1.0)) fail("|rho| must be < 1 (kappa must stay positive definite)");
    if (!(K > 0.0)) fail("K must be > 0");
    if (!(T > 0.0)) fail("T must be > 0");
    if (!std::isfinite(r)) fail("r must be finite");
}

double kernel_density(const ModelParams& p, Axis ax, double y) {
    const int i = ax.pos();
    if (p.lambda[i] == 0.0) return 0.0;
    const double z = (y - p.nu[i]) / p.gamma[i];
    return p.lambda[i] * kInvSqrt2Pi / p.gamma[i] * std::exp(-0.5 * z * z);
}

double antiderivative_K(const ModelParams& p, Axis ax, double z) {
    if (z == 0.0)
        throw std::domain_error("antiderivative_K: undefined at z = 0");
    const int i = ax.pos();
    const double s = (z - p.nu[i]) / p.gamma[i];
    if (z > 0.0) return p.lambda[i] * norm_ccdf(s);
    return -p.lambda[i] * norm_cdf(s);
}

double drift_correction_chi(const ModelParams& p, Axis ax) {
    const int i = ax.pos();
    return p.lambda[i] * (p.nu[i] + 1.0 - std::exp(p.nu[i] + 0.5 * p.gamma[i] * p.gamma[i]));
}

double jump_moment_Lambda(const ModelParams& p, Axis ax) {
    const int i = ax.pos();
    const double g2 = p.gamma[i] * p.gamma[i];
    return p.lambda[i] *
           (std::exp(2.0 * p.nu[i] + 2.0 * g2) - 2.0 * std::exp(p.nu[i] + 0.5 * g2) + 1.0);
}

Eigen::Matrix2d diffusion_matrix(const ModelParams& p) {
    if (!(std::abs(p.rho) < 1.0))
        throw std::invalid_argument("diffusion_matrix: |rho| must be < 1");
    Eigen::Matrix2d k;
    const double c = p.rho * p.sigma[0] * p.sigma[1];
    k << p.sigma[0] * p.sigma[0], c, c, p.sigma[1] * p.sigma[1];
    return 0.5 * k;
}

Eigen::Vector2d drift_vector(const ModelParams& p) {
    return {p.r - 0.5 * p.sigma[0] * p.sigma[0], p.r - 0.5 * p.sigma[1] * p.sigma[1]};
}

}  // namespace levyfem
