#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace levyfem {

/// Selects one of the two jump components (1-based, matching the usual
/// subscript convention for the two assets).
class Axis {
public:
    explicit Axis(int index) : index_(index) {
        if (index != 1 && index != 2)
            throw std::invalid_argument("Axis index must be 1 or 2");
    }
    int index() const { return index_; }
    /// Zero-based position for array access.
    int pos() const { return index_ - 1; }

private:
    int index_;
};

/// Market and jump-diffusion parameters for the two-asset model.
///
/// Each asset carries a diffusion volatility sigma_i and an independent
/// compound-Poisson jump component with intensity lambda_i whose log-jump
/// sizes are Gaussian(nu_i, gamma_i^2). The two diffusions are correlated
/// by rho; the jump components are uncorrelated.
struct ModelParams {
    double r = 0.0;                    ///< risk-free rate (1/year)
    std::array<double, 2> sigma{};     ///< diffusion volatilities (1/sqrt(year))
    double rho = 0.0;                  ///< diffusion correlation
    std::array<double, 2> lambda{};    ///< jump intensities (1/year)
    std::array<double, 2> nu{};        ///< mean log-jump sizes
    std::array<double, 2> gamma{};     ///< log-jump standard deviations
    double T = 0.0;                    ///< maturity (years)
    double K = 0.0;                    ///< strike
    std::array<double, 2> w{0.5, 0.5}; ///< basket weights

    /// Throws std::invalid_argument on any violated constraint.
    void validate() const;
};

/// lambda_i-scaled Gaussian jump-size density k_i(y).
double kernel_density(const ModelParams& p, Axis ax, double y);

/// Signed tail integral of the jump kernel:
///   K_i(z) =  integral_z^inf k_i(y) dy   for z > 0,
///   K_i(z) = -integral_-inf^z k_i(y) dy  for z < 0.
/// z = 0 is excluded by the definition and rejected.
double antiderivative_K(const ModelParams& p, Axis ax, double z);

/// chi_i = integral (y - e^y + 1) k_i(y) dy
///       = lambda_i (nu_i + 1 - e^{nu_i + gamma_i^2/2}).
double drift_correction_chi(const ModelParams& p, Axis ax);

/// Second moment of the relative jump,
///   Lambda_i = lambda_i E[(Y-1)^2], Y lognormal(nu_i, gamma_i^2)
///            = lambda_i (e^{2 nu_i + 2 gamma_i^2} - 2 e^{nu_i + gamma_i^2/2} + 1).
/// Always >= 0. This is the coefficient that augments the effective variance
/// in the closed-form jump-diffusion price of the polynomial option.
double jump_moment_Lambda(const ModelParams& p, Axis ax);

/// kappa = 1/2 [[s1^2, rho s1 s2], [rho s1 s2, s2^2]]; SPD for |rho| < 1.
Eigen::Matrix2d diffusion_matrix(const ModelParams& p);

/// alpha = (r - s1^2/2, r - s2^2/2).
Eigen::Vector2d drift_vector(const ModelParams& p);

}  // namespace levyfem
