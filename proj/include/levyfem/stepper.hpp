#pragma once

#include <array>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "levyfem/assembly.hpp"
#include "levyfem/jump.hpp"
#include "levyfem/mesh.hpp"
#include "levyfem/model.hpp"
#include "levyfem/payoff.hpp"
#include "levyfem/surface.hpp"

namespace levyfem {

enum class Scheme { CrankNicolsonFull, ImexCN, ImexBackwardEuler };

const char* scheme_name(Scheme s);

struct SchemeConfig {
    Scheme scheme = Scheme::ImexCN;
    double dt = 0.01;
    int n_steps = 0;
    double solver_tol = 1e-10;
    int solver_max_iter = 400;

    /// Requires n_steps * dt = T to 1e-12 (n_steps = 0 is the tau = 0 limit).
    void validate(double T) const;
};

struct JumpConfig {
    int n_nodes = 128;
    double W = 8.0;
};

struct SolveState {
    double tau = 0.0;
    int step_index = 0;
    Eigen::VectorXd u;  ///< all vertices; boundary entries pinned to g~(tau,.)
};

/// Linear-solver divergence: carries the terminal residual.
struct StepFailure : std::runtime_error {
    StepFailure(const std::string& what, double residual_, int iterations_, int step_)
        : std::runtime_error(what), residual(residual_), iterations(iterations_), step(step_) {}
    double residual;
    int iterations;
    int step;
};

/// Direct sparse solve with a residual guarantee: ||Ax-b||/||b|| <= tol or
/// StepFailure. Deterministic for fixed inputs.
Eigen::VectorXd solve_linear(const SparseOperator& A, const Eigen::VectorXd& b, double tol,
                             int max_iter);

/// Everything assembled once per (mesh, payoff, jump rule): the discrete
/// operators of the localized problem plus lazily-built per-scheme solver
/// state (factorizations, the assembled jump matrix for the fully implicit
/// scheme).
class OperatorSet {
public:
    OperatorSet(const FemSpace& space, const PayoffSpec& spec, const JumpConfig& jq = {});
    ~OperatorSet();
    OperatorSet(OperatorSet&&) noexcept;
    OperatorSet& operator=(OperatorSet&&) noexcept;

    const FemSpace& space() const { return *space_; }
    const PayoffSpec& payoff() const { return boundary_.spec(); }
    const SparseOperator& mass() const { return mass_; }
    const SparseOperator& diffusion() const { return diffusion_; }
    const SparseOperator& convection() const { return convection_; }
    const std::array<JumpQuadrature, 2>& quadratures() const { return quad_; }
    const SmoothedBoundary& boundary() const { return boundary_; }
    const JumpConfig& jump_config() const { return jump_cfg_; }

    /// g~(tau, x) as the jump extension callback.
    JumpExtensionFn extension() const;

    /// Explicit compensated jump applied to the current nodal values.
    Eigen::VectorXd jump_explicit(const Eigen::VectorXd& nodal, double tau) const;

    /// Assembled jump matrix (built on first use).
    const JumpMatrix& jump_matrix() const;

    long solver_iterations() const { return solver_iterations_; }

    friend void step_inplace(SolveState& state, OperatorSet& ops, const SchemeConfig& cfg);

private:
    struct SchemeCache;
    SchemeCache& cache_for(const SchemeConfig& cfg) const;

    const FemSpace* space_;
    SmoothedBoundary boundary_;
    JumpConfig jump_cfg_;
    SparseOperator mass_, diffusion_, convection_;
    std::array<JumpQuadrature, 2> quad_;
    mutable std::unique_ptr<JumpMatrix> jump_matrix_;
    mutable std::unique_ptr<SchemeCache> cache_;
    mutable long solver_iterations_ = 0;
};

/// u(0,.) = h~ sampled at the vertices.
SolveState initialize(const FemSpace& space, const PayoffSpec& spec);

/// One time step tau_n -> tau_n + dt of the configured scheme, Dirichlet rows
/// pinned to g~(tau_{n+1},.).
void step_inplace(SolveState& state, OperatorSet& ops, const SchemeConfig& cfg);
SolveState step(const SolveState& state, OperatorSet& ops, const SchemeConfig& cfg);

using StepObserver = std::function<void(const SolveState&)>;

/// Full solve from tau = 0 to tau = n_steps * dt.
PriceSurface run(const FemSpace& space, const PayoffSpec& spec, const SchemeConfig& cfg,
                 const JumpConfig& jq = {}, const StepObserver& observer = nullptr);

}  // namespace levyfem
