#include "levyfem/stepper.hpp"

#include <chrono>
#include <cmath>
#include <vector>

#include <Eigen/SparseLU>

namespace levyfem {

const char* scheme_name(Scheme s) {
    switch (s) {
        case Scheme::CrankNicolsonFull: return "cn_full";
        case Scheme::ImexCN: return "imex_cn";
        case Scheme::ImexBackwardEuler: return "imex_be";
    }
    return "?";
}

void SchemeConfig::validate(double T) const {
    if (!(dt > 0.0)) throw std::invalid_argument("SchemeConfig: dt must be > 0");
    if (n_steps < 0) throw std::invalid_argument("SchemeConfig: n_steps must be >= 0");
    if (std::abs(n_steps * dt - T) > 1e-12 * std::max(1.0, T))
        throw std::invalid_argument("SchemeConfig: n_steps * dt must equal T");
    if (!(solver_tol > 0.0) || solver_max_iter < 1)
        throw std::invalid_argument("SchemeConfig: bad solver settings");
}

Eigen::VectorXd solve_linear(const SparseOperator& A, const Eigen::VectorXd& b, double tol,
                             int max_iter) {
    (void)max_iter;  // direct factorization: one "iteration"
    Eigen::SparseLU<SparseOperator> lu;
    lu.compute(A);
    if (lu.info() != Eigen::Success)
        throw StepFailure("solve_linear: factorization failed", std::nan(""), 0, -1);
    Eigen::VectorXd x = lu.solve(b);
    const double bn = b.norm();
    const double res = (A * x - b).norm() / (bn > 0.0 ? bn : 1.0);
    if (!(res <= tol))
        throw StepFailure("solve_linear: residual above tolerance", res, 1, -1);
    return x;
}

namespace {

/// Replace the rows of flagged vertices by identity rows.
SparseOperator pin_rows(const SparseOperator& A, const std::vector<std::uint8_t>& mask) {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(A.nonZeros()) + mask.size());
    for (int k = 0; k < A.outerSize(); ++k)
        for (SparseOperator::InnerIterator it(A, k); it; ++it)
            if (!mask[static_cast<std::size_t>(it.row())])
                trip.emplace_back(it.row(), it.col(), it.value());
    for (std::size_t i = 0; i < mask.size(); ++i)
        if (mask[i]) trip.emplace_back(static_cast<int>(i), static_cast<int>(i), 1.0);
    SparseOperator out(A.rows(), A.cols());
    out.setFromTriplets(trip.begin(), trip.end());
    out.makeCompressed();
    return out;
}

struct BicgResult {
    int iterations = 0;
    double residual = 0.0;
    bool converged = false;
};

/// Preconditioned BiCGStab; M_solve applies the preconditioner inverse.
template <typename Apply, typename Precond>
BicgResult bicgstab(const Apply& A, const Precond& M_solve, const Eigen::VectorXd& b,
                    Eigen::VectorXd& x, double tol, int max_iter) {
    using Vec = Eigen::VectorXd;
    const double bnorm = b.norm() > 0.0 ? b.norm() : 1.0;
    Vec r = b - A(x);
    Vec r0 = r;
    double rho = 1.0, alpha = 1.0, omega = 1.0;
    Vec v = Vec::Zero(b.size()), p = Vec::Zero(b.size());
    BicgResult out;
    out.residual = r.norm() / bnorm;
    if (out.residual <= tol) {
        out.converged = true;
        return out;
    }
    for (int it = 1; it <= max_iter; ++it) {
        const double rho1 = r0.dot(r);
        if (rho1 == 0.0) break;
        if (it == 1) {
            p = r;
        } else {
            const double beta = (rho1 / rho) * (alpha / omega);
            p = r + beta * (p - omega * v);
        }
        rho = rho1;
        const Vec phat = M_solve(p);
        v = A(phat);
        alpha = rho1 / r0.dot(v);
        const Vec s = r - alpha * v;
        if (s.norm() / bnorm <= tol) {
            x += alpha * phat;
            out.iterations = it;
            out.residual = s.norm() / bnorm;
            out.converged = true;
            return out;
        }
        const Vec shat = M_solve(s);
        const Vec t = A(shat);
        omega = t.dot(s) / t.dot(t);
        x += alpha * phat + omega * shat;
        r = s - omega * t;
        out.iterations = it;
        out.residual = r.norm() / bnorm;
        if (out.residual <= tol) {
            out.converged = true;
            return out;
        }
        if (omega == 0.0) break;
    }
    return out;
}

}  // namespace

struct OperatorSet::SchemeCache {
    Scheme scheme;
    double dt;
    SparseOperator lhs;        // pinned implicit matrix
    SparseOperator rhs_mat;    // explicit part applied to u^n (rows for all vertices)
    Eigen::SparseLU<SparseOperator> lu;  // factorization of lhs (imex) / preconditioner (cn_full)
    bool krylov = false;
};

OperatorSet::~OperatorSet() = default;
OperatorSet::OperatorSet(OperatorSet&&) noexcept = default;
OperatorSet& OperatorSet::operator=(OperatorSet&&) noexcept = default;

OperatorSet::OperatorSet(const FemSpace& space, const PayoffSpec& spec, const JumpConfig& jq)
    : space_(&space), boundary_(spec), jump_cfg_(jq) {
    spec.validate();
    mass_ = assemble_mass(space);
    diffusion_ = assemble_diffusion(space, diffusion_matrix(spec.params));
    convection_ = assemble_convection(space, drift_vector(spec.params));
    quad_[0] = build_quadrature(spec.params, Axis(1), jq.n_nodes, jq.W);
    quad_[1] = build_quadrature(spec.params, Axis(2), jq.n_nodes, jq.W);
}

JumpExtensionFn OperatorSet::extension() const {
    const SmoothedBoundary& b = boundary_;
    return [&b](double tau, const Eigen::Vector2d& x) { return b(tau, x); };
}

Eigen::VectorXd OperatorSet::jump_explicit(const Eigen::VectorXd& nodal, double tau) const {
    return apply_jump(*space_, quad_, nodal, tau, extension());
}

const JumpMatrix& OperatorSet::jump_matrix() const {
    if (!jump_matrix_)
        jump_matrix_ = std::make_unique<JumpMatrix>(assemble_jump_matrix(*space_, quad_));
    return *jump_matrix_;
}

OperatorSet::SchemeCache& OperatorSet::cache_for(const SchemeConfig& cfg) const {
    if (cache_ && cache_->scheme == cfg.scheme && cache_->dt == cfg.dt) return *cache_;
    auto c = std::make_unique<SchemeCache>();
    c->scheme = cfg.scheme;
    c->dt = cfg.dt;

    const SparseOperator local = diffusion_ + convection_;  // realizes the non-jump part of a(u,v)
    switch (cfg.scheme) {
        case Scheme::ImexCN:
            c->lhs = pin_rows(SparseOperator(mass_ + (0.5 * cfg.dt) * local), space_->boundary_mask);
            c->rhs_mat = mass_ - (0.5 * cfg.dt) * local;
            break;
        case Scheme::ImexBackwardEuler:
            c->lhs = pin_rows(SparseOperator(mass_ + cfg.dt * local), space_->boundary_mask);
            c->rhs_mat = mass_;
            break;
        case Scheme::CrankNicolsonFull: {
            const JumpMatrix& jm = jump_matrix();
            const SparseOperator mj = SparseOperator(mass_ * jm.matrix);
            c->lhs = pin_rows(SparseOperator(mass_ + (0.5 * cfg.dt) * local - (0.5 * cfg.dt) * mj),
                              space_->boundary_mask);
            c->rhs_mat = mass_ - (0.5 * cfg.dt) * local + (0.5 * cfg.dt) * mj;
            c->krylov = true;
            break;
        }
    }
    // Factorize the implicit matrix; for the fully implicit scheme the
    // diffusion-only matrix preconditions the Krylov iteration instead.
    if (c->krylov) {
        const SparseOperator pc =
            pin_rows(SparseOperator(mass_ + (0.5 * cfg.dt) * local), space_->boundary_mask);
        c->lu.compute(pc);
    } else {
        c->lu.compute(c->lhs);
    }
    if (c->lu.info() != Eigen::Success)
        throw StepFailure("step: factorization failed", std::nan(""), 0, -1);
    cache_ = std::move(c);
    return *cache_;
}

SolveState initialize(const FemSpace& space, const PayoffSpec& spec) {
    spec.validate();
    SolveState st;
    st.u.resize(space.num_vertices());
    for (int i = 0; i < space.num_vertices(); ++i)
        st.u[i] = smoothed_initial(spec, space.vertices[i]);
    return st;
}

void step_inplace(SolveState& state, OperatorSet& ops, const SchemeConfig& cfg) {
    auto& c = ops.cache_for(cfg);
    const double tau_n = state.tau;
    const double tau_n1 = cfg.dt * (state.step_index + 1);

    Eigen::VectorXd rhs = c.rhs_mat * state.u;
    switch (cfg.scheme) {
        case Scheme::ImexCN:
        case Scheme::ImexBackwardEuler:
            rhs += cfg.dt * (ops.mass_ * ops.jump_explicit(state.u, tau_n));
            break;
        case Scheme::CrankNicolsonFull: {
            const JumpMatrix& jm = ops.jump_matrix();
            const auto ext = ops.extension();
            rhs += (0.5 * cfg.dt) * (ops.mass_ * (jm.affine(tau_n, ext) + jm.affine(tau_n1, ext)));
            break;
        }
    }
    const FemSpace& space = *ops.space_;
    for (int i = 0; i < space.num_vertices(); ++i)
        if (space.boundary_mask[i]) rhs[i] = ops.boundary_(tau_n1, space.vertices[i]);

    if (c.krylov) {
        Eigen::VectorXd x = state.u;  // warm start from the previous level
        auto result = bicgstab([&](const Eigen::VectorXd& y) { return Eigen::VectorXd(c.lhs * y); },
                               [&](const Eigen::VectorXd& y) { return Eigen::VectorXd(c.lu.solve(y)); },
                               rhs, x, cfg.solver_tol, cfg.solver_max_iter);
        ops.solver_iterations_ += result.iterations;
        if (!result.converged)
            throw StepFailure("step: Krylov solver diverged", result.residual, result.iterations,
                              state.step_index);
        state.u = std::move(x);
    } else {
        Eigen::VectorXd x = c.lu.solve(rhs);
        ops.solver_iterations_ += 1;
        const double bn = rhs.norm() > 0.0 ? rhs.norm() : 1.0;
        const double res = (c.lhs * x - rhs).norm() / bn;
        if (!(res <= std::max(cfg.solver_tol, 1e-9)))
            throw StepFailure("step: direct solve residual above tolerance", res, 1,
                              state.step_index);
        state.u = std::move(x);
    }
    ++state.step_index;
    state.tau = tau_n1;
}

SolveState step(const SolveState& state, OperatorSet& ops, const SchemeConfig& cfg) {
    SolveState next = state;
    step_inplace(next, ops, cfg);
    return next;
}

PriceSurface run(const FemSpace& space, const PayoffSpec& spec, const SchemeConfig& cfg,
                 const JumpConfig& jq, const StepObserver& observer) {
    using clock = std::chrono::steady_clock;
    cfg.validate(cfg.n_steps * cfg.dt);

    const auto t0 = clock::now();
    OperatorSet ops(space, spec, jq);
    SolveState st = initialize(space, spec);
    const auto t1 = clock::now();
    if (observer) observer(st);
    try {
        for (int k = 0; k < cfg.n_steps; ++k) {
            step_inplace(st, ops, cfg);
            if (observer) observer(st);
        }
    } catch (const StepFailure& f) {
        throw StepFailure(std::string(f.what()) + " at step " + std::to_string(f.step), f.residual,
                          f.iterations, f.step);
    }
    const auto t2 = clock::now();

    if (!st.u.allFinite())
        throw StepFailure("run: non-finite values in the final state", std::nan(""), 0,
                          st.step_index);

    PriceSurface out;
    out.space = space;
    out.u = std::move(st.u);
    out.tau = st.tau;
    out.payoff = spec;
    out.meta.scheme = scheme_name(cfg.scheme);
    out.meta.dt = cfg.dt;
    out.meta.n_steps = cfg.n_steps;
    out.meta.domain_half_width = space.M;
    out.meta.n_per_side = space.n_per_side;
    out.meta.delta = spec.delta;
    out.meta.quad_nodes = jq.n_nodes;
    out.meta.quad_window = jq.W;
    out.meta.setup_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    out.meta.step_ms = std::chrono::duration<double, std::milli>(t2 - t1).count();
    out.meta.solver_iterations = ops.solver_iterations();
    return out;
}

}  // namespace levyfem
