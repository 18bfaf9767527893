#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "levyfem/assembly.hpp"
#include "levyfem/mesh.hpp"
#include "levyfem/model.hpp"

namespace levyfem {

/// Kernel-premultiplied quadrature for one jump component: nodes are the jump
/// sizes y_j on the truncated window [nu - W gamma, nu + W gamma], weights
/// carry k_i(y_j) so that sum w_j ~ lambda_i. Empty when lambda_i = 0.
struct JumpQuadrature {
    std::vector<double> nodes;
    std::vector<double> weights;
    double window_lo = 0.0;
    double window_hi = 0.0;
    double weight_sum = 0.0;  ///< ~ lambda_i (kernel mass)
    double exp_moment = 0.0;  ///< sum w_j (e^{y_j} - 1) ~ lambda_i (e^{nu+gamma^2/2} - 1)

    bool empty() const { return nodes.empty(); }
};

/// Composite Gauss-Legendre rule on the truncated kernel support; panels are
/// symmetric about nu so the node set is too.
JumpQuadrature build_quadrature(const ModelParams& p, Axis ax, int n_nodes, double W);

void dump_quadrature_csv(const JumpQuadrature& q, std::ostream& os);

/// Far-field callback, evaluated where a jump displacement leaves the box.
using JumpExtensionFn = std::function<double(double tau, const Eigen::Vector2d&)>;

/// Vertex-collocated compensated jump operator:
///   J_i = sum_axes sum_j w_j [ u(x_i + y_j e_ax) - u(x_i)
///                              - (e^{y_j} - 1) du/dx_ax(x_i) ],
/// with off-grid values by P1 interpolation along the grid line, off-box
/// values by the extension, and the vertex gradient by centered differences
/// (second-order one-sided on the box edge).
Eigen::VectorXd apply_jump(const FemSpace& space, const std::array<JumpQuadrature, 2>& quad,
                           const Eigen::VectorXd& nodal, double tau,
                           const JumpExtensionFn& extension);

/// apply_jump split into a sparse matrix on nodal values plus the affine
/// contribution of the extension. The matrix couples a vertex only with
/// vertices along its own grid lines (one block per uncorrelated jump axis);
/// the affine terms are (row, weight, point) triples evaluated lazily at a
/// given time level.
struct JumpMatrix {
    struct AffineTerm {
        int row;
        double weight;
        Eigen::Vector2d point;
    };

    SparseOperator matrix;
    std::vector<AffineTerm> affine_terms;

    Eigen::VectorXd affine(double tau, const JumpExtensionFn& extension) const;
};

JumpMatrix assemble_jump_matrix(const FemSpace& space, const std::array<JumpQuadrature, 2>& quad);

}  // namespace levyfem
