#include "levyfem/jump.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <thread>
#include <vector>

#include "detail/gauss.hpp"

namespace levyfem {

JumpQuadrature build_quadrature(const ModelParams& p, Axis ax, int n_nodes, double W) {
    if (n_nodes < 8) throw std::invalid_argument("build_quadrature: n_nodes must be >= 8");
    if (!(W >= 6.0)) throw std::invalid_argument("build_quadrature: W must be >= 6");
    const int i = ax.pos();
    JumpQuadrature q;
    if (p.lambda[i] == 0.0) return q;

    q.window_lo = p.nu[i] - W * p.gamma[i];
    q.window_hi = p.nu[i] + W * p.gamma[i];

    const int per_panel = std::min(16, n_nodes);
    const int n_panels = (n_nodes + per_panel - 1) / per_panel;
    const auto [gx, gw] = detail::gauss_legendre(per_panel);

    const double panel_w = (q.window_hi - q.window_lo) / n_panels;
    q.nodes.reserve(static_cast<std::size_t>(n_panels) * per_panel);
    q.weights.reserve(q.nodes.capacity());
    for (int pnl = 0; pnl < n_panels; ++pnl) {
        const double a = q.window_lo + pnl * panel_w;
        const double mid = a + 0.5 * panel_w;
        for (int j = 0; j < per_panel; ++j) {
            const double y = mid + 0.5 * panel_w * gx[j];
            const double w = 0.5 * panel_w * gw[j] * kernel_density(p, ax, y);
            q.nodes.push_back(y);
            q.weights.push_back(w);
            q.weight_sum += w;
            q.exp_moment += w * std::expm1(y);
        }
    }
    return q;
}

void dump_quadrature_csv(const JumpQuadrature& q, std::ostream& os) {
    os << "# node,weight\n";
    char buf[80];
    for (std::size_t j = 0; j < q.nodes.size(); ++j) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", q.nodes[j], q.weights[j]);
        os << buf;
    }
}

namespace {

struct AxisTable {
    struct Node {
        int offset;     // floor(y / spacing)
        double frac;    // y / spacing - offset, in [0,1)
        double y;
        double w;       // kernel-premultiplied weight
    };
    std::vector<Node> nodes;
    double w_sum = 0.0;   // sum w_j
    double we_sum = 0.0;  // sum w_j (e^{y_j} - 1)
};

AxisTable make_table(const JumpQuadrature& q, double spacing) {
    AxisTable t;
    t.nodes.reserve(q.nodes.size());
    for (std::size_t j = 0; j < q.nodes.size(); ++j) {
        const double s = q.nodes[j] / spacing;
        const double off = std::floor(s);
        t.nodes.push_back({static_cast<int>(off), s - off, q.nodes[j], q.weights[j]});
        t.w_sum += q.weights[j];
        t.we_sum += q.weights[j] * std::expm1(q.nodes[j]);
    }
    return t;
}

/// Centered difference along one axis, second-order one-sided at the edges.
double line_gradient(const Eigen::VectorXd& u, int base, int stride, int k, int n, double spacing) {
    const double inv2c = 1.0 / (2.0 * spacing);
    if (k == 0)
        return (-3.0 * u[base] + 4.0 * u[base + stride] - u[base + 2 * stride]) * inv2c;
    if (k == n - 1)
        return (3.0 * u[base + k * stride] - 4.0 * u[base + (k - 1) * stride] +
                u[base + (k - 2) * stride]) * inv2c;
    return (u[base + (k + 1) * stride] - u[base + (k - 1) * stride]) * inv2c;
}

/// Runs fn(iy) for iy in [0, n); each index writes disjoint state, so the
/// result is independent of the partition.
void parallel_rows(int n, const std::function<void(int)>& fn) {
    unsigned threads = std::min(std::thread::hardware_concurrency(), 8u);
    if (threads <= 1 || n < 64) {
        for (int iy = 0; iy < n; ++iy) fn(iy);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t)
        pool.emplace_back([&, t] {
            for (int iy = static_cast<int>(t); iy < n; iy += static_cast<int>(threads)) fn(iy);
        });
    for (auto& th : pool) th.join();
}

}  // namespace

Eigen::VectorXd apply_jump(const FemSpace& space, const std::array<JumpQuadrature, 2>& quad,
                           const Eigen::VectorXd& nodal, double tau,
                           const JumpExtensionFn& extension) {
    const int n = space.n_per_side;
    if (nodal.size() != space.num_vertices())
        throw std::invalid_argument("apply_jump: nodal vector length mismatch");

    Eigen::VectorXd out = Eigen::VectorXd::Zero(nodal.size());
    for (int axis = 0; axis < 2; ++axis) {
        const JumpQuadrature& q = quad[axis];
        if (q.empty()) continue;
        const AxisTable tab = make_table(q, space.spacing);
        const int stride = axis == 0 ? 1 : n;

        parallel_rows(n, [&](int iy) {
            for (int ix = 0; ix < n; ++ix) {
                const int id = space.index(ix, iy);
                const int k = axis == 0 ? ix : iy;
                const int base = id - k * stride;
                const double ui = nodal[id];
                const double grad = line_gradient(nodal, base, stride, k, n, space.spacing);

                double acc = 0.0;
                for (const auto& nd : tab.nodes) {
                    const int pos = k + nd.offset;
                    double uval;
                    if (pos >= 0 && pos <= n - 2) {
                        uval = (1.0 - nd.frac) * nodal[base + pos * stride] +
                               nd.frac * nodal[base + (pos + 1) * stride];
                    } else if (pos == n - 1 && nd.frac == 0.0) {
                        uval = nodal[base + pos * stride];
                    } else {
                        Eigen::Vector2d pt = space.vertices[id];
                        pt[axis] += nd.y;
                        uval = extension(tau, pt);
                    }
                    acc += nd.w * uval;
                }
                out[id] += acc - tab.w_sum * ui - tab.we_sum * grad;
            }
        });
    }
    return out;
}

Eigen::VectorXd JumpMatrix::affine(double tau, const JumpExtensionFn& extension) const {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(matrix.rows());
    for (const auto& t : affine_terms) v[t.row] += t.weight * extension(tau, t.point);
    return v;
}

JumpMatrix assemble_jump_matrix(const FemSpace& space, const std::array<JumpQuadrature, 2>& quad) {
    const int n = space.n_per_side;
    const int nv = space.num_vertices();
    JumpMatrix jm;
    std::vector<Eigen::Triplet<double>> trip;

    for (int axis = 0; axis < 2; ++axis) {
        const JumpQuadrature& q = quad[axis];
        if (q.empty()) continue;
        const AxisTable tab = make_table(q, space.spacing);
        const int stride = axis == 0 ? 1 : n;
        const double inv2c = 1.0 / (2.0 * space.spacing);

        for (int iy = 0; iy < n; ++iy) {
            for (int ix = 0; ix < n; ++ix) {
                const int id = space.index(ix, iy);
                const int k = axis == 0 ? ix : iy;
                const int base = id - k * stride;

                for (const auto& nd : tab.nodes) {
                    const int pos = k + nd.offset;
                    if (pos >= 0 && pos <= n - 2) {
                        trip.emplace_back(id, base + pos * stride, nd.w * (1.0 - nd.frac));
                        if (nd.frac != 0.0)
                            trip.emplace_back(id, base + (pos + 1) * stride, nd.w * nd.frac);
                    } else if (pos == n - 1 && nd.frac == 0.0) {
                        trip.emplace_back(id, base + pos * stride, nd.w);
                    } else {
                        Eigen::Vector2d pt = space.vertices[id];
                        pt[axis] += nd.y;
                        jm.affine_terms.push_back({id, nd.w, pt});
                    }
                }
                trip.emplace_back(id, id, -tab.w_sum);
                // -we_sum * du/dx_axis with the same difference stencil.
                if (k == 0) {
                    trip.emplace_back(id, base, 3.0 * tab.we_sum * inv2c);
                    trip.emplace_back(id, base + stride, -4.0 * tab.we_sum * inv2c);
                    trip.emplace_back(id, base + 2 * stride, tab.we_sum * inv2c);
                } else if (k == n - 1) {
                    trip.emplace_back(id, base + k * stride, -3.0 * tab.we_sum * inv2c);
                    trip.emplace_back(id, base + (k - 1) * stride, 4.0 * tab.we_sum * inv2c);
                    trip.emplace_back(id, base + (k - 2) * stride, -tab.we_sum * inv2c);
                } else {
                    trip.emplace_back(id, base + (k + 1) * stride, -tab.we_sum * inv2c);
                    trip.emplace_back(id, base + (k - 1) * stride, tab.we_sum * inv2c);
                }
            }
        }
    }

    jm.matrix.resize(nv, nv);
    jm.matrix.setFromTriplets(trip.begin(), trip.end());
    jm.matrix.makeCompressed();
    return jm;
}

}  // namespace levyfem
