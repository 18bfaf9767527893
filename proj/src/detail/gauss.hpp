#pragma once

#include <utility>
#include <vector>

namespace levyfem::detail {

/// Gauss-Legendre nodes and weights on [-1, 1], Newton iteration on the
/// Legendre recurrence. Deterministic, accurate to ~1e-15 for n <= 64.
std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n);

}  // namespace levyfem::detail
