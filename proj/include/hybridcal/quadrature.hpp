#pragma once

#include <vector>

namespace hybridcal::quadrature {

/// Gauss-Hermite rule for integrals against exp(-x^2): nodes ascending,
/// weights summing to sqrt(pi). Built by Golub-Welsch (eigen-decomposition of
/// the Jacobi matrix).
struct GaussHermiteRule {
    std::vector<double> nodes;
    std::vector<double> weights;

    static GaussHermiteRule make(int n);
    double weight_sum() const;
};

/// Cached rule lookup for repeated evaluation at a fixed node count.
const GaussHermiteRule& gauss_hermite(int n);

}  // namespace hybridcal::quadrature
