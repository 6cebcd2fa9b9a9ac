#include "hybridcal/quadrature.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <stdexcept>

namespace hybridcal::quadrature {

GaussHermiteRule GaussHermiteRule::make(int n) {
    if (n < 1) throw std::invalid_argument("GaussHermiteRule: need n >= 1");
    constexpr double kSqrtPi = 1.7724538509055160272981674833411;
    GaussHermiteRule rule;
    if (n == 1) {
        rule.nodes = {0.0};
        rule.weights = {kSqrtPi};
        return rule;
    }
    // Jacobi matrix of the (physicists') Hermite recurrence: zero diagonal,
    // off-diagonal beta_k = sqrt(k/2).
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) {
        const double beta = std::sqrt(0.5 * k);
        jacobi(k, k - 1) = beta;
        jacobi(k - 1, k) = beta;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi);
    if (eig.info() != Eigen::Success)
        throw std::runtime_error("GaussHermiteRule: eigen-decomposition failed");
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int j = 0; j < n; ++j) {
        rule.nodes[j] = eig.eigenvalues()(j);
        const double v0 = eig.eigenvectors()(0, j);
        rule.weights[j] = kSqrtPi * v0 * v0;
    }
    return rule;
}

double GaussHermiteRule::weight_sum() const {
    return std::accumulate(weights.begin(), weights.end(), 0.0);
}

const GaussHermiteRule& gauss_hermite(int n) {
    static std::mutex mu;
    static std::map<int, GaussHermiteRule> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, GaussHermiteRule::make(n)).first;
    return it->second;
}

}  // namespace hybridcal::quadrature
