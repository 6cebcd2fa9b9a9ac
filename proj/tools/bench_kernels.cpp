// Microbenchmark for the objective inner-loop kernels: scalar reference vs
// the dispatched backend at the production workload shape (4500 posterior
// samples, 7 quadrature nodes per grid node).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <vector>

#include "hybridcal/kernels.hpp"
#include "hybridcal/quadrature.hpp"
#include "hybridcal/rng.hpp"

using namespace hybridcal;

namespace {

double time_per_call(const std::function<double()>& fn, int reps) {
    double sink = 0.0;
    const auto t0 = std::chrono::steady_clock::now();
    for (int r = 0; r < reps; ++r) sink += fn();
    asm volatile("" : : "g"(&sink) : "memory");
    const auto t1 = std::chrono::steady_clock::now();
    (void)sink;
    return std::chrono::duration<double>(t1 - t0).count() / reps;
}

}  // namespace

int main() {
    const std::size_t n = 4500;
    const int reps = 2000;

    rng::Xoshiro256 gen(1);
    std::vector<double> u(n), var(n);
    for (auto& v : u) v = gen.uniform(0.02, 0.035);
    for (auto& v : var) v = gen.uniform(200.0, 1500.0);

    const auto& rule = quadrature::gauss_hermite(7);
    std::vector<double> wnorm(rule.weights.size()), offsets(rule.nodes.size());
    for (std::size_t j = 0; j < wnorm.size(); ++j)
        wnorm[j] = rule.weights[j] / std::sqrt(M_PI);
    for (std::size_t j = 0; j < offsets.size(); ++j)
        offsets[j] = std::sqrt(2.0 * 650.0) * rule.nodes[j];

    const double slope = 3200.0, intercept = 4.0, target = 100.0, cap = 100.0;
    const int m = static_cast<int>(rule.nodes.size());

    std::printf("dispatched backend: %s  (n = %zu samples, %d nodes)\n",
                kernels::backend_name(), n, m);

    const double t_const_scalar = time_per_call(
        [&] {
            return kernels::detail::gh_mean_utility_const_var_scalar(
                u.data(), n, slope, intercept, offsets.data(), wnorm.data(), m, target, cap);
        },
        reps);
    const double t_const = time_per_call(
        [&] {
            return kernels::gh_mean_utility_const_var(u.data(), n, slope, intercept,
                                                      offsets.data(), wnorm.data(), m,
                                                      target, cap);
        },
        reps);
    const double t_vars_scalar = time_per_call(
        [&] {
            return kernels::detail::gh_mean_utility_scalar(u.data(), var.data(), n, slope,
                                                           intercept, rule.nodes.data(),
                                                           wnorm.data(), m, target, cap);
        },
        reps);
    const double t_vars = time_per_call(
        [&] {
            return kernels::gh_mean_utility(u.data(), var.data(), n, slope, intercept,
                                            rule.nodes.data(), wnorm.data(), m, target, cap);
        },
        reps);

    std::printf("const-variance reduction : scalar %7.2f us | dispatched %7.2f us | x%.2f\n",
                1e6 * t_const_scalar, 1e6 * t_const, t_const_scalar / t_const);
    std::printf("per-sample variance      : scalar %7.2f us | dispatched %7.2f us | x%.2f\n",
                1e6 * t_vars_scalar, 1e6 * t_vars, t_vars_scalar / t_vars);
    return 0;
}
