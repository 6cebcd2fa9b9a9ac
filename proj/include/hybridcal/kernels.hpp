#pragma once

#include <cstddef>

namespace hybridcal::kernels {

// Inner loops of the stochastic-program objective: at every grid node the
// expected utility is an average over thousands of posterior samples, each
// expanded through a small Gauss-Hermite rule. The loops are pure
// data-parallel arithmetic, so each kernel has a scalar reference
// implementation and an AVX2 variant selected at runtime. Scalar and SIMD
// paths are equivalence-tested against each other.

enum class Backend { scalar, avx2 };

/// Backend chosen once per process: AVX2 when the CPU supports it, unless
/// HYBRIDCAL_SIMD=scalar forces the reference path.
Backend active_backend();
const char* backend_name();

/// out[i] = 1 / x[i]
void reciprocal(const double* x, std::size_t n, double* out);

/// Mean over samples of the Gauss-Hermite expected utility with a constant
/// predictive variance:
///   mu_i   = intercept + slope * t[i]
///   result = (1/n) sum_i sum_j wnorm[j] * u(target - (mu_i + offsets[j]))
/// where u(d) = 1 - min(|d|, cap)/cap and offsets[j] = sqrt(2 var) * node_j
/// are precomputed by the caller.
double gh_mean_utility_const_var(const double* t, std::size_t n, double slope,
                                 double intercept, const double* offsets,
                                 const double* wnorm, int m, double target, double cap);

/// Same reduction with a per-sample variance array:
///   y_ij = mu_i + sqrt(2 * max(var[i], 0)) * nodes[j]
double gh_mean_utility(const double* t, const double* var, std::size_t n, double slope,
                       double intercept, const double* nodes, const double* wnorm, int m,
                       double target, double cap);

namespace detail {
// Reference implementations, exposed for equivalence tests.
void reciprocal_scalar(const double* x, std::size_t n, double* out);
double gh_mean_utility_const_var_scalar(const double* t, std::size_t n, double slope,
                                        double intercept, const double* offsets,
                                        const double* wnorm, int m, double target,
                                        double cap);
double gh_mean_utility_scalar(const double* t, const double* var, std::size_t n,
                              double slope, double intercept, const double* nodes,
                              const double* wnorm, int m, double target, double cap);

#if defined(__x86_64__) || defined(_M_X64)
void reciprocal_avx2(const double* x, std::size_t n, double* out);
double gh_mean_utility_const_var_avx2(const double* t, std::size_t n, double slope,
                                      double intercept, const double* offsets,
                                      const double* wnorm, int m, double target,
                                      double cap);
double gh_mean_utility_avx2(const double* t, const double* var, std::size_t n,
                            double slope, double intercept, const double* nodes,
                            const double* wnorm, int m, double target, double cap);
#endif
}  // namespace detail

}  // namespace hybridcal::kernels
