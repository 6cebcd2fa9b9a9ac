#include "hybridcal/kernels.hpp"

#include <cmath>
#include <cstdlib>
#include <cstring>

namespace hybridcal::kernels {

namespace detail {

void reciprocal_scalar(const double* x, std::size_t n, double* out) {
    for (std::size_t i = 0; i < n; ++i) out[i] = 1.0 / x[i];
}

inline double hinge_utility(double diff, double inv_cap, double cap) {
    double miss = std::abs(diff);
    if (miss > cap) miss = cap;
    return 1.0 - miss * inv_cap;
}

double gh_mean_utility_const_var_scalar(const double* t, std::size_t n, double slope,
                                        double intercept, const double* offsets,
                                        const double* wnorm, int m, double target,
                                        double cap) {
    const double inv_cap = 1.0 / cap;
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double mu = intercept + slope * t[i];
        double inner = 0.0;
        for (int j = 0; j < m; ++j)
            inner += wnorm[j] * hinge_utility(target - (mu + offsets[j]), inv_cap, cap);
        acc += inner;
    }
    return acc / static_cast<double>(n);
}

double gh_mean_utility_scalar(const double* t, const double* var, std::size_t n,
                              double slope, double intercept, const double* nodes,
                              const double* wnorm, int m, double target, double cap) {
    const double inv_cap = 1.0 / cap;
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double mu = intercept + slope * t[i];
        const double v = var[i] > 0.0 ? var[i] : 0.0;
        const double spread = std::sqrt(2.0 * v);
        double inner = 0.0;
        for (int j = 0; j < m; ++j)
            inner += wnorm[j] * hinge_utility(target - (mu + spread * nodes[j]), inv_cap, cap);
        acc += inner;
    }
    return acc / static_cast<double>(n);
}

}  // namespace detail

namespace {

Backend pick_backend() {
    if (const char* env = std::getenv("HYBRIDCAL_SIMD")) {
        if (std::strcmp(env, "scalar") == 0) return Backend::scalar;
#if defined(__x86_64__) || defined(_M_X64)
        if (std::strcmp(env, "avx2") == 0 && __builtin_cpu_supports("avx2"))
            return Backend::avx2;
#endif
        return Backend::scalar;
    }
#if defined(__x86_64__) || defined(_M_X64)
    if (__builtin_cpu_supports("avx2")) return Backend::avx2;
#endif
    return Backend::scalar;
}

}  // namespace

Backend active_backend() {
    static const Backend backend = pick_backend();
    return backend;
}

const char* backend_name() {
    return active_backend() == Backend::avx2 ? "avx2" : "scalar";
}

void reciprocal(const double* x, std::size_t n, double* out) {
#if defined(__x86_64__) || defined(_M_X64)
    if (active_backend() == Backend::avx2) {
        detail::reciprocal_avx2(x, n, out);
        return;
    }
#endif
    detail::reciprocal_scalar(x, n, out);
}

double gh_mean_utility_const_var(const double* t, std::size_t n, double slope,
                                 double intercept, const double* offsets,
                                 const double* wnorm, int m, double target, double cap) {
#if defined(__x86_64__) || defined(_M_X64)
    if (active_backend() == Backend::avx2)
        return detail::gh_mean_utility_const_var_avx2(t, n, slope, intercept, offsets,
                                                      wnorm, m, target, cap);
#endif
    return detail::gh_mean_utility_const_var_scalar(t, n, slope, intercept, offsets, wnorm,
                                                    m, target, cap);
}

double gh_mean_utility(const double* t, const double* var, std::size_t n, double slope,
                       double intercept, const double* nodes, const double* wnorm, int m,
                       double target, double cap) {
#if defined(__x86_64__) || defined(_M_X64)
    if (active_backend() == Backend::avx2)
        return detail::gh_mean_utility_avx2(t, var, n, slope, intercept, nodes, wnorm, m,
                                            target, cap);
#endif
    return detail::gh_mean_utility_scalar(t, var, n, slope, intercept, nodes, wnorm, m,
                                          target, cap);
}

}  // namespace hybridcal::kernels
