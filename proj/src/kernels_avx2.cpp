// AVX2 variants of the objective inner loops. This translation unit is the
// only one compiled with -mavx2 -mfma; entry happens solely through the
// runtime dispatch in kernels.cpp.

#include "hybridcal/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cmath>

namespace hybridcal::kernels::detail {

namespace {

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

const __m256d kAbsMask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7FFFFFFFFFFFFFFFLL));

}  // namespace

void reciprocal_avx2(const double* x, std::size_t n, double* out) {
    const __m256d one = _mm256_set1_pd(1.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(out + i, _mm256_div_pd(one, _mm256_loadu_pd(x + i)));
    for (; i < n; ++i) out[i] = 1.0 / x[i];
}

double gh_mean_utility_const_var_avx2(const double* t, std::size_t n, double slope,
                                      double intercept, const double* offsets,
                                      const double* wnorm, int m, double target,
                                      double cap) {
    const __m256d vslope = _mm256_set1_pd(slope);
    const __m256d vint = _mm256_set1_pd(intercept);
    const __m256d vtarget = _mm256_set1_pd(target);
    const __m256d vcap = _mm256_set1_pd(cap);
    const __m256d vinvcap = _mm256_set1_pd(1.0 / cap);
    const __m256d one = _mm256_set1_pd(1.0);

    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d mu = _mm256_fmadd_pd(vslope, _mm256_loadu_pd(t + i), vint);
        __m256d inner = _mm256_setzero_pd();
        for (int j = 0; j < m; ++j) {
            const __m256d y = _mm256_add_pd(mu, _mm256_set1_pd(offsets[j]));
            __m256d miss = _mm256_and_pd(_mm256_sub_pd(vtarget, y), kAbsMask);
            miss = _mm256_min_pd(miss, vcap);
            const __m256d u = _mm256_fnmadd_pd(miss, vinvcap, one);
            inner = _mm256_fmadd_pd(_mm256_set1_pd(wnorm[j]), u, inner);
        }
        acc = _mm256_add_pd(acc, inner);
    }
    double total = hsum(acc);
    const double inv_cap = 1.0 / cap;
    for (; i < n; ++i) {
        const double mu = intercept + slope * t[i];
        double inner = 0.0;
        for (int j = 0; j < m; ++j) {
            double miss = std::abs(target - (mu + offsets[j]));
            if (miss > cap) miss = cap;
            inner += wnorm[j] * (1.0 - miss * inv_cap);
        }
        total += inner;
    }
    return total / static_cast<double>(n);
}

double gh_mean_utility_avx2(const double* t, const double* var, std::size_t n,
                            double slope, double intercept, const double* nodes,
                            const double* wnorm, int m, double target, double cap) {
    const __m256d vslope = _mm256_set1_pd(slope);
    const __m256d vint = _mm256_set1_pd(intercept);
    const __m256d vtarget = _mm256_set1_pd(target);
    const __m256d vcap = _mm256_set1_pd(cap);
    const __m256d vinvcap = _mm256_set1_pd(1.0 / cap);
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d two = _mm256_set1_pd(2.0);
    const __m256d zero = _mm256_setzero_pd();

    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d mu = _mm256_fmadd_pd(vslope, _mm256_loadu_pd(t + i), vint);
        const __m256d v = _mm256_max_pd(_mm256_loadu_pd(var + i), zero);
        const __m256d spread = _mm256_sqrt_pd(_mm256_mul_pd(two, v));
        __m256d inner = _mm256_setzero_pd();
        for (int j = 0; j < m; ++j) {
            const __m256d y = _mm256_fmadd_pd(spread, _mm256_set1_pd(nodes[j]), mu);
            __m256d miss = _mm256_and_pd(_mm256_sub_pd(vtarget, y), kAbsMask);
            miss = _mm256_min_pd(miss, vcap);
            const __m256d u = _mm256_fnmadd_pd(miss, vinvcap, one);
            inner = _mm256_fmadd_pd(_mm256_set1_pd(wnorm[j]), u, inner);
        }
        acc = _mm256_add_pd(acc, inner);
    }
    double total = hsum(acc);
    const double inv_cap = 1.0 / cap;
    for (; i < n; ++i) {
        const double mu = intercept + slope * t[i];
        const double v = var[i] > 0.0 ? var[i] : 0.0;
        const double spread = std::sqrt(2.0 * v);
        double inner = 0.0;
        for (int j = 0; j < m; ++j) {
            double miss = std::abs(target - (mu + spread * nodes[j]));
            if (miss > cap) miss = cap;
            inner += wnorm[j] * (1.0 - miss * inv_cap);
        }
        total += inner;
    }
    return total / static_cast<double>(n);
}

}  // namespace hybridcal::kernels::detail

#endif  // x86_64
