#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace hybridcal {

struct NelderMeadOptions {
    int max_iters = 2000;
    double simplex_tol = 1e-8;  // max vertex distance to the best vertex
    double init_step = 0.5;
};

struct NelderMeadResult {
    std::vector<double> x;
    double value;
    int iters;
};

/// Downhill simplex minimizer (reflection 1, expansion 2, contraction 0.5,
/// shrink 0.5). The objective may return +inf/NaN for infeasible points; such
/// values are treated as worst.
inline NelderMeadResult nelder_mead(
    const std::function<double(const std::vector<double>&)>& f,
    const std::vector<double>& start, const NelderMeadOptions& opt = {}) {
    const std::size_t d = start.size();
    auto safe = [&](const std::vector<double>& x) {
        const double v = f(x);
        return std::isfinite(v) ? v : 1e300;
    };

    std::vector<std::vector<double>> pts(d + 1, start);
    std::vector<double> vals(d + 1);
    for (std::size_t i = 0; i < d; ++i) pts[i + 1][i] += opt.init_step;
    for (std::size_t i = 0; i <= d; ++i) vals[i] = safe(pts[i]);

    std::vector<std::size_t> order(d + 1);
    int iter = 0;
    for (; iter < opt.max_iters; ++iter) {
        for (std::size_t i = 0; i <= d; ++i) order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
        const std::size_t best = order[0], worst = order[d], second = order[d - 1];

        double diameter = 0.0;
        for (std::size_t i = 0; i <= d; ++i)
            for (std::size_t k = 0; k < d; ++k)
                diameter = std::max(diameter, std::abs(pts[i][k] - pts[best][k]));
        if (diameter < opt.simplex_tol) break;

        std::vector<double> centroid(d, 0.0);
        for (std::size_t i = 0; i <= d; ++i) {
            if (i == worst) continue;
            for (std::size_t k = 0; k < d; ++k) centroid[k] += pts[i][k];
        }
        for (auto& c : centroid) c /= static_cast<double>(d);

        auto blend = [&](double coef) {
            std::vector<double> x(d);
            for (std::size_t k = 0; k < d; ++k)
                x[k] = centroid[k] + coef * (pts[worst][k] - centroid[k]);
            return x;
        };

        const auto reflected = blend(-1.0);
        const double fr = safe(reflected);
        if (fr < vals[best]) {
            const auto expanded = blend(-2.0);
            const double fe = safe(expanded);
            if (fe < fr) {
                pts[worst] = expanded;
                vals[worst] = fe;
            } else {
                pts[worst] = reflected;
                vals[worst] = fr;
            }
            continue;
        }
        if (fr < vals[second]) {
            pts[worst] = reflected;
            vals[worst] = fr;
            continue;
        }
        const auto contracted = blend(fr < vals[worst] ? -0.5 : 0.5);
        const double fc = safe(contracted);
        if (fc < std::min(fr, vals[worst])) {
            pts[worst] = contracted;
            vals[worst] = fc;
            continue;
        }
        for (std::size_t i = 0; i <= d; ++i) {  // shrink toward the best vertex
            if (i == best) continue;
            for (std::size_t k = 0; k < d; ++k)
                pts[i][k] = pts[best][k] + 0.5 * (pts[i][k] - pts[best][k]);
            vals[i] = safe(pts[i]);
        }
    }

    std::size_t best = 0;
    for (std::size_t i = 1; i <= d; ++i)
        if (vals[i] < vals[best]) best = i;
    return {pts[best], vals[best], iter};
}

}  // namespace hybridcal
