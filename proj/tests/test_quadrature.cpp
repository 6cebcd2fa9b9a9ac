#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hybridcal/quadrature.hpp"

using hybridcal::quadrature::GaussHermiteRule;
using hybridcal::quadrature::gauss_hermite;

namespace {
constexpr double kSqrtPi = 1.7724538509055160272981674833411;
}

TEST_CASE("seven node rule matches the tabulated values") {
    const auto& r = gauss_hermite(7);
    REQUIRE(r.nodes.size() == 7);
    CHECK(std::abs(r.weight_sum() - kSqrtPi) < 1e-12);

    const double nodes[7] = {-2.651961356835233, -1.673551628767471, -0.816287882858965,
                             0.0,                0.816287882858965,  1.673551628767471,
                             2.651961356835233};
    const double weights[7] = {0.000971781245100, 0.054515582819127, 0.425607252610128,
                               0.810264617556807, 0.425607252610128, 0.054515582819127,
                               0.000971781245100};
    for (int j = 0; j < 7; ++j) {
        CHECK(std::abs(r.nodes[j] - nodes[j]) < 1e-12);
        CHECK(std::abs(r.weights[j] - weights[j]) < 1e-12);
    }
}

TEST_CASE("three node closed form") {
    const auto r = GaussHermiteRule::make(3);
    CHECK(std::abs(r.nodes[0] + std::sqrt(1.5)) < 1e-13);
    CHECK(std::abs(r.nodes[1]) < 1e-13);
    CHECK(std::abs(r.nodes[2] - std::sqrt(1.5)) < 1e-13);
    CHECK(std::abs(r.weights[1] - 2.0 * kSqrtPi / 3.0) < 1e-13);
    CHECK(std::abs(r.weights[0] - kSqrtPi / 6.0) < 1e-13);
}

TEST_CASE("weight sums and polynomial exactness across sizes") {
    for (int n = 1; n <= 16; ++n) {
        const auto r = GaussHermiteRule::make(n);
        CHECK(std::abs(r.weight_sum() - kSqrtPi) < 1e-12);
        if (n >= 2) {
            // integral of x^2 exp(-x^2) = sqrt(pi)/2, exact for any rule n >= 2
            double m2 = 0.0;
            for (int j = 0; j < n; ++j) m2 += r.weights[j] * r.nodes[j] * r.nodes[j];
            CHECK(std::abs(m2 - 0.5 * kSqrtPi) < 1e-12);
        }
    }
}
