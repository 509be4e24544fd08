#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "nscert/picard.hpp"

using namespace nscert;

TEST_CASE("fixed point report on reference triples") {
    // (||a|| = 0.1, lambda = 0.2, gamma = 0.5)
    FixedPointReport r = picard_fixed_point({0.1, 0.2, 0.5});
    CHECK(r.feasible);
    CHECK(r.r1 == doctest::Approx(0.136675).epsilon(1e-5));
    CHECK(r.r2 == doctest::Approx(1.463325).epsilon(1e-5));
    CHECK(r.converged);

    // pure quadratic with zero data: roots 0 and 1, iteration pinned at 0
    FixedPointReport z = picard_fixed_point({0.0, 0.0, 1.0});
    CHECK(z.feasible);
    CHECK(z.r1 == 0.0);
    CHECK(z.r2 == 1.0);
    for (double s : z.iterates) CHECK(s == 0.0);

    // infeasible: 4 * 0.5 * 0.3 = 0.6 >= 0.25
    FixedPointReport bad = picard_fixed_point({0.3, 0.5, 1.0});
    CHECK_FALSE(bad.feasible);
    CHECK_FALSE(bad.smallness_ok);
}

TEST_CASE("linear case gamma = 0") {
    FixedPointReport r = picard_fixed_point({0.2, 0.5, 0.0});
    CHECK(r.feasible == (4 * 0.5 * 0.2 < 0.25)); // 0.4 >= 0.25: infeasible
    FixedPointReport ok = picard_fixed_point({0.05, 0.2, 0.0});
    CHECK(ok.feasible);
    CHECK(ok.r1 == doctest::Approx(0.05 / 0.8).epsilon(1e-12));
    CHECK(std::isinf(ok.r2));
    CHECK(ok.converged);
}

TEST_CASE("random feasible triples: monotone iterates below r1") {
    std::mt19937_64 rng(2024);
    auto uni = [&](double lo, double hi) {
        return lo + (hi - lo) * (double(rng() >> 11) * 0x1.0p-53);
    };
    int tested = 0;
    while (tested < 10000) {
        FixedPointProblem p;
        p.lambda = uni(0.0, 0.95);
        p.gamma = uni(1e-3, 5.0);
        p.a_norm = uni(0.0, 1.0);
        FixedPointReport r = picard_fixed_point(p);
        if (!r.feasible) continue;
        ++tested;
        CHECK(r.converged);
        CHECK(r.r1 <= r.r2);
        for (std::size_t i = 1; i < r.iterates.size(); ++i) {
            CHECK(r.iterates[i] >= r.iterates[i - 1] - 1e-15);
            CHECK(r.iterates[i] <= r.r1 * (1 + 1e-9) + 1e-300);
        }
    }
}

TEST_CASE("local existence window") {
    CHECK(local_existence_time(2.0, 0.05) == doctest::Approx(0.0125).epsilon(1e-14));
    CHECK(local_existence_time(1.0, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
    // doubling M quarters the window
    CHECK(local_existence_time(2.0, 0.3) == doctest::Approx(local_existence_time(1.0, 0.3) / 4).epsilon(1e-14));
    CHECK(std::isinf(local_existence_time(0.0, 0.05)));
}
