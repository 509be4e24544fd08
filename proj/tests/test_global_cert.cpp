#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "nscert/global_cert.hpp"
#include "nscert/scenario.hpp"
#include "oracles.hpp"

using namespace nscert;

TEST_CASE("plan_steps budgets") {
    GlobalBudget b = plan_steps(1.0, 1.0, 0.5);
    CHECK(b.K == 5);
    CHECK(b.tau == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(b.theta == doctest::Approx(0.5).epsilon(1e-12));

    GlobalBudget b2 = plan_steps(2.0, 1.0, 0.5);
    CHECK(b2.K == 17);
    CHECK(b2.tau == doctest::Approx(0.0625).epsilon(1e-12));

    GlobalBudget b3 = plan_steps(1.0, 0.0, 0.3);
    CHECK(b3.K == 1);

    // theta is adjusted downward and K M^2 relation holds exactly
    GlobalBudget b4 = plan_steps(1.3, 0.7, 0.23);
    CHECK(b4.theta <= 0.23 * (1 + 1e-9));
    CHECK(double(b4.K - 1) * b4.theta * b4.theta ==
          doctest::Approx(b4.T * b4.M * b4.M).epsilon(1e-12));
}

TEST_CASE("growth step verdicts") {
    GrowthStepResult ok = check_growth_step(0.01, 0.01, 0.4, 1.0);
    CHECK(ok.certified);
    CHECK(ok.bound == doctest::Approx(0.08).epsilon(1e-14));

    GrowthStepResult zero = check_growth_step(0.0, 0.0, 0.4, 5.0);
    CHECK(zero.certified);
    CHECK(zero.bound == 0.0);

    GrowthStepResult bad = check_growth_step(0.05, 0.05, 0.4, 1.0);
    CHECK_FALSE(bad.certified);
    REQUIRE(bad.failed.size() == 1);
    CHECK(bad.failed[0] == "phi0 + alpha < 1/(16 gamma)");

    GrowthStepResult badbeta = check_growth_step(0.01, 0.01, 0.6, 1.0);
    CHECK_FALSE(badbeta.certified);
    CHECK(badbeta.failed[0] == "beta < 1/2");

    // monotonicity: decreasing phi0 or alpha never flips pass -> fail
    for (double phi0 : {0.02, 0.01, 0.0})
        for (double al : {0.02, 0.005}) {
            GrowthStepResult r = check_growth_step(phi0, al, 0.4, 1.0);
            GrowthStepResult r2 = check_growth_step(phi0 / 2, al / 2, 0.4, 1.0);
            if (r.certified) CHECK(r2.certified);
        }
}

TEST_CASE("global induction ledger") {
    // consistent with the criterion arithmetic: pick eps below the threshold
    const double M = 1.0, T = 0.05;
    GlobalBudget b = plan_steps(M, T, 0.1);
    const double mu1 = 4.0 / (b.theta * b.theta);
    CriterionResult crit = evaluate_criterion_global(1e-10, M, T, 0.1, mu1);
    CHECK(crit.pass);

    GrowthLedger led = run_global_induction(b, 1e-10, M, 1.0);
    CHECK(led.pass);
    CHECK(led.failed_conditions.empty());
    CHECK(led.entries.size() == std::size_t(b.K - 1));
    for (const auto& e : led.entries) CHECK(e.pass);
    CHECK(led.conclusion_bound < 2.0 * M);

    // ledger bounds are monotone with exact 4^2 ratio
    for (std::size_t i = 1; i < led.entries.size(); ++i)
        CHECK(led.entries[i].bound == doctest::Approx(16.0 * led.entries[i - 1].bound).epsilon(1e-12));

    // eps = 0: all bounds zero, pass
    GrowthLedger led0 = run_global_induction(b, 0.0, M, 1.0);
    CHECK(led0.pass);
    for (const auto& e : led0.entries) {
        CHECK(e.bound == 0.0);
        CHECK(e.pass);
    }

    // large eps: immediate failure with the offending condition named
    GrowthLedger bad = run_global_induction(b, 1.0, M, 1.0);
    CHECK_FALSE(bad.pass);
    bool named = false;
    for (const auto& c : bad.failed_conditions)
        if (c == "4^{2K} alpha < M" || c == "alpha gamma < 4^{-2K-3}") named = true;
    CHECK(named);
}

TEST_CASE("global criterion evaluation") {
    CriterionResult r = evaluate_criterion_global(1e-4, 2.0, 1.0, 0.1, 1.0);
    CHECK(r.threshold == doctest::Approx(0.05 * std::exp(-4.0)).epsilon(1e-12));
    CHECK(r.threshold == doctest::Approx(9.1578e-4).epsilon(1e-4));
    CHECK(r.pass);

    CriterionResult f = evaluate_criterion_global(1e-2, 2.0, 1.0, 0.1, 1.0);
    CHECK_FALSE(f.pass);

    // boundary: pass at equality
    CriterionResult eq = evaluate_criterion_global(0.1, 1.0, 0.0, 0.1, 1.0);
    CHECK(eq.threshold == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(eq.pass);
}

TEST_CASE("T0 and corollary") {
    CHECK(evaluate_T0(1.0, 1.0) == doctest::Approx(1.0));
    CHECK(evaluate_T0(2.0, 0.5) == doctest::Approx(8.0));
    CHECK(evaluate_T0(0.0, 3.0) == 0.0);

    CorollaryResult c = evaluate_criterion_corollary(1e-5, 1.0, 1.0, 0.1, 1.0);
    CHECK(c.threshold == doctest::Approx(0.1 * std::exp(-1.0)).epsilon(1e-12));
    CHECK(c.threshold == doctest::Approx(0.0367879).epsilon(1e-4));
    CHECK(c.pass);
    CHECK(c.conclusion_bound == doctest::Approx(2.0));

    // zero energy reduces to the small-data case
    CorollaryResult z = evaluate_criterion_corollary(1e-3, 2.0, 0.0, 0.1, 1.0);
    CHECK(z.threshold == doctest::Approx(0.05).epsilon(1e-14));

    // composition identity: corollary = global criterion at T = T0 when
    // mu1 * C = C2 (here C = C2, mu1 = 1)
    const double eps = 3e-4, M = 1.4, l2 = 0.9, C1 = 0.1, C2 = 0.8;
    CorollaryResult a = evaluate_criterion_corollary(eps, M, l2, C1, C2);
    CriterionResult g = evaluate_criterion_global(eps, M, evaluate_T0(l2, C2), C1, 1.0);
    CHECK(a.threshold == doctest::Approx(g.threshold).epsilon(1e-13));
    CHECK(a.pass == g.pass);
}

TEST_CASE("criterion scale invariance is exact for binary lambda") {
    const double eps = 2.7e-4, M = 1.1, T = 0.8, delta1 = 0.1, mu1 = 12.0;
    CriterionResult base = evaluate_criterion_global(eps, M, T, delta1, mu1);
    for (double lam : {0.5, 2.0, 4.0}) {
        CriterionResult s =
            evaluate_criterion_global(eps / lam, lam * M, T / (lam * lam), delta1, mu1);
        CHECK(s.pass == base.pass);
        CHECK(s.ratio == base.ratio); // exact in binary arithmetic
    }
}

TEST_CASE("growth lemma brute force (reduced count)") {
    auto st = oracle::lemma2_search(20000, 91);
    CHECK(st.accepted == 20000);
    CHECK(st.counterexamples == 0);
}

TEST_CASE("twin error measurement basics") {
    Grid g(16, 2 * M_PI);
    SpectralVelocityField u0 = random_band(g, 55, 3, 1.0);
    Trajectory t1 = solve(u0, 0.02, 1e-3, Regularization::none());

    // identical trajectories: zero series
    TwinErrorResult same = measure_twin_error(t1, t1, 1e-3, 1.0, 1.0, 0.01);
    for (double e : same.error_linf) CHECK(e == 0.0);
    CHECK(same.within_envelope);

    // reference on the doubled grid at h/4: restriction aligns the times
    Grid g2(32, 2 * M_PI);
    SpectralVelocityField u0f = random_band(g2, 55, 3, 1.0);
    // not the same data: only checking alignment machinery here
    SolveOptions fine_opt;
    fine_opt.store_every = 4;
    Trajectory t2 = solve(u0f, 0.02, 2.5e-4, Regularization::none(), fine_opt);
    TwinErrorResult r = measure_twin_error(t1, t2, 1e-3, 1.0, 1.0, 0.01);
    CHECK(r.times.size() == t1.state_times.size());

    Trajectory bad = solve(u0, 0.02, 2e-3, Regularization::none());
    CHECK_THROWS_AS(measure_twin_error(t1, bad, 1e-3, 1.0, 1.0, 0.01), std::invalid_argument);
}
