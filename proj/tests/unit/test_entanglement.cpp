#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "massent/cell.hpp"
#include "massent/entanglement.hpp"
#include "massent/random.hpp"
#include "support/oracles.hpp"

namespace massent {
namespace {

TEST(Concurrence, NamedStates) {
    EXPECT_EQ(concurrence(XState::excited()), 0.0);
    const auto a = concurrence_terms(XState::antisymmetric());
    EXPECT_DOUBLE_EQ(a.k1, 1.0);
    EXPECT_DOUBLE_EQ(a.value(), 1.0);
    const auto bell = concurrence_terms(XState::bell_ge());
    EXPECT_DOUBLE_EQ(bell.k2, 1.0);
    EXPECT_DOUBLE_EQ(bell.value(), 1.0);
}

TEST(Concurrence, SeparableMixture) {
    const auto t = concurrence_terms(XState{0.5, 0.0, 0.0, 0.5, {}, {}});
    EXPECT_DOUBLE_EQ(t.k1, -1.0);
    EXPECT_EQ(t.value(), 0.0);
}

TEST(Negativity, NamedStates) {
    EXPECT_DOUBLE_EQ(negativity(XState::antisymmetric()), 1.0);
    EXPECT_DOUBLE_EQ(negativity(XState::bell_ge()), 1.0);
    EXPECT_EQ(negativity(XState::excited()), 0.0);
}

TEST(Measures, RejectInvalidStates) {
    XState bad = XState::bell_ge();
    bad.cohGE = {0.7, 0.0};
    EXPECT_THROW(concurrence(bad), Error);
    EXPECT_THROW(negativity(bad), Error);
}

TEST(Measures, MatchWoottersAndPartialTransposeOracles) {
    StateSampler rng(2024);
    double worstC = 0.0, worstN = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const XState x = i % 4 == 0 ? rng.pure() : rng.mixed();
        const auto rho = oracle::product_matrix(x);
        const EntanglementValue v = entanglement(x);
        worstC = std::max(worstC, std::abs(v.concurrence - oracle::wootters_concurrence(rho)));
        worstN = std::max(worstN, std::abs(v.negativity - oracle::pt_negativity(rho)));
        ASSERT_GE(v.concurrence, 0.0);
        ASSERT_LE(v.concurrence, 1.0);
        ASSERT_GE(v.negativity, 0.0);
        ASSERT_LE(v.negativity, 1.0);
    }
    EXPECT_LT(worstC, 1e-10);
    EXPECT_LT(worstN, 1e-10);
}

TEST(Measures, PureStatesHaveEqualConcurrenceAndNegativity) {
    StateSampler rng(77);
    for (int i = 0; i < 10000; ++i) {
        const XState x = rng.pure();
        const auto v = entanglement(x);
        ASSERT_LT(std::abs(v.concurrence - v.negativity), 1e-12);
    }
}

TEST(ClosedFormK, IdentityAtXiOne) {
    StateSampler rng(4);
    for (int i = 0; i < 200; ++i) {
        const XState x = rng.mixed_without_as();
        const auto direct = concurrence_terms(x);
        const auto cf = closed_form_K(x, rng.uniform(-0.2, 0.95), 1.0);
        EXPECT_NEAR(cf.k1, direct.k1, 1e-12);
        EXPECT_NEAR(cf.k2, direct.k2, 1e-12);
    }
}

TEST(ClosedFormK, ExcitedStateNeverEntangledInIndependentBaths) {
    for (double x : {0.99, 0.7, 0.5, 0.2, 1e-4}) {
        const auto k = closed_form_K(XState::excited(), 0.0, x);
        EXPECT_NEAR(k.k1, -2.0 * x * (1.0 - x), 4e-15);
        EXPECT_NEAR(k.k2, x * (2.0 * x - 2.0), 4e-15);
        EXPECT_EQ(k.value(), 0.0);
    }
}

TEST(ClosedFormK, SimplifiedIndependentBathForm) {
    // Reduced expressions at lambda = 0 for an arbitrary initial (e, g, a, s, rho_GE).
    StateSampler rng(40);
    for (int i = 0; i < 1000; ++i) {
        const XState x0 = rng.mixed_without_as();
        const double x = rng.uniform(1e-3, 1.0);
        const double e = x0.popE, g = x0.popG, a = x0.popA, s = x0.popS, c = std::abs(x0.cohGE);
        const double k1 = x * std::abs(a - s) - 2 * x * std::sqrt(std::max(0.0, x * x * e * e - x * (1 + e - g) * e + e));
        const double k2 = x * (2 * c + (2 * x - 1) * e - 1 + g);
        const double inner = 1 - x - x * (e - g);
        const double n1 = x * x * e + 0.5 * (1 - x) - 0.5 * x * (e - g) -
                          0.5 * std::sqrt(x * x * (a - s) * (a - s) + inner * inner);
        const double n2 = 0.5 * x * (1 - g - (2 * x - 1) * e - 2 * c);
        const auto K = closed_form_K(x0, 0.0, x);
        const auto N = closed_form_N(x0, 0.0, x);
        EXPECT_NEAR(K.k1, k1, 1e-13);
        EXPECT_NEAR(K.k2, k2, 1e-13);
        EXPECT_NEAR(N.n1, n1, 1e-13);
        EXPECT_NEAR(N.n2, n2, 1e-13);
    }
}

TEST(ClosedFormKN, MatchComposedPipeline) {
    StateSampler rng(99);
    double worst = 0.0;
    for (int i = 0; i < 5000; ++i) {
        const XState x0 = rng.mixed_without_as();
        const double lambda = i % 2 == 0 ? 0.5 : rng.uniform(-0.2173, 0.99);
        const double x = rng.uniform(1e-4, 1.0);
        const XState st = closed_form_state(x0, lambda, x);
        const auto K = closed_form_K(x0, lambda, x);
        const auto N = closed_form_N(x0, lambda, x);
        const auto Kd = concurrence_terms(st);
        const auto Nd = negativity_terms(st);
        worst = std::max({worst, std::abs(K.k1 - Kd.k1), std::abs(K.k2 - Kd.k2), std::abs(N.n1 - Nd.n1),
                          std::abs(N.n2 - Nd.n2)});
    }
    EXPECT_LT(worst, 1e-12);
}

TEST(ClosedFormN, PureInitialStatesAgreeWithConcurrence) {
    StateSampler rng(5);
    for (int i = 0; i < 1000; ++i) {
        XState x0 = rng.pure();
        x0.cohAS = {};  // restrict to the GE block plus diagonal A/S states
        if (!x0.is_valid()) continue;
        const auto N = closed_form_N(x0, 0.3, 1.0);
        EXPECT_NEAR(N.value(), concurrence(x0), 1e-12);
    }
}

TEST(ClosedFormKN, PreconditionErrors) {
    XState withAS = XState::symmetric();
    withAS.popA = 0.5;
    withAS.popS = 0.5;
    withAS.cohAS = {0.1, 0.0};
    try {
        closed_form_K(withAS, 0.0, 0.5);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::AssumptionViolated);
    }
    try {
        closed_form_N(XState::excited(), 1.0, 0.5);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::LambdaSingular);
    }
}

TEST(SuddenDeath, Condition) {
    EXPECT_TRUE(sudden_death_condition(0.5, 0.0, 0.5, 0.0));
    EXPECT_FALSE(sudden_death_condition(0.0, 0.0, 1.0, 0.0));
    EXPECT_FALSE(sudden_death_condition(1.0, 0.0, 0.0, 0.0));
    EXPECT_THROW(sudden_death_condition(0.5, 0.5, 0.5, 0.0), Error);
}

// Death time from bisection on the closed-form K1 (K2 < 0 for diagonal states).
double death_time_by_bisection(double e, double g, double a, double s) {
    const XState x0 = XState::diagonal(e, g, a, s);
    auto k1 = [&](double tau) { return closed_form_K(x0, 0.0, std::exp(-tau)).k1; };
    double hi = 1e-3;
    while (k1(hi) > 0.0) hi *= 2.0;
    return oracle::bisect(k1, 0.0, hi);
}

TEST(Lifetime, ReferenceState) {
    const double formula = lifetime(0.5, 0.0, 0.5, 0.0, 1.0, 1.0);
    EXPECT_NEAR(formula, 0.23206672, 1e-8);
    EXPECT_NEAR(formula, death_time_by_bisection(0.5, 0.0, 0.5, 0.0), 1e-10);
    EXPECT_EQ(lifetime(0.5, 0.0, 0.5, 0.0, 0.5, 1.0), 2.0 * formula);
}

TEST(Lifetime, MatchesBisectionOnRandomStates) {
    StateSampler rng(123);
    int checked = 0;
    while (checked < 1000) {
        const auto w = rng.simplex();
        const double e = w[0], g = w[1], a = w[2], s = w[3];
        if (!sudden_death_condition(e, g, a, s)) continue;
        ++checked;
        const double formula = lifetime(e, g, a, s, 1.0, 1.0);
        ASSERT_NEAR(formula, death_time_by_bisection(e, g, a, s), 1e-8 * formula);
    }
}

TEST(Lifetime, SpecialCases) {
    EXPECT_EQ(lifetime(0.0, 0.0, 1.0, 0.0, 1.0, 1.0), std::numeric_limits<double>::infinity());
    EXPECT_EQ(lifetime(1.0, 0.0, 0.0, 0.0, 1.0, 1.0), 0.0);
    try {
        lifetime(0.5, 0.0, 0.5, 0.0, 0.0, 1.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::FrozenDynamics);
    }
}

TEST(SuddenDeath, CompletenessOverRandomDiagonalStates) {
    // A finite death time exists iff the condition holds. The closed-form K1
    // is sampled densely in xi, which covers every tau in (0, inf).
    StateSampler rng(8);
    for (int i = 0; i < 10000; ++i) {
        const auto w = rng.simplex();
        const XState x0 = XState::diagonal(w[0], w[1], w[2], w[3]);
        bool dies = false;
        const bool entangledAtStart = concurrence(x0) > 0.0;
        for (int k = 1; k <= 400 && entangledAtStart; ++k) {
            const double x = 1.0 - k / 400.0 + 1e-9;
            if (closed_form_K(x0, 0.0, x).value() == 0.0) {
                dies = true;
                break;
            }
        }
        const bool cond = sudden_death_condition(w[0], w[1], w[2], w[3]);
        // Near the boundary (a-s)^2 = 4e the death time diverges beyond the sampled range.
        const double d2 = (w[2] - w[3]) * (w[2] - w[3]);
        if (std::abs(d2 - 4 * w[0]) < 1e-3 || std::abs(d2 - 4 * w[0] * w[1]) < 1e-3) continue;
        ASSERT_EQ(dies, cond) << w[0] << " " << w[1] << " " << w[2] << " " << w[3];
    }
}

TEST(DetectEvents, FrozenDynamicsHasNoEvents) {
    const auto cell = CellEvolution::dimensionless(1.2, 1.0, std::nullopt, XState::bell_ge());
    const auto taus = uniform_times(50.0, 100);
    const auto ev = detect_events(cell.trajectory(taus), Measure::Concurrence, 0.0,
                                  [&](double t) { return cell.state_at(t); });
    EXPECT_TRUE(ev.birthTimes.empty());
    EXPECT_TRUE(ev.deathTimes.empty());
    EXPECT_EQ(ev.finalValue, 1.0);
}

TEST(DetectEvents, SingleDeathMatchesLifetime) {
    const auto cell = CellEvolution::dimensionless(0.0, 1e9, std::nullopt, XState::diagonal(0.5, 0.0, 0.5, 0.0));
    ASSERT_EQ(cell.method(), Method::ClosedForm);
    const auto taus = uniform_times(3.0, 300);
    for (Measure m : {Measure::Concurrence, Measure::Negativity}) {
        const auto ev = detect_events(cell.trajectory(taus), m, 0.0, [&](double t) { return cell.state_at(t); });
        EXPECT_TRUE(ev.birthTimes.empty());
        ASSERT_EQ(ev.deathTimes.size(), 1u);
        EXPECT_NEAR(ev.deathTimes[0], lifetime(0.5, 0.0, 0.5, 0.0, 1.0, 1.0), 1e-6);
    }
}

TEST(DetectEvents, GenerationAtSubWavelengthSeparation) {
    const auto cell = CellEvolution::dimensionless(0.0, 0.5, std::nullopt, XState::excited());
    const auto taus = uniform_times(20.0, 400);
    const auto ev = detect_events(cell.trajectory(taus), Measure::Concurrence, 0.0,
                                  [&](double t) { return cell.state_at(t); });
    ASSERT_GE(ev.birthTimes.size(), 1u);
    // Interpolated variant brackets the same birth.
    const auto approx = detect_events(cell.trajectory(taus), Measure::Concurrence);
    ASSERT_GE(approx.birthTimes.size(), 1u);
    EXPECT_NEAR(approx.birthTimes[0], ev.birthTimes[0], 0.05);
}

TEST(DetectEvents, ThresholdCrossingsAlternate) {
    const auto cell = CellEvolution::dimensionless(0.0, 0.5, 0.05, XState::excited());
    const auto taus = uniform_times(40.0, 800);
    const auto ev = detect_events(cell.trajectory(taus), Measure::Concurrence, kConcurrenceCutoff,
                                  [&](double t) { return cell.state_at(t); });
    // Starts separable, so crossings go birth, death, birth, ...
    ASSERT_GE(ev.birthTimes.size(), 1u);
    ASSERT_LE(ev.deathTimes.size(), ev.birthTimes.size());
    ASSERT_GE(ev.deathTimes.size() + 1, ev.birthTimes.size());
    for (std::size_t i = 0; i < ev.deathTimes.size(); ++i) {
        EXPECT_LT(ev.birthTimes[i], ev.deathTimes[i]);
        if (i + 1 < ev.birthTimes.size()) {
            EXPECT_LT(ev.deathTimes[i], ev.birthTimes[i + 1]);
        }
    }
}

}  // namespace
}  // namespace massent
