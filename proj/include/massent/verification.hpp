// verification.hpp: self-check suites: mass rescaling, lifetime formula,
// propagator agreement, coefficient oracle and trajectory invariants.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "massent/cell.hpp"
#include "massent/dynamics.hpp"
#include "massent/entanglement.hpp"
#include "massent/experiments.hpp"
#include "massent/random.hpp"

namespace massent {

struct SuiteResult {
    std::string name;
    double maxDeviation{0.0};
    double threshold{0.0};

    bool passed() const noexcept { return maxDeviation < threshold; }
};

struct VerifyOptions {
    std::uint64_t seed{20240601};
    double coefficientPerturbation{0.0};  // test hook: scales the library a1
    std::size_t threads{0};
};

inline double state_distance(const XState& a, const XState& b) {
    return std::max({std::abs(a.popG - b.popG), std::abs(a.popA - b.popA), std::abs(a.popS - b.popS),
                     std::abs(a.popE - b.popE), std::abs(a.cohGE - b.cohGE), std::abs(a.cohAS - b.cohAS)});
}

inline const std::vector<double>& scaling_masses() {
    static const std::vector<double> m{0.3, 0.8, 0.995};
    return m;
}

inline std::vector<XState> scaling_states() { return {XState::excited(), XState::antisymmetric(), XState::bell_ge()}; }

/// Largest rescaling deviation over the mass and state sets on a 20 x 20
/// (omega L, Gamma0 tau) grid.
inline SuiteResult scaling_suite(std::optional<double> tempRatio, std::size_t threads = 0) {
    const Axis seps{0.1, 10.0, 20, AxisScale::Linear};
    const Axis taus{0.0, 10.0, 20, AxisScale::Linear};
    SuiteResult r{tempRatio ? "scaling-thermal" : "scaling-vacuum", 0.0, tempRatio ? 1e-9 : 1e-10};
    const std::vector<std::optional<double>> temps =
        tempRatio ? std::vector<std::optional<double>>{0.05, 0.1, 0.2} : std::vector<std::optional<double>>{std::nullopt};
    for (const auto& t : temps) {
        for (double m : scaling_masses()) {
            for (const XState& x : scaling_states()) {
                r.maxDeviation = std::max(r.maxDeviation, scaling_check(m, x, t, seps, taus, threads).max());
            }
        }
    }
    return r;
}

/// Death time of a lambda = 0 diagonal state, by bisection on the closed-form K1.
inline double death_time_by_bisection(double e, double g, double a, double s, double grayFactor = 1.0) {
    const XState x0 = XState::diagonal(e, g, a, s);
    auto k1 = [&](double tau) { return closed_form_K(x0, 0.0, std::exp(-grayFactor * tau)).k1; };
    double lo = 0.0, hi = 1e-3;
    while (k1(hi) > 0.0) {
        lo = hi;
        hi *= 2.0;
    }
    for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (k1(mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

/// Relative gap between the lifetime formula and bisection on 1000 random
/// sudden-death states, plus the 1/Omega delay at Omega = 0.5.
inline SuiteResult lifetime_suite(std::uint64_t seed, std::size_t count = 1000) {
    SuiteResult r{"lifetime", 0.0, 1e-8};
    StateSampler rng(seed);
    std::size_t checked = 0;
    while (checked < count) {
        const auto w = rng.simplex();
        if (!sudden_death_condition(w[0], w[1], w[2], w[3])) continue;
        ++checked;
        const double formula = lifetime(w[0], w[1], w[2], w[3], 1.0, 1.0);
        const double root = death_time_by_bisection(w[0], w[1], w[2], w[3]);
        r.maxDeviation = std::max(r.maxDeviation, std::abs(formula - root) / root);
        const double slowed = lifetime(w[0], w[1], w[2], w[3], 0.5, 1.0);
        r.maxDeviation = std::max(r.maxDeviation, std::abs(slowed - 2.0 * formula) / formula);
    }
    return r;
}

inline constexpr double kOracleOdeTolerance = 1e-12;

/// Closed form vs eigen vs ODE (vacuum) or eigen vs ODE (thermal) on random
/// configurations, initial states and times.
inline SuiteResult method_agreement_suite(bool thermal, std::uint64_t seed, std::size_t count = 100) {
    SuiteResult r{thermal ? "method-agreement-thermal" : "method-agreement-vacuum", 0.0, 1e-8};
    StateSampler rng(seed);
    for (std::size_t i = 0; i < count; ++i) {
        const double m = rng.uniform(0.0, 0.99);
        const double sep = rng.uniform(0.05, 10.0);
        std::optional<double> temp;
        if (thermal) temp = rng.uniform(0.05, 2.0);
        const XState x0 = rng.mixed();
        const auto cell = CellEvolution::dimensionless(m, sep, temp, x0);
        const double tau = rng.uniform(0.05, 10.0) / cell.gray_factor_value();
        const RateMatrix rates = build_rate_matrix(cell.coefficients_value());
        const XState eig = propagate_eigen(x0, rates, tau);
        const double at[] = {tau};
        const XState ode = integrate_ode(x0, rates, at, kOracleOdeTolerance).samples.back().state;
        r.maxDeviation = std::max(r.maxDeviation, state_distance(eig, ode));
        if (!thermal) {
            const XState cf = closed_form_state(x0, cell.lambda(), xi(tau, cell.gray_factor_value(), 1.0));
            r.maxDeviation = std::max({r.maxDeviation, state_distance(cf, eig), state_distance(cf, ode)});
        }
    }
    return r;
}

/// Spectral-density route vs library coefficients on a mass x separation
/// grid, in the vacuum and at omega beta in {0.5, 2, 10}; includes the KMS ratio.
inline SuiteResult coefficient_suite(double perturbation = 0.0) {
    SuiteResult r{"coefficient-oracle", 0.0, 1e-12};
    const std::vector<std::optional<double>> temps{std::nullopt, 2.0, 0.5, 0.1};
    for (const auto& t : temps) {
        for (double m : {0.0, 0.3, 0.6, 0.9, 0.995}) {
            for (double sep : {0.1, 1.0, 5.0, 20.0}) {
                const auto rep = verify_coefficients(FieldBathConfig::dimensionless(m, sep, t), perturbation);
                r.maxDeviation = std::max({r.maxDeviation, rep.maxRelativeDeviation, rep.kmsDeviation});
            }
        }
    }
    return r;
}

/// Suites run by the verify command, in report order.
inline std::vector<SuiteResult> run_verification(const VerifyOptions& opt = {}) {
    return {scaling_suite(std::nullopt, opt.threads),
            scaling_suite(0.1, opt.threads),
            lifetime_suite(opt.seed),
            method_agreement_suite(false, opt.seed + 1),
            method_agreement_suite(true, opt.seed + 2),
            coefficient_suite(opt.coefficientPerturbation)};
}

struct InvariantReport {
    double traceDeviation{0.0};
    double positivityViolation{0.0};  // most negative block eigenvalue, as a positive number
    double xFormLeak{0.0};            // off-X magnitude after a product-basis round trip
    double semigroupDeviation{0.0};
    std::size_t trajectories{0};
};

namespace detail {

// Smallest eigenvalue over the two 2x2 blocks {G,E} and {A,S}.
inline double min_block_eigenvalue(const XState& x) {
    auto lo = [](double p, double q, double c) {
        const double mean = 0.5 * (p + q), half = 0.5 * (p - q);
        return mean - std::sqrt(half * half + c * c);
    };
    return std::min({lo(x.popG, x.popE, std::abs(x.cohGE)), lo(x.popA, x.popS, std::abs(x.cohAS)), x.popG,
                     x.popE, x.popA, x.popS});
}

}  // namespace detail

/// Random trajectories through every propagation route, checked for trace,
/// block positivity, X-form and the semigroup property.
inline InvariantReport invariant_suite(std::uint64_t seed, std::size_t count = 1000, double tauEnd = 50.0) {
    InvariantReport rep;
    StateSampler rng(seed);
    const auto taus = uniform_times(tauEnd, 25);
    for (std::size_t i = 0; i < count; ++i) {
        const double m = i % 10 == 9 ? rng.uniform(1.0, 1.5) : rng.uniform(0.0, 0.999);
        const double sep = i % 7 == 3 ? rng.uniform(0.0, 1e-3) : rng.uniform(0.0, 12.0);
        const std::optional<double> temp = i % 2 ? std::optional<double>{rng.uniform(0.02, 3.0)} : std::nullopt;
        const XState x0 = i % 3 == 0 ? rng.pure() : rng.mixed();
        const auto cell = CellEvolution::dimensionless(m, sep, temp, x0);
        for (double t : taus) {
            const XState x = cell.state_at(t);
            rep.traceDeviation = std::max(rep.traceDeviation, std::abs(x.trace() - 1.0));
            rep.positivityViolation = std::max(rep.positivityViolation, -detail::min_block_eigenvalue(x));
            const Matrix4c rho = to_product_basis(x);
            double leak = 0.0;
            for (int p = 0; p < 4; ++p) {
                for (int q = 0; q < 4; ++q) {
                    if (p != q && p + q != 3) leak = std::max(leak, std::abs(rho(p, q)));
                }
            }
            rep.xFormLeak = std::max(rep.xFormLeak, leak);
        }
        const double t1 = rng.uniform(0.0, 5.0), t2 = rng.uniform(0.0, 5.0);
        const XState direct = cell.state_at(t1 + t2);
        const XState mid = cell.state_at(t1);
        const CellEvolution restart(cell.config(), mid);
        rep.semigroupDeviation = std::max(rep.semigroupDeviation, state_distance(direct, restart.state_at(t2)));
        ++rep.trajectories;
    }
    return rep;
}

}  // namespace massent
