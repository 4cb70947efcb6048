// entanglement.hpp: concurrence and negativity of X states, their vacuum
// closed forms, entanglement sudden death and event detection.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <utility>
#include <vector>

#include "massent/dynamics.hpp"
#include "massent/errors.hpp"
#include "massent/xstate.hpp"

namespace massent {

// Contour cutoffs below which figure data is treated as "no entanglement".
inline constexpr double kConcurrenceCutoff = 1e-3;
inline constexpr double kNegativityCutoff = 1e-5;

enum class Measure { Concurrence, Negativity };

struct ConcurrenceTerms {
    double k1{0.0};
    double k2{0.0};
    double value() const noexcept { return std::max({0.0, k1, k2}); }
};

struct NegativityTerms {
    double n1{0.0};
    double n2{0.0};
    double value() const noexcept { return std::max(0.0, -2.0 * n1) + std::max(0.0, -2.0 * n2); }
};

struct EntanglementValue {
    double concurrence{0.0};
    double negativity{0.0};
    double k1{0.0};
    double k2{0.0};
    double n1{0.0};
    double n2{0.0};

    double get(Measure m) const noexcept {
        return m == Measure::Concurrence ? concurrence : negativity;
    }
};

namespace detail {

inline constexpr double kRadicandClip = 1e-12;

inline double guarded_sqrt(double radicand) {
    if (radicand >= 0.0) return std::sqrt(radicand);
    if (radicand >= -kRadicandClip) return 0.0;
    throw Error(ErrorCode::NotAState, "negative radicand in entanglement measure");
}

}  // namespace detail

// rho_SA = conj(rho_AS), so (rho_AS - rho_SA)^2 = -4 Im^2 and
// (rho_AS + rho_SA)^2 = 4 Re^2.
inline ConcurrenceTerms concurrence_terms(const XState& x) {
    x.validate();
    const double im = x.cohAS.imag();
    const double re = x.cohAS.real();
    const double diff = x.popA - x.popS;
    const double sum = x.popA + x.popS;
    ConcurrenceTerms t;
    t.k1 = detail::guarded_sqrt(diff * diff + 4.0 * im * im) -
           2.0 * detail::guarded_sqrt(x.popG * x.popE);
    t.k2 = 2.0 * std::abs(x.cohGE) - detail::guarded_sqrt(sum * sum - 4.0 * re * re);
    return t;
}

inline NegativityTerms negativity_terms(const XState& x) {
    x.validate();
    const double im = x.cohAS.imag();
    const double re = x.cohAS.real();
    const double diff = x.popA - x.popS;
    const double ge = x.popG - x.popE;
    NegativityTerms t;
    t.n1 = 0.5 * (x.popG + x.popE - detail::guarded_sqrt(diff * diff + 4.0 * im * im + ge * ge));
    t.n2 = 0.5 * (x.popA + x.popS - detail::guarded_sqrt(4.0 * std::norm(x.cohGE) + 4.0 * re * re));
    return t;
}

inline double concurrence(const XState& x) { return concurrence_terms(x).value(); }
inline double negativity(const XState& x) { return negativity_terms(x).value(); }

inline EntanglementValue entanglement(const XState& x) {
    const ConcurrenceTerms c = concurrence_terms(x);
    const NegativityTerms n = negativity_terms(x);
    return {c.value(), n.value(), c.k1, c.k2, n.n1, n.n2};
}

namespace detail {

// Pieces shared by the vacuum closed forms of K and N.
struct VacuumClosedFormParts {
    double x;     // xi
    double e;     // rho_E(0)
    double ge;    // |rho_GE(0)|
    double g;     // f_A(-lambda) - f_S(lambda)
    double h;     // f_A(-lambda) + f_S(lambda)
    double inv;   // 1 / (1 - lambda^2)
    double l;     // lambda
};

inline VacuumClosedFormParts closed_form_parts(const XState& initial, double lambda, double xiVal) {
    require_closed_form_domain(lambda, xiVal);
    if (initial.cohAS != cplx{0.0, 0.0}) {
        throw Error(ErrorCode::AssumptionViolated, "closed-form K/N require rho_AS(0) = 0");
    }
    initial.validate();
    const double e = initial.popE;
    const double fA = ((1.0 - lambda) / (1.0 + lambda) * e + initial.popA) * std::pow(xiVal, -lambda);
    const double fS = ((1.0 + lambda) / (1.0 - lambda) * e + initial.popS) * std::pow(xiVal, lambda);
    return {xiVal, e, std::abs(initial.cohGE), fA - fS, fA + fS, 1.0 / (1.0 - lambda * lambda), lambda};
}

}  // namespace detail

/// K1, K2 at the time encoded by xiVal, straight from the initial state.
inline ConcurrenceTerms closed_form_K(const XState& initial, double lambda, double xiVal) {
    const auto p = detail::closed_form_parts(initial, lambda, xiVal);
    const double l2 = p.l * p.l;
    ConcurrenceTerms t;
    t.k1 = p.x * std::abs(p.x * 4.0 * p.l * p.inv * p.e + p.g) -
           2.0 * p.x * detail::guarded_sqrt(p.x * p.x * (1.0 + 3.0 * l2) * p.inv * p.e * p.e +
                                            (1.0 - p.x * p.h) * p.e);
    t.k2 = p.x * (2.0 * p.ge + 2.0 * p.x * (1.0 + l2) * p.inv * p.e - p.h);
    return t;
}

inline NegativityTerms closed_form_N(const XState& initial, double lambda, double xiVal) {
    const auto p = detail::closed_form_parts(initial, lambda, xiVal);
    const double l2 = p.l * p.l;
    const double u = p.x * p.x * 4.0 * p.l * p.inv * p.e + p.x * p.g;
    const double v = p.x * p.x * 4.0 * l2 * p.inv * p.e + 1.0 - p.x * p.h;
    NegativityTerms t;
    t.n1 = p.x * p.x * (1.0 + l2) * p.inv * p.e + 0.5 * (1.0 - p.x * p.h) -
           0.5 * std::sqrt(u * u + v * v);
    t.n2 = 0.5 * p.x * (p.h - 2.0 * p.x * (1.0 + l2) * p.inv * p.e - 2.0 * p.ge);
    return t;
}

namespace detail {

inline void require_diagonal_weights(double e, double g, double a, double s) {
    for (double w : {e, g, a, s}) {
        require_finite(w, "population");
        require(w >= 0.0, ErrorCode::InvalidArgument, "populations must be >= 0");
    }
    require(std::abs(e + g + a + s - 1.0) <= kStateTolerance, ErrorCode::InvalidArgument,
            "populations must sum to 1");
}

}  // namespace detail

/// Finite-time disentanglement of a diagonal state in independent baths.
inline bool sudden_death_condition(double e, double g, double a, double s) {
    detail::require_diagonal_weights(e, g, a, s);
    const double d2 = (a - s) * (a - s);
    return 4.0 * e * g < d2 && d2 < 4.0 * e;
}

/// Entanglement lifetime of a diagonal state at lambda = 0, in the units of
/// 1/gamma0. Returns +inf when entanglement only decays asymptotically and 0
/// when the state is never entangled.
inline double lifetime(double e, double g, double a, double s, double grayFactor, double gamma0) {
    detail::require_diagonal_weights(e, g, a, s);
    detail::require_finite(grayFactor, "grayFactor");
    detail::require_finite(gamma0, "gamma0");
    detail::require(grayFactor >= 0.0 && grayFactor <= 1.0, ErrorCode::InvalidArgument,
                    "grayFactor must lie in [0, 1]");
    detail::require(gamma0 > 0.0, ErrorCode::InvalidArgument, "gamma0 must be > 0");

    const double d2 = (a - s) * (a - s);
    const bool entangled = d2 > 4.0 * e * g;
    if (!entangled) return 0.0;
    if (grayFactor == 0.0) {
        throw Error(ErrorCode::FrozenDynamics, "state is frozen; entanglement never dies");
    }
    if (!(d2 < 4.0 * e)) return std::numeric_limits<double>::infinity();

    const double root = std::sqrt(2.0 * (a + e) * (a + e) + 2.0 * (e + s) * (e + s) - 4.0 * e);
    const double arg = 2.0 * e * (root + a + 2.0 * e + s) / (4.0 * e - d2);
    return std::log(arg) / (grayFactor * gamma0);
}

struct EntanglementEvents {
    std::vector<double> birthTimes;
    std::vector<double> deathTimes;
    double finalValue{0.0};
};

inline constexpr double kEventTolerance = 1e-10;

/// Locates every crossing of `measure` through `threshold` along the
/// sampled trajectory. Brackets come from the samples; each is refined by
/// bisection on `exact(tau)`, which must return the state at tau.
template <class ExactState>
EntanglementEvents detect_events(const Trajectory& trajectory, Measure measure, double threshold,
                                 ExactState&& exact) {
    detail::require(!trajectory.samples.empty(), ErrorCode::InvalidArgument,
                    "trajectory must not be empty");
    detail::require(threshold >= 0.0, ErrorCode::InvalidArgument, "threshold must be >= 0");

    auto above = [&](const XState& x) { return entanglement(x).get(measure) > threshold; };

    EntanglementEvents ev;
    const auto& s = trajectory.samples;
    bool prev = above(s.front().state);
    for (std::size_t i = 1; i < s.size(); ++i) {
        const bool cur = above(s[i].state);
        if (cur == prev) continue;
        double lo = s[i - 1].tau;
        double hi = s[i].tau;
        while (hi - lo > kEventTolerance) {
            const double mid = 0.5 * (lo + hi);
            if (above(exact(mid)) == prev) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        const double when = 0.5 * (lo + hi);
        (cur ? ev.birthTimes : ev.deathTimes).push_back(when);
        prev = cur;
    }
    ev.finalValue = entanglement(s.back().state).get(measure);
    return ev;
}

/// Variant without an exact propagator: crossings are interpolated linearly
/// between samples.
inline EntanglementEvents detect_events(const Trajectory& trajectory, Measure measure,
                                        double threshold = 0.0) {
    detail::require(!trajectory.samples.empty(), ErrorCode::InvalidArgument,
                    "trajectory must not be empty");
    detail::require(threshold >= 0.0, ErrorCode::InvalidArgument, "threshold must be >= 0");
    EntanglementEvents ev;
    const auto& s = trajectory.samples;
    double prevValue = entanglement(s.front().state).get(measure);
    for (std::size_t i = 1; i < s.size(); ++i) {
        const double value = entanglement(s[i].state).get(measure);
        const bool wasAbove = prevValue > threshold;
        const bool isAbove = value > threshold;
        if (wasAbove != isAbove) {
            const double frac = (threshold - prevValue) / (value - prevValue);
            const double when = s[i - 1].tau + frac * (s[i].tau - s[i - 1].tau);
            (isAbove ? ev.birthTimes : ev.deathTimes).push_back(when);
        }
        prevValue = value;
    }
    ev.finalValue = prevValue;
    return ev;
}

}  // namespace massent
