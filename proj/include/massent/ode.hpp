// ode.hpp: adaptive Dormand-Prince 5(4) integrator for small fixed-size
// systems y' = f(t, y). The fifth-order solution is propagated; the embedded
// fourth-order one only drives step control.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <utility>

#include "massent/errors.hpp"

namespace massent::ode {

template <std::size_t N>
using State = std::array<double, N>;

struct Options {
    double tolerance{1e-10};   // max-norm local error per accepted step
    double minStep{1e-14};
    double maxStep{0.0};       // 0: unlimited
    double initialStep{0.0};   // 0: chosen from the tolerance
    std::size_t maxSteps{10'000'000};
};

struct Stats {
    std::size_t accepted{0};
    std::size_t rejected{0};
};

namespace detail {

// Dormand & Prince (1980) tableau.
inline constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
inline constexpr double a21 = 1.0 / 5.0;
inline constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
inline constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
inline constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                        a54 = -212.0 / 729.0;
inline constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                        a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
inline constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                        b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
// b - bhat
inline constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                        e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

template <std::size_t N>
State<N> axpy(const State<N>& y, double h, std::initializer_list<std::pair<double, const State<N>*>> terms) {
    State<N> out = y;
    for (const auto& [w, k] : terms) {
        const double hw = h * w;
        for (std::size_t i = 0; i < N; ++i) out[i] += hw * (*k)[i];
    }
    return out;
}

}  // namespace detail

/// Integrates from t0 through each time in `outputs` (ascending, all >= t0),
/// landing exactly on them; `observe(t, y)` fires once per output time.
template <std::size_t N, class Rhs, class Observer>
Stats integrate(Rhs&& rhs, State<N> y, double t0, std::span<const double> outputs,
                const Options& opt, Observer&& observe) {
    using namespace detail;
    massent::detail::require(opt.tolerance > 0.0, ErrorCode::InvalidArgument, "tolerance must be > 0");

    Stats stats;
    double t = t0;
    double proposal = opt.initialStep > 0.0 ? opt.initialStep : std::cbrt(opt.tolerance);
    State<N> k1 = rhs(t, y);

    for (double target : outputs) {
        massent::detail::require(target >= t, ErrorCode::InvalidArgument,
                                 "output times must be ascending");
        while (t < target) {
            if (stats.accepted + stats.rejected >= opt.maxSteps) {
                throw Error(ErrorCode::StepUnderflow, "step budget exhausted");
            }
            if (opt.maxStep > 0.0) proposal = std::min(proposal, opt.maxStep);
            const bool lastStep = t + proposal >= target;
            const double h = lastStep ? target - t : proposal;

            const State<N> k2 = rhs(t + c2 * h, axpy<N>(y, h, {{a21, &k1}}));
            const State<N> k3 = rhs(t + c3 * h, axpy<N>(y, h, {{a31, &k1}, {a32, &k2}}));
            const State<N> k4 = rhs(t + c4 * h, axpy<N>(y, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
            const State<N> k5 =
                rhs(t + c5 * h, axpy<N>(y, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
            const State<N> k6 = rhs(
                t + h, axpy<N>(y, h, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
            const State<N> y5 =
                axpy<N>(y, h, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
            const State<N> k7 = rhs(t + h, y5);

            double err = 0.0;
            for (std::size_t i = 0; i < N; ++i) {
                const double d = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                                      e6 * k6[i] + e7 * k7[i]);
                err = std::max(err, std::abs(d));
            }
            const double factor =
                err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(opt.tolerance / err, 0.2), 0.2, 5.0);

            if (err <= opt.tolerance) {
                ++stats.accepted;
                t = lastStep ? target : t + h;
                y = y5;
                k1 = k7;  // first-same-as-last
                // A step clipped to hit the target says little about the
                // achievable size, so the previous proposal is not reduced.
                proposal = lastStep ? std::max(proposal, h * factor) : h * factor;
            } else {
                ++stats.rejected;
                proposal = h * factor;
                if (proposal < opt.minStep) {
                    throw Error(ErrorCode::StepUnderflow, "required step below minimum");
                }
            }
        }
        observe(t, y);
    }
    return stats;
}

}  // namespace massent::ode
