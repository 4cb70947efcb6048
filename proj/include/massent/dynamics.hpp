// dynamics.hpp: time evolution of X states under the dissipator.
//
// Populations obey a closed 4x4 linear rate system; the two stored
// coherences decay independently at 4*a1. Three propagators are provided:
//   closed_form_state  analytic solution, vacuum only (a1 == b1)
//   EigenPropagator    exact solution of the linear system, any bath
//   integrate_ode      adaptive Runge-Kutta, used as an oracle

#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "massent/errors.hpp"
#include "massent/field_bath.hpp"
#include "massent/ode.hpp"
#include "massent/xstate.hpp"

namespace massent {

using Matrix4d = Eigen::Matrix4d;
using Vector4d = Eigen::Vector4d;

/// Population vectors are ordered (G, A, S, E).
inline Vector4d populations(const XState& x) { return {x.popG, x.popA, x.popS, x.popE}; }

struct RateMatrix {
    Matrix4d generator{Matrix4d::Zero()};
    double decayAS{0.0};
    double decayGE{0.0};

    bool is_zero() const { return generator.isZero(0.0) && decayAS == 0.0 && decayGE == 0.0; }
};

inline RateMatrix build_rate_matrix(const GklsCoefficients& c) {
    const double a1 = c.a1, b1 = c.b1, a2 = c.a2, b2 = c.b2;
    enum : int { G = 0, A = 1, S = 2, E = 3 };
    RateMatrix r;
    Matrix4d& m = r.generator;
    m(G, G) = -4.0 * (a1 - b1);
    m(G, A) = 2.0 * (a1 + b1 - a2 - b2);
    m(G, S) = 2.0 * (a1 + b1 + a2 + b2);

    m(A, A) = -4.0 * (a1 - a2);
    m(A, G) = 2.0 * (a1 - b1 - a2 + b2);
    m(A, E) = 2.0 * (a1 + b1 - a2 - b2);

    m(S, S) = -4.0 * (a1 + a2);
    m(S, G) = 2.0 * (a1 - b1 + a2 - b2);
    m(S, E) = 2.0 * (a1 + b1 + a2 + b2);

    m(E, E) = -4.0 * (a1 + b1);
    m(E, A) = 2.0 * (a1 - b1 - a2 + b2);
    m(E, S) = 2.0 * (a1 - b1 + a2 - b2);

    r.decayAS = 4.0 * a1;
    r.decayGE = 4.0 * a1;
    return r;
}

/// Decay variable of the vacuum closed form, exp(-grayFactor * gamma0 * tau).
inline double xi(double tau, double grayFactor, double gamma0) {
    detail::require_finite(tau, "tau");
    detail::require(tau >= 0.0, ErrorCode::InvalidArgument, "tau must be >= 0");
    return std::exp(-grayFactor * gamma0 * tau);
}

inline constexpr double kLambdaSingularBand = 1e-6;

namespace detail {

inline std::complex<double> expm1(std::complex<double> z) {
    const double s = std::sin(0.5 * z.imag());
    return {std::expm1(z.real()) * std::cos(z.imag()) - 2.0 * s * s, std::exp(z.real()) * std::sin(z.imag())};
}

inline void require_closed_form_domain(double lambda, double xiVal, bool allowZeroXi = false) {
    require_finite(lambda, "lambda");
    require_finite(xiVal, "xi");
    if (std::abs(lambda) > 1.0 - kLambdaSingularBand) {
        throw Error(ErrorCode::LambdaSingular, "|lambda| too close to 1 for the closed form");
    }
    if (allowZeroXi) {
        require(xiVal >= 0.0 && xiVal <= 1.0, ErrorCode::InvalidArgument, "xi must lie in [0, 1]");
    } else {
        require(xiVal > 0.0 && xiVal <= 1.0, ErrorCode::InvalidArgument, "xi must lie in (0, 1]");
    }
}

}  // namespace detail

/// Vacuum (a1 == b1) solution at the time encoded by xiVal; xiVal = 0 (or an
/// underflowed exp) gives the fully decayed state.
inline XState closed_form_state(const XState& initial, double lambda, double xiVal) {
    detail::require_closed_form_domain(lambda, xiVal, true);
    const double e = initial.popE;
    const double x = xiVal;
    const double x2 = x * x;
    const double lx = std::log(x);
    const double up = (1.0 + lambda) / (1.0 - lambda);
    const double down = (1.0 - lambda) / (1.0 + lambda);

    // rho_A = -x^2 down e + x (down e + a) x^-lambda, with the cascade term
    // regrouped as x^2 down expm1(-(1+lambda) ln x) so it stays finite as
    // |lambda| -> 1. E, A and S are sums of non-negative terms and keep full
    // relative accuracy. rho_G is the initial value minus their increments;
    // from |E> it starts O(tau^2) and would drown in roundoff as 1 - A - S - E.
    // Past an exponent of 1 the difference of powers cannot cancel, and it
    // avoids 0 * inf once x^2 underflows.
    auto cascade = [&](double ratio, double slow) {
        const double k = -slow * lx;
        return k > 1.0 ? ratio * e * (std::exp((2.0 - slow) * lx) - x2) : x2 * ratio * e * std::expm1(k);
    };
    const double cascadeA = cascade(down, 1.0 + lambda);
    const double cascadeS = cascade(up, 1.0 - lambda);
    XState out;
    out.popE = x2 * e;
    out.popA = cascadeA + initial.popA * std::exp((1.0 - lambda) * lx);
    out.popS = cascadeS + initial.popS * std::exp((1.0 + lambda) * lx);
    const double dA = cascadeA + initial.popA * std::expm1((1.0 - lambda) * lx);
    const double dS = cascadeS + initial.popS * std::expm1((1.0 + lambda) * lx);
    const double dE = e * std::expm1(2.0 * lx);
    out.popG = initial.popG - (dA + dS + dE);
    out.cohGE = x * initial.cohGE;
    out.cohAS = x * initial.cohAS;
    return out;
}

/// Exact propagator exp(tau * generator) for a fixed rate matrix. Uses an
/// eigendecomposition when it is well conditioned and falls back to a
/// scaling-and-squaring matrix exponential near defective spectra.
class EigenPropagator {
public:
    static constexpr double kResidualTolerance = 1e-12;
    static constexpr double kConditionLimit = 1e4;

    explicit EigenPropagator(const RateMatrix& rates) : rates_(rates) {
        if (rates_.is_zero()) {
            frozen_ = true;
            return;
        }
        Eigen::EigenSolver<Matrix4d> solver(rates_.generator, true);
        if (solver.info() != Eigen::Success) {
            fallback_ = true;
            return;
        }
        values_ = solver.eigenvalues();
        // Rate matrices have spectrum in Re <= 0; a roundoff-positive zero
        // mode would otherwise blow up at long times.
        // Probability conservation makes one eigenvalue exactly zero.
        int zero = 0;
        for (int i = 0; i < 4; ++i) {
            values_(i) = {std::min(values_(i).real(), 0.0), values_(i).imag()};
            if (std::abs(values_(i)) < std::abs(values_(zero))) zero = i;
        }
        values_(zero) = 0.0;
        vectors_ = solver.eigenvectors();
        Eigen::PartialPivLU<Eigen::Matrix4cd> lu(vectors_);
        inverse_ = lu.inverse();

        const double cond = vectors_.cwiseAbs().colwise().sum().maxCoeff() *
                            inverse_.cwiseAbs().colwise().sum().maxCoeff();
        const Eigen::Matrix4cd rebuilt = vectors_ * values_.asDiagonal() * inverse_;
        const double scale = std::max(1.0, rates_.generator.cwiseAbs().maxCoeff());
        const double residual =
            (rebuilt - rates_.generator.cast<std::complex<double>>()).cwiseAbs().maxCoeff() / scale;
        fallback_ = !(cond < kConditionLimit) || !(residual < kResidualTolerance);
    }

    const RateMatrix& rates() const noexcept { return rates_; }
    bool frozen() const noexcept { return frozen_; }
    bool uses_matrix_exponential() const noexcept { return fallback_; }

    // exp(tau M) p0 is formed two ways: directly, and as p0 plus an increment
    // built from expm1. Each component takes the form with the smaller
    // roundoff estimate, so populations stay relatively accurate both while
    // they are O(tau^2) near the start and once they have decayed.
    Vector4d propagate_populations(const Vector4d& p0, double tau) const {
        if (frozen_ || tau == 0.0) return p0;
        Vector4d direct, increment, errDirect, errIncrement;
        if (fallback_ && tau * generator_norm() > 0.5) {
            return stochastic_exp(tau) * p0;
        }
        if (fallback_) {
            // exp([[A, A p0], [0, 0]]) holds exp(A) and (exp(A) - 1) p0.
            Eigen::Matrix<double, 5, 5> aug = Eigen::Matrix<double, 5, 5>::Zero();
            aug.topLeftCorner<4, 4>() = rates_.generator * tau;
            aug.topRightCorner<4, 1>() = rates_.generator * tau * p0;
            const Eigen::Matrix<double, 5, 5> e = aug.exp();
            const Matrix4d ea = e.topLeftCorner<4, 4>();
            direct = ea * p0;
            increment = e.topRightCorner<4, 1>();
            errDirect = ea.cwiseAbs() * p0.cwiseAbs();
            errIncrement = increment.cwiseAbs();
        } else {
            const Eigen::Vector4cd c = inverse_ * p0.cast<std::complex<double>>();
            Eigen::Vector4cd w, dw;
            for (int i = 0; i < 4; ++i) {
                w(i) = std::exp(values_(i) * tau) * c(i);
                dw(i) = detail::expm1(values_(i) * tau) * c(i);
            }
            direct = (vectors_ * w).real();
            increment = (vectors_ * dw).real();
            errDirect = vectors_.cwiseAbs() * w.cwiseAbs();
            errIncrement = vectors_.cwiseAbs() * dw.cwiseAbs();
        }
        Vector4d out;
        for (int i = 0; i < 4; ++i) {
            const bool useIncrement = std::abs(p0(i)) + errIncrement(i) < errDirect(i);
            out(i) = useIncrement ? p0(i) + increment(i) : direct(i);
        }
        return out;
    }

    XState operator()(const XState& initial, double tau) const {
        detail::require_finite(tau, "tau");
        detail::require(tau >= 0.0, ErrorCode::InvalidArgument, "tau must be >= 0");
        if (frozen_ || tau == 0.0) return initial;
        const Vector4d p = propagate_populations(populations(initial), tau);
        XState out;
        out.popG = p(0);
        out.popA = p(1);
        out.popS = p(2);
        out.popE = p(3);
        out.cohGE = std::exp(-rates_.decayGE * tau) * initial.cohGE;
        out.cohAS = std::exp(-rates_.decayAS * tau) * initial.cohAS;
        return out;
    }

private:
    double generator_norm() const { return rates_.generator.cwiseAbs().colwise().sum().maxCoeff(); }

    // exp(tau M) is column stochastic. Squaring a nonnegative, renormalised
    // short-time factor keeps it so; plain squaring doubles the column-sum
    // error at every step.
    Matrix4d stochastic_exp(double tau) const {
        const double norm = generator_norm();
        double h = tau;
        int squarings = 0;
        while (h * norm > 0.5) {
            h *= 0.5;
            ++squarings;
        }
        auto renormalise = [](Matrix4d& m) {
            m = m.cwiseMax(0.0);
            for (int j = 0; j < 4; ++j) m.col(j) /= m.col(j).sum();
        };
        Matrix4d e = (rates_.generator * h).exp();
        renormalise(e);
        for (int k = 0; k < squarings; ++k) {
            e = (e * e).eval();
            renormalise(e);
        }
        return e;
    }

    RateMatrix rates_;
    bool frozen_{false};
    bool fallback_{false};
    Eigen::Vector4cd values_;
    Eigen::Matrix4cd vectors_;
    Eigen::Matrix4cd inverse_;
};

inline XState propagate_eigen(const XState& initial, const RateMatrix& rates, double tau) {
    return EigenPropagator(rates)(initial, tau);
}

enum class Method { ClosedForm, Eigen, OdeOracle, Frozen };

inline constexpr const char* to_string(Method m) noexcept {
    switch (m) {
        case Method::ClosedForm: return "closed_form";
        case Method::Eigen: return "eigen";
        case Method::OdeOracle: return "ode";
        case Method::Frozen: return "frozen";
    }
    return "unknown";
}

struct Sample {
    double tau{0.0};
    XState state;
};

struct Trajectory {
    std::vector<Sample> samples;
    Method method{Method::Eigen};

    void validate(double tol = kStateTolerance) const {
        for (std::size_t i = 0; i < samples.size(); ++i) {
            samples[i].state.validate(tol);
            if (i > 0 && !(samples[i].tau > samples[i - 1].tau)) {
                throw Error(ErrorCode::InvalidArgument, "trajectory times must be strictly increasing");
            }
        }
    }
};

/// Evenly spaced times 0, tauEnd/steps, ..., tauEnd.
inline std::vector<double> uniform_times(double tauEnd, std::size_t steps) {
    detail::require(steps >= 1, ErrorCode::InvalidArgument, "need at least one step");
    std::vector<double> t(steps + 1);
    for (std::size_t k = 0; k <= steps; ++k) {
        t[k] = tauEnd * static_cast<double>(k) / static_cast<double>(steps);
    }
    t.back() = tauEnd;
    return t;
}

template <class Propagate>
Trajectory sample_trajectory(Propagate&& propagate, std::span<const double> taus, Method method) {
    Trajectory traj;
    traj.method = method;
    traj.samples.reserve(taus.size());
    for (double t : taus) traj.samples.push_back({t, propagate(t)});
    return traj;
}

/// Adaptive Dormand-Prince integration of the rate equations, sampled at
/// `taus` (ascending, starting at or after 0).
inline Trajectory integrate_ode(const XState& initial, const RateMatrix& rates,
                                std::span<const double> taus, double tol) {
    detail::require(tol >= 1e-13 && tol <= 1e-6, ErrorCode::InvalidArgument,
                    "tolerance must lie in [1e-13, 1e-6]");
    const Matrix4d gen = rates.generator;
    const double dGE = rates.decayGE;
    const double dAS = rates.decayAS;

    auto rhs = [&](double, const ode::State<8>& y) {
        ode::State<8> dy{};
        for (int i = 0; i < 4; ++i) {
            double acc = 0.0;
            for (int j = 0; j < 4; ++j) acc += gen(i, j) * y[static_cast<std::size_t>(j)];
            dy[static_cast<std::size_t>(i)] = acc;
        }
        dy[4] = -dGE * y[4];
        dy[5] = -dGE * y[5];
        dy[6] = -dAS * y[6];
        dy[7] = -dAS * y[7];
        return dy;
    };

    const ode::State<8> y0{initial.popG,        initial.popA,        initial.popS,
                           initial.popE,        initial.cohGE.real(), initial.cohGE.imag(),
                           initial.cohAS.real(), initial.cohAS.imag()};
    ode::Options opt;
    opt.tolerance = tol;

    Trajectory traj;
    traj.method = Method::OdeOracle;
    traj.samples.reserve(taus.size());
    ode::integrate<8>(rhs, y0, 0.0, taus, opt, [&](double t, const ode::State<8>& y) {
        XState x{y[0], y[1], y[2], y[3], {y[4], y[5]}, {y[6], y[7]}};
        traj.samples.push_back({t, x});
    });
    return traj;
}

inline constexpr std::size_t kDefaultOdeSamples = 100;

inline Trajectory integrate_ode(const XState& initial, const RateMatrix& rates, double tauEnd,
                                double tol) {
    detail::require_finite(tauEnd, "tauEnd");
    detail::require(tauEnd > 0.0, ErrorCode::InvalidArgument, "tauEnd must be > 0");
    const auto taus = uniform_times(tauEnd, kDefaultOdeSamples);
    return integrate_ode(initial, rates, taus, tol);
}

}  // namespace massent
