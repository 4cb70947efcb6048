// field_bath.hpp: spectral densities of a massive scalar field and the
// dissipator rate coefficients it induces on two static qubits.
//
// Natural units (hbar = c = k_B = 1). The dimensionless helpers fix
// omega = 1 and choose mu so that gamma0 = 1, which makes every rate come
// out in units of the massless single-qubit emission rate.

#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <variant>

#include "massent/errors.hpp"

namespace massent {

struct VacuumBath {};

struct ThermalBath {
    double temperature{};  // T, same units as omega
};

using BathState = std::variant<VacuumBath, ThermalBath>;

struct FieldBathConfig {
    double mass{0.0};        // m >= 0
    double omega{1.0};       // qubit level spacing, > 0
    double mu{std::sqrt(2.0 * std::numbers::pi)};  // coupling; default gives gamma0 = 1 at omega = 1
    double separation{0.0};  // L in units of 1/omega
    BathState bath{VacuumBath{}};

    bool is_thermal() const noexcept { return std::holds_alternative<ThermalBath>(bath); }

    std::optional<double> temperature() const noexcept {
        if (auto* t = std::get_if<ThermalBath>(&bath)) return t->temperature;
        return std::nullopt;
    }

    void validate() const {
        using detail::require;
        using detail::require_finite;
        require_finite(mass, "mass");
        require_finite(omega, "omega");
        require_finite(mu, "mu");
        require_finite(separation, "separation");
        require(omega > 0.0, ErrorCode::InvalidArgument, "omega must be > 0");
        require(mu > 0.0, ErrorCode::InvalidArgument, "mu must be > 0");
        require(mass >= 0.0, ErrorCode::InvalidArgument, "mass must be >= 0");
        require(separation >= 0.0, ErrorCode::InvalidArgument, "separation must be >= 0");
        if (auto t = temperature()) {
            require_finite(*t, "temperature");
            require(*t > 0.0, ErrorCode::InvalidArgument, "temperature must be > 0");
        }
    }

    // omega = 1, gamma0 = 1; all arguments are ratios to omega.
    static FieldBathConfig dimensionless(double massRatio, double omegaL,
                                         std::optional<double> tempRatio = std::nullopt) {
        FieldBathConfig cfg;
        cfg.mass = massRatio;
        cfg.separation = omegaL;
        if (tempRatio) cfg.bath = ThermalBath{*tempRatio};
        cfg.validate();
        return cfg;
    }
};

// Rate coefficients of the dissipator, in the same units as gamma0.
// a1/b1 act on each qubit alone; a2/b2 couple the two qubits.
struct GklsCoefficients {
    double a1{0.0};
    double b1{0.0};
    double a2{0.0};
    double b2{0.0};

    bool all_zero() const noexcept { return a1 == 0.0 && b1 == 0.0 && a2 == 0.0 && b2 == 0.0; }

    friend bool operator==(const GklsCoefficients&, const GklsCoefficients&) = default;
};

/// Transition-rate suppression factor sqrt(1 - m^2/omega^2); zero once m >= omega.
inline double gray_factor(double mass, double omega) {
    detail::require_finite(mass, "mass");
    detail::require_finite(omega, "omega");
    detail::require(omega > 0.0, ErrorCode::InvalidArgument, "omega must be > 0");
    detail::require(mass >= 0.0, ErrorCode::InvalidArgument, "mass must be >= 0");
    if (omega <= mass) return 0.0;
    const double r = mass / omega;
    // (1-r)(1+r) keeps relative accuracy as r -> 1.
    return std::sqrt((1.0 - r) * (1.0 + r));
}

namespace detail {

inline double sinc(double x) noexcept {
    if (std::abs(x) < 1e-4) {
        const double x2 = x * x;
        return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
    }
    return std::sin(x) / x;
}

}  // namespace detail

/// Ratio of cross-qubit to single-qubit coefficients: sinc(omega * L * grayFactor).
inline double spatial_factor(double omega, double separation, double grayFactor) {
    detail::require_finite(omega, "omega");
    detail::require_finite(separation, "separation");
    detail::require_finite(grayFactor, "grayFactor");
    detail::require(omega > 0.0, ErrorCode::InvalidArgument, "omega must be > 0");
    detail::require(separation >= 0.0, ErrorCode::InvalidArgument, "separation must be >= 0");
    detail::require(grayFactor >= 0.0 && grayFactor <= 1.0, ErrorCode::InvalidArgument,
                    "grayFactor must lie in [0, 1]");
    return detail::sinc(omega * separation * grayFactor);
}

/// Spontaneous emission rate of one qubit in the massless vacuum.
inline double gamma0(double mu, double omega) {
    detail::require_finite(mu, "mu");
    detail::require_finite(omega, "omega");
    detail::require(mu > 0.0, ErrorCode::InvalidArgument, "mu must be > 0");
    detail::require(omega > 0.0, ErrorCode::InvalidArgument, "omega must be > 0");
    return mu * mu * omega / (2.0 * std::numbers::pi);
}

inline GklsCoefficients vacuum_coefficients(const FieldBathConfig& config) {
    config.validate();
    detail::require(!config.is_thermal(), ErrorCode::InvalidArgument,
                    "vacuum_coefficients requires a vacuum bath");
    const double gray = gray_factor(config.mass, config.omega);
    const double lambda = spatial_factor(config.omega, config.separation, gray);
    const double single = gray * gamma0(config.mu, config.omega) / 4.0;
    return {single, single, lambda * single, lambda * single};
}

/// coth(omega * beta / 2), the Bose enhancement of the symmetric rates.
inline double thermal_enhancement(double omega, double temperature) {
    return 1.0 / std::tanh(omega / (2.0 * temperature));
}

inline GklsCoefficients thermal_coefficients(const FieldBathConfig& config) {
    config.validate();
    const auto temperature = config.temperature();
    detail::require(temperature.has_value(), ErrorCode::InvalidArgument,
                    "thermal_coefficients requires a thermal bath");
    const double gray = gray_factor(config.mass, config.omega);
    const double lambda = spatial_factor(config.omega, config.separation, gray);
    const double single = gray * gamma0(config.mu, config.omega) / 4.0;
    const double a1 = single * thermal_enhancement(config.omega, *temperature);
    return {a1, single, lambda * a1, lambda * single};
}

inline GklsCoefficients coefficients(const FieldBathConfig& config) {
    return config.is_thermal() ? thermal_coefficients(config) : vacuum_coefficients(config);
}

struct SpectralDensity {
    double same{0.0};   // Fourier transform of <phi(x1) phi(x1)>
    double cross{0.0};  // Fourier transform of <phi(x1) phi(x2)>
};

// Vacuum Wightman functions are superpositions of e^{-i k0 dt} over k0 > m,
// so their Fourier transforms are supported on zeta > m only.
inline SpectralDensity spectral_density(double zeta, double mass, double separation) {
    detail::require_finite(zeta, "zeta");
    detail::require_finite(mass, "mass");
    detail::require_finite(separation, "separation");
    detail::require(mass >= 0.0, ErrorCode::InvalidArgument, "mass must be >= 0");
    detail::require(separation >= 0.0, ErrorCode::InvalidArgument, "separation must be >= 0");
    if (!(zeta > mass)) return {};
    const double k = std::sqrt((zeta - mass) * (zeta + mass));
    const double same = k / (2.0 * std::numbers::pi);
    if (separation == 0.0) return {same, same};
    return {same, std::sin(k * separation) / (2.0 * std::numbers::pi * separation)};
}

// Thermal state: emission (zeta > 0) is weighted by 1 + n, absorption
// (zeta < 0) by n, with n the Bose occupation at |zeta|.
inline SpectralDensity thermal_spectral_density(double zeta, double mass, double separation,
                                                double temperature) {
    detail::require_finite(temperature, "temperature");
    detail::require(temperature > 0.0, ErrorCode::InvalidArgument, "temperature must be > 0");
    const double frequency = std::abs(zeta);
    const SpectralDensity vac = spectral_density(frequency, mass, separation);
    if (frequency == 0.0) return {};
    const double occupation = 1.0 / std::expm1(frequency / temperature);
    const double weight = zeta > 0.0 ? 1.0 + occupation : occupation;
    return {vac.same * weight, vac.cross * weight};
}

/// Rebuilds the rate coefficients from the spectral densities at +/- omega.
/// This is the route the closed-form coefficient functions must agree with.
inline GklsCoefficients coefficients_from_spectrum(const FieldBathConfig& config) {
    config.validate();
    const double w = config.omega;
    SpectralDensity up;
    SpectralDensity down;
    if (auto t = config.temperature()) {
        up = thermal_spectral_density(w, config.mass, config.separation, *t);
        down = thermal_spectral_density(-w, config.mass, config.separation, *t);
    } else {
        up = spectral_density(w, config.mass, config.separation);
        down = spectral_density(-w, config.mass, config.separation);
    }
    const double scale = config.mu * config.mu / 4.0;
    return {scale * (up.same + down.same), scale * (up.same - down.same),
            scale * (up.cross + down.cross), scale * (up.cross - down.cross)};
}

}  // namespace massent
