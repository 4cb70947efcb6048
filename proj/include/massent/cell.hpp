// cell.hpp: evolution of one initial state for one (mass, separation,
// temperature) point, with the propagation route picked automatically:
//   frozen       grayFactor == 0, every rate vanishes
//   closed form  vacuum with |lambda| <= 1 - 1e-6
//   eigen        thermal baths and the near-singular vacuum band

#pragma once

#include <cmath>
#include <optional>
#include <span>

#include "massent/dynamics.hpp"
#include "massent/entanglement.hpp"
#include "massent/field_bath.hpp"
#include "massent/xstate.hpp"

namespace massent {

class CellEvolution {
public:
    CellEvolution(const FieldBathConfig& config, const XState& initial)
        : config_(config),
          initial_(initial),
          gray_(gray_factor(config.mass, config.omega)),
          lambda_(spatial_factor(config.omega, config.separation, gray_)),
          gamma0_(gamma0(config.mu, config.omega)),
          coefficients_(coefficients(config)),
          propagator_(build_rate_matrix(coefficients_)) {
        initial_.validate();
        if (gray_ == 0.0) {
            method_ = Method::Frozen;
        } else if (!config.is_thermal() && std::abs(lambda_) <= 1.0 - kLambdaSingularBand) {
            method_ = Method::ClosedForm;
        } else {
            method_ = Method::Eigen;
        }
    }

    /// Dimensionless point: omega = 1, gamma0 = 1.
    static CellEvolution dimensionless(double massRatio, double omegaL, std::optional<double> tempRatio,
                                       const XState& initial) {
        return {FieldBathConfig::dimensionless(massRatio, omegaL, tempRatio), initial};
    }

    XState state_at(double tau) const {
        switch (method_) {
            case Method::Frozen:
                return initial_;
            case Method::ClosedForm:
                return closed_form_state(initial_, lambda_, xi(tau, gray_, gamma0_));
            default:
                return propagator_(initial_, tau);
        }
    }

    EntanglementValue measure_at(double tau) const { return entanglement(state_at(tau)); }

    Trajectory trajectory(std::span<const double> taus) const {
        return sample_trajectory([this](double t) { return state_at(t); }, taus, method_);
    }

    Method method() const noexcept { return method_; }
    double gray_factor_value() const noexcept { return gray_; }
    double lambda() const noexcept { return lambda_; }
    double gamma0_value() const noexcept { return gamma0_; }
    const GklsCoefficients& coefficients_value() const noexcept { return coefficients_; }
    const EigenPropagator& propagator() const noexcept { return propagator_; }
    const XState& initial() const noexcept { return initial_; }
    const FieldBathConfig& config() const noexcept { return config_; }

private:
    FieldBathConfig config_;
    XState initial_;
    double gray_;
    double lambda_;
    double gamma0_;
    GklsCoefficients coefficients_;
    EigenPropagator propagator_;
    Method method_{Method::Eigen};
};

}  // namespace massent
