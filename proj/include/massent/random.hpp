// random.hpp: seeded generators of valid X states for randomized suites.
// Uniform variates are built from raw mt19937_64 output so that a seed
// gives the same states with any standard library.

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "massent/xstate.hpp"

namespace massent {

class StateSampler {
public:
    explicit StateSampler(std::uint64_t seed) : engine_(seed) {}

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform on the probability simplex (e, g, a, s).
    std::array<double, 4> simplex() {
        std::array<double, 4> w{};
        double total = 0.0;
        for (double& x : w) {
            x = -std::log1p(-uniform());
            total += x;
        }
        for (double& x : w) x /= total;
        return w;
    }

    XState diagonal() {
        const auto w = simplex();
        return {w[1], w[2], w[3], w[0], {}, {}};
    }

    /// Mixed X state with coherences anywhere inside the positivity disks.
    XState mixed() {
        XState x = diagonal();
        x.cohGE = std::polar(std::sqrt(x.popG * x.popE) * uniform(), 2.0 * std::numbers::pi * uniform());
        x.cohAS = std::polar(std::sqrt(x.popA * x.popS) * uniform(), 2.0 * std::numbers::pi * uniform());
        return x;
    }

    /// Like mixed() but with rho_AS = 0.
    XState mixed_without_as() {
        XState x = mixed();
        x.cohAS = {};
        return x;
    }

    /// Pure X state: a superposition inside either the {G,E} or the {A,S} block.
    XState pure() {
        const double theta = 0.5 * std::numbers::pi * uniform();
        const double phase = 2.0 * std::numbers::pi * uniform();
        const double c = std::cos(theta), s = std::sin(theta);
        XState x;
        if (uniform() < 0.5) {
            x.popG = c * c;
            x.popE = s * s;
            x.cohGE = std::polar(c * s, -phase);
        } else {
            x.popA = c * c;
            x.popS = s * s;
            x.cohAS = std::polar(c * s, -phase);
        }
        return x;
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace massent
