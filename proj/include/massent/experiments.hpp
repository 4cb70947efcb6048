// experiments.hpp: parameter sweeps over (time, separation) and
// (temperature, separation), the mass-rescaling checks, and the two
// quantitative anchors: the separation enlargement factor and the thermal
// generation threshold.

#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "massent/cell.hpp"
#include "massent/entanglement.hpp"
#include "massent/errors.hpp"
#include "massent/field_bath.hpp"
#include "massent/parallel.hpp"
#include "massent/xstate.hpp"

namespace massent {

enum class AxisScale { Linear, Log };

struct Axis {
    double min{0.0};
    double max{1.0};
    std::size_t count{2};
    AxisScale scale{AxisScale::Linear};

    void validate(const char* name) const {
        const std::string n(name);
        detail::require_finite(min, (n + " min").c_str());
        detail::require_finite(max, (n + " max").c_str());
        if (count < 2) throw Error(ErrorCode::InvalidArgument, n + " needs at least 2 points");
        if (!(min < max)) throw Error(ErrorCode::InvalidArgument, n + " needs min < max");
        if (scale == AxisScale::Log && !(min > 0.0)) {
            throw Error(ErrorCode::InvalidArgument, n + " log scale needs min > 0");
        }
    }

    std::vector<double> values() const {
        std::vector<double> v(count);
        const double last = static_cast<double>(count - 1);
        for (std::size_t k = 0; k < count; ++k) {
            const double f = static_cast<double>(k) / last;
            v[k] = scale == AxisScale::Linear ? min + (max - min) * f
                                              : std::exp(std::log(min) + (std::log(max) - std::log(min)) * f);
        }
        v.front() = min;
        v.back() = max;
        return v;
    }
};

enum class MeasureSelection { Concurrence, Negativity, Both };
enum class Reduction { Instantaneous, MaxOverTime };

inline bool wants(MeasureSelection sel, Measure m) {
    return sel == MeasureSelection::Both ||
           (m == Measure::Concurrence ? sel == MeasureSelection::Concurrence
                                      : sel == MeasureSelection::Negativity);
}

/// axis1 is Gamma0 tau for evolve_scan and T/omega for thermal_scan; axis2
/// is omega L in both.
struct SweepConfig {
    double massRatio{0.0};
    std::optional<double> tempRatio;
    XState initialState{XState::excited()};
    Axis axis1{0.0, 10.0, 50, AxisScale::Linear};
    Axis axis2{0.1, 10.0, 50, AxisScale::Linear};
    MeasureSelection measure{MeasureSelection::Both};
    Reduction reduction{Reduction::Instantaneous};
    std::size_t threads{0};

    void validate() const {
        detail::require_finite(massRatio, "massRatio");
        detail::require(massRatio >= 0.0, ErrorCode::InvalidArgument, "massRatio must be >= 0");
        if (tempRatio) {
            detail::require_finite(*tempRatio, "tempRatio");
            detail::require(*tempRatio > 0.0, ErrorCode::InvalidArgument, "tempRatio must be > 0");
        }
        initialState.validate();
        axis1.validate("axis1");
        axis2.validate("axis2");
    }
};

/// Grids are row-major with axis1 as the slow index. A grid is empty when
/// its measure was not selected.
struct SweepResult {
    SweepConfig config;
    std::vector<double> axis1;
    std::vector<double> axis2;
    std::vector<double> concurrence;
    std::vector<double> negativity;
    std::vector<Method> methods;
    double cutoffC{kConcurrenceCutoff};
    double cutoffN{kNegativityCutoff};

    std::size_t index(std::size_t i1, std::size_t i2) const { return i1 * axis2.size() + i2; }
    std::size_t size() const { return axis1.size() * axis2.size(); }
};

/// Sweep failure carrying the coordinates of the offending cell.
class SweepCellError : public Error {
public:
    SweepCellError(double a1, double a2, const std::string& cause)
        : Error(ErrorCode::SweepCellFailed, "cell (" + shortest(a1) + ", " + shortest(a2) + "): " + cause),
          axis1_(a1),
          axis2_(a2) {}

    double axis1() const noexcept { return axis1_; }
    double axis2() const noexcept { return axis2_; }

    static std::string shortest(double v) {
        char buf[32];
        const auto r = std::to_chars(buf, buf + sizeof buf, v);
        return {buf, r.ptr};
    }

private:
    double axis1_;
    double axis2_;
};

namespace detail {

template <class F>
void guarded_cell(double a1, double a2, F&& f) {
    try {
        f();
    } catch (const SweepCellError&) {
        throw;
    } catch (const std::exception& e) {
        throw SweepCellError(a1, a2, e.what());
    }
}

inline void allocate(SweepResult& r) {
    const std::size_t n = r.size();
    if (wants(r.config.measure, Measure::Concurrence)) r.concurrence.assign(n, 0.0);
    if (wants(r.config.measure, Measure::Negativity)) r.negativity.assign(n, 0.0);
    r.methods.assign(n, Method::Eigen);
}

// Smooth surrogate whose positive part is the measure: max(K1, K2) for the
// concurrence, -2 min(N1, N2) for the negativity (an X state has at most one
// negative partial-transpose eigenvalue).
inline double raw_measure(const EntanglementValue& v, Measure m) {
    return m == Measure::Concurrence ? std::max(v.k1, v.k2) : -2.0 * std::min(v.n1, v.n2);
}

template <class F>
double golden_section_argmax(F&& f, double lo, double hi, int iterations = 80) {
    constexpr double r = 0.6180339887498949;
    double x1 = hi - r * (hi - lo);
    double x2 = lo + r * (hi - lo);
    double f1 = f(x1), f2 = f(x2);
    for (int i = 0; i < iterations && hi - lo > 1e-13 * std::max(1.0, std::abs(hi)); ++i) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = f(x1);
        }
    }
    return f1 < f2 ? x2 : x1;
}

}  // namespace detail

struct MaxSearchOptions {
    std::size_t initialSamples{400};
    double horizon{20.0};  // initial tau range in units of 1/(Omega Gamma0)
    double tolerance{1e-6};
    int maxDoublings{10};
    std::size_t refinedPeaks{3};
};

struct TimeMaximum {
    double concurrence{0.0};
    double negativity{0.0};
    double tauMax{0.0};

    double get(Measure m) const noexcept { return m == Measure::Concurrence ? concurrence : negativity; }
};

namespace detail {

// Max over [0, tauMax] on an (n+1)-point grid, with golden-section
// refinement around the largest sampled local maxima.
inline TimeMaximum sampled_maximum(const CellEvolution& cell, MeasureSelection sel, double tauMax,
                                   std::size_t n, std::size_t peaks) {
    std::vector<double> taus(n + 1);
    std::vector<EntanglementValue> vals(n + 1);
    for (std::size_t k = 0; k <= n; ++k) {
        taus[k] = tauMax * static_cast<double>(k) / static_cast<double>(n);
        vals[k] = cell.measure_at(taus[k]);
    }
    TimeMaximum out;
    out.tauMax = tauMax;
    for (Measure m : {Measure::Concurrence, Measure::Negativity}) {
        if (!wants(sel, m)) continue;
        double best = 0.0;
        std::vector<std::pair<double, std::size_t>> local;
        for (std::size_t k = 0; k <= n; ++k) {
            best = std::max(best, vals[k].get(m));
            const double r = raw_measure(vals[k], m);
            const bool left = k == 0 || r >= raw_measure(vals[k - 1], m);
            const bool right = k == n || r >= raw_measure(vals[k + 1], m);
            if (left && right) local.emplace_back(r, k);
        }
        std::sort(local.begin(), local.end(), [](const auto& a, const auto& b) {
            return a.first != b.first ? a.first > b.first : a.second < b.second;
        });
        if (local.size() > peaks) local.resize(peaks);
        for (const auto& [r, k] : local) {
            const double lo = taus[k == 0 ? 0 : k - 1];
            const double hi = taus[k == n ? n : k + 1];
            const double t = golden_section_argmax(
                [&](double tau) { return raw_measure(cell.measure_at(tau), m); }, lo, hi);
            best = std::max(best, cell.measure_at(t).get(m));
        }
        (m == Measure::Concurrence ? out.concurrence : out.negativity) = best;
    }
    return out;
}

}  // namespace detail

/// Maximum of the selected measures over Gamma0 tau in [0, tauMax]. tauMax
/// starts at horizon/Omega and doubles, together with the sample count,
/// until the maxima move by less than the tolerance.
inline TimeMaximum max_over_time(const CellEvolution& cell, MeasureSelection sel,
                                 const MaxSearchOptions& opt = {}) {
    if (cell.method() == Method::Frozen) {
        const auto v = entanglement(cell.initial());
        return {v.concurrence, v.negativity, 0.0};
    }
    double tauMax = opt.horizon / (cell.gray_factor_value() * cell.gamma0_value());
    std::size_t n = opt.initialSamples;
    TimeMaximum prev = detail::sampled_maximum(cell, sel, tauMax, n, opt.refinedPeaks);
    for (int d = 0; d < opt.maxDoublings; ++d) {
        tauMax *= 2.0;
        n *= 2;
        const TimeMaximum cur = detail::sampled_maximum(cell, sel, tauMax, n, opt.refinedPeaks);
        const bool stable = std::abs(cur.concurrence - prev.concurrence) < opt.tolerance &&
                            std::abs(cur.negativity - prev.negativity) < opt.tolerance;
        if (stable) return cur;
        prev = cur;
    }
    throw Error(ErrorCode::NonConvergedMax, "time maximum still moving after " +
                                                std::to_string(opt.maxDoublings) + " doublings");
}

/// Instantaneous measures on the (Gamma0 tau, omega L) grid.
inline SweepResult evolve_scan(const SweepConfig& config) {
    config.validate();
    detail::require(config.reduction == Reduction::Instantaneous, ErrorCode::InvalidArgument,
                    "evolve_scan needs reduction = Instantaneous");
    detail::require(config.axis1.min >= 0.0, ErrorCode::InvalidArgument, "time axis must start at >= 0");
    detail::require(config.axis2.min >= 0.0, ErrorCode::InvalidArgument, "separation axis must be >= 0");
    SweepResult r;
    r.config = config;
    r.axis1 = config.axis1.values();
    r.axis2 = config.axis2.values();
    detail::allocate(r);
    parallel_for(r.axis2.size(), config.threads, [&](std::size_t i2) {
        const double sep = r.axis2[i2];
        std::optional<CellEvolution> cell;
        detail::guarded_cell(r.axis1.front(), sep, [&] {
            cell.emplace(CellEvolution::dimensionless(config.massRatio, sep, config.tempRatio,
                                                      config.initialState));
        });
        for (std::size_t i1 = 0; i1 < r.axis1.size(); ++i1) {
            detail::guarded_cell(r.axis1[i1], sep, [&] {
                const std::size_t k = r.index(i1, i2);
                const auto v = cell->measure_at(r.axis1[i1]);
                if (!r.concurrence.empty()) r.concurrence[k] = v.concurrence;
                if (!r.negativity.empty()) r.negativity[k] = v.negativity;
                r.methods[k] = cell->method();
            });
        }
    });
    return r;
}

/// Time-maximised measures on the (T/omega, omega L) grid.
inline SweepResult thermal_scan(const SweepConfig& config, const MaxSearchOptions& opt = {}) {
    config.validate();
    detail::require(config.reduction == Reduction::MaxOverTime, ErrorCode::InvalidArgument,
                    "thermal_scan needs reduction = MaxOverTime");
    detail::require(config.axis1.min > 0.0, ErrorCode::InvalidArgument, "temperature axis must be > 0");
    detail::require(config.axis2.min >= 0.0, ErrorCode::InvalidArgument, "separation axis must be >= 0");
    SweepResult r;
    r.config = config;
    r.axis1 = config.axis1.values();
    r.axis2 = config.axis2.values();
    detail::allocate(r);
    parallel_for(r.size(), config.threads, [&](std::size_t k) {
        const std::size_t i1 = k / r.axis2.size();
        const std::size_t i2 = k % r.axis2.size();
        detail::guarded_cell(r.axis1[i1], r.axis2[i2], [&] {
            const auto cell = CellEvolution::dimensionless(config.massRatio, r.axis2[i2], r.axis1[i1],
                                                           config.initialState);
            const auto m = max_over_time(cell, config.measure, opt);
            if (!r.concurrence.empty()) r.concurrence[k] = m.concurrence;
            if (!r.negativity.empty()) r.negativity[k] = m.negativity;
            r.methods[k] = cell.method();
        });
    });
    return r;
}

struct ScalingDeviation {
    double concurrence{0.0};
    double negativity{0.0};

    double max() const noexcept { return std::max(concurrence, negativity); }
};

/// Largest |M[m](L, tau) - M[0](Omega L, Omega tau)| over the grid, for both
/// measures. Separations and times come from the two axes.
inline ScalingDeviation scaling_check(double massRatio, const XState& initial, std::optional<double> tempRatio,
                                      const Axis& sepAxis, const Axis& tauAxis, std::size_t threads = 0) {
    detail::require_finite(massRatio, "massRatio");
    detail::require(massRatio >= 0.0 && massRatio < 1.0, ErrorCode::InvalidArgument,
                    "scaling_check needs 0 <= massRatio < 1");
    sepAxis.validate("separation axis");
    tauAxis.validate("time axis");
    const auto seps = sepAxis.values();
    const auto taus = tauAxis.values();
    const double gray = gray_factor(massRatio, 1.0);
    std::vector<ScalingDeviation> perSep(seps.size());
    parallel_for(seps.size(), threads, [&](std::size_t i) {
        const auto massive = CellEvolution::dimensionless(massRatio, seps[i], tempRatio, initial);
        const auto massless = CellEvolution::dimensionless(0.0, gray * seps[i], tempRatio, initial);
        for (double tau : taus) {
            const auto a = massive.measure_at(tau);
            const auto b = massless.measure_at(gray * tau);
            perSep[i].concurrence = std::max(perSep[i].concurrence, std::abs(a.concurrence - b.concurrence));
            perSep[i].negativity = std::max(perSep[i].negativity, std::abs(a.negativity - b.negativity));
        }
    });
    ScalingDeviation out;
    for (const auto& d : perSep) {
        out.concurrence = std::max(out.concurrence, d.concurrence);
        out.negativity = std::max(out.negativity, d.negativity);
    }
    return out;
}

struct BoundarySearchOptions {
    double step{0.02};      // scan spacing in omega L Omega
    double horizon{20.0};   // scan end in omega L Omega
    double relTolerance{1e-6};
    MaxSearchOptions maxSearch{};
    std::size_t threads{0};
};

/// Largest omega L at which the time-maximised measure exceeds the cutoff.
inline double generation_boundary(double massRatio, std::optional<double> tempRatio, const XState& initial,
                                  Measure measure, double cutoff, const BoundarySearchOptions& opt = {}) {
    detail::require_finite(cutoff, "cutoff");
    detail::require(cutoff > 0.0, ErrorCode::InvalidArgument, "cutoff must be > 0");
    const double gray = gray_factor(massRatio, 1.0);
    if (gray == 0.0) throw Error(ErrorCode::NoGeneration, "frozen dynamics never generate entanglement");
    const MeasureSelection sel =
        measure == Measure::Concurrence ? MeasureSelection::Concurrence : MeasureSelection::Negativity;
    auto excess = [&](double sep) {
        const auto cell = CellEvolution::dimensionless(massRatio, sep, tempRatio, initial);
        return max_over_time(cell, sel, opt.maxSearch).get(measure) - cutoff;
    };

    const auto n = static_cast<std::size_t>(std::llround(opt.horizon / opt.step));
    std::vector<double> seps(n);
    std::vector<double> vals(n);
    for (std::size_t k = 0; k < n; ++k) seps[k] = opt.step * static_cast<double>(k + 1) / gray;
    parallel_for(n, opt.threads, [&](std::size_t k) { vals[k] = excess(seps[k]); });

    std::size_t last = n;
    for (std::size_t k = n; k-- > 0;) {
        if (vals[k] > 0.0) {
            last = k;
            break;
        }
    }
    if (last == n) throw Error(ErrorCode::NoGeneration, "measure never exceeds the cutoff on the scan");
    if (last + 1 == n) throw Error(ErrorCode::InvalidArgument, "generation persists to the end of the scan");

    double lo = seps[last], hi = seps[last + 1];
    while (hi - lo > opt.relTolerance * lo) {
        const double mid = 0.5 * (lo + hi);
        (excess(mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

struct EnlargementResult {
    double factor{1.0};
    double massiveBoundary{0.0};
    double masslessBoundary{0.0};
};

/// Ratio of the vacuum generation boundaries with and without mass.
inline EnlargementResult enlargement_factor(double massRatio, const XState& initial,
                                            double cutoff = kConcurrenceCutoff,
                                            Measure measure = Measure::Concurrence,
                                            const BoundarySearchOptions& opt = {}) {
    detail::require_finite(massRatio, "massRatio");
    detail::require(massRatio >= 0.0 && massRatio < 1.0, ErrorCode::InvalidArgument,
                    "enlargement_factor needs 0 <= massRatio < 1");
    EnlargementResult r;
    r.masslessBoundary = generation_boundary(0.0, std::nullopt, initial, measure, cutoff, opt);
    r.massiveBoundary = generation_boundary(massRatio, std::nullopt, initial, measure, cutoff, opt);
    r.factor = r.massiveBoundary / r.masslessBoundary;
    return r;
}

struct ThresholdOptions {
    double sepMin{0.05};   // omega L Omega
    double sepMax{6.0};
    double sepStep{0.05};
    double tempLow{0.05};
    double tempHigh{0.5};
    double tempTolerance{1e-5};
    MaxSearchOptions maxSearch{};
    std::size_t threads{0};
};

/// max over omega L and Gamma0 tau of the measure at one temperature.
inline double peak_over_separation(double massRatio, double tempRatio, const XState& initial, Measure measure,
                                   const ThresholdOptions& opt = {}) {
    const double gray = gray_factor(massRatio, 1.0);
    const MeasureSelection sel =
        measure == Measure::Concurrence ? MeasureSelection::Concurrence : MeasureSelection::Negativity;
    if (gray == 0.0) return entanglement(initial).get(measure);
    auto peak = [&](double sep) {
        const auto cell = CellEvolution::dimensionless(massRatio, sep, tempRatio, initial);
        return max_over_time(cell, sel, opt.maxSearch).get(measure);
    };
    const auto n = static_cast<std::size_t>(std::llround((opt.sepMax - opt.sepMin) / opt.sepStep)) + 1;
    std::vector<double> seps(n), vals(n);
    for (std::size_t k = 0; k < n; ++k) seps[k] = (opt.sepMin + opt.sepStep * static_cast<double>(k)) / gray;
    parallel_for(n, opt.threads, [&](std::size_t k) { vals[k] = peak(seps[k]); });
    const auto best = static_cast<std::size_t>(std::max_element(vals.begin(), vals.end()) - vals.begin());
    const double lo = seps[best == 0 ? 0 : best - 1];
    const double hi = seps[best + 1 == n ? best : best + 1];
    const double sep = detail::golden_section_argmax(peak, lo, hi, 60);
    return std::max(vals[best], peak(sep));
}

/// Temperature above which the measure never exceeds the cutoff at any
/// separation or time, found by bisection.
inline double generation_threshold_temperature(double massRatio, const XState& initial,
                                               Measure measure = Measure::Concurrence,
                                               double cutoff = kConcurrenceCutoff,
                                               const ThresholdOptions& opt = {}) {
    detail::require(cutoff > 0.0, ErrorCode::InvalidArgument, "cutoff must be > 0");
    auto excess = [&](double t) { return peak_over_separation(massRatio, t, initial, measure, opt) - cutoff; };
    double lo = opt.tempLow, hi = opt.tempHigh;
    if (!(excess(lo) > 0.0)) throw Error(ErrorCode::NoGeneration, "no generation at the lowest temperature");
    if (excess(hi) > 0.0) throw Error(ErrorCode::InvalidArgument, "generation persists at the highest temperature");
    while (hi - lo > opt.tempTolerance) {
        const double mid = 0.5 * (lo + hi);
        (excess(mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

struct CoefficientReport {
    double maxRelativeDeviation{0.0};
    double kmsDeviation{0.0};  // thermal only
    bool thermal{false};
};

/// Library coefficients against the spectral-density route; for a thermal
/// bath also the ratio a1/b1 against coth(omega / 2T).
inline CoefficientReport verify_coefficients(const FieldBathConfig& config, double perturbation = 0.0) {
    config.validate();
    GklsCoefficients lib = coefficients(config);
    lib.a1 *= 1.0 + perturbation;
    const GklsCoefficients spec = coefficients_from_spectrum(config);
    CoefficientReport r;
    r.thermal = config.is_thermal();
    const double scale = std::max(std::abs(spec.a1), std::abs(lib.a1));
    if (scale > 0.0) {
        r.maxRelativeDeviation = std::max({std::abs(lib.a1 - spec.a1), std::abs(lib.b1 - spec.b1),
                                           std::abs(lib.a2 - spec.a2), std::abs(lib.b2 - spec.b2)}) /
                                 scale;
    }
    if (r.thermal && lib.b1 > 0.0) {
        const double expected = 1.0 / std::tanh(config.omega / (2.0 * *config.temperature()));
        r.kmsDeviation = std::abs(lib.a1 / lib.b1 - expected) / expected;
    }
    return r;
}

}  // namespace massent
