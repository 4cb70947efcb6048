#include "cli.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string_view>

#include "CLI11.hpp"
#include "manifest.hpp"
#include "massent/cell.hpp"
#include "massent/experiments.hpp"
#include "massent/field_bath.hpp"
#include "massent/io/csv.hpp"
#include "massent/io/initial_state.hpp"
#include "massent/verification.hpp"

#ifndef MASSENT_VERSION
#define MASSENT_VERSION "0.0.0"
#endif

namespace massent::cli {
namespace {

constexpr std::string_view kTrajectorySchema = "massent-trajectory/1";
constexpr std::string_view kMapSchema = "massent-map/1";

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

int exit_code_for(const Error& e) {
    switch (e.code()) {
        case ErrorCode::InvalidArgument:
        case ErrorCode::NotAState:
        case ErrorCode::NonXForm: return kUsage;
        default: return kNumerical;
    }
}

MeasureSelection parse_measure(const std::string& s) {
    if (s == "concurrence") return MeasureSelection::Concurrence;
    if (s == "negativity") return MeasureSelection::Negativity;
    return MeasureSelection::Both;
}

AxisScale parse_scale(const std::string& s) { return s == "log" ? AxisScale::Log : AxisScale::Linear; }

struct AxisFlags {
    double min;
    double max;
    std::size_t count;
    std::string scale{"linear"};

    Axis axis() const { return {min, max, count, parse_scale(scale)}; }

    Json json() const { return {{"min", min}, {"max", max}, {"count", count}, {"scale", scale}}; }
};

void add_axis(CLI::App* app, const std::string& name, AxisFlags& a, const std::string& what) {
    app->add_option("--" + name + "-min", a.min, what + " axis start")->capture_default_str();
    app->add_option("--" + name + "-max", a.max, what + " axis end")->capture_default_str();
    app->add_option("--" + name + "-count", a.count, what + " axis points")
        ->check(CLI::Range(std::size_t{2}, std::size_t{1} << 20))
        ->capture_default_str();
    app->add_option("--" + name + "-scale", a.scale, what + " axis spacing")
        ->check(CLI::IsMember({"linear", "log"}))
        ->capture_default_str();
}

// Data goes to --output (plus a manifest) or to out.
struct Sink {
    std::string output{"-"};
    std::string manifest;

    void add(CLI::App* app) {
        app->add_option("--output,-o", output, "data file ('-' for stdout)")->capture_default_str();
        app->add_option("--manifest", manifest, "manifest path (default <output>.manifest.json)");
    }

    void emit(const std::string& data, RunManifest m, std::string_view schema, std::ostream& out) const {
        if (output == "-") {
            out << data;
            if (!manifest.empty()) {
                m.add_output("-", data, schema);
                write_file(manifest, m.dump());
            }
            return;
        }
        write_file(output, data);
        m.add_output(output, data, schema);
        write_file(manifest.empty() ? output + ".manifest.json" : manifest, m.dump());
    }

    static void write_file(const std::string& path, const std::string& bytes) {
        std::ofstream f(path, std::ios::binary | std::ios::trunc);
        f << bytes;
        f.close();
        if (!f) throw std::runtime_error("cannot write " + path);
    }
};

RunManifest make_manifest(std::string command, Json params) {
    return {std::move(command), std::move(params), MASSENT_VERSION, utc_timestamp(), Json::array()};
}

Json opt_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

// Flat key=value files: each key is a long flag name of the subcommand.
// File values are spliced in ahead of the command-line flags so that flags win.
std::vector<std::string> expand_config(const std::vector<std::string>& args, const CLI::App& root) {
    std::vector<std::string> head, rest;
    std::optional<std::string> path;
    std::size_t i = 0;
    for (; i < args.size() && !args[i].empty() && args[i][0] != '-'; ++i) head.push_back(args[i]);
    for (; i < args.size(); ++i) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size()) throw UsageError("--config needs a file");
            path = args[++i];
        } else if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
        } else {
            rest.push_back(args[i]);
        }
    }
    if (!path) return args;

    const CLI::App* app = &root;
    for (const auto& name : head) {
        const CLI::App* sub = app->get_subcommand_no_throw(name);
        if (!sub) break;
        app = sub;
    }
    if (app == &root) throw UsageError("--config must follow a subcommand");

    std::ifstream f(*path);
    if (!f) throw UsageError("cannot read config file " + *path);
    std::vector<std::string> injected;
    for (const auto& item : CLI::ConfigINI().from_config(f)) {
        if (!item.parents.empty()) throw UsageError(*path + ": sections are not supported (" + item.fullname() + ")");
        if (item.name == "++" || item.name == "--") continue;
        const std::string flag = "--" + item.name;
        const CLI::Option* opt = app->get_option_no_throw(flag);
        if (!opt) throw UsageError(*path + ": unknown key '" + item.name + "'");
        if (item.inputs.size() != 1) throw UsageError(*path + ": key '" + item.name + "' needs one value");
        if (opt->get_expected_max() == 0) {
            if (item.inputs[0] == "true" || item.inputs[0] == "1") injected.push_back(flag);
        } else {
            injected.push_back(flag);
            injected.push_back(item.inputs[0]);
        }
    }
    std::vector<std::string> out = head;
    out.insert(out.end(), injected.begin(), injected.end());
    out.insert(out.end(), rest.begin(), rest.end());
    return out;
}

void print_coeffs(std::ostream& out, double mass, double sep, std::optional<double> temp) {
    const auto cfg = FieldBathConfig::dimensionless(mass, sep, temp);
    const auto c = coefficients(cfg);
    const double gray = gray_factor(cfg.mass, cfg.omega);
    const double lambda = spatial_factor(cfg.omega, cfg.separation, gray);
    const std::pair<const char*, double> rows[] = {{"Omega", gray}, {"lambda", lambda}, {"A1", c.a1},
                                                   {"B1", c.b1},    {"A2", c.a2},         {"B2", c.b2}};
    char buf[64];
    for (const auto& [name, v] : rows) {
        std::snprintf(buf, sizeof buf, "%-7s %.12g\n", name, v);
        out << buf;
    }
}

void print_verify(std::ostream& out, const std::vector<SuiteResult>& suites) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-26s %-14s %-10s %s\n", "suite", "max_deviation", "threshold", "result");
    out << buf;
    bool ok = true;
    for (const auto& s : suites) {
        std::snprintf(buf, sizeof buf, "%-26s %-14.3e %-10.0e %s\n", s.name.c_str(), s.maxDeviation, s.threshold,
                      s.passed() ? "PASS" : "FAIL");
        out << buf;
        ok = ok && s.passed();
    }
    out << "overall " << (ok ? "PASS" : "FAIL") << '\n';
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Two-qubit entanglement dynamics in a massive scalar field bath", "massent"};
    app.set_version_flag("--version", MASSENT_VERSION);
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.set_help_all_flag("--help-all", "show help for all subcommands");

    // coeffs
    double cMass = 0.0, cSep = 1.0;
    std::optional<double> cTemp;
    auto* coeffs = app.add_subcommand("coeffs", "print Omega, lambda and the GKLS coefficients in units of Gamma0");
    coeffs->add_option("--mass-ratio", cMass, "m/omega")->required()->check(CLI::NonNegativeNumber);
    coeffs->add_option("--sep", cSep, "omega L")->required()->check(CLI::NonNegativeNumber);
    coeffs->add_option("--temp-ratio", cTemp, "T/omega (omit for vacuum)")->check(CLI::PositiveNumber);
    coeffs->add_option("--config")->description("key=value file; flags override");

    // evolve
    std::string eInitial;
    double eMass = 0.0, eSep = 1.0, eTmax = 10.0;
    std::size_t eSteps = 100;
    std::optional<double> eTemp;
    std::string eMeasure = "both";
    Sink eSink;
    auto* evolve = app.add_subcommand("evolve", "trajectory CSV for one cell");
    evolve->add_option("--initial", eInitial, "E, G, A, S, bell-GE, diag:e,g,a,s or 8 comma-separated values")
        ->required();
    evolve->add_option("--mass-ratio", eMass, "m/omega")->required()->check(CLI::NonNegativeNumber);
    evolve->add_option("--sep", eSep, "omega L")->check(CLI::NonNegativeNumber)->capture_default_str();
    evolve->add_option("--tmax", eTmax, "final Gamma0 tau")->check(CLI::NonNegativeNumber)->capture_default_str();
    evolve->add_option("--steps", eSteps, "number of time steps")
        ->check(CLI::Range(std::size_t{1}, std::size_t{1} << 24))
        ->capture_default_str();
    evolve->add_option("--temp-ratio", eTemp, "T/omega (omit for vacuum)")->check(CLI::PositiveNumber);
    evolve->add_option("--measure", eMeasure, "measure columns to fill")
        ->check(CLI::IsMember({"concurrence", "negativity", "both"}))
        ->capture_default_str();
    evolve->add_option("--config")->description("key=value file; flags override");
    eSink.add(evolve);

    // map
    auto* map = app.add_subcommand("map", "grid sweeps");
    map->require_subcommand(1);

    std::string tsInitial = "E";
    double tsMass = 0.0;
    std::optional<double> tsTemp;
    AxisFlags tsTau{0.0, 10.0, 50}, tsSep{0.1, 10.0, 50};
    double tsCutC = kConcurrenceCutoff, tsCutN = kNegativityCutoff;
    std::size_t tsThreads = 0;
    Sink tsSink;
    auto* timeSep = map->add_subcommand("time-sep", "instantaneous measures over (Gamma0 tau, omega L)");
    timeSep->add_option("--mass-ratio", tsMass, "m/omega")->required()->check(CLI::NonNegativeNumber);
    timeSep->add_option("--initial", tsInitial, "initial state")->capture_default_str();
    timeSep->add_option("--temp-ratio", tsTemp, "T/omega (omit for vacuum)")->check(CLI::PositiveNumber);
    add_axis(timeSep, "tau", tsTau, "Gamma0 tau");
    add_axis(timeSep, "sep", tsSep, "omega L");
    timeSep->add_option("--cutoff-concurrence", tsCutC, "plotting cutoff for concurrence")->capture_default_str();
    timeSep->add_option("--cutoff-negativity", tsCutN, "plotting cutoff for negativity")->capture_default_str();
    timeSep->add_option("--threads", tsThreads, "worker threads (0 = hardware)")->capture_default_str();
    timeSep->add_option("--config")->description("key=value file; flags override");
    tsSink.add(timeSep);

    std::string ttInitial = "E";
    double ttMass = 0.0;
    AxisFlags ttTemp{0.05, 0.5, 46}, ttSep{0.1, 10.0, 50};
    double ttCutC = kConcurrenceCutoff, ttCutN = kNegativityCutoff;
    std::size_t ttThreads = 0;
    MaxSearchOptions ttSearch;
    Sink ttSink;
    auto* tempSep = map->add_subcommand("temp-sep", "time-maximised measures over (T/omega, omega L)");
    tempSep->add_option("--mass-ratio", ttMass, "m/omega")->required()->check(CLI::NonNegativeNumber);
    tempSep->add_option("--initial", ttInitial, "initial state")->capture_default_str();
    add_axis(tempSep, "temp", ttTemp, "T/omega");
    add_axis(tempSep, "sep", ttSep, "omega L");
    tempSep->add_option("--cutoff-concurrence", ttCutC, "plotting cutoff for concurrence")->capture_default_str();
    tempSep->add_option("--cutoff-negativity", ttCutN, "plotting cutoff for negativity")->capture_default_str();
    tempSep->add_option("--max-samples", ttSearch.initialSamples, "initial time samples of the max search")
        ->check(CLI::Range(std::size_t{8}, std::size_t{1} << 24))
        ->capture_default_str();
    tempSep->add_option("--max-horizon", ttSearch.horizon, "initial search window in 1/(Omega Gamma0)")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    tempSep->add_option("--max-doublings", ttSearch.maxDoublings, "window doublings before giving up")
        ->check(CLI::Range(0, 30))
        ->capture_default_str();
    tempSep->add_option("--threads", ttThreads, "worker threads (0 = hardware)")->capture_default_str();
    tempSep->add_option("--config")->description("key=value file; flags override");
    ttSink.add(tempSep);

    // verify
    VerifyOptions vOpt;
    auto* verify = app.add_subcommand("verify", "run the self-check suites");
    verify->add_option("--seed", vOpt.seed, "seed for the randomised suites")->capture_default_str();
    verify->add_option("--threads", vOpt.threads, "worker threads (0 = hardware)")->capture_default_str();
    verify->add_option("--perturb-coefficients", vOpt.coefficientPerturbation)->group("");
    verify->add_option("--config")->description("key=value file; flags override");

    try {
        std::vector<std::string> argv = expand_config(args, app);
        std::reverse(argv.begin(), argv.end());
        app.parse(argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const CLI::Error& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }

    try {
        if (*coeffs) {
            print_coeffs(out, cMass, cSep, cTemp);
            return kOk;
        }

        if (*evolve) {
            const XState x0 = io::parse_initial_state(eInitial);
            const auto cell = CellEvolution::dimensionless(eMass, eSep, eTemp, x0);
            const auto taus = uniform_times(eTmax, eSteps);
            const Trajectory traj = cell.trajectory(taus);
            std::ostringstream data;
            io::write_trajectory(data, traj, parse_measure(eMeasure));
            eSink.emit(data.str(),
                       make_manifest("evolve", {{"initial", eInitial},
                                                {"mass-ratio", eMass},
                                                {"sep", eSep},
                                                {"temp-ratio", opt_json(eTemp)},
                                                {"tmax", eTmax},
                                                {"steps", eSteps},
                                                {"measure", eMeasure},
                                                {"method", to_string(traj.method)}}),
                       kTrajectorySchema, out);
            return kOk;
        }

        if (*timeSep) {
            SweepConfig cfg;
            cfg.massRatio = tsMass;
            cfg.tempRatio = tsTemp;
            cfg.initialState = io::parse_initial_state(tsInitial);
            cfg.axis1 = tsTau.axis();
            cfg.axis2 = tsSep.axis();
            cfg.threads = tsThreads;
            cfg.reduction = Reduction::Instantaneous;
            SweepResult r = evolve_scan(cfg);
            r.cutoffC = tsCutC;
            r.cutoffN = tsCutN;
            std::ostringstream data;
            io::write_map(data, r);
            tsSink.emit(data.str(),
                        make_manifest("map time-sep", {{"initial", tsInitial},
                                                       {"mass-ratio", tsMass},
                                                       {"temp-ratio", opt_json(tsTemp)},
                                                       {"axis1", "tau"},
                                                       {"axis2", "sep"},
                                                       {"tau", tsTau.json()},
                                                       {"sep", tsSep.json()},
                                                       {"reduction", "instantaneous"},
                                                       {"cutoff-concurrence", tsCutC},
                                                       {"cutoff-negativity", tsCutN}}),
                        kMapSchema, out);
            return kOk;
        }

        if (*tempSep) {
            SweepConfig cfg;
            cfg.massRatio = ttMass;
            cfg.initialState = io::parse_initial_state(ttInitial);
            cfg.axis1 = ttTemp.axis();
            cfg.axis2 = ttSep.axis();
            cfg.threads = ttThreads;
            cfg.reduction = Reduction::MaxOverTime;
            const MaxSearchOptions& search = ttSearch;
            SweepResult r = thermal_scan(cfg, search);
            r.cutoffC = ttCutC;
            r.cutoffN = ttCutN;
            std::ostringstream data;
            io::write_map(data, r);
            ttSink.emit(data.str(),
                        make_manifest("map temp-sep", {{"initial", ttInitial},
                                                       {"mass-ratio", ttMass},
                                                       {"axis1", "temp-ratio"},
                                                       {"axis2", "sep"},
                                                       {"temp", ttTemp.json()},
                                                       {"sep", ttSep.json()},
                                                       {"reduction", "max-over-time"},
                                                       {"max-search", {{"initial-samples", search.initialSamples},
                                                                       {"horizon", search.horizon},
                                                                       {"tolerance", search.tolerance},
                                                                       {"max-doublings", search.maxDoublings}}},
                                                       {"cutoff-concurrence", ttCutC},
                                                       {"cutoff-negativity", ttCutN}}),
                        kMapSchema, out);
            return kOk;
        }

        if (*verify) {
            const auto suites = run_verification(vOpt);
            print_verify(out, suites);
            const bool ok = std::all_of(suites.begin(), suites.end(), [](const SuiteResult& s) { return s.passed(); });
            return ok ? kOk : kVerifyFailed;
        }
    } catch (const SweepCellError& e) {
        err << "error: sweep failed at axis1=" << SweepCellError::shortest(e.axis1())
            << " axis2=" << SweepCellError::shortest(e.axis2()) << ": " << e.what() << '\n';
        return kNumerical;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_code_for(e);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kNumerical;
    }
    return kUsage;
}

}  // namespace massent::cli
