#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "cli.hpp"
#include "json.hpp"
#include "manifest.hpp"
#include "massent/experiments.hpp"
#include "massent/io/csv.hpp"

using namespace massent;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::map<std::string, double> coeff_table(const std::string& text) {
    std::map<std::string, double> m;
    std::istringstream is(text);
    std::string name;
    double v;
    while (is >> name >> v) m[name] = v;
    return m;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(f), {}};
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "massent_cli_tests";
    fs::create_directories(dir);
    return dir / name;
}

}  // namespace

TEST(CliCoeffs, MasslessLargeSeparation) {
    const auto r = run({"coeffs", "--mass-ratio", "0", "--sep", "1e9"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto t = coeff_table(r.out);
    EXPECT_EQ(t.at("A1"), 0.25);
    EXPECT_EQ(t.at("B1"), 0.25);
    EXPECT_LT(std::abs(t.at("A2")), 1e-9);
    EXPECT_LT(std::abs(t.at("B2")), 1e-9);
}

TEST(CliCoeffs, FrozenBranchIsAllZero) {
    const auto t = coeff_table(run({"coeffs", "--mass-ratio", "1.5", "--sep", "1"}).out);
    for (const char* k : {"Omega", "A1", "B1", "A2", "B2"}) EXPECT_EQ(t.at(k), 0.0) << k;
}

TEST(CliCoeffs, ThermalRatioIsCoth) {
    const auto t = coeff_table(run({"coeffs", "--mass-ratio", "0", "--sep", "1", "--temp-ratio", "0.5"}).out);
    EXPECT_NEAR(t.at("A1") / t.at("B1"), std::cosh(1.0) / std::sinh(1.0), 1e-11);
    EXPECT_NEAR(t.at("lambda"), std::sin(1.0), 1e-12);
}

TEST(CliCoeffs, TwelveSignificantDigits) {
    const auto r = run({"coeffs", "--mass-ratio", "0", "--sep", "1"});
    EXPECT_NE(r.out.find("0.841470984808"), std::string::npos) << r.out;
}

TEST(CliUsage, InvalidFlagsExitTwo) {
    EXPECT_EQ(run({"coeffs", "--mass-ratio", "-1", "--sep", "1"}).code, 2);
    EXPECT_EQ(run({"coeffs", "--sep", "1"}).code, 2);
    EXPECT_EQ(run({"coeffs", "--mass-ratio", "0", "--sep", "1", "--temp-ratio", "0"}).code, 2);
    EXPECT_EQ(run({}).code, 2);
    EXPECT_EQ(run({"frobnicate"}).code, 2);
    EXPECT_EQ(run({"map"}).code, 2);
    EXPECT_EQ(run({"map", "time-sep", "--mass-ratio", "0", "--tau-count", "1"}).code, 2);
    EXPECT_EQ(run({"coeffs", "--help"}).code, 0);
}

TEST(CliEvolve, FrozenRowsAreConstant) {
    const auto r = run({"evolve", "--initial", "E", "--mass-ratio", "1.2", "--tmax", "1000", "--steps", "10"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto t = io::parse_csv(r.out);
    ASSERT_EQ(t.rows.size(), 11u);
    for (const auto& row : t.rows) {
        EXPECT_EQ(std::vector<std::string>(row.begin() + 1, row.end()),
                  std::vector<std::string>(t.rows[0].begin() + 1, t.rows[0].end()));
    }
}

TEST(CliEvolve, HeaderIsFixed) {
    const auto r = run({"evolve", "--initial", "G", "--mass-ratio", "0", "--steps", "1"});
    EXPECT_EQ(r.out.substr(0, r.out.find('\n')), io::kTrajectoryHeader);
}

TEST(CliEvolve, AntisymmetricDecaysWithoutSuddenDeath) {
    const auto r = run({"evolve", "--initial", "A", "--mass-ratio", "0", "--sep", "1e9", "--tmax", "20", "--steps",
                        "200"});
    ASSERT_EQ(r.code, 0) << r.err;
    const double lambda = std::sin(1e9) / 1e9;
    double prev = 2.0;
    for (const auto& row : io::parse_csv(r.out).rows) {
        const double tau = io::parse_double(row[0]);
        const double c = io::parse_double(row[9]);
        EXPECT_GT(c, 0.0);
        EXPECT_LT(c, prev);
        EXPECT_NEAR(c / std::exp(-(1.0 - lambda) * tau), 1.0, 1e-12) << tau;
        prev = c;
    }
}

TEST(CliEvolve, BellStartsMaximallyEntangled) {
    const auto r = run({"evolve", "--initial", "bell-GE", "--mass-ratio", "0", "--steps", "5"});
    const auto row = io::parse_csv(r.out).rows.at(0);
    EXPECT_EQ(row[0], "0");
    EXPECT_NEAR(io::parse_double(row[9]), 1.0, 1e-15);
    EXPECT_NEAR(io::parse_double(row[10]), 1.0, 1e-15);
}

TEST(CliEvolve, InvalidStateExitsTwo) {
    EXPECT_EQ(run({"evolve", "--initial", "Q", "--mass-ratio", "0"}).code, 2);
    EXPECT_EQ(run({"evolve", "--initial", "0.5,0,0,0.5,0.6,0,0,0", "--mass-ratio", "0"}).code, 2);
}

TEST(CliEvolve, ByteIdenticalReruns) {
    const std::vector<std::string> args{"evolve", "--initial", "diag:0.4,0.1,0.3,0.2", "--mass-ratio", "0.7",
                                        "--sep", "0.8", "--temp-ratio", "0.3", "--steps", "50"};
    EXPECT_EQ(run(args).out, run(args).out);
}

TEST(CliMap, DegenerateGridHasFourRows) {
    const auto r = run({"map", "time-sep", "--mass-ratio", "0.3", "--tau-count", "2", "--sep-count", "2"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto t = io::parse_csv(r.out);
    EXPECT_EQ(r.out.substr(0, r.out.find('\n')), io::kMapHeader);
    EXPECT_EQ(t.rows.size(), 4u);
}

TEST(CliMap, RoundTripMatchesLibrary) {
    const auto r = run({"map", "time-sep", "--mass-ratio", "0.995", "--initial", "E", "--tau-max", "2000",
                        "--tau-count", "9", "--sep-min", "0.5", "--sep-max", "30", "--sep-count", "7"});
    ASSERT_EQ(r.code, 0) << r.err;
    SweepConfig cfg;
    cfg.massRatio = 0.995;
    cfg.axis1 = {0.0, 2000.0, 9, AxisScale::Linear};
    cfg.axis2 = {0.5, 30.0, 7, AxisScale::Linear};
    const SweepResult lib = evolve_scan(cfg);
    const auto t = io::parse_csv(r.out);
    ASSERT_EQ(t.rows.size(), lib.size());
    for (std::size_t k = 0; k < lib.size(); ++k) {
        const auto& row = t.rows[k];
        EXPECT_EQ(io::parse_double(row[0]), lib.axis1[k / lib.axis2.size()]);
        EXPECT_EQ(io::parse_double(row[1]), lib.axis2[k % lib.axis2.size()]);
        const double c = io::parse_double(row[2]), n = io::parse_double(row[3]);
        EXPECT_LE(std::abs(c - lib.concurrence[k]), 1e-15 * std::abs(lib.concurrence[k]));
        EXPECT_LE(std::abs(n - lib.negativity[k]), 1e-15 * std::abs(lib.negativity[k]));
        EXPECT_EQ(row[4], to_string(lib.methods[k]));
    }
}

TEST(CliMap, ThermalSweepHasNoGenerationAboveThreshold) {
    const auto r = run({"map", "temp-sep", "--mass-ratio", "0", "--initial", "E", "--temp-min", "0.26", "--temp-max",
                        "0.5", "--temp-count", "5", "--sep-min", "0.05", "--sep-max", "6", "--sep-count", "25"});
    ASSERT_EQ(r.code, 0) << r.err;
    for (const auto& row : io::parse_csv(r.out).rows) {
        EXPECT_LE(io::parse_double(row[2]), 1e-3) << row[0] << "," << row[1];
    }
}

TEST(CliMap, WritesManifestWithHash) {
    const fs::path out = scratch("grid.csv");
    fs::remove(out.string() + ".manifest.json");
    const auto r = run({"map", "time-sep", "--mass-ratio", "0.8", "--tau-count", "3", "--sep-count", "2", "-o",
                        out.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(r.out.empty());
    const std::string data = slurp(out);
    const auto m = nlohmann::json::parse(slurp(out.string() + ".manifest.json"));
    EXPECT_EQ(m.at("command"), "map time-sep");
    EXPECT_EQ(m.at("params").at("mass-ratio"), 0.8);
    EXPECT_EQ(m.at("params").at("tau").at("count"), 3);
    EXPECT_TRUE(m.contains("version"));
    EXPECT_TRUE(m.contains("timestamp"));
    ASSERT_EQ(m.at("outputs").size(), 1u);
    EXPECT_EQ(m.at("outputs")[0].at("path"), out.string());
    EXPECT_EQ(m.at("outputs")[0].at("sha256"), cli::sha256_hex(data));
}

TEST(CliMap, Sha256KnownAnswer) {
    EXPECT_EQ(cli::sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(CliMap, ByteIdenticalAcrossThreadCounts) {
    auto args = [](const char* threads) {
        return std::vector<std::string>{"map", "temp-sep", "--mass-ratio", "0.6", "--temp-count", "3", "--sep-count",
                                        "4", "--threads", threads};
    };
    const auto one = run(args("1"));
    ASSERT_EQ(one.code, 0) << one.err;
    EXPECT_EQ(one.out, run(args("3")).out);
    EXPECT_EQ(one.out, run(args("1")).out);
}

TEST(CliMap, FailingCellExitsThreeWithCoordinates) {
    const auto r = run({"map", "temp-sep", "--mass-ratio", "0", "--temp-min", "0.05", "--temp-max", "0.1",
                        "--temp-count", "2", "--sep-min", "0.5", "--sep-max", "1", "--sep-count", "2",
                        "--max-doublings", "0", "--threads", "1"});
    EXPECT_EQ(r.code, 3);
    EXPECT_TRUE(r.out.empty());
    EXPECT_NE(r.err.find("axis1=0.05 axis2=0.5"), std::string::npos) << r.err;
}

TEST(CliVerify, PassesAndIsDeterministic) {
    const auto a = run({"verify", "--seed", "42"});
    ASSERT_EQ(a.code, 0) << a.out;
    EXPECT_NE(a.out.find("overall PASS"), std::string::npos);
    for (const char* suite : {"scaling-vacuum", "scaling-thermal", "lifetime", "method-agreement-vacuum",
                              "method-agreement-thermal", "coefficient-oracle"}) {
        EXPECT_NE(a.out.find(suite), std::string::npos) << suite;
    }
    EXPECT_EQ(a.out, run({"verify", "--seed", "42"}).out);
}

TEST(CliVerify, PerturbedCoefficientsFail) {
    const auto r = run({"verify", "--perturb-coefficients", "1e-6"});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.out.find("overall FAIL"), std::string::npos);
}

TEST(CliConfig, FileValuesWithFlagOverride) {
    const fs::path cfg = scratch("evolve.cfg");
    std::ofstream(cfg) << "# recipe\ninitial = A\nmass-ratio = 0.8\nsep=2.5\nsteps = 2\n";
    const auto viaFile = run({"evolve", "--config", cfg.string(), "--sep", "7"});
    const auto direct = run({"evolve", "--initial", "A", "--mass-ratio", "0.8", "--sep", "7", "--steps", "2"});
    ASSERT_EQ(viaFile.code, 0) << viaFile.err;
    EXPECT_EQ(viaFile.out, direct.out);
    // Flags given before --config still win.
    EXPECT_EQ(run({"evolve", "--sep", "7", "--config", cfg.string()}).out, direct.out);
}

TEST(CliConfig, UnknownKeyOrMissingFileExitsTwo) {
    const fs::path cfg = scratch("bad.cfg");
    std::ofstream(cfg) << "mass-ratio = 0\nwobble = 3\n";
    const auto r = run({"coeffs", "--sep", "1", "--config", cfg.string()});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("wobble"), std::string::npos);
    EXPECT_EQ(run({"coeffs", "--config", scratch("missing.cfg").string()}).code, 2);
}

TEST(CliRecipes, EveryRecipeRunsOnACoarseGrid) {
    const fs::path dir = MASSENT_RECIPES_DIR;
    int seen = 0;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.path().extension() != ".cfg") continue;
        ++seen;
        const std::string name = entry.path().stem().string();
        const bool timeSep = name.rfind("time_sep", 0) == 0;
        const std::string first = timeSep ? "--tau-count" : "--temp-count";
        const auto r = run({"map", timeSep ? "time-sep" : "temp-sep", "--config", entry.path().string(), first, "3",
                            "--sep-count", "3", "--output", "-"});
        ASSERT_EQ(r.code, 0) << name << ": " << r.err;
        EXPECT_EQ(io::parse_csv(r.out).rows.size(), 9u) << name;
    }
    EXPECT_EQ(seen, 4);
}

TEST(CliEvolve, LongHorizonStaysValid) {
    for (const char* mass : {"0", "0.995"}) {
        const auto r = run({"evolve", "--initial", "E", "--mass-ratio", mass, "--sep", "0.05", "--tmax", "5000",
                            "--steps", "50"});
        ASSERT_EQ(r.code, 0) << r.err;
        const auto last = io::parse_csv(r.out).rows.back();
        EXPECT_EQ(io::parse_double(last[4]), 0.0);
    }
}
