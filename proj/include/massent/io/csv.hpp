// csv.hpp: locale-independent CSV for trajectories and sweep grids.
// Floats use the shortest representation that round-trips.

#pragma once

#include <charconv>
#include <cmath>
#include <ostream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "massent/dynamics.hpp"
#include "massent/entanglement.hpp"
#include "massent/errors.hpp"
#include "massent/experiments.hpp"

namespace massent::io {

inline constexpr std::string_view kTrajectoryHeader =
    "tau,rho_G,rho_A,rho_S,rho_E,re_GE,im_GE,re_AS,im_AS,concurrence,negativity";
inline constexpr std::string_view kMapHeader = "axis1,axis2,concurrence,negativity,method";

inline std::string format_double(double v) {
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return {buf, r.ptr};
}

inline double parse_double(std::string_view s) {
    double v = 0.0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc{} || r.ptr != s.data() + s.size()) {
        throw Error(ErrorCode::InvalidArgument, "not a number: '" + std::string(s) + "'");
    }
    return v;
}

inline std::vector<std::string> split(std::string_view line, char sep = ',') {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t pos = line.find(sep, start);
        out.emplace_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

/// Reads the unquoted comma-separated format written here.
inline CsvTable parse_csv(std::string_view text) {
    CsvTable t;
    bool first = true;
    std::size_t start = 0;
    while (start < text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        const std::string_view line = text.substr(start, end - start);
        start = end + 1;
        if (line.empty()) continue;
        if (first) {
            t.header = split(line);
            first = false;
        } else {
            t.rows.push_back(split(line));
            if (t.rows.back().size() != t.header.size()) {
                throw Error(ErrorCode::InvalidArgument, "row width differs from header");
            }
        }
    }
    return t;
}

class CsvWriter {
public:
    explicit CsvWriter(std::ostream& os) : os_(os) {}

    void line(std::string_view text) { os_ << text << '\n'; }

    template <class... Fields>
    void row(const Fields&... fields) {
        bool first = true;
        ((os_ << (first ? "" : ",") << field(fields), first = false), ...);
        os_ << '\n';
    }

private:
    static std::string field(double v) { return format_double(v); }
    static std::string field(std::string_view v) { return std::string(v); }
    static std::string field(const char* v) { return v; }
    static std::string field(const std::string& v) { return v; }

    std::ostream& os_;
};

/// One trajectory row per sample. Measures not selected are left blank.
inline void write_trajectory(std::ostream& os, const Trajectory& traj, MeasureSelection sel) {
    CsvWriter w(os);
    w.line(kTrajectoryHeader);
    for (const auto& s : traj.samples) {
        const XState& x = s.state;
        const EntanglementValue v = entanglement(x);
        const std::string c = wants(sel, Measure::Concurrence) ? format_double(v.concurrence) : "";
        const std::string n = wants(sel, Measure::Negativity) ? format_double(v.negativity) : "";
        w.row(s.tau, x.popG, x.popA, x.popS, x.popE, x.cohGE.real(), x.cohGE.imag(), x.cohAS.real(),
              x.cohAS.imag(), c, n);
    }
}

/// Long format, axis1 slow. Both grids must be present.
inline void write_map(std::ostream& os, const SweepResult& r) {
    CsvWriter w(os);
    w.line(kMapHeader);
    for (std::size_t i1 = 0; i1 < r.axis1.size(); ++i1) {
        for (std::size_t i2 = 0; i2 < r.axis2.size(); ++i2) {
            const std::size_t k = r.index(i1, i2);
            const std::string c = r.concurrence.empty() ? "" : format_double(r.concurrence[k]);
            const std::string n = r.negativity.empty() ? "" : format_double(r.negativity[k]);
            w.row(r.axis1[i1], r.axis2[i2], c, n, to_string(r.methods[k]));
        }
    }
}

}  // namespace massent::io
