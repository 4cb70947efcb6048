// initial_state.hpp: textual initial-state specifications:
//   E, G, A, S, bell-GE         named states
//   diag:e,g,a,s                diagonal state with the given weights
//   pG,pA,pS,pE,reGE,imGE,reAS,imAS   eight raw coupled-basis entries

#pragma once

#include <string>
#include <string_view>

#include "massent/errors.hpp"
#include "massent/io/csv.hpp"
#include "massent/xstate.hpp"

namespace massent::io {

inline XState parse_initial_state(std::string_view spec) {
    if (spec == "E") return XState::excited();
    if (spec == "G") return XState::ground();
    if (spec == "A") return XState::antisymmetric();
    if (spec == "S") return XState::symmetric();
    if (spec == "bell-GE") return XState::bell_ge();

    constexpr std::string_view diagPrefix = "diag:";
    if (spec.substr(0, diagPrefix.size()) == diagPrefix) {
        const auto f = split(spec.substr(diagPrefix.size()));
        if (f.size() != 4) throw Error(ErrorCode::InvalidArgument, "diag: needs four weights e,g,a,s");
        return XState::diagonal(parse_double(f[0]), parse_double(f[1]), parse_double(f[2]), parse_double(f[3]));
    }

    const auto f = split(spec);
    if (f.size() != 8) {
        throw Error(ErrorCode::InvalidArgument,
                    "unknown initial state '" + std::string(spec) +
                        "' (expected E, G, A, S, bell-GE, diag:e,g,a,s or eight comma-separated values)");
    }
    double v[8];
    for (int i = 0; i < 8; ++i) v[i] = parse_double(f[static_cast<std::size_t>(i)]);
    XState x{v[0], v[1], v[2], v[3], {v[4], v[5]}, {v[6], v[7]}};
    x.validate();
    return x;
}

}  // namespace massent::io
