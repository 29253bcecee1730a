#pragma once

// 50-digit closed forms of the damped-wave propagator near r = 1/2.

#include <algorithm>
#include <array>
#include <cmath>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "critex/propagator.hpp"

namespace oracle {

using Big = boost::multiprecision::cpp_bin_float_50;

/// {k00, k01, k10, k11} for r ≠ 1/2.
inline std::array<Big, 4> propagator_big(double t_in, double r_in) {
    const Big t = t_in, r = r_in;
    const Big d2 = Big(0.25) - r * r;
    const Big decay = exp(-t / 2);
    Big c, s;  // cosh/cos(δt) and sinh(δt)/δ or sin(ωt)/ω
    if (d2 > 0) {
        const Big d = sqrt(d2);
        c = cosh(d * t);
        s = sinh(d * t) / d;
    } else {
        const Big w = sqrt(-d2);
        c = cos(w * t);
        s = sin(w * t) / w;
    }
    const Big k01 = decay * s;
    return {decay * (c + s / 2), k01, -r * r * k01, decay * (c - s / 2)};
}

/// Largest relative continuity defect across r = 1/2 ± offset: the jump of
/// the double-precision entries minus the jump of the exact entries.
inline double branch_defect(double t, double offset) {
    const auto lo = critex::propagator(t, 0.5 - offset), hi = critex::propagator(t, 0.5 + offset);
    const auto LO = propagator_big(t, 0.5 - offset), HI = propagator_big(t, 0.5 + offset);
    const std::array<double, 4> a{lo.k00, lo.k01, lo.k10, lo.k11}, b{hi.k00, hi.k01, hi.k10, hi.k11};
    double worst = 0.0;
    for (int i = 0; i < 4; ++i) {
        const double exact_jump = static_cast<double>(LO[i] - HI[i]);
        const double scale = std::max(std::abs(a[i]), std::abs(b[i]));
        worst = std::max(worst, std::abs((a[i] - b[i]) - exact_jump) / scale);
    }
    return worst;
}

}  // namespace oracle
