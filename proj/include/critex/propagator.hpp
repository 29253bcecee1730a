#pragma once

// Fourier multipliers of v_tt - Δv + v_t = 0 at radial frequency r and of
// the heat semigroup e^{tΔ}.

#include <cmath>
#include <complex>

#include "critex/error.hpp"
#include "critex/spectral_field.hpp"

namespace critex {

/// Roots of λ² + λ + r² = 0; lambda1 takes the + sign of the square root.
struct EigenPair {
    std::complex<double> lambda1;
    std::complex<double> lambda2;
};

inline EigenPair eigenvalues(double r) {
    if (!(r >= 0.0)) throw DomainError("eigenvalues: radial frequency must be >= 0");
    const double disc = (1.0 - 2.0 * r) * (1.0 + 2.0 * r);
    if (disc >= 0.0) {
        const double root = std::sqrt(disc);
        return {-2.0 * r * r / (1.0 + root), -0.5 * (1.0 + root)};
    }
    const double omega = 0.5 * std::sqrt(-disc);
    return {{-0.5, omega}, {-0.5, -omega}};
}

/// Fundamental matrix acting on (v̂, v̂_t):
///   [k00 k01]   [K̂0    K̂1   ]
///   [k10 k11] = [∂tK̂0  ∂tK̂1 ]
struct PropagatorMatrix {
    double k00 = 1.0;
    double k01 = 0.0;
    double k10 = 0.0;
    double k11 = 1.0;
    bool underflow = false;  // some entry fell below kUnderflowFloor and was set to 0

    double determinant() const { return k00 * k11 - k01 * k10; }

    PropagatorMatrix operator*(const PropagatorMatrix& b) const {
        return {k00 * b.k00 + k01 * b.k10, k00 * b.k01 + k01 * b.k11,
                k10 * b.k00 + k11 * b.k10, k10 * b.k01 + k11 * b.k11, underflow || b.underflow};
    }
};

inline constexpr double kSeriesThreshold = 1e-2;
inline constexpr int kSeriesTerms = 12;
inline constexpr double kUnderflowFloor = 1e-300;

namespace detail {

/// g(z) = Σ z^j/(2j+1)!  (sinh√z/√z),  h(z) = Σ z^j/(2j)!  (cosh√z).
inline void even_series(double z, double& g, double& h) {
    double term_h = 1.0, term_g = 1.0;
    g = 0.0;
    h = 0.0;
    for (int j = 0; j < kSeriesTerms; ++j) {
        h += term_h;
        g += term_g;
        term_h *= z / ((2.0 * j + 1.0) * (2.0 * j + 2.0));
        term_g *= z / ((2.0 * j + 2.0) * (2.0 * j + 3.0));
    }
}

inline double clamp_underflow(double v, bool& flag) {
    if (v != 0.0 && std::abs(v) < kUnderflowFloor) {
        flag = true;
        return 0.0;
    }
    return v;
}

}  // namespace detail

inline PropagatorMatrix propagator(double t, double r) {
    if (!(t >= 0.0)) throw DomainError("propagator: time must be >= 0");
    if (!(r >= 0.0)) throw DomainError("propagator: radial frequency must be >= 0");

    // δ² = 1/4 - r², z = (δt)².
    const double delta2 = 0.25 * (1.0 - 2.0 * r) * (1.0 + 2.0 * r);
    const double z = delta2 * t * t;
    PropagatorMatrix m;

    if (std::abs(z) < kSeriesThreshold) {
        double g = 0.0, h = 0.0;
        detail::even_series(z, g, h);
        const double damp = std::exp(-0.5 * t);
        m.k01 = damp * t * g;
        m.k00 = damp * (h + 0.5 * t * g);
        m.k11 = damp * (h - 0.5 * t * g);
    } else if (delta2 > 0.0) {
        // Real roots: use both exponentials directly so nothing overflows.
        const double delta = std::sqrt(delta2);
        const double slow = -r * r / (0.5 + delta);
        const double fast = -0.5 - delta;
        const double es = std::exp(slow * t);
        const double ef = std::exp(fast * t);
        const double inv = 1.0 / (2.0 * delta);
        m.k01 = (es - ef) * inv;
        m.k00 = (slow * ef - fast * es) * inv;
        m.k11 = (slow * es - fast * ef) * inv;
    } else {
        const double omega = std::sqrt(-delta2);
        const double damp = std::exp(-0.5 * t);
        const double c = std::cos(omega * t);
        const double sn = std::sin(omega * t) / omega;
        m.k01 = damp * sn;
        m.k00 = damp * (c + 0.5 * sn);
        m.k11 = damp * (c - 0.5 * sn);
    }
    m.k10 = -r * r * m.k01;

    m.k00 = detail::clamp_underflow(m.k00, m.underflow);
    m.k01 = detail::clamp_underflow(m.k01, m.underflow);
    m.k10 = detail::clamp_underflow(m.k10, m.underflow);
    m.k11 = detail::clamp_underflow(m.k11, m.underflow);
    return m;
}

inline double heat_multiplier(double t, double r) {
    if (!(t >= 0.0) || !(r >= 0.0)) throw DomainError("heat_multiplier: needs t >= 0, r >= 0");
    return std::exp(-r * r * t);
}

/// (û, û_t) on a common grid.
struct WavePair {
    SpectrumField u;
    SpectrumField ut;
};

/// Exact linear evolution over time t, mode by mode.
inline WavePair apply_linear(const WavePair& state, double t) {
    require_same_grid(state.u.grid, state.ut.grid);
    if (state.u.coeffs.size() != state.ut.coeffs.size())
        throw ContractViolation("apply_linear: coefficient arrays differ in size");
    WavePair out{SpectrumField::zeros(state.u.grid), SpectrumField::zeros(state.ut.grid)};
    const auto& grid = state.u.grid;
    for (std::size_t i = 0; i < state.u.coeffs.size(); ++i) {
        const auto m = propagator(t, std::sqrt(grid.wavenumber_squared(i)));
        const Complex u = state.u.coeffs[i], ut = state.ut.coeffs[i];
        out.u.coeffs[i] = m.k00 * u + m.k01 * ut;
        out.ut.coeffs[i] = m.k10 * u + m.k11 * ut;
    }
    return out;
}

/// Calibrated envelope constants for the pointwise kernel estimates.
struct KernelEnvelope {
    double c = 0.25;
    double c0 = 8.0;
    double c1 = 8.0;
};

/// |K̂0| <= C0 (r² e^{-ct} + e^{-c r² t}) and |K̂1| <= C1 min(1, 1/r) (e^{-ct} + e^{-c r² t}).
inline bool pointwise_bound_check(double t, double r, const KernelEnvelope& env = {}) {
    const auto m = propagator(t, r);
    const double slow = std::exp(-env.c * r * r * t);
    const double fast = std::exp(-env.c * t);
    const double k0_bound = env.c0 * (r * r * fast + slow);
    const double k1_bound = env.c1 * std::min(1.0, r > 0.0 ? 1.0 / r : 1.0) * (fast + slow);
    return std::abs(m.k00) <= k0_bound && std::abs(m.k01) <= k1_bound;
}

}  // namespace critex
