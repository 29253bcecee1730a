#pragma once

// Exponent arithmetic for u_tt - Δu + u_t = |u|^p with data in Ḣ^{-γ}:
// critical exponents, lifespan powers, interpolation weights and the
// (γ, p) regime classifier.

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "critex/error.hpp"

namespace critex {

namespace detail {

inline constexpr double kDenominatorFloor = 1e-14;

inline double checked_div(double num, double den, const char* what) {
    if (!(std::abs(den) > kDenominatorFloor))
        throw DomainError(std::string(what) + ": vanishing denominator");
    return num / den;
}

inline void require_dimension(double n) {
    if (!(n >= 1.0) || !std::isfinite(n))
        throw DomainError("dimension n must be a finite real >= 1");
}

}  // namespace detail

/// (n, γ, s, p, ε): the parameters shared by every regime check.
struct RegimeParams {
    double n = 1.0;
    double gamma = 0.5;
    double s = 1.0;
    double p = 2.0;
    std::optional<double> eps;
};

enum class Regime { GlobalExistence, BlowUp, CriticalOpen, OutsideTheory };

inline const char* to_string(Regime r) {
    switch (r) {
        case Regime::GlobalExistence: return "GlobalExistence";
        case Regime::BlowUp: return "BlowUp";
        case Regime::CriticalOpen: return "CriticalOpen";
        case Regime::OutsideTheory: return "OutsideTheory";
    }
    return "?";
}

/// One evaluated condition `lhs <op> rhs`. rhs may be +inf (no cap).
struct Reason {
    std::string name;
    bool passed = false;
    double lhs = 0.0;
    double rhs = 0.0;
};

struct RegimeVerdict {
    Regime regime = Regime::OutsideTheory;
    std::vector<Reason> reasons;
};

/// Fujita exponent 1 + 2/n.
inline double p_fujita(double n) {
    if (!(n > 0.0)) throw DomainError("p_fujita: dimension must be positive");
    return 1.0 + 2.0 / n;
}

/// 1 + 4/(n + 2γ). Accepts γ = n/2, where it reduces to p_fujita(n).
inline double p_crit(double n, double gamma) {
    detail::require_dimension(n);
    if (!(gamma > 0.0)) throw DomainError("p_crit: gamma must be positive");
    return 1.0 + detail::checked_div(4.0, n + 2.0 * gamma, "p_crit");
}

/// Positive root of 2g^2 + n g - 2n = 0.
inline double gamma_tilde(double n) {
    detail::require_dimension(n);
    // (sqrt(n^2+16n) - n)/4 rewritten to avoid cancellation for large n.
    return 4.0 * n / (std::sqrt(n * n + 16.0 * n) + n);
}

inline double conjugate_exponent(double p) {
    if (!(p > 1.0)) throw DomainError("conjugate_exponent: p must exceed 1");
    return p / (p - 1.0);
}

/// -2/(2p' - 2 - n/2 - γ): the power of ε in the sharp lifespan T_ε ≃ C ε^{...}.
inline double lifespan_exponent(double p, double n, double gamma) {
    detail::require_dimension(n);
    if (!(gamma > 0.0)) throw DomainError("lifespan_exponent: gamma must be positive");
    const double pc = p_crit(n, gamma);
    if (!(p > 1.0)) throw DomainError("lifespan_exponent: requires p > 1");
    // 2p' - 2 = 2/(p-1); extended precision keeps the cancellation near p_crit harmless.
    const long double den = 2.0L / (static_cast<long double>(p) - 1.0L) - 0.5L * n - gamma;
    if (!(den > detail::kDenominatorFloor))
        throw DomainError("lifespan_exponent: requires p < p_crit(n,gamma) = " +
                          std::to_string(pc) + " (denominator 2p'-2-n/2-gamma <= 0)");
    return static_cast<double>(-2.0L / den);
}

/// The same power written as -2(p-1)/(2 - (n/2+γ)(p-1)).
inline double lifespan_exponent_reduced(double p, double n, double gamma) {
    detail::require_dimension(n);
    if (!(p > 1.0)) throw DomainError("lifespan_exponent_reduced: requires p > 1");
    const long double q = static_cast<long double>(p) - 1.0L;
    const long double den = 2.0L - (0.5L * n + gamma) * q;
    if (!(den > detail::kDenominatorFloor))
        throw DomainError("lifespan_exponent_reduced: requires p < p_crit(n,gamma)");
    return static_cast<double>(-2.0L * q / den);
}

/// α0 = -(γ/2 + n/4) p + γ/2 + n/4 + 1, required to lie in (0,1).
inline double alpha0(double p, double n, double gamma) {
    detail::require_dimension(n);
    if (!(p > 1.0)) throw DomainError("alpha0: requires p > 1");
    const double a = static_cast<double>(1.0L - (0.5L * gamma + 0.25L * n) * (static_cast<long double>(p) - 1.0L));
    if (!(a > 0.0 && a < 1.0))
        throw DomainError("alpha0: value " + std::to_string(a) +
                          " outside (0,1); requires 1 < p < p_crit(n,gamma)");
    return a;
}

/// Lebesgue index m with 1/m - 1/2 = γ/n, i.e. m = 2n/(n+2γ) ∈ (1,2).
inline double hls_pair(double gamma, double n) {
    detail::require_dimension(n);
    if (!(gamma > 0.0) || !(gamma < 0.5 * n))
        throw DomainError("hls_pair: requires 0 < gamma < n/2 so that m lies in (1,2)");
    return 2.0 * n / (n + 2.0 * gamma);
}

/// Interpolation weight with its admissibility flag (weight in [0,1]).
struct GnWeight {
    double value = 0.0;
    bool admissible = false;
};

namespace detail {
inline void require_gn(double n, double s, double p) {
    require_dimension(n);
    if (!(s > 0.0 && s <= 1.0)) throw DomainError("regularity s must lie in (0,1]");
    if (!(p > 1.0)) throw DomainError("exponent p must exceed 1");
}
inline bool unit_interval(double v) {
    constexpr double tol = 1e-12;
    return v >= -tol && v <= 1.0 + tol;
}
}  // namespace detail

/// β1 = n/(2s) (1 - 1/p), the weight for the L² estimate of |u|^p.
inline GnWeight gn_beta1(double n, double s, double p) {
    detail::require_gn(n, s, p);
    const double b = n / (2.0 * s) * (1.0 - 1.0 / p);
    return {b, detail::unit_interval(b)};
}

/// β2 = n/s (1/2 - 1/(m p)) with m = hls_pair(γ, n); the Ḣ^{-γ} estimate weight.
inline GnWeight gn_beta2(double n, double s, double p, double gamma) {
    detail::require_gn(n, s, p);
    const double m = hls_pair(gamma, n);
    const double b = n / s * (0.5 - 1.0 / (m * p));
    return {b, detail::unit_interval(b)};
}

/// Technical cap n/(n-2s) when n > 2s, +inf otherwise.
inline double gn_cap(double n, double s) {
    if (n > 2.0 * s) return n / (n - 2.0 * s);
    return std::numeric_limits<double>::infinity();
}

/// Lower bound 1 + 2γ/n coming from β2 >= 0.
inline double hls_lower(double n, double gamma) { return 1.0 + 2.0 * gamma / n; }

inline void validate(const RegimeParams& params) {
    detail::require_dimension(params.n);
    if (!(params.gamma > 0.0) || !(params.gamma < 0.5 * params.n))
        throw DomainError("gamma must lie in (0, n/2)");
    if (!(params.p > 1.0)) throw DomainError("p must exceed 1");
    if (!(params.s > 0.0 && params.s <= 1.0)) throw DomainError("s must lie in (0,1]");
    if (params.eps && !(*params.eps > 0.0)) throw DomainError("eps must be positive");
}

inline constexpr double kCriticalRelTol = 1e-12;

inline bool at_critical(double p, double pc) {
    return std::abs(p - pc) <= kCriticalRelTol * pc;
}

inline RegimeVerdict classify_regime(const RegimeParams& params) {
    validate(params);
    const double n = params.n, gamma = params.gamma, p = params.p;
    const double pc = p_crit(n, gamma);
    const double gt = gamma_tilde(n);
    const double lower = hls_lower(n, gamma);
    const double cap = gn_cap(n, params.s);

    const bool critical = at_critical(p, pc);
    const bool below = p < pc && !critical;
    const bool small_gamma = gamma <= gt;
    const bool above_lower = p >= lower;
    const bool under_cap = p <= cap;

    RegimeVerdict v;
    v.reasons = {
        {"p < p_crit(n,gamma)", below, p, pc},
        {"p = p_crit(n,gamma)", critical, p, pc},
        {"gamma <= gamma_tilde(n)", small_gamma, gamma, gt},
        {"p >= 1 + 2gamma/n", above_lower, p, lower},
        {"p <= n/(n-2s)", under_cap, p, cap},
    };

    if (critical) {
        v.regime = Regime::CriticalOpen;
    } else if (below) {
        v.regime = Regime::BlowUp;
    } else {
        const bool condition_p = small_gamma ? p > pc : above_lower;
        v.regime = (condition_p && under_cap) ? Regime::GlobalExistence : Regime::OutsideTheory;
    }
    return v;
}

struct Admissibility {
    bool admissible = false;
    std::vector<Reason> reasons;
};

/// Hypotheses under which the upper and lower lifespan bounds meet.
/// γ = n/2 is admitted as the formal L¹ boundary (γ < 2 stays strict).
inline Admissibility sharp_lifespan_admissible(const RegimeParams& params) {
    detail::require_dimension(params.n);
    if (!(params.gamma > 0.0)) throw DomainError("gamma must be positive");
    if (!(params.p > 1.0)) throw DomainError("p must exceed 1");
    const double n = params.n, gamma = params.gamma, p = params.p;
    const double pc = p_crit(n, gamma);
    const double lower = hls_lower(n, gamma);
    const double cap = n > 2.0 ? n / (n - 2.0) : std::numeric_limits<double>::infinity();

    Admissibility a;
    a.reasons = {
        {"gamma < 2", gamma < 2.0, gamma, 2.0},
        {"gamma <= n/2", gamma <= 0.5 * n, gamma, 0.5 * n},
        {"p < p_crit(n,gamma)", p < pc && !at_critical(p, pc), p, pc},
        {"p >= 1 + 2gamma/n", p >= lower, p, lower},
        {"p <= n/(n-2)_+", p <= cap, p, cap},
    };
    a.admissible = true;
    for (const auto& r : a.reasons) a.admissible = a.admissible && r.passed;
    return a;
}

/// Exponents of R in the test-function comparison: the data term grows like
/// R^{n/2-γ} (up to a log), the bound term like R^{n+2-2p'}.
struct TestFnExponents {
    double bound_exponent = 0.0;
    double data_exponent = 0.0;
    bool contradiction = false;  // bound_exponent < data_exponent
};

inline TestFnExponents testfn_exponents(double n, double gamma, double p) {
    detail::require_dimension(n);
    TestFnExponents e;
    e.bound_exponent = n + 2.0 - 2.0 * conjugate_exponent(p);
    e.data_exponent = 0.5 * n - gamma;
    e.contradiction = e.bound_exponent < e.data_exponent;
    return e;
}

}  // namespace critex
