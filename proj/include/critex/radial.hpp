#pragma once

// Linear experiments in any (real) dimension n on radial spectral data.
// Norms use radial Plancherel,
//   ‖v‖²_{Ḣ^s} = σ_{n-1} ∫ r^{2s+n-1} |v̂(r)|² dr,   σ_{n-1} = 2π^{n/2}/Γ(n/2),
// integrated with the trapezoid rule in log r plus a power-law tail below r_min.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "critex/error.hpp"
#include "critex/propagator.hpp"

namespace critex {

struct RadialGrid {
    double r_min = 1e-6;
    double r_max = 1e3;
    int points = 4096;
};

inline std::vector<double> log_spaced(const RadialGrid& g) {
    if (!(g.r_min > 0.0) || !(g.r_max > g.r_min) || g.points < 2)
        throw DomainError("radial grid needs 0 < r_min < r_max and >= 2 points");
    std::vector<double> r(g.points);
    const double lo = std::log(g.r_min), hi = std::log(g.r_max);
    for (int i = 0; i < g.points; ++i) r[i] = std::exp(lo + (hi - lo) * i / (g.points - 1));
    r.front() = g.r_min;
    r.back() = g.r_max;
    return r;
}

struct RadialProfile {
    double n = 1.0;
    std::vector<double> r;
    std::vector<Complex> values;

    /// Samples `f` on `r`. Validates monotonicity and finiteness.
    static RadialProfile sample(double n, std::vector<double> r, const std::function<Complex(double)>& f) {
        RadialProfile p{n, std::move(r), {}};
        p.values.reserve(p.r.size());
        for (double x : p.r) p.values.push_back(f(x));
        p.validate();
        return p;
    }

    void validate() const {
        if (!(n >= 1.0)) throw DomainError("radial profile dimension must be >= 1");
        if (r.size() != values.size() || r.size() < 2) throw ContractViolation("radial profile size mismatch");
        if (!(r.front() > 0.0)) throw DomainError("radial grid must start above 0");
        for (std::size_t i = 1; i < r.size(); ++i)
            if (!(r[i] > r[i - 1])) throw DomainError("radial grid must be strictly increasing");
        for (const auto& v : values)
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
                throw DomainError("radial profile has non-finite values");
    }
};

/// v̂ = r^{-a} on (0,1), 0 beyond; |v̂|² = 1/2 at r = 1 so the trapezoid sees the jump midpoint.
inline RadialProfile power_law_profile(double n, double a, const RadialGrid& grid = {}) {
    return RadialProfile::sample(n, log_spaced(grid), [a](double r) -> Complex {
        if (std::abs(r - 1.0) < 1e-12) return std::sqrt(0.5);
        return r < 1.0 ? std::pow(r, -a) : 0.0;
    });
}

/// Unitary Fourier transform of exp(-|x|²/(2w²)) in dimension n: w^n e^{-w²r²/2}.
inline RadialProfile gaussian_profile(double n, double width, const RadialGrid& grid = {}) {
    if (!(width > 0.0)) throw DomainError("gaussian profile width must be positive");
    return RadialProfile::sample(n, log_spaced(grid), [n, width](double r) -> Complex {
        return std::pow(width, n) * std::exp(-0.5 * width * width * r * r);
    });
}

inline double sphere_area(double n) { return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n); }

/// Endpoint share of the log-measure integrand above which truncation is refused.
inline constexpr double kEndpointPlateau = 1e-2;
inline constexpr double kEndpointGrowth = 1e-8;

namespace detail {
/// Local power r^α of f between samples i and i+1; NaN unless both are positive.
inline double local_power(const std::vector<double>& r, const std::vector<double>& f, std::size_t i) {
    if (!(f[i] > 0.0) || !(f[i + 1] > 0.0)) return std::nan("");
    return std::log(f[i + 1] / f[i]) / std::log(r[i + 1] / r[i]);
}

/// A left end that is a clean growing power law is integrated exactly by lower_tail.
inline bool power_law_start(const std::vector<double>& r, const std::vector<double>& f) {
    if (f.size() < 3) return false;
    const double a0 = local_power(r, f, 0), a1 = local_power(r, f, 1);
    return a0 > 0.0 && std::abs(a0 - a1) <= 1e-3 * a0;
}

inline void check_endpoints(const std::vector<double>& r, const std::vector<double>& f) {
    const double peak = *std::max_element(f.begin(), f.end());
    if (peak <= 0.0) return;
    const std::size_t last = f.size() - 1;
    auto suspicious = [&](double end, double inner) {
        return end > kEndpointPlateau * peak || (end > kEndpointGrowth * peak && end >= inner);
    };
    if (suspicious(f[0], f[1]) && !power_law_start(r, f))
        throw AccuracyError("radial integrand does not decay toward r_min; extend the grid or drop the order");
    if (suspicious(f[last], f[last - 1]))
        throw AccuracyError("radial integrand does not decay toward r_max; extend the grid or drop the order");
}

/// ∫_0^{r_0} f d(log r) for f ~ f_0 (r/r_0)^α, α read off the first two samples.
inline double lower_tail(const std::vector<double>& r, const std::vector<double>& f) {
    const double alpha = local_power(r, f, 0);
    return alpha > 0.0 ? f[0] / alpha : 0.0;
}
}  // namespace detail

inline double norm_radial(const RadialProfile& profile, double s) {
    const auto& r = profile.r;
    std::vector<double> f(r.size());
    for (std::size_t i = 0; i < r.size(); ++i)
        f[i] = std::pow(r[i], 2.0 * s + profile.n) * std::norm(profile.values[i]);
    detail::check_endpoints(r, f);
    double sum = detail::lower_tail(r, f);
    for (std::size_t i = 1; i < r.size(); ++i) sum += 0.5 * (f[i] + f[i - 1]) * std::log(r[i] / r[i - 1]);
    return std::sqrt(sphere_area(profile.n) * sum);
}

struct DecayCurve {
    std::string kind;
    double s = 0.0;
    double gamma = 0.0;
    std::vector<double> times;
    std::vector<double> norms;
};

inline std::vector<double> geometric_times(double t_first, double t_last, int count, bool with_zero = true) {
    if (!(t_first > 0.0) || !(t_last > t_first) || count < 2)
        throw DomainError("geometric_times needs 0 < t_first < t_last and count >= 2");
    std::vector<double> t;
    if (with_zero) t.push_back(0.0);
    for (int i = 0; i < count; ++i) t.push_back(t_first * std::pow(t_last / t_first, double(i) / (count - 1)));
    t.back() = t_last;
    return t;
}

namespace detail {
inline void require_times(const std::vector<double>& times) {
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!(times[i] >= 0.0)) throw DomainError("sample times must be >= 0");
        if (i > 0 && !(times[i] > times[i - 1])) throw DomainError("sample times must increase");
    }
}
inline void require_pair(const RadialProfile& v0, const RadialProfile& v1) {
    if (v0.r != v1.r || v0.n != v1.n) throw ContractViolation("radial profiles must share grid and dimension");
}

template <class Multiplier>
DecayCurve evolve_with(const char* kind, const RadialProfile& v0, const RadialProfile& v1,
                       const std::vector<double>& times, double s, double gamma, Multiplier&& mult) {
    require_pair(v0, v1);
    require_times(times);
    DecayCurve curve{kind, s, gamma, times, {}};
    curve.norms.reserve(times.size());
    RadialProfile v = v0;
    for (double t : times) {
        for (std::size_t i = 0; i < v.r.size(); ++i) v.values[i] = mult(t, v.r[i], v0.values[i], v1.values[i]);
        curve.norms.push_back(norm_radial(v, s));
    }
    return curve;
}
}  // namespace detail

/// ‖K̂0 v̂0 + K̂1 v̂1‖_{Ḣ^s} at each time.
inline DecayCurve evolve_damped(const RadialProfile& v0, const RadialProfile& v1, const std::vector<double>& times,
                                double s, double gamma) {
    return detail::evolve_with("damped", v0, v1, times, s, gamma, [](double t, double r, Complex a, Complex b) {
        const auto m = propagator(t, r);
        return m.k00 * a + m.k01 * b;
    });
}

/// ‖e^{-r²t}(v̂0 + v̂1)‖_{Ḣ^s} at each time.
inline DecayCurve evolve_heat(const RadialProfile& v0, const RadialProfile& v1, const std::vector<double>& times,
                              double s, double gamma) {
    return detail::evolve_with("heat", v0, v1, times, s, gamma, [](double t, double r, Complex a, Complex b) {
        return heat_multiplier(t, r) * (a + b);
    });
}

/// ‖v̂(t) - ŵ(t)‖_{Ḣ^s}: damped wave minus heat solution with data v0 + v1.
inline DecayCurve diffusion_difference(const RadialProfile& v0, const RadialProfile& v1,
                                       const std::vector<double>& times, double s, double gamma) {
    return detail::evolve_with("difference", v0, v1, times, s, gamma,
                               [](double t, double r, Complex a, Complex b) {
                                   const auto m = propagator(t, r);
                                   return m.k00 * a + m.k01 * b - heat_multiplier(t, r) * (a + b);
                               });
}

struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;
    double t_lo = 0.0;
    double t_hi = 0.0;
    double residual = 0.0;  // rms of log-residuals
    int samples = 0;
};

inline constexpr int kMinFitSamples = 8;

/// Least squares of log(norm) against log(1+t) over samples with t in [t_lo, t_hi].
inline RateFit fit_rate(const std::vector<double>& times, const std::vector<double>& norms, double t_lo,
                        double t_hi) {
    if (times.size() != norms.size()) throw ContractViolation("fit_rate: times and norms differ in length");
    if (!(t_hi > t_lo)) throw DomainError("fit_rate: empty window");
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] < t_lo || times[i] > t_hi) continue;
        if (!(norms[i] > 0.0) || !std::isfinite(norms[i]))
            throw DomainError("fit_rate: norms must be positive and finite inside the window");
        xs.push_back(std::log1p(times[i]));
        ys.push_back(std::log(norms[i]));
    }
    if (static_cast<int>(xs.size()) < kMinFitSamples)
        throw DomainError("fit_rate: need at least 8 samples in the window, got " + std::to_string(xs.size()));

    const double m = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= m;
    my /= m;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    RateFit fit;
    fit.slope = sxx > 0.0 ? sxy / sxx : 0.0;
    fit.intercept = my - fit.slope * mx;
    double ss = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double e = ys[i] - (fit.intercept + fit.slope * xs[i]);
        ss += e * e;
    }
    fit.residual = std::sqrt(ss / m);
    fit.t_lo = t_lo;
    fit.t_hi = t_hi;
    fit.samples = static_cast<int>(xs.size());
    return fit;
}

inline RateFit fit_rate(const DecayCurve& curve, double t_lo, double t_hi) {
    return fit_rate(curve.times, curve.norms, t_lo, t_hi);
}

}  // namespace critex
