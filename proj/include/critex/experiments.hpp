#pragma once

// Experiment drivers: linear decay and diffusion suites on radial data,
// lifespan sweeps of the grid solver, and the (γ, p) region map.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "critex/error.hpp"
#include "critex/exponents.hpp"
#include "critex/radial.hpp"
#include "critex/solver.hpp"

namespace critex {

// ---------------------------------------------------------------------------
// Textual specs: "kind:key=value,key=value".

struct ParsedSpec {
    std::string kind;
    std::map<std::string, double> values;

    double get(const std::string& key, double fallback) const {
        auto it = values.find(key);
        return it == values.end() ? fallback : it->second;
    }
};

inline ParsedSpec parse_spec(const std::string& text) {
    ParsedSpec out;
    const auto colon = text.find(':');
    out.kind = text.substr(0, colon);
    if (out.kind.empty()) throw DomainError("empty spec '" + text + "'");
    if (colon == std::string::npos) return out;
    std::stringstream rest(text.substr(colon + 1));
    std::string item;
    while (std::getline(rest, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0) throw DomainError("malformed spec entry '" + item + "'");
        const std::string key = item.substr(0, eq);
        const std::string value = item.substr(eq + 1);
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(value, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != value.size() || value.empty())
            throw DomainError("spec entry '" + item + "' is not numeric");
        out.values[key] = v;
    }
    return out;
}

struct ProfileSpec {
    enum class Kind { PowerLaw, Gaussian };
    Kind kind = Kind::PowerLaw;
    double param = 0.25;  // a for the power law, w for the gaussian
};

/// "powerlaw:a=0.25" or "gaussian:w=1".
inline ProfileSpec parse_profile(const std::string& text) {
    const auto s = parse_spec(text);
    if (s.kind == "powerlaw") {
        if (!s.values.count("a")) throw DomainError("powerlaw profile needs a=<exponent>");
        return {ProfileSpec::Kind::PowerLaw, s.get("a", 0.0)};
    }
    if (s.kind == "gaussian") return {ProfileSpec::Kind::Gaussian, s.get("w", 1.0)};
    throw DomainError("unknown profile '" + s.kind + "' (expected powerlaw or gaussian)");
}

inline std::string to_string(const ProfileSpec& p) {
    std::ostringstream os;
    os.precision(17);
    if (p.kind == ProfileSpec::Kind::PowerLaw)
        os << "powerlaw:a=" << p.param;
    else
        os << "gaussian:w=" << p.param;
    return os.str();
}

/// "paper:eps1=1,gamma=0.5", "gaussian:A=1,w=1", "mode:k=1,A=1" (k per axis via k,k2,k3).
inline InitialDataKind parse_initial_data(const std::string& text, double default_gamma) {
    const auto s = parse_spec(text);
    if (s.kind == "paper") return PaperProfileData{s.get("eps1", 1.0), s.get("gamma", default_gamma)};
    if (s.kind == "gaussian") return GaussianData{s.get("A", 1.0), s.get("w", 1.0)};
    if (s.kind == "mode") {
        SingleModeData m;
        m.mode = {static_cast<int>(s.get("k", 1.0)), static_cast<int>(s.get("k2", 0.0)),
                  static_cast<int>(s.get("k3", 0.0))};
        m.amplitude = s.get("A", 1.0);
        return m;
    }
    throw DomainError("unknown initial data '" + s.kind + "' (expected paper, gaussian or mode)");
}

inline std::string to_string(const InitialDataKind& kind) {
    std::ostringstream os;
    os.precision(17);
    std::visit(
        [&](const auto& k) {
            using K = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<K, PaperProfileData>)
                os << "paper:eps1=" << k.eps1 << ",gamma=" << k.gamma;
            else if constexpr (std::is_same_v<K, GaussianData>)
                os << "gaussian:A=" << k.amplitude << ",w=" << k.width;
            else
                os << "mode:k=" << k.mode[0] << ",k2=" << k.mode[1] << ",k3=" << k.mode[2] << ",A=" << k.amplitude;
        },
        kind);
    return os.str();
}

// ---------------------------------------------------------------------------
// Linear suites on radial data.

inline constexpr double kDecaySlopeTolerance = 0.03;
inline constexpr double kNonlinearRateTolerance = 0.05;
inline constexpr double kGainUpper = -0.85;
inline constexpr double kGainLower = -1.3;

struct LinearSuiteConfig {
    double n = 2.0;
    double gamma = 0.7;
    double s = 1.0;
    ProfileSpec profile;
    double v1_scale = 0.0;  // v̂1 = v1_scale · v̂0
    double t_lo = 1e2;
    double t_hi = 1e4;
    int per_decade = 16;
    RadialGrid grid;

    void validate() const {
        if (!(n >= 1.0)) throw DomainError("linear suite: n must be >= 1");
        if (!(gamma > 0.0 && gamma < 0.5 * n)) throw DomainError("linear suite: gamma must lie in (0, n/2)");
        if (!(s >= 0.0 && s <= 1.0)) throw DomainError("linear suite: s must lie in [0, 1]");
        if (!(t_lo > 0.0 && t_hi > t_lo)) throw DomainError("linear suite: need 0 < t_lo < t_hi");
        if (per_decade < 2) throw DomainError("linear suite: need at least 2 samples per decade");
        if (profile.kind == ProfileSpec::Kind::PowerLaw && !(profile.param < 0.5 * n - gamma))
            throw DomainError("power-law data r^-a lies in the negative-order space only for a < n/2 - gamma");
        if (profile.kind == ProfileSpec::Kind::Gaussian && !(profile.param > 0.0))
            throw DomainError("gaussian profile width must be positive");
    }
};

inline RadialProfile make_profile(const ProfileSpec& spec, double n, const RadialGrid& grid) {
    return spec.kind == ProfileSpec::Kind::PowerLaw ? power_law_profile(n, spec.param, grid)
                                                    : gaussian_profile(n, spec.param, grid);
}

/// 0 followed by geometric times from min(1, t_lo) to t_hi.
inline std::vector<double> suite_times(const LinearSuiteConfig& c) {
    const double first = std::min(1.0, c.t_lo);
    const int count = static_cast<int>(std::lround(c.per_decade * std::log10(c.t_hi / first))) + 1;
    return geometric_times(first, c.t_hi, std::max(count, 2), true);
}

/// Large-time L²-type rate of the data family at order s: -(n/2 - a + s)/2, or -(n/2 + s)/2 for the gaussian.
inline double family_rate(const LinearSuiteConfig& c, double order) {
    const double low = c.profile.kind == ProfileSpec::Kind::PowerLaw ? 0.5 * c.n - c.profile.param : 0.5 * c.n;
    return -0.5 * (low + order);
}

struct FitReport {
    RateFit fit;
    double predicted_rate = 0.0;  // asymptotic rate of the data family
    double bound_rate = 0.0;      // -(order + γ)/2
    bool meets_bound = false;     // slope <= bound_rate + tolerance
};

inline FitReport make_fit_report(const DecayCurve& curve, const LinearSuiteConfig& c) {
    FitReport r;
    r.fit = fit_rate(curve, c.t_lo, c.t_hi);
    r.predicted_rate = family_rate(c, curve.s);
    r.bound_rate = -0.5 * (curve.s + c.gamma);
    r.meets_bound = r.fit.slope <= r.bound_rate + kDecaySlopeTolerance;
    return r;
}

/// Linear-vs-nonlinear comparison on the grid.
struct NonlinearCheck {
    GridSpec grid{1, 4096, 200.0 * std::numbers::pi};
    SolverConfig solver;
    InitialDataKind u0 = PaperProfileData{1.0, 0.3};
    InitialDataKind u1 = PaperProfileData{1.0, 0.3};
    double t_lo = 10.0;
    double t_hi = 1e3;
};

struct NonlinearComparison {
    RunResult nonlinear;
    RunResult linear;
    RateFit nonlinear_l2, linear_l2, nonlinear_hs, linear_hs;
    double rate_gap = 0.0;  // max |nonlinear slope - linear slope|
    bool consistent = false;
};

struct DecaySuiteResult {
    std::vector<DecayCurve> curves;  // damped at order 0 and at order s
    FitReport l2;
    FitReport hs;
    std::optional<NonlinearComparison> nonlinear;
};

inline NonlinearComparison compare_with_linear(const NonlinearCheck& check, double s, double gamma) {
    const auto u0 = make_initial_data(check.u0, check.grid);
    const auto u1 = make_initial_data(check.u1, check.grid);
    SolverConfig lin = check.solver;
    lin.forcing = false;
    NonlinearComparison out;
    out.nonlinear = run(check.solver, u0, u1, s, gamma);
    out.linear = run(lin, u0, u1, s, gamma);
    auto series = [](const RunResult& r, bool hs) {
        std::vector<double> t, v;
        for (const auto& h : r.history) {
            t.push_back(h.t);
            v.push_back(hs ? h.hs : h.l2);
        }
        return std::pair{t, v};
    };
    auto fit = [&](const RunResult& r, bool hs) {
        auto [t, v] = series(r, hs);
        return fit_rate(t, v, check.t_lo, check.t_hi);
    };
    if (out.nonlinear.status != RunStatus::Completed) {
        out.consistent = false;
        out.rate_gap = std::numeric_limits<double>::infinity();
        return out;
    }
    out.nonlinear_l2 = fit(out.nonlinear, false);
    out.linear_l2 = fit(out.linear, false);
    out.nonlinear_hs = fit(out.nonlinear, true);
    out.linear_hs = fit(out.linear, true);
    out.rate_gap = std::max(std::abs(out.nonlinear_l2.slope - out.linear_l2.slope),
                            std::abs(out.nonlinear_hs.slope - out.linear_hs.slope));
    out.consistent = std::isfinite(out.nonlinear.weighted_sup) && out.rate_gap <= kNonlinearRateTolerance;
    return out;
}

inline DecaySuiteResult run_decay_suite(const LinearSuiteConfig& c,
                                        const std::optional<NonlinearCheck>& nonlinear = std::nullopt) {
    c.validate();
    const auto v0 = make_profile(c.profile, c.n, c.grid);
    auto v1 = v0;
    for (auto& v : v1.values) v *= c.v1_scale;
    const auto times = suite_times(c);
    DecaySuiteResult out;
    out.curves.push_back(evolve_damped(v0, v1, times, 0.0, c.gamma));
    out.curves.push_back(evolve_damped(v0, v1, times, c.s, c.gamma));
    out.l2 = make_fit_report(out.curves[0], c);
    out.hs = make_fit_report(out.curves[1], c);
    if (nonlinear) out.nonlinear = compare_with_linear(*nonlinear, c.s, c.gamma);
    return out;
}

struct DiffusionSuiteResult {
    std::vector<DecayCurve> curves;  // damped, heat, difference at order s
    FitReport damped;
    FitReport heat;
    RateFit difference;
    double gain = 0.0;  // slope(difference) - slope(damped)
    bool gain_in_window = false;
};

inline DiffusionSuiteResult run_diffusion_suite(const LinearSuiteConfig& c) {
    c.validate();
    const auto v0 = make_profile(c.profile, c.n, c.grid);
    auto v1 = v0;
    for (auto& v : v1.values) v *= c.v1_scale;
    const auto times = suite_times(c);
    DiffusionSuiteResult out;
    out.curves.push_back(evolve_damped(v0, v1, times, c.s, c.gamma));
    out.curves.push_back(evolve_heat(v0, v1, times, c.s, c.gamma));
    out.curves.push_back(diffusion_difference(v0, v1, times, c.s, c.gamma));
    out.damped = make_fit_report(out.curves[0], c);
    out.heat = make_fit_report(out.curves[1], c);
    out.difference = fit_rate(out.curves[2], c.t_lo, c.t_hi);
    out.gain = out.difference.slope - out.damped.fit.slope;
    out.gain_in_window = out.gain >= kGainLower && out.gain <= kGainUpper;
    return out;
}

// ---------------------------------------------------------------------------
// Lifespan sweeps.

struct LifespanSweepConfig {
    RegimeParams params{1.0, 0.5, 1.0, 2.0, std::nullopt};
    double eps_start = 1e-2;
    double eps_factor = std::pow(10.0, -1.0 / 7.0);  // 8 points span one decade
    int count = 8;
    GridSpec grid{1, 8192, 800.0 * std::numbers::pi};
    SolverConfig solver = [] {
        SolverConfig s;
        s.dt = 1.0;
        s.t_end = 2e5;
        return s;
    }();
    std::optional<InitialDataKind> u0;  // default: paper profile with the sweep's gamma
    std::optional<InitialDataKind> u1;
    int workers = 1;

    std::vector<double> schedule() const {
        std::vector<double> e(count);
        for (int i = 0; i < count; ++i) e[i] = eps_start * std::pow(eps_factor, i);
        return e;
    }

    void validate() const {
        if (count < 1) throw DomainError("lifespan sweep: count must be >= 1");
        if (!(eps_start > 0.0)) throw DomainError("lifespan sweep: eps_start must be positive");
        if (!(eps_factor > 0.0) || eps_factor == 1.0)
            throw DomainError("lifespan sweep: eps_factor must be positive and != 1");
        if (workers < 1) throw DomainError("lifespan sweep: workers must be >= 1");
        if (params.n != static_cast<double>(grid.dim))
            throw DomainError("lifespan sweep: n must equal the grid dimension");
        solver.validate();
    }
};

struct SweepRow {
    double eps = 0.0;
    double lifespan = std::numeric_limits<double>::infinity();
    RunStatus status = RunStatus::Completed;
};

struct PowerFit {
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0;
    int samples = 0;
};

/// Least squares of log T against log ε.
inline PowerFit fit_power_law(const std::vector<double>& eps, const std::vector<double>& T) {
    if (eps.size() != T.size()) throw ContractViolation("fit_power_law: size mismatch");
    if (eps.size() < 2) throw InsufficientDataError("fit_power_law: need at least 2 points");
    const double m = static_cast<double>(eps.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < eps.size(); ++i) {
        if (!(eps[i] > 0.0) || !(T[i] > 0.0) || !std::isfinite(T[i]))
            throw DomainError("fit_power_law: values must be positive and finite");
        mx += std::log(eps[i]);
        my += std::log(T[i]);
    }
    mx /= m;
    my /= m;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < eps.size(); ++i) {
        const double dx = std::log(eps[i]) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log(T[i]) - my);
    }
    if (!(sxx > 0.0)) throw DomainError("fit_power_law: eps values must differ");
    PowerFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ss = 0.0;
    for (std::size_t i = 0; i < eps.size(); ++i) {
        const double e = std::log(T[i]) - (f.intercept + f.slope * std::log(eps[i]));
        ss += e * e;
    }
    f.residual = std::sqrt(ss / m);
    f.samples = static_cast<int>(eps.size());
    return f;
}

inline constexpr int kMinSweepBlowups = 4;

struct SweepResult {
    std::vector<SweepRow> rows;
    std::optional<PowerFit> fit;
    std::optional<double> predicted_slope;
    std::optional<double> relative_deviation;
    int monotone_violations = 0;  // pairs where larger eps lives longer
    std::string verdict;          // "BlowUp" or "GlobalExistence-consistent"
};

inline bool is_blowup(RunStatus s) { return s == RunStatus::BlowUp || s == RunStatus::StepUnderflow; }

/// Lifespans for each eps, run on `workers` threads and returned in schedule order.
inline std::vector<SweepRow> measure_schedule(const LifespanSweepConfig& c, const PhysicalField& u0,
                                              const PhysicalField& u1) {
    const auto eps = c.schedule();
    std::vector<SweepRow> rows(eps.size());
    std::vector<std::exception_ptr> errors(eps.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t i = next++; i < eps.size(); i = next++) {
            try {
                const auto m = measure_lifespan(c.solver, u0, u1, eps[i]);
                rows[i] = {eps[i], m.time, m.status};
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const int threads = std::min<int>(c.workers, static_cast<int>(eps.size()));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (int k = 0; k < threads; ++k) pool.emplace_back(worker);
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return rows;
}

inline SweepResult run_lifespan_sweep(const LifespanSweepConfig& c) {
    c.validate();
    const auto& P = c.params;
    if (!(P.gamma > 0.0 && P.gamma <= 0.5 * P.n)) throw DomainError("lifespan sweep: gamma must lie in (0, n/2]");
    if (!(P.p > 1.0)) throw DomainError("lifespan sweep: p must exceed 1");
    const double pc = p_crit(P.n, P.gamma);
    const bool subcritical = P.p < pc;
    if (at_critical(P.p, pc)) throw DomainError("lifespan sweep: p = p_crit is not covered");
    if (subcritical) {
        const auto adm = sharp_lifespan_admissible(P);
        if (!adm.admissible) {
            std::string failed;
            for (const auto& r : adm.reasons)
                if (!r.passed) failed += (failed.empty() ? "" : ", ") + r.name;
            throw DomainError("lifespan sweep: parameters fail the sharp-lifespan conditions: " + failed);
        }
    }

    const auto u0 = make_initial_data(c.u0.value_or(PaperProfileData{1.0, P.gamma}), c.grid);
    const auto u1 = make_initial_data(c.u1.value_or(PaperProfileData{1.0, P.gamma}), c.grid);

    SweepResult out;
    out.rows = measure_schedule(c, u0, u1);

    std::vector<std::size_t> order(out.rows.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return out.rows[a].eps < out.rows[b].eps; });
    for (std::size_t k = 1; k < order.size(); ++k)
        if (out.rows[order[k]].lifespan > out.rows[order[k - 1]].lifespan) ++out.monotone_violations;

    std::vector<double> eps, T;
    for (const auto& r : out.rows)
        if (is_blowup(r.status)) {
            eps.push_back(r.eps);
            T.push_back(r.lifespan);
        }
    if (eps.empty()) {
        out.verdict = "GlobalExistence-consistent";
        return out;
    }
    if (static_cast<int>(eps.size()) < kMinSweepBlowups)
        throw InsufficientDataError("lifespan sweep: only " + std::to_string(eps.size()) +
                                    " blow-up rows, need at least " + std::to_string(kMinSweepBlowups));
    out.verdict = "BlowUp";
    out.fit = fit_power_law(eps, T);
    if (subcritical) {
        out.predicted_slope = lifespan_exponent(P.p, P.n, P.gamma);
        out.relative_deviation = std::abs(out.fit->slope - *out.predicted_slope) / std::abs(*out.predicted_slope);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Region map in the (γ, p) plane.

struct PhaseCell {
    double gamma = 0.0;
    double p = 0.0;
    RegimeVerdict verdict;
    double p_crit = 0.0;
    double p_lower = 0.0;  // 1 + 2γ/n
    double p_cap = 0.0;    // n/(n-2s), +inf when n <= 2s
};

struct PhaseDiagram {
    double n = 1.0;
    double s = 1.0;
    double gamma_tilde = 0.0;
    std::vector<PhaseCell> cells;
};

inline std::vector<double> linspace(double lo, double hi, int steps) {
    if (steps < 1) throw DomainError("linspace: steps must be >= 1");
    if (steps == 1) return {lo};
    std::vector<double> v(steps);
    for (int i = 0; i < steps; ++i) v[i] = lo + (hi - lo) * i / (steps - 1);
    v.back() = hi;
    return v;
}

inline PhaseDiagram emit_phase_diagram(double n, double s, const std::vector<double>& gammas,
                                       const std::vector<double>& ps) {
    for (double g : gammas)
        if (!(g > 0.0 && g < 0.5 * n)) throw DomainError("phase diagram: gamma grid must lie in (0, n/2)");
    for (double p : ps)
        if (!(p > 1.0)) throw DomainError("phase diagram: p grid must lie above 1");
    PhaseDiagram d;
    d.n = n;
    d.s = s;
    d.gamma_tilde = gamma_tilde(n);
    const double cap = n > 2.0 * s ? n / (n - 2.0 * s) : std::numeric_limits<double>::infinity();
    for (double g : gammas)
        for (double p : ps) {
            PhaseCell cell;
            cell.gamma = g;
            cell.p = p;
            cell.verdict = classify_regime({n, g, s, p, std::nullopt});
            cell.p_crit = p_crit(n, g);
            cell.p_lower = 1.0 + 2.0 * g / n;
            cell.p_cap = cap;
            d.cells.push_back(cell);
        }
    return d;
}

}  // namespace critex
