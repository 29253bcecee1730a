#pragma once

// Mild-solution integrator for u_tt - Δu + u_t = |u|^p on a periodic grid.
//
// One step of size h from (û, û_t) with N̂₀ = F(|u|^p):
//   predictor  (û*, û_t*) = P(h)(û, û_t) + h (K̂1(h), ∂tK̂1(h)) N̂₀
//   corrector  û(t+h)   = [P(h)(û, û_t)]_u  + h/2 K̂1(h) N̂₀
//              û_t(t+h) = [P(h)(û, û_t)]_ut + h/2 (∂tK̂1(h) N̂₀ + N̂(u*))
// i.e. the trapezoid rule on the Duhamel integral; K̂1(0) = 0 removes the
// implicit endpoint from the û row.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "critex/error.hpp"
#include "critex/exponents.hpp"
#include "critex/propagator.hpp"
#include "critex/spectral_field.hpp"

namespace critex {

struct SolverConfig {
    double p = 2.0;
    double eps = 1.0;
    double dt = 0.05;
    double t_end = 10.0;
    bool dealias = true;
    double theta = 1e8;          // blow-up threshold on max|u|
    double growth_factor = 2.0;  // max|u| growth per step that triggers halving
    double dt_min_ratio = 1e-10;
    bool forcing = true;         // false: pure linear damped wave
    int history_samples = 64;

    void validate() const {
        if (!(p > 1.0)) throw DomainError("solver: p must exceed 1");
        if (!(eps >= 0.0)) throw DomainError("solver: eps must be >= 0");
        if (!(dt > 0.0)) throw DomainError("solver: dt must be positive");
        if (!(t_end > 0.0)) throw DomainError("solver: t_end must be positive");
        if (!(theta > 1.0)) throw DomainError("solver: theta must exceed 1");
        if (!(growth_factor > 1.0)) throw DomainError("solver: growth_factor must exceed 1");
        if (!(dt_min_ratio > 0.0 && dt_min_ratio < 1.0)) throw DomainError("solver: dt_min_ratio must lie in (0,1)");
        if (history_samples < 2) throw DomainError("solver: need at least 2 history samples");
    }
};

struct State {
    SpectrumField u_hat;
    SpectrumField ut_hat;
    double t = 0.0;
};

enum class RunStatus { Completed, BlowUp, StepUnderflow };

inline const char* to_string(RunStatus s) {
    switch (s) {
        case RunStatus::Completed: return "Completed";
        case RunStatus::BlowUp: return "BlowUp";
        case RunStatus::StepUnderflow: return "StepUnderflow";
    }
    return "?";
}

struct HistorySample {
    double t = 0.0;
    double l2 = 0.0;
    double hs = 0.0;
    double hneg = 0.0;  // Ḣ^{-γ} over the nonzero modes
    double maxabs = 0.0;
    double energy = 0.0;  // ½(‖u_t‖² + ‖∇u‖²)
};

struct RunResult {
    RunStatus status = RunStatus::Completed;
    double end_time = 0.0;  // blow-up time T for BlowUp/StepUnderflow
    std::vector<HistorySample> history;
    double weighted_sup = 0.0;
    long steps = 0;
    long rejected = 0;
};

struct NonlinearTerm {
    PhysicalField field;
    bool diverged = false;
};

/// Pointwise |u|^p; a non-finite input raises the diverged flag.
inline NonlinearTerm nonlinearity(const PhysicalField& u, double p) {
    NonlinearTerm out{{u.grid, std::vector<double>(u.values.size())}, false};
    for (std::size_t i = 0; i < u.values.size(); ++i) {
        const double v = u.values[i];
        if (!std::isfinite(v)) out.diverged = true;
        out.field.values[i] = p == 2.0 ? v * v : std::pow(std::abs(v), p);
    }
    return out;
}

class MildStepper {
public:
    struct Forcing {
        SpectrumField hat;
        double max_abs = 0.0;
        bool finite = true;
    };

    MildStepper(const GridSpec& grid, const SolverConfig& config) : grid_(grid), config_(config) {
        config_.validate();
        radius_.resize(grid.size());
        keep_.assign(grid.size(), 1);
        const int cutoff = grid.points / 3;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            radius_[i] = std::sqrt(grid.wavenumber_squared(i));
            const auto idx = grid.unflatten(i);
            for (int a = 0; a < grid.dim; ++a)
                if (std::abs(grid.mode(idx[a])) > cutoff) keep_[i] = 0;
        }
    }

    const GridSpec& grid() const { return grid_; }
    const SolverConfig& config() const { return config_; }

    /// N̂ = F(|u|^p) with u taken from (optionally dealiased) û; also reports max|u|.
    Forcing forcing(const SpectrumField& u_hat) {
        SpectrumField filtered = u_hat;
        if (config_.dealias) truncate(filtered);
        const PhysicalField u = transform_inverse(filtered);
        Forcing f;
        for (double v : u.values) {
            if (!std::isfinite(v)) f.finite = false;
            f.max_abs = std::max(f.max_abs, std::abs(v));
        }
        if (!f.finite) f.max_abs = std::numeric_limits<double>::infinity();
        if (!config_.forcing || !f.finite) {
            f.hat = SpectrumField::zeros(grid_);
            return f;
        }
        auto term = nonlinearity(u, config_.p);
        f.finite = !term.diverged;
        f.hat = transform_forward(term.field);
        if (config_.dealias) truncate(f.hat);
        return f;
    }

    /// Advance by h given the forcing of the current state.
    State advance(const State& s, const Forcing& f0, double h) {
        const auto& kernel = kernels(h);
        State pred{SpectrumField::zeros(grid_), SpectrumField::zeros(grid_), s.t + h};
        State next{SpectrumField::zeros(grid_), SpectrumField::zeros(grid_), s.t + h};
        for (std::size_t i = 0; i < grid_.size(); ++i) {
            const auto& m = kernel[i];
            const Complex u = s.u_hat[i], ut = s.ut_hat[i], n0 = f0.hat[i];
            const Complex lin_u = m.k00 * u + m.k01 * ut;
            const Complex lin_ut = m.k10 * u + m.k11 * ut;
            pred.u_hat[i] = lin_u + h * m.k01 * n0;
            next.u_hat[i] = lin_u + 0.5 * h * m.k01 * n0;
            next.ut_hat[i] = lin_ut + 0.5 * h * m.k11 * n0;
        }
        const Forcing fh = forcing(pred.u_hat);
        for (std::size_t i = 0; i < grid_.size(); ++i) next.ut_hat[i] += 0.5 * h * fh.hat[i];
        return next;
    }

    State step(const State& s, double h) {
        if (!(h > 0.0)) throw DomainError("step: h must be positive");
        return advance(s, forcing(s.u_hat), h);
    }

private:
    void truncate(SpectrumField& f) const {
        for (std::size_t i = 0; i < f.coeffs.size(); ++i)
            if (!keep_[i]) f.coeffs[i] = 0.0;
    }

    const std::vector<PropagatorMatrix>& kernels(double h) {
        for (auto& entry : cache_)
            if (entry.h == h) return entry.matrices;
        CacheEntry& slot = cache_[next_slot_];
        next_slot_ = (next_slot_ + 1) % cache_.size();
        slot.h = h;
        slot.matrices.resize(grid_.size());
        for (std::size_t i = 0; i < grid_.size(); ++i) slot.matrices[i] = propagator(h, radius_[i]);
        return slot.matrices;
    }

    struct CacheEntry {
        double h = -1.0;
        std::vector<PropagatorMatrix> matrices;
    };

    GridSpec grid_;
    SolverConfig config_;
    std::vector<double> radius_;
    std::vector<char> keep_;
    std::array<CacheEntry, 2> cache_{};
    std::size_t next_slot_ = 0;
};

/// One step of the scheme (builds a fresh stepper; prefer MildStepper in loops).
inline State step(const State& state, double h, const SolverConfig& config) {
    require_same_grid(state.u_hat.grid, state.ut_hat.grid);
    MildStepper stepper(state.u_hat.grid, config);
    return stepper.step(state, h);
}

inline State initial_state(const PhysicalField& u0, const PhysicalField& u1, double eps) {
    require_same_grid(u0.grid, u1.grid);
    State s{transform_forward(u0), transform_forward(u1), 0.0};
    for (auto& c : s.u_hat.coeffs) c *= eps;
    for (auto& c : s.ut_hat.coeffs) c *= eps;
    return s;
}

inline HistorySample measure(const State& s, double max_abs, double order_s, double gamma) {
    HistorySample h;
    h.t = s.t;
    h.l2 = l2_norm(s.u_hat);
    h.hs = std::sqrt(homogeneous_sum_nonzero(s.u_hat, order_s));
    h.hneg = std::sqrt(homogeneous_sum_nonzero(s.u_hat, -gamma));
    h.maxabs = max_abs;
    const double grad2 = homogeneous_sum_nonzero(s.u_hat, 1.0);
    double ut2 = 0.0;
    for (const auto& c : s.ut_hat.coeffs) ut2 += std::norm(c);
    h.energy = 0.5 * (ut2 + grad2);
    return h;
}

/// sup over samples of (1+t)^{γ/2}‖u‖_{L²} + (1+t)^{(s+γ)/2}‖u‖_{Ḣ^s}.
inline double weighted_norm(const HistorySample& h, double s, double gamma) {
    return std::pow(1.0 + h.t, 0.5 * gamma) * h.l2 + std::pow(1.0 + h.t, 0.5 * (s + gamma)) * h.hs;
}

/// History sample times: 0 then `count` geometric points ending at t_end.
inline std::vector<double> history_times(const SolverConfig& c) {
    const double first = std::min(c.dt, c.t_end / c.history_samples);
    std::vector<double> t{0.0};
    for (int i = 0; i < c.history_samples; ++i)
        t.push_back(first * std::pow(c.t_end / first, double(i) / (c.history_samples - 1)));
    t.back() = c.t_end;
    return t;
}

using StateObserver = std::function<void(const State&, const HistorySample&)>;

inline RunResult run(const SolverConfig& config, const PhysicalField& u0, const PhysicalField& u1, double order_s,
                     double gamma, const StateObserver& observer = {}) {
    config.validate();
    require_same_grid(u0.grid, u1.grid);
    if (u0.values.size() != u0.grid.size() || u1.values.size() != u1.grid.size())
        throw ContractViolation("run: sample count does not match grid");

    MildStepper stepper(u0.grid, config);
    State state = initial_state(u0, u1, config.eps);
    auto f0 = stepper.forcing(state.u_hat);

    RunResult result;
    auto record = [&]() {
        const auto h = measure(state, f0.max_abs, order_s, gamma);
        if (!result.history.empty() && h.t <= result.history.back().t) return;
        result.history.push_back(h);
        result.weighted_sup = std::max(result.weighted_sup, weighted_norm(h, order_s, gamma));
        if (observer) observer(state, h);
    };

    const auto samples = history_times(config);
    std::size_t next = 1;
    record();
    if (!f0.finite || f0.max_abs > config.theta) {
        result.status = RunStatus::BlowUp;
        result.end_time = 0.0;
        return result;
    }

    double h = config.dt;
    const double h_min = config.dt * config.dt_min_ratio;
    while (next < samples.size()) {
        const double target = samples[next];
        const double h_eff = std::min(h, target - state.t);
        State candidate = stepper.advance(state, f0, h_eff);
        auto f1 = stepper.forcing(candidate.u_hat);
        const bool finite = f1.finite && all_finite(candidate.ut_hat);
        const bool too_fast = f0.max_abs > 0.0 && f1.max_abs > config.growth_factor * f0.max_abs;
        if (!finite || too_fast) {
            ++result.rejected;
            h *= 0.5;
            if (h < h_min) {
                result.status = RunStatus::StepUnderflow;
                result.end_time = state.t;
                return result;
            }
            continue;
        }
        ++result.steps;
        state = std::move(candidate);
        f0 = std::move(f1);
        if (target - state.t <= 1e-12 * std::max(1.0, target)) {
            state.t = target;
            record();
            ++next;
        }
        if (f0.max_abs > config.theta) {
            record();
            result.status = RunStatus::BlowUp;
            result.end_time = state.t;
            return result;
        }
    }
    result.status = RunStatus::Completed;
    result.end_time = config.t_end;
    return result;
}

struct LifespanMeasurement {
    double time = std::numeric_limits<double>::infinity();  // +inf: no blow-up before t_end
    RunStatus status = RunStatus::Completed;
};

inline LifespanMeasurement measure_lifespan(SolverConfig config, const PhysicalField& u0, const PhysicalField& u1,
                                            double eps) {
    config.eps = eps;
    const auto r = run(config, u0, u1, 1.0, 0.5);
    if (r.status == RunStatus::Completed) return {std::numeric_limits<double>::infinity(), r.status};
    return {r.end_time, r.status};
}

}  // namespace critex
