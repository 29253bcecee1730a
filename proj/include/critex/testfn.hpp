#pragma once

// Test-function functional for a stored trajectory:
//   I_R = ∫∫ |u|^p φ_R(x) η(t/R²) dx dt,   φ_R(x) = ⟨x/R⟩^{-n},
// compared with the data term D_R = ε∫(u0+u1)φ_R dx and the bound term
// B_R = (C/p′) R^{n+2-2p′}.

#include <algorithm>
#include <cmath>
#include <vector>

#include "critex/error.hpp"
#include "critex/exponents.hpp"
#include "critex/spectral_field.hpp"

namespace critex {

namespace detail {
inline double smooth_step_piece(double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; }
}  // namespace detail

/// 1 on [0, 1/2], 0 on [1, ∞), C^∞ and nonincreasing in between.
inline double cutoff(double t) {
    if (t <= 0.5) return 1.0;
    if (t >= 1.0) return 0.0;
    const double y = 2.0 * t - 1.0;
    const double a = detail::smooth_step_piece(1.0 - y);
    const double b = detail::smooth_step_piece(y);
    return a / (a + b);
}

/// ⟨x/R⟩^{-n} on the grid, x measured from the box centre.
inline std::vector<double> spatial_weight(const GridSpec& grid, double R) {
    if (!(R > 0.0)) throw DomainError("spatial_weight: R must be positive");
    std::vector<double> w(grid.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
        const auto idx = grid.unflatten(i);
        double r2 = 0.0;
        for (int a = 0; a < grid.dim; ++a) {
            const double x = grid.coordinate(idx[a]);
            r2 += x * x;
        }
        w[i] = std::pow(1.0 + r2 / (R * R), -0.5 * grid.dim);
    }
    return w;
}

/// Snapshots of û at increasing times starting from 0.
struct Trajectory {
    GridSpec grid;
    std::vector<double> times;
    std::vector<SpectrumField> snapshots;
};

struct TestFnInput {
    Trajectory trajectory;
    PhysicalField data_sum;  // u0 + u1 before scaling by eps
    double eps = 1.0;
    double p = 2.0;
    double gamma = 0.5;
};

struct TestFnRow {
    double R = 0.0;
    double functional = 0.0;  // I_R
    double data_term = 0.0;   // D_R
    double bound_term = 0.0;  // B_R
    bool contradiction = false;  // D_R > B_R
};

struct TestFnReport {
    double n = 1.0;
    double gamma = 0.5;
    double p = 2.0;
    TestFnExponents exponents;
    double constant = 0.0;  // C, fixed at the first R
    std::vector<TestFnRow> rows;
};

inline void validate(const Trajectory& tr) {
    if (tr.times.size() != tr.snapshots.size() || tr.times.empty())
        throw ContractViolation("trajectory needs one snapshot per time");
    if (tr.times.front() != 0.0) throw DomainError("trajectory must start at t = 0");
    for (std::size_t i = 1; i < tr.times.size(); ++i)
        if (!(tr.times[i] > tr.times[i - 1])) throw DomainError("trajectory times must increase");
    for (const auto& s : tr.snapshots) require_same_grid(tr.grid, s.grid);
}

inline TestFnReport evaluate_testfn_functional(const TestFnInput& in, const std::vector<double>& radii) {
    const auto& tr = in.trajectory;
    validate(tr);
    require_same_grid(tr.grid, in.data_sum.grid);
    if (radii.empty()) throw DomainError("testfn: no radii given");
    for (double R : radii) {
        if (!(R >= 1.0)) throw DomainError("testfn: radii must be >= 1");
        if (tr.times.back() < R * R * (1.0 - 1e-12))
            throw DomainError("testfn: trajectory ends at t = " + std::to_string(tr.times.back()) +
                              ", before R^2 = " + std::to_string(R * R));
    }

    const double n = tr.grid.dim;
    const double dv = tr.grid.cell_volume();
    TestFnReport report;
    report.n = n;
    report.gamma = in.gamma;
    report.p = in.p;
    report.exponents = testfn_exponents(n, in.gamma, in.p);
    const double pp = conjugate_exponent(in.p);

    std::vector<std::vector<double>> powers;
    powers.reserve(tr.snapshots.size());
    for (const auto& snap : tr.snapshots) {
        auto u = transform_inverse(snap);
        for (auto& v : u.values) v = std::pow(std::abs(v), in.p);
        powers.push_back(std::move(u.values));
    }

    for (double R : radii) {
        const auto w = spatial_weight(tr.grid, R);
        std::vector<double> g(tr.times.size(), 0.0);
        for (std::size_t j = 0; j < tr.times.size(); ++j) {
            const double eta = cutoff(tr.times[j] / (R * R));
            if (eta == 0.0) continue;
            double sum = 0.0;
            for (std::size_t i = 0; i < w.size(); ++i) sum += powers[j][i] * w[i];
            g[j] = eta * sum * dv;
        }
        TestFnRow row;
        row.R = R;
        for (std::size_t j = 1; j < g.size(); ++j) row.functional += 0.5 * (g[j] + g[j - 1]) * (tr.times[j] - tr.times[j - 1]);
        double data = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i) data += in.data_sum.values[i] * w[i];
        row.data_term = in.eps * data * dv;
        report.rows.push_back(row);
    }

    const double scale0 = std::pow(radii.front(), report.exponents.bound_exponent);
    report.constant = pp * report.rows.front().data_term / scale0;
    for (auto& row : report.rows) {
        row.bound_term = report.constant / pp * std::pow(row.R, report.exponents.bound_exponent);
        row.contradiction = row.data_term > row.bound_term * (1.0 + 1e-12);
    }
    return report;
}

}  // namespace critex
