#pragma once

// Run directories and their artifacts (CSV, JSON, binary snapshots).
//
// Layout: <root>/<YYYYMMDDTHHMMSSZ>-<kind>[-k]/ with config.json plus the
// kind's outputs. The root comes from CRITEX_OUT, default ./runs.

#include <charconv>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "critex/error.hpp"
#include "critex/experiments.hpp"
#include "critex/solver.hpp"
#include "critex/testfn.hpp"

namespace critex {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

/// Shortest round-trip decimal form; "inf", "-inf", "nan" for non-finite values.
inline std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

/// Non-finite numbers become null.
inline Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

inline fs::path output_root() {
    const char* env = std::getenv("CRITEX_OUT");
    return env && *env ? fs::path(env) : fs::path("runs");
}

inline std::string utc_stamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%SZ", &tm);
    return buf;
}

/// Creates a fresh run directory; a numeric suffix avoids collisions.
inline fs::path make_run_directory(const std::string& kind, const fs::path& root = output_root()) {
    fs::create_directories(root);
    const std::string base = utc_stamp() + "-" + kind;
    for (int k = 1;; ++k) {
        const fs::path dir = root / (k == 1 ? base : base + "-" + std::to_string(k));
        if (fs::create_directory(dir)) return dir;
    }
}

inline std::ofstream open_out(const fs::path& path, bool binary = false) {
    std::ofstream os(path, binary ? std::ios::binary : std::ios::out);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    return os;
}

inline void write_json(const fs::path& path, const Json& j) {
    auto os = open_out(path);
    os << j.dump(2) << '\n';
}

inline Json read_json(const fs::path& path) {
    std::ifstream is(path);
    if (!is) throw DomainError("cannot read " + path.string());
    return Json::parse(is);
}

// ---------------------------------------------------------------------------
// JSON views.

inline Json to_json(const Reason& r) {
    return {{"name", r.name}, {"passed", r.passed}, {"lhs", number(r.lhs)}, {"rhs", number(r.rhs)}};
}

inline Json to_json(const RegimeVerdict& v) {
    Json reasons = Json::array();
    for (const auto& r : v.reasons) reasons.push_back(to_json(r));
    return {{"regime", to_string(v.regime)}, {"reasons", reasons}};
}

inline Json to_json(const RateFit& f, double predicted_rate) {
    return {{"slope", number(f.slope)},         {"intercept", number(f.intercept)}, {"t_lo", f.t_lo},
            {"t_hi", f.t_hi},                   {"residual", number(f.residual)},   {"predicted_rate", number(predicted_rate)}};
}

inline Json to_json(const FitReport& r) {
    Json j = to_json(r.fit, r.predicted_rate);
    j["bound_rate"] = r.bound_rate;
    j["meets_bound"] = r.meets_bound;
    return j;
}

inline Json to_json(const LinearSuiteConfig& c) {
    return {{"n", c.n},
            {"gamma", c.gamma},
            {"s", c.s},
            {"profile", to_string(c.profile)},
            {"v1_scale", c.v1_scale},
            {"t0", c.t_lo},
            {"t1", c.t_hi},
            {"per_decade", c.per_decade},
            {"r_min", c.grid.r_min},
            {"r_max", c.grid.r_max},
            {"radial_points", c.grid.points}};
}

inline Json to_json(const SolverConfig& c) {
    return {{"p", c.p},           {"eps", c.eps},     {"dt", c.dt},
            {"tend", c.t_end},    {"dealias", c.dealias}, {"theta", c.theta},
            {"growth_factor", c.growth_factor}, {"dt_min_ratio", c.dt_min_ratio},
            {"forcing", c.forcing}, {"samples", c.history_samples}};
}

inline Json to_json(const GridSpec& g) { return {{"dim", g.dim}, {"N", g.points}, {"L", g.length}}; }

inline Json to_json(const SweepResult& r) {
    Json j;
    j["verdict"] = r.verdict;
    j["monotone_violations"] = r.monotone_violations;
    if (r.fit) {
        j["slope"] = r.fit->slope;
        j["intercept"] = r.fit->intercept;
        j["residual"] = r.fit->residual;
        j["samples"] = r.fit->samples;
    } else {
        j["slope"] = nullptr;
    }
    j["predicted_slope"] = r.predicted_slope ? Json(*r.predicted_slope) : Json(nullptr);
    j["relative_deviation"] = r.relative_deviation ? Json(*r.relative_deviation) : Json(nullptr);
    return j;
}

inline Json to_json(const TestFnReport& r) {
    Json rows = Json::array();
    for (const auto& row : r.rows)
        rows.push_back({{"R", row.R},
                        {"I_R", number(row.functional)},
                        {"D_R", number(row.data_term)},
                        {"B_R", number(row.bound_term)},
                        {"contradiction", row.contradiction}});
    return {{"n", r.n},
            {"gamma", r.gamma},
            {"p", r.p},
            {"bound_exponent", r.exponents.bound_exponent},
            {"data_exponent", r.exponents.data_exponent},
            {"exponent_gate", r.exponents.contradiction},
            {"C", number(r.constant)},
            {"rows", rows}};
}

// ---------------------------------------------------------------------------
// CSV writers.

inline void write_curves_csv(const fs::path& path, const std::vector<DecayCurve>& curves) {
    auto os = open_out(path);
    os << "t,norm,s,gamma,kind\n";
    for (const auto& c : curves)
        for (std::size_t i = 0; i < c.times.size(); ++i)
            os << format_double(c.times[i]) << ',' << format_double(c.norms[i]) << ',' << format_double(c.s) << ','
               << format_double(c.gamma) << ',' << c.kind << '\n';
}

inline void write_history_csv(const fs::path& path, const std::vector<HistorySample>& history) {
    auto os = open_out(path);
    os << "t,l2,hs,hneg,maxabs\n";
    for (const auto& h : history)
        os << format_double(h.t) << ',' << format_double(h.l2) << ',' << format_double(h.hs) << ','
           << format_double(h.hneg) << ',' << format_double(h.maxabs) << '\n';
}

inline void write_sweep_csv(const fs::path& path, const std::vector<SweepRow>& rows) {
    auto os = open_out(path);
    os << "eps,T,status\n";
    for (const auto& r : rows) os << format_double(r.eps) << ',' << format_double(r.lifespan) << ',' << to_string(r.status) << '\n';
}

inline void write_regions_csv(const fs::path& path, const PhaseDiagram& d) {
    auto os = open_out(path);
    os << "gamma,p,regime,p_crit,p_lower,p_cap,gamma_tilde\n";
    for (const auto& c : d.cells)
        os << format_double(c.gamma) << ',' << format_double(c.p) << ',' << to_string(c.verdict.regime) << ','
           << format_double(c.p_crit) << ',' << format_double(c.p_lower) << ',' << format_double(c.p_cap) << ','
           << format_double(d.gamma_tilde) << '\n';
}

// ---------------------------------------------------------------------------
// Grid evolutions with stored trajectories.
//
// snapshots.bin: repeated {float64 t, field record of û}; data_u0.bin and
// data_u1.bin: field records of the unscaled data.

struct EvolveConfig {
    GridSpec grid{1, 16384, 800.0 * std::numbers::pi};
    SolverConfig solver;
    double gamma = 0.5;
    double s = 1.0;
    InitialDataKind u0 = PaperProfileData{1.0, 0.5};
    InitialDataKind u1 = PaperProfileData{1.0, 0.5};
    bool store_snapshots = true;
    std::uint64_t seed = 0;
};

inline Json to_json(const EvolveConfig& c) {
    Json j{{"kind", "evolve"}};
    j.update(to_json(c.grid));
    j.update(to_json(c.solver));
    j["gamma"] = c.gamma;
    j["s"] = c.s;
    j["u0"] = to_string(c.u0);
    j["u1"] = to_string(c.u1);
    j["snapshots"] = c.store_snapshots;
    j["seed"] = c.seed;
    return j;
}

struct EvolveOutcome {
    RunResult result;
    double wall_seconds = 0.0;
};

inline EvolveOutcome run_evolve(const EvolveConfig& c, const fs::path& dir) {
    c.grid.validate();
    c.solver.validate();
    const auto u0 = make_initial_data(c.u0, c.grid);
    const auto u1 = make_initial_data(c.u1, c.grid);
    write_json(dir / "config.json", to_json(c));
    {
        auto os0 = open_out(dir / "data_u0.bin", true);
        write_record(os0, transform_forward(u0));
        auto os1 = open_out(dir / "data_u1.bin", true);
        write_record(os1, transform_forward(u1));
    }

    std::ofstream snaps;
    if (c.store_snapshots) snaps = open_out(dir / "snapshots.bin", true);
    StateObserver observer;
    if (c.store_snapshots)
        observer = [&](const State& s, const HistorySample&) {
            detail::put_f64(snaps, s.t);
            write_record(snaps, s.u_hat);
        };

    const auto t0 = std::chrono::steady_clock::now();
    EvolveOutcome out;
    out.result = run(c.solver, u0, u1, c.s, c.gamma, observer);
    out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    snaps.close();

    write_history_csv(dir / "curves.csv", out.result.history);
    Json meta{{"config", to_json(c)},
              {"grid", to_json(c.grid)},
              {"status", to_string(out.result.status)},
              {"blowup_time", out.result.status == RunStatus::Completed ? Json(nullptr) : Json(out.result.end_time)},
              {"end_time", out.result.end_time},
              {"weighted_sup", number(out.result.weighted_sup)},
              {"steps", out.result.steps},
              {"rejected", out.result.rejected},
              {"wall_time_s", out.wall_seconds}};
    write_json(dir / "meta.json", meta);
    return out;
}

inline Trajectory read_trajectory(const fs::path& dir) {
    std::ifstream is(dir / "snapshots.bin", std::ios::binary);
    if (!is) throw DomainError("run directory has no snapshots.bin: " + dir.string());
    Trajectory tr;
    while (is.peek() != std::ifstream::traits_type::eof()) {
        tr.times.push_back(detail::get_f64(is));
        tr.snapshots.push_back(read_record(is));
    }
    if (tr.snapshots.empty()) throw DomainError("snapshots.bin is empty");
    tr.grid = tr.snapshots.front().grid;
    return tr;
}

inline SpectrumField read_record_file(const fs::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw DomainError("cannot read " + path.string());
    return read_record(is);
}

/// Test-function report for a stored evolve run; also written to report.json.
inline TestFnReport testfn_from_run(const fs::path& dir, const std::vector<double>& radii) {
    const auto config = read_json(dir / "config.json");
    TestFnInput in;
    in.trajectory = read_trajectory(dir);
    auto sum = read_record_file(dir / "data_u0.bin");
    const auto d1 = read_record_file(dir / "data_u1.bin");
    require_same_grid(sum.grid, d1.grid);
    for (std::size_t i = 0; i < sum.coeffs.size(); ++i) sum.coeffs[i] += d1.coeffs[i];
    in.data_sum = transform_inverse(sum);
    in.eps = config.at("eps").get<double>();
    in.p = config.at("p").get<double>();
    in.gamma = config.at("gamma").get<double>();
    auto report = evaluate_testfn_functional(in, radii);
    write_json(dir / "report.json", to_json(report));
    return report;
}

}  // namespace critex
