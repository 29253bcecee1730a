// critex: command-line front end for the experiments.

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <numbers>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "critex/exponents.hpp"
#include "critex/experiments.hpp"
#include "critex/propagator.hpp"
#include "critex/runs.hpp"

using namespace critex;

namespace {

bool has_flag(const std::vector<std::string>& args, const std::string& flag) {
    return std::any_of(args.begin(), args.end(),
                       [&](const std::string& a) { return a == flag || a.rfind(flag + "=", 0) == 0; });
}

std::string scalar_text(const Json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    if (v.is_number()) return format_double(v.get<double>());
    throw DomainError("config values must be scalars or lists of scalars");
}

/// Appends "--key value" for every config-file entry not given on the command line.
std::vector<std::string> merge_config_file(std::vector<std::string> args) {
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
        else if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
    }
    if (path.empty()) return args;
    const Json cfg = read_json(path);
    if (!cfg.is_object()) throw DomainError("config file must hold a flat JSON object");
    for (const auto& [key, value] : cfg.items()) {
        const std::string flag = "--" + key;
        if (key == "config" || has_flag(args, flag)) continue;
        args.push_back(flag);
        if (value.is_array())
            for (const auto& v : value) args.push_back(scalar_text(v));
        else
            args.push_back(scalar_text(value));
    }
    return args;
}

void print(const Json& j) { std::cout << j.dump(2) << '\n'; }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Damped-wave critical exponent laboratory"};
    app.require_subcommand(1);
    app.allow_windows_style_options(false);

    std::string config_path;
    auto add_config = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "Flat JSON file with option values (flags override)");
    };

    // exponents
    auto* exp_cmd = app.add_subcommand("exponents", "Thresholds and regime verdict");
    double e_n = 1.0, e_gamma = 0.5, e_s = 1.0;
    std::optional<double> e_p;
    exp_cmd->add_option("--n", e_n, "Dimension")->required();
    exp_cmd->add_option("--gamma", e_gamma, "Negative Sobolev order")->required();
    exp_cmd->add_option("--p", e_p, "Nonlinearity exponent");
    exp_cmd->add_option("--s", e_s, "Regularity")->capture_default_str();
    add_config(exp_cmd);

    // linear-decay and diffusion
    LinearSuiteConfig lin;
    std::string profile_text = "powerlaw:a=0.25";
    auto add_linear = [&](CLI::App* sub) {
        sub->add_option("--n", lin.n, "Dimension (real >= 1)")->capture_default_str();
        sub->add_option("--gamma", lin.gamma, "Negative Sobolev order")->capture_default_str();
        sub->add_option("--s", lin.s, "Regularity order")->capture_default_str();
        sub->add_option("--profile", profile_text, "powerlaw:a=<a> or gaussian:w=<w>")->capture_default_str();
        sub->add_option("--t0", lin.t_lo, "Fit window start")->capture_default_str();
        sub->add_option("--t1", lin.t_hi, "Fit window end")->capture_default_str();
        sub->add_option("--v1-scale", lin.v1_scale, "v1 = scale * v0")->capture_default_str();
        sub->add_option("--per-decade", lin.per_decade, "Samples per decade")->capture_default_str();
        sub->add_option("--radial-points", lin.grid.points, "Radial grid points")->capture_default_str();
        add_config(sub);
    };
    auto* decay_cmd = app.add_subcommand("linear-decay", "Radial decay curves and rate fits");
    add_linear(decay_cmd);
    auto* diff_cmd = app.add_subcommand("diffusion", "Damped, heat and difference curves");
    add_linear(diff_cmd);

    // evolve
    auto* evolve_cmd = app.add_subcommand("evolve", "Nonlinear grid evolution");
    EvolveConfig ev;
    int ev_N = ev.grid.points, ev_dim = ev.grid.dim;
    double ev_L = ev.grid.length;
    std::string ev_u0, ev_u1;
    evolve_cmd->add_option("--dim", ev_dim, "Grid dimension")->capture_default_str();
    evolve_cmd->add_option("--N", ev_N, "Points per axis")->capture_default_str();
    evolve_cmd->add_option("--L", ev_L, "Box edge length")->capture_default_str();
    evolve_cmd->add_option("--p", ev.solver.p, "Exponent")->capture_default_str();
    evolve_cmd->add_option("--eps", ev.solver.eps, "Data size")->capture_default_str();
    evolve_cmd->add_option("--gamma", ev.gamma, "Negative Sobolev order")->capture_default_str();
    evolve_cmd->add_option("--s", ev.s, "Regularity order")->capture_default_str();
    evolve_cmd->add_option("--dt", ev.solver.dt, "Initial step")->capture_default_str();
    evolve_cmd->add_option("--tend", ev.solver.t_end, "Final time")->capture_default_str();
    evolve_cmd->add_option("--theta", ev.solver.theta, "Blow-up threshold")->capture_default_str();
    evolve_cmd->add_option("--samples", ev.solver.history_samples, "History samples")->capture_default_str();
    evolve_cmd->add_option("--dealias", ev.solver.dealias, "2/3 truncation")->capture_default_str();
    evolve_cmd->add_option("--u0", ev_u0, "Data u0 (paper:..., gaussian:..., mode:...)");
    evolve_cmd->add_option("--u1", ev_u1, "Data u1");
    evolve_cmd->add_option("--seed", ev.seed, "Recorded seed")->capture_default_str();
    add_config(evolve_cmd);

    // lifespan
    auto* life_cmd = app.add_subcommand("lifespan", "Lifespan sweep over eps");
    LifespanSweepConfig sw;
    int sw_dim = 1, sw_N = sw.grid.points;
    double sw_L = sw.grid.length;
    life_cmd->add_option("--dim", sw_dim, "Grid dimension")->capture_default_str();
    life_cmd->add_option("--gamma", sw.params.gamma, "Negative Sobolev order")->capture_default_str();
    life_cmd->add_option("--s", sw.params.s, "Regularity order")->capture_default_str();
    life_cmd->add_option("--p", sw.params.p, "Exponent")->capture_default_str();
    life_cmd->add_option("--eps-start", sw.eps_start, "First eps")->capture_default_str();
    life_cmd->add_option("--eps-factor", sw.eps_factor, "Ratio between consecutive eps")->capture_default_str();
    life_cmd->add_option("--count", sw.count, "Number of eps values")->capture_default_str();
    life_cmd->add_option("--workers", sw.workers, "Worker threads")->capture_default_str();
    life_cmd->add_option("--N", sw_N, "Points per axis")->capture_default_str();
    life_cmd->add_option("--L", sw_L, "Box edge length")->capture_default_str();
    life_cmd->add_option("--dt", sw.solver.dt, "Initial step")->capture_default_str();
    life_cmd->add_option("--tend", sw.solver.t_end, "Horizon")->capture_default_str();
    life_cmd->add_option("--theta", sw.solver.theta, "Blow-up threshold")->capture_default_str();
    add_config(life_cmd);

    // phase-diagram
    auto* phase_cmd = app.add_subcommand("phase-diagram", "Regime map in the (gamma, p) plane");
    double ph_n = 2.0, ph_s = 1.0, g_min = 0.0, g_max = 0.0, p_min = 1.1, p_max = 4.0;
    int g_steps = 19, p_steps = 30;
    phase_cmd->add_option("--n", ph_n, "Dimension")->capture_default_str();
    phase_cmd->add_option("--s", ph_s, "Regularity")->capture_default_str();
    phase_cmd->add_option("--gamma-min", g_min, "Default 0.05 n/2");
    phase_cmd->add_option("--gamma-max", g_max, "Default 0.95 n/2");
    phase_cmd->add_option("--gamma-steps", g_steps)->capture_default_str();
    phase_cmd->add_option("--p-min", p_min)->capture_default_str();
    phase_cmd->add_option("--p-max", p_max)->capture_default_str();
    phase_cmd->add_option("--p-steps", p_steps)->capture_default_str();
    add_config(phase_cmd);

    // testfn
    auto* tf_cmd = app.add_subcommand("testfn", "Test-function functional of a stored evolve run");
    std::string tf_run;
    std::vector<double> tf_R;
    tf_cmd->add_option("--run", tf_run, "Run directory from evolve")->required();
    tf_cmd->add_option("--R", tf_R, "Radii (>= 1)")->required()->expected(1, -1);
    add_config(tf_cmd);

    // probe
    auto* probe_cmd = app.add_subcommand("probe", "Propagator entries at (t, r)");
    double pr_t = 1.0, pr_r = 0.0;
    probe_cmd->add_option("--t", pr_t, "Time")->required();
    probe_cmd->add_option("--r", pr_r, "Radial frequency")->required();
    add_config(probe_cmd);

    try {
        std::vector<std::string> args(argv + 1, argv + argc);
        args = merge_config_file(std::move(args));
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }

    try {
        if (*exp_cmd) {
            Json j{{"n", e_n}, {"gamma", e_gamma}, {"s", e_s}};
            j["p_fujita"] = p_fujita(e_n);
            j["p_crit"] = p_crit(e_n, e_gamma);
            j["gamma_tilde"] = gamma_tilde(e_n);
            if (e_p) {
                const RegimeParams params{e_n, e_gamma, e_s, *e_p, std::nullopt};
                j["p"] = *e_p;
                try {
                    j["verdict"] = to_json(classify_regime(params));
                } catch (const DomainError& err) {
                    j["verdict"] = nullptr;
                    j["verdict_error"] = err.what();
                }
                const auto adm = sharp_lifespan_admissible(params);
                Json reasons = Json::array();
                for (const auto& r : adm.reasons) reasons.push_back(to_json(r));
                j["sharp_lifespan"] = {{"admissible", adm.admissible}, {"reasons", reasons}};
                if (*e_p < p_crit(e_n, e_gamma) && !at_critical(*e_p, p_crit(e_n, e_gamma)))
                    j["lifespan_exponent"] = lifespan_exponent(*e_p, e_n, e_gamma);
                const auto te = testfn_exponents(e_n, e_gamma, *e_p);
                j["testfn"] = {{"bound_exponent", te.bound_exponent},
                               {"data_exponent", te.data_exponent},
                               {"contradiction", te.contradiction}};
            }
            print(j);
        } else if (*decay_cmd || *diff_cmd) {
            lin.profile = parse_profile(profile_text);
            const bool decay = static_cast<bool>(*decay_cmd);
            const auto dir = make_run_directory(decay ? "linear-decay" : "diffusion");
            Json config{{"kind", decay ? "linear-decay" : "diffusion"}};
            config.update(to_json(lin));
            config["seed"] = 0;
            write_json(dir / "config.json", config);
            Json report;
            if (decay) {
                const auto r = run_decay_suite(lin);
                write_curves_csv(dir / "curves.csv", r.curves);
                report = {{"l2", to_json(r.l2)}, {"hs", to_json(r.hs)}};
            } else {
                const auto r = run_diffusion_suite(lin);
                write_curves_csv(dir / "curves.csv", r.curves);
                report = {{"damped", to_json(r.damped)},
                          {"heat", to_json(r.heat)},
                          {"difference", to_json(r.difference, r.damped.predicted_rate - 1.0)},
                          {"gain", r.gain},
                          {"gain_in_window", r.gain_in_window}};
            }
            write_json(dir / "report.json", report);
            report["run"] = dir.string();
            print(report);
        } else if (*evolve_cmd) {
            ev.grid = GridSpec(ev_dim, ev_N, ev_L);
            ev.u0 = ev_u0.empty() ? InitialDataKind{PaperProfileData{1.0, ev.gamma}} : parse_initial_data(ev_u0, ev.gamma);
            ev.u1 = ev_u1.empty() ? ev.u0 : parse_initial_data(ev_u1, ev.gamma);
            const auto dir = make_run_directory("evolve");
            const auto out = run_evolve(ev, dir);
            print({{"run", dir.string()},
                   {"status", to_string(out.result.status)},
                   {"end_time", out.result.end_time},
                   {"weighted_sup", number(out.result.weighted_sup)}});
        } else if (*life_cmd) {
            sw.params.n = sw_dim;
            sw.grid = GridSpec(sw_dim, sw_N, sw_L);
            const auto dir = make_run_directory("lifespan");
            Json config{{"kind", "lifespan"}, {"dim", sw_dim}, {"gamma", sw.params.gamma}, {"s", sw.params.s},
                        {"p", sw.params.p}, {"eps_start", sw.eps_start}, {"eps_factor", sw.eps_factor},
                        {"count", sw.count}, {"workers", sw.workers}, {"seed", 0}};
            config.update(to_json(sw.grid));
            config.update(to_json(sw.solver));
            write_json(dir / "config.json", config);
            const auto r = run_lifespan_sweep(sw);
            write_sweep_csv(dir / "sweep.csv", r.rows);
            Json report = to_json(r);
            write_json(dir / "report.json", report);
            report["run"] = dir.string();
            print(report);
        } else if (*phase_cmd) {
            // Unset gamma bounds default to 5% and 95% of n/2.
            if (phase_cmd->count("--gamma-min") == 0) g_min = 0.05 * 0.5 * ph_n;
            if (phase_cmd->count("--gamma-max") == 0) g_max = 0.95 * 0.5 * ph_n;
            const auto d = emit_phase_diagram(ph_n, ph_s, linspace(g_min, g_max, g_steps), linspace(p_min, p_max, p_steps));
            const auto dir = make_run_directory("phase-diagram");
            write_json(dir / "config.json", {{"kind", "phase-diagram"}, {"n", ph_n}, {"s", ph_s},
                                             {"gamma-min", g_min}, {"gamma-max", g_max}, {"gamma-steps", g_steps},
                                             {"p-min", p_min}, {"p-max", p_max}, {"p-steps", p_steps}, {"seed", 0}});
            write_regions_csv(dir / "regions.csv", d);
            print({{"run", dir.string()}, {"cells", d.cells.size()}});
        } else if (*tf_cmd) {
            print(to_json(testfn_from_run(tf_run, tf_R)));
        } else if (*probe_cmd) {
            const auto m = propagator(pr_t, pr_r);
            std::cout << "t,r,k00,k01,k10,k11\n"
                      << format_double(pr_t) << ',' << format_double(pr_r) << ',' << format_double(m.k00) << ','
                      << format_double(m.k01) << ',' << format_double(m.k10) << ',' << format_double(m.k11) << '\n';
        }
    } catch (const InsufficientDataError& e) {
        std::cerr << "insufficient data: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
