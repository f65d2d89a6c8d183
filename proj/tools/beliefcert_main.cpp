#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "beliefcert/constants.hpp"
#include "beliefcert/filter.hpp"
#include "beliefcert/metrics.hpp"
#include "beliefcert/model_io.hpp"
#include "beliefcert/scenario.hpp"
#include "beliefcert/solver.hpp"

using namespace beliefcert;

namespace {

// exit codes: 0 pass, 1 bound failure, 2 parse, 3 incompatibility, 4 non-convergence
constexpr int kExitPass = 0;
constexpr int kExitBoundFailure = 1;
constexpr int kExitParse = 2;
constexpr int kExitIncompatible = 3;
constexpr int kExitNoConvergence = 4;

struct GlobalOptions {
    std::string out_dir = ".";
    std::uint64_t seed = 0; // 0 -> keep the scenario's seed
    std::size_t grid_m = 0;
    double tol = 0.0;
    std::string format = "both"; // jsonl | csv | both
};

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
}

std::string stem_of(const std::string& path) {
    std::string s = path;
    if (const auto slash = s.find_last_of('/'); slash != std::string::npos)
        s = s.substr(slash + 1);
    if (const auto dot = s.find_last_of('.'); dot != std::string::npos) s = s.substr(0, dot);
    return s;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

int run_validate(const std::string& model_path) {
    PomdpModel m;
    try {
        m = load_model(model_path);
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitParse;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    }
    const auto violations = validate_model(m);
    if (violations.empty()) {
        std::cout << "model ok: " << m.num_states() << " states, " << m.num_actions()
                  << " actions, " << m.num_obs() << " observations\n";
        return kExitPass;
    }
    for (const auto& v : violations) std::cout << "violation: " << v << "\n";
    return kExitBoundFailure;
}

int run_distance(const std::string& path_a, const std::string& path_b,
                 const std::string& metric) {
    PomdpModel a, b;
    try {
        a = load_model(path_a);
        b = load_model(path_b);
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitParse;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    }
    try {
        const auto g = ground_of(a.state_space);
        const auto gy = ground_of(a.obs_space);
        const bool all = metric == "all";
        std::cout << "quantity,value\n";
        if (all || metric == "tv") {
            std::cout << "kernel_tv," << fmt(kernel_distance_tv(a.kernel, b.kernel)) << "\n";
            std::cout << "channel_tv," << fmt(channel_distance_tv(a.channel, b.channel)) << "\n";
        }
        if (all || metric == "w1") {
            std::cout << "kernel_w1,"
                      << fmt(kernel_distance(a.kernel, b.kernel, MeasureMetric::W1, g)) << "\n";
            std::cout << "channel_w1,"
                      << fmt(channel_distance(a.channel, b.channel, MeasureMetric::W1, gy))
                      << "\n";
        }
        if (all || metric == "bl") {
            std::cout << "kernel_bl,"
                      << fmt(kernel_distance(a.kernel, b.kernel, MeasureMetric::BL, g)) << "\n";
            std::cout << "channel_bl,"
                      << fmt(channel_distance(a.channel, b.channel, MeasureMetric::BL, gy))
                      << "\n";
        }
        if (a.prior.size() == b.prior.size()) {
            double prior_tv = 0.0;
            for (std::size_t x = 0; x < a.prior.size(); ++x)
                prior_tv += std::abs(a.prior[x] - b.prior[x]);
            std::cout << "prior_tv," << fmt(prior_tv) << "\n";
        }
        return kExitPass;
    } catch (const std::invalid_argument& e) {
        std::cerr << "incompatible models: " << e.what() << "\n";
        return kExitIncompatible;
    }
}

int run_solve(const std::string& model_path, double beta, std::size_t grid_m, double tol,
              const std::string& out_dir) {
    PomdpModel m;
    try {
        m = load_model(model_path);
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitParse;
    }
    if (const auto bad = validate_model(m); !bad.empty()) {
        std::cerr << "invalid model: " << bad.front() << "\n";
        return kExitParse;
    }
    if (beta <= 0.0) beta = m.discount.value_or(0.95);
    if (grid_m == 0) grid_m = default_grid_resolution(m.num_states());
    if (tol <= 0.0) tol = 1e-8;
    try {
        const auto grid = belief_grid(m.num_states(), grid_m);
        const auto bmdp = build_belief_mdp(m, grid);
        const auto vi = value_iteration(bmdp, beta, tol);

        std::string dump = "belief,value,action\n";
        char buf[64];
        for (std::size_t z = 0; z < grid.beliefs.size(); ++z) {
            std::string belief;
            for (std::size_t i = 0; i < grid.beliefs[z].size(); ++i) {
                std::snprintf(buf, sizeof(buf), "%.17g", grid.beliefs[z][i]);
                belief += (i ? ";" : "") + std::string(buf);
            }
            std::snprintf(buf, sizeof(buf), "%.17g", vi.value.values[z]);
            dump += belief + "," + buf + "," + m.action_labels[vi.policy.action[z]] + "\n";
        }
        const std::string out_path = out_dir + "/" + stem_of(model_path) + ".solution.csv";
        write_file(out_path, dump);

        const std::size_t zp = snap_to_grid(grid, m.prior, SnapMetric::L1);
        std::cout << "grid points: " << grid.beliefs.size() << "\n";
        std::cout << "iterations: " << vi.value.iterations << " (residual "
                  << fmt(vi.value.residual) << ")\n";
        std::cout << "value at prior: " << fmt(vi.value.values[zp]) << "\n";
        std::cout << "wrote " << out_path << "\n";
        return kExitPass;
    } catch (const std::exception& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return kExitNoConvergence;
    }
}

void apply_overrides(Scenario& sc, const GlobalOptions& g) {
    if (g.seed != 0) sc.seed = g.seed;
    if (g.grid_m != 0) sc.grid_m = g.grid_m;
    if (g.tol > 0.0) sc.tol = g.tol;
}

void write_reports(const std::vector<BoundReport>& reports, const std::string& base,
                   const std::string& format) {
    if (format == "jsonl" || format == "both")
        write_file(base + ".reports.jsonl", reports_to_jsonl(reports));
    if (format == "csv" || format == "both")
        write_file(base + ".reports.csv", reports_to_csv(reports));
}

int cmd_verify(const std::string& scenario_path, const GlobalOptions& g) {
    Scenario sc;
    try {
        sc = Scenario::load(scenario_path);
    } catch (const std::exception& e) {
        std::cerr << "scenario error: " << e.what() << "\n";
        return kExitParse;
    }
    apply_overrides(sc, g);

    const auto t0 = std::chrono::steady_clock::now();
    VerifyOutcome outcome;
    try {
        outcome = run_verify(sc);
    } catch (const PipelineError& e) {
        std::cerr << "pipeline failed at stage " << e.stage << ": " << e.what() << "\n";
        if (e.stage == "load" || e.stage == "validate") return kExitParse;
        if (std::string(e.what()).find("did not converge") != std::string::npos)
            return kExitNoConvergence;
        if (e.stage == "perturb" || e.stage == "filter") return kExitIncompatible;
        return kExitNoConvergence;
    }
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::steady_clock::now() - t0)
                        .count();

    write_reports(outcome.reports, g.out_dir + "/" + sc.name, g.format);

    const auto& me = outcome.measurements;
    std::cout << "scenario " << sc.name << " (" << me.grid_points << " grid points, " << ms
              << " ms)\n";
    std::cout << "  d_tv(kernel)=" << fmt(me.d_tv_kernel)
              << " d_w1(kernel)=" << fmt(me.d_w1_kernel)
              << " d_tv(channel)=" << fmt(me.d_tv_channel)
              << " d_tv(prior)=" << fmt(me.d_tv_prior) << "\n";
    std::cout << "  filter distances: bl=" << fmt(me.bl_filter) << " w1=" << fmt(me.w1_filter)
              << " rho2=" << fmt(me.rho2_filter)
              << " predictive_gap=" << fmt(me.predictive_gap) << "\n";
    std::cout << "  k2(true)=" << fmt(me.k2_true) << " k2(approx)=" << fmt(me.k2_approx)
              << " grid defect (w1): true=" << fmt(me.grid_defect_true)
              << " approx=" << fmt(me.grid_defect_approx) << "\n";
    std::cout << "  bound_id             status lhs          rhs+slack\n";
    for (const auto& r : outcome.reports) {
        const char* status = !r.applicable ? "n/a " : (r.pass ? "pass" : "FAIL");
        std::printf("  %-20s %s   %-12.6g %-12.6g\n", r.bound_id.c_str(), status, r.lhs,
                    r.rhs + r.slack);
    }
    std::cout << (outcome.all_applicable_pass ? "all applicable bounds pass\n"
                                              : "BOUND FAILURE\n");
    return outcome.all_applicable_pass ? kExitPass : kExitBoundFailure;
}

int cmd_sweep(const std::string& scenario_path, const std::string& parameter,
              const std::vector<double>& values, const GlobalOptions& g) {
    Scenario sc;
    try {
        sc = Scenario::load(scenario_path);
    } catch (const std::exception& e) {
        std::cerr << "scenario error: " << e.what() << "\n";
        return kExitParse;
    }
    apply_overrides(sc, g);
    std::vector<SweepRow> rows;
    try {
        rows = run_sweep(sc, parameter, values);
    } catch (const PipelineError& e) {
        std::cerr << "pipeline failed at stage " << e.stage << ": " << e.what() << "\n";
        return std::string(e.what()).find("did not converge") != std::string::npos
                   ? kExitNoConvergence
                   : kExitIncompatible;
    } catch (const std::invalid_argument& e) {
        std::cerr << "sweep error: " << e.what() << "\n";
        return kExitParse;
    }

    const std::string base = g.out_dir + "/" + sc.name + ".sweep";
    if (g.format == "jsonl" || g.format == "both")
        write_file(base + ".jsonl", sweep_to_jsonl(rows, parameter));
    if (g.format == "csv" || g.format == "both")
        write_file(base + ".csv", sweep_to_csv(rows, parameter));

    // finer quantization must never raise the quantization right-hand sides
    bool decay_ok = true;
    double last = std::numeric_limits<double>::infinity();
    bool failures = false;
    for (const auto& [value, report] : rows) {
        if (report.applicable && !report.pass) failures = true;
        if ((parameter == "n_x" && report.bound_id == "QUANT_STATE") ||
            (parameter == "n_y" && report.bound_id == "QUANT_OBS_TV")) {
            if (report.rhs > last + 1e-12) decay_ok = false;
            last = report.rhs;
        }
    }
    std::cout << "sweep rows: " << rows.size() << "\n";
    if (parameter == "n_x" || parameter == "n_y")
        std::cout << "quantization rhs decay: " << (decay_ok ? "monotone" : "NOT monotone")
                  << "\n";
    std::cout << "wrote " << base << ".jsonl/.csv\n";
    return failures ? kExitBoundFailure : kExitPass;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"certification harness for belief-MDP robustness bounds"};
    app.require_subcommand(1);

    GlobalOptions g;
    app.add_option("--out", g.out_dir, "output directory for report files");
    app.add_option("--seed", g.seed, "override the scenario seed");
    app.add_option("--grid-m", g.grid_m, "override the belief-grid resolution");
    app.add_option("--tol", g.tol, "override the solver tolerance");
    app.add_option("--format", g.format, "report format: jsonl, csv, or both")
        ->check(CLI::IsMember({"jsonl", "csv", "both"}));

    std::string model_a, model_b, scenario_path, metric = "all", parameter;
    std::vector<double> values;
    double beta = 0.0;

    auto* validate = app.add_subcommand("validate", "check a model file's invariants");
    validate->add_option("model", model_a)->required();

    auto* distance = app.add_subcommand("distance", "uniform kernel/channel distances");
    distance->add_option("model_a", model_a)->required();
    distance->add_option("model_b", model_b)->required();
    distance->add_option("--metric", metric, "tv, w1, bl, or all")
        ->check(CLI::IsMember({"tv", "w1", "bl", "all"}));

    auto* solve = app.add_subcommand("solve", "discounted belief-grid value iteration");
    solve->add_option("model", model_a)->required();
    solve->add_option("--beta", beta, "discount factor (default: model's or 0.95)");

    auto* verify = app.add_subcommand("verify", "run the bound-certification pipeline");
    verify->add_option("scenario", scenario_path)->required();

    auto* sweep = app.add_subcommand("sweep", "verify across one scenario knob");
    sweep->add_option("scenario", scenario_path)->required();
    sweep->add_option("--parameter", parameter, "scenario knob to vary")->required();
    sweep->add_option("--values", values, "values to sweep")->required()->delimiter(',');

    CLI11_PARSE(app, argc, argv);

    try {
        if (validate->parsed()) return run_validate(model_a);
        if (distance->parsed()) return run_distance(model_a, model_b, metric);
        if (solve->parsed()) return run_solve(model_a, beta, g.grid_m, g.tol, g.out_dir);
        if (verify->parsed()) return cmd_verify(scenario_path, g);
        if (sweep->parsed()) return cmd_sweep(scenario_path, parameter, values, g);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNoConvergence;
    }
    return kExitPass;
}
