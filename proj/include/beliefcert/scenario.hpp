#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "beliefcert/bounds.hpp"
#include "beliefcert/model.hpp"
#include "beliefcert/quantize.hpp"

namespace beliefcert {

/// Pipeline failure carrying the stage it happened in (for exit diagnostics).
struct PipelineError : std::runtime_error {
    std::string stage;
    PipelineError(std::string stage_, const std::string& what_)
        : std::runtime_error(stage_ + ": " + what_), stage(std::move(stage_)) {}
};

/**
 * One experiment: a true model (file or continuous adapter), a generative
 * perturbation recipe, and solver settings. Loaded from the JSON schema
 * documented in docs/formats.md.
 */
struct Scenario {
    std::string name;

    // exactly one source
    std::string model_file;
    std::optional<ContinuousModelAdapter> adapter;

    // perturbation recipe; mixing weights in [0,1], 0 disables
    double eps_kernel = 0.0;
    double eps_channel = 0.0;
    double eps_prior = 0.0;
    double eps_permute = 0.0; // row-permutation blend weight for the kernel
    std::size_t n_x = 0;      // state quantization cells, 0 disables
    std::size_t n_y = 0;      // observation quantization cells, 0 disables

    // solver settings
    double beta = 0.95;
    std::size_t grid_m = 0; // 0 -> default for the state count
    double tol = 1e-8;
    double rvi_tol = 1e-7;
    std::size_t rvi_max_iter = 500'000;
    std::size_t fin_horizon = 5;
    bool average_cost = false;
    std::size_t contraction_grid_m = 0; // 0 -> auto (small)
    std::size_t filter_grid_m = 0;      // 0 -> same as grid_m

    std::uint64_t seed = 1;

    static Scenario from_json_text(const std::string& text, const std::string& base_dir = "");
    static Scenario load(const std::string& path);
    std::vector<std::string> violations() const;
};

/// approx = (1-eps) * true + eps * uniform, applied row-wise.
TransitionKernel mix_kernel_with_uniform(const TransitionKernel& k, double eps);
ObservationChannel mix_channel_with_uniform(const ObservationChannel& q, double eps);
Belief mix_prior_with_uniform(const Belief& b, double eps);

/// Row-permutation blend: row x becomes (1-eps) row(x) + eps row(x+1 mod n).
TransitionKernel permutation_blend_kernel(const TransitionKernel& k, double eps);

/// Everything cmd_verify measured, for the summary table.
struct VerifyMeasurements {
    double d_tv_kernel = 0.0, d_w1_kernel = 0.0, d_tv_channel = 0.0, d_tv_prior = 0.0;
    double l_q_shared = 0.0;
    double predictive_gap = 0.0;
    double bl_filter = 0.0, w1_filter = 0.0, rho2_filter = 0.0;
    double k2_true = 0.0, k2_approx = 0.0;
    double grid_defect_true = 0.0, grid_defect_approx = 0.0;
    double integration_defect = 0.0;
    std::size_t grid_points = 0;
};

struct VerifyOutcome {
    std::vector<BoundReport> reports;
    VerifyMeasurements measurements;
    bool all_applicable_pass = true;
};

/**
 * The full certification pipeline: build true and perturbed models, measure
 * every left-hand side through the filter/solver modules, evaluate every
 * right-hand side through the bounds module, and certify each applicable
 * bound. Bounds whose standing assumptions fail are reported as not
 * applicable rather than failed.
 */
VerifyOutcome run_verify(const Scenario& scenario);

/// Long-format sweep: run_verify once per value of one scenario knob.
struct SweepRow {
    double parameter_value;
    BoundReport report;
};
std::vector<SweepRow> run_sweep(const Scenario& scenario, const std::string& parameter,
                                const std::vector<double>& values);

// Report emission. Streams are written deterministically: a fixed field
// order, %.17g numbers, one object per line (jsonl) or one row (csv).
std::string reports_to_jsonl(const std::vector<BoundReport>& reports);
std::string reports_to_csv(const std::vector<BoundReport>& reports);
std::string sweep_to_jsonl(const std::vector<SweepRow>& rows, const std::string& parameter);
std::string sweep_to_csv(const std::vector<SweepRow>& rows, const std::string& parameter);

} // namespace beliefcert
