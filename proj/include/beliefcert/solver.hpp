#pragma once

#include <cstdint>
#include <vector>

#include "beliefcert/filter.hpp"
#include "beliefcert/model.hpp"

namespace beliefcert {

enum class SnapMetric { L1, W1 };

/**
 * Finite MDP over a belief grid: filter-kernel atoms snapped to the nearest
 * grid belief (L1 lattice rounding by default), weights of atoms landing on
 * the same point added, and the exact expected stage cost per (belief,action).
 * The largest snapping displacement is recorded in both L1 and W1 so that
 * downstream certifications can account for grid slack explicitly.
 */
struct BeliefMdp {
    BeliefGrid grid;
    std::size_t num_actions = 0;
    // trans[z][u] -> sparse distribution over grid indices
    std::vector<std::vector<std::vector<std::pair<std::size_t, double>>>> trans;
    std::vector<std::vector<double>> stage_cost; // [z][u]
    double grid_defect_l1 = 0.0;
    double grid_defect_w1 = 0.0;
};

struct Policy {
    std::vector<std::size_t> action; // per grid belief
};

struct ValueFunction {
    std::vector<double> values;
    double beta = 0.0;
    double residual = 0.0; // last sup-norm step difference
    std::size_t iterations = 0;
    std::vector<double> step_deltas; // sup-norm differences per sweep
};

BeliefMdp build_belief_mdp(const PomdpModel& model, const BeliefGrid& grid,
                           SnapMetric snap = SnapMetric::L1);

/// Nearest grid belief under the snap metric; lattice rounding for L1.
std::size_t snap_to_grid(const BeliefGrid& grid, const Belief& z, SnapMetric snap,
                         const FiniteMetricSpace* state_space = nullptr);

struct ViResult {
    ValueFunction value;
    Policy policy;
};

/**
 * Discounted value iteration to sup-norm fixed-point residual <= tol: sweeps
 * stop once ||V_{k+1}-V_k|| <= tol (1-beta) / (2 beta). Greedy policy with
 * lowest-index tie-breaks.
 */
ViResult value_iteration(const BeliefMdp& bmdp, double beta, double tol);

/// Fixed-policy discounted value to the same residual guarantee.
ValueFunction policy_evaluation(const BeliefMdp& bmdp, const Policy& policy, double beta,
                                double tol);

/**
 * Evaluates, on the true model's belief grid, the policy obtained for an
 * approximate model: each true grid belief takes the action of the nearest
 * approx-grid belief. Both models must share state/action/observation spaces.
 */
ValueFunction cross_evaluate(const PomdpModel& true_model, const Policy& approx_policy,
                             const BeliefGrid& approx_grid, const BeliefGrid& true_grid,
                             double beta, double tol, SnapMetric snap = SnapMetric::L1);

/// Same, reusing an already built belief MDP for the true model.
ValueFunction cross_evaluate_on(const BeliefMdp& true_bmdp, const Policy& approx_policy,
                                const BeliefGrid& approx_grid, double beta, double tol,
                                SnapMetric snap = SnapMetric::L1);

/// The policy induced on a grid by looking up another grid's policy nearby.
Policy induce_policy(const BeliefGrid& target_grid, const Policy& source_policy,
                     const BeliefGrid& source_grid, SnapMetric snap = SnapMetric::L1);

/**
 * Exact backward recursion over N stages. stage_costs[t] may be empty to reuse
 * the belief MDP stage cost; terminal may be empty for zero terminal cost.
 */
std::vector<double> finite_horizon_dp(const BeliefMdp& bmdp, std::size_t n_stages,
                                      const std::vector<std::vector<std::vector<double>>>&
                                          stage_costs = {},
                                      const std::vector<double>& terminal = {});

struct RviResult {
    double rho_star = 0.0;
    std::vector<double> bias;
    double span_residual = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
};

/**
 * Relative value iteration for the average cost. Stops when the span of the
 * Bellman increments drops below tol; throws std::runtime_error with
 * diagnostics if the span has stopped decreasing before that.
 */
RviResult relative_value_iteration(const BeliefMdp& bmdp, double tol, std::size_t max_iter);

/// Average cost of a fixed policy by the same span criterion.
RviResult relative_value_evaluation(const BeliefMdp& bmdp, const Policy& policy, double tol,
                                    std::size_t max_iter);

/// (1-beta) * midpoint of J*_beta for each requested beta; vanishing-discount
/// cross-check of rho_star.
std::vector<double> vanishing_discount_estimates(const BeliefMdp& bmdp,
                                                 const std::vector<double>& betas, double tol);

struct RolloutResult {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t horizon = 0;
    double truncation_budget = 0.0;
};

/**
 * Monte Carlo discounted cost of a grid policy under the true model: states
 * and observations are simulated, the exact Bayes filter tracks the belief,
 * and actions come from the policy at the nearest grid belief. Reproducible
 * for a fixed seed. The horizon is the smallest H with
 * beta^H ||c|| / (1-beta) <= 1e-4 ||c||.
 */
RolloutResult rollout_cost(const PomdpModel& model, const Policy& policy, const BeliefGrid& grid,
                           double beta, std::size_t n_runs, std::uint64_t seed,
                           std::size_t horizon_override = 0);

} // namespace beliefcert
