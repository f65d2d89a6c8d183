#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "beliefcert/measure.hpp"
#include "beliefcert/metrics.hpp"
#include "beliefcert/model.hpp"

namespace beliefcert {

/**
 * One evaluation of the belief-MDP transition kernel eta(.|z,u): a finitely
 * supported measure over next beliefs, one atom per observation with positive
 * predictive probability. Posteriors that coincide within 1e-12 (max norm)
 * are merged with their weights added; zero-weight atoms are dropped.
 */
struct FilterKernelValue {
    std::vector<std::pair<Belief, double>> atoms;

    double total_weight() const;
};

/// Simplex lattice over n states with denominator m, vertices included.
struct BeliefGrid {
    std::vector<Belief> beliefs;
    std::size_t resolution = 0; // lattice denominator m
    std::size_t num_states = 0;
};

/// Predictive observation law H(.|z,u) = sum_{x0,x1} z(x0) T(x1|x0,u) Q(.|x1).
SupportedMeasure obs_predictive(const PomdpModel& model, const Belief& z, std::size_t u);

/// One-step prediction sum_{x0} z(x0) T(.|x0,u).
std::vector<double> predict(const PomdpModel& model, const Belief& z, std::size_t u);

/**
 * Exact Bayes update. Throws std::domain_error when the observation has zero
 * predictive probability under (z,u).
 */
Belief belief_update(const PomdpModel& model, const Belief& z, std::size_t u, std::size_t y);

/// Full filter kernel value at (z,u).
FilterKernelValue filter_kernel_at(const PomdpModel& model, const Belief& z, std::size_t u);

/**
 * All beliefs with coordinates k/m summing to 1 over n_states coordinates,
 * enumerated in a fixed lexicographic order. Count = C(m+n-1, n-1).
 */
BeliefGrid belief_grid(std::size_t n_states, std::size_t m);

/// Default lattice resolution by state count (20 for 2 states, 8 for 3, ...).
std::size_t default_grid_resolution(std::size_t n_states);

/// Pairwise matrix of the chosen distance between beliefs over a state space.
GroundMetric belief_ground_metric(const std::vector<Belief>& beliefs,
                                  const FiniteMetricSpace& state_space, MeasureMetric kind);

struct FilterDistanceResult {
    double value = 0.0;
    std::size_t argmax_grid = 0;
    std::size_t argmax_action = 0;
};

/**
 * Grid maximum of the chosen distance between the two models' filter kernels:
 * for each grid belief and action, the filter values are compared over the
 * union of their posterior supports with a matching ground metric between
 * beliefs (BL ground for BL, W1 ground for W1). The result is a lower bound
 * of the supremum over all beliefs.
 */
FilterDistanceResult filter_kernel_distance(const PomdpModel& a, const PomdpModel& b,
                                            const BeliefGrid& grid, MeasureMetric kind);

/// Same sweep under the rho_2 test class (||f||_inf + 2 ||f||_L <= 1); diagnostic only.
FilterDistanceResult filter_kernel_distance_rho2(const PomdpModel& a, const PomdpModel& b,
                                                 const BeliefGrid& grid);

/// Grid maximum of the TV distance between the predictive observation laws.
FilterDistanceResult predictive_tv_gap(const PomdpModel& a, const PomdpModel& b,
                                       const BeliefGrid& grid);

struct ContractionResult {
    double ratio = 0.0; // max W1(eta(z), eta(z')) / W1(z, z')
    std::size_t argmax_i = 0, argmax_j = 0, argmax_action = 0;
};

/// Measured one-step W1 contraction factor of the filter kernel over the grid.
ContractionResult filter_contraction_ratio(const PomdpModel& model, const BeliefGrid& grid);

} // namespace beliefcert
