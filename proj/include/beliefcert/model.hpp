#pragma once

#include <optional>
#include <string>
#include <vector>

#include "beliefcert/metric_space.hpp"

namespace beliefcert {

/// Probability vector over the states of a model. Nonnegative, sums to 1.
struct Belief {
    std::vector<double> weights;

    std::size_t size() const { return weights.size(); }
    double operator[](std::size_t i) const { return weights[i]; }

    static Belief uniform(std::size_t n);
    static Belief vertex(std::size_t n, std::size_t i);
};

/// State transition kernel: probs[a][x] is the row T(.|x,a) over next states.
struct TransitionKernel {
    std::vector<std::vector<std::vector<double>>> probs;

    std::size_t num_actions() const { return probs.size(); }
    std::size_t num_states() const { return probs.empty() ? 0 : probs[0].size(); }
    const std::vector<double>& row(std::size_t state, std::size_t action) const {
        return probs[action][state];
    }
};

/// Observation channel: probs[x] is the row Q(.|x) over observations.
/// Action-independent by construction.
struct ObservationChannel {
    std::vector<std::vector<double>> probs;

    std::size_t num_states() const { return probs.size(); }
    std::size_t num_obs() const { return probs.empty() ? 0 : probs[0].size(); }
    const std::vector<double>& row(std::size_t state) const { return probs[state]; }
};

/**
 * Finite partially observed model: metric state and observation spaces,
 * transition kernel, observation channel, stage cost c(x,u), prior, and an
 * optional discount factor. Immutable by convention once built.
 */
struct PomdpModel {
    FiniteMetricSpace state_space;
    std::vector<std::string> action_labels;
    FiniteMetricSpace obs_space;
    TransitionKernel kernel;
    ObservationChannel channel;
    std::vector<std::vector<double>> cost; // cost[x][a]
    Belief prior;
    std::optional<double> discount;

    std::size_t num_states() const { return state_space.size(); }
    std::size_t num_actions() const { return action_labels.size(); }
    std::size_t num_obs() const { return obs_space.size(); }
    double cost_sup_norm() const;
};

/**
 * Validates every structural invariant of a model: metric axioms on both
 * spaces, row-stochasticity of kernel and channel (1e-12), dimension
 * agreement, finite costs, normalized prior. Returns one description per
 * violation, with its location; empty means valid. Never throws.
 */
std::vector<std::string> validate_model(const PomdpModel& model);

/// Row-sum / nonnegativity check shared by kernel and channel validation.
bool is_stochastic_row(const std::vector<double>& row, double tol = 1e-12);

} // namespace beliefcert
