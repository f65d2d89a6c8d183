#pragma once

#include <optional>

#include "beliefcert/model.hpp"

namespace beliefcert {

/**
 * Lipschitz moduli and contraction constants of a model. Every bound formula
 * reads from here. All moduli are per unit state distance; a single-state
 * space has no pairs, so every modulus is 0 and the Dobrushin coefficient 1.
 */
struct ModelConstants {
    double alpha = 0.0;       // TV-Lipschitz modulus of the transition kernel
    double theta = 0.0;       // W1-Lipschitz modulus of the transition kernel
    double l_q = 0.0;         // TV-Lipschitz modulus of the channel
    double k1 = 0.0;          // Lipschitz modulus of the stage cost in x
    double dobrushin_q = 1.0; // Dobrushin coefficient of the channel, in [0,1]
    double diameter = 0.0;    // state-space diameter
    double k2 = 0.0;          // filter contraction constant, alpha*D*(3-2*dob)/2
    // Lipschitz modulus of the observation density in y; only defined when the
    // observation space is a uniformly spaced 1-d grid.
    std::optional<double> alpha_y;
};

/// Closed form for the filter contraction constant.
double k2_wasserstein(double alpha, double diameter, double dobrushin_q);

/**
 * Measures every constant by exhaustive pair enumeration (the spaces are
 * small by design; no sampling). The model must be valid.
 */
ModelConstants derive_constants(const PomdpModel& model);

/// Smallest nonzero pairwise state distance (infinity on a single point).
double min_pair_distance(const FiniteMetricSpace& space);

} // namespace beliefcert
