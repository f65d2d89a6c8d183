#pragma once

#include "beliefcert/measure.hpp"
#include "beliefcert/model.hpp"

namespace beliefcert {

enum class MeasureMetric { TV, W1, BL };

const char* to_string(MeasureMetric m);

/**
 * Total variation in the test-function convention: the supremum of
 * integral differences over ||f||_inf <= 1, which on a finite space equals
 * sum_x |p(x)-q(x)| and ranges over [0,2].
 */
double tv_distance(const SupportedMeasure& p, const SupportedMeasure& q);

/**
 * Exact Wasserstein-1 distance: optimal-transport cost under the ground
 * metric. Uses the closed form on the line when the ground metric carries a
 * 1-d embedding, the transportation simplex otherwise. Throws if the inputs
 * are not normalized probability measures over the same universe.
 */
double w1_distance(const SupportedMeasure& p, const SupportedMeasure& q,
                   const GroundMetric& ground);

/**
 * Bounded-Lipschitz distance: the value of
 *   max  sum_x f(x) (p(x)-q(x))
 *   s.t. |f(x)| <= a,  |f(x)-f(y)| <= b d(x,y),  a + b <= 1,  a,b >= 0,
 * solved as a single LP over the union of the supports.
 */
double bl_distance(const SupportedMeasure& p, const SupportedMeasure& q,
                   const GroundMetric& ground);

/**
 * Same LP with weighted budget  inf_weight*a + lip_weight*b <= 1.
 * (1,1) is the bounded-Lipschitz distance; (1,2) is the rho_2 diagnostic
 * metric recorded alongside the filter-distance certifications.
 */
double bl_distance_weighted(const SupportedMeasure& p, const SupportedMeasure& q,
                            const GroundMetric& ground, double inf_weight,
                            double lip_weight);

/**
 * Uniform kernel metric: sup over (state, action) of the chosen distance
 * between matching rows. Exact enumeration. `ground` is required for W1/BL.
 */
double kernel_distance(const TransitionKernel& a, const TransitionKernel& b,
                       MeasureMetric metric, const GroundMetric& ground);
double kernel_distance_tv(const TransitionKernel& a, const TransitionKernel& b);

/// Uniform channel metric: rows indexed by state only.
double channel_distance(const ObservationChannel& a, const ObservationChannel& b,
                        MeasureMetric metric, const GroundMetric& ground);
double channel_distance_tv(const ObservationChannel& a, const ObservationChannel& b);

/**
 * Dobrushin coefficient of a channel: min over state pairs (x,y) of
 * sum_z min(Q(z|x), Q(z|y)). The singleton-partition form is exact on finite
 * spaces; always in [0,1], and 1 for a single-state space.
 */
double dobrushin(const ObservationChannel& q);

/// Ground metric of a finite metric space (copies dist and any 1-d embedding).
GroundMetric ground_of(const FiniteMetricSpace& space);

} // namespace beliefcert
