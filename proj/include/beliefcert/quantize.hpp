#pragma once

#include <optional>
#include <string>
#include <vector>

#include "beliefcert/measure.hpp"
#include "beliefcert/model.hpp"

namespace beliefcert {

/**
 * Partition of a finite metric space into disjoint, exhaustive cells, each
 * with a representative member. Interval cells remember their continuous
 * bounds; max_cell_diameter is the interval width for those, the largest
 * pairwise member distance otherwise.
 */
struct Partition {
    struct Cell {
        std::vector<std::size_t> members;
        std::optional<std::pair<double, double>> interval;
    };
    std::vector<Cell> cells;
    std::vector<std::size_t> representatives;
    double max_cell_diameter = 0.0;

    std::size_t num_cells() const { return cells.size(); }
    /// cell index containing each point of the partitioned space
    std::vector<std::size_t> cell_of(std::size_t space_size) const;
    std::vector<std::string> violations(const FiniteMetricSpace& space) const;

    /**
     * n_cells equal-width interval cells over the coordinate range of a 1-d
     * embedded space. Points on a boundary go to the lower cell; every cell
     * must receive at least one point. Representative = member closest to the
     * cell midpoint, lowest index on ties.
     */
    static Partition uniform_intervals(const FiniteMetricSpace& space, std::size_t n_cells);

    /// Partition from explicit member groups; medoid representatives.
    static Partition from_groups(const FiniteMetricSpace& space,
                                 std::vector<std::vector<std::size_t>> groups);

    /// One cell per point (identity quantization).
    static Partition singletons(const FiniteMetricSpace& space);
};

/**
 * 1-d continuous model on an interval, represented for computation on a fine
 * midpoint grid. The transition kernel is a truncated normal centred at
 * x + drift(u); the channel is a truncated normal in y centred at x; the
 * stage cost is x - drift(u), shifted to be nonnegative.
 */
struct ContinuousModelAdapter {
    enum class Kind { truncated_normal_kernel, additive_gaussian_channel, table_on_fine_grid };
    Kind kind = Kind::truncated_normal_kernel;

    double domain_lo = 0.0, domain_hi = 1.0;
    std::size_t fine_grid_size = 400;
    double sigma = 1.0;                  // kernel noise
    std::vector<double> action_offsets{0.0};
    double obs_sigma = 1.0;              // channel noise
    std::size_t obs_grid_size = 0;       // 0 -> fine_grid_size
    int gl_nodes = 16;                   // Gauss-Legendre nodes per fine cell
    std::optional<PomdpModel> table;     // for Kind::table_on_fine_grid
};

struct DiscretizedModel {
    PomdpModel model;
    double integration_defect = 0.0; // max |row mass - 1| before renormalization
};

/**
 * Fine-grid reference model for a continuous adapter. Kernel and channel rows
 * come from fixed-node Gauss-Legendre integration of the truncated-normal
 * density over each fine cell; rows are renormalized and the largest defect
 * recorded. Throws if any defect exceeds 1e-6.
 */
DiscretizedModel discretize_reference(const ContinuousModelAdapter& adapter);

/// Truncated-normal density on [lo,hi] (standard CDF oracle for tests).
double truncated_normal_cdf_mass(double a, double b, double mean, double sigma, double lo,
                                 double hi);

struct StateQuantization {
    PomdpModel coarse;  // model on the representative states (obs space unchanged)
    double l_xn = 0.0;  // recorded max cell diameter
};

/**
 * Reference-weighted state quantization: coarse kernel rows are cell averages
 * of fine rows aggregated into cell masses, the channel and cost rows are
 * cell averages, the prior aggregates cell mass. Throws (naming the cell) if
 * the reference measure gives some cell zero mass.
 */
StateQuantization quantize_states(const PomdpModel& fine, const Partition& part,
                                  const SupportedMeasure& reference);

/// Uniform reference over each cell's fine points (the default).
SupportedMeasure uniform_reference(const Partition& part, std::size_t space_size);

/**
 * Extends a coarse kernel back to the fine space: the row of any fine x is
 * the coarse row of its cell, with mass placed at representatives.
 */
TransitionKernel lift_coarse_kernel(const TransitionKernel& coarse, const Partition& part,
                                    const FiniteMetricSpace& fine_space);

/**
 * The state-quantized model expressed on the fine spaces: lifted kernel and
 * cell-averaged channel rows (constant on cells). Cost and prior stay those
 * of the fine model so value comparisons share one stage cost.
 */
PomdpModel lifted_state_model(const PomdpModel& fine, const Partition& part,
                              const SupportedMeasure& reference);

struct ObservationQuantization {
    PomdpModel coarse;                // obs space = representatives, rows summed over cells
    ObservationChannel intermediate;  // on the fine obs space, cell-uniform redistribution
    double l_yn = 0.0;
};

/// Observation-space quantization; state space unchanged.
ObservationQuantization quantize_observations(const PomdpModel& fine, const Partition& part);

struct JointQuantization {
    PomdpModel coarse;        // n_x states, n_y observations
    PomdpModel lifted;        // on the fine spaces: lifted kernel + intermediate channel
    double l_xn = 0.0, l_yn = 0.0;
};

/// Composition of state and observation quantization, both diameters recorded.
JointQuantization joint_quantize(const PomdpModel& fine, const Partition& state_part,
                                 const Partition& obs_part, const SupportedMeasure& reference);

} // namespace beliefcert
