#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

namespace beliefcert {

/**
 * Finitely supported probability measure over a ground universe of points
 * indexed 0..n-1. Atoms hold (point index, weight>=0); weights sum to 1.
 */
struct SupportedMeasure {
    std::vector<std::pair<std::size_t, double>> atoms;
    std::size_t universe_size = 0;

    static SupportedMeasure from_vector(const std::vector<double>& weights,
                                        double drop_below = 0.0);
    std::vector<double> to_vector() const;
    double total_mass() const;
};

/**
 * Ground distance matrix over the measure universe. For nested use the
 * entries are themselves W1 or BL distances between beliefs. `line` carries
 * a 1-d embedding when one exists (entries equal |line[i]-line[j]|), which
 * unlocks the exact closed-form W1 on the line.
 */
struct GroundMetric {
    std::vector<std::vector<double>> dist;
    std::optional<std::vector<double>> line;

    std::size_t size() const { return dist.size(); }
};

} // namespace beliefcert
