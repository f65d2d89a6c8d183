#pragma once

#include <optional>
#include <string>
#include <vector>

namespace beliefcert {

/**
 * Finite metric space: labelled points with an explicit distance matrix.
 *
 * When the points come with 1-d coordinates (interval models), `coords`
 * carries them; Wasserstein computations use the closed-form line solver
 * in that case, the distance matrix otherwise.
 */
struct FiniteMetricSpace {
    std::vector<std::string> labels;
    std::vector<std::vector<double>> dist;
    // 1-d embedding of the points, if known. dist[i][j] == |coords[i]-coords[j]|.
    std::optional<std::vector<double>> coords;

    std::size_t size() const { return labels.size(); }
    double diameter() const;

    // Every metric-axiom violation, as human-readable strings naming indices.
    std::vector<std::string> violations() const;

    static FiniteMetricSpace from_coords(std::vector<double> points,
                                         std::vector<std::string> labels = {});
    static FiniteMetricSpace from_matrix(std::vector<std::vector<double>> d,
                                         std::vector<std::string> labels = {});
};

} // namespace beliefcert
