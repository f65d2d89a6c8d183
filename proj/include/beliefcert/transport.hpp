#pragma once

#include <cstddef>
#include <tuple>
#include <vector>

namespace beliefcert {

struct TransportResult {
    double cost = 0.0;
    std::vector<std::tuple<std::size_t, std::size_t, double>> plan;
    std::vector<double> dual_u, dual_v;
};

/**
 * Exact balanced transportation problem
 *     min sum_ij flow_ij cost_ij   s.t. row sums = supply, col sums = demand,
 * solved with the transportation simplex (northwest-corner start, spanning
 * tree basis, most-negative-reduced-cost entering arc with lexicographic
 * tie-breaks, Bland fallback). Throws if the marginals do not balance.
 */
TransportResult transport_optimal(const std::vector<double>& supply,
                                  const std::vector<double>& demand,
                                  const std::vector<std::vector<double>>& cost);

/// Exact W1 on the real line between two weighted atom lists (coord, weight).
double w1_line(std::vector<std::pair<double, double>> p,
               std::vector<std::pair<double, double>> q);

} // namespace beliefcert
