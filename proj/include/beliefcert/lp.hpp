#pragma once

#include <string>
#include <vector>

namespace beliefcert {

struct LpResult {
    double value = 0.0;
    std::vector<double> x;
    bool optimal = false;
    std::string status; // "optimal", "unbounded", "iteration_limit"
};

/**
 * Dense primal simplex for   max c.x  s.t.  A x <= b,  x >= 0,
 * with b >= 0 so the slack basis is feasible from the start.
 *
 * Deterministic: Dantzig pivoting with lowest-index tie-breaks, switching to
 * Bland's rule after a fixed iteration budget so termination is guaranteed.
 * Sized for the small metric LPs in this project (hundreds of rows).
 */
LpResult simplex_maximize(const std::vector<double>& objective,
                          const std::vector<std::vector<double>>& constraints,
                          const std::vector<double>& rhs);

} // namespace beliefcert
