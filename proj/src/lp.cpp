#include "beliefcert/lp.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace beliefcert {

namespace {
constexpr double kPivotEps = 1e-11;
} // namespace

LpResult simplex_maximize(const std::vector<double>& objective,
                          const std::vector<std::vector<double>>& constraints,
                          const std::vector<double>& rhs) {
    const std::size_t n = objective.size();
    const std::size_t m = constraints.size();
    if (rhs.size() != m) throw std::invalid_argument("simplex: rhs size mismatch");
    for (double b : rhs)
        if (b < 0.0) throw std::invalid_argument("simplex: rhs must be nonnegative");

    // Tableau: m constraint rows + objective row; columns = n vars, m slacks, rhs.
    const std::size_t cols = n + m + 1;
    std::vector<std::vector<double>> t(m + 1, std::vector<double>(cols, 0.0));
    for (std::size_t i = 0; i < m; ++i) {
        if (constraints[i].size() != n)
            throw std::invalid_argument("simplex: constraint row size mismatch");
        for (std::size_t j = 0; j < n; ++j) t[i][j] = constraints[i][j];
        t[i][n + i] = 1.0;
        t[i][cols - 1] = rhs[i];
    }
    for (std::size_t j = 0; j < n; ++j) t[m][j] = -objective[j];

    std::vector<std::size_t> basis(m);
    for (std::size_t i = 0; i < m; ++i) basis[i] = n + i;

    const std::size_t dantzig_budget = 50 * (m + n) + 1000;
    const std::size_t hard_cap = 400 * (m + n) + 20000;

    LpResult res;
    for (std::size_t iter = 0;; ++iter) {
        if (iter > hard_cap) {
            res.status = "iteration_limit";
            return res;
        }
        const bool bland = iter > dantzig_budget;

        // entering column
        std::size_t pivot_col = cols; // sentinel
        double best = -kPivotEps;
        for (std::size_t j = 0; j + 1 < cols; ++j) {
            if (t[m][j] < best) {
                best = t[m][j];
                pivot_col = j;
                if (bland) break;
            } else if (bland && t[m][j] < -kPivotEps) {
                pivot_col = j;
                break;
            }
        }
        if (pivot_col == cols) break; // optimal

        // Ratio test. Among near-tied ratios prefer the largest pivot element
        // (smallest basis index under Bland) so degenerate pivots on tiny
        // coefficients cannot corrupt the tableau.
        std::size_t pivot_row = m;
        double best_ratio = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < m; ++i) {
            if (t[i][pivot_col] > kPivotEps) {
                const double ratio = t[i][cols - 1] / t[i][pivot_col];
                bool take = false;
                if (ratio < best_ratio - 1e-12) take = true;
                else if (ratio < best_ratio + 1e-12 && pivot_row != m) {
                    if (bland) take = basis[i] < basis[pivot_row];
                    else take = t[i][pivot_col] > t[pivot_row][pivot_col];
                }
                if (take || pivot_row == m) {
                    best_ratio = std::min(best_ratio, ratio);
                    pivot_row = i;
                }
            }
        }
        if (pivot_row == m) {
            res.status = "unbounded";
            return res;
        }

        // pivot
        const double piv = t[pivot_row][pivot_col];
        for (std::size_t j = 0; j < cols; ++j) t[pivot_row][j] /= piv;
        for (std::size_t i = 0; i <= m; ++i) {
            if (i == pivot_row) continue;
            const double factor = t[i][pivot_col];
            if (factor == 0.0) continue;
            for (std::size_t j = 0; j < cols; ++j) t[i][j] -= factor * t[pivot_row][j];
            t[i][pivot_col] = 0.0;
        }
        basis[pivot_row] = pivot_col;
    }

    res.x.assign(n, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        if (basis[i] < n) res.x[basis[i]] = t[i][cols - 1];
    res.value = t[m][cols - 1];
    res.optimal = true;
    res.status = "optimal";
    return res;
}

} // namespace beliefcert
