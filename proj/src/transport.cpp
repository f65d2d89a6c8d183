#include "beliefcert/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace beliefcert {

namespace {

constexpr double kBalanceTol = 1e-9;
constexpr double kReducedCostTol = 1e-11;

struct BasicCell {
    std::size_t i, j;
    double flow;
};

// Tree walk assigning duals u_i + v_j = c_ij over the basic cells.
void compute_duals(const std::vector<BasicCell>& basis, std::size_t m, std::size_t n,
                   const std::vector<std::vector<double>>& cost, std::vector<double>& u,
                   std::vector<double>& v) {
    u.assign(m, std::numeric_limits<double>::quiet_NaN());
    v.assign(n, std::numeric_limits<double>::quiet_NaN());
    u[0] = 0.0;
    bool progress = true;
    while (progress) {
        progress = false;
        for (const auto& b : basis) {
            const bool ku = !std::isnan(u[b.i]);
            const bool kv = !std::isnan(v[b.j]);
            if (ku && !kv) {
                v[b.j] = cost[b.i][b.j] - u[b.i];
                progress = true;
            } else if (!ku && kv) {
                u[b.i] = cost[b.i][b.j] - v[b.j];
                progress = true;
            }
        }
    }
}

// Unique path between row node i0 and column node j0 through the basis tree.
// Returns basis indices along the path, starting with a cell on row i0 and
// ending with a cell on column j0.
std::vector<std::size_t> tree_path(const std::vector<BasicCell>& basis, std::size_t m,
                                   std::size_t n, std::size_t i0, std::size_t j0) {
    // Nodes: rows 0..m-1, columns m..m+n-1. Edges are the basic cells.
    const std::size_t nodes = m + n;
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> adj(nodes);
    for (std::size_t k = 0; k < basis.size(); ++k) {
        const auto& b = basis[k];
        adj[b.i].emplace_back(m + b.j, k);
        adj[m + b.j].emplace_back(b.i, k);
    }
    std::vector<std::size_t> parent_edge(nodes, std::size_t(-1));
    std::vector<std::size_t> parent_node(nodes, std::size_t(-1));
    std::vector<bool> seen(nodes, false);
    std::vector<std::size_t> queue{i0};
    seen[i0] = true;
    for (std::size_t head = 0; head < queue.size(); ++head) {
        const std::size_t cur = queue[head];
        if (cur == m + j0) break;
        for (auto& [next, edge] : adj[cur]) {
            if (!seen[next]) {
                seen[next] = true;
                parent_edge[next] = edge;
                parent_node[next] = cur;
                queue.push_back(next);
            }
        }
    }
    if (!seen[m + j0]) throw std::runtime_error("transport: basis lost connectivity");
    std::vector<std::size_t> path;
    std::size_t cur = m + j0;
    while (cur != i0) {
        path.push_back(parent_edge[cur]);
        cur = parent_node[cur];
    }
    std::reverse(path.begin(), path.end());
    return path;
}

} // namespace

TransportResult transport_optimal(const std::vector<double>& supply,
                                  const std::vector<double>& demand,
                                  const std::vector<std::vector<double>>& cost) {
    const std::size_t m = supply.size();
    const std::size_t n = demand.size();
    if (m == 0 || n == 0) throw std::invalid_argument("transport: empty marginals");
    if (cost.size() != m) throw std::invalid_argument("transport: cost row count mismatch");
    for (const auto& row : cost)
        if (row.size() != n) throw std::invalid_argument("transport: cost column mismatch");

    double total_s = 0.0, total_d = 0.0;
    for (double s : supply) {
        if (s < -1e-15) throw std::invalid_argument("transport: negative supply");
        total_s += s;
    }
    for (double d : demand) {
        if (d < -1e-15) throw std::invalid_argument("transport: negative demand");
        total_d += d;
    }
    if (std::abs(total_s - total_d) > kBalanceTol)
        throw std::invalid_argument("transport: marginals do not balance");

    // Northwest-corner start: exactly m+n-1 basic cells, degenerate zeros kept.
    std::vector<BasicCell> basis;
    basis.reserve(m + n - 1);
    {
        std::vector<double> s = supply, d = demand;
        std::size_t i = 0, j = 0;
        while (true) {
            const double f = std::min(s[i], d[j]);
            basis.push_back({i, j, f});
            s[i] -= f;
            d[j] -= f;
            if (i == m - 1 && j == n - 1) break;
            if (j == n - 1) ++i;
            else if (i == m - 1) ++j;
            else if (s[i] <= 1e-15) ++i;
            else ++j;
        }
    }

    std::vector<double> u, v;
    const std::size_t dantzig_budget = 60 * (m + n) + 500;
    const std::size_t hard_cap = 600 * (m + n) + 20000;

    for (std::size_t iter = 0;; ++iter) {
        if (iter > hard_cap) throw std::runtime_error("transport: iteration limit reached");
        compute_duals(basis, m, n, cost, u, v);

        const bool bland = iter > dantzig_budget;
        std::size_t ei = m, ej = n;
        double most_negative = -kReducedCostTol;
        for (std::size_t i = 0; i < m && (ei == m || !bland); ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                const double r = cost[i][j] - u[i] - v[j];
                if (r < most_negative) {
                    most_negative = r;
                    ei = i;
                    ej = j;
                    if (bland) break;
                }
            }
        }
        if (ei == m) break; // optimal

        // Cycle: entering arc plus the tree path from its row to its column.
        const auto path = tree_path(basis, m, n, ei, ej);
        // Signs alternate along the path; the first path cell shares row ei and
        // gets '-', the entering cell gets '+'.
        double theta = std::numeric_limits<double>::infinity();
        std::size_t leave = basis.size();
        for (std::size_t k = 0; k < path.size(); k += 2) {
            const auto& b = basis[path[k]];
            if (b.flow < theta - 1e-15 ||
                (b.flow < theta + 1e-15 &&
                 (leave == basis.size() || std::make_pair(b.i, b.j) <
                                               std::make_pair(basis[leave].i, basis[leave].j)))) {
                theta = b.flow;
                leave = path[k];
            }
        }
        for (std::size_t k = 0; k < path.size(); ++k) {
            if (k % 2 == 0) basis[path[k]].flow -= theta;
            else basis[path[k]].flow += theta;
        }
        basis[leave] = {ei, ej, theta};
    }

    TransportResult res;
    res.dual_u = u;
    res.dual_v = v;
    for (const auto& b : basis) {
        if (b.flow > 0.0) {
            res.cost += b.flow * cost[b.i][b.j];
            res.plan.emplace_back(b.i, b.j, b.flow);
        }
    }
    return res;
}

double w1_line(std::vector<std::pair<double, double>> p,
               std::vector<std::pair<double, double>> q) {
    // Signed atom list sorted by coordinate; W1 = integral of |CDF difference|.
    std::vector<std::pair<double, double>> atoms;
    atoms.reserve(p.size() + q.size());
    for (auto& [x, w] : p) atoms.emplace_back(x, w);
    for (auto& [x, w] : q) atoms.emplace_back(x, -w);
    std::sort(atoms.begin(), atoms.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    double total = 0.0, cum = 0.0;
    for (std::size_t k = 0; k + 1 < atoms.size(); ++k) {
        cum += atoms[k].second;
        total += std::abs(cum) * (atoms[k + 1].first - atoms[k].first);
    }
    return total;
}

} // namespace beliefcert
