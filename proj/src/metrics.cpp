#include "beliefcert/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "beliefcert/lp.hpp"
#include "beliefcert/transport.hpp"

namespace beliefcert {

const char* to_string(MeasureMetric m) {
    switch (m) {
        case MeasureMetric::TV: return "tv";
        case MeasureMetric::W1: return "w1";
        case MeasureMetric::BL: return "bl";
    }
    return "?";
}

namespace {

void require_same_universe(const SupportedMeasure& p, const SupportedMeasure& q) {
    if (p.universe_size != q.universe_size)
        throw std::invalid_argument("measures live on different universes");
}

void require_normalized(const SupportedMeasure& p) {
    if (std::abs(p.total_mass() - 1.0) > 1e-9)
        throw std::invalid_argument("measure weights are not normalized");
    for (auto& [i, w] : p.atoms)
        if (w < -1e-15) throw std::invalid_argument("measure has a negative weight");
}

// Indices of the union of the two supports, ascending.
std::vector<std::size_t> support_union(const SupportedMeasure& p, const SupportedMeasure& q) {
    std::vector<std::size_t> u;
    u.reserve(p.atoms.size() + q.atoms.size());
    for (auto& [i, w] : p.atoms) u.push_back(i);
    for (auto& [i, w] : q.atoms) u.push_back(i);
    std::sort(u.begin(), u.end());
    u.erase(std::unique(u.begin(), u.end()), u.end());
    return u;
}

} // namespace

double tv_distance(const SupportedMeasure& p, const SupportedMeasure& q) {
    require_same_universe(p, q);
    const auto pv = p.to_vector();
    const auto qv = q.to_vector();
    double s = 0.0;
    for (std::size_t i = 0; i < pv.size(); ++i) s += std::abs(pv[i] - qv[i]);
    return s;
}

double w1_distance(const SupportedMeasure& p, const SupportedMeasure& q,
                   const GroundMetric& ground) {
    require_same_universe(p, q);
    require_normalized(p);
    require_normalized(q);
    if (ground.size() != p.universe_size)
        throw std::invalid_argument("ground metric size does not match universe");

    if (ground.line) {
        const auto& coord = *ground.line;
        std::vector<std::pair<double, double>> pa, qa;
        pa.reserve(p.atoms.size());
        qa.reserve(q.atoms.size());
        for (auto& [i, w] : p.atoms) pa.emplace_back(coord[i], w);
        for (auto& [i, w] : q.atoms) qa.emplace_back(coord[i], w);
        return w1_line(std::move(pa), std::move(qa));
    }

    // Balance the transportation problem explicitly so that tiny rounding in
    // the inputs cannot make it infeasible.
    std::vector<double> supply, demand;
    std::vector<std::size_t> pi, qi;
    for (auto& [i, w] : p.atoms)
        if (w > 0.0) {
            supply.push_back(w);
            pi.push_back(i);
        }
    for (auto& [i, w] : q.atoms)
        if (w > 0.0) {
            demand.push_back(w);
            qi.push_back(i);
        }
    if (supply.empty() || demand.empty()) return 0.0;
    double ds = 0.0, dd = 0.0;
    for (double w : supply) ds += w;
    for (double w : demand) dd += w;
    // Absorb rounding-level imbalance into the larger side's last atom.
    if (supply.back() + (dd - ds) >= 0.0) supply.back() += dd - ds;
    else demand.back() += ds - dd;

    std::vector<std::vector<double>> cost(supply.size(), std::vector<double>(demand.size()));
    for (std::size_t a = 0; a < supply.size(); ++a)
        for (std::size_t b = 0; b < demand.size(); ++b) cost[a][b] = ground.dist[pi[a]][qi[b]];
    return transport_optimal(supply, demand, cost).cost;
}

double bl_distance_weighted(const SupportedMeasure& p, const SupportedMeasure& q,
                            const GroundMetric& ground, double inf_weight,
                            double lip_weight) {
    require_same_universe(p, q);
    require_normalized(p);
    require_normalized(q);
    if (ground.size() != p.universe_size)
        throw std::invalid_argument("ground metric size does not match universe");

    const auto idx = support_union(p, q);
    const std::size_t n = idx.size();
    const auto pv = p.to_vector();
    const auto qv = q.to_vector();

    // Variables: f_k = fp_k - fm_k (free split), then a, b.
    // Maximize sum_k w_k f_k with w_k = p-q on the union.
    const std::size_t nv = 2 * n + 2;
    const std::size_t a_col = 2 * n;
    const std::size_t b_col = 2 * n + 1;
    std::vector<double> obj(nv, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        const double w = pv[idx[k]] - qv[idx[k]];
        obj[2 * k] = w;
        obj[2 * k + 1] = -w;
    }

    std::vector<std::vector<double>> rows;
    std::vector<double> rhs;
    auto add_row = [&](std::vector<double> r, double b) {
        rows.push_back(std::move(r));
        rhs.push_back(b);
    };
    for (std::size_t k = 0; k < n; ++k) {
        std::vector<double> r(nv, 0.0);
        r[2 * k] = 1.0;
        r[2 * k + 1] = -1.0;
        r[a_col] = -1.0;
        add_row(r, 0.0); // f_k - a <= 0
        r[2 * k] = -1.0;
        r[2 * k + 1] = 1.0;
        add_row(std::move(r), 0.0); // -f_k - a <= 0
    }
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t l = 0; l < n; ++l) {
            if (k == l) continue;
            std::vector<double> r(nv, 0.0);
            r[2 * k] = 1.0;
            r[2 * k + 1] = -1.0;
            r[2 * l] = -1.0;
            r[2 * l + 1] = 1.0;
            r[b_col] = -ground.dist[idx[k]][idx[l]];
            add_row(std::move(r), 0.0); // f_k - f_l - b d(k,l) <= 0
        }
    }
    {
        std::vector<double> r(nv, 0.0);
        r[a_col] = inf_weight;
        r[b_col] = lip_weight;
        add_row(std::move(r), 1.0);
    }

    const auto lp = simplex_maximize(obj, rows, rhs);
    if (!lp.optimal) throw std::runtime_error("bl_distance: LP solver failed (" + lp.status + ")");
    return std::max(0.0, lp.value);
}

double bl_distance(const SupportedMeasure& p, const SupportedMeasure& q,
                   const GroundMetric& ground) {
    return bl_distance_weighted(p, q, ground, 1.0, 1.0);
}

namespace {

double row_metric(const std::vector<double>& a, const std::vector<double>& b,
                  MeasureMetric metric, const GroundMetric& ground) {
    const auto p = SupportedMeasure::from_vector(a);
    const auto q = SupportedMeasure::from_vector(b);
    switch (metric) {
        case MeasureMetric::TV: {
            double s = 0.0;
            for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
            return s;
        }
        case MeasureMetric::W1: return w1_distance(p, q, ground);
        case MeasureMetric::BL: return bl_distance(p, q, ground);
    }
    return 0.0;
}

} // namespace

double kernel_distance(const TransitionKernel& a, const TransitionKernel& b,
                       MeasureMetric metric, const GroundMetric& ground) {
    if (a.num_actions() != b.num_actions() || a.num_states() != b.num_states())
        throw std::invalid_argument("kernel_distance: dimension mismatch");
    double worst = 0.0;
    for (std::size_t u = 0; u < a.num_actions(); ++u)
        for (std::size_t x = 0; x < a.num_states(); ++x)
            worst = std::max(worst, row_metric(a.row(x, u), b.row(x, u), metric, ground));
    return worst;
}

double kernel_distance_tv(const TransitionKernel& a, const TransitionKernel& b) {
    GroundMetric unused;
    unused.dist.assign(a.num_states(), std::vector<double>(a.num_states(), 0.0));
    return kernel_distance(a, b, MeasureMetric::TV, unused);
}

double channel_distance(const ObservationChannel& a, const ObservationChannel& b,
                        MeasureMetric metric, const GroundMetric& ground) {
    if (a.num_states() != b.num_states() || a.num_obs() != b.num_obs())
        throw std::invalid_argument("channel_distance: dimension mismatch");
    double worst = 0.0;
    for (std::size_t x = 0; x < a.num_states(); ++x)
        worst = std::max(worst, row_metric(a.row(x), b.row(x), metric, ground));
    return worst;
}

double channel_distance_tv(const ObservationChannel& a, const ObservationChannel& b) {
    GroundMetric unused;
    unused.dist.assign(a.num_obs(), std::vector<double>(a.num_obs(), 0.0));
    return channel_distance(a, b, MeasureMetric::TV, unused);
}

double dobrushin(const ObservationChannel& q) {
    const std::size_t n = q.num_states();
    if (n <= 1) return 1.0;
    double coeff = 1.0;
    for (std::size_t x = 0; x < n; ++x) {
        for (std::size_t y = x + 1; y < n; ++y) {
            double overlap = 0.0;
            for (std::size_t z = 0; z < q.num_obs(); ++z)
                overlap += std::min(q.probs[x][z], q.probs[y][z]);
            coeff = std::min(coeff, overlap);
        }
    }
    return std::clamp(coeff, 0.0, 1.0);
}

GroundMetric ground_of(const FiniteMetricSpace& space) {
    GroundMetric g;
    g.dist = space.dist;
    g.line = space.coords;
    return g;
}

} // namespace beliefcert
