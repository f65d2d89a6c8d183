#include "beliefcert/filter.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace beliefcert {

namespace {

constexpr double kMergeTol = 1e-12;

bool same_belief(const Belief& a, const Belief& b, double tol = kMergeTol) {
    for (std::size_t i = 0; i < a.size(); ++i)
        if (std::abs(a[i] - b[i]) > tol) return false;
    return true;
}

} // namespace

double FilterKernelValue::total_weight() const {
    double s = 0.0;
    for (auto& [b, w] : atoms) s += w;
    return s;
}

std::vector<double> predict(const PomdpModel& model, const Belief& z, std::size_t u) {
    const std::size_t nx = model.num_states();
    std::vector<double> pred(nx, 0.0);
    for (std::size_t x0 = 0; x0 < nx; ++x0) {
        const double w = z[x0];
        if (w == 0.0) continue;
        const auto& row = model.kernel.row(x0, u);
        for (std::size_t x1 = 0; x1 < nx; ++x1) pred[x1] += w * row[x1];
    }
    return pred;
}

SupportedMeasure obs_predictive(const PomdpModel& model, const Belief& z, std::size_t u) {
    const auto pred = predict(model, z, u);
    std::vector<double> h(model.num_obs(), 0.0);
    for (std::size_t x1 = 0; x1 < pred.size(); ++x1) {
        if (pred[x1] == 0.0) continue;
        const auto& qrow = model.channel.row(x1);
        for (std::size_t y = 0; y < h.size(); ++y) h[y] += pred[x1] * qrow[y];
    }
    SupportedMeasure m;
    m.universe_size = h.size();
    for (std::size_t y = 0; y < h.size(); ++y)
        if (h[y] > 0.0) m.atoms.emplace_back(y, h[y]);
    return m;
}

Belief belief_update(const PomdpModel& model, const Belief& z, std::size_t u, std::size_t y) {
    const auto pred = predict(model, z, u);
    Belief post;
    post.weights.resize(pred.size());
    double h = 0.0;
    for (std::size_t x1 = 0; x1 < pred.size(); ++x1) {
        const double v = model.channel.probs[x1][y] * pred[x1];
        post.weights[x1] = v;
        h += v;
    }
    if (h <= 0.0) throw std::domain_error("belief_update: observation has zero probability");
    for (double& v : post.weights) v /= h;
    return post;
}

FilterKernelValue filter_kernel_at(const PomdpModel& model, const Belief& z, std::size_t u) {
    const auto pred = predict(model, z, u);
    FilterKernelValue fk;
    for (std::size_t y = 0; y < model.num_obs(); ++y) {
        Belief post;
        post.weights.resize(pred.size());
        double h = 0.0;
        for (std::size_t x1 = 0; x1 < pred.size(); ++x1) {
            const double v = model.channel.probs[x1][y] * pred[x1];
            post.weights[x1] = v;
            h += v;
        }
        if (h <= 0.0) continue;
        for (double& v : post.weights) v /= h;
        bool merged = false;
        for (auto& [b, w] : fk.atoms) {
            if (same_belief(b, post)) {
                w += h;
                merged = true;
                break;
            }
        }
        if (!merged) fk.atoms.emplace_back(std::move(post), h);
    }
    return fk;
}

namespace {
void enumerate_compositions(std::size_t n, std::size_t m, std::vector<std::size_t>& cur,
                            std::vector<Belief>& out) {
    if (cur.size() + 1 == n) {
        std::size_t used = 0;
        for (std::size_t k : cur) used += k;
        cur.push_back(m - used);
        Belief b;
        b.weights.reserve(n);
        for (std::size_t k : cur) b.weights.push_back(double(k) / double(m));
        out.push_back(std::move(b));
        cur.pop_back();
        return;
    }
    std::size_t used = 0;
    for (std::size_t k : cur) used += k;
    for (std::size_t k = 0; k <= m - used; ++k) {
        cur.push_back(k);
        enumerate_compositions(n, m, cur, out);
        cur.pop_back();
    }
}
} // namespace

BeliefGrid belief_grid(std::size_t n_states, std::size_t m) {
    if (n_states < 1 || m < 1) throw std::invalid_argument("belief_grid: n_states, m >= 1");
    BeliefGrid g;
    g.resolution = m;
    g.num_states = n_states;
    if (n_states == 1) {
        g.beliefs.push_back(Belief::vertex(1, 0));
        return g;
    }
    std::vector<std::size_t> cur;
    enumerate_compositions(n_states, m, cur, g.beliefs);
    return g;
}

std::size_t default_grid_resolution(std::size_t n_states) {
    switch (n_states) {
        case 1: return 1;
        case 2: return 20;
        case 3: return 8;
        case 4: return 6;
        default: break;
    }
    // Largest m keeping the lattice around a few thousand points.
    std::size_t m = 1;
    auto count = [&](std::size_t mm) {
        double c = 1.0;
        for (std::size_t i = 1; i < n_states; ++i)
            c *= double(mm + i) / double(i);
        return c;
    };
    while (m < 64 && count(m + 1) <= 4000.0) ++m;
    return m;
}

GroundMetric belief_ground_metric(const std::vector<Belief>& beliefs,
                                  const FiniteMetricSpace& state_space, MeasureMetric kind) {
    if (beliefs.empty()) throw std::invalid_argument("belief_ground_metric: empty belief list");
    const std::size_t n = beliefs.size();
    const GroundMetric state_ground = ground_of(state_space);
    GroundMetric g;
    g.dist.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        const auto p = SupportedMeasure::from_vector(beliefs[i].weights);
        for (std::size_t j = i + 1; j < n; ++j) {
            const auto q = SupportedMeasure::from_vector(beliefs[j].weights);
            double d = 0.0;
            switch (kind) {
                case MeasureMetric::TV: d = tv_distance(p, q); break;
                case MeasureMetric::W1: d = w1_distance(p, q, state_ground); break;
                case MeasureMetric::BL: d = bl_distance(p, q, state_ground); break;
            }
            g.dist[i][j] = g.dist[j][i] = d;
        }
    }
    return g;
}

namespace {

using PairDistance = std::function<double(const SupportedMeasure&, const SupportedMeasure&,
                                          const GroundMetric&)>;

FilterDistanceResult filter_sweep(const PomdpModel& a, const PomdpModel& b,
                                  const BeliefGrid& grid, MeasureMetric ground_kind,
                                  const PairDistance& dist) {
    if (a.num_states() != b.num_states() || a.num_actions() != b.num_actions() ||
        a.num_obs() != b.num_obs())
        throw std::invalid_argument("filter_kernel_distance: models on different spaces");
    FilterDistanceResult res;
    for (std::size_t zi = 0; zi < grid.beliefs.size(); ++zi) {
        const Belief& z = grid.beliefs[zi];
        for (std::size_t u = 0; u < a.num_actions(); ++u) {
            const auto fa = filter_kernel_at(a, z, u);
            const auto fb = filter_kernel_at(b, z, u);

            // Union of posterior supports, deduplicated within the merge
            // tolerance so the ground metric has no duplicate points.
            std::vector<Belief> support;
            auto index_of = [&](const Belief& post) {
                for (std::size_t k = 0; k < support.size(); ++k)
                    if (same_belief(support[k], post)) return k;
                support.push_back(post);
                return support.size() - 1;
            };
            std::vector<std::pair<std::size_t, double>> pa, pb;
            for (auto& [post, w] : fa.atoms) pa.emplace_back(index_of(post), w);
            for (auto& [post, w] : fb.atoms) pb.emplace_back(index_of(post), w);

            const auto ground = belief_ground_metric(support, a.state_space, ground_kind);
            SupportedMeasure p, q;
            p.universe_size = q.universe_size = support.size();
            p.atoms = std::move(pa);
            q.atoms = std::move(pb);

            const double d = dist(p, q, ground);
            if (d > res.value) {
                res.value = d;
                res.argmax_grid = zi;
                res.argmax_action = u;
            }
        }
    }
    return res;
}

} // namespace

FilterDistanceResult filter_kernel_distance(const PomdpModel& a, const PomdpModel& b,
                                            const BeliefGrid& grid, MeasureMetric kind) {
    if (kind == MeasureMetric::TV)
        throw std::invalid_argument("filter_kernel_distance: kind must be BL or W1");
    PairDistance d;
    if (kind == MeasureMetric::BL)
        d = [](const SupportedMeasure& p, const SupportedMeasure& q, const GroundMetric& g) {
            return bl_distance(p, q, g);
        };
    else
        d = [](const SupportedMeasure& p, const SupportedMeasure& q, const GroundMetric& g) {
            return w1_distance(p, q, g);
        };
    return filter_sweep(a, b, grid, kind, d);
}

FilterDistanceResult filter_kernel_distance_rho2(const PomdpModel& a, const PomdpModel& b,
                                                 const BeliefGrid& grid) {
    PairDistance d = [](const SupportedMeasure& p, const SupportedMeasure& q,
                        const GroundMetric& g) {
        return bl_distance_weighted(p, q, g, 1.0, 2.0);
    };
    return filter_sweep(a, b, grid, MeasureMetric::BL, d);
}

FilterDistanceResult predictive_tv_gap(const PomdpModel& a, const PomdpModel& b,
                                       const BeliefGrid& grid) {
    if (a.num_states() != b.num_states() || a.num_actions() != b.num_actions() ||
        a.num_obs() != b.num_obs())
        throw std::invalid_argument("predictive_tv_gap: models on different spaces");
    FilterDistanceResult res;
    for (std::size_t zi = 0; zi < grid.beliefs.size(); ++zi) {
        for (std::size_t u = 0; u < a.num_actions(); ++u) {
            const double d = tv_distance(obs_predictive(a, grid.beliefs[zi], u),
                                         obs_predictive(b, grid.beliefs[zi], u));
            if (d > res.value) {
                res.value = d;
                res.argmax_grid = zi;
                res.argmax_action = u;
            }
        }
    }
    return res;
}

ContractionResult filter_contraction_ratio(const PomdpModel& model, const BeliefGrid& grid) {
    ContractionResult res;
    const GroundMetric state_ground = ground_of(model.state_space);
    const std::size_t n = grid.beliefs.size();

    // Cache filter values per (z,u).
    std::vector<std::vector<FilterKernelValue>> fk(n);
    for (std::size_t i = 0; i < n; ++i) {
        fk[i].reserve(model.num_actions());
        for (std::size_t u = 0; u < model.num_actions(); ++u)
            fk[i].push_back(filter_kernel_at(model, grid.beliefs[i], u));
    }

    for (std::size_t i = 0; i < n; ++i) {
        const auto zi = SupportedMeasure::from_vector(grid.beliefs[i].weights);
        for (std::size_t j = i + 1; j < n; ++j) {
            const auto zj = SupportedMeasure::from_vector(grid.beliefs[j].weights);
            const double base = w1_distance(zi, zj, state_ground);
            if (base <= 1e-12) continue;
            for (std::size_t u = 0; u < model.num_actions(); ++u) {
                std::vector<Belief> support;
                auto index_of = [&](const Belief& post) {
                    for (std::size_t k = 0; k < support.size(); ++k)
                        if (same_belief(support[k], post)) return k;
                    support.push_back(post);
                    return support.size() - 1;
                };
                SupportedMeasure p, q;
                for (auto& [post, w] : fk[i][u].atoms) p.atoms.emplace_back(index_of(post), w);
                for (auto& [post, w] : fk[j][u].atoms) q.atoms.emplace_back(index_of(post), w);
                p.universe_size = q.universe_size = support.size();
                const auto ground =
                    belief_ground_metric(support, model.state_space, MeasureMetric::W1);
                const double ratio = w1_distance(p, q, ground) / base;
                if (ratio > res.ratio) {
                    res.ratio = ratio;
                    res.argmax_i = i;
                    res.argmax_j = j;
                    res.argmax_action = u;
                }
            }
        }
    }
    return res;
}

} // namespace beliefcert
