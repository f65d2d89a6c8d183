#include "beliefcert/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "beliefcert/transport.hpp"

namespace beliefcert {

namespace {

// Binomial small enough for lattice ranking (m+n stays tiny).
std::size_t binom(std::size_t n, std::size_t k) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    std::size_t r = 1;
    for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

std::size_t compositions(std::size_t total, std::size_t parts) {
    return binom(total + parts - 1, parts - 1);
}

// Rank of a lattice composition in the lexicographic enumeration order
// used by belief_grid.
std::size_t composition_rank(const std::vector<std::size_t>& ks, std::size_t m) {
    const std::size_t n = ks.size();
    std::size_t pos = 0, s = m;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        for (std::size_t v = 0; v < ks[i]; ++v) pos += compositions(s - v, n - 1 - i);
        s -= ks[i];
    }
    return pos;
}

// L1-nearest lattice point k/m: floor then largest-remainder allocation.
std::vector<std::size_t> round_to_lattice(const Belief& z, std::size_t m) {
    const std::size_t n = z.size();
    std::vector<std::size_t> ks(n);
    std::vector<std::pair<double, std::size_t>> frac(n);
    std::size_t assigned = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double scaled = std::max(0.0, z[i]) * double(m);
        const double fl = std::floor(scaled);
        ks[i] = std::size_t(fl);
        assigned += ks[i];
        frac[i] = {scaled - fl, i};
    }
    // distribute the remaining units to the largest fractional parts
    std::sort(frac.begin(), frac.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    std::size_t remaining = m > assigned ? m - assigned : 0;
    for (std::size_t r = 0; r < remaining; ++r) ks[frac[r % n].second] += 1;
    return ks;
}

double l1_distance(const Belief& a, const Belief& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
    return s;
}

double w1_between(const Belief& a, const Belief& b, const FiniteMetricSpace& space) {
    return w1_distance(SupportedMeasure::from_vector(a.weights),
                       SupportedMeasure::from_vector(b.weights), ground_of(space));
}

} // namespace

std::size_t snap_to_grid(const BeliefGrid& grid, const Belief& z, SnapMetric snap,
                         const FiniteMetricSpace* state_space) {
    const std::size_t n = grid.num_states;
    const bool full_lattice =
        grid.resolution > 0 && n == z.size() &&
        grid.beliefs.size() == compositions(grid.resolution, n);
    if (snap == SnapMetric::L1 && full_lattice) {
        const auto ks = round_to_lattice(z, grid.resolution);
        return composition_rank(ks, grid.resolution);
    }
    if (snap == SnapMetric::W1 && state_space == nullptr)
        throw std::invalid_argument("snap_to_grid: W1 snapping needs the state space");
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid.beliefs.size(); ++i) {
        const double d = snap == SnapMetric::L1 ? l1_distance(grid.beliefs[i], z)
                                                : w1_between(grid.beliefs[i], z, *state_space);
        if (d < best_d - 1e-15) {
            best_d = d;
            best = i;
        }
    }
    return best;
}

BeliefMdp build_belief_mdp(const PomdpModel& model, const BeliefGrid& grid, SnapMetric snap) {
    BeliefMdp bmdp;
    bmdp.grid = grid;
    bmdp.num_actions = model.num_actions();
    const std::size_t nz = grid.beliefs.size();
    const std::size_t nu = bmdp.num_actions;

    bmdp.stage_cost.assign(nz, std::vector<double>(nu, 0.0));
    bmdp.trans.assign(nz, std::vector<std::vector<std::pair<std::size_t, double>>>(nu));

    for (std::size_t zi = 0; zi < nz; ++zi) {
        const Belief& z = grid.beliefs[zi];
        for (std::size_t u = 0; u < nu; ++u) {
            double c = 0.0;
            for (std::size_t x = 0; x < model.num_states(); ++x)
                c += model.cost[x][u] * z[x];
            bmdp.stage_cost[zi][u] = c;

            const auto fk = filter_kernel_at(model, z, u);
            std::vector<double> dense; // accumulate by grid index, sparse later
            std::vector<std::pair<std::size_t, double>> row;
            for (const auto& [post, w] : fk.atoms) {
                const std::size_t gi = snap_to_grid(grid, post, snap, &model.state_space);
                bmdp.grid_defect_l1 =
                    std::max(bmdp.grid_defect_l1, l1_distance(post, grid.beliefs[gi]));
                bmdp.grid_defect_w1 = std::max(
                    bmdp.grid_defect_w1, w1_between(post, grid.beliefs[gi], model.state_space));
                bool merged = false;
                for (auto& [idx, wt] : row)
                    if (idx == gi) {
                        wt += w;
                        merged = true;
                        break;
                    }
                if (!merged) row.emplace_back(gi, w);
            }
            std::sort(row.begin(), row.end());
            bmdp.trans[zi][u] = std::move(row);
        }
    }
    return bmdp;
}

namespace {

double sweep(const BeliefMdp& bmdp, double beta, const std::vector<double>& v,
             std::vector<double>& out, Policy* policy) {
    const std::size_t nz = bmdp.grid.beliefs.size();
    double delta = 0.0;
    for (std::size_t z = 0; z < nz; ++z) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t best_u = 0;
        for (std::size_t u = 0; u < bmdp.num_actions; ++u) {
            double q = bmdp.stage_cost[z][u];
            for (const auto& [t, p] : bmdp.trans[z][u]) q += beta * p * v[t];
            if (q < best) {
                best = q;
                best_u = u;
            }
        }
        if (policy) policy->action[z] = best_u;
        delta = std::max(delta, std::abs(best - v[z]));
        out[z] = best;
    }
    return delta;
}

double sweep_policy(const BeliefMdp& bmdp, double beta, const Policy& policy,
                    const std::vector<double>& v, std::vector<double>& out) {
    const std::size_t nz = bmdp.grid.beliefs.size();
    double delta = 0.0;
    for (std::size_t z = 0; z < nz; ++z) {
        const std::size_t u = policy.action[z];
        double q = bmdp.stage_cost[z][u];
        for (const auto& [t, p] : bmdp.trans[z][u]) q += beta * p * v[t];
        delta = std::max(delta, std::abs(q - v[z]));
        out[z] = q;
    }
    return delta;
}

double stop_threshold(double beta, double tol) { return tol * (1.0 - beta) / (2.0 * beta); }

} // namespace

ViResult value_iteration(const BeliefMdp& bmdp, double beta, double tol) {
    if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("value_iteration: beta in (0,1)");
    if (!(tol > 0.0)) throw std::invalid_argument("value_iteration: tol > 0");
    const std::size_t nz = bmdp.grid.beliefs.size();
    ViResult res;
    res.policy.action.assign(nz, 0);
    std::vector<double> v(nz, 0.0), next(nz, 0.0);
    const double threshold = stop_threshold(beta, tol);
    for (std::size_t iter = 0; iter < 2'000'000; ++iter) {
        const double delta = sweep(bmdp, beta, v, next, &res.policy);
        v.swap(next);
        res.value.step_deltas.push_back(delta);
        res.value.iterations = iter + 1;
        res.value.residual = delta;
        if (delta <= threshold) {
            res.value.values = v;
            res.value.beta = beta;
            return res;
        }
    }
    throw std::runtime_error("value_iteration: iteration cap reached");
}

ValueFunction policy_evaluation(const BeliefMdp& bmdp, const Policy& policy, double beta,
                                double tol) {
    if (!(beta > 0.0 && beta < 1.0))
        throw std::invalid_argument("policy_evaluation: beta in (0,1)");
    const std::size_t nz = bmdp.grid.beliefs.size();
    if (policy.action.size() != nz)
        throw std::invalid_argument("policy_evaluation: policy size mismatch");
    ValueFunction res;
    std::vector<double> v(nz, 0.0), next(nz, 0.0);
    const double threshold = stop_threshold(beta, tol);
    for (std::size_t iter = 0; iter < 2'000'000; ++iter) {
        const double delta = sweep_policy(bmdp, beta, policy, v, next);
        v.swap(next);
        res.step_deltas.push_back(delta);
        res.iterations = iter + 1;
        res.residual = delta;
        if (delta <= threshold) {
            res.values = v;
            res.beta = beta;
            return res;
        }
    }
    throw std::runtime_error("policy_evaluation: iteration cap reached");
}

Policy induce_policy(const BeliefGrid& target_grid, const Policy& source_policy,
                     const BeliefGrid& source_grid, SnapMetric snap) {
    Policy induced;
    induced.action.resize(target_grid.beliefs.size());
    for (std::size_t z = 0; z < target_grid.beliefs.size(); ++z) {
        const std::size_t near = snap_to_grid(source_grid, target_grid.beliefs[z], snap, nullptr);
        induced.action[z] = source_policy.action[near];
    }
    return induced;
}

ValueFunction cross_evaluate_on(const BeliefMdp& true_bmdp, const Policy& approx_policy,
                                const BeliefGrid& approx_grid, double beta, double tol,
                                SnapMetric snap) {
    const Policy induced = induce_policy(true_bmdp.grid, approx_policy, approx_grid, snap);
    return policy_evaluation(true_bmdp, induced, beta, tol);
}

ValueFunction cross_evaluate(const PomdpModel& true_model, const Policy& approx_policy,
                             const BeliefGrid& approx_grid, const BeliefGrid& true_grid,
                             double beta, double tol, SnapMetric snap) {
    const BeliefMdp bmdp = build_belief_mdp(true_model, true_grid, snap);
    return cross_evaluate_on(bmdp, approx_policy, approx_grid, beta, tol, snap);
}

std::vector<double> finite_horizon_dp(
    const BeliefMdp& bmdp, std::size_t n_stages,
    const std::vector<std::vector<std::vector<double>>>& stage_costs,
    const std::vector<double>& terminal) {
    if (n_stages < 1) throw std::invalid_argument("finite_horizon_dp: n_stages >= 1");
    const std::size_t nz = bmdp.grid.beliefs.size();
    if (!stage_costs.empty() && stage_costs.size() != n_stages)
        throw std::invalid_argument("finite_horizon_dp: stage cost count mismatch");
    std::vector<double> v = terminal.empty() ? std::vector<double>(nz, 0.0) : terminal;
    if (v.size() != nz) throw std::invalid_argument("finite_horizon_dp: terminal size mismatch");
    std::vector<double> next(nz, 0.0);
    for (std::size_t t = n_stages; t-- > 0;) {
        const auto& costs = stage_costs.empty() ? bmdp.stage_cost : stage_costs[t];
        for (std::size_t z = 0; z < nz; ++z) {
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t u = 0; u < bmdp.num_actions; ++u) {
                double q = costs[z][u];
                for (const auto& [ti, p] : bmdp.trans[z][u]) q += p * v[ti];
                best = std::min(best, q);
            }
            next[z] = best;
        }
        v.swap(next);
    }
    return v;
}

namespace {

RviResult relative_vi_impl(const BeliefMdp& bmdp, const Policy* policy, double tol,
                           std::size_t max_iter) {
    const std::size_t nz = bmdp.grid.beliefs.size();
    std::vector<double> w(nz, 0.0), tw(nz, 0.0);
    RviResult res;
    double best_span = std::numeric_limits<double>::infinity();
    std::vector<double> recent_spans;
    // damped sweeps (aperiodicity transformation): w' = (1-tau) w + tau T w
    // has the same average cost and bias, and the span criterion applies to
    // the raw Bellman increments T w - w.
    constexpr double tau = 0.5;
    for (std::size_t iter = 0; iter < max_iter; ++iter) {
        for (std::size_t z = 0; z < nz; ++z) {
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t u = 0; u < bmdp.num_actions; ++u) {
                if (policy && policy->action[z] != u) continue;
                double q = bmdp.stage_cost[z][u];
                for (const auto& [t, p] : bmdp.trans[z][u]) q += p * w[t];
                best = std::min(best, q);
            }
            tw[z] = best;
        }
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (std::size_t z = 0; z < nz; ++z) {
            const double d = tw[z] - w[z];
            lo = std::min(lo, d);
            hi = std::max(hi, d);
        }
        const double span = hi - lo;
        res.iterations = iter + 1;
        res.span_residual = span;
        res.rho_star = (hi + lo) / 2.0;
        for (std::size_t z = 0; z < nz; ++z) w[z] = (1.0 - tau) * w[z] + tau * tw[z];
        const double offset = w[0]; // keep the iterates bounded
        for (std::size_t z = 0; z < nz; ++z) w[z] -= offset;
        if (span <= tol) {
            res.converged = true;
            res.bias = w;
            return res;
        }
        best_span = std::min(best_span, span);
        recent_spans.push_back(span);
        if (recent_spans.size() > 400) recent_spans.erase(recent_spans.begin());
    }
    // span did not reach tol; report whether it was still shrinking
    const double early = recent_spans.empty() ? 0.0 : recent_spans.front();
    const double late = recent_spans.empty() ? 0.0 : recent_spans.back();
    throw std::runtime_error(
        "relative value iteration did not converge: span " + std::to_string(late) + " after " +
        std::to_string(max_iter) + " sweeps (was " + std::to_string(early) +
        " four hundred sweeps earlier, best " + std::to_string(best_span) + ", tol " +
        std::to_string(tol) + ")");
}

} // namespace

RviResult relative_value_iteration(const BeliefMdp& bmdp, double tol, std::size_t max_iter) {
    return relative_vi_impl(bmdp, nullptr, tol, max_iter);
}

RviResult relative_value_evaluation(const BeliefMdp& bmdp, const Policy& policy, double tol,
                                    std::size_t max_iter) {
    return relative_vi_impl(bmdp, &policy, tol, max_iter);
}

std::vector<double> vanishing_discount_estimates(const BeliefMdp& bmdp,
                                                 const std::vector<double>& betas, double tol) {
    std::vector<double> out;
    out.reserve(betas.size());
    for (double beta : betas) {
        const auto vi = value_iteration(bmdp, beta, tol);
        const auto [lo, hi] =
            std::minmax_element(vi.value.values.begin(), vi.value.values.end());
        out.push_back((1.0 - beta) * (*lo + *hi) / 2.0);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Monte Carlo rollouts
// ---------------------------------------------------------------------------

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

struct Rng {
    std::uint64_t state;
    explicit Rng(std::uint64_t seed) : state(seed) {}
    std::uint64_t next_u64() {
        state = splitmix64(state);
        return state;
    }
    double next_unit() { return double(next_u64() >> 11) * 0x1.0p-53; }
    std::size_t categorical(const std::vector<double>& probs) {
        const double u = next_unit();
        double acc = 0.0;
        for (std::size_t i = 0; i < probs.size(); ++i) {
            acc += probs[i];
            if (u < acc) return i;
        }
        return probs.size() - 1;
    }
};

} // namespace

RolloutResult rollout_cost(const PomdpModel& model, const Policy& policy, const BeliefGrid& grid,
                           double beta, std::size_t n_runs, std::uint64_t seed,
                           std::size_t horizon_override) {
    if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("rollout_cost: beta in (0,1)");
    if (n_runs == 0) throw std::invalid_argument("rollout_cost: n_runs >= 1");
    const double c_inf = model.cost_sup_norm();
    RolloutResult res;
    if (horizon_override > 0) res.horizon = horizon_override;
    else {
        // smallest H with beta^H / (1-beta) <= 1e-4
        const double target = 1e-4 * (1.0 - beta);
        res.horizon = target >= 1.0
                          ? 1
                          : std::size_t(std::ceil(std::log(target) / std::log(beta)));
    }
    res.truncation_budget = std::pow(beta, double(res.horizon)) * c_inf / (1.0 - beta);

    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t run = 0; run < n_runs; ++run) {
        Rng rng(splitmix64(seed ^ (0x5bd1e995ULL * (run + 1))));
        Belief z = model.prior;
        std::size_t x = rng.categorical(model.prior.weights);
        double total = 0.0, discount = 1.0;
        for (std::size_t t = 0; t < res.horizon; ++t) {
            const std::size_t zi = snap_to_grid(grid, z, SnapMetric::L1, &model.state_space);
            const std::size_t u = policy.action[zi];
            total += discount * model.cost[x][u];
            discount *= beta;
            const std::size_t xn = rng.categorical(model.kernel.row(x, u));
            const std::size_t y = rng.categorical(model.channel.row(xn));
            z = belief_update(model, z, u, y);
            x = xn;
        }
        sum += total;
        sum_sq += total * total;
    }
    res.mean = sum / double(n_runs);
    if (n_runs > 1) {
        const double var =
            std::max(0.0, (sum_sq - sum * sum / double(n_runs)) / double(n_runs - 1));
        res.std_error = std::sqrt(var / double(n_runs));
    }
    return res;
}

} // namespace beliefcert
