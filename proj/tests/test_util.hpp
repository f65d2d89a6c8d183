#pragma once

#include <cstdint>
#include <vector>

#include "beliefcert/measure.hpp"
#include "beliefcert/model.hpp"

namespace testutil {

// Deterministic generator independent of the standard library distributions,
// so frozen expected values stay frozen across platforms.
struct Rng {
    std::uint64_t state;
    explicit Rng(std::uint64_t seed) : state(seed ^ 0x9e3779b97f4a7c15ULL) { next_u64(); }
    std::uint64_t next_u64() {
        std::uint64_t x = (state += 0x9e3779b97f4a7c15ULL);
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }
    double unit() { return double(next_u64() >> 11) * 0x1.0p-53; }
    double range(double lo, double hi) { return lo + (hi - lo) * unit(); }
    std::size_t index(std::size_t n) { return std::size_t(next_u64() % n); }
};

inline std::vector<double> random_prob_vector(Rng& rng, std::size_t n) {
    std::vector<double> v(n);
    double sum = 0.0;
    for (double& x : v) sum += (x = 0.05 + rng.unit());
    for (double& x : v) x /= sum;
    return v;
}

inline beliefcert::SupportedMeasure random_measure(Rng& rng, std::size_t n) {
    return beliefcert::SupportedMeasure::from_vector(random_prob_vector(rng, n));
}

// Random metric space from distinct points in [0,1] (1-d embedding).
inline beliefcert::FiniteMetricSpace random_line_space(Rng& rng, std::size_t n) {
    std::vector<double> pts(n);
    for (std::size_t i = 0; i < n; ++i) pts[i] = (double(i) + rng.unit() * 0.8 + 0.1) / double(n);
    return beliefcert::FiniteMetricSpace::from_coords(pts);
}

// Random finite POMDP with a 1-d state embedding, the shape used throughout
// the certification corpus.
inline beliefcert::PomdpModel random_model(Rng& rng, std::size_t nx, std::size_t ny,
                                           std::size_t nu) {
    beliefcert::PomdpModel m;
    m.state_space = random_line_space(rng, nx);
    m.obs_space = random_line_space(rng, ny);
    for (std::size_t u = 0; u < nu; ++u) m.action_labels.push_back("u" + std::to_string(u));
    m.kernel.probs.resize(nu);
    for (std::size_t u = 0; u < nu; ++u) {
        m.kernel.probs[u].resize(nx);
        for (std::size_t x = 0; x < nx; ++x) m.kernel.probs[u][x] = random_prob_vector(rng, nx);
    }
    m.channel.probs.resize(nx);
    for (std::size_t x = 0; x < nx; ++x) m.channel.probs[x] = random_prob_vector(rng, ny);
    m.cost.assign(nx, std::vector<double>(nu, 0.0));
    for (std::size_t x = 0; x < nx; ++x)
        for (std::size_t u = 0; u < nu; ++u) m.cost[x][u] = rng.unit();
    m.prior.weights = random_prob_vector(rng, nx);
    return m;
}

} // namespace testutil
