#include "beliefcert/constants.hpp"

#include <cmath>
#include <limits>

#include "beliefcert/metrics.hpp"
#include "beliefcert/transport.hpp"

namespace beliefcert {

double k2_wasserstein(double alpha, double diameter, double dobrushin_q) {
    return alpha * diameter * (3.0 - 2.0 * dobrushin_q) / 2.0;
}

double min_pair_distance(const FiniteMetricSpace& space) {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < space.size(); ++i)
        for (std::size_t j = i + 1; j < space.size(); ++j)
            if (space.dist[i][j] > 0.0) m = std::min(m, space.dist[i][j]);
    return m;
}

namespace {

double tv_rows(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
    return s;
}

double w1_rows(const std::vector<double>& a, const std::vector<double>& b,
               const GroundMetric& g) {
    return w1_distance(SupportedMeasure::from_vector(a), SupportedMeasure::from_vector(b), g);
}

} // namespace

ModelConstants derive_constants(const PomdpModel& model) {
    ModelConstants c;
    const std::size_t nx = model.num_states();
    const std::size_t nu = model.num_actions();
    c.diameter = model.state_space.diameter();
    c.dobrushin_q = dobrushin(model.channel);
    if (nx >= 2) {
        const GroundMetric g = ground_of(model.state_space);
        for (std::size_t x = 0; x < nx; ++x) {
            for (std::size_t y = x + 1; y < nx; ++y) {
                const double d = model.state_space.dist[x][y];
                if (d <= 0.0) continue;
                c.l_q = std::max(c.l_q, tv_rows(model.channel.row(x), model.channel.row(y)) / d);
                for (std::size_t u = 0; u < nu; ++u) {
                    const auto& rx = model.kernel.row(x, u);
                    const auto& ry = model.kernel.row(y, u);
                    c.alpha = std::max(c.alpha, tv_rows(rx, ry) / d);
                    c.theta = std::max(c.theta, w1_rows(rx, ry, g) / d);
                    c.k1 = std::max(c.k1, std::abs(model.cost[x][u] - model.cost[y][u]) / d);
                }
            }
        }
    }
    c.k2 = k2_wasserstein(c.alpha, c.diameter, c.dobrushin_q);

    // Observation-density modulus: masses over a uniformly spaced line grid.
    if (model.obs_space.coords && model.obs_space.size() >= 2) {
        const auto& yc = *model.obs_space.coords;
        bool uniform = true;
        const double h = yc[1] - yc[0];
        for (std::size_t i = 1; i + 1 < yc.size(); ++i)
            if (std::abs((yc[i + 1] - yc[i]) - h) > 1e-9 * std::max(1.0, std::abs(h)))
                uniform = false;
        if (uniform && h > 0.0) {
            double ay = 0.0;
            for (std::size_t x = 0; x < nx; ++x)
                for (std::size_t i = 0; i + 1 < yc.size(); ++i) {
                    const double g0 = model.channel.probs[x][i] / h;
                    const double g1 = model.channel.probs[x][i + 1] / h;
                    ay = std::max(ay, std::abs(g1 - g0) / (yc[i + 1] - yc[i]));
                }
            c.alpha_y = ay;
        }
    }
    return c;
}

} // namespace beliefcert
