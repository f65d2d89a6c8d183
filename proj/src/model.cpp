#include "beliefcert/model.hpp"

#include <cmath>
#include <cstdio>

namespace beliefcert {

Belief Belief::uniform(std::size_t n) {
    Belief b;
    b.weights.assign(n, 1.0 / static_cast<double>(n));
    return b;
}

Belief Belief::vertex(std::size_t n, std::size_t i) {
    Belief b;
    b.weights.assign(n, 0.0);
    b.weights[i] = 1.0;
    return b;
}

double PomdpModel::cost_sup_norm() const {
    double m = 0.0;
    for (const auto& row : cost)
        for (double v : row) m = std::max(m, std::abs(v));
    return m;
}

bool is_stochastic_row(const std::vector<double>& row, double tol) {
    double sum = 0.0;
    for (double v : row) {
        if (v < -tol || !std::isfinite(v)) return false;
        sum += v;
    }
    return std::abs(sum - 1.0) <= tol;
}

namespace {
void describe(std::vector<std::string>& out, const char* pattern, std::size_t a,
              std::size_t b) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), pattern, a, b);
    out.emplace_back(buf);
}
} // namespace

std::vector<std::string> validate_model(const PomdpModel& model) {
    std::vector<std::string> out;
    const std::size_t nx = model.num_states();
    const std::size_t nu = model.num_actions();
    const std::size_t ny = model.num_obs();

    for (auto& v : model.state_space.violations()) out.push_back("state_space: " + v);
    for (auto& v : model.obs_space.violations()) out.push_back("obs_space: " + v);

    if (model.kernel.num_actions() != nu)
        out.push_back("kernel: action count does not match action_labels");
    for (std::size_t a = 0; a < model.kernel.num_actions(); ++a) {
        if (model.kernel.probs[a].size() != nx) {
            describe(out, "kernel: action %zu has %zu rows, expected state count", a,
                     model.kernel.probs[a].size());
            continue;
        }
        for (std::size_t x = 0; x < nx; ++x) {
            if (model.kernel.probs[a][x].size() != nx)
                describe(out, "kernel: row (state %zu, action %zu) has wrong length", x, a);
            else if (!is_stochastic_row(model.kernel.probs[a][x]))
                describe(out, "kernel: row (state %zu, action %zu) is not stochastic", x, a);
        }
    }

    if (model.channel.num_states() != nx)
        out.push_back("channel: row count does not match state count");
    for (std::size_t x = 0; x < model.channel.num_states(); ++x) {
        if (model.channel.probs[x].size() != ny)
            describe(out, "channel: row (state %zu) has length %zu, expected obs count", x,
                     model.channel.probs[x].size());
        else if (!is_stochastic_row(model.channel.probs[x]))
            describe(out, "channel: row (state %zu) is not stochastic", x, 0);
    }

    if (model.cost.size() != nx)
        out.push_back("cost: row count does not match state count");
    for (std::size_t x = 0; x < model.cost.size(); ++x) {
        if (model.cost[x].size() != nu) {
            describe(out, "cost: row (state %zu) has wrong length %zu", x, model.cost[x].size());
            continue;
        }
        for (std::size_t a = 0; a < nu; ++a)
            if (!std::isfinite(model.cost[x][a]))
                describe(out, "cost: entry (state %zu, action %zu) is not finite", x, a);
    }

    if (model.prior.size() != nx)
        out.push_back("prior: length does not match state count");
    else if (!is_stochastic_row(model.prior.weights))
        out.push_back("prior: weights are negative or do not sum to 1");

    if (model.discount && !(*model.discount > 0.0 && *model.discount < 1.0))
        out.push_back("discount: must lie in (0,1)");

    return out;
}

} // namespace beliefcert
