#include "beliefcert/quantize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace beliefcert {

std::vector<std::size_t> Partition::cell_of(std::size_t space_size) const {
    std::vector<std::size_t> owner(space_size, std::size_t(-1));
    for (std::size_t c = 0; c < cells.size(); ++c)
        for (std::size_t p : cells[c].members) {
            if (p >= space_size) throw std::out_of_range("partition member out of range");
            owner[p] = c;
        }
    for (std::size_t p = 0; p < space_size; ++p)
        if (owner[p] == std::size_t(-1))
            throw std::invalid_argument("partition does not cover point " + std::to_string(p));
    return owner;
}

std::vector<std::string> Partition::violations(const FiniteMetricSpace& space) const {
    std::vector<std::string> out;
    std::vector<int> seen(space.size(), 0);
    for (const auto& c : cells)
        for (std::size_t p : c.members) {
            if (p >= space.size()) {
                out.push_back("member index out of range");
                return out;
            }
            ++seen[p];
        }
    for (std::size_t p = 0; p < space.size(); ++p) {
        if (seen[p] == 0) out.push_back("point " + std::to_string(p) + " not covered");
        if (seen[p] > 1) out.push_back("point " + std::to_string(p) + " in several cells");
    }
    if (representatives.size() != cells.size())
        out.push_back("representative count does not match cell count");
    for (std::size_t c = 0; c < cells.size() && c < representatives.size(); ++c) {
        if (std::find(cells[c].members.begin(), cells[c].members.end(), representatives[c]) ==
            cells[c].members.end())
            out.push_back("representative of cell " + std::to_string(c) + " not a member");
    }
    double diam = 0.0;
    for (const auto& c : cells) {
        if (c.interval) diam = std::max(diam, c.interval->second - c.interval->first);
        else
            for (std::size_t a : c.members)
                for (std::size_t b : c.members) diam = std::max(diam, space.dist[a][b]);
    }
    if (std::abs(diam - max_cell_diameter) > 1e-12)
        out.push_back("max_cell_diameter inconsistent with cells");
    return out;
}

Partition Partition::uniform_intervals(const FiniteMetricSpace& space, std::size_t n_cells) {
    if (!space.coords) throw std::invalid_argument("uniform_intervals: space has no coordinates");
    if (n_cells == 0) throw std::invalid_argument("uniform_intervals: n_cells >= 1");
    const auto& xs = *space.coords;
    const double lo = *std::min_element(xs.begin(), xs.end());
    const double hi = *std::max_element(xs.begin(), xs.end());
    const double width = (hi - lo) / double(n_cells);

    Partition part;
    part.cells.resize(n_cells);
    for (std::size_t c = 0; c < n_cells; ++c)
        part.cells[c].interval = {lo + double(c) * width, lo + double(c + 1) * width};
    for (std::size_t p = 0; p < xs.size(); ++p) {
        auto c = width > 0.0 ? std::size_t((xs[p] - lo) / width) : 0;
        c = std::min(c, n_cells - 1); // last cell closed
        part.cells[c].members.push_back(p);
    }
    part.representatives.resize(n_cells);
    for (std::size_t c = 0; c < n_cells; ++c) {
        const auto& cell = part.cells[c];
        if (cell.members.empty())
            throw std::invalid_argument("uniform_intervals: cell " + std::to_string(c) +
                                        " received no points");
        const double mid = (cell.interval->first + cell.interval->second) / 2.0;
        std::size_t best = cell.members.front();
        for (std::size_t p : cell.members)
            if (std::abs(xs[p] - mid) < std::abs(xs[best] - mid) - 1e-15) best = p;
        part.representatives[c] = best;
    }
    part.max_cell_diameter = width;
    return part;
}

Partition Partition::from_groups(const FiniteMetricSpace& space,
                                 std::vector<std::vector<std::size_t>> groups) {
    Partition part;
    part.cells.resize(groups.size());
    part.representatives.resize(groups.size());
    double diam = 0.0;
    for (std::size_t c = 0; c < groups.size(); ++c) {
        if (groups[c].empty()) throw std::invalid_argument("from_groups: empty cell");
        part.cells[c].members = std::move(groups[c]);
        const auto& mem = part.cells[c].members;
        // medoid: member with the smallest worst-case distance, lowest index on ties
        std::size_t best = mem.front();
        double best_ecc = std::numeric_limits<double>::infinity();
        for (std::size_t a : mem) {
            double ecc = 0.0;
            for (std::size_t b : mem) {
                ecc = std::max(ecc, space.dist[a][b]);
                diam = std::max(diam, space.dist[a][b]);
            }
            if (ecc < best_ecc - 1e-15) {
                best_ecc = ecc;
                best = a;
            }
        }
        part.representatives[c] = best;
    }
    part.max_cell_diameter = diam;
    auto v = part.violations(space);
    if (!v.empty()) throw std::invalid_argument("from_groups: " + v.front());
    return part;
}

Partition Partition::singletons(const FiniteMetricSpace& space) {
    std::vector<std::vector<std::size_t>> groups(space.size());
    for (std::size_t p = 0; p < space.size(); ++p) groups[p] = {p};
    return from_groups(space, groups);
}

// ---------------------------------------------------------------------------
// Continuous adapters on fine grids
// ---------------------------------------------------------------------------

namespace {

double std_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double std_normal_pdf(double z) {
    return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

// Gauss-Legendre nodes/weights on [-1,1] by Newton iteration.
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    nodes.assign(n, 0.0);
    weights.assign(n, 0.0);
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (x * p0 - p1) / (x * x - 1.0);
            const double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * pp * pp);
    }
}

struct TruncatedNormal {
    double mean, sigma, lo, hi, z;
    TruncatedNormal(double m, double s, double l, double h)
        : mean(m), sigma(s), lo(l), hi(h),
          z(std_normal_cdf((h - m) / s) - std_normal_cdf((l - m) / s)) {}
    double density(double x) const { return std_normal_pdf((x - mean) / sigma) / (sigma * z); }
};

} // namespace

double truncated_normal_cdf_mass(double a, double b, double mean, double sigma, double lo,
                                 double hi) {
    const double z = std_normal_cdf((hi - mean) / sigma) - std_normal_cdf((lo - mean) / sigma);
    return (std_normal_cdf((b - mean) / sigma) - std_normal_cdf((a - mean) / sigma)) / z;
}

DiscretizedModel discretize_reference(const ContinuousModelAdapter& adapter) {
    if (adapter.kind == ContinuousModelAdapter::Kind::table_on_fine_grid) {
        if (!adapter.table)
            throw std::invalid_argument("discretize_reference: table adapter without table");
        return {*adapter.table, 0.0};
    }
    if (!(adapter.sigma > 0.0) || !(adapter.obs_sigma > 0.0))
        throw std::invalid_argument("discretize_reference: sigma must be positive");
    if (adapter.fine_grid_size < 2)
        throw std::invalid_argument("discretize_reference: fine grid too small");

    const double lo = adapter.domain_lo, hi = adapter.domain_hi;
    const std::size_t nx = adapter.fine_grid_size;
    const std::size_t ny = adapter.obs_grid_size ? adapter.obs_grid_size : nx;
    const double hx = (hi - lo) / double(nx);
    const double hy = (hi - lo) / double(ny);

    std::vector<double> xs(nx), ys(ny);
    for (std::size_t i = 0; i < nx; ++i) xs[i] = lo + (double(i) + 0.5) * hx;
    for (std::size_t i = 0; i < ny; ++i) ys[i] = lo + (double(i) + 0.5) * hy;

    std::vector<double> gl_x, gl_w;
    gauss_legendre(adapter.gl_nodes, gl_x, gl_w);

    double worst_defect = 0.0;
    auto integrate_row = [&](const TruncatedNormal& tn, const std::vector<double>& centers,
                             double cell_width) {
        std::vector<double> row(centers.size());
        double sum = 0.0;
        for (std::size_t j = 0; j < centers.size(); ++j) {
            const double a = centers[j] - cell_width / 2.0;
            const double half = cell_width / 2.0;
            double mass = 0.0;
            for (std::size_t k = 0; k < gl_x.size(); ++k)
                mass += gl_w[k] * tn.density(a + half * (gl_x[k] + 1.0));
            row[j] = mass * half;
            sum += row[j];
        }
        worst_defect = std::max(worst_defect, std::abs(sum - 1.0));
        for (double& v : row) v /= sum;
        return row;
    };

    DiscretizedModel out;
    PomdpModel& m = out.model;
    m.state_space = FiniteMetricSpace::from_coords(xs);
    m.obs_space = FiniteMetricSpace::from_coords(ys);
    for (std::size_t y = 0; y < ny; ++y) m.obs_space.labels[y] = "y" + std::to_string(y);

    const std::size_t nu = adapter.action_offsets.size();
    for (std::size_t u = 0; u < nu; ++u)
        m.action_labels.push_back("u" + std::to_string(u));

    m.kernel.probs.resize(nu);
    for (std::size_t u = 0; u < nu; ++u) {
        m.kernel.probs[u].resize(nx);
        for (std::size_t i = 0; i < nx; ++i) {
            TruncatedNormal tn(xs[i] + adapter.action_offsets[u], adapter.sigma, lo, hi);
            m.kernel.probs[u][i] = integrate_row(tn, xs, hx);
        }
    }
    m.channel.probs.resize(nx);
    for (std::size_t i = 0; i < nx; ++i) {
        TruncatedNormal tn(xs[i], adapter.obs_sigma, lo, hi);
        m.channel.probs[i] = integrate_row(tn, ys, hy);
    }

    // stage cost x - drift(u), shifted so it stays nonnegative
    double max_off = 0.0;
    for (double o : adapter.action_offsets) max_off = std::max(max_off, o);
    const double shift = std::max(0.0, max_off - lo);
    m.cost.assign(nx, std::vector<double>(nu, 0.0));
    for (std::size_t i = 0; i < nx; ++i)
        for (std::size_t u = 0; u < nu; ++u)
            m.cost[i][u] = xs[i] - adapter.action_offsets[u] + shift;

    m.prior = Belief::uniform(nx);
    out.integration_defect = worst_defect;
    if (worst_defect > 1e-6)
        throw std::runtime_error("discretize_reference: integration defect " +
                                 std::to_string(worst_defect) + " exceeds 1e-6");
    return out;
}

// ---------------------------------------------------------------------------
// Quantization
// ---------------------------------------------------------------------------

SupportedMeasure uniform_reference(const Partition& part, std::size_t space_size) {
    SupportedMeasure ref;
    ref.universe_size = space_size;
    const double cell_share = 1.0 / double(part.num_cells());
    for (const auto& cell : part.cells) {
        const double w = cell_share / double(cell.members.size());
        for (std::size_t p : cell.members) ref.atoms.emplace_back(p, w);
    }
    std::sort(ref.atoms.begin(), ref.atoms.end());
    return ref;
}

namespace {

// Normalized restriction of the reference to each cell.
std::vector<std::vector<double>> cell_weights(const PomdpModel& fine, const Partition& part,
                                              const SupportedMeasure& reference) {
    const auto rv = reference.to_vector();
    if (rv.size() != fine.num_states())
        throw std::invalid_argument("quantize_states: reference universe mismatch");
    std::vector<std::vector<double>> w(part.num_cells());
    for (std::size_t c = 0; c < part.num_cells(); ++c) {
        double mass = 0.0;
        for (std::size_t p : part.cells[c].members) mass += rv[p];
        if (mass <= 0.0)
            throw std::invalid_argument("quantize_states: reference gives zero mass to cell " +
                                        std::to_string(c));
        w[c].reserve(part.cells[c].members.size());
        for (std::size_t p : part.cells[c].members) w[c].push_back(rv[p] / mass);
    }
    return w;
}

FiniteMetricSpace restrict_space(const FiniteMetricSpace& space,
                                 const std::vector<std::size_t>& keep) {
    FiniteMetricSpace out;
    out.labels.reserve(keep.size());
    for (std::size_t p : keep) out.labels.push_back(space.labels[p]);
    out.dist.assign(keep.size(), std::vector<double>(keep.size(), 0.0));
    for (std::size_t i = 0; i < keep.size(); ++i)
        for (std::size_t j = 0; j < keep.size(); ++j) out.dist[i][j] = space.dist[keep[i]][keep[j]];
    if (space.coords) {
        std::vector<double> c;
        c.reserve(keep.size());
        for (std::size_t p : keep) c.push_back((*space.coords)[p]);
        out.coords = std::move(c);
    }
    return out;
}

} // namespace

StateQuantization quantize_states(const PomdpModel& fine, const Partition& part,
                                  const SupportedMeasure& reference) {
    const auto weights = cell_weights(fine, part, reference);
    const std::size_t nc = part.num_cells();
    const std::size_t nu = fine.num_actions();
    const auto owner = part.cell_of(fine.num_states());

    StateQuantization out;
    PomdpModel& m = out.coarse;
    m.state_space = restrict_space(fine.state_space, part.representatives);
    m.action_labels = fine.action_labels;
    m.obs_space = fine.obs_space;
    m.discount = fine.discount;

    m.kernel.probs.assign(nu, std::vector<std::vector<double>>(nc, std::vector<double>(nc, 0.0)));
    for (std::size_t u = 0; u < nu; ++u)
        for (std::size_t i = 0; i < nc; ++i) {
            auto& row = m.kernel.probs[u][i];
            for (std::size_t k = 0; k < part.cells[i].members.size(); ++k) {
                const std::size_t x = part.cells[i].members[k];
                const double wx = weights[i][k];
                const auto& fine_row = fine.kernel.row(x, u);
                for (std::size_t xp = 0; xp < fine_row.size(); ++xp)
                    row[owner[xp]] += wx * fine_row[xp];
            }
        }

    m.channel.probs.assign(nc, std::vector<double>(fine.num_obs(), 0.0));
    m.cost.assign(nc, std::vector<double>(nu, 0.0));
    m.prior.weights.assign(nc, 0.0);
    for (std::size_t i = 0; i < nc; ++i) {
        for (std::size_t k = 0; k < part.cells[i].members.size(); ++k) {
            const std::size_t x = part.cells[i].members[k];
            const double wx = weights[i][k];
            for (std::size_t y = 0; y < fine.num_obs(); ++y)
                m.channel.probs[i][y] += wx * fine.channel.probs[x][y];
            for (std::size_t u = 0; u < nu; ++u) m.cost[i][u] += wx * fine.cost[x][u];
            m.prior.weights[i] += fine.prior[x];
        }
    }
    out.l_xn = part.max_cell_diameter;
    return out;
}

TransitionKernel lift_coarse_kernel(const TransitionKernel& coarse, const Partition& part,
                                    const FiniteMetricSpace& fine_space) {
    const std::size_t nx = fine_space.size();
    const auto owner = part.cell_of(nx);
    TransitionKernel out;
    out.probs.assign(coarse.num_actions(),
                     std::vector<std::vector<double>>(nx, std::vector<double>(nx, 0.0)));
    for (std::size_t u = 0; u < coarse.num_actions(); ++u)
        for (std::size_t x = 0; x < nx; ++x) {
            const auto& crow = coarse.row(owner[x], u);
            for (std::size_t j = 0; j < crow.size(); ++j)
                out.probs[u][x][part.representatives[j]] += crow[j];
        }
    return out;
}

PomdpModel lifted_state_model(const PomdpModel& fine, const Partition& part,
                              const SupportedMeasure& reference) {
    const auto sq = quantize_states(fine, part, reference);
    const auto owner = part.cell_of(fine.num_states());
    PomdpModel m = fine; // same spaces, cost, prior, discount
    m.kernel = lift_coarse_kernel(sq.coarse.kernel, part, fine.state_space);
    for (std::size_t x = 0; x < fine.num_states(); ++x)
        m.channel.probs[x] = sq.coarse.channel.probs[owner[x]];
    return m;
}

ObservationQuantization quantize_observations(const PomdpModel& fine, const Partition& part) {
    const std::size_t nx = fine.num_states();
    const std::size_t ny = fine.num_obs();
    const std::size_t nc = part.num_cells();
    const auto owner = part.cell_of(ny);

    ObservationQuantization out;
    out.l_yn = part.max_cell_diameter;

    out.coarse = fine;
    out.coarse.obs_space = restrict_space(fine.obs_space, part.representatives);
    out.coarse.channel.probs.assign(nx, std::vector<double>(nc, 0.0));
    for (std::size_t x = 0; x < nx; ++x)
        for (std::size_t y = 0; y < ny; ++y)
            out.coarse.channel.probs[x][owner[y]] += fine.channel.probs[x][y];

    out.intermediate.probs.assign(nx, std::vector<double>(ny, 0.0));
    for (std::size_t x = 0; x < nx; ++x)
        for (std::size_t y = 0; y < ny; ++y) {
            const std::size_t c = owner[y];
            out.intermediate.probs[x][y] =
                out.coarse.channel.probs[x][c] / double(part.cells[c].members.size());
        }
    return out;
}

JointQuantization joint_quantize(const PomdpModel& fine, const Partition& state_part,
                                 const Partition& obs_part, const SupportedMeasure& reference) {
    JointQuantization out;
    auto sq = quantize_states(fine, state_part, reference);
    auto oq = quantize_observations(sq.coarse, obs_part);
    out.coarse = std::move(oq.coarse);
    out.l_xn = sq.l_xn;
    out.l_yn = oq.l_yn;

    PomdpModel lifted = lifted_state_model(fine, state_part, reference);
    auto oq_lift = quantize_observations(lifted, obs_part);
    lifted.channel = std::move(oq_lift.intermediate);
    out.lifted = std::move(lifted);
    return out;
}

} // namespace beliefcert
