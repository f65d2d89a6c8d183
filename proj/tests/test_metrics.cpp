#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "beliefcert/lp.hpp"
#include "beliefcert/metrics.hpp"
#include "beliefcert/transport.hpp"
#include "test_util.hpp"

using namespace beliefcert;
using testutil::Rng;

namespace {

GroundMetric ground_from_points(const std::vector<double>& pts, bool keep_line = false) {
    GroundMetric g;
    const std::size_t n = pts.size();
    g.dist.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) g.dist[i][j] = std::abs(pts[i] - pts[j]);
    if (keep_line) g.line = pts;
    return g;
}

// TV oracle: supremum over all sign-pattern test functions f in {-1,1}^n.
double tv_sign_oracle(const SupportedMeasure& p, const SupportedMeasure& q) {
    const auto pv = p.to_vector();
    const auto qv = q.to_vector();
    const std::size_t n = pv.size();
    double best = 0.0;
    for (std::size_t mask = 0; mask < (std::size_t(1) << n); ++mask) {
        double v = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double f = (mask >> i) & 1 ? 1.0 : -1.0;
            v += f * (pv[i] - qv[i]);
        }
        best = std::max(best, v);
    }
    return best;
}

// W1 oracle: dense dual LP, max sum f (p - q) s.t. f_i - f_j <= d_ij.
// Independent of the transportation-simplex primal path.
double w1_dual_lp_oracle(const SupportedMeasure& p, const SupportedMeasure& q,
                         const GroundMetric& g) {
    const auto pv = p.to_vector();
    const auto qv = q.to_vector();
    const std::size_t n = pv.size();
    std::vector<double> obj(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        obj[2 * i] = pv[i] - qv[i];
        obj[2 * i + 1] = -(pv[i] - qv[i]);
    }
    std::vector<std::vector<double>> rows;
    std::vector<double> rhs;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            std::vector<double> r(2 * n, 0.0);
            r[2 * i] = 1.0;
            r[2 * i + 1] = -1.0;
            r[2 * j] = -1.0;
            r[2 * j + 1] = 1.0;
            rows.push_back(std::move(r));
            rhs.push_back(g.dist[i][j]);
        }
    const auto res = simplex_maximize(obj, rows, rhs);
    REQUIRE(res.optimal);
    return res.value;
}

// Dobrushin oracle: exhaustive infimum over set partitions of the observation
// alphabet (practical up to |Y| = 4).
void enumerate_partitions(std::size_t n, std::vector<std::vector<std::size_t>>& current,
                          std::size_t next,
                          std::vector<std::vector<std::vector<std::size_t>>>& out) {
    if (next == n) {
        out.push_back(current);
        return;
    }
    const std::size_t blocks = current.size(); // recursion below reallocates
    for (std::size_t bi = 0; bi < blocks; ++bi) {
        current[bi].push_back(next);
        enumerate_partitions(n, current, next + 1, out);
        current[bi].pop_back();
    }
    current.push_back({next});
    enumerate_partitions(n, current, next + 1, out);
    current.pop_back();
}

double dobrushin_partition_oracle(const ObservationChannel& q) {
    std::vector<std::vector<std::vector<std::size_t>>> partitions;
    std::vector<std::vector<std::size_t>> current;
    enumerate_partitions(q.num_obs(), current, 0, partitions);
    double best = 1.0;
    for (std::size_t x = 0; x < q.num_states(); ++x)
        for (std::size_t y = x + 1; y < q.num_states(); ++y)
            for (const auto& part : partitions) {
                double v = 0.0;
                for (const auto& block : part) {
                    double mx = 0.0, my = 0.0;
                    for (std::size_t z : block) {
                        mx += q.probs[x][z];
                        my += q.probs[y][z];
                    }
                    v += std::min(mx, my);
                }
                best = std::min(best, v);
            }
    return best;
}

} // namespace

TEST_CASE("tv distance basics and sign-pattern oracle") {
    auto p = SupportedMeasure::from_vector({0.5, 0.5});
    auto q = SupportedMeasure::from_vector({1.0, 0.0});
    CHECK(tv_distance(p, p) == doctest::Approx(0.0));
    CHECK(tv_distance(p, q) == doctest::Approx(1.0));

    Rng rng(42);
    for (int rep = 0; rep < 30; ++rep) {
        auto a = testutil::random_measure(rng, 4);
        auto b = testutil::random_measure(rng, 4);
        CHECK(tv_distance(a, b) == doctest::Approx(tv_sign_oracle(a, b)).epsilon(1e-12));
    }
}

TEST_CASE("tv distance rejects mismatched universes") {
    auto p = SupportedMeasure::from_vector({1.0});
    auto q = SupportedMeasure::from_vector({0.5, 0.5});
    CHECK_THROWS(tv_distance(p, q));
}

TEST_CASE("w1 on point masses and the two-point example") {
    const auto g = ground_from_points({0.0, 0.4, 1.0});
    auto dx = SupportedMeasure::from_vector({1.0, 0.0, 0.0});
    auto dy = SupportedMeasure::from_vector({0.0, 0.0, 1.0});
    CHECK(w1_distance(dx, dy, g) == doctest::Approx(1.0));

    const auto g2 = ground_from_points({0.0, 1.0});
    auto p = SupportedMeasure::from_vector({0.5, 0.5});
    auto q = SupportedMeasure::from_vector({1.0, 0.0});
    CHECK(w1_distance(p, q, g2) == doctest::Approx(0.5));
}

TEST_CASE("w1 primal equals dual LP oracle on random instances") {
    Rng rng(7);
    for (int rep = 0; rep < 25; ++rep) {
        std::vector<double> pts(5);
        for (auto& x : pts) x = rng.unit();
        const auto g = ground_from_points(pts);
        auto p = testutil::random_measure(rng, 5);
        auto q = testutil::random_measure(rng, 5);
        const double primal = w1_distance(p, q, g);
        const double dual = w1_dual_lp_oracle(p, q, g);
        CHECK(std::abs(primal - dual) < 1e-9);
    }
}

TEST_CASE("w1 line fast path agrees with the transportation solver") {
    Rng rng(11);
    for (int rep = 0; rep < 25; ++rep) {
        std::vector<double> pts(6);
        for (auto& x : pts) x = rng.unit();
        const auto g_mat = ground_from_points(pts, false);
        const auto g_line = ground_from_points(pts, true);
        auto p = testutil::random_measure(rng, 6);
        auto q = testutil::random_measure(rng, 6);
        CHECK(w1_distance(p, q, g_mat) ==
              doctest::Approx(w1_distance(p, q, g_line)).epsilon(1e-12));
    }
}

TEST_CASE("w1 rejects unnormalized inputs") {
    const auto g = ground_from_points({0.0, 1.0});
    SupportedMeasure p, q;
    p.universe_size = q.universe_size = 2;
    p.atoms = {{0, 0.7}};
    q.atoms = {{1, 1.0}};
    CHECK_THROWS(w1_distance(p, q, g));
}

TEST_CASE("bl distance: identity, far-apart point masses, budget-split oracle") {
    const auto g = ground_from_points({0.0, 10.0});
    auto p = SupportedMeasure::from_vector({1.0, 0.0});
    auto q = SupportedMeasure::from_vector({0.0, 1.0});
    CHECK(bl_distance(p, p, g) == doctest::Approx(0.0));

    // grid search over (a,b) budget splits: inner optimum is min(2a, 10b)
    double oracle = 0.0;
    for (int k = 0; k <= 100000; ++k) {
        const double a = double(k) / 100000.0;
        oracle = std::max(oracle, std::min(2.0 * a, 10.0 * (1.0 - a)));
    }
    CHECK(bl_distance(p, q, g) == doctest::Approx(oracle).epsilon(1e-4));
    CHECK(bl_distance(p, q, g) == doctest::Approx(5.0 / 3.0).epsilon(1e-9));
}

TEST_CASE("bl <= min(tv, w1) on random pairs") {
    Rng rng(13);
    for (int rep = 0; rep < 50; ++rep) {
        const std::size_t n = 2 + rng.index(4);
        std::vector<double> pts(n);
        for (auto& x : pts) x = rng.range(0.0, 3.0);
        const auto g = ground_from_points(pts);
        auto p = testutil::random_measure(rng, n);
        auto q = testutil::random_measure(rng, n);
        const double bl = bl_distance(p, q, g);
        CHECK(bl <= tv_distance(p, q) + 1e-9);
        CHECK(bl <= w1_distance(p, q, g) + 1e-9);
    }
}

TEST_CASE("metric axioms hold for tv, w1, bl on random triples") {
    Rng rng(17);
    for (int rep = 0; rep < 20; ++rep) {
        const std::size_t n = 3 + rng.index(3);
        std::vector<double> pts(n);
        for (auto& x : pts) x = rng.unit();
        const auto g = ground_from_points(pts);
        auto a = testutil::random_measure(rng, n);
        auto b = testutil::random_measure(rng, n);
        auto c = testutil::random_measure(rng, n);
        auto check_axioms = [&](auto dist) {
            const double ab = dist(a, b), ba = dist(b, a), ac = dist(a, c), cb = dist(c, b);
            CHECK(ab >= -1e-12);
            CHECK(std::abs(ab - ba) < 1e-9);
            CHECK(ab <= ac + cb + 1e-9);
        };
        check_axioms([&](const auto& x, const auto& y) { return tv_distance(x, y); });
        check_axioms([&](const auto& x, const auto& y) { return w1_distance(x, y, g); });
        check_axioms([&](const auto& x, const auto& y) { return bl_distance(x, y, g); });
    }
}

TEST_CASE("kernel distance: trivial cases and W1 <= D/2 * TV") {
    Rng rng(23);
    auto model = testutil::random_model(rng, 3, 3, 2);
    CHECK(kernel_distance_tv(model.kernel, model.kernel) == doctest::Approx(0.0));

    // replace one row by a point mass; the sup sits at that row
    auto edited = model.kernel;
    edited.probs[1][2] = {1.0, 0.0, 0.0};
    double row_tv = 0.0;
    for (std::size_t j = 0; j < 3; ++j)
        row_tv += std::abs(model.kernel.probs[1][2][j] - edited.probs[1][2][j]);
    CHECK(kernel_distance_tv(model.kernel, edited) == doctest::Approx(row_tv));

    for (int rep = 0; rep < 100; ++rep) {
        auto m = testutil::random_model(rng, 3, 2, 2);
        auto other = testutil::random_model(rng, 3, 2, 2);
        other.state_space = m.state_space;
        const auto g = ground_of(m.state_space);
        const double w1 = kernel_distance(m.kernel, other.kernel, MeasureMetric::W1, g);
        const double tv = kernel_distance_tv(m.kernel, other.kernel);
        const double diam = m.state_space.diameter();
        CHECK(w1 <= diam / 2.0 * tv + 1e-9);
    }
}

TEST_CASE("channel distance: epsilon mixing obeys the convexity bound") {
    Rng rng(29);
    auto model = testutil::random_model(rng, 3, 4, 1);
    for (double eps : {0.05, 0.3, 0.9}) {
        ObservationChannel mixed = model.channel;
        for (auto& row : mixed.probs)
            for (double& v : row) v = (1.0 - eps) * v + eps / 4.0;
        CHECK(channel_distance_tv(model.channel, mixed) <= 2.0 * eps + 1e-12);
    }
    CHECK(channel_distance_tv(model.channel, model.channel) == doctest::Approx(0.0));
}

TEST_CASE("dobrushin coefficient: closed form, examples, partition oracle") {
    ObservationChannel identical;
    identical.probs = {{0.3, 0.7}, {0.3, 0.7}};
    CHECK(dobrushin(identical) == doctest::Approx(1.0));

    ObservationChannel identity;
    identity.probs = {{1.0, 0.0}, {0.0, 1.0}};
    CHECK(dobrushin(identity) == doctest::Approx(0.0));

    ObservationChannel two;
    two.probs = {{0.7, 0.3}, {0.4, 0.6}};
    CHECK(dobrushin(two) == doctest::Approx(0.7));
    CHECK(dobrushin_partition_oracle(two) == doctest::Approx(0.7));

    Rng rng(31);
    for (int rep = 0; rep < 20; ++rep) {
        const std::size_t ny = 2 + rng.index(3); // up to 4 observations
        ObservationChannel q;
        q.probs.resize(2 + rng.index(2));
        for (auto& row : q.probs) row = testutil::random_prob_vector(rng, ny);
        CHECK(dobrushin(q) == doctest::Approx(dobrushin_partition_oracle(q)).epsilon(1e-12));
    }
}

TEST_CASE("dobrushin never decreases when two observation symbols merge") {
    Rng rng(37);
    for (int rep = 0; rep < 30; ++rep) {
        const std::size_t ny = 3 + rng.index(3);
        ObservationChannel q;
        q.probs.resize(3);
        for (auto& row : q.probs) row = testutil::random_prob_vector(rng, ny);
        const double before = dobrushin(q);
        const std::size_t a = rng.index(ny);
        std::size_t b = rng.index(ny);
        if (b == a) b = (a + 1) % ny;
        ObservationChannel merged;
        merged.probs.resize(q.probs.size());
        for (std::size_t x = 0; x < q.probs.size(); ++x) {
            for (std::size_t y = 0; y < ny; ++y) {
                if (y == b) continue;
                merged.probs[x].push_back(q.probs[x][y] + (y == a ? q.probs[x][b] : 0.0));
            }
        }
        CHECK(dobrushin(merged) >= before - 1e-12);
    }
}

TEST_CASE("tighter test-function budgets give smaller distances") {
    Rng rng(43);
    for (int rep = 0; rep < 20; ++rep) {
        const std::size_t n = 2 + rng.index(3);
        std::vector<double> pts(n);
        for (auto& x : pts) x = rng.range(0.0, 2.0);
        const auto g = ground_from_points(pts);
        auto p = testutil::random_measure(rng, n);
        auto q = testutil::random_measure(rng, n);
        // a + 2b <= 1 is a subset of a + b <= 1
        CHECK(bl_distance_weighted(p, q, g, 1.0, 2.0) <= bl_distance(p, q, g) + 1e-12);
    }
}

TEST_CASE("bl stays solvable on nearly coincident ground points") {
    // regression: near-duplicate support points once produced degenerate
    // pivots that corrupted the tableau
    GroundMetric g;
    g.dist = {{0.0, 1e-13, 1.0}, {1e-13, 0.0, 1.0}, {1.0, 1.0, 0.0}};
    auto p = SupportedMeasure::from_vector({0.5, 0.25, 0.25});
    auto q = SupportedMeasure::from_vector({0.25, 0.5, 0.25});
    const double bl = bl_distance(p, q, g);
    CHECK(bl >= 0.0);
    CHECK(bl <= tv_distance(p, q) + 1e-9);
    CHECK(bl <= w1_distance(p, q, g) + 1e-9);
}

TEST_CASE("transport solver handles heavily degenerate marginals") {
    // uniform weights and tied costs force degenerate pivots
    for (std::size_t n : {std::size_t(4), std::size_t(7)}) {
        std::vector<double> u(n, 1.0 / double(n));
        std::vector<std::vector<double>> cost(n, std::vector<double>(n, 1.0));
        for (std::size_t i = 0; i < n; ++i) cost[i][i] = 0.0;
        const auto res = transport_optimal(u, u, cost);
        CHECK(res.cost == doctest::Approx(0.0)); // identity plan
    }
    // block-constant costs with repeated values
    std::vector<double> s = {0.25, 0.25, 0.25, 0.25};
    std::vector<double> d = {0.5, 0.5};
    std::vector<std::vector<double>> cost = {{0, 1}, {0, 1}, {1, 0}, {1, 0}};
    CHECK(transport_optimal(s, d, cost).cost == doctest::Approx(0.0));
}

TEST_CASE("transport solver duals certify optimality") {
    Rng rng(41);
    for (int rep = 0; rep < 20; ++rep) {
        const std::size_t m = 2 + rng.index(5), n = 2 + rng.index(5);
        std::vector<double> s = testutil::random_prob_vector(rng, m);
        std::vector<double> d = testutil::random_prob_vector(rng, n);
        std::vector<std::vector<double>> cost(m, std::vector<double>(n));
        for (auto& row : cost)
            for (auto& v : row) v = rng.unit();
        const auto res = transport_optimal(s, d, cost);
        // weak duality with equality: u_i + v_j <= c_ij, dual value == cost
        double dual_value = 0.0;
        for (std::size_t i = 0; i < m; ++i) dual_value += res.dual_u[i] * s[i];
        for (std::size_t j = 0; j < n; ++j) dual_value += res.dual_v[j] * d[j];
        CHECK(dual_value == doctest::Approx(res.cost).epsilon(1e-9));
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < n; ++j)
                CHECK(res.dual_u[i] + res.dual_v[j] <= cost[i][j] + 1e-9);
    }
}
