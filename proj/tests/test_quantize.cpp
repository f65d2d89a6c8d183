#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "beliefcert/constants.hpp"
#include "beliefcert/metrics.hpp"
#include "beliefcert/quantize.hpp"
#include "test_util.hpp"

using namespace beliefcert;
using testutil::Rng;

namespace {

ContinuousModelAdapter small_adapter(double sigma, std::size_t n) {
    ContinuousModelAdapter a;
    a.sigma = sigma;
    a.obs_sigma = 0.8;
    a.fine_grid_size = n;
    a.action_offsets = {-0.1, 0.1};
    return a;
}

} // namespace

TEST_CASE("discretized rows match the standard-normal CDF oracle") {
    const auto d = discretize_reference(small_adapter(1.0, 50));
    CHECK(d.integration_defect < 1e-9);
    const auto& m = d.model;
    const double h = 1.0 / 50.0;
    for (std::size_t i : {std::size_t(0), std::size_t(20), std::size_t(49)}) {
        const double mean = (*m.state_space.coords)[i] + (-0.1);
        for (std::size_t j = 0; j < 50; ++j) {
            const double a = double(j) * h, b = double(j + 1) * h;
            const double oracle = truncated_normal_cdf_mass(a, b, mean, 1.0, 0.0, 1.0);
            CHECK(m.kernel.probs[0][i][j] == doctest::Approx(oracle).epsilon(1e-10));
        }
    }
}

TEST_CASE("wide-sigma rows approach the renormalized flat profile") {
    const auto d = discretize_reference(small_adapter(50.0, 20));
    const auto& row = d.model.kernel.probs[0][10];
    // truncated N(mu, 50^2) on [0,1] is nearly uniform
    for (double v : row) CHECK(v == doctest::Approx(1.0 / 20.0).epsilon(1e-3));
}

TEST_CASE("table adapter passes through unchanged") {
    Rng rng(3);
    ContinuousModelAdapter a;
    a.kind = ContinuousModelAdapter::Kind::table_on_fine_grid;
    a.table = testutil::random_model(rng, 3, 2, 1);
    const auto d = discretize_reference(a);
    CHECK(d.integration_defect == 0.0);
    CHECK(d.model.kernel.probs == a.table->kernel.probs);
}

TEST_CASE("singleton quantization is the identity") {
    Rng rng(7);
    const auto m = testutil::random_model(rng, 4, 3, 2);
    const auto part = Partition::singletons(m.state_space);
    const auto ref = uniform_reference(part, 4);
    const auto sq = quantize_states(m, part, ref);
    CHECK(sq.l_xn == 0.0);
    for (std::size_t u = 0; u < 2; ++u)
        for (std::size_t x = 0; x < 4; ++x)
            for (std::size_t j = 0; j < 4; ++j)
                CHECK(sq.coarse.kernel.probs[u][x][j] ==
                      doctest::Approx(m.kernel.probs[u][x][j]).epsilon(1e-14));
    for (std::size_t x = 0; x < 4; ++x) {
        for (std::size_t y = 0; y < 3; ++y)
            CHECK(sq.coarse.channel.probs[x][y] ==
                  doctest::Approx(m.channel.probs[x][y]).epsilon(1e-14));
        for (std::size_t u = 0; u < 2; ++u)
            CHECK(sq.coarse.cost[x][u] == doctest::Approx(m.cost[x][u]).epsilon(1e-14));
    }

    const auto lifted = lift_coarse_kernel(sq.coarse.kernel, part, m.state_space);
    for (std::size_t u = 0; u < 2; ++u)
        for (std::size_t x = 0; x < 4; ++x)
            for (std::size_t j = 0; j < 4; ++j)
                CHECK(lifted.probs[u][x][j] ==
                      doctest::Approx(m.kernel.probs[u][x][j]).epsilon(1e-14));
}

TEST_CASE("two equal cells of a symmetric model average arithmetically") {
    PomdpModel m;
    m.state_space = FiniteMetricSpace::from_coords({0.0, 0.25, 0.75, 1.0});
    m.obs_space = FiniteMetricSpace::from_coords({0.0, 1.0});
    m.action_labels = {"u"};
    m.kernel.probs = {{{0.4, 0.3, 0.2, 0.1},
                       {0.3, 0.4, 0.1, 0.2},
                       {0.2, 0.1, 0.4, 0.3},
                       {0.1, 0.2, 0.3, 0.4}}};
    m.channel.probs = {{0.9, 0.1}, {0.8, 0.2}, {0.2, 0.8}, {0.1, 0.9}};
    m.cost = {{0.0}, {1.0}, {2.0}, {3.0}};
    m.prior.weights = {0.25, 0.25, 0.25, 0.25};

    const auto part = Partition::from_groups(m.state_space, {{0, 1}, {2, 3}});
    const auto ref = uniform_reference(part, 4);
    const auto sq = quantize_states(m, part, ref);
    // row of cell {0,1}: average rows 0 and 1, then aggregate cells
    // avg = (0.35, 0.35, 0.15, 0.15) -> cells (0.7, 0.3)
    CHECK(sq.coarse.kernel.probs[0][0][0] == doctest::Approx(0.7));
    CHECK(sq.coarse.kernel.probs[0][0][1] == doctest::Approx(0.3));
    CHECK(sq.coarse.channel.probs[0][0] == doctest::Approx(0.85));
    CHECK(sq.coarse.cost[0][0] == doctest::Approx(0.5));
    CHECK(sq.coarse.cost[1][0] == doctest::Approx(2.5));
}

TEST_CASE("lifted kernels are constant on cells and row-stochastic") {
    Rng rng(11);
    const auto m = testutil::random_model(rng, 6, 3, 2);
    const auto part = Partition::from_groups(m.state_space, {{0, 1, 2}, {3, 4, 5}});
    const auto ref = uniform_reference(part, 6);
    const auto sq = quantize_states(m, part, ref);
    const auto lifted = lift_coarse_kernel(sq.coarse.kernel, part, m.state_space);
    for (std::size_t u = 0; u < 2; ++u) {
        for (std::size_t x = 0; x < 6; ++x) CHECK(is_stochastic_row(lifted.probs[u][x], 1e-12));
        CHECK(lifted.probs[u][0] == lifted.probs[u][2]); // same cell, same row
        CHECK(lifted.probs[u][3] == lifted.probs[u][5]);
    }
}

TEST_CASE("state quantization rate: d_W1 <= (alpha+1) cell width on truncated normals") {
    for (double sigma : {0.5, 1.0}) {
        const auto fine = discretize_reference(small_adapter(sigma, 120)).model;
        const auto constants = derive_constants(fine);
        const double bound_alpha = std::numbers::sqrt2 / (sigma * std::sqrt(std::numbers::pi));
        CHECK(constants.alpha <= bound_alpha + 1e-6);
        const auto g = ground_of(fine.state_space);
        for (std::size_t cells : {6, 12}) {
            const auto part = Partition::uniform_intervals(fine.state_space, cells);
            const auto ref = uniform_reference(part, 120);
            const auto lifted = lifted_state_model(fine, part, ref);
            const double w1 = kernel_distance(fine.kernel, lifted.kernel, MeasureMetric::W1, g);
            CHECK(w1 <= (constants.alpha + 1.0) * part.max_cell_diameter + 1e-9);
            // sharper form with the W1 modulus
            CHECK(w1 <= (constants.theta + 1.0) * part.max_cell_diameter + 1e-9);
        }
    }
}

TEST_CASE("observation quantization: singleton identity and total merge") {
    Rng rng(13);
    const auto m = testutil::random_model(rng, 3, 4, 1);
    const auto ident = quantize_observations(m, Partition::singletons(m.obs_space));
    CHECK(ident.l_yn == 0.0);
    for (std::size_t x = 0; x < 3; ++x)
        for (std::size_t y = 0; y < 4; ++y)
            CHECK(ident.intermediate.probs[x][y] ==
                  doctest::Approx(m.channel.probs[x][y]).epsilon(1e-14));

    const auto merged =
        quantize_observations(m, Partition::from_groups(m.obs_space, {{0, 1, 2, 3}}));
    CHECK(merged.coarse.num_obs() == 1);
    for (std::size_t x = 0; x < 3; ++x)
        CHECK(merged.coarse.channel.probs[x][0] == doctest::Approx(1.0));
    CHECK(dobrushin(merged.coarse.channel) == doctest::Approx(1.0));
}

TEST_CASE("observation quantization TV bound with the measured density modulus") {
    const auto fine = discretize_reference(small_adapter(1.0, 100)).model;
    const auto c = derive_constants(fine);
    REQUIRE(c.alpha_y.has_value());
    for (std::size_t cells : {5, 10, 25}) {
        const auto part = Partition::uniform_intervals(fine.obs_space, cells);
        const auto oq = quantize_observations(fine, part);
        const double tv = channel_distance_tv(fine.channel, oq.intermediate);
        CHECK(tv <= *c.alpha_y * oq.l_yn + 1e-9);
    }
}

TEST_CASE("joint quantization composes and diameters shrink under refinement") {
    const auto fine = discretize_reference(small_adapter(1.0, 60)).model;
    const auto ref_of = [&](const Partition& p) { return uniform_reference(p, 60); };

    const auto sp = Partition::singletons(fine.state_space);
    const auto so = Partition::singletons(fine.obs_space);
    const auto ident = joint_quantize(fine, sp, so, ref_of(sp));
    CHECK(ident.l_xn == 0.0);
    CHECK(ident.l_yn == 0.0);
    const double id_dist = kernel_distance_tv(fine.kernel, ident.lifted.kernel);
    CHECK(id_dist < 1e-12);

    double last_lxn = 2.0, last_lyn = 2.0;
    for (std::size_t cells : {5, 10, 20}) {
        const auto px = Partition::uniform_intervals(fine.state_space, cells);
        const auto py = Partition::uniform_intervals(fine.obs_space, cells);
        const auto jq = joint_quantize(fine, px, py, ref_of(px));
        CHECK(jq.l_xn <= last_lxn);
        CHECK(jq.l_yn <= last_lyn);
        last_lxn = jq.l_xn;
        last_lyn = jq.l_yn;
        CHECK(jq.coarse.num_states() == cells);
        CHECK(jq.coarse.num_obs() == cells);
        for (std::size_t u = 0; u < jq.coarse.num_actions(); ++u)
            for (std::size_t i = 0; i < cells; ++i)
                CHECK(is_stochastic_row(jq.coarse.kernel.probs[u][i], 1e-12));
    }
}

TEST_CASE("zero-mass reference cells are a hard error naming the cell") {
    Rng rng(17);
    const auto m = testutil::random_model(rng, 4, 2, 1);
    const auto part = Partition::from_groups(m.state_space, {{0, 1}, {2, 3}});
    SupportedMeasure ref;
    ref.universe_size = 4;
    ref.atoms = {{0, 0.5}, {1, 0.5}}; // nothing on cell 1
    CHECK_THROWS_WITH_AS(quantize_states(m, part, ref),
                         doctest::Contains("cell 1"), std::invalid_argument);
}

TEST_CASE("uniform interval cells halve exactly when the cell count doubles") {
    const auto fine = discretize_reference(small_adapter(1.0, 80)).model;
    const auto p5 = Partition::uniform_intervals(fine.state_space, 5);
    const auto p10 = Partition::uniform_intervals(fine.state_space, 10);
    const auto p20 = Partition::uniform_intervals(fine.state_space, 20);
    CHECK(p5.max_cell_diameter == 2.0 * p10.max_cell_diameter);
    CHECK(p10.max_cell_diameter == 2.0 * p20.max_cell_diameter);
}
