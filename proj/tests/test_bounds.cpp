#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "beliefcert/bounds.hpp"

using namespace beliefcert;

TEST_CASE("bound id round trip") {
    for (const auto id : all_bound_ids()) CHECK(bound_id_from_string(to_string(id)) == id);
    CHECK_THROWS(bound_id_from_string("NOPE"));
}

TEST_CASE("filter contraction constant arithmetic") {
    // truncated-normal modulus at sigma = 1 with a fully uninformative channel
    const double alpha = std::numbers::sqrt2 / std::sqrt(std::numbers::pi);
    const auto s = evaluate_bound(BoundId::K2_WASS,
                                  {{"alpha", alpha}, {"diameter", 1.0}, {"dobrushin_q", 1.0}});
    CHECK(s.rhs_value == doctest::Approx(0.3989422804014327).epsilon(1e-12));

    const auto alt = evaluate_bound(BoundId::K2_ALT,
                                    {{"theta", 0.5}, {"l_q", 2.0}, {"diameter", 1.0}});
    CHECK(alt.rhs_value == doctest::Approx(0.5 + 3.0 * 0.5 * 2.0 / 2.0));
    CHECK(alt.assumption_flags.at("theta_lt_1"));
}

TEST_CASE("trivial values and simple closed forms") {
    CHECK(evaluate_bound(BoundId::MAIN1, {{"d_tv_t", 0.0}, {"d_tv_q", 0.0}}).rhs_value == 0.0);
    CHECK(evaluate_bound(BoundId::MAIN1, {{"d_tv_t", 0.1}, {"d_tv_q", 0.2}}).rhs_value ==
          doctest::Approx(0.6));
    CHECK(evaluate_bound(BoundId::W1MAIN1,
                         {{"diameter", 1.0}, {"d_tv_t", 0.1}, {"d_tv_q", 0.1}})
              .rhs_value == doctest::Approx(0.5));
    CHECK(evaluate_bound(BoundId::QUANT_STATE, {{"alpha", 0.8}, {"l_xn", 0.25}}).rhs_value ==
          doctest::Approx(0.45));
    CHECK(evaluate_bound(BoundId::QUANT_OBS_TV, {{"alpha_y", 0.3}, {"l_yn", 0.5}}).rhs_value ==
          doctest::Approx(0.15));
}

TEST_CASE("finite-horizon weights: single stage and the M = 1 limit") {
    const auto one = evaluate_bound(BoundId::FIN_HORIZON,
                                    {{"n", 1}, {"m", 7.3}, {"d", 2.0}, {"k_1", 0.5}});
    CHECK(one.rhs_value == doctest::Approx(1.0)); // k d, weight (1-M)/(1-M) = 1

    const auto lim = evaluate_bound(
        BoundId::FIN_HORIZON,
        {{"n", 3}, {"m", 1.0}, {"d", 1.0}, {"k_1", 1.0}, {"k_2", 1.0}, {"k_3", 1.0}});
    CHECK(lim.rhs_value == doctest::Approx(1.0 + 2.0 + 3.0)); // sum k_i * i * d

    const auto geo = evaluate_bound(
        BoundId::FIN_HORIZON,
        {{"n", 2}, {"m", 0.5}, {"d", 1.0}, {"k_1", 1.0}, {"k_2", 1.0}});
    CHECK(geo.rhs_value == doctest::Approx(1.0 + 1.5));
}

TEST_CASE("missing inputs raise an error naming the input") {
    CHECK_THROWS_WITH_AS(evaluate_bound(BoundId::MAIN1, {{"d_tv_t", 0.1}}),
                         doctest::Contains("d_tv_q"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(evaluate_bound(BoundId::JOINT_DISC, {{"beta", 0.5}}),
                         doctest::Contains("k1"), std::invalid_argument);
}

TEST_CASE("assumption guards produce the infinity sentinel, not an error") {
    const auto s = evaluate_bound(BoundId::DISC_ROBUST,
                                  {{"beta", 0.9}, {"k1", 1.0}, {"k2", 1.2}, {"diameter", 1.0},
                                   {"d_tv_t", 0.1}, {"d_tv_q", 0.1}});
    CHECK(std::isinf(s.rhs_value));
    CHECK(!s.assumptions_ok());
    CHECK(!s.assumption_flags.at("beta_k2_lt_1"));
    CHECK(!s.assumption_flags.at("k2_lt_1"));

    // beta k2 < 1 but k2 >= 1 still fails the standing assumption of the average-cost bounds
    const auto s2 = evaluate_bound(BoundId::DISC_ROBUST,
                                   {{"beta", 0.3}, {"k1", 1.0}, {"k2", 1.5}, {"diameter", 1.0},
                                    {"d_tv_t", 0.1}, {"d_tv_q", 0.1}});
    CHECK(s2.assumption_flags.at("beta_k2_lt_1"));
    CHECK(!s2.assumption_flags.at("k2_lt_1"));
    CHECK(std::isinf(s2.rhs_value));
}

TEST_CASE("cost-scale homogeneity: scaling K1 and cost norms scales the bounds") {
    const double lambda = 3.7;
    const BoundInputs base{{"beta", 0.6},   {"k1", 0.8},      {"k2", 0.5},
                           {"k2_n", 0.4},   {"diameter", 1.0}, {"d_tv_t", 0.2},
                           {"d_tv_q", 0.1}, {"d_w1_t", 0.15},  {"l_q", 1.1},
                           {"c_inf", 2.0},  {"d_tv_prior", 0.05}};
    BoundInputs scaled = base;
    scaled["k1"] = base.at("k1") * lambda;
    scaled["c_inf"] = base.at("c_inf") * lambda;
    for (const auto id : {BoundId::VALUE_LIP, BoundId::DISC_CONT, BoundId::DISC_CONT_REF,
                          BoundId::DISC_ROBUST, BoundId::DISC_ROBUST_REF,
                          BoundId::DISC_ROBUST_TWO_LIP, BoundId::AVG_CONT, BoundId::AVG_ROBUST,
                          BoundId::PRIOR_MISMATCH}) {
        const double v0 = evaluate_bound(id, base).rhs_value;
        const double v1 = evaluate_bound(id, scaled).rhs_value;
        CHECK(v1 == doctest::Approx(lambda * v0).epsilon(1e-12));
    }
}

TEST_CASE("right-hand sides are nondecreasing in every distance input") {
    const BoundInputs base{{"beta", 0.6},   {"k1", 0.8},      {"k2", 0.5},
                           {"k2_n", 0.4},   {"diameter", 1.0}, {"d_tv_t", 0.2},
                           {"d_tv_q", 0.1}, {"d_w1_t", 0.15},  {"l_q", 1.1},
                           {"c_inf", 2.0},  {"d_tv_prior", 0.05}};
    for (const auto id : {BoundId::MAIN1, BoundId::MAIN2, BoundId::W1MAIN1, BoundId::W1MAIN2,
                          BoundId::DISC_CONT, BoundId::DISC_ROBUST, BoundId::AVG_CONT,
                          BoundId::AVG_ROBUST, BoundId::PRIOR_MISMATCH}) {
        const double v0 = evaluate_bound(id, base).rhs_value;
        for (const char* key : {"d_tv_t", "d_tv_q", "d_w1_t", "d_tv_prior"}) {
            BoundInputs bumped = base;
            bumped[key] += 0.05;
            CHECK(evaluate_bound(id, bumped).rhs_value >= v0 - 1e-12);
        }
    }
}

TEST_CASE("the refined bound undercuts the TV bound when L_Q d_W1 <= d_TV") {
    const BoundInputs in{{"l_q", 0.5}, {"d_w1_t", 0.1}, {"d_tv_t", 0.2}, {"d_tv_q", 0.3}};
    const double m1 = evaluate_bound(BoundId::MAIN1, in).rhs_value;
    const double m2 = evaluate_bound(BoundId::MAIN2, in).rhs_value;
    REQUIRE(in.at("l_q") * in.at("d_w1_t") <= in.at("d_tv_t"));
    CHECK(m2 <= m1 + 1e-12);
}

TEST_CASE("certify: sign conventions of pass, margin, applicability") {
    const auto zero = evaluate_bound(BoundId::MAIN1, {{"d_tv_t", 0.0}, {"d_tv_q", 0.0}});
    const auto ok = certify(BoundId::MAIN1, 0.0, zero, 0.0);
    CHECK(ok.pass);
    CHECK(ok.applicable);
    CHECK(ok.margin == doctest::Approx(0.0));

    const auto spec = evaluate_bound(BoundId::MAIN1, {{"d_tv_t", 0.1}, {"d_tv_q", 0.0}});
    const double slack = 0.01;
    const auto fail = certify(BoundId::MAIN1, spec.rhs_value + 2.0 * slack, spec, slack);
    CHECK(!fail.pass);
    CHECK(fail.margin == doctest::Approx(-slack));

    const auto na = evaluate_bound(BoundId::AVG_CONT,
                                   {{"k1", 1.0}, {"k2", 1.4}, {"k2_n", 0.2}, {"diameter", 1.0},
                                    {"d_tv_t", 0.0}, {"d_tv_q", 0.0}});
    CHECK(!certify(BoundId::AVG_CONT, 0.5, na, 0.0).applicable);
}
