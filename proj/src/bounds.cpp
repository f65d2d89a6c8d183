#include "beliefcert/bounds.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace beliefcert {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

struct NamedId {
    BoundId id;
    const char* name;
};

constexpr NamedId kIds[] = {
    {BoundId::K2_WASS, "K2_WASS"},
    {BoundId::K2_ALT, "K2_ALT"},
    {BoundId::VALUE_LIP, "VALUE_LIP"},
    {BoundId::MAIN1, "MAIN1"},
    {BoundId::MAIN2, "MAIN2"},
    {BoundId::W1MAIN1, "W1MAIN1"},
    {BoundId::W1MAIN2, "W1MAIN2"},
    {BoundId::DISC_CONT, "DISC_CONT"},
    {BoundId::DISC_CONT_REF, "DISC_CONT_REF"},
    {BoundId::DISC_ROBUST, "DISC_ROBUST"},
    {BoundId::DISC_ROBUST_REF, "DISC_ROBUST_REF"},
    {BoundId::DISC_ROBUST_TWO_LIP, "DISC_ROBUST_TWO_LIP"},
    {BoundId::AVG_CONT, "AVG_CONT"},
    {BoundId::AVG_ROBUST, "AVG_ROBUST"},
    {BoundId::QUANT_STATE, "QUANT_STATE"},
    {BoundId::QUANT_OBS_TV, "QUANT_OBS_TV"},
    {BoundId::OBS_VALUE, "OBS_VALUE"},
    {BoundId::JOINT_FILTER_W1, "JOINT_FILTER_W1"},
    {BoundId::JOINT_DISC, "JOINT_DISC"},
    {BoundId::JOINT_AVG, "JOINT_AVG"},
    {BoundId::PRIOR_MISMATCH, "PRIOR_MISMATCH"},
    {BoundId::FIN_HORIZON, "FIN_HORIZON"},
};
} // namespace

const char* to_string(BoundId id) {
    for (const auto& e : kIds)
        if (e.id == id) return e.name;
    return "?";
}

BoundId bound_id_from_string(const std::string& name) {
    for (const auto& e : kIds)
        if (name == e.name) return e.id;
    throw std::invalid_argument("unknown bound id: " + name);
}

std::vector<BoundId> all_bound_ids() {
    std::vector<BoundId> out;
    for (const auto& e : kIds) out.push_back(e.id);
    return out;
}

bool BoundSpec::assumptions_ok() const {
    for (const auto& [name, ok] : assumption_flags)
        if (!ok) return false;
    return true;
}

namespace {

class Inputs {
  public:
    Inputs(BoundId id, const BoundInputs& in) : id_(id), in_(in) {}
    double get(const std::string& name) const {
        const auto it = in_.find(name);
        if (it == in_.end())
            throw std::invalid_argument(std::string(to_string(id_)) +
                                        ": missing input '" + name + "'");
        return it->second;
    }

  private:
    BoundId id_;
    const BoundInputs& in_;
};

} // namespace

BoundSpec evaluate_bound(BoundId id, const BoundInputs& inputs) {
    BoundSpec spec;
    spec.bound_id = id;
    spec.inputs = inputs;
    const Inputs in(id, inputs);

    // shared guard helpers; a failed guard records the flag and yields +inf
    bool broken = false;
    auto require_beta = [&](double beta) {
        const bool ok = beta > 0.0 && beta < 1.0;
        spec.assumption_flags["beta_in_0_1"] = ok;
        if (!ok) broken = true;
        return beta;
    };
    auto guard_beta_k2 = [&](double beta, double k2, const char* flag = "beta_k2_lt_1") {
        const bool ok = beta * k2 < 1.0;
        spec.assumption_flags[flag] = ok;
        if (!ok) broken = true;
    };
    auto guard_k2 = [&](double k2, const char* flag = "k2_lt_1") {
        const bool ok = k2 < 1.0;
        spec.assumption_flags[flag] = ok;
        if (!ok) broken = true;
    };
    auto finish = [&](double value) {
        spec.rhs_value = broken ? kInf : value;
        return spec;
    };

    switch (id) {
        case BoundId::K2_WASS: {
            const double a = in.get("alpha"), d = in.get("diameter"), q = in.get("dobrushin_q");
            return finish(a * d * (3.0 - 2.0 * q) / 2.0);
        }
        case BoundId::K2_ALT: {
            const double th = in.get("theta"), g = in.get("l_q"), d = in.get("diameter");
            spec.assumption_flags["theta_lt_1"] = th < 1.0;
            return finish(th + 3.0 * th * g * d / 2.0);
        }
        case BoundId::VALUE_LIP: {
            const double k1 = in.get("k1"), k2 = in.get("k2");
            const double beta = require_beta(in.get("beta"));
            guard_beta_k2(beta, k2);
            return finish(k1 / (1.0 - beta * k2));
        }
        case BoundId::MAIN1:
            return finish(2.0 * (in.get("d_tv_t") + in.get("d_tv_q")));
        case BoundId::MAIN2:
            return finish(2.0 * (in.get("l_q") * in.get("d_w1_t") + in.get("d_tv_q")));
        case BoundId::W1MAIN1:
            return finish((in.get("diameter") / 2.0 + 2.0) *
                          (in.get("d_tv_t") + in.get("d_tv_q")));
        case BoundId::W1MAIN2:
            return finish((in.get("diameter") / 2.0 + 2.0) *
                          (in.get("l_q") * in.get("d_w1_t") + in.get("d_tv_q")));
        case BoundId::DISC_CONT:
        case BoundId::DISC_CONT_REF: {
            const double beta = require_beta(in.get("beta"));
            const double k1 = in.get("k1"), k2 = in.get("k2"), d = in.get("diameter");
            guard_beta_k2(beta, k2);
            guard_k2(k2);
            const double dist = id == BoundId::DISC_CONT
                                    ? in.get("d_tv_t") + in.get("d_tv_q")
                                    : in.get("l_q") * in.get("d_w1_t") + in.get("d_tv_q");
            return finish(beta / (1.0 - beta) * k1 / (1.0 - beta * k2) * (d + 4.0) / 2.0 * dist);
        }
        case BoundId::DISC_ROBUST:
        case BoundId::DISC_ROBUST_REF: {
            const double beta = require_beta(in.get("beta"));
            const double k1 = in.get("k1"), k2 = in.get("k2"), d = in.get("diameter");
            guard_beta_k2(beta, k2);
            guard_k2(k2);
            const double dist = id == BoundId::DISC_ROBUST
                                    ? in.get("d_tv_t") + in.get("d_tv_q")
                                    : in.get("l_q") * in.get("d_w1_t") + in.get("d_tv_q");
            return finish(2.0 * beta * k1 / ((1.0 - beta) * (1.0 - beta) * (1.0 - beta * k2)) *
                          (d + 4.0) / 2.0 * dist);
        }
        case BoundId::DISC_ROBUST_TWO_LIP: {
            const double beta = require_beta(in.get("beta"));
            const double k1 = in.get("k1"), k2 = in.get("k2"), k2n = in.get("k2_n");
            const double d = in.get("diameter");
            guard_beta_k2(beta, k2);
            guard_beta_k2(beta, k2n, "beta_k2_n_lt_1");
            guard_k2(k2);
            guard_k2(k2n, "k2_n_lt_1");
            const double lips = k1 / (1.0 - beta * k2) + k1 / (1.0 - beta * k2n);
            return finish(beta / (1.0 - beta) * lips * (d + 4.0) / 2.0 *
                          (in.get("d_tv_t") + in.get("d_tv_q")));
        }
        case BoundId::AVG_CONT: {
            const double k1 = in.get("k1"), k2 = in.get("k2"), k2n = in.get("k2_n");
            guard_k2(k2);
            guard_k2(k2n, "k2_n_lt_1");
            return finish(k1 / (1.0 - k2) * (in.get("diameter") + 4.0) / 2.0 *
                          (in.get("d_tv_t") + in.get("d_tv_q")));
        }
        case BoundId::AVG_ROBUST: {
            const double k1 = in.get("k1"), k2 = in.get("k2"), k2n = in.get("k2_n");
            guard_k2(k2);
            guard_k2(k2n, "k2_n_lt_1");
            const double lips = k1 / (1.0 - k2) + k1 / (1.0 - k2n);
            return finish(lips * (in.get("diameter") + 4.0) / 2.0 *
                          (in.get("d_tv_t") + in.get("d_tv_q")));
        }
        case BoundId::QUANT_STATE:
            return finish((in.get("alpha") + 1.0) * in.get("l_xn"));
        case BoundId::QUANT_OBS_TV:
            return finish(in.get("alpha_y") * in.get("l_yn"));
        case BoundId::OBS_VALUE: {
            const double beta = require_beta(in.get("beta"));
            return finish(beta / ((1.0 - beta) * (1.0 - beta)) * in.get("c_inf") *
                          in.get("alpha_y") * in.get("l_yn"));
        }
        case BoundId::JOINT_FILTER_W1:
            return finish((in.get("diameter") + 4.0) / 2.0 *
                          (in.get("l_q") * (in.get("alpha") + 1.0) * in.get("l_xn") +
                           in.get("alpha_y") * in.get("l_yn")));
        case BoundId::JOINT_DISC: {
            const double beta = require_beta(in.get("beta"));
            const double k1 = in.get("k1"), k2 = in.get("k2");
            guard_beta_k2(beta, k2);
            guard_k2(k2);
            const double inner = in.get("l_q") * (in.get("alpha") + 1.0) * in.get("l_xn") +
                                 in.get("alpha_y") * in.get("l_yn");
            return finish(2.0 * beta * k1 / ((1.0 - beta) * (1.0 - beta) * (1.0 - beta * k2)) *
                          (in.get("diameter") + 4.0) / 2.0 * inner);
        }
        case BoundId::JOINT_AVG: {
            const double k1 = in.get("k1"), k2 = in.get("k2"), k2n = in.get("k2_n");
            guard_k2(k2);
            guard_k2(k2n, "k2_n_lt_1");
            const double lips = k1 / (1.0 - k2) + k1 / (1.0 - k2n);
            const double inner = in.get("l_q") * (in.get("alpha") + 1.0) * in.get("l_xn") +
                                 in.get("alpha_y") * in.get("l_yn");
            return finish(lips * (in.get("diameter") + 4.0) / 2.0 * inner);
        }
        case BoundId::PRIOR_MISMATCH: {
            const double beta = require_beta(in.get("beta"));
            const double k1 = in.get("k1"), k2 = in.get("k2"), d = in.get("diameter");
            guard_beta_k2(beta, k2);
            guard_k2(k2);
            const double c1 = (3.0 * beta - beta * beta) * k1 /
                              ((1.0 - beta) * (1.0 - beta) * (1.0 - beta * k2)) * (d + 4.0) / 2.0;
            const double c2 = 2.0 * in.get("c_inf") / (1.0 - beta);
            return finish(c1 * (in.get("d_tv_t") + in.get("d_tv_q")) +
                          c2 * in.get("d_tv_prior"));
        }
        case BoundId::FIN_HORIZON: {
            const std::size_t n = std::size_t(in.get("n"));
            const double m = in.get("m");
            const double d = in.get("d");
            double sum = 0.0;
            for (std::size_t i = 1; i <= n; ++i) {
                const double ki = in.get("k_" + std::to_string(i));
                // (1 - m^i) / (1 - m), with the m -> 1 limit equal to i
                const double weight =
                    std::abs(1.0 - m) < 1e-12 ? double(i)
                                              : (1.0 - std::pow(m, double(i))) / (1.0 - m);
                sum += ki * weight;
            }
            return finish(sum * d);
        }
    }
    throw std::logic_error("evaluate_bound: unhandled id");
}

BoundReport certify(BoundId id, double lhs_measured, const BoundSpec& spec, double slack,
                    const std::string& argmax) {
    BoundReport r;
    r.bound_id = to_string(id);
    r.lhs = lhs_measured;
    r.rhs = spec.rhs_value;
    r.slack = slack;
    r.margin = spec.rhs_value + slack - lhs_measured;
    r.assumption_flags = spec.assumption_flags;
    // an unbounded slack means the measurement error itself could not be
    // bounded; the row is then no evidence either way
    if (!std::isfinite(slack)) r.assumption_flags["slack_finite"] = false;
    r.applicable = spec.assumptions_ok() && std::isfinite(slack);
    r.pass = lhs_measured <= spec.rhs_value + slack + 1e-9;
    r.argmax = argmax;
    return r;
}

} // namespace beliefcert
