#include "beliefcert/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "beliefcert/constants.hpp"
#include "beliefcert/filter.hpp"
#include "beliefcert/metrics.hpp"
#include "beliefcert/model_io.hpp"
#include "beliefcert/solver.hpp"

namespace beliefcert {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Scenario loading
// ---------------------------------------------------------------------------

namespace {

ContinuousModelAdapter adapter_from_json(const json& j) {
    ContinuousModelAdapter a;
    const std::string kind = j.value("kind", "truncated_normal_kernel");
    if (kind == "truncated_normal_kernel")
        a.kind = ContinuousModelAdapter::Kind::truncated_normal_kernel;
    else if (kind == "additive_gaussian_channel")
        a.kind = ContinuousModelAdapter::Kind::additive_gaussian_channel;
    else if (kind == "table_on_fine_grid")
        a.kind = ContinuousModelAdapter::Kind::table_on_fine_grid;
    else throw std::invalid_argument("scenario: unknown adapter kind '" + kind + "'");
    if (j.contains("domain")) {
        a.domain_lo = j["domain"].at(0).get<double>();
        a.domain_hi = j["domain"].at(1).get<double>();
    }
    a.fine_grid_size = j.value("fine_grid", std::size_t(400));
    a.sigma = j.value("sigma", 1.0);
    a.obs_sigma = j.value("obs_sigma", 1.0);
    a.obs_grid_size = j.value("obs_grid", std::size_t(0));
    a.gl_nodes = j.value("gl_nodes", 16);
    if (j.contains("action_offsets"))
        a.action_offsets = j["action_offsets"].get<std::vector<double>>();
    return a;
}

} // namespace

Scenario Scenario::from_json_text(const std::string& text, const std::string& base_dir) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("scenario: invalid JSON: ") + e.what());
    }
    Scenario sc;
    sc.name = j.value("name", "unnamed");
    if (j.contains("model")) {
        const auto& m = j["model"];
        if (m.contains("file")) {
            sc.model_file = m["file"].get<std::string>();
            if (!base_dir.empty() && !sc.model_file.empty() && sc.model_file[0] != '/')
                sc.model_file = base_dir + "/" + sc.model_file;
        }
        if (m.contains("adapter")) sc.adapter = adapter_from_json(m["adapter"]);
    }
    if (j.contains("perturbation")) {
        const auto& p = j["perturbation"];
        sc.eps_kernel = p.value("eps_kernel", 0.0);
        sc.eps_channel = p.value("eps_channel", 0.0);
        sc.eps_prior = p.value("eps_prior", 0.0);
        sc.eps_permute = p.value("eps_permute", 0.0);
        sc.n_x = p.value("n_x", std::size_t(0));
        sc.n_y = p.value("n_y", std::size_t(0));
    }
    if (j.contains("solver")) {
        const auto& s = j["solver"];
        sc.beta = s.value("beta", 0.95);
        sc.grid_m = s.value("grid_m", std::size_t(0));
        sc.tol = s.value("tol", 1e-8);
        sc.rvi_tol = s.value("rvi_tol", 1e-7);
        sc.rvi_max_iter = s.value("rvi_max_iter", std::size_t(500'000));
        sc.fin_horizon = s.value("fin_horizon", std::size_t(5));
        sc.average_cost = s.value("average_cost", false);
        sc.contraction_grid_m = s.value("contraction_grid_m", std::size_t(0));
        sc.filter_grid_m = s.value("filter_grid_m", std::size_t(0));
    }
    sc.seed = j.value("seed", std::uint64_t(1));
    const auto bad = sc.violations();
    if (!bad.empty()) throw std::runtime_error("scenario: " + bad.front());
    return sc;
}

Scenario Scenario::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open scenario file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    std::string dir;
    if (const auto slash = path.find_last_of('/'); slash != std::string::npos)
        dir = path.substr(0, slash);
    return from_json_text(buf.str(), dir);
}

std::vector<std::string> Scenario::violations() const {
    std::vector<std::string> out;
    const int sources = int(!model_file.empty()) + int(adapter.has_value());
    if (sources != 1) out.push_back("exactly one model source (file or adapter) required");
    for (double e : {eps_kernel, eps_channel, eps_prior, eps_permute})
        if (e < 0.0 || e > 1.0) out.push_back("mixing weights must lie in [0,1]");
    if (!(beta > 0.0 && beta < 1.0)) out.push_back("beta must lie in (0,1)");
    if (!(tol > 0.0)) out.push_back("tol must be positive");
    return out;
}

// ---------------------------------------------------------------------------
// Perturbation recipes
// ---------------------------------------------------------------------------

TransitionKernel mix_kernel_with_uniform(const TransitionKernel& k, double eps) {
    TransitionKernel out = k;
    const double n = double(k.num_states());
    for (auto& mat : out.probs)
        for (auto& row : mat)
            for (double& v : row) v = (1.0 - eps) * v + eps / n;
    return out;
}

ObservationChannel mix_channel_with_uniform(const ObservationChannel& q, double eps) {
    ObservationChannel out = q;
    const double n = double(q.num_obs());
    for (auto& row : out.probs)
        for (double& v : row) v = (1.0 - eps) * v + eps / n;
    return out;
}

Belief mix_prior_with_uniform(const Belief& b, double eps) {
    Belief out = b;
    const double n = double(b.size());
    for (double& v : out.weights) v = (1.0 - eps) * v + eps / n;
    return out;
}

TransitionKernel permutation_blend_kernel(const TransitionKernel& k, double eps) {
    TransitionKernel out = k;
    const std::size_t n = k.num_states();
    for (std::size_t u = 0; u < k.num_actions(); ++u)
        for (std::size_t x = 0; x < n; ++x) {
            const auto& shifted = k.probs[u][(x + 1) % n];
            for (std::size_t j = 0; j < n; ++j)
                out.probs[u][x][j] = (1.0 - eps) * k.probs[u][x][j] + eps * shifted[j];
        }
    return out;
}

// ---------------------------------------------------------------------------
// Verify pipeline
// ---------------------------------------------------------------------------

namespace {

Partition make_partition(const FiniteMetricSpace& space, std::size_t cells) {
    if (space.coords) return Partition::uniform_intervals(space, cells);
    // contiguous index groups for spaces without coordinates
    std::vector<std::vector<std::size_t>> groups(cells);
    for (std::size_t p = 0; p < space.size(); ++p)
        groups[p * cells / space.size()].push_back(p);
    return Partition::from_groups(space, groups);
}

double sup_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s = std::max(s, std::abs(a[i] - b[i]));
    return s;
}

double sup_signed_excess(const std::vector<double>& a, const std::vector<double>& b) {
    double s = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < a.size(); ++i) s = std::max(s, a[i] - b[i]);
    return s;
}

std::string grid_argmax(const BeliefGrid& grid, std::size_t zi, std::size_t action) {
    std::string s = "z=(";
    char buf[32];
    for (std::size_t i = 0; i < grid.beliefs[zi].size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.4g", grid.beliefs[zi][i]);
        s += (i ? "," : "") + std::string(buf);
    }
    s += "),u=" + std::to_string(action);
    return s;
}

// Measured Lipschitz modulus of a grid value function under W1 between grid
// beliefs, restricted to pairs at least min_separation apart so that grid
// snapping noise cannot inflate the ratio. A subset maximum is still a valid
// lower bound for certification. Strided to stay under ~1200 points.
double value_lipschitz(const std::vector<double>& values, const BeliefGrid& grid,
                       const FiniteMetricSpace& space, double min_separation) {
    const std::size_t n = grid.beliefs.size();
    const std::size_t stride = n > 1200 ? (n + 1199) / 1200 : 1;
    const auto ground = ground_of(space);
    double lip = 0.0;
    for (std::size_t i = 0; i < n; i += stride) {
        const auto p = SupportedMeasure::from_vector(grid.beliefs[i].weights);
        for (std::size_t j = i + stride; j < n; j += stride) {
            const auto q = SupportedMeasure::from_vector(grid.beliefs[j].weights);
            const double d = w1_distance(p, q, ground);
            if (d >= min_separation && d > 1e-12)
                lip = std::max(lip, std::abs(values[i] - values[j]) / d);
        }
    }
    return lip;
}

struct DpBundle {
    BeliefGrid grid;
    BeliefMdp bmdp_true, bmdp_approx;
    ViResult vi_true, vi_approx;
    ValueFunction cross; // approx-optimal policy evaluated on the true model
};

DpBundle solve_pair(const PomdpModel& true_model, const PomdpModel& approx_model,
                    std::size_t grid_m, double beta, double tol) {
    DpBundle b;
    b.grid = belief_grid(true_model.num_states(),
                         grid_m ? grid_m : default_grid_resolution(true_model.num_states()));
    b.bmdp_true = build_belief_mdp(true_model, b.grid);
    b.bmdp_approx = build_belief_mdp(approx_model, b.grid);
    b.vi_true = value_iteration(b.bmdp_true, beta, tol);
    b.vi_approx = value_iteration(b.bmdp_approx, beta, tol);
    b.cross = cross_evaluate_on(b.bmdp_true, b.vi_approx.policy, b.grid, beta, tol);
    return b;
}

} // namespace

VerifyOutcome run_verify(const Scenario& sc) {
    VerifyOutcome out;
    auto push = [&](BoundReport r) {
        r.scenario = sc.name;
        if (r.applicable && !r.pass) out.all_applicable_pass = false;
        out.reports.push_back(std::move(r));
    };

    // -- load -----------------------------------------------------------------
    PomdpModel true_model;
    double integration_defect = 0.0;
    try {
        if (sc.adapter) {
            auto d = discretize_reference(*sc.adapter);
            true_model = std::move(d.model);
            integration_defect = d.integration_defect;
        } else {
            true_model = load_model(sc.model_file);
        }
    } catch (const std::exception& e) {
        throw PipelineError("load", e.what());
    }
    if (const auto bad = validate_model(true_model); !bad.empty())
        throw PipelineError("validate", bad.front());
    out.measurements.integration_defect = integration_defect;

    // -- perturb ---------------------------------------------------------------
    const bool quantizing = sc.n_x > 0 || sc.n_y > 0;
    std::optional<JointQuantization> jq;
    PomdpModel approx = true_model;
    try {
        if (quantizing) {
            const Partition state_part = sc.n_x > 0
                                             ? make_partition(true_model.state_space, sc.n_x)
                                             : Partition::singletons(true_model.state_space);
            const Partition obs_part = sc.n_y > 0
                                           ? make_partition(true_model.obs_space, sc.n_y)
                                           : Partition::singletons(true_model.obs_space);
            const auto ref = uniform_reference(state_part, true_model.num_states());
            jq = joint_quantize(true_model, state_part, obs_part, ref);
            approx = jq->lifted;
        }
        if (sc.eps_permute > 0.0)
            approx.kernel = permutation_blend_kernel(approx.kernel, sc.eps_permute);
        if (sc.eps_kernel > 0.0) approx.kernel = mix_kernel_with_uniform(approx.kernel, sc.eps_kernel);
        if (sc.eps_channel > 0.0)
            approx.channel = mix_channel_with_uniform(approx.channel, sc.eps_channel);
        if (sc.eps_prior > 0.0) approx.prior = mix_prior_with_uniform(approx.prior, sc.eps_prior);
    } catch (const std::exception& e) {
        throw PipelineError("perturb", e.what());
    }

    // -- constants and kernel distances -----------------------------------------
    const ModelConstants ct = derive_constants(true_model);
    const ModelConstants ca = derive_constants(approx);
    const double l_q_shared = std::max(ct.l_q, ca.l_q);
    out.measurements.k2_true = ct.k2;
    out.measurements.k2_approx = ca.k2;
    out.measurements.l_q_shared = l_q_shared;

    const GroundMetric ground_x = ground_of(true_model.state_space);
    const double d_tv_t = kernel_distance_tv(true_model.kernel, approx.kernel);
    const double d_w1_t =
        kernel_distance(true_model.kernel, approx.kernel, MeasureMetric::W1, ground_x);
    const double d_tv_q = channel_distance_tv(true_model.channel, approx.channel);
    double d_tv_prior = 0.0;
    for (std::size_t x = 0; x < true_model.num_states(); ++x)
        d_tv_prior += std::abs(true_model.prior[x] - approx.prior[x]);
    out.measurements.d_tv_kernel = d_tv_t;
    out.measurements.d_w1_kernel = d_w1_t;
    out.measurements.d_tv_channel = d_tv_q;
    out.measurements.d_tv_prior = d_tv_prior;

    const std::size_t nx = true_model.num_states();
    const BoundInputs dist_inputs{{"d_tv_t", d_tv_t},       {"d_tv_q", d_tv_q},
                                  {"d_w1_t", d_w1_t},       {"l_q", l_q_shared},
                                  {"diameter", ct.diameter}};

    // -- filter-kernel distances -------------------------------------------------
    std::size_t filter_m = sc.filter_grid_m;
    if (filter_m == 0) filter_m = nx <= 3 ? default_grid_resolution(nx) : 1;
    const BeliefGrid filter_grid = belief_grid(nx, filter_m);
    FilterDistanceResult bl, w1, rho2, gap;
    try {
        bl = filter_kernel_distance(true_model, approx, filter_grid, MeasureMetric::BL);
        w1 = filter_kernel_distance(true_model, approx, filter_grid, MeasureMetric::W1);
        rho2 = filter_kernel_distance_rho2(true_model, approx, filter_grid);
        gap = predictive_tv_gap(true_model, approx, filter_grid);
    } catch (const std::exception& e) {
        throw PipelineError("filter", e.what());
    }
    out.measurements.bl_filter = bl.value;
    out.measurements.w1_filter = w1.value;
    out.measurements.rho2_filter = rho2.value;
    out.measurements.predictive_gap = gap.value;

    push(certify(BoundId::MAIN1, bl.value, evaluate_bound(BoundId::MAIN1, dist_inputs), 0.0,
                 grid_argmax(filter_grid, bl.argmax_grid, bl.argmax_action)));
    push(certify(BoundId::MAIN2, bl.value, evaluate_bound(BoundId::MAIN2, dist_inputs), 0.0,
                 grid_argmax(filter_grid, bl.argmax_grid, bl.argmax_action)));
    push(certify(BoundId::W1MAIN1, w1.value, evaluate_bound(BoundId::W1MAIN1, dist_inputs), 0.0,
                 grid_argmax(filter_grid, w1.argmax_grid, w1.argmax_action)));
    push(certify(BoundId::W1MAIN2, w1.value, evaluate_bound(BoundId::W1MAIN2, dist_inputs), 0.0,
                 grid_argmax(filter_grid, w1.argmax_grid, w1.argmax_action)));

    // -- filter contraction -------------------------------------------------------
    std::size_t cm = sc.contraction_grid_m;
    if (cm == 0) cm = nx == 2 ? 10 : nx == 3 ? 5 : nx <= 6 ? 2 : 1;
    try {
        const BeliefGrid cgrid = belief_grid(nx, cm);
        const auto contraction = filter_contraction_ratio(true_model, cgrid);
        push(certify(BoundId::K2_WASS, contraction.ratio,
                     evaluate_bound(BoundId::K2_WASS, {{"alpha", ct.alpha},
                                                       {"diameter", ct.diameter},
                                                       {"dobrushin_q", ct.dobrushin_q}}),
                     0.0, grid_argmax(cgrid, contraction.argmax_i, contraction.argmax_action)));
        push(certify(BoundId::K2_ALT, contraction.ratio,
                     evaluate_bound(BoundId::K2_ALT, {{"theta", ct.theta},
                                                      {"l_q", ct.l_q},
                                                      {"diameter", ct.diameter}}),
                     0.0, grid_argmax(cgrid, contraction.argmax_i, contraction.argmax_action)));
    } catch (const std::exception& e) {
        throw PipelineError("contraction", e.what());
    }

    // -- discounted dynamic programming -------------------------------------------
    const double beta = sc.beta;
    DpBundle dp;
    try {
        dp = solve_pair(true_model, approx, sc.grid_m, beta, sc.tol);
    } catch (const std::exception& e) {
        throw PipelineError("dp", e.what());
    }
    out.measurements.grid_points = dp.grid.beliefs.size();
    out.measurements.grid_defect_true = dp.bmdp_true.grid_defect_w1;
    out.measurements.grid_defect_approx = dp.bmdp_approx.grid_defect_w1;

    // grid slack: one-step backup error beta * L_V * defect, accumulated
    const auto vi_slack = [&](const ModelConstants& c, double defect) {
        if (beta * c.k2 >= 1.0) return std::numeric_limits<double>::infinity();
        return beta * (c.k1 / (1.0 - beta * c.k2)) * defect / (1.0 - beta);
    };
    const double eps_t = vi_slack(ct, dp.bmdp_true.grid_defect_w1);
    const double eps_a = vi_slack(ca, dp.bmdp_approx.grid_defect_w1);
    const double slack_cont = eps_t + eps_a + 2.0 * sc.tol;
    const double slack_robust = 2.0 * (eps_t + eps_a) + 4.0 * sc.tol;

    BoundInputs dp_inputs = dist_inputs;
    dp_inputs["beta"] = beta;
    dp_inputs["k1"] = ct.k1;
    dp_inputs["k2"] = ct.k2;
    dp_inputs["k2_n"] = ca.k2;

    if (ct.diameter > 0.0) {
        // pairs closer than D/4 are skipped; the matching value-error slack is
        // 2 (eps + tol) / (D/4)
        const double lip_measured = value_lipschitz(dp.vi_true.value.values, dp.grid,
                                                    true_model.state_space, ct.diameter / 4.0);
        const double lip_slack = 8.0 * (eps_t + sc.tol) / ct.diameter;
        push(certify(BoundId::VALUE_LIP, lip_measured,
                     evaluate_bound(BoundId::VALUE_LIP, dp_inputs), lip_slack));
    }

    const double disc_cont_lhs = sup_abs_diff(dp.vi_true.value.values, dp.vi_approx.value.values);
    push(certify(BoundId::DISC_CONT, disc_cont_lhs, evaluate_bound(BoundId::DISC_CONT, dp_inputs),
                 slack_cont));
    push(certify(BoundId::DISC_CONT_REF, disc_cont_lhs,
                 evaluate_bound(BoundId::DISC_CONT_REF, dp_inputs), slack_cont));

    const double robust_lhs = sup_signed_excess(dp.cross.values, dp.vi_true.value.values);
    push(certify(BoundId::DISC_ROBUST, robust_lhs, evaluate_bound(BoundId::DISC_ROBUST, dp_inputs),
                 slack_robust));
    push(certify(BoundId::DISC_ROBUST_REF, robust_lhs,
                 evaluate_bound(BoundId::DISC_ROBUST_REF, dp_inputs), slack_robust));
    push(certify(BoundId::DISC_ROBUST_TWO_LIP, robust_lhs,
                 evaluate_bound(BoundId::DISC_ROBUST_TWO_LIP, dp_inputs), slack_robust));

    {
        BoundInputs pin = dp_inputs;
        pin["c_inf"] = true_model.cost_sup_norm();
        pin["d_tv_prior"] = d_tv_prior;
        const std::size_t zp = snap_to_grid(dp.grid, true_model.prior, SnapMetric::L1);
        const double prior_lhs = dp.cross.values[zp] - dp.vi_true.value.values[zp];
        push(certify(BoundId::PRIOR_MISMATCH, prior_lhs,
                     evaluate_bound(BoundId::PRIOR_MISMATCH, pin), slack_robust,
                     grid_argmax(dp.grid, zp, 0)));
    }

    // -- finite horizon -------------------------------------------------------------
    try {
        const std::size_t n_stage = sc.fin_horizon;
        const auto v0_t = finite_horizon_dp(dp.bmdp_true, n_stage);
        const auto v0_a = finite_horizon_dp(dp.bmdp_approx, n_stage);
        BoundInputs fin;
        fin["n"] = double(n_stage);
        fin["m"] = ct.k2;
        fin["d"] = (ct.diameter / 2.0 + 2.0) * (d_tv_t + d_tv_q);
        double weight_sum = 0.0;
        for (std::size_t i = 1; i <= n_stage; ++i) {
            fin["k_" + std::to_string(i)] = i < n_stage ? ct.k1 : 0.0; // zero terminal cost
            const double w = std::abs(1.0 - ct.k2) < 1e-12
                                 ? double(i)
                                 : (1.0 - std::pow(ct.k2, double(i))) / (1.0 - ct.k2);
            weight_sum += (i < n_stage ? ct.k1 : 0.0) * w;
        }
        const double slack_fh =
            weight_sum * (dp.bmdp_true.grid_defect_w1 + dp.bmdp_approx.grid_defect_w1);
        push(certify(BoundId::FIN_HORIZON, sup_abs_diff(v0_t, v0_a),
                     evaluate_bound(BoundId::FIN_HORIZON, fin), slack_fh));
    } catch (const PipelineError&) {
        throw;
    } catch (const std::exception& e) {
        throw PipelineError("finite_horizon", e.what());
    }

    // -- average cost ------------------------------------------------------------------
    if (sc.average_cost) {
        try {
            const auto rv_t = relative_value_iteration(dp.bmdp_true, sc.rvi_tol, sc.rvi_max_iter);
            const auto rv_a =
                relative_value_iteration(dp.bmdp_approx, sc.rvi_tol, sc.rvi_max_iter);
            const auto avg_slack = [&](const ModelConstants& c, double defect) {
                return c.k2 < 1.0 ? c.k1 / (1.0 - c.k2) * defect
                                  : std::numeric_limits<double>::infinity();
            };
            const double s_avg = avg_slack(ct, dp.bmdp_true.grid_defect_w1) +
                                 avg_slack(ca, dp.bmdp_approx.grid_defect_w1) + 2.0 * sc.rvi_tol;
            push(certify(BoundId::AVG_CONT, std::abs(rv_t.rho_star - rv_a.rho_star),
                         evaluate_bound(BoundId::AVG_CONT, dp_inputs), s_avg));

            const Policy cross_policy =
                induce_policy(dp.grid, dp.vi_approx.policy, dp.grid, SnapMetric::L1);
            const auto rv_cross =
                relative_value_evaluation(dp.bmdp_true, cross_policy, sc.rvi_tol, sc.rvi_max_iter);
            auto rep = certify(BoundId::AVG_ROBUST, rv_cross.rho_star - rv_t.rho_star,
                               evaluate_bound(BoundId::AVG_ROBUST, dp_inputs), 2.0 * s_avg);
            rep.assumption_flags["conditional_stationarity"] = true;
            push(std::move(rep));
        } catch (const std::exception& e) {
            throw PipelineError("average", e.what());
        }
    }

    // -- quantization certifications ------------------------------------------------------
    if (jq) {
        try {
            const double ay = ct.alpha_y.value_or(0.0);
            if (sc.n_x > 0) {
                const double lhs =
                    kernel_distance(true_model.kernel, jq->lifted.kernel, MeasureMetric::W1,
                                    ground_x);
                push(certify(BoundId::QUANT_STATE, lhs,
                             evaluate_bound(BoundId::QUANT_STATE,
                                            {{"alpha", ct.alpha}, {"l_xn", jq->l_xn}}),
                             integration_defect));
            }
            if (sc.n_y > 0 && ct.alpha_y) {
                const Partition obs_part = make_partition(true_model.obs_space, sc.n_y);
                const auto oq = quantize_observations(true_model, obs_part);
                const double lhs = channel_distance_tv(true_model.channel, oq.intermediate);
                push(certify(BoundId::QUANT_OBS_TV, lhs,
                             evaluate_bound(BoundId::QUANT_OBS_TV,
                                            {{"alpha_y", ay}, {"l_yn", oq.l_yn}}),
                             integration_defect));
            }
            if (sc.n_y == 0 || ct.alpha_y) {
                // the pure quantized model (no mixing) carries the joint bounds
                const bool mixed = sc.eps_kernel > 0.0 || sc.eps_channel > 0.0 ||
                                   sc.eps_prior > 0.0 || sc.eps_permute > 0.0;
                const PomdpModel& pure = jq->lifted;
                const ModelConstants cpure = mixed ? derive_constants(pure) : ca;
                BoundInputs joint{{"diameter", ct.diameter}, {"l_q", ct.l_q},
                                  {"alpha", ct.alpha},       {"l_xn", jq->l_xn},
                                  {"alpha_y", ay},           {"l_yn", jq->l_yn},
                                  {"beta", beta},            {"k1", ct.k1},
                                  {"k2", ct.k2},             {"k2_n", cpure.k2}};

                FilterDistanceResult jt = mixed
                                              ? filter_kernel_distance(true_model, pure,
                                                                       filter_grid,
                                                                       MeasureMetric::W1)
                                              : w1;
                push(certify(BoundId::JOINT_FILTER_W1, jt.value,
                             evaluate_bound(BoundId::JOINT_FILTER_W1, joint),
                             integration_defect,
                             grid_argmax(filter_grid, jt.argmax_grid, jt.argmax_action)));

                const DpBundle* jdp = &dp;
                DpBundle own;
                if (mixed) {
                    own = solve_pair(true_model, pure, sc.grid_m, beta, sc.tol);
                    jdp = &own;
                }
                const double joint_lhs =
                    sup_signed_excess(jdp->cross.values, jdp->vi_true.value.values);
                const double slack_joint =
                    2.0 * (vi_slack(ct, jdp->bmdp_true.grid_defect_w1) +
                           vi_slack(cpure, jdp->bmdp_approx.grid_defect_w1)) +
                    4.0 * sc.tol;
                push(certify(BoundId::JOINT_DISC, joint_lhs,
                             evaluate_bound(BoundId::JOINT_DISC, joint),
                             slack_joint + integration_defect));
                if (sc.average_cost) {
                    const auto rv_t =
                        relative_value_iteration(jdp->bmdp_true, sc.rvi_tol, sc.rvi_max_iter);
                    const Policy jp =
                        induce_policy(jdp->grid, jdp->vi_approx.policy, jdp->grid, SnapMetric::L1);
                    const auto rv_cross = relative_value_evaluation(jdp->bmdp_true, jp,
                                                                    sc.rvi_tol, sc.rvi_max_iter);
                    const auto avg_slack = [&](const ModelConstants& c, double defect) {
                        return c.k2 < 1.0 ? c.k1 / (1.0 - c.k2) * defect
                                          : std::numeric_limits<double>::infinity();
                    };
                    const double s_avg =
                        2.0 * (avg_slack(ct, jdp->bmdp_true.grid_defect_w1) +
                               avg_slack(cpure, jdp->bmdp_approx.grid_defect_w1)) +
                        2.0 * sc.rvi_tol;
                    auto rep = certify(BoundId::JOINT_AVG, rv_cross.rho_star - rv_t.rho_star,
                                       evaluate_bound(BoundId::JOINT_AVG, joint), s_avg);
                    rep.assumption_flags["conditional_stationarity"] = true;
                    push(std::move(rep));
                }
            }
            if (sc.n_y > 0 && ct.alpha_y) {
                // observation quantization alone, against the discounted value
                const Partition obs_part = make_partition(true_model.obs_space, sc.n_y);
                const auto oq = quantize_observations(true_model, obs_part);
                PomdpModel obs_model = true_model;
                obs_model.channel = oq.intermediate;
                const BeliefMdp bq = build_belief_mdp(obs_model, dp.grid);
                const auto vi_q = value_iteration(bq, beta, sc.tol);
                const ModelConstants cq = derive_constants(obs_model);
                const double lhs =
                    sup_signed_excess(vi_q.value.values, dp.vi_true.value.values);
                const double slack = vi_slack(ct, dp.bmdp_true.grid_defect_w1) +
                                     vi_slack(cq, bq.grid_defect_w1) + 2.0 * sc.tol;
                push(certify(BoundId::OBS_VALUE, lhs,
                             evaluate_bound(BoundId::OBS_VALUE,
                                            {{"beta", beta},
                                             {"c_inf", true_model.cost_sup_norm()},
                                             {"alpha_y", ay},
                                             {"l_yn", oq.l_yn}}),
                             slack + integration_defect));
            }
        } catch (const std::exception& e) {
            throw PipelineError("quantize", e.what());
        }
    }

    return out;
}

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------

std::vector<SweepRow> run_sweep(const Scenario& scenario, const std::string& parameter,
                                const std::vector<double>& values) {
    std::vector<SweepRow> rows;
    for (const double v : values) {
        Scenario sc = scenario;
        if (parameter == "eps_kernel") sc.eps_kernel = v;
        else if (parameter == "eps_channel") sc.eps_channel = v;
        else if (parameter == "eps_prior") sc.eps_prior = v;
        else if (parameter == "eps_permute") sc.eps_permute = v;
        else if (parameter == "n_x") sc.n_x = std::size_t(v);
        else if (parameter == "n_y") sc.n_y = std::size_t(v);
        else if (parameter == "beta") sc.beta = v;
        else if (parameter == "grid_m") sc.grid_m = std::size_t(v);
        else if (parameter == "fin_horizon") sc.fin_horizon = std::size_t(v);
        else throw std::invalid_argument("sweep: unknown parameter '" + parameter + "'");
        const auto outcome = run_verify(sc);
        for (const auto& r : outcome.reports) rows.push_back({v, r});
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Report emission
// ---------------------------------------------------------------------------

namespace {

std::string fmt_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

json report_to_json(const BoundReport& r) {
    json flags = json::object();
    for (const auto& [k, v] : r.assumption_flags) flags[k] = v;
    json j;
    j["schema_version"] = 1;
    j["scenario"] = r.scenario;
    j["bound_id"] = r.bound_id;
    j["lhs"] = fmt_double(r.lhs);
    j["rhs"] = fmt_double(r.rhs);
    j["slack"] = fmt_double(r.slack);
    j["margin"] = fmt_double(r.margin);
    j["pass"] = r.pass;
    j["applicable"] = r.applicable;
    j["argmax"] = r.argmax;
    j["flags"] = flags;
    return j;
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    return out + "\"";
}

std::string report_csv_row(const BoundReport& r, const std::string& prefix) {
    std::string flags;
    for (const auto& [k, v] : r.assumption_flags) {
        if (!flags.empty()) flags += ';';
        flags += k + "=" + (v ? "1" : "0");
    }
    std::string row = prefix;
    row += csv_escape(r.scenario) + "," + r.bound_id + "," + fmt_double(r.lhs) + "," +
           fmt_double(r.rhs) + "," + fmt_double(r.slack) + "," + fmt_double(r.margin) + "," +
           (r.pass ? "1" : "0") + "," + (r.applicable ? "1" : "0") + "," + csv_escape(r.argmax) +
           "," + csv_escape(flags);
    return row;
}

} // namespace

std::string reports_to_jsonl(const std::vector<BoundReport>& reports) {
    std::string out;
    for (const auto& r : reports) out += report_to_json(r).dump() + "\n";
    return out;
}

std::string reports_to_csv(const std::vector<BoundReport>& reports) {
    std::string out =
        "schema_version,scenario,bound_id,lhs,rhs,slack,margin,pass,applicable,argmax,flags\n";
    for (const auto& r : reports) out += report_csv_row(r, "1,") + "\n";
    return out;
}

std::string sweep_to_jsonl(const std::vector<SweepRow>& rows, const std::string& parameter) {
    std::string out;
    for (const auto& [v, r] : rows) {
        json j = report_to_json(r);
        j["parameter"] = parameter;
        j["value"] = fmt_double(v);
        out += j.dump() + "\n";
    }
    return out;
}

std::string sweep_to_csv(const std::vector<SweepRow>& rows, const std::string& parameter) {
    std::string out = "schema_version,parameter,value,scenario,bound_id,lhs,rhs,slack,margin,pass,"
                      "applicable,argmax,flags\n";
    for (const auto& [v, r] : rows)
        out += report_csv_row(r, "1," + csv_escape(parameter) + "," + fmt_double(v) + ",") + "\n";
    return out;
}

} // namespace beliefcert
