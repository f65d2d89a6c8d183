#pragma once

#include <map>
#include <string>
#include <vector>

namespace beliefcert {

/**
 * Frozen identifiers of the certified inequalities. The strings are part of
 * the report schema; formulas live in evaluate_bound and nowhere else.
 */
enum class BoundId {
    K2_WASS,
    K2_ALT,
    VALUE_LIP,
    MAIN1,
    MAIN2,
    W1MAIN1,
    W1MAIN2,
    DISC_CONT,
    DISC_CONT_REF,
    DISC_ROBUST,
    DISC_ROBUST_REF,
    DISC_ROBUST_TWO_LIP,
    AVG_CONT,
    AVG_ROBUST,
    QUANT_STATE,
    QUANT_OBS_TV,
    OBS_VALUE,
    JOINT_FILTER_W1,
    JOINT_DISC,
    JOINT_AVG,
    PRIOR_MISMATCH,
    FIN_HORIZON,
};

const char* to_string(BoundId id);
BoundId bound_id_from_string(const std::string& name);
std::vector<BoundId> all_bound_ids();

/// Named real inputs for a bound formula. FIN_HORIZON stage constants are
/// keyed k_1 .. k_N alongside n, m and d.
using BoundInputs = std::map<std::string, double>;

struct BoundSpec {
    BoundId bound_id;
    BoundInputs inputs;
    double rhs_value = 0.0; // +infinity when a standing assumption fails
    // every checked standing assumption, by name, with its outcome
    std::map<std::string, bool> assumption_flags;

    bool assumptions_ok() const;
};

/**
 * Evaluates the closed-form right-hand side for a bound. Missing inputs
 * throw std::invalid_argument naming the input. When a standing assumption
 * fails (beta*k2 >= 1 where 1/(1-beta k2) appears, k2 >= 1 where 1/(1-k2)
 * appears, ...), the flag is recorded and rhs_value is set to +infinity
 * rather than raising, so parameter sweeps can chart where the theory
 * applies.
 */
BoundSpec evaluate_bound(BoundId id, const BoundInputs& inputs);

/// One certified inequality: measurement against formula, with slack.
struct BoundReport {
    std::string scenario;
    std::string bound_id;
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0;
    double margin = 0.0; // rhs + slack - lhs
    bool pass = false;
    bool applicable = true; // false -> reported as n/a, not a failure
    std::string argmax;
    std::map<std::string, bool> assumption_flags;
};

/**
 * pass iff lhs <= rhs + slack + 1e-9. slack must be a computed defect
 * (grid displacement, integration error), never a hand tuned constant.
 */
BoundReport certify(BoundId id, double lhs_measured, const BoundSpec& spec, double slack,
                    const std::string& argmax = "");

} // namespace beliefcert
