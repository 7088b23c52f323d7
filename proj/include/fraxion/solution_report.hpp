#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "fraxion/radiobiology.hpp"

namespace fraxion {

enum class ProblemKind { p1, p2, p3 };

const char* to_string(ProblemKind kind);

/// Decision-tree outcome for the healing problem, determined solely by
/// (lambda, rho, omega).
enum class P1Case {
    Infeasible,       ///< rho < 1: even one minimum fraction breaks the budget
    SingleMinForced,  ///< rho = 1: (1, d_min) is the only admissible pair
    SingleDose,       ///< rho in (1,2): one fraction at min(d_max, budget root)
    AllMaxWindow,     ///< floor(lambda) == floor(rho): all-d_max schedule
    HyperUniform,     ///< omega > 0: uniform doses at N = floor(rho)
    HypoCompared,     ///< omega < 0: best of two boundary candidates
    OmegaZeroFamily,  ///< omega = 0: every budget-saturating schedule ties
};

/// Decision-tree outcome for the palliative problem, determined by
/// (lambda, rho, omega) plus the empty-window rule.
enum class P2Case {
    SingleMinForced,     ///< rho = 1: (1, d_min)
    AllMinForced,        ///< ceil(lambda) == floor(rho): all-d_min at ceil(rho)
    HyperAllMinInteger,  ///< omega > 0, rho integer: all-d_min at N = rho
    HyperCompared,       ///< omega > 0, rho fractional: best of two candidates
    HypoStructure,       ///< omega < 0: boundary structure at N = ceil(lambda)
    OmegaZeroFamily,     ///< omega = 0: every floor-saturating schedule ties
    EmptyWindowAllMin,   ///< ceil(lambda) > floor(rho): all-d_min at ceil(rho)
};

const char* to_string(P1Case c);
const char* to_string(P2Case c);

/// A co-optimal schedule at a possibly different fraction count.
struct Alternate {
    std::int64_t n{0};
    Protocol protocol;
};

/**
 * @brief The outcome of one solve: optimal fraction count and schedule,
 * the branch of the decision tree that produced it, both effect values,
 * and any exact co-optimal alternatives.
 *
 * `objective_primary` is the optimized quantity (tumor effect for the
 * healing problem, OAR effect for the palliative one, total dose for the
 * minimum-total-dose problem); `objective_secondary` is the companion
 * effect value.
 */
struct SolutionReport {
    ProblemKind kind{ProblemKind::p1};
    std::variant<P1Case, P2Case> case_tag{P1Case::Infeasible};
    std::int64_t n_opt{0};
    Protocol protocol;
    double objective_primary{0.0};
    double objective_secondary{0.0};
    bool constraint_active{false};
    std::vector<Alternate> alternates;
    Thresholds thresholds;
    double gamma{0.0};

    std::string case_name() const;
};

}  // namespace fraxion
