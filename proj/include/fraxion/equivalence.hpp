#pragma once

/**
 * @file equivalence.hpp
 * @brief Biologically equivalent treatments: schedules with equal tumor
 * effect, uniform-schedule dose conversion, and the minimum-total-dose
 * schedule for a given target effect.
 */

#include <cstdint>

#include "fraxion/radiobiology.hpp"
#include "fraxion/solution_report.hpp"

namespace fraxion {

/// Target for the minimum-total-dose problem: reach `target_effect` on
/// the tumor with bound-respecting doses using the least total dose.
struct EquivalenceQuery {
    Radiosensitivity tumor;
    DoseBounds bounds;
    double target_effect{0.0};

    void validate() const;
};

/**
 * @brief Minimum-total-dose schedule achieving the target tumor effect.
 *
 * Over all fraction counts and bound-respecting dose vectors with
 * tumor effect equal to the target, returns the schedule minimizing the
 * total delivered dose. The minimizer is the hypofractionated boundary
 * structure at the smallest feasible count; degenerate targets (below
 * the single-minimum-fraction effect, or with no count meeting the
 * target exactly) fall back to the forced all-minimum schedule.
 *
 * `objective_primary` is the total dose, `objective_secondary` the
 * achieved tumor effect.
 */
SolutionReport min_total_dose(const EquivalenceQuery& query);

/**
 * @brief Uniform-schedule dose conversion preserving tumor effect.
 *
 * Returns the unique positive dose dt with
 * n_target * (alpha*dt + beta*dt^2) = n * (alpha*d + beta*d^2).
 * No bound check is applied; callers flag out-of-window results.
 */
double bed_uniform(const Radiosensitivity& tumor, std::int64_t n, double dose,
                   std::int64_t n_target);

/// True when the two schedules have the same tumor effect within the
/// relative tolerance `tol`.
bool effects_equal(const Radiosensitivity& tumor, const Protocol& p, const Protocol& q,
                   double tol);

}  // namespace fraxion
