#pragma once

/**
 * @file oracle.hpp
 * @brief Independent brute-force verification of analytical solutions.
 *
 * Exhaustively enumerates discretized dose vectors for small fraction
 * counts and re-derives the optimum from nothing but the effect
 * functions. Deliberately shares no code with the solvers beyond those
 * functions: enumeration over sorted tuples is justified by the
 * permutation invariance of the effects, not by any property of the
 * solutions being checked.
 */

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fraxion/radiobiology.hpp"
#include "fraxion/solution_report.hpp"

namespace fraxion {

/// A healing (p1) or palliative (p2) instance as the oracle sees it.
struct OracleInstance {
    ProblemKind kind{ProblemKind::p1};  ///< p1 or p2
    ProblemParams params;
    double gamma{0.0};

    void validate() const;
};

struct OracleConfig {
    double grid_step = 1e-2;             ///< discretization of [d_min, d_max]
    std::int64_t max_exhaustive_n = 8;   ///< full-enumeration cutoff
    std::int64_t n_min = 1;              ///< inclusive scan range for oracle_solve
    std::int64_t n_max = 4;
    std::uint64_t max_evaluations = 200000000;  ///< refuse larger search spaces
};

struct OracleResult {
    std::int64_t best_n{0};
    Protocol best_protocol;
    double best_objective{0.0};
    /// analytic - best for maximization, best - analytic for minimization;
    /// NaN when no analytic objective was supplied. Nonnegative up to the
    /// feasibility tolerance whenever the analytic solution is optimal.
    double gap_vs_analytic{0.0};
    std::uint64_t evaluations{0};
};

/// Grid over [d_min, d_max] with the given step; d_max is always included.
std::vector<double> dose_grid(const DoseBounds& bounds, double step);

/// Number of sorted n-tuples over g grid points: C(g + n - 1, n),
/// saturating at the maximum representable value on overflow.
std::uint64_t multiset_count(std::uint64_t grid_points, std::uint64_t n);

/**
 * @brief Best feasible schedule with exactly n grid-valued doses.
 *
 * Enumerates every non-decreasing n-tuple over the grid. The budget is
 * checked as <= gamma for p1 and the floor as >= gamma for p2, both
 * exactly (no grid slack); ties resolve to the lexicographically
 * smallest tuple.
 *
 * @throws TooLargeError when n exceeds the cutoff.
 * @throws NoFeasibleGridPointError when no tuple is feasible.
 */
OracleResult grid_best_fixed_n(const OracleInstance& instance, std::int64_t n,
                               const OracleConfig& cfg,
                               std::optional<double> analytic_objective = std::nullopt);

/// Scans every fraction count in [n_min, n_max], skipping infeasible
/// counts, and returns the overall best. Throws NoFeasibleGridPointError
/// when every count is infeasible on the grid.
OracleResult oracle_solve(const OracleInstance& instance, const OracleConfig& cfg,
                          std::optional<double> analytic_objective = std::nullopt);

/// Worst-case objective loss from rounding an optimal schedule of n doses
/// onto a grid of step h: 2*n*(a + 2*b*d_max)*h with (a, b) the effective
/// per-dose coefficients of the instance's objective.
double lipschitz_gap_bound(const OracleInstance& instance, std::int64_t n, double step);

/// Structured outcome of checking one reported solution.
struct VerifyDiagnostics {
    bool bounds_ok{false};
    bool feasible{false};
    double constraint_value{0.0};
    /// Signed slack: gamma - value for p1 (budget), value - gamma for p2
    /// (floor). Nonnegative means feasible.
    double constraint_slack{0.0};
    bool window_requires_active{false};
    bool activity_ok{false};
    bool locally_optimal{false};
    std::vector<std::string> failures;

    bool pass() const { return failures.empty(); }
};

/**
 * @brief Checks a reported solution against the instance.
 *
 * Verifies bound satisfaction, constraint slack, agreement of the
 * reported activity flag with the measured one (including the rule that
 * the constraint must be active when the fraction count lies in the
 * active window), and first-order local optimality: no move of a single
 * fraction's dose by +/- probe_step improves the objective while staying
 * feasible. Always returns diagnostics; never throws on a bad report.
 */
VerifyDiagnostics verify(const SolutionReport& report, const OracleInstance& instance,
                         double probe_step);

}  // namespace fraxion
