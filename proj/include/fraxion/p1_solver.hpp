#pragma once

/**
 * @file p1_solver.hpp
 * @brief Analytical resolution of the healing problem: maximize the tumor
 * effect subject to an OAR effect budget and per-fraction dose bounds,
 * over both the fraction count N and the dose vector.
 *
 * Every branch is closed form. The solver walks a decision tree on the
 * thresholds (lambda, rho) and the sign of the regime discriminant omega:
 * hyperfractionated instances end in a uniform schedule at the largest
 * feasible N, hypofractionated ones in a boundary-structure schedule
 * (some fractions at d_min, at most one interior dose, the rest at d_max)
 * at the smallest N that can spend the whole budget.
 */

#include <cstdint>
#include <optional>

#include "fraxion/radiobiology.hpp"
#include "fraxion/solution_report.hpp"

namespace fraxion {

struct SolverOptions {
    /// Refuse instances whose feasible fraction count exceeds this cap;
    /// thresholds beyond float integer precision are meaningless.
    double n_cap = 1e9;

    /// Hard limit on the number of co-optimal alternates materialized in
    /// the omega = 0 family case.
    std::int64_t max_family_size = 1000000;
};

/**
 * @brief Boundary-structure split for an equality-constrained schedule.
 *
 * For a fixed fraction count n and effect target gamma under the
 * per-fraction polynomial phi(sens, scale, .), the minimizing schedule is
 * k_min_doses fractions at d_min, optionally one interior dose, and the
 * remainder at d_max. `interior` is empty when the split is exact.
 */
struct BoundaryMix {
    std::int64_t k_min_doses{0};
    std::optional<double> interior;
};

/// Computes the boundary-structure split. Requires
/// n*phi(d_min) <= gamma <= n*phi(d_max) up to the feasibility tolerance;
/// throws InfeasibleNError otherwise.
BoundaryMix boundary_mix(const Radiosensitivity& sens, double scale, const DoseBounds& bounds,
                         double gamma, std::int64_t n);

/// Materializes the split as a protocol with n fractions.
Protocol boundary_mix_protocol(const BoundaryMix& mix, const DoseBounds& bounds, std::int64_t n);

/// Branch of the healing-problem decision tree this instance falls in,
/// determined by the thresholds and regime alone.
P1Case classify_p1(const ProblemParams& params, double gamma_oar);

/**
 * @brief Solves the healing problem.
 *
 * @throws InfeasibleError when rho < 1 (the budget is below the OAR
 *         effect of a single minimum-dose fraction).
 * @throws CapExceededError when rho exceeds options.n_cap.
 * @throws ValidationError on invalid parameters.
 */
SolutionReport solve_p1(const ProblemParams& params, double gamma_oar,
                        const SolverOptions& options = {});

/// Solves the fixed-N subproblem. Throws InfeasibleNError when even the
/// all-minimum schedule at this N violates the budget (N > rho).
Protocol solve_p1_fixed(const ProblemParams& params, double gamma_oar, std::int64_t n);

}  // namespace fraxion
