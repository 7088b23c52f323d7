#pragma once

/**
 * @file p2_solver.hpp
 * @brief Analytical resolution of the palliative problem: minimize the OAR
 * effect subject to a tumor-effect floor and per-fraction dose bounds,
 * over both the fraction count N and the dose vector.
 *
 * Mirrors the healing-problem decision tree with the roles of the two
 * effects exchanged: hyperfractionated instances end in all-minimum or
 * uniform schedules near N = rho, hypofractionated ones in a boundary
 * structure at N = ceil(lambda). Always feasible: enough minimum-dose
 * fractions reach any floor.
 */

#include <cstdint>

#include "fraxion/p1_solver.hpp"
#include "fraxion/radiobiology.hpp"
#include "fraxion/solution_report.hpp"

namespace fraxion {

/// Branch of the palliative-problem decision tree this instance falls in.
P2Case classify_p2(const ProblemParams& params, double gamma_t);

/**
 * @brief Solves the palliative problem.
 *
 * @throws ValidationError on invalid parameters.
 * @throws CapExceededError when the relevant fraction counts exceed
 *         options.n_cap.
 */
SolutionReport solve_p2(const ProblemParams& params, double gamma_t,
                        const SolverOptions& options = {});

/// Solves the fixed-N subproblem. Throws InfeasibleNError when even the
/// all-maximum schedule at this N misses the floor (N < lambda).
Protocol solve_p2_fixed(const ProblemParams& params, double gamma_t, std::int64_t n);

}  // namespace fraxion
