#include "fraxion/p2_solver.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace fraxion {

namespace {

void finish_p2(SolutionReport& r, P2Case tag, std::int64_t n, Protocol protocol,
               const ProblemParams& params, double gamma) {
    r.case_tag = tag;
    r.n_opt = n;
    r.objective_primary = oar_effect(params, protocol);
    r.objective_secondary = tumor_effect(params.tumor, protocol);
    r.constraint_active =
        std::abs(r.objective_secondary - gamma) <= num::kFeasibilityTol * std::max(1.0, gamma);
    r.protocol = std::move(protocol);
}

P2Case p2_case_from(const Thresholds& th, Regime regime) {
    const double rho = num::nearly_integer(th.rho) ? std::round(th.rho) : th.rho;
    if (rho == 1.0) return P2Case::SingleMinForced;
    const std::int64_t n_lo = num::ceil_snapped(th.lambda);
    const std::int64_t n_hi = num::floor_snapped(th.rho);
    if (n_lo == n_hi) return P2Case::AllMinForced;
    if (n_lo > n_hi) return P2Case::EmptyWindowAllMin;
    switch (regime) {
        case Regime::hyper:
            return num::nearly_integer(th.rho) ? P2Case::HyperAllMinInteger
                                               : P2Case::HyperCompared;
        case Regime::hypo: return P2Case::HypoStructure;
        case Regime::proportional: return P2Case::OmegaZeroFamily;
    }
    return P2Case::SingleMinForced;
}

/// Uniform schedule meeting the tumor-effect floor with equality at n
/// fractions, snapped into the window.
Protocol uniform_floor_protocol(const ProblemParams& params, double gamma, std::int64_t n) {
    double dose = uniform_dose_for_budget(params.tumor, 1.0, n, gamma);
    dose = num::snap_to_bounds(dose, params.bounds);
    if (dose < params.bounds.d_min || dose > params.bounds.d_max) {
        throw InternalError("uniform floor dose escaped the admissible window");
    }
    return Protocol::uniform(n, dose);
}

}  // namespace

P2Case classify_p2(const ProblemParams& params, double gamma_t) {
    return p2_case_from(p2_thresholds(params, gamma_t), regime_of(params));
}

SolutionReport solve_p2(const ProblemParams& params, double gamma_t,
                        const SolverOptions& options) {
    const Thresholds th = p2_thresholds(params, gamma_t);
    if (th.rho > options.n_cap) {
        throw CapExceededError("feasible fraction counts exceed the configured cap");
    }
    const Regime regime = regime_of(params);
    const DoseBounds& bounds = params.bounds;

    SolutionReport r;
    r.kind = ProblemKind::p2;
    r.thresholds = th;
    r.gamma = gamma_t;

    switch (p2_case_from(th, regime)) {
        case P2Case::SingleMinForced:
            finish_p2(r, P2Case::SingleMinForced, 1, Protocol::uniform(1, bounds.d_min), params,
                      gamma_t);
            return r;

        case P2Case::AllMinForced: {
            const std::int64_t n = num::ceil_snapped(th.rho);
            finish_p2(r, P2Case::AllMinForced, n, Protocol::uniform(n, bounds.d_min), params,
                      gamma_t);
            return r;
        }

        case P2Case::EmptyWindowAllMin: {
            // No fraction count can meet the floor with equality; the
            // cheapest schedule is all-minimum at the first count past rho.
            const std::int64_t n = num::ceil_snapped(th.rho);
            finish_p2(r, P2Case::EmptyWindowAllMin, n, Protocol::uniform(n, bounds.d_min), params,
                      gamma_t);
            return r;
        }

        case P2Case::HyperAllMinInteger: {
            const std::int64_t n = num::ceil_snapped(th.rho);
            finish_p2(r, P2Case::HyperAllMinInteger, n, Protocol::uniform(n, bounds.d_min),
                      params, gamma_t);
            return r;
        }

        case P2Case::HyperCompared: {
            const std::int64_t n_uniform = num::floor_snapped(th.rho);
            Protocol uniform = uniform_floor_protocol(params, gamma_t, n_uniform);
            const double uniform_cost = oar_effect(params, uniform);

            const std::int64_t n_corner = num::ceil_snapped(th.rho);
            Protocol corner = Protocol::uniform(n_corner, bounds.d_min);
            const double corner_cost = oar_effect(params, corner);

            const double tie_tol = num::kTieTol * std::max(1.0, std::max(std::abs(uniform_cost),
                                                                         std::abs(corner_cost)));
            if (std::abs(uniform_cost - corner_cost) <= tie_tol) {
                // Exact tie: fewer fractions win, the other is co-optimal.
                finish_p2(r, P2Case::HyperCompared, n_uniform, std::move(uniform), params,
                          gamma_t);
                r.alternates.push_back({n_corner, std::move(corner)});
            } else if (uniform_cost < corner_cost) {
                finish_p2(r, P2Case::HyperCompared, n_uniform, std::move(uniform), params,
                          gamma_t);
            } else {
                finish_p2(r, P2Case::HyperCompared, n_corner, std::move(corner), params, gamma_t);
            }
            return r;
        }

        case P2Case::HypoStructure: {
            const std::int64_t n = num::ceil_snapped(th.lambda);
            Protocol p = boundary_mix_protocol(
                boundary_mix(params.tumor, 1.0, bounds, gamma_t, n), bounds, n);
            finish_p2(r, P2Case::HypoStructure, n, std::move(p), params, gamma_t);
            return r;
        }

        case P2Case::OmegaZeroFamily: {
            const std::int64_t n_lo = num::ceil_snapped(th.lambda);
            const std::int64_t n_hi = num::floor_snapped(th.rho);
            if (n_hi - n_lo + 1 > options.max_family_size) {
                throw CapExceededError("co-optimal family too large to materialize");
            }
            finish_p2(r, P2Case::OmegaZeroFamily, n_lo, uniform_floor_protocol(params, gamma_t, n_lo),
                      params, gamma_t);
            for (std::int64_t n = n_lo + 1; n <= n_hi; ++n) {
                r.alternates.push_back({n, uniform_floor_protocol(params, gamma_t, n)});
            }
            return r;
        }
    }
    throw InternalError("unreachable palliative-problem branch");
}

Protocol solve_p2_fixed(const ProblemParams& params, double gamma_t, std::int64_t n) {
    params.validate();
    num::require_finite(gamma_t, "gamma");
    if (gamma_t <= 0.0) throw ValidationError("gamma must be strictly positive");
    if (n < 1) throw ValidationError("fraction count must be at least 1");
    const DoseBounds& bounds = params.bounds;
    const double nd = static_cast<double>(n);
    const double ftol = num::kFeasibilityTol * std::max(1.0, gamma_t);

    if (nd * phi(params.tumor, 1.0, bounds.d_max) < gamma_t - ftol) {
        throw InfeasibleNError("maximum-dose schedule misses the floor at this count");
    }
    // Floor already met at minimum doses: the trivial schedule is optimal.
    if (nd * phi(params.tumor, 1.0, bounds.d_min) >= gamma_t - ftol) {
        return Protocol::uniform(n, bounds.d_min);
    }
    switch (regime_of(params)) {
        case Regime::hyper:
        case Regime::proportional:
            return uniform_floor_protocol(params, gamma_t, n);
        case Regime::hypo:
            return boundary_mix_protocol(boundary_mix(params.tumor, 1.0, bounds, gamma_t, n),
                                         bounds, n);
    }
    throw InternalError("unreachable fixed-count branch");
}

}  // namespace fraxion
