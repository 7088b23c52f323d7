#include "fraxion/p1_solver.hpp"

#include <algorithm>
#include <cmath>

namespace fraxion {

namespace {

/// rho with near-integers snapped, for stable branch boundaries at 1 and 2.
double snapped(double x) {
    return num::nearly_integer(x) ? std::round(x) : x;
}

void finish_p1(SolutionReport& r, P1Case tag, std::int64_t n, Protocol protocol,
               const ProblemParams& params, double gamma) {
    r.case_tag = tag;
    r.n_opt = n;
    r.objective_primary = tumor_effect(params.tumor, protocol);
    r.objective_secondary = oar_effect(params, protocol);
    r.constraint_active =
        std::abs(r.objective_secondary - gamma) <= num::kFeasibilityTol * std::max(1.0, gamma);
    r.protocol = std::move(protocol);
}

P1Case p1_case_from(const Thresholds& th, Regime regime) {
    const double rho = snapped(th.rho);
    if (rho < 1.0) return P1Case::Infeasible;
    if (rho == 1.0) return P1Case::SingleMinForced;
    if (rho < 2.0) return P1Case::SingleDose;
    if (num::floor_snapped(th.lambda) == num::floor_snapped(th.rho)) return P1Case::AllMaxWindow;
    switch (regime) {
        case Regime::hyper: return P1Case::HyperUniform;
        case Regime::hypo: return P1Case::HypoCompared;
        case Regime::proportional: return P1Case::OmegaZeroFamily;
    }
    return P1Case::Infeasible;
}

/// Uniform equality schedule at n fractions, snapped into the window.
Protocol uniform_budget_protocol(const ProblemParams& params, double gamma, std::int64_t n) {
    double dose = uniform_dose_for_budget(params.oar, params.delta, n, gamma);
    dose = num::snap_to_bounds(dose, params.bounds);
    if (dose < params.bounds.d_min || dose > params.bounds.d_max) {
        throw InternalError("uniform budget dose escaped the admissible window");
    }
    return Protocol::uniform(n, dose);
}

}  // namespace

BoundaryMix boundary_mix(const Radiosensitivity& sens, double scale, const DoseBounds& bounds,
                         double gamma, std::int64_t n) {
    sens.validate();
    bounds.validate();
    num::require_finite(gamma, "gamma");
    if (n < 1) throw ValidationError("fraction count must be at least 1");
    const double pmin = phi(sens, scale, bounds.d_min);
    const double pmax = phi(sens, scale, bounds.d_max);
    const double nd = static_cast<double>(n);
    const double ftol = num::kFeasibilityTol * std::max(1.0, gamma);
    if (gamma < nd * pmin - ftol || gamma > nd * pmax + ftol) {
        throw InfeasibleNError("equality target unreachable at this fraction count");
    }

    double split = (nd * pmax - gamma) / (pmax - pmin);
    split = std::clamp(split, 0.0, nd);
    if (num::nearly_integer(split)) {
        return BoundaryMix{static_cast<std::int64_t>(std::llround(split)), std::nullopt};
    }

    const std::int64_t k = static_cast<std::int64_t>(std::floor(split));
    const double residual =
        gamma - static_cast<double>(k) * pmin - static_cast<double>(n - k - 1) * pmax;
    if (!(residual > 0.0)) {
        throw InternalError("interior residual effect is not positive; split inconsistent");
    }
    double interior = num::positive_root(sens.beta * scale * scale, sens.alpha * scale, residual);
    interior = num::snap_to_bounds(interior, bounds);
    if (interior == bounds.d_min) return BoundaryMix{k + 1, std::nullopt};
    if (interior == bounds.d_max) return BoundaryMix{k, std::nullopt};
    if (interior < bounds.d_min || interior > bounds.d_max) {
        throw InternalError("interior dose escaped the admissible window; split inconsistent");
    }
    return BoundaryMix{k, interior};
}

Protocol boundary_mix_protocol(const BoundaryMix& mix, const DoseBounds& bounds, std::int64_t n) {
    const std::int64_t at_min = mix.k_min_doses;
    const std::int64_t at_max = n - at_min - (mix.interior ? 1 : 0);
    if (at_min < 0 || at_max < 0) throw InternalError("boundary split does not fit the count");
    std::vector<DoseGroup> groups;
    if (at_min > 0) groups.push_back({at_min, bounds.d_min});
    if (mix.interior) groups.push_back({1, *mix.interior});
    if (at_max > 0) groups.push_back({at_max, bounds.d_max});
    return Protocol::from_groups(std::move(groups), bounds);
}

P1Case classify_p1(const ProblemParams& params, double gamma_oar) {
    return p1_case_from(p1_thresholds(params, gamma_oar), regime_of(params));
}

SolutionReport solve_p1(const ProblemParams& params, double gamma_oar,
                        const SolverOptions& options) {
    const Thresholds th = p1_thresholds(params, gamma_oar);
    if (th.rho > options.n_cap) {
        throw CapExceededError("feasible fraction counts exceed the configured cap");
    }
    const Regime regime = regime_of(params);
    const DoseBounds& bounds = params.bounds;

    SolutionReport r;
    r.kind = ProblemKind::p1;
    r.thresholds = th;
    r.gamma = gamma_oar;

    switch (p1_case_from(th, regime)) {
        case P1Case::Infeasible:
            throw InfeasibleError("OAR budget below the effect of one minimum-dose fraction");

        case P1Case::SingleMinForced:
            finish_p1(r, P1Case::SingleMinForced, 1, Protocol::uniform(1, bounds.d_min), params,
                      gamma_oar);
            return r;

        case P1Case::SingleDose: {
            const double d = params.delta;
            double root = num::positive_root(params.oar.beta * d * d, params.oar.alpha * d,
                                             gamma_oar);
            root = num::snap_to_bounds(root, bounds);
            finish_p1(r, P1Case::SingleDose, 1,
                      Protocol::uniform(1, std::min(bounds.d_max, root)), params, gamma_oar);
            return r;
        }

        case P1Case::AllMaxWindow: {
            const std::int64_t n = num::floor_snapped(th.lambda);
            finish_p1(r, P1Case::AllMaxWindow, n, Protocol::uniform(n, bounds.d_max), params,
                      gamma_oar);
            return r;
        }

        case P1Case::HyperUniform: {
            const std::int64_t n = num::floor_snapped(th.rho);
            finish_p1(r, P1Case::HyperUniform, n, uniform_budget_protocol(params, gamma_oar, n),
                      params, gamma_oar);
            return r;
        }

        case P1Case::HypoCompared: {
            const std::int64_t n_active = num::ceil_snapped(th.lambda);
            Protocol active = boundary_mix_protocol(
                boundary_mix(params.oar, params.delta, bounds, gamma_oar, n_active), bounds,
                n_active);
            const double active_effect = tumor_effect(params.tumor, active);

            // The all-maximum candidate one count below; absent when the
            // budget cannot absorb it (lambda clamped at 1).
            const std::int64_t n_corner = num::floor_snapped(th.lambda);
            std::optional<Protocol> corner;
            double corner_effect = 0.0;
            if (n_corner >= 1 && n_corner != n_active) {
                const double corner_oar =
                    static_cast<double>(n_corner) * phi(params.oar, params.delta, bounds.d_max);
                if (corner_oar <= gamma_oar * (1.0 + num::kFeasibilityTol)) {
                    corner = Protocol::uniform(n_corner, bounds.d_max);
                    corner_effect = tumor_effect(params.tumor, *corner);
                }
            }

            if (!corner) {
                finish_p1(r, P1Case::HypoCompared, n_active, std::move(active), params, gamma_oar);
                return r;
            }
            const double tie_tol =
                num::kTieTol * std::max(1.0, std::max(std::abs(active_effect),
                                                      std::abs(corner_effect)));
            if (std::abs(active_effect - corner_effect) <= tie_tol) {
                // Exact tie: fewer fractions win, the other is co-optimal.
                finish_p1(r, P1Case::HypoCompared, n_corner, *corner, params, gamma_oar);
                r.alternates.push_back({n_active, std::move(active)});
            } else if (active_effect > corner_effect) {
                finish_p1(r, P1Case::HypoCompared, n_active, std::move(active), params, gamma_oar);
            } else {
                finish_p1(r, P1Case::HypoCompared, n_corner, std::move(*corner), params,
                          gamma_oar);
            }
            return r;
        }

        case P1Case::OmegaZeroFamily: {
            const std::int64_t n_lo = num::ceil_snapped(th.lambda);
            const std::int64_t n_hi = num::floor_snapped(th.rho);
            if (n_hi - n_lo + 1 > options.max_family_size) {
                throw CapExceededError("co-optimal family too large to materialize");
            }
            finish_p1(r, P1Case::OmegaZeroFamily, n_hi,
                      uniform_budget_protocol(params, gamma_oar, n_hi), params, gamma_oar);
            for (std::int64_t n = n_lo; n < n_hi; ++n) {
                r.alternates.push_back({n, uniform_budget_protocol(params, gamma_oar, n)});
            }
            return r;
        }
    }
    throw InternalError("unreachable healing-problem branch");
}

Protocol solve_p1_fixed(const ProblemParams& params, double gamma_oar, std::int64_t n) {
    params.validate();
    num::require_finite(gamma_oar, "gamma");
    if (gamma_oar <= 0.0) throw ValidationError("gamma must be strictly positive");
    if (n < 1) throw ValidationError("fraction count must be at least 1");
    const DoseBounds& bounds = params.bounds;
    const double nd = static_cast<double>(n);
    const double ftol = num::kFeasibilityTol * std::max(1.0, gamma_oar);

    if (nd * phi(params.oar, params.delta, bounds.d_min) > gamma_oar + ftol) {
        throw InfeasibleNError("minimum-dose schedule already violates the budget at this count");
    }
    // Budget not binding: the trivial all-maximum schedule is optimal.
    if (nd * phi(params.oar, params.delta, bounds.d_max) <= gamma_oar + ftol) {
        return Protocol::uniform(n, bounds.d_max);
    }
    switch (regime_of(params)) {
        case Regime::hyper:
        case Regime::proportional:
            return uniform_budget_protocol(params, gamma_oar, n);
        case Regime::hypo:
            return boundary_mix_protocol(
                boundary_mix(params.oar, params.delta, bounds, gamma_oar, n), bounds, n);
    }
    throw InternalError("unreachable fixed-count branch");
}

}  // namespace fraxion
