#include "fraxion/oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace fraxion {

namespace {

constexpr std::int64_t kMaxGridPoints = 2000000;

/// Effective per-dose coefficients (a, b) of effect = a*sum(d) + b*sum(d^2).
struct EffectCoeffs {
    double a{0.0};
    double b{0.0};

    double eval(double sum_d, double sum_d2) const { return a * sum_d + b * sum_d2; }
};

EffectCoeffs tumor_coeffs(const ProblemParams& p) { return {p.tumor.alpha, p.tumor.beta}; }

EffectCoeffs oar_coeffs(const ProblemParams& p) {
    return {p.oar.alpha * p.delta, p.oar.beta * p.delta * p.delta};
}

struct InstanceView {
    EffectCoeffs objective;   // maximized for p1, minimized for p2
    EffectCoeffs constraint;  // budget (<= gamma) for p1, floor (>= gamma) for p2
    bool maximize{true};
    double gamma{0.0};

    bool feasible(double s, double q) const {
        const double v = constraint.eval(s, q);
        return maximize ? v <= gamma : v >= gamma;
    }

    bool better(double candidate, double incumbent) const {
        return maximize ? candidate > incumbent : candidate < incumbent;
    }
};

InstanceView make_view(const OracleInstance& inst) {
    InstanceView v;
    if (inst.kind == ProblemKind::p1) {
        v.objective = tumor_coeffs(inst.params);
        v.constraint = oar_coeffs(inst.params);
        v.maximize = true;
    } else {
        v.objective = oar_coeffs(inst.params);
        v.constraint = tumor_coeffs(inst.params);
        v.maximize = false;
    }
    v.gamma = inst.gamma;
    return v;
}

Protocol protocol_from_indices(const std::vector<double>& grid, const std::int32_t* idx,
                               std::int64_t n) {
    std::vector<DoseGroup> groups;
    for (std::int64_t i = 0; i < n; ++i) {
        const double dose = grid[static_cast<std::size_t>(idx[i])];
        if (!groups.empty() && groups.back().dose == dose) {
            ++groups.back().count;
        } else {
            groups.push_back({1, dose});
        }
    }
    return Protocol::from_groups(std::move(groups));
}

double signed_gap(const InstanceView& view, double analytic, double best) {
    return view.maximize ? analytic - best : best - analytic;
}

}  // namespace

void OracleInstance::validate() const {
    if (kind != ProblemKind::p1 && kind != ProblemKind::p2) {
        throw ValidationError("oracle instances must be p1 or p2 problems");
    }
    params.validate();
    num::require_finite(gamma, "gamma");
    if (gamma <= 0.0) throw ValidationError("gamma must be strictly positive");
}

std::vector<double> dose_grid(const DoseBounds& bounds, double step) {
    bounds.validate();
    num::require_finite(step, "grid_step");
    if (step <= 0.0) throw ValidationError("grid_step must be strictly positive");
    const double span = bounds.d_max - bounds.d_min;
    const auto steps = static_cast<std::int64_t>(std::floor(span / step + 1e-9));
    if (steps + 2 > kMaxGridPoints) throw ValidationError("grid too fine for this dose window");
    std::vector<double> grid;
    grid.reserve(static_cast<std::size_t>(steps) + 2);
    for (std::int64_t i = 0; i <= steps; ++i) {
        grid.push_back(bounds.d_min + static_cast<double>(i) * step);
    }
    // The top bound participates exactly: corner schedules must be on the grid.
    if (std::abs(grid.back() - bounds.d_max) <= 1e-12 * std::max(1.0, bounds.d_max)) {
        grid.back() = bounds.d_max;
    } else {
        grid.push_back(bounds.d_max);
    }
    return grid;
}

std::uint64_t multiset_count(std::uint64_t grid_points, std::uint64_t n) {
    // C(g + n - 1, n), exact at every intermediate step.
    constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
    unsigned __int128 r = 1;
    for (std::uint64_t i = 1; i <= n; ++i) {
        r = r * (grid_points - 1 + i) / i;
        if (r > kMax) return kMax;
    }
    return static_cast<std::uint64_t>(r);
}

OracleResult grid_best_fixed_n(const OracleInstance& instance, std::int64_t n,
                               const OracleConfig& cfg,
                               std::optional<double> analytic_objective) {
    instance.validate();
    if (n < 1) throw ValidationError("fraction count must be at least 1");
    if (n > cfg.max_exhaustive_n) {
        throw TooLargeError("fraction count exceeds the exhaustive-search cutoff");
    }
    const std::vector<double> grid = dose_grid(instance.params.bounds, cfg.grid_step);
    const InstanceView view = make_view(instance);
    const auto g = static_cast<std::int32_t>(grid.size());

    constexpr std::int64_t kMaxDepth = 16;
    if (n > kMaxDepth) throw TooLargeError("fraction count exceeds the enumeration depth limit");
    if (multiset_count(grid.size(), static_cast<std::uint64_t>(n)) > cfg.max_evaluations) {
        throw TooLargeError("search space exceeds the evaluation budget");
    }

    std::array<std::int32_t, kMaxDepth> idx{};
    std::array<std::int32_t, kMaxDepth> best_idx{};
    bool found = false;
    double best_obj = view.maximize ? -std::numeric_limits<double>::infinity()
                                    : std::numeric_limits<double>::infinity();
    std::uint64_t evaluations = 0;

    // Depth-first over non-decreasing index tuples, lexicographic order;
    // partial dose sums carried down so leaves cost O(1).
    auto walk = [&](auto&& self, std::int64_t depth, std::int32_t start, double sum_d,
                    double sum_d2) -> void {
        for (std::int32_t i = start; i < g; ++i) {
            const double dose = grid[static_cast<std::size_t>(i)];
            const double s = sum_d + dose;
            const double q = sum_d2 + dose * dose;
            idx[static_cast<std::size_t>(depth)] = i;
            if (depth + 1 == n) {
                ++evaluations;
                if (view.feasible(s, q)) {
                    const double obj = view.objective.eval(s, q);
                    if (!found || view.better(obj, best_obj)) {
                        found = true;
                        best_obj = obj;
                        best_idx = idx;
                    }
                }
            } else {
                self(self, depth + 1, i, s, q);
            }
        }
    };
    walk(walk, 0, 0, 0.0, 0.0);

    if (!found) {
        throw NoFeasibleGridPointError("no feasible schedule on the grid at this count");
    }
    OracleResult result;
    result.best_n = n;
    result.best_protocol = protocol_from_indices(grid, best_idx.data(), n);
    result.best_objective = best_obj;
    result.evaluations = evaluations;
    result.gap_vs_analytic = analytic_objective
                                 ? signed_gap(view, *analytic_objective, best_obj)
                                 : std::numeric_limits<double>::quiet_NaN();
    return result;
}

OracleResult oracle_solve(const OracleInstance& instance, const OracleConfig& cfg,
                          std::optional<double> analytic_objective) {
    instance.validate();
    if (cfg.n_min < 1 || cfg.n_min > cfg.n_max) {
        throw ValidationError("oracle scan range is empty or malformed");
    }
    if (cfg.n_max > cfg.max_exhaustive_n) {
        throw TooLargeError("oracle scan range exceeds the exhaustive-search cutoff");
    }
    const InstanceView view = make_view(instance);
    std::optional<OracleResult> best;
    std::uint64_t evaluations = 0;
    for (std::int64_t n = cfg.n_min; n <= cfg.n_max; ++n) {
        OracleResult r;
        try {
            r = grid_best_fixed_n(instance, n, cfg, analytic_objective);
        } catch (const NoFeasibleGridPointError&) {
            continue;  // other counts may still be feasible
        }
        evaluations += r.evaluations;
        if (!best || view.better(r.best_objective, best->best_objective)) {
            best = std::move(r);
        }
    }
    if (!best) {
        throw NoFeasibleGridPointError("no feasible schedule on the grid at any scanned count");
    }
    best->evaluations = evaluations;
    return *best;
}

double lipschitz_gap_bound(const OracleInstance& instance, std::int64_t n, double step) {
    const EffectCoeffs c = instance.kind == ProblemKind::p1 ? tumor_coeffs(instance.params)
                                                            : oar_coeffs(instance.params);
    return 2.0 * static_cast<double>(n) * (c.a + 2.0 * c.b * instance.params.bounds.d_max) * step;
}

VerifyDiagnostics verify(const SolutionReport& report, const OracleInstance& instance,
                         double probe_step) {
    VerifyDiagnostics d;
    instance.validate();
    const InstanceView view = make_view(instance);
    const DoseBounds& bounds = instance.params.bounds;
    const double bound_tol = 1e-12 * std::max(1.0, bounds.d_max);
    const double gamma = instance.gamma;
    const double ftol = num::kFeasibilityTol * std::max(1.0, gamma);

    if (report.protocol.fraction_count() != report.n_opt) {
        d.failures.push_back("schedule fraction count disagrees with the reported count");
    }

    d.bounds_ok = true;
    for (const auto& g : report.protocol.groups()) {
        if (!bounds.contains(g.dose, bound_tol)) d.bounds_ok = false;
    }
    if (!d.bounds_ok) d.failures.push_back("a dose violates the admissible window");

    const double s = report.protocol.total_dose();
    const double q = report.protocol.total_dose_squared();
    d.constraint_value = view.constraint.eval(s, q);
    d.constraint_slack = view.maximize ? gamma - d.constraint_value : d.constraint_value - gamma;
    d.feasible = d.constraint_slack >= -ftol;
    if (!d.feasible) d.failures.push_back("constraint violated beyond tolerance");

    const bool measured_active = std::abs(d.constraint_value - gamma) <= ftol;
    const double n = static_cast<double>(report.n_opt);
    const double at_min = n * view.constraint.eval(bounds.d_min, bounds.d_min * bounds.d_min);
    const double at_max = n * view.constraint.eval(bounds.d_max, bounds.d_max * bounds.d_max);
    if (view.maximize) {
        // Active window for the budget problem: lambda < n <= rho.
        d.window_requires_active = at_max > gamma * (1.0 + num::kFeasibilityTol) &&
                                   at_min <= gamma * (1.0 + num::kFeasibilityTol);
    } else {
        // Active window for the floor problem: lambda <= n < rho.
        d.window_requires_active = at_max >= gamma * (1.0 - num::kFeasibilityTol) &&
                                   at_min < gamma * (1.0 - num::kFeasibilityTol);
    }
    d.activity_ok = true;
    if (d.window_requires_active && !measured_active) {
        d.activity_ok = false;
        d.failures.push_back("constraint slack inside the active fraction-count window");
    }
    if (report.constraint_active != measured_active) {
        d.activity_ok = false;
        d.failures.push_back("reported activity flag disagrees with the measured slack");
    }

    d.locally_optimal = true;
    if (!(probe_step > 0.0) || !std::isfinite(probe_step)) {
        d.locally_optimal = false;
        d.failures.push_back("probe step must be a positive finite dose");
    } else {
        const double base_obj = view.objective.eval(s, q);
        const double improve_tol = 1e-9 * std::max(1.0, std::abs(base_obj));
        for (const auto& g : report.protocol.groups()) {
            for (const double delta : {probe_step, -probe_step}) {
                const double moved = g.dose + delta;
                if (!bounds.contains(moved, bound_tol)) continue;
                const double s2 = s + delta;
                const double q2 = q - g.dose * g.dose + moved * moved;
                const double cv = view.constraint.eval(s2, q2);
                const bool feas = view.maximize ? cv <= gamma + ftol : cv >= gamma - ftol;
                if (!feas) continue;
                const double obj = view.objective.eval(s2, q2);
                const double gain = view.maximize ? obj - base_obj : base_obj - obj;
                if (gain > improve_tol) {
                    d.locally_optimal = false;
                    d.failures.push_back("a single-fraction dose move improves the objective");
                    break;
                }
            }
            if (!d.locally_optimal) break;
        }
    }
    return d;
}

}  // namespace fraxion
