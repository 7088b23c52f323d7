#include "fraxion/equivalence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fraxion/p1_solver.hpp"

namespace fraxion {

void EquivalenceQuery::validate() const {
    tumor.validate();
    bounds.validate();
    num::require_finite(target_effect, "target_effect");
    if (target_effect <= 0.0) throw ValidationError("target_effect must be strictly positive");
}

SolutionReport min_total_dose(const EquivalenceQuery& query) {
    query.validate();
    const Radiosensitivity& tumor = query.tumor;
    const DoseBounds& bounds = query.bounds;
    const double gamma = query.target_effect;

    Thresholds th;
    th.lambda = std::max(1.0, gamma / phi(tumor, 1.0, bounds.d_max));
    th.rho = std::max(1.0, gamma / phi(tumor, 1.0, bounds.d_min));
    th.omega = std::numeric_limits<double>::quiet_NaN();  // no OAR in this problem

    SolutionReport r;
    r.kind = ProblemKind::p3;
    r.thresholds = th;
    r.gamma = gamma;

    const auto finish = [&](P2Case tag, std::int64_t n, Protocol protocol) {
        r.case_tag = tag;
        r.n_opt = n;
        r.objective_primary = protocol.total_dose();
        r.objective_secondary = tumor_effect(tumor, protocol);
        r.constraint_active = std::abs(r.objective_secondary - gamma) <=
                              num::kFeasibilityTol * std::max(1.0, gamma);
        r.protocol = std::move(protocol);
    };

    const double rho = num::nearly_integer(th.rho) ? std::round(th.rho) : th.rho;
    if (rho == 1.0) {
        finish(P2Case::SingleMinForced, 1, Protocol::uniform(1, bounds.d_min));
        return r;
    }
    const std::int64_t n_lo = num::ceil_snapped(th.lambda);
    const std::int64_t n_hi = num::floor_snapped(th.rho);
    if (n_lo > n_hi) {
        finish(P2Case::EmptyWindowAllMin, num::ceil_snapped(th.rho),
               Protocol::uniform(num::ceil_snapped(th.rho), bounds.d_min));
        return r;
    }
    Protocol p = boundary_mix_protocol(boundary_mix(tumor, 1.0, bounds, gamma, n_lo), bounds, n_lo);
    finish(P2Case::HypoStructure, n_lo, std::move(p));
    return r;
}

double bed_uniform(const Radiosensitivity& tumor, std::int64_t n, double dose,
                   std::int64_t n_target) {
    tumor.validate();
    num::require_finite(dose, "dose");
    if (n < 1 || n_target < 1) throw ValidationError("fraction counts must be at least 1");
    if (dose <= 0.0) throw ValidationError("dose must be strictly positive");
    const double per_fraction =
        static_cast<double>(n) * phi(tumor, 1.0, dose) / static_cast<double>(n_target);
    return num::positive_root(tumor.beta, tumor.alpha, per_fraction);
}

bool effects_equal(const Radiosensitivity& tumor, const Protocol& p, const Protocol& q,
                   double tol) {
    num::require_finite(tol, "tol");
    if (tol <= 0.0) throw ValidationError("tol must be strictly positive");
    const double ep = tumor_effect(tumor, p);
    const double eq = tumor_effect(tumor, q);
    return std::abs(ep - eq) <= tol * std::max(1.0, ep);
}

}  // namespace fraxion
