#include "fraxion/radiobiology.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace fraxion {

namespace num {

void require_finite(double x, const char* what) {
    if (!std::isfinite(x)) {
        throw ValidationError(std::string(what) + " must be finite");
    }
}

bool nearly_integer(double x) {
    return std::abs(x - std::round(x)) <= kIntegralityTol * std::max(1.0, std::abs(x));
}

std::int64_t floor_snapped(double x) {
    if (nearly_integer(x)) return static_cast<std::int64_t>(std::llround(x));
    return static_cast<std::int64_t>(std::floor(x));
}

std::int64_t ceil_snapped(double x) {
    if (nearly_integer(x)) return static_cast<std::int64_t>(std::llround(x));
    return static_cast<std::int64_t>(std::ceil(x));
}

double positive_root(double a, double b, double c) {
    return 2.0 * c / (b + std::sqrt(b * b + 4.0 * a * c));
}

double dose_snap_tol(const DoseBounds& bounds) {
    return 1e-9 * std::max(1.0, bounds.d_max);
}

double snap_to_bounds(double dose, const DoseBounds& bounds) {
    const double tol = dose_snap_tol(bounds);
    if (std::abs(dose - bounds.d_min) <= tol) return bounds.d_min;
    if (std::abs(dose - bounds.d_max) <= tol) return bounds.d_max;
    return dose;
}

}  // namespace num

void Radiosensitivity::validate() const {
    num::require_finite(alpha, "alpha");
    num::require_finite(beta, "beta");
    if (alpha <= 0.0) throw ValidationError("alpha must be strictly positive");
    if (beta <= 0.0) throw ValidationError("beta must be strictly positive");
}

void DoseBounds::validate() const {
    num::require_finite(d_min, "d_min");
    num::require_finite(d_max, "d_max");
    if (d_min <= 0.0) throw ValidationError("d_min must be strictly positive");
    if (d_min >= d_max) throw ValidationError("d_min must be strictly below d_max");
}

bool DoseBounds::contains(double dose, double tol) const {
    return dose >= d_min - tol && dose <= d_max + tol;
}

void ProblemParams::validate() const {
    tumor.validate();
    oar.validate();
    bounds.validate();
    num::require_finite(delta, "delta");
    if (delta <= 0.0 || delta > 1.0) throw ValidationError("delta must lie in (0, 1]");
}

Protocol Protocol::from_groups(std::vector<DoseGroup> groups) {
    for (const auto& g : groups) {
        num::require_finite(g.dose, "dose");
        if (g.dose <= 0.0) throw ValidationError("doses must be strictly positive");
        if (g.count < 1) throw ValidationError("group counts must be positive");
    }
    std::sort(groups.begin(), groups.end(),
              [](const DoseGroup& a, const DoseGroup& b) { return a.dose < b.dose; });
    std::vector<DoseGroup> merged;
    for (const auto& g : groups) {
        if (!merged.empty() && merged.back().dose == g.dose) {
            merged.back().count += g.count;
        } else {
            merged.push_back(g);
        }
    }
    if (merged.empty()) throw ValidationError("a protocol needs at least one fraction");
    return Protocol(std::move(merged));
}

Protocol Protocol::from_groups(std::vector<DoseGroup> groups, const DoseBounds& bounds) {
    bounds.validate();
    Protocol p = from_groups(std::move(groups));
    const double tol = 1e-12 * std::max(1.0, bounds.d_max);
    for (const auto& g : p.groups_) {
        if (!bounds.contains(g.dose, tol)) {
            throw ValidationError("dose outside the admissible window");
        }
    }
    return p;
}

Protocol Protocol::uniform(std::int64_t n, double dose) {
    return from_groups({DoseGroup{n, dose}});
}

std::int64_t Protocol::fraction_count() const {
    std::int64_t n = 0;
    for (const auto& g : groups_) n += g.count;
    return n;
}

double Protocol::total_dose() const {
    double s = 0.0;
    for (const auto& g : groups_) s += static_cast<double>(g.count) * g.dose;
    return s;
}

double Protocol::total_dose_squared() const {
    double s = 0.0;
    for (const auto& g : groups_) s += static_cast<double>(g.count) * g.dose * g.dose;
    return s;
}

std::int64_t Protocol::interior_dose_count(const DoseBounds& bounds, double tol) const {
    std::int64_t n = 0;
    for (const auto& g : groups_) {
        if (g.dose > bounds.d_min + tol && g.dose < bounds.d_max - tol) n += g.count;
    }
    return n;
}

double phi(const Radiosensitivity& sens, double scale, double r) {
    const double sr = scale * r;
    return sens.alpha * sr + sens.beta * sr * sr;
}

double tumor_effect(const Radiosensitivity& tumor, const Protocol& p) {
    return tumor.alpha * p.total_dose() + tumor.beta * p.total_dose_squared();
}

double oar_effect(const ProblemParams& params, const Protocol& p) {
    const double d = params.delta;
    return params.oar.alpha * d * p.total_dose() + params.oar.beta * d * d * p.total_dose_squared();
}

double survival_fraction(const Radiosensitivity& tumor, const Protocol& p) {
    return std::exp(-tumor_effect(tumor, p));
}

double omega_delta(const ProblemParams& params) {
    return params.tumor.alpha / params.tumor.beta -
           params.oar.alpha / (params.oar.beta * params.delta);
}

Regime regime_of(const ProblemParams& params) {
    const double w = omega_delta(params);
    const double scale = params.tumor.alpha / params.tumor.beta +
                         params.oar.alpha / (params.oar.beta * params.delta);
    if (std::abs(w) <= num::kOmegaZeroTol * scale) return Regime::proportional;
    return w > 0.0 ? Regime::hyper : Regime::hypo;
}

Thresholds p1_thresholds(const ProblemParams& params, double gamma_oar) {
    params.validate();
    num::require_finite(gamma_oar, "gamma");
    if (gamma_oar <= 0.0) throw ValidationError("gamma must be strictly positive");
    Thresholds t;
    t.lambda = std::max(1.0, gamma_oar / phi(params.oar, params.delta, params.bounds.d_max));
    t.rho = gamma_oar / phi(params.oar, params.delta, params.bounds.d_min);
    t.omega = omega_delta(params);
    return t;
}

Thresholds p2_thresholds(const ProblemParams& params, double gamma_t) {
    params.validate();
    num::require_finite(gamma_t, "gamma");
    if (gamma_t <= 0.0) throw ValidationError("gamma must be strictly positive");
    Thresholds t;
    t.lambda = std::max(1.0, gamma_t / phi(params.tumor, 1.0, params.bounds.d_max));
    t.rho = std::max(1.0, gamma_t / phi(params.tumor, 1.0, params.bounds.d_min));
    t.omega = omega_delta(params);
    return t;
}

double uniform_dose_for_budget(const Radiosensitivity& sens, double scale, std::int64_t n,
                               double gamma) {
    sens.validate();
    num::require_finite(gamma, "gamma");
    if (n < 1) throw ValidationError("fraction count must be at least 1");
    if (gamma <= 0.0) throw ValidationError("gamma must be strictly positive");
    const double nd = static_cast<double>(n);
    const double a = sens.beta * scale * scale * nd;
    const double b = sens.alpha * scale * nd;
    return num::positive_root(a, b, gamma);
}

}  // namespace fraxion
