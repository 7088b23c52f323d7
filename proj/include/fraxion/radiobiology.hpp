#pragma once

/**
 * @file radiobiology.hpp
 * @brief Domain types and linear-quadratic (LQ) model arithmetic.
 *
 * Under the LQ model a fraction of dose d kills with log-survival
 * alpha*d + beta*d^2. A treatment is a schedule of N fractions; the
 * accumulated effect on the tumor and on the organ at risk (OAR), the
 * per-fraction effect polynomials, and the fraction-count thresholds
 * derived from them live here. Everything is a pure function over
 * immutable values and safe to call concurrently.
 */

#include <cstdint>
#include <optional>
#include <vector>

#include "fraxion/errors.hpp"

namespace fraxion {

/// LQ-model parameter pair (alpha in 1/Gy, beta in 1/Gy^2) for one tissue.
struct Radiosensitivity {
    double alpha{0.0};
    double beta{0.0};

    /// Both rates must be finite and strictly positive.
    void validate() const;
};

/// Admissible per-fraction dose window, in Gy.
struct DoseBounds {
    double d_min{0.0};
    double d_max{0.0};

    /// Requires 0 < d_min < d_max, both finite.
    void validate() const;

    /// True when `dose` lies in [d_min, d_max] up to `tol`.
    bool contains(double dose, double tol) const;
};

/// Full instance data: tumor and OAR radiosensitivities, sparing factor
/// delta in (0,1] (the fraction of the tumor dose reaching the OAR),
/// and the dose window.
struct ProblemParams {
    Radiosensitivity tumor;
    Radiosensitivity oar;
    double delta{1.0};
    DoseBounds bounds;

    void validate() const;
};

/// Fraction-count thresholds for one instance and one effect budget/floor.
///
/// `lambda` is the count below which the trivial corner schedule is
/// optimal, `rho` the count beyond which only the opposite corner is
/// feasible, and `omega` (in Gy) the regime discriminant whose sign
/// selects hypo- vs hyperfractionation.
struct Thresholds {
    double lambda{0.0};
    double rho{0.0};
    double omega{0.0};
};

/// A run of identical fractions: `count` fractions of `dose` Gy each.
struct DoseGroup {
    std::int64_t count{0};
    double dose{0.0};
};

/**
 * @brief A dose schedule, run-length encoded.
 *
 * Canonical form: groups sorted by strictly increasing dose. Optimal
 * schedules have at most three distinct dose values, so this stays O(1)
 * even when the fraction count reaches the tens of thousands.
 */
class Protocol {
public:
    /// Empty placeholder; not a valid schedule (fraction_count() == 0).
    Protocol() = default;

    /// Canonicalizes (sort, merge equal doses) and validates: positive
    /// finite doses, positive counts, at least one fraction.
    static Protocol from_groups(std::vector<DoseGroup> groups);

    /// Same, and additionally requires every dose to lie within `bounds`.
    static Protocol from_groups(std::vector<DoseGroup> groups, const DoseBounds& bounds);

    /// N fractions of the same dose.
    static Protocol uniform(std::int64_t n, double dose);

    const std::vector<DoseGroup>& groups() const { return groups_; }

    /// Total number of fractions N.
    std::int64_t fraction_count() const;

    /// Sum of all doses, in Gy.
    double total_dose() const;

    /// Sum of squared doses, in Gy^2.
    double total_dose_squared() const;

    /// Number of doses strictly inside (d_min, d_max).
    std::int64_t interior_dose_count(const DoseBounds& bounds, double tol) const;

    bool operator==(const Protocol& other) const {
        if (groups_.size() != other.groups_.size()) return false;
        for (std::size_t i = 0; i < groups_.size(); ++i) {
            if (groups_[i].count != other.groups_[i].count || groups_[i].dose != other.groups_[i].dose) return false;
        }
        return true;
    }

private:
    explicit Protocol(std::vector<DoseGroup> groups) : groups_(std::move(groups)) {}

    std::vector<DoseGroup> groups_;
};

/**
 * @brief Per-fraction effect polynomial: alpha*scale*r + beta*scale^2*r^2.
 *
 * With scale = 1 this is the tumor's per-fraction effect; with
 * scale = delta it is the OAR's. Strictly increasing for r >= 0.
 */
double phi(const Radiosensitivity& sens, double scale, double r);

/// Accumulated tumor effect of a schedule: alpha*sum(d_i) + beta*sum(d_i^2).
/// Invariant under regrouping/permutation of the fractions.
double tumor_effect(const Radiosensitivity& tumor, const Protocol& p);

/// Accumulated OAR effect, with the sparing factor applied:
/// alpha0*delta*sum(d_i) + beta0*delta^2*sum(d_i^2).
double oar_effect(const ProblemParams& params, const Protocol& p);

/// Accumulated survival probability exp(-tumor_effect), in (0, 1].
double survival_fraction(const Radiosensitivity& tumor, const Protocol& p);

/// Regime discriminant (Gy): alpha_T/beta_T - alpha_0/(beta_0*delta).
/// Positive favors hyperfractionation, negative hypofractionation.
double omega_delta(const ProblemParams& params);

/// Three-way regime classification of omega_delta with a deterministic
/// relative zero gate.
enum class Regime { hyper, hypo, proportional };
Regime regime_of(const ProblemParams& params);

/// Thresholds for the healing problem with OAR budget `gamma_oar`:
/// lambda = max(1, gamma/phi_oar(d_max)), rho = gamma/phi_oar(d_min).
/// Note rho intentionally carries no clamp at 1 here.
Thresholds p1_thresholds(const ProblemParams& params, double gamma_oar);

/// Thresholds for the palliative problem with tumor-effect floor
/// `gamma_t`: both lambda and rho are clamped below by 1.
Thresholds p2_thresholds(const ProblemParams& params, double gamma_t);

/**
 * @brief Unique positive dose d solving n * phi(sens, scale, d) = gamma.
 *
 * Computed in the cancellation-safe form 2g/(b + sqrt(b^2 + 4ag)) rather
 * than the textbook quadratic formula, which loses precision when
 * 4ag << b^2. The caller is responsible for checking bound membership.
 */
double uniform_dose_for_budget(const Radiosensitivity& sens, double scale, std::int64_t n,
                               double gamma);

namespace num {

/// Relative feasibility tolerance for constraint checks.
inline constexpr double kFeasibilityTol = 1e-9;

/// Relative tolerance for deciding that a real is a whole number.
inline constexpr double kIntegralityTol = 1e-9;

/// Relative gate for classifying omega_delta as zero.
inline constexpr double kOmegaZeroTol = 1e-12;

/// Relative tolerance for objective ties between candidate schedules.
inline constexpr double kTieTol = 1e-12;

bool nearly_integer(double x);

/// floor(x), except values within the integrality tolerance of a whole
/// number are snapped to it first.
std::int64_t floor_snapped(double x);

/// ceil(x) with the same snapping rule.
std::int64_t ceil_snapped(double x);

/// Positive root of a*x^2 + b*x = c for a, b > 0, c > 0, cancellation safe.
double positive_root(double a, double b, double c);

/// Snap tolerance for doses landing numerically on a bound.
double dose_snap_tol(const DoseBounds& bounds);

/// Returns the nearest bound when `dose` is within the snap tolerance of
/// it, otherwise `dose` unchanged.
double snap_to_bounds(double dose, const DoseBounds& bounds);

void require_finite(double x, const char* what);

}  // namespace num

}  // namespace fraxion
