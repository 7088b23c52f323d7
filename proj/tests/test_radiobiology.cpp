#include <doctest.h>

#include <cmath>
#include <limits>

#include "fraxion/radiobiology.hpp"
#include "test_support.hpp"

using namespace fraxion;

namespace {

const ProblemParams kClinical{
    {0.05, 0.005}, {0.04, 0.02}, 0.3, {1.0, 6.0}};  // tumor, oar, delta, bounds

ProblemParams with_delta(ProblemParams p, double delta) {
    p.delta = delta;
    return p;
}

}  // namespace

TEST_CASE("tumor effect on fixture schedules") {
    const Protocol standard = Protocol::uniform(25, 2.0);
    CHECK(tumor_effect(kClinical.tumor, standard) == doctest::Approx(3.0).epsilon(1e-12));

    const double dose56 = uniform_dose_for_budget(kClinical.oar, 0.3, 56, 0.78);
    CHECK(tumor_effect(kClinical.tumor, Protocol::uniform(56, dose56)) ==
          doctest::Approx(3.107).epsilon(1e-3));

    const Radiosensitivity unit{1.0, 1.0};
    CHECK(tumor_effect(unit, Protocol::uniform(1, 1.0)) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("oar effect on fixture schedules") {
    CHECK(oar_effect(kClinical, Protocol::uniform(25, 2.0)) ==
          doctest::Approx(0.78).epsilon(1e-12));

    const Protocol hypo = Protocol::from_groups({{1, 1.0}, {1, 5.77}, {8, 6.0}});
    CHECK(oar_effect(with_delta(kClinical, 0.1), hypo) ==
          doctest::Approx(0.2835).epsilon(2e-3));

    // delta = 1 with identical tissues reduces the OAR effect to the tumor effect
    ProblemParams same = kClinical;
    same.delta = 1.0;
    same.oar = same.tumor;
    const Protocol p = Protocol::from_groups({{3, 1.5}, {2, 4.0}});
    CHECK(oar_effect(same, p) == doctest::Approx(tumor_effect(same.tumor, p)).epsilon(1e-15));
}

TEST_CASE("survival is the exponential of the accumulated effect") {
    const Protocol standard = Protocol::uniform(25, 2.0);
    CHECK(survival_fraction(kClinical.tumor, standard) ==
          doctest::Approx(std::exp(-3.0)).epsilon(1e-12));

    test::Rng rng(101);
    for (int i = 0; i < 50; ++i) {
        const ProblemParams params = test::random_params(rng);
        const Protocol p = Protocol::uniform(rng.integer(1, 40),
                                             rng.uniform(params.bounds.d_min, params.bounds.d_max));
        CHECK(survival_fraction(params.tumor, p) ==
              doctest::Approx(std::exp(-tumor_effect(params.tumor, p))).epsilon(1e-15));
        CHECK(survival_fraction(params.tumor, p) > 0.0);
        CHECK(survival_fraction(params.tumor, p) <= 1.0);

        // doubling any dose strictly lowers survival
        auto groups = p.groups();
        groups.front().dose *= 2.0;
        const Protocol doubled = Protocol::from_groups(std::move(groups));
        CHECK(survival_fraction(params.tumor, doubled) < survival_fraction(params.tumor, p));
    }
}

TEST_CASE("per-fraction effect polynomial") {
    CHECK(phi(kClinical.tumor, 1.0, 0.0) == 0.0);
    CHECK(phi(kClinical.tumor, 1.0, 6.0) == doctest::Approx(0.48).epsilon(1e-14));
    CHECK(phi(kClinical.oar, 0.3, 1.0) == doctest::Approx(0.0138).epsilon(1e-14));

    test::Rng rng(102);
    for (int i = 0; i < 100; ++i) {
        const ProblemParams params = test::random_params(rng);
        const double r1 = rng.uniform(0.0, 10.0);
        const double r2 = r1 + rng.uniform(1e-6, 5.0);
        const double scale = rng.uniform(0.05, 1.0);
        CHECK(phi(params.oar, scale, r1) < phi(params.oar, scale, r2));
    }
}

TEST_CASE("regime discriminant") {
    CHECK(omega_delta(kClinical) == doctest::Approx(10.0 / 3.0).epsilon(1e-12));
    CHECK(omega_delta(with_delta(kClinical, 0.1)) == doctest::Approx(-10.0).epsilon(1e-12));
    CHECK(regime_of(kClinical) == Regime::hyper);
    CHECK(regime_of(with_delta(kClinical, 0.1)) == Regime::hypo);

    // alpha_T/beta_T == alpha_0/(beta_0*delta) cancels exactly
    const ProblemParams balanced = with_delta(kClinical, 0.2);
    CHECK(std::abs(omega_delta(balanced)) < 1e-11);
    CHECK(regime_of(balanced) == Regime::proportional);
}

TEST_CASE("healing-problem thresholds") {
    const Thresholds t = p1_thresholds(kClinical, 0.78);
    CHECK(t.lambda == doctest::Approx(5.70175).epsilon(1e-5));
    CHECK(t.rho == doctest::Approx(56.5217).epsilon(1e-5));
    CHECK(t.omega == doctest::Approx(10.0 / 3.0).epsilon(1e-12));

    const Thresholds t2 = p1_thresholds(with_delta(kClinical, 0.1), 0.22);
    CHECK(t2.lambda == doctest::Approx(7.0513).epsilon(1e-4));
    CHECK(t2.rho == doctest::Approx(52.381).epsilon(1e-4));

    // budget equal to one minimum fraction puts rho exactly at 1
    const double g = phi(kClinical.oar, kClinical.delta, kClinical.bounds.d_min);
    CHECK(p1_thresholds(kClinical, g).rho == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("palliative-problem thresholds clamp both ends") {
    ProblemParams params = kClinical;
    params.delta = 1.0;
    const Thresholds t = p2_thresholds(params, 4.0);
    CHECK(t.lambda == doctest::Approx(8.3333).epsilon(1e-4));
    CHECK(t.rho == doctest::Approx(72.7273).epsilon(1e-4));

    const Thresholds t2 = p2_thresholds(params, 4.35);
    CHECK(t2.lambda == doctest::Approx(9.0625).epsilon(1e-4));
    CHECK(t2.rho == doctest::Approx(79.0909).epsilon(1e-4));

    CHECK(p2_thresholds(params, 0.01).rho == 1.0);
    CHECK(p2_thresholds(params, 0.01).lambda == 1.0);
}

TEST_CASE("uniform dose for a budget") {
    CHECK(uniform_dose_for_budget(kClinical.oar, 0.3, 56, 0.78) ==
          doctest::Approx(1.008).epsilon(5e-4));
    CHECK(uniform_dose_for_budget(kClinical.tumor, 1.0, 72, 4.0) ==
          doctest::Approx(1.00926).epsilon(5e-5));
    CHECK(uniform_dose_for_budget(Radiosensitivity{2.0, 1.0}, 1.0, 2, 12.0) ==
          doctest::Approx(std::sqrt(7.0) - 1.0).epsilon(1e-14));
}

TEST_CASE("uniform dose round trip and threshold consistency") {
    test::Rng rng(103);
    for (int i = 0; i < 200; ++i) {
        const ProblemParams params = test::random_params(rng);
        const double gamma = rng.uniform(0.01, 10.0);
        const std::int64_t n = rng.integer(1, 500);
        const double dose = uniform_dose_for_budget(params.oar, params.delta, n, gamma);
        CHECK(dose > 0.0);
        const double back = static_cast<double>(n) * phi(params.oar, params.delta, dose);
        CHECK(std::abs(back - gamma) <= 1e-12 * std::max(1.0, gamma));

        const Thresholds t1 = p1_thresholds(params, gamma);
        if (t1.rho >= 1.0) CHECK(t1.lambda <= t1.rho);
        const Thresholds t2 = p2_thresholds(params, gamma);
        CHECK(t2.lambda <= t2.rho);
    }
}

TEST_CASE("effects are invariant under regrouping") {
    test::Rng rng(104);
    for (int i = 0; i < 100; ++i) {
        const ProblemParams params = test::random_params(rng);
        std::vector<DoseGroup> groups;
        const std::int64_t kinds = rng.integer(1, 4);
        for (std::int64_t k = 0; k < kinds; ++k) {
            groups.push_back({rng.integer(1, 5),
                              rng.uniform(params.bounds.d_min, params.bounds.d_max)});
        }
        const Protocol merged = Protocol::from_groups(groups);

        // split every group into single fractions
        std::vector<DoseGroup> split;
        for (const auto& g : groups) {
            for (std::int64_t c = 0; c < g.count; ++c) split.push_back({1, g.dose});
        }
        const Protocol exploded = Protocol::from_groups(split);
        CHECK(tumor_effect(params.tumor, merged) ==
              doctest::Approx(tumor_effect(params.tumor, exploded)).epsilon(1e-15));
        CHECK(oar_effect(params, merged) ==
              doctest::Approx(oar_effect(params, exploded)).epsilon(1e-15));
    }
}

TEST_CASE("protocol canonical form") {
    const Protocol p = Protocol::from_groups({{2, 6.0}, {1, 1.0}, {3, 6.0}, {1, 2.5}});
    REQUIRE(p.groups().size() == 3);
    CHECK(p.groups()[0].dose == 1.0);
    CHECK(p.groups()[1].dose == 2.5);
    CHECK(p.groups()[2].dose == 6.0);
    CHECK(p.groups()[2].count == 5);
    CHECK(p.fraction_count() == 7);
    CHECK(p.total_dose() == doctest::Approx(1.0 + 2.5 + 30.0));
}

TEST_CASE("validation rejects malformed inputs") {
    CHECK_THROWS_AS(Protocol::from_groups({}), ValidationError);
    CHECK_THROWS_AS(Protocol::from_groups({{0, 2.0}}), ValidationError);
    CHECK_THROWS_AS(Protocol::from_groups({{1, -2.0}}), ValidationError);
    CHECK_THROWS_AS(Protocol::from_groups({{1, std::nan("")}}), ValidationError);
    CHECK_THROWS_AS(Protocol::from_groups({{1, 7.0}}, DoseBounds{1.0, 6.0}), ValidationError);
    CHECK_NOTHROW(Protocol::from_groups({{1, 6.0}}, DoseBounds{1.0, 6.0}));

    CHECK_THROWS_AS((Radiosensitivity{-0.1, 0.1}).validate(), ValidationError);
    CHECK_THROWS_AS((Radiosensitivity{0.1, 0.0}).validate(), ValidationError);
    CHECK_THROWS_AS((DoseBounds{2.0, 2.0}).validate(), ValidationError);
    CHECK_THROWS_AS((DoseBounds{0.0, 2.0}).validate(), ValidationError);

    ProblemParams bad = kClinical;
    bad.delta = 1.5;
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    bad.delta = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(bad.validate(), ValidationError);

    CHECK_THROWS_AS(p1_thresholds(kClinical, 0.0), ValidationError);
    CHECK_THROWS_AS(uniform_dose_for_budget(kClinical.oar, 0.3, 0, 1.0), ValidationError);
}
