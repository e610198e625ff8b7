#include <doctest.h>

#include <cmath>
#include <numbers>

#include "kghopf/errors.hpp"
#include "kghopf/waveform.hpp"
#include "oracles.hpp"

using namespace kghopf;

namespace {
const Potential sg = Potential::sine_gordon();
// V = u^2/2 - u^4/4: a single well at 0 between two maxima at height 1/4.
const Potential phi4 = Potential::polynomial({0.0, 0.0, 0.5, 0.0, -0.25});
}  // namespace

TEST_CASE("wave parameter validation") {
    CHECK_NOTHROW((WaveParameters{1.45, 6.0}.validate()));
    CHECK_THROWS_AS((WaveParameters{1.0, 1.0}.validate()), ConfigError);
    CHECK_THROWS_AS((WaveParameters{-1.0, 1.0}.validate()), ConfigError);
    CHECK_THROWS_AS((WaveParameters{NAN, 1.0}.validate()), ConfigError);
    CHECK_THROWS_AS((WaveParameters{1.2, INFINITY}.validate()), ConfigError);
}

TEST_CASE("regime classification") {
    CHECK(classify_regime(sg, {1.45, 6.0}) == Regime::rotational);
    CHECK(classify_regime(sg, {1.4, 1.5}) == Regime::librational);
    CHECK(classify_regime(sg, {0.5, 1.0}) == Regime::librational);
    CHECK(classify_regime(sg, {0.5, -0.5}) == Regime::rotational);
    CHECK(classify_regime(phi4, {1.3, 0.1}) == Regime::librational);
    // c < 1 turns the maxima of V into wells.
    CHECK(std::abs(locate_orbit(phi4, {0.6, -0.1}).center) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(to_string(Regime::rotational) == "rotational");
}

TEST_CASE("no orbit") {
    SUBCASE("separatrix") {
        try {
            (void)locate_orbit(sg, {1.45, 2.0});
            FAIL("expected NoOrbitError");
        } catch (const NoOrbitError& e) {
            CHECK(e.separatrix());
        }
    }
    SUBCASE("below the well") { CHECK_THROWS_AS((void)locate_orbit(sg, {1.45, -0.5}), NoOrbitError); }
    SUBCASE("unbounded polynomial orbit") { CHECK_THROWS_AS((void)locate_orbit(phi4, {1.3, 0.3}), NoOrbitError); }
    SUBCASE("no well at all") {
        CHECK_THROWS_AS((void)locate_orbit(Potential::polynomial({0.0, 1.0}), {1.3, 0.3}), NoOrbitError);
    }
}

TEST_CASE("sine-Gordon period matches elliptic integrals") {
    struct Case {
        double c, E;
    };
    for (const auto cs : {Case{1.45, 6.0}, Case{1.4, 1.5}, Case{1.2, 0.5}, Case{2.0, 2.5}, Case{0.5, 1.0},
                          Case{0.8, 1.5}, Case{0.5, -0.5}, Case{0.7, -2.0}}) {
        CAPTURE(cs.c);
        CAPTURE(cs.E);
        const double T = compute_period(sg, {cs.c, cs.E});
        CHECK(T == doctest::Approx(oracle::sine_gordon_period(cs.c, cs.E)).epsilon(1e-10));
    }
}

TEST_CASE("polynomial period matches tanh-sinh quadrature") {
    auto V = [](double u) { return 0.5 * u * u - 0.25 * std::pow(u, 4); };
    for (double E : {0.02, 0.1, 0.2}) {
        CAPTURE(E);
        const double T = compute_period(phi4, {1.3, E});
        CHECK(T == doctest::Approx(oracle::librational_period(V, 1.3, E, 0.0)).epsilon(1e-6));
    }
    // A double well; the seed picks the right-hand one.
    auto W = [](double u) { return -0.5 * u * u + 0.25 * std::pow(u, 4); };
    const auto dw = Potential::polynomial({0.0, 0.0, -0.5, 0.0, 0.25});
    WaveOptions opt;
    opt.well = 0.9;
    const auto g = locate_orbit(dw, {1.3, -0.1}, opt);
    CHECK(g.center == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(compute_period(dw, {1.3, -0.1}, opt) ==
          doctest::Approx(oracle::librational_period(W, 1.3, -0.1, 1.0)).epsilon(1e-6));
}

TEST_CASE("harmonic limit") {
    const double c = 1.45;
    const double T = compute_period(sg, {c, 1e-3});
    CHECK(std::abs(T - 2 * std::numbers::pi * std::sqrt(c * c - 1)) / T <= 1e-3);
}

TEST_CASE("profile invariants") {
    for (const auto& [c, E] : {std::pair{1.45, 6.0}, std::pair{1.4, 1.5}, std::pair{0.5, -0.5}}) {
        CAPTURE(c);
        CAPTURE(E);
        const auto prof = build_profile(sg, {c, E}, 512);
        CHECK(prof.nodes() == 512);
        CHECK(prof.energy_drift() <= 1e-8);
        const double T = prof.period();
        CHECK(prof.f(T) == doctest::Approx(prof.f(0.0) + prof.winding()).epsilon(1e-9).scale(1.0));
        CHECK(prof.fp(T) == doctest::Approx(prof.fp(0.0)).epsilon(1e-9).scale(1.0));
        if (prof.regime() == Regime::rotational) CHECK(std::abs(prof.winding()) == doctest::Approx(2 * std::numbers::pi));
        else CHECK(prof.winding() == 0.0);
        // Energy of the interpolant between nodes.
        double worst = 0.0;
        for (int i = 0; i < 997; ++i) {
            const double z = T * (i + 0.37) / 997.0;
            const double f = prof.f(z), fp = prof.fp(z);
            worst = std::max(worst, std::abs(0.5 * (c * c - 1) * fp * fp + sg.eval(f).V - E));
        }
        CHECK(worst <= 1e-7 * (1 + std::abs(E)));
        // Periodic extension.
        CHECK(prof.fp(0.3 + 2 * T) == doctest::Approx(prof.fp(0.3)).epsilon(1e-12).scale(1.0));
        CHECK(prof.f(0.3 - T) == doctest::Approx(prof.f(0.3) - prof.winding()).epsilon(1e-12).scale(1.0));
    }
}

TEST_CASE("profile node count") {
    CHECK_THROWS_AS((void)build_profile(sg, {1.45, 6.0}, 100), ConfigError);
}

TEST_CASE("hill coefficient from a wave") {
    const double c = 1.4;
    const auto prof = build_profile(sg, {c, 1.5});
    const auto P = hill_coefficient(prof);
    CHECK(P.source() == CoefficientSource::wave);
    REQUIRE(P.seed());
    REQUIRE(P.wave_speed());
    CHECK(*P.wave_speed() == c);
    CHECK(P.period() == prof.period());
    for (double z : {0.0, 0.9, 3.3, 7.0}) {
        CHECK(P(z) == doctest::Approx(std::cos(prof.f(z)) / (c * c - 1)).epsilon(1e-12));
        CHECK(P(z + prof.period()) == doctest::Approx(P(z)).epsilon(1e-10));
    }
    // f oscillates in (-a, a) with cos a = 1 - E, so P stays in [cos a, 1] / (c^2 - 1).
    CHECK(P.max_value() == doctest::Approx(1 / (c * c - 1)).epsilon(1e-8));
    CHECK(P.min_value() == doctest::Approx((1 - 1.5) / (c * c - 1)).epsilon(1e-5));
}

TEST_CASE("synthetic coefficients") {
    const auto P = HillCoefficient::synthetic(std::numbers::pi, [](double z) { return std::cos(2 * z); });
    CHECK(P.source() == CoefficientSource::synthetic);
    CHECK_FALSE(P.seed());
    CHECK(P(std::numbers::pi + 0.2) == doctest::Approx(std::cos(0.4)));
    CHECK(P.max_value() == doctest::Approx(1.0).epsilon(1e-5));
    CHECK_THROWS_AS((void)HillCoefficient::constant(0.0, 1.0), ConfigError);
    CHECK_THROWS_AS((void)HillCoefficient::synthetic(1.0, [](double) { return NAN; }), DomainError);
}
