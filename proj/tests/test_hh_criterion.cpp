#include <doctest.h>

#include <cmath>
#include <numbers>

#include "kghopf/errors.hpp"
#include "kghopf/hh_criterion.hpp"
#include "oracles.hpp"

using namespace kghopf;

namespace {
constexpr double pi = std::numbers::pi;

HillCoefficient wave(double c, double E) {
    return hill_coefficient(build_profile(Potential::sine_gordon(), {c, E}));
}
}  // namespace

TEST_CASE("lambda and nu") {
    const double c = 1.45;
    const auto lam = lambda_of_nu(-2.0, c);
    CHECK(lam.real() == 0.0);
    CHECK(lam.imag() == doctest::Approx((c * c - 1) * std::sqrt(2.0)));
    CHECK(nu_of_lambda(lam, c).real() == doctest::Approx(-2.0));
    CHECK(std::abs(nu_of_lambda(lam, c).imag()) < 1e-14);
    const auto z = nu_of_lambda({0.3, 1.1}, 0.6);
    const auto w = std::complex<double>(0.3, 1.1) / (0.36 - 1);
    CHECK(std::abs(z - w * w) < 1e-14);
    CHECK_THROWS_AS((void)lambda_of_nu(0.5, c), DomainError);
    CHECK_THROWS_AS((void)nu_of_lambda({1, 0}, 1.0), ConfigError);
}

TEST_CASE("zero potential: F = c^2 nu and no HH points") {
    const double c = 1.45, T = 2.0;
    const auto coef = HillCoefficient::constant(T, 0.0);
    for (int i = 0; i < 40; ++i) {
        const double nu = -30.0 + 29.9 * i / 39.0;
        const auto F = extended_F(coef, c, nu);
        REQUIRE(F.kind == FKind::finite);
        CHECK(F.value == doctest::Approx(c * c * nu).epsilon(1e-9));
    }
    const auto bands = band_structure(coef, -30.0);
    const auto hh = scan_hh_points(coef, c, bands);
    CHECK(hh.points.empty());
    CHECK(hh.evaluations > 0);
}

TEST_CASE("double points are regularized by continuity") {
    // For P = P0, F = c^2 (nu - P0) everywhere, including at nu = P0 - (k pi / T)^2.
    const double c = 0.6, T = 2.5, P0 = 1.0;
    const auto coef = HillCoefficient::constant(T, P0);
    for (int k = 1; k <= 4; ++k) {
        const double nu = P0 - std::pow(k * pi / T, 2);
        const auto F = extended_F(coef, c, nu);
        CHECK(F.regularized);
        CHECK(F.kind == FKind::finite);
        CHECK(F.value == doctest::Approx(c * c * (nu - P0)).epsilon(1e-6));
        CHECK(to_string(F) == "regularized");
        // The limit from either side, on the textbook form.
        for (double h : {1e-3, -1e-3}) {
            const auto d = discriminant(coef, nu + h);
            CHECK(oracle::textbook_F(d.delta, d.delta_nu, T, c) == doctest::Approx(F.value).epsilon(1e-3));
        }
    }
}

TEST_CASE("infinite F at a gap critical point") {
    // Mathieu q = 1: Delta_nu vanishes inside the gap (-1.859, 0.110).
    const auto coef = HillCoefficient::synthetic(pi, [](double z) { return -2 * std::cos(2 * z); });
    const auto bs = band_structure(coef, -6.0);
    const double crit = bs.gaps.back().critical_nu;
    const auto d = discriminant(coef, crit);
    CHECK(std::abs(d.delta_nu) <= 1e-7);
    const auto F = extended_F(coef, 1.3, crit);
    CHECK(F.kind == FKind::plus_infinity);
    CHECK(F.g() == 1.0);
    CHECK(F.excess() == INFINITY);
    CHECK(to_string(F) == "+inf");

    Discriminant neg{1.0, 0.0, 1.0, -3.0};
    const auto Fm = extended_F(neg, -1.0, 1.0, 1.3);
    CHECK(Fm.kind == FKind::minus_infinity);
    CHECK(Fm.g() == -1.0);
    CHECK(to_string(Fm) == "-inf");

    Discriminant flat{2.0, 0.0, 0.0, 0.0};
    CHECK_THROWS_AS((void)extended_F(flat, -1.0, 1.0, 1.3), DegenerateDiscriminantError);
}

TEST_CASE("indices sign arithmetic") {
    const double T = 2.0;
    // c^2 > 1, Delta_nu(0) > 0, c^2 T^2 > Delta_nu(0).
    auto a = indices_from(2.0, 3.0, 1.0, T, 1.2);
    CHECK(a.gamma_M == 1);
    CHECK(a.gamma_P == 1);
    CHECK(a.evans_curvature_sign == 1);
    // c^2 T^2 = 5.76 < Delta_nu(0) = 8 flips gamma_P.
    auto b = indices_from(2.0, 8.0, 1.0, T, 1.2);
    CHECK(b.gamma_M == 1);
    CHECK(b.gamma_P == -1);
    // Subluminal: c^2 - 1 < 0 flips gamma_P again.
    auto s = indices_from(2.0, 8.0, 1.0, T, 0.5);
    CHECK(s.gamma_P == 1);
    auto m = indices_from(2.0, -4.0, 1.0, T, 0.5);
    CHECK(m.gamma_M == -1);
    CHECK(m.gamma_P == -1);
    auto d = indices_from(2.0, 1.2 * 1.2 * T * T, 1.0, T, 1.2);
    CHECK(d.degenerate);
    auto z = indices_from(2.0, 0.0, -1.0, T, 1.2);
    CHECK(z.gamma_M_zero);
    CHECK(z.gamma_M == 0);
}

TEST_CASE("compute_indices needs a wave coefficient") {
    CHECK_THROWS_AS((void)compute_indices(HillCoefficient::constant(2.0, 1.0), 1.2), NotAWaveError);
    const auto idx = compute_indices(wave(1.45, 6.0), 1.45);
    CHECK(idx.delta_at_0 == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(idx.gamma_M == 1);
    CHECK(idx.gamma_P == 1);
    const auto idx2 = compute_indices(wave(1.4, 1.5), 1.4);
    CHECK(idx2.gamma_M == -1);
    CHECK(idx2.gamma_P == 1);
}

TEST_CASE("HH points of the rotational c = 1.45, E = 6 wave") {
    const double c = 1.45;
    const auto coef = wave(c, 6.0);
    const double T = coef.period();
    const auto bands = band_structure(coef, default_nu_min(T));
    const auto hh = scan_hh_points(coef, c, bands);
    REQUIRE(hh.points.size() == 2);
    CHECK(hh.warnings.empty());
    for (const auto& p : hh.points) {
        CHECK(p.beta == doctest::Approx((c * c - 1) * std::sqrt(-p.nu_star)));
        CHECK(p.residual <= 1e-9 * (1 + std::abs(p.nu_star)));
        REQUIRE(p.band_index < bands.bands.size());
        CHECK(bands.bands[p.band_index].contains(p.nu_star));
        CHECK(p.trans.min_abs() <= 1e-6);
        // Textbook F at the root.
        const auto d = discriminant(coef, p.nu_star);
        CHECK(oracle::textbook_F(d.delta, d.delta_nu, T, c) == doctest::Approx(p.nu_star).epsilon(1e-7));
    }
    // One on each side of the open gap.
    REQUIRE(bands.gaps.size() == 1);
    CHECK(hh.points[0].nu_star < bands.gaps[0].lo);
    CHECK(hh.points[1].nu_star > bands.gaps[0].hi);

    const auto idx = compute_indices(coef, c);
    const auto rep = corollary_report(idx, bands, c, hh.points, -1.0);
    CHECK(rep.c3 == Outcome::satisfied);
    CHECK(rep.c4 == Outcome::satisfied);
    CHECK(rep.consistent());
    const auto deep = corollary_report(idx, bands, c, hh.points, default_c4_depth(T));
    CHECK(deep.c4 == Outcome::inconclusive);
}

TEST_CASE("gap positivity and band edges") {
    for (const auto& [c, E] : {std::pair{1.45, 6.0}, std::pair{1.4, 1.5}, std::pair{0.8, 1.5}}) {
        const auto coef = wave(c, E);
        const auto bands = band_structure(coef, default_nu_min(coef.period()));
        for (const auto& g : bands.gaps) {
            const double hi = std::min(g.hi, 0.0);
            for (int i = 1; i < 10; ++i) {
                const double nu = g.lo + (hi - g.lo) * i / 10.0;
                CHECK(extended_F(coef, c, nu).excess() > 0);
            }
        }
        for (const auto& e : bands.simple_edges()) {
            if (e.nu >= -1e-8) continue;
            const auto F = extended_F(coef, c, e.nu);
            REQUIRE(F.kind == FKind::finite);
            CHECK(std::abs(F.value) <= 1e-6);
        }
    }
}

TEST_CASE("transversality away from HH points") {
    const double c = 1.45;
    const auto coef = wave(c, 6.0);
    for (double nu : {-9.0, -5.0, -1.0, -0.4}) {
        const auto t = transversality(coef, c, nu);
        CHECK(t.min_abs() > 1e-3);
        CHECK(std::abs(t.t0 - discriminant(coef, nu).delta) < 1e-12);
    }
}

TEST_CASE("small-nu behaviour") {
    SUBCASE("zero potential slope is c^2 - 1") {
        // A constant coefficient is not a wave, but the check only needs Delta near 0.
        const double c = 1.45;
        const auto chk = small_nu_check(HillCoefficient::constant(2.0, 0.0), c);
        CHECK(chk.branch == 1);
        CHECK(chk.predicted == doctest::Approx(c * c - 1));
        CHECK(chk.relative_error() <= 1e-6);
    }
    SUBCASE("waves") {
        for (const auto& [c, E] : {std::pair{1.45, 6.0}, std::pair{1.4, 1.5}}) {
            const auto chk = small_nu_check(wave(c, E), c);
            CHECK(chk.branch == 1);
            CHECK(chk.relative_error() <= 1e-6);
        }
    }
}

TEST_CASE("deep probes approach the asymptotic ratio") {
    const double c = 1.45;
    const auto coef = wave(c, 6.0);
    const double s = c * c - 1;
    std::vector<double> probes;
    for (int k = 1; k <= 5; ++k) probes.push_back(-100.0 * k / (s * s));
    const auto out = asymptotic_check(coef, c, probes);
    int accepted = 0;
    for (const auto& p : out) {
        if (!p.accepted) continue;
        ++accepted;
        CHECK(std::abs(p.ratio - 1) <= 0.05);
    }
    CHECK(accepted >= 3);
}

TEST_CASE("corollary outcomes on synthetic input") {
    BandStructure bs;
    BandEdge lo{-10, EdgeKind::periodic, Multiplicity::simple, {}}, mid{-5, EdgeKind::antiperiodic, Multiplicity::simple, {}};
    BandEdge mid2{-4, EdgeKind::antiperiodic, Multiplicity::simple, {}}, top{0, EdgeKind::periodic, Multiplicity::simple, {}};
    bs.bands = {Band{lo, mid}, Band{mid2, top}};
    bs.gaps = {Gap{-5, -4, false, -4.5}};
    Indices idx;
    idx.gamma_M = -1;
    idx.gamma_P = 1;
    CHECK(corollary_report(idx, bs, 1.2, {}, -1.0).c2 == Outcome::violated);
    HHPoint p;
    p.nu_star = -2;
    p.band_index = 1;
    auto r = corollary_report(idx, bs, 1.2, {p}, -1.0);
    CHECK(r.c2 == Outcome::satisfied);
    REQUIRE(r.gaps.size() == 1);
    CHECK(r.gaps[0].hh_above == 1);
    CHECK(r.gaps[0].outcome == Outcome::violated);
    CHECK_FALSE(r.consistent());
    // Subluminal: C3 and C4 never fire.
    idx.gamma_M = 1;
    auto sub = corollary_report(idx, bs, 0.5, {}, -1.0);
    CHECK(sub.c3 == Outcome::not_fired);
    CHECK(sub.c4 == Outcome::not_fired);
    CHECK(to_string(Outcome::inconclusive) == "inconclusive");
}
