// Acceptance suite: one line per criterion, exit status 0 iff all pass.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include <json.hpp>

#include "kghopf/cli.hpp"
#include "kghopf/errors.hpp"
#include "kghopf/parallel.hpp"
#include "kghopf/spectrum2d.hpp"
#include "oracles.hpp"

using namespace kghopf;

namespace {

constexpr double pi = std::numbers::pi;

struct Figure {
    const char* name;
    double c, E;
    Window window;
};

const Figure kFig1{"fig1", 1.45, 6.0, {-0.3, 0.3, 0.0, 3.0}};
const Figure kFig2{"fig2", 1.4, 1.5, {-0.3, 0.3, 0.0, 1.5}};

HillCoefficient coefficient(double c, double E) {
    return hill_coefficient(build_profile(Potential::sine_gordon(), {c, E}));
}

struct Analysis {
    HillCoefficient coef;
    BandStructure bands;
    HHScan hh;
};

Analysis analyse(double c, double E) {
    auto coef = coefficient(c, E);
    auto bands = band_structure(coef, default_nu_min(coef.period()));
    auto hh = scan_hh_points(coef, c, bands);
    return {std::move(coef), std::move(bands), std::move(hh)};
}

std::string sci(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2e", x);
    return buf;
}

int failures = 0;

void criterion(int id, const std::string& title, const std::function<bool(std::ostream&)>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    std::ostringstream detail;
    bool ok = false;
    try {
        ok = body(detail);
    } catch (const std::exception& e) {
        detail << "exception: " << e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    char time[32];
    std::snprintf(time, sizeof time, "%.1f s", secs);
    std::cout << (ok ? "PASS" : "FAIL") << "  [" << id << "] " << title << ": " << detail.str() << " (" << time
              << ")" << std::endl;
    if (!ok) ++failures;
}

// Dense-grid count of sign changes of F - nu, with F on its textbook form.
std::size_t dense_hh_count(const HillCoefficient& coef, double c, double nu_min, double step_fraction) {
    const double T = coef.period();
    const double h = step_fraction * pi / T;
    const double top = std::sqrt(-nu_min);
    const std::size_t n = static_cast<std::size_t>(std::ceil(top / h));
    std::vector<double> s(n);
    parallel_for(n, [&](std::size_t k) {
        const double r = top - double(k) * h;  // sqrt(-nu), descending to just above 0
        const double nu = -r * r;
        const auto d = discriminant(coef, nu);
        s[k] = oracle::textbook_F(d.delta, d.delta_nu, T, c) - nu;
    });
    std::size_t count = 0;
    for (std::size_t k = 1; k < n; ++k)
        if (std::isfinite(s[k]) && std::isfinite(s[k - 1]) && (s[k] > 0) != (s[k - 1] > 0)) ++count;
    return count;
}

}  // namespace

int main() {
    criterion(1, "constant-coefficient oracle", [](std::ostream& os) {
        double e0 = 0, e12 = 0;
        for (double P0 : {0.0, 1.0, -2.0})
            for (double T : {pi, 2.5}) {
                const auto coef = HillCoefficient::constant(T, P0);
                std::vector<std::array<double, 3>> got(200);
                std::vector<double> nus(200);
                for (int i = 0; i < 200; ++i) nus[i] = -50.0 + (P0 + 55.0) * (i + 0.5) / 200.0;
                parallel_for(200, [&](std::size_t i) {
                    const auto d = discriminant(coef, nus[i]);
                    got[i] = {d.delta, d.delta_nu, d.delta_nunu};
                });
                for (int i = 0; i < 200; ++i) {
                    const auto ref = oracle::constant_discriminant(P0, T, nus[i]);
                    e0 = std::max(e0, std::abs(got[i][0] - ref[0]));
                    e12 = std::max({e12, std::abs(got[i][1] - ref[1]), std::abs(got[i][2] - ref[2])});
                }
            }
        os << "max |dDelta| = " << sci(e0) << ", max |dDelta_nu|, |dDelta_nunu| = " << sci(e12);
        return e0 <= 1e-8 && e12 <= 1e-7;
    });

    criterion(2, "Abel invariant", [](std::ostream& os) {
        const auto coef = coefficient(kFig1.c, kFig1.E);
        std::mt19937_64 rng(20240611);
        std::uniform_real_distribution<double> re(-60.0, 2.0), im(-5.0, 5.0);
        double er = 0, ec = 0;
        for (int i = 0; i < 200; ++i) er = std::max(er, std::abs(monodromy(coef, re(rng)).det() - 1.0));
        for (int i = 0; i < 50; ++i) {
            const std::complex<double> nu(re(rng), im(rng));
            ec = std::max(ec, std::abs(monodromy(coef, nu).det() - 1.0));
        }
        os << "max |det - 1| real " << sci(er) << ", complex " << sci(ec);
        return er <= 1e-9 && ec <= 1e-9;
    });

    criterion(3, "periodic point at nu = 0", [](std::ostream& os) {
        double worst = 0;
        for (const auto& f : {kFig1, kFig2}) {
            const double d = std::abs(discriminant(coefficient(f.c, f.E), 0.0).delta - 2.0);
            os << f.name << " |Delta(0) - 2| = " << sci(d) << "  ";
            worst = std::max(worst, d);
        }
        return worst <= 1e-6;
    });

    criterion(4, "harmonic-limit period", [](std::ostream& os) {
        const double c = 1.45;
        const double T = compute_period(Potential::sine_gordon(), {c, 1e-3});
        const double rel = std::abs(T - 2 * pi * std::sqrt(c * c - 1)) / T;
        os << "relative deviation " << sci(rel);
        return rel <= 1e-3;
    });

    criterion(5, "zero-potential F identity", [](std::ostream& os) {
        const double c = 1.45;
        const auto coef = HillCoefficient::constant(2.0, 0.0);
        double worst = 0;
        for (int i = 0; i < 100; ++i) {
            const double nu = -40.0 * (i + 0.5) / 100.0;
            const auto F = extended_F(coef, c, nu);
            if (F.kind != FKind::finite) return false;
            worst = std::max(worst, std::abs(F.value - c * c * nu) / std::abs(c * c * nu));
        }
        const auto hh = scan_hh_points(coef, c, band_structure(coef, -40.0));
        os << "max relative error " << sci(worst) << ", HH points " << hh.points.size();
        return worst <= 1e-9 && hh.points.empty();
    });

    criterion(6, "band edges are not HH points", [](std::ostream& os) {
        bool ok = true;
        for (const auto& f : {kFig1, kFig2}) {
            const auto a = analyse(f.c, f.E);
            double worst_F = 0, nearest = INFINITY;
            std::size_t edges = 0;
            for (const auto& e : a.bands.simple_edges()) {
                if (!(e.nu < -1e-8)) continue;  // nu = 0 itself is always an edge
                ++edges;
                const auto F = extended_F(a.coef, f.c, e.nu);
                worst_F = std::max(worst_F, F.kind == FKind::finite ? std::abs(F.value) : INFINITY);
                for (const auto& p : a.hh.points) nearest = std::min(nearest, std::abs(p.nu_star - e.nu));
            }
            os << f.name << ": " << edges << " edges, max |F| " << sci(worst_F) << ", nearest HH " << sci(nearest)
               << "  ";
            ok = ok && edges > 0 && worst_F <= 1e-6 && nearest > 1e-6;
        }
        return ok;
    });

    criterion(7, "gap positivity and deep asymptotics", [](std::ostream& os) {
        bool ok = true;
        double min_gap = INFINITY;
        for (const auto& f : {kFig1, kFig2}) {
            const auto a = analyse(f.c, f.E);
            const auto* gap = [&]() -> const Gap* {
                for (const auto& g : a.bands.gaps)
                    if (g.lo < 0.0) return &g;
                return nullptr;
            }();
            if (!gap) return false;
            const double hi = std::min(gap->hi, 0.0);
            for (int i = 0; i < 20; ++i) {
                const double nu = gap->lo + (hi - gap->lo) * (i + 0.5) / 20.0;
                min_gap = std::min(min_gap, extended_F(a.coef, f.c, nu).excess());
            }
        }
        ok = min_gap > 0;
        os << "min (F - nu) over 2 x 20 gap probes " << sci(min_gap);

        const double c = kFig1.c, s = c * c - 1;
        const auto coef = coefficient(c, kFig1.E);
        double worst = 0;
        int accepted = 0;
        for (int k = 1; accepted < 5 && k < 50; ++k) {
            const auto probe = asymptotic_check(coef, c, {-100.0 * k / (s * s)});
            if (!probe[0].accepted) continue;
            ++accepted;
            worst = std::max(worst, std::abs(probe[0].ratio - 1.0));
        }
        os << "; max |ratio - 1| over " << accepted << " deep probes " << sci(worst);
        return ok && accepted == 5 && worst <= 0.05;
    });

    criterion(8, "transversality", [](std::ostream& os) {
        double at_hh = 0, off_hh = INFINITY;
        std::size_t n_hh = 0;
        for (const auto& f : {kFig1, kFig2}) {
            const auto a = analyse(f.c, f.E);
            for (const auto& p : a.hh.points) {
                at_hh = std::max(at_hh, p.trans.min_abs());
                ++n_hh;
            }
        }
        // Random in-band probes of the first figure, away from its HH points.
        const auto a = analyse(kFig1.c, kFig1.E);
        std::mt19937_64 rng(7);
        std::uniform_real_distribution<double> u(-40.0, 0.0);
        int probes = 0;
        while (probes < 20) {
            const double nu = u(rng);
            if (!a.bands.band_containing(nu)) continue;
            bool near = false;
            for (const auto& p : a.hh.points) near |= std::abs(p.nu_star - nu) < 0.1;
            if (near) continue;
            off_hh = std::min(off_hh, transversality(a.coef, kFig1.c, nu).min_abs());
            ++probes;
        }
        os << "max min|delta| at " << n_hh << " HH points " << sci(at_hh) << ", min over 20 probes "
           << sci(off_hh);
        return n_hh > 0 && at_hh <= 1e-6 && off_hh > 1e-3;
    });

    criterion(9, "figure reproduction on 512 x 512", [](std::ostream& os) {
        bool ok = true;
        for (const auto& f : {kFig1, kFig2}) {
            const auto t0 = std::chrono::steady_clock::now();
            const auto a = analyse(f.c, f.E);
            const auto sc = trace_spectrum(a.coef, f.c, f.window, 512, 512);
            const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            // Curves attached to the origin (modulational instability) cross
            // at beta ~ 0, which is not an HH point.
            std::vector<double> crossings;
            for (double b : sc.axis_crossings())
                if (b > 2 * sc.dy()) crossings.push_back(b);
            std::vector<double> betas;
            for (const auto& p : a.hh.points)
                if (p.beta <= f.window.im_max) betas.push_back(p.beta);
            std::sort(betas.begin(), betas.end());
            double worst = 0;
            bool matched = crossings.size() == betas.size();
            for (std::size_t k = 0; matched && k < betas.size(); ++k)
                worst = std::max(worst, std::abs(crossings[k] - betas[k]));
            matched = matched && worst <= sc.dy();
            const std::size_t dense = dense_hh_count(a.coef, f.c, a.bands.nu_min_scanned, 1.0 / 160.0);
            os << f.name << ": " << crossings.size() << " crossings vs " << betas.size() << " HH, max gap "
               << sci(worst) << " (cell " << sci(sc.dy()) << "), dense count " << dense << " vs "
               << a.hh.points.size() << ", " << std::lround(secs) << " s  ";
            ok = ok && matched && dense == a.hh.points.size() && secs < 300;
        }
        return ok;
    });

    criterion(10, "corollary consistency on a regression corpus", [](std::ostream& os) {
        struct Entry {
            std::string potential;
            Potential::Params params;
            double c, E;
        };
        const Potential::Params phi4{{"c0", 0}, {"c1", 0}, {"c2", 0.5}, {"c3", 0}, {"c4", -0.25}};
        const Potential::Params quartic{{"c0", 0}, {"c1", 0}, {"c2", 0.5}, {"c3", 0}, {"c4", 0.25}};
        const Potential::Params skew{{"c0", 0}, {"c1", 0}, {"c2", 0.5}, {"c3", 0.3}, {"c4", 0.25}};
        const std::vector<Entry> corpus{
            {"sine_gordon", {}, 1.45, 6.0},  {"sine_gordon", {}, 1.2, 3.0},   {"sine_gordon", {}, 2.0, 2.5},
            {"sine_gordon", {}, 1.4, 1.5},   {"sine_gordon", {}, 1.45, 1.0},  {"sine_gordon", {}, 1.2, 0.5},
            {"sine_gordon", {}, 2.0, 1.9},   {"sine_gordon", {}, 0.5, 1.0},   {"sine_gordon", {}, 0.8, 1.5},
            {"sine_gordon", {}, 0.3, 0.2},   {"sine_gordon", {}, 0.5, -0.5},  {"sine_gordon", {}, 0.7, -2.0},
            {"polynomial", phi4, 1.3, 0.1},  {"polynomial", phi4, 0.6, -0.1}, {"polynomial", quartic, 1.5, 1.0},
            {"polynomial", skew, 1.2, 0.2},
        };
        const auto dir = std::filesystem::temp_directory_path() / "kghopf_acceptance_corpus";
        std::size_t fired = 0, bad = 0, sub = 0, super = 0, lib = 0, rot = 0;
        for (const auto& e : corpus) {
            cli::RunConfig cfg;
            cfg.potential = e.potential;
            cfg.potential_params = e.params;
            cfg.c = e.c;
            cfg.E = e.E;
            cfg.out_dir = dir;
            std::ostringstream log;
            const int code = cli::cmd_analyze(cfg, log);
            (e.c > 1 ? super : sub)++;
            const auto regime = classify_regime(Potential::from_name(e.potential, e.params), {e.c, e.E});
            (regime == Regime::librational ? lib : rot)++;
            if (code == 0) {
                std::ifstream is(dir / "report.json");
                const auto report = nlohmann::json::parse(is);
                for (const char* key : {"C2", "C3", "C4"}) {
                    const auto outcome = report["corollaries"][key]["outcome"].get<std::string>();
                    if (outcome == "satisfied") ++fired;
                }
            }
            if (code != 0) {
                ++bad;
                os << "[" << e.potential << " c=" << e.c << " E=" << e.E << " exit " << code << "] ";
            }
        }
        os << corpus.size() << " waves (" << sub << " sub/" << super << " superluminal, " << lib << " lib/" << rot
           << " rot), " << fired << " corollary predicates fired and satisfied, " << bad << " inconsistent";
        return bad == 0 && corpus.size() >= 10 && sub > 0 && super > 0 && lib > 0 && rot > 0 && fired > 0;
    });

    criterion(11, "determinism", [](std::ostream& os) {
        cli::RunConfig cfg;
        cfg.c = kFig2.c;
        cfg.E = kFig2.E;
        cfg.curve_samples = 1000;
        set_thread_count(0);
        const auto a1 = cli::analyze(cfg).json;
        const auto c1 = cli::curve_csv(cfg);
        set_thread_count(1);
        const auto a2 = cli::analyze(cfg).json;
        const auto c2 = cli::curve_csv(cfg);
        set_thread_count(0);
        os << "report " << a1.size() << " bytes, curve " << c1.size() << " bytes";
        return a1 == a2 && c1 == c2;
    });

    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
    return failures == 0 ? 0 : 1;
}
