#include "kghopf/hh_criterion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "kghopf/errors.hpp"
#include "kghopf/parallel.hpp"

namespace kghopf {

std::complex<double> nu_of_lambda(std::complex<double> lambda, double c) {
    const double c2m1 = c * c - 1.0;
    if (std::abs(c2m1) <= 1e-12) throw ConfigError("nu(lambda) undefined at c^2 = 1");
    const auto r = lambda / c2m1;
    return r * r;
}

std::complex<double> lambda_of_nu(double nu, double c) {
    const double c2m1 = c * c - 1.0;
    if (std::abs(c2m1) <= 1e-12) throw ConfigError("lambda(nu) undefined at c^2 = 1");
    if (!(nu < 0.0)) throw DomainError("lambda(nu) needs nu < 0 to land on the imaginary axis");
    return {0.0, std::abs(c2m1) * std::sqrt(-nu)};
}

double ExtendedFValue::excess() const {
    switch (kind) {
        case FKind::plus_infinity: return std::numeric_limits<double>::infinity();
        case FKind::minus_infinity: return -std::numeric_limits<double>::infinity();
        case FKind::finite: break;
    }
    return value - nu;
}

double ExtendedFValue::g() const { return std::tanh(excess()); }

std::string to_string(const ExtendedFValue& v) {
    if (v.kind == FKind::plus_infinity) return "+inf";
    if (v.kind == FKind::minus_infinity) return "-inf";
    return v.regularized ? "regularized" : "finite";
}

ExtendedFValue extended_F(const Discriminant& d, double nu, double T, double c, const CriterionOptions& opt) {
    const double c2T2 = c * c * T * T;
    ExtendedFValue out;
    out.nu = nu;
    if (std::abs(d.delta_nu) > opt.crit_tol * (1.0 + std::abs(nu))) {
        // -(4 - Delta^2) = Delta^2 - 4 = disc.
        out.value = c2T2 * d.disc / (4.0 * d.delta_nu * d.delta_nu);
        return out;
    }
    if (std::abs(d.disc) > opt.double_tol) {
        out.kind = d.disc > 0.0 ? FKind::plus_infinity : FKind::minus_infinity;
        return out;
    }
    if (std::abs(d.delta_nunu) <= opt.crit_tol * (1.0 + std::abs(nu)))
        throw DegenerateDiscriminantError("Delta_nu and Delta_nunu both vanish at nu = " + std::to_string(nu));
    // Double point: Delta ~ s(2 + a e^2 / 2) with s = sgn Delta and a s < 0, so
    // Delta^2 - 4 ~ 2 s a e^2 and Delta_nu ~ a e; the ratio tends to s / (2 a).
    out.value = c2T2 * std::copysign(1.0, d.delta) / (2.0 * d.delta_nunu);
    out.regularized = true;
    return out;
}

ExtendedFValue extended_F(const HillCoefficient& coef, double c, double nu, const CriterionOptions& opt) {
    return extended_F(discriminant(coef, nu, opt.hill), nu, coef.period(), c, opt);
}

double TransversalityData::min_abs() const {
    if (double_point) return std::min(std::abs(delta_hat_plus), std::abs(delta_hat_minus));
    return std::min(std::abs(delta_plus), std::abs(delta_minus));
}

TransversalityData transversality(const Discriminant& d, double nu, double T, double c) {
    const double c2m1 = c * c - 1.0;
    const double beta = std::abs(c2m1) * std::sqrt(std::max(0.0, -nu));
    const double base = c * T / c2m1;
    TransversalityData t;
    t.t0 = d.delta;
    t.t1 = 2.0 * beta / (c2m1 * c2m1) * d.delta_nu;
    t.theta0 = std::acos(std::clamp(0.5 * d.delta, -1.0, 1.0));
    const double root = std::sqrt(std::max(0.0, -d.disc));  // sqrt(4 - t0^2)
    if (root > 0.0) {
        t.delta_plus = base + t.t1 / root;
        t.delta_minus = base - t.t1 / root;
    } else {
        t.delta_plus = std::numeric_limits<double>::infinity();
        t.delta_minus = -std::numeric_limits<double>::infinity();
    }
    // Second-order data; meaningful only at a double point where
    // Delta_nunu has the sign opposite to Delta.
    const double s = std::copysign(1.0, d.delta);
    t.t2 = beta / (c2m1 * c2m1) * std::sqrt(std::max(0.0, -2.0 * s * d.delta_nunu));
    t.delta_hat_plus = base + t.t2;
    t.delta_hat_minus = base - t.t2;
    return t;
}

TransversalityData transversality(const HillCoefficient& coef, double c, double nu, const CriterionOptions& opt) {
    return transversality(discriminant(coef, nu, opt.hill), nu, coef.period(), c);
}

double default_nu_min(double T) { return -std::pow(40.0 / T, 2); }

namespace {

struct Sample {
    double nu;
    Discriminant d;
    ExtendedFValue F;
};

Sample sample_at(const HillCoefficient& coef, double c, double nu, const CriterionOptions& opt) {
    Sample s{nu, discriminant(coef, nu, opt.hill), {}};
    s.F = extended_F(s.d, nu, coef.period(), c, opt);
    return s;
}

// Illinois false position on tanh(F - nu), with bisection whenever either
// bracket end is saturated.
Sample refine(const HillCoefficient& coef, double c, Sample a, Sample b, const ScanOptions& opt,
              std::size_t& evals) {
    double ga = a.F.g(), gb = b.F.g();
    Sample best = std::abs(a.F.excess()) < std::abs(b.F.excess()) ? a : b;
    int side = 0;
    for (int it = 0; it < 200; ++it) {
        double x;
        const bool saturated = std::abs(ga) >= 1.0 - 1e-12 || std::abs(gb) >= 1.0 - 1e-12;
        if (saturated || it % 8 == 7) {
            x = 0.5 * (a.nu + b.nu);
        } else {
            x = (a.nu * gb - b.nu * ga) / (gb - ga);
            if (!(x > a.nu && x < b.nu)) x = 0.5 * (a.nu + b.nu);
        }
        Sample m = sample_at(coef, c, x, opt.criterion);
        ++evals;
        const double h = m.F.excess();
        if (std::abs(h) < std::abs(best.F.excess())) best = m;
        if (std::abs(h) <= opt.residual_tol * (1.0 + std::abs(x))) return m;
        const double gm = m.F.g();
        if ((gm > 0.0) == (ga > 0.0)) {
            a = m;
            ga = gm;
            if (side == -1) gb *= 0.5;
            side = -1;
        } else {
            b = m;
            gb = gm;
            if (side == 1) ga *= 0.5;
            side = 1;
        }
        if (b.nu - a.nu <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(x)) break;
    }
    return best;
}

}  // namespace

HHScan scan_hh_points(const HillCoefficient& coef, double c, const BandStructure& bands, const ScanOptions& opt) {
    const double T = coef.period();
    const double nu_min = bands.nu_min_scanned;
    if (!(nu_min < 0.0)) throw ConfigError("HH scan needs nu_min < 0");
    HHScan out;

    auto nodes = sqrt_grid(nu_min, 0.0, opt.step_fraction * std::numbers::pi / T);
    nodes.pop_back();  // nu = 0 is excluded: lambda must be nonzero
    for (const auto& b : bands.bands)
        for (const auto* e : {&b.lower, &b.upper})
            if (e->nu < 0.0 && e->kind != EdgeKind::scan_boundary) nodes.push_back(e->nu);
    for (const auto& g : bands.gaps)
        if (g.critical_nu < 0.0 && g.critical_nu > nu_min) nodes.push_back(g.critical_nu);
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end(),
                            [](double x, double y) { return std::abs(x - y) <= 1e-14 * (1.0 + std::abs(x)); }),
                nodes.end());

    std::vector<Sample> samples(nodes.size());
    parallel_for(nodes.size(), [&](std::size_t i) { samples[i] = sample_at(coef, c, nodes[i], opt.criterion); });
    out.evaluations = nodes.size();

    std::size_t run = 0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (samples[i].F.g() == 1.0) {
            ++run;
        } else {
            if (run > opt.saturation_run) {
                std::ostringstream os;
                os << "tanh(F - nu) saturated over " << run << " consecutive nodes ending near nu = "
                   << samples[i].nu << "; roots of even order there are invisible to the sign scan";
                out.warnings.push_back(os.str());
            }
            run = 0;
        }
    }

    std::vector<std::pair<std::size_t, Sample>> roots;
    std::vector<std::size_t> brackets;
    for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
        const double ha = samples[i].F.excess(), hb = samples[i + 1].F.excess();
        if (ha == 0.0) roots.push_back({i, samples[i]});
        else if (hb != 0.0 && (ha > 0.0) != (hb > 0.0)) brackets.push_back(i);
    }
    std::vector<Sample> refined(brackets.size());
    std::vector<std::size_t> evals(brackets.size(), 0);
    parallel_for(brackets.size(), [&](std::size_t k) {
        const std::size_t i = brackets[k];
        refined[k] = refine(coef, c, samples[i], samples[i + 1], opt, evals[k]);
    });
    for (std::size_t k = 0; k < brackets.size(); ++k) {
        roots.push_back({brackets[k], refined[k]});
        out.evaluations += evals[k];
    }
    std::sort(roots.begin(), roots.end(), [](const auto& x, const auto& y) { return x.second.nu < y.second.nu; });

    for (const auto& [i, s] : roots) {
        HHPoint p;
        p.nu_star = s.nu;
        p.beta = std::abs(c * c - 1.0) * std::sqrt(-s.nu);
        p.residual = std::abs(s.F.excess());
        p.trans = transversality(s.d, s.nu, T, c);
        p.trans.double_point = s.F.regularized;
        auto band = bands.band_containing(s.nu, 1e-9 * (1.0 + std::abs(s.nu)));
        if (!band) {
            std::ostringstream os;
            os << "root of F - nu at nu = " << s.nu << " lies outside every band (|Delta| = "
               << std::abs(s.d.delta) << "); discarded";
            out.warnings.push_back(os.str());
            continue;
        }
        p.band_index = *band;
        if (p.residual > opt.residual_tol * (1.0 + std::abs(s.nu))) {
            std::ostringstream os;
            os << "root near nu = " << s.nu << " refined only to residual " << p.residual;
            out.warnings.push_back(os.str());
        }
        out.points.push_back(p);
    }
    return out;
}

Indices indices_from(double delta0, double delta_nu0, double delta_nunu0, double T, double c,
                     const CriterionOptions& opt) {
    Indices idx;
    idx.delta_at_0 = delta0;
    idx.delta_nu_at_0 = delta_nu0;
    idx.delta_nunu_at_0 = delta_nunu0;
    const double c2T2 = c * c * T * T;
    auto sgn = [](double x) { return (x > 0.0) - (x < 0.0); };
    idx.gamma_M_zero = std::abs(delta_nu0) <= opt.crit_tol;
    idx.gamma_M = idx.gamma_M_zero ? 0 : sgn(delta_nu0);
    const double curvature = c2T2 - delta_nu0;
    idx.degenerate = std::abs(curvature) <= opt.crit_tol * (1.0 + c2T2);
    idx.evans_curvature_sign = idx.degenerate ? 0 : sgn(curvature);
    idx.gamma_P = idx.degenerate ? 0 : sgn(c * c - 1.0) * idx.evans_curvature_sign;
    return idx;
}

Indices compute_indices(const HillCoefficient& coef, double c, const CriterionOptions& opt) {
    const auto d = discriminant(coef, 0.0, opt.hill);
    if (std::abs(d.delta - 2.0) > 1e-6) {
        std::ostringstream os;
        os << "Delta(0) = " << d.delta << " differs from 2; coefficient does not come from a periodic wave";
        throw NotAWaveError(os.str());
    }
    return indices_from(d.delta, d.delta_nu, d.delta_nunu, coef.period(), c, opt);
}

std::string to_string(Outcome o) {
    switch (o) {
        case Outcome::not_fired: return "not_fired";
        case Outcome::satisfied: return "satisfied";
        case Outcome::violated: return "violated";
        case Outcome::inconclusive: return "inconclusive";
    }
    return "?";
}

bool CorollaryReport::consistent() const {
    return c2 != Outcome::violated && c3 != Outcome::violated && c4 != Outcome::violated;
}

double default_c4_depth(double T) { return -std::pow(4.0 * std::numbers::pi / T, 2); }

CorollaryReport corollary_report(const Indices& idx, const BandStructure& bands, double c,
                                 const std::vector<HHPoint>& hh, double c4_depth) {
    CorollaryReport r;
    r.c4_depth = c4_depth;
    const int product = idx.gamma_M * idx.gamma_P;
    const bool found = !hh.empty();
    const bool superluminal = c * c > 1.0;
    if (!idx.degenerate && product == -1) r.c2 = found ? Outcome::satisfied : Outcome::violated;

    bool negative_gap = false;
    for (const auto& g : bands.gaps)
        if (g.hi <= 0.0) negative_gap = true;
    if (!idx.degenerate && product == 1 && negative_gap && superluminal)
        r.c3 = found ? Outcome::satisfied : Outcome::violated;

    if (!superluminal) return r;
    bool any_satisfied = false, any_violated = false;
    for (const auto& g : bands.gaps) {
        if (g.hi >= 0.0) continue;
        GapCheck chk;
        chk.gap = g;
        std::optional<std::size_t> below, above;
        for (std::size_t b = 0; b < bands.bands.size(); ++b) {
            if (bands.bands[b].upper.nu == g.lo) below = b;
            if (bands.bands[b].lower.nu == g.hi) above = b;
        }
        for (const auto& p : hh) {
            if (below && p.band_index == *below) ++chk.hh_below;
            if (above && p.band_index == *above) ++chk.hh_above;
        }
        if (g.hi > c4_depth) {
            chk.outcome = Outcome::inconclusive;
        } else if (chk.hh_below >= 1 && chk.hh_above >= 1) {
            chk.outcome = Outcome::satisfied;
        } else if (g.truncated || !below || bands.bands[*below].lower.kind == EdgeKind::scan_boundary) {
            // The band below runs off the scan window; its root may lie beyond.
            chk.outcome = chk.hh_above >= 1 ? Outcome::inconclusive : Outcome::violated;
        } else {
            chk.outcome = Outcome::violated;
        }
        any_satisfied |= chk.outcome == Outcome::satisfied;
        any_violated |= chk.outcome == Outcome::violated;
        r.gaps.push_back(chk);
    }
    if (any_violated) r.c4 = Outcome::violated;
    else if (any_satisfied) r.c4 = Outcome::satisfied;
    else if (!r.gaps.empty()) r.c4 = Outcome::inconclusive;
    return r;
}

std::vector<AsymptoticProbe> asymptotic_check(const HillCoefficient& coef, double c, const std::vector<double>& probes,
                                              const CriterionOptions& opt) {
    std::vector<AsymptoticProbe> out(probes.size());
    const double T = coef.period();
    parallel_for(probes.size(), [&](std::size_t i) {
        auto& p = out[i];
        p.nu = probes[i];
        if (!(p.nu < 0.0)) return;
        p.accepted = std::abs(std::sin(T * std::sqrt(-p.nu))) > 0.3;
        if (!p.accepted) return;
        const auto F = extended_F(coef, c, p.nu, opt);
        p.excess = F.excess();
        p.ratio = p.excess / ((c * c - 1.0) * p.nu);
    });
    return out;
}

double SmallNuCheck::relative_error() const {
    return std::abs(measured - predicted) / std::max(std::abs(predicted), 1e-300);
}

SmallNuCheck small_nu_check(const HillCoefficient& coef, double c, const CriterionOptions& opt) {
    const double T = coef.period();
    const double c2T2 = c * c * T * T;
    const auto d0 = discriminant(coef, 0.0, opt.hill);
    SmallNuCheck chk;
    const std::array<double, 3> nus{-1e-3 / (T * T), -2e-3 / (T * T), -4e-3 / (T * T)};
    std::array<double, 3> h{};
    for (std::size_t k = 0; k < 3; ++k) h[k] = extended_F(coef, c, nus[k], opt).excess();
    // Quadratic Lagrange extrapolation of samples y_k at nus[k] to nu = 0.
    auto extrapolate = [&](const std::array<double, 3>& y) {
        double acc = 0.0;
        for (std::size_t i = 0; i < 3; ++i) {
            double w = 1.0;
            for (std::size_t j = 0; j < 3; ++j)
                if (j != i) w *= (0.0 - nus[j]) / (nus[i] - nus[j]);
            acc += w * y[i];
        }
        return acc;
    };
    if (std::abs(d0.delta_nu) > opt.crit_tol) {
        chk.branch = 1;
        chk.predicted = (c2T2 - d0.delta_nu) / d0.delta_nu;
        std::array<double, 3> slopes{};
        for (std::size_t k = 0; k < 3; ++k) slopes[k] = h[k] / nus[k];
        chk.measured = extrapolate(slopes);
        return chk;
    }
    if (d0.delta_nunu >= 0.0)
        throw InconsistentTheoryError("Delta_nu(0) = 0 but Delta_nunu(0) >= 0; a Hill discriminant cannot do this");
    chk.branch = 2;
    chk.predicted = c2T2 / (2.0 * d0.delta_nunu);
    chk.measured = extrapolate(h);
    return chk;
}

}  // namespace kghopf
