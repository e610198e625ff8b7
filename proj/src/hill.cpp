#include "kghopf/hill.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/tools/roots.hpp>

#include "kghopf/errors.hpp"
#include "kghopf/parallel.hpp"
#include "ode.hpp"

namespace kghopf {
namespace {

inline double real_part(double x) { return x; }
inline double real_part(std::complex<double> x) { return x.real(); }

// State layout per column: y, y', then (Order >= 1) y_nu, y_nu', then
// (Order == 2) y_nunu, y_nunu'.  Wave coefficients append f, f'.
template <class Scalar, int Order, bool Wave>
struct HillSystem {
    static constexpr int kPerColumn = 2 * (Order + 1);
    static constexpr int kSize = 2 * kPerColumn + (Wave ? 2 : 0);
    using State = std::array<Scalar, kSize>;

    const HillCoefficient& coef;
    Scalar nu;

    void operator()(const State& s, State& d, double z) const {
        double P;
        if constexpr (Wave) {
            const auto& seed = *coef.seed();
            const auto v = seed.potential.eval_unchecked(real_part(s[2 * kPerColumn]));
            P = v.Vpp / seed.c2m1;
            d[2 * kPerColumn] = s[2 * kPerColumn + 1];
            d[2 * kPerColumn + 1] = Scalar(-v.Vp / seed.c2m1);
        } else {
            P = coef(z);
        }
        const Scalar q = nu - P;
        for (int col = 0; col < 2; ++col) {
            const int o = col * kPerColumn;
            d[o] = s[o + 1];
            d[o + 1] = q * s[o];
            if constexpr (Order >= 1) {
                d[o + 2] = s[o + 3];
                d[o + 3] = q * s[o + 2] + s[o];
            }
            if constexpr (Order >= 2) {
                d[o + 4] = s[o + 5];
                d[o + 5] = q * s[o + 4] + Scalar(2) * s[o + 2];
            }
        }
    }

    State initial() const {
        State s{};
        s[0] = Scalar(1);                   // y1(0) = 1
        s[kPerColumn + 1] = Scalar(1);      // y2'(0) = 1
        if constexpr (Wave) {
            s[2 * kPerColumn] = Scalar(coef.seed()->f0);
            s[2 * kPerColumn + 1] = Scalar(coef.seed()->fp0);
        }
        return s;
    }
};

template <class Scalar, int Order, bool Wave>
MonodromyResult<Scalar> run(const HillCoefficient& coef, Scalar nu, const HillOptions& opt) {
    using Sys = HillSystem<Scalar, Order, Wave>;
    Sys sys{coef, nu};
    auto s = sys.initial();
    detail::integrate_rk78(sys, s, 0.0, coef.period(), opt.rtol, opt.atol, "Hill monodromy");
    constexpr int K = Sys::kPerColumn;
    MonodromyResult<Scalar> r;
    r.nu = nu;
    for (int k = 0; k <= Order; ++k) {
        auto& dst = k == 0 ? r.M : (k == 1 ? r.dM : r.d2M);
        dst = {s[2 * k], s[K + 2 * k], s[2 * k + 1], s[K + 2 * k + 1]};
    }
    r.delta = r.M[0] + r.M[3];
    r.delta_nu = r.dM[0] + r.dM[3];
    r.delta_nunu = r.d2M[0] + r.d2M[3];
    return r;
}

template <class Scalar, int Order>
MonodromyResult<Scalar> dispatch(const HillCoefficient& coef, Scalar nu, const HillOptions& opt) {
    if (!detail::finite(nu)) throw DomainError("monodromy requested at non-finite nu");
    if (coef.seed()) return run<Scalar, Order, true>(coef, nu, opt);
    return run<Scalar, Order, false>(coef, nu, opt);
}

}  // namespace

RealMonodromy monodromy(const HillCoefficient& coef, double nu, const HillOptions& opt) {
    return dispatch<double, 2>(coef, nu, opt);
}

ComplexMonodromy monodromy(const HillCoefficient& coef, std::complex<double> nu, const HillOptions& opt) {
    return dispatch<std::complex<double>, 2>(coef, nu, opt);
}

std::array<std::complex<double>, 4> monodromy_matrix(const HillCoefficient& coef, std::complex<double> nu,
                                                     const HillOptions& opt) {
    return dispatch<std::complex<double>, 0>(coef, nu, opt).M;
}

Discriminant discriminant(const HillCoefficient& coef, double nu, const HillOptions& opt) {
    const auto m = monodromy(coef, nu, opt);
    return {m.delta, m.delta_nu, m.delta_nunu, m.disc()};
}

std::optional<std::size_t> BandStructure::band_containing(double nu, double tol) const {
    for (std::size_t i = 0; i < bands.size(); ++i)
        if (bands[i].contains(nu, tol)) return i;
    return std::nullopt;
}

std::vector<BandEdge> BandStructure::simple_edges() const {
    std::vector<BandEdge> out;
    for (const auto& b : bands)
        for (const auto* e : {&b.lower, &b.upper})
            if (e->multiplicity == Multiplicity::simple &&
                (out.empty() || out.back().nu != e->nu))
                out.push_back(*e);
    return out;
}

std::vector<BandEdge> BandStructure::double_points() const {
    std::vector<BandEdge> out;
    for (std::size_t i = 0; i + 1 < bands.size(); ++i)
        if (bands[i].upper.multiplicity == Multiplicity::double_point) out.push_back(bands[i].upper);
    return out;
}

std::vector<double> sqrt_grid(double nu_lo, double nu_hi, double step) {
    if (!(nu_hi > nu_lo) || !(step > 0.0)) throw ConfigError("invalid scan window");
    auto to_tau = [](double nu) { return std::copysign(std::sqrt(std::abs(nu)), nu); };
    const double t0 = to_tau(nu_lo), t1 = to_tau(nu_hi);
    const auto n = static_cast<std::size_t>(std::ceil((t1 - t0) / step));
    std::vector<double> grid(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        const double t = i == n ? t1 : t0 + double(i) * (t1 - t0) / double(n);
        grid[i] = i == 0 ? nu_lo : (i == n ? nu_hi : t * std::abs(t));
    }
    return grid;
}

namespace {

double solve(const std::function<double(double)>& g, double a, double b, double ga, double gb, double tol) {
    if (ga == 0.0) return a;
    if (gb == 0.0) return b;
    std::uintmax_t iters = 200;
    auto stop = [tol](double x, double y) { return std::abs(x - y) <= tol * (1.0 + std::abs(x)); };
    auto r = boost::math::tools::toms748_solve(g, a, b, ga, gb, stop, iters);
    return 0.5 * (r.first + r.second);
}

EdgeKind kind_for(double target) { return target > 0 ? EdgeKind::periodic : EdgeKind::antiperiodic; }

}  // namespace

BandStructure band_structure(const HillCoefficient& coef, double nu_min, const BandOptions& opt) {
    const double T = coef.period();
    const double nu_hi = coef.max_value() + 1.0;
    if (!std::isfinite(nu_min) || nu_min >= nu_hi)
        throw ConfigError("nu_min must lie below max P + 1");
    const double step = opt.step_fraction * std::numbers::pi / T;
    const auto grid = sqrt_grid(nu_min, nu_hi, step);

    std::vector<Discriminant> vals(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) { vals[i] = discriminant(coef, grid[i], opt.hill); });

    auto dnu = [&](double nu) { return discriminant(coef, nu, opt.hill).delta_nu; };

    // Critical points: sign changes of Delta_nu between neighbouring nodes.
    std::vector<std::size_t> cells;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i)
        if ((vals[i].delta_nu > 0.0) != (vals[i + 1].delta_nu > 0.0) || vals[i + 1].delta_nu == 0.0)
            cells.push_back(i);
    std::vector<double> crit(cells.size());
    parallel_for(cells.size(), [&](std::size_t k) {
        const std::size_t i = cells[k];
        crit[k] = solve(dnu, grid[i], grid[i + 1], vals[i].delta_nu, vals[i + 1].delta_nu, opt.root_tol);
    });
    crit.erase(std::unique(crit.begin(), crit.end()), crit.end());
    std::vector<Discriminant> crit_vals(crit.size());
    parallel_for(crit.size(), [&](std::size_t k) { crit_vals[k] = discriminant(coef, crit[k], opt.hill); });

    for (std::size_t k = 0; k + 1 < crit.size(); ++k) {
        if ((crit_vals[k].delta > 0.0) == (crit_vals[k + 1].delta > 0.0)) {
            std::ostringstream os;
            os << "critical values of the discriminant near nu = " << crit[k] << " and " << crit[k + 1]
               << " do not alternate; refine the scan step (step_fraction < " << opt.step_fraction << ")";
            throw ScanResolutionError(os.str());
        }
    }

    // Breakpoints split the window into intervals where Delta is monotone.
    struct Point {
        double nu;
        Discriminant d;
        bool is_double;
    };
    std::vector<Point> pts;
    pts.push_back({grid.front(), vals.front(), false});
    for (std::size_t k = 0; k < crit.size(); ++k) {
        Point p{crit[k], crit_vals[k], std::abs(crit_vals[k].disc) <= opt.double_tol};
        if (p.is_double) p.d.delta = std::copysign(2.0, p.d.delta);
        if (p.nu > pts.back().nu && p.nu < grid.back()) pts.push_back(p);
    }
    pts.push_back({grid.back(), vals.back(), false});

    std::vector<BandEdge> edges;
    auto delta_at = [&](double nu) { return discriminant(coef, nu, opt.hill).delta; };
    for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
        const auto& a = pts[k];
        const auto& b = pts[k + 1];
        if (a.is_double) {
            BandEdge e;
            e.nu = a.nu;
            e.kind = kind_for(a.d.delta);
            e.multiplicity = Multiplicity::double_point;
            e.values = crit_vals[std::size_t(std::find(crit.begin(), crit.end(), a.nu) - crit.begin())];
            edges.push_back(e);
        }
        for (double target : {-2.0, 2.0}) {
            const double ga = a.d.delta - target, gb = b.d.delta - target;
            if (ga == 0.0 || gb == 0.0 || (ga > 0.0) == (gb > 0.0)) continue;
            const double r = solve([&](double nu) { return delta_at(nu) - target; }, a.nu, b.nu, ga, gb,
                                   opt.root_tol);
            BandEdge e;
            e.nu = r;
            e.kind = kind_for(target);
            e.multiplicity = Multiplicity::simple;
            edges.push_back(e);
        }
    }
    std::sort(edges.begin(), edges.end(), [](const BandEdge& x, const BandEdge& y) { return x.nu < y.nu; });
    parallel_for(edges.size(), [&](std::size_t i) {
        if (edges[i].multiplicity == Multiplicity::simple) edges[i].values = discriminant(coef, edges[i].nu, opt.hill);
    });

    BandStructure bs;
    bs.nu_min_scanned = grid.front();
    bs.nu_max_scanned = grid.back();
    bs.critical_points = crit;

    bool inside = std::abs(vals.front().delta) <= 2.0;
    BandEdge open;
    open.nu = grid.front();
    open.kind = EdgeKind::scan_boundary;
    open.values = vals.front();
    double gap_lo = grid.front();
    bool gap_truncated = true;
    for (const auto& e : edges) {
        if (e.multiplicity == Multiplicity::double_point) {
            if (!inside) {
                // A closed gap can only sit inside the spectrum; treat it as a
                // degenerate band touching point.
                inside = true;
                open = e;
                continue;
            }
            bs.bands.push_back({open, e});
            open = e;
            continue;
        }
        if (inside) {
            bs.bands.push_back({open, e});
            gap_lo = e.nu;
            gap_truncated = false;
        } else {
            open = e;
            if (e.nu > gap_lo || gap_truncated) bs.gaps.push_back({gap_lo, e.nu, gap_truncated, 0.0});
        }
        inside = !inside;
    }
    if (inside) throw ScanResolutionError("scan window ends inside a band; the upper scan bound is too low");

    // The final "gap" above nu_max is the unbounded tail, not a gap.
    bs.nu_max = bs.bands.empty() ? nu_min : bs.bands.back().upper.nu;
    for (auto& g : bs.gaps) {
        for (double c : crit)
            if (c > g.lo && c < g.hi) g.critical_nu = c;
        if (g.truncated && g.critical_nu == 0.0) g.critical_nu = g.lo;
    }
    return bs;
}

}  // namespace kghopf
