#include "kghopf/waveform.hpp"

#include <algorithm>
#include <cmath>
#include <vector>
#include <limits>
#include <memory>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include "kghopf/errors.hpp"
#include "ode.hpp"

namespace kghopf {

void WaveParameters::validate() const {
    if (!std::isfinite(c) || !std::isfinite(E)) throw ConfigError("wave parameters must be finite");
    if (std::abs(c * c - 1.0) <= 1e-12)
        throw ConfigError("wave speed c = " + std::to_string(c) + " is luminal (c^2 = 1)");
}

std::string to_string(Regime r) { return r == Regime::librational ? "librational" : "rotational"; }

namespace {

constexpr double kCriticalTol = 1e-10;  // relative, for E against critical values

// Effective potential U = sign * V.
struct Effective {
    const Potential& pot;
    double sign;
    double U(double u) const { return sign * pot.eval(u).V; }
    double dU(double u) const { return sign * pot.eval(u).Vp; }
};

double refine_root(const std::function<double(double)>& g, double a, double b) {
    double ga = g(a), gb = g(b);
    if (ga == 0.0) return a;
    if (gb == 0.0) return b;
    std::uintmax_t iters = 200;
    auto r = boost::math::tools::toms748_solve(g, a, b, ga, gb,
                                               boost::math::tools::eps_tolerance<double>(52), iters);
    return 0.5 * (r.first + r.second);
}

double refine_minimum(const Effective& eff, double a, double b) {
    auto r = boost::math::tools::brent_find_minima([&](double u) { return eff.U(u); }, a, b, 52);
    // Polish on U' = 0 when a sign change is available; brent only gives ~sqrt(eps).
    const double h = 1e-6 * (1.0 + std::abs(r.first));
    const double lo = r.first - h, hi = r.first + h;
    if (eff.dU(lo) < 0.0 && eff.dU(hi) > 0.0)
        return refine_root([&](double u) { return eff.dU(u); }, lo, hi);
    return r.first;
}

double find_center(const Effective& eff, const WaveOptions& opt) {
    const auto period = eff.pot.period();
    if (opt.well) {
        // Walk downhill from the seed, then polish.
        double x = *opt.well;
        const double h = 1e-2;
        const double dir = eff.dU(x) > 0.0 ? -1.0 : 1.0;
        double ux = eff.U(x);
        for (int k = 0; k < 1'000'000; ++k) {
            const double next = eff.U(x + dir * h);
            if (next >= ux) return refine_minimum(eff, x - h, x + h);
            x += dir * h;
            ux = next;
        }
        throw NoOrbitError("effective potential has no well below the seed", false);
    }
    const double lo = period ? 0.0 : -10.0;
    const double hi = period ? *period : 10.0;
    const int n = period ? 1024 : 4000;
    const double h = (hi - lo) / n;
    std::vector<double> U(n + 1);
    for (int i = 0; i <= n; ++i) U[i] = eff.U(lo + i * h);
    // Periodic: global minimum.  Otherwise the lowest interior local minimum,
    // since U may fall away without bound outside a well.
    int best = -1;
    for (int i = period ? 0 : 1; i < n; ++i) {
        if (!period && !(U[i] <= U[i - 1] && U[i] <= U[i + 1])) continue;
        if (best < 0 || U[i] < U[best]) best = i;
    }
    if (best < 0) throw NoOrbitError("effective potential has no interior minimum in [-10, 10]", false);
    const double x = lo + best * h;
    return refine_minimum(eff, x - h, x + h);
}

// March outward from the center until U reaches the energy.  A local maximum
// of U at the energy level is a separatrix.
double find_turning_point(const Effective& eff, double center, double energy, double dir) {
    double h = 1e-2;
    double x = center;
    double dprev = eff.dU(x) * dir;
    const double tol = kCriticalTol * (1.0 + std::abs(energy));
    for (int k = 0; k < 100000 && std::abs(x - center) < 1e6; ++k) {
        const double xn = x + dir * h;
        const double un = eff.U(xn);
        const double dn = eff.dU(xn) * dir;
        if (dprev > 0.0 && dn <= 0.0) {
            // Local maximum between x and xn (along the march direction).
            const double a = std::min(x, xn), b = std::max(x, xn);
            const double m = refine_root([&](double u) { return eff.dU(u); }, a, b);
            if (std::abs(eff.U(m) - energy) <= tol)
                throw NoOrbitError("energy equals a critical value of the effective potential (separatrix)",
                                   true);
            if (eff.U(m) > energy) {
                const double lo = dir > 0 ? x : m, hi = dir > 0 ? m : x;
                return refine_root([&](double u) { return eff.U(u) - energy; }, lo, hi);
            }
        }
        if (un >= energy) {
            const double a = std::min(x, xn), b = std::max(x, xn);
            return refine_root([&](double u) { return eff.U(u) - energy; }, a, b);
        }
        x = xn;
        dprev = dn;
        h = std::min(h * 1.02, 0.25);
    }
    throw NoOrbitError("orbit is unbounded: no turning point found", false);
}

double max_over_period(const Effective& eff, double period) {
    const int n = 1024;
    const double h = period / n;
    int best = 0;
    double ubest = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        const double u = eff.U(i * h);
        if (u > ubest) {
            ubest = u;
            best = i;
        }
    }
    const double x = best * h;
    auto r = boost::math::tools::brent_find_minima([&](double u) { return -eff.U(u); }, x - h, x + h, 52);
    return std::max(ubest, -r.second);
}

}  // namespace

OrbitGeometry locate_orbit(const Potential& p, const WaveParameters& w, const WaveOptions& opt) {
    w.validate();
    OrbitGeometry g;
    g.sign = w.c2m1() > 0.0 ? 1.0 : -1.0;
    g.energy = g.sign * w.E;
    const Effective eff{p, g.sign};
    g.center = find_center(eff, opt);
    const double umin = eff.U(g.center);
    const double tol = kCriticalTol * (1.0 + std::abs(g.energy));
    if (g.energy <= umin + tol) {
        if (std::abs(g.energy - umin) <= tol)
            throw NoOrbitError("energy equals the minimum of the effective potential (equilibrium)", true);
        throw NoOrbitError("energy lies below the effective potential well", false);
    }
    if (const auto period = p.period()) {
        const double umax = max_over_period(eff, *period);
        if (std::abs(g.energy - umax) <= tol)
            throw NoOrbitError("energy equals the maximum of the effective potential (separatrix)", true);
        if (g.energy > umax) {
            g.regime = Regime::rotational;
            g.winding = *period;
            g.left = g.right = g.center;
            return g;
        }
    }
    g.regime = Regime::librational;
    g.left = find_turning_point(eff, g.center, g.energy, -1.0);
    g.right = find_turning_point(eff, g.center, g.energy, +1.0);
    g.winding = 0.0;
    return g;
}

Regime classify_regime(const Potential& p, const WaveParameters& w, const WaveOptions& opt) {
    return locate_orbit(p, w, opt).regime;
}

namespace {

double period_from_orbit(const Potential& p, const WaveParameters& w, const OrbitGeometry& g,
                         const WaveOptions& opt) {
    using boost::math::quadrature::gauss_kronrod;
    const Effective eff{p, g.sign};
    const double k = 2.0 / std::abs(w.c2m1());
    double err = 0.0, T = 0.0;
    if (g.regime == Regime::rotational) {
        auto inv_speed = [&](double u) { return 1.0 / std::sqrt(k * (g.energy - eff.U(u))); };
        T = gauss_kronrod<double, 31>::integrate(inv_speed, g.center, g.center + g.winding, 20,
                                                 1e-12, &err);
    } else {
        // u = mid + half sin(theta) turns the inverse square-root endpoint
        // singularities into a smooth integrand.
        const double half = 0.5 * (g.right - g.left);
        const auto vl = p.eval(g.left), vr = p.eval(g.right);
        auto integrand = [&](double th) {
            const double c = std::cos(th);
            const double s2 = 2.0 * std::pow(std::sin(0.25 * std::numbers::pi - 0.5 * std::abs(th)), 2);
            // Distance to the nearer turning point, computed without cancellation.
            const double gap = half * s2;
            const bool right = th >= 0.0;
            double D;
            if (gap < 1e-6 * half) {
                // E - U is dominated by rounding this close to the turning point.
                const auto& v = right ? vr : vl;
                const double d1 = g.sign * v.Vp, d2 = g.sign * v.Vpp;
                D = right ? d1 * gap - 0.5 * d2 * gap * gap : -d1 * gap - 0.5 * d2 * gap * gap;
            } else {
                D = g.energy - eff.U(right ? g.right - gap : g.left + gap);
            }
            if (D <= 0.0) return 0.0;
            return half * c / std::sqrt(k * D);
        };
        T = 2.0 * gauss_kronrod<double, 31>::integrate(integrand, -0.5 * std::numbers::pi,
                                                       0.5 * std::numbers::pi, 20, 1e-12, &err);
        err *= 2.0;
    }
    if (!std::isfinite(T) || T <= 0.0 || err > opt.quad_tol * std::max(1.0, T)) {
        std::ostringstream os;
        os << "period quadrature did not converge (T = " << T << ", error estimate " << err << ")";
        throw IntegrationError(os.str());
    }
    return T;
}

}  // namespace

double compute_period(const Potential& p, const WaveParameters& w, const WaveOptions& opt) {
    return period_from_orbit(p, w, locate_orbit(p, w, opt), opt);
}

WaveProfile::WaveProfile(Potential potential, WaveParameters params, OrbitGeometry orbit,
                         double period, std::vector<double> f, std::vector<double> fp)
    : potential_(std::move(potential)),
      params_(params),
      orbit_(orbit),
      T_(period),
      f_(std::move(f)),
      fp_(std::move(fp)) {
    if (f_.size() != fp_.size() || f_.size() < 2) throw ConfigError("profile sample arrays mismatch");
    fpp_.resize(f_.size());
    for (std::size_t i = 0; i < f_.size(); ++i) fpp_[i] = -potential_.eval(f_[i]).Vp / params_.c2m1();
}

std::pair<std::size_t, double> WaveProfile::locate(double z, double& shift) const {
    const double periods = std::floor(z / T_);
    shift = periods * orbit_.winding;
    double zz = z - periods * T_;
    const double h = T_ / double(nodes());
    auto i = static_cast<std::size_t>(zz / h);
    if (i >= nodes()) i = nodes() - 1;
    return {i, zz - double(i) * h};
}

double WaveProfile::f(double z) const {
    double shift = 0.0;
    auto [i, dz] = locate(z, shift);
    const double h = T_ / double(nodes());
    const double t = dz / h, t2 = t * t, t3 = t2 * t;
    return shift + (2 * t3 - 3 * t2 + 1) * f_[i] + (t3 - 2 * t2 + t) * h * fp_[i] +
           (-2 * t3 + 3 * t2) * f_[i + 1] + (t3 - t2) * h * fp_[i + 1];
}

double WaveProfile::fp(double z) const {
    double shift = 0.0;
    auto [i, dz] = locate(z, shift);
    const double h = T_ / double(nodes());
    const double t = dz / h, t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * fp_[i] + (t3 - 2 * t2 + t) * h * fpp_[i] +
           (-2 * t3 + 3 * t2) * fp_[i + 1] + (t3 - t2) * h * fpp_[i + 1];
}

double WaveProfile::energy_drift() const {
    double worst = 0.0;
    for (std::size_t i = 0; i < f_.size(); ++i) {
        const double e = 0.5 * params_.c2m1() * fp_[i] * fp_[i] + potential_.eval(f_[i]).V;
        worst = std::max(worst, std::abs(e - params_.E) / (1.0 + std::abs(params_.E)));
    }
    return worst;
}

WaveProfile build_profile(const Potential& p, const WaveParameters& w, std::size_t N,
                          const WaveOptions& opt) {
    if (N < 256) throw ConfigError("profile needs at least 256 nodes");
    const auto orbit = locate_orbit(p, w, opt);
    const double T = period_from_orbit(p, w, orbit, opt);
    const double c2m1 = w.c2m1();

    using State = std::array<double, 2>;
    State x{orbit.center, std::sqrt(2.0 * (w.E - p.eval(orbit.center).V) / c2m1)};
    std::vector<double> f(N + 1), fp(N + 1);
    f[0] = x[0];
    fp[0] = x[1];
    auto rhs = [&](const State& s, State& d, double) {
        d[0] = s[1];
        d[1] = -p.eval_unchecked(s[0]).Vp / c2m1;
    };
    for (std::size_t i = 1; i <= N; ++i) {
        const double z0 = T * double(i - 1) / double(N);
        const double z1 = T * double(i) / double(N);
        detail::integrate_rk78(rhs, x, z0, z1, opt.rtol, opt.atol, "profile integration");
        f[i] = x[0];
        fp[i] = x[1];
    }

    WaveProfile prof(p, w, orbit, T, std::move(f), std::move(fp));
    const double drift = prof.energy_drift();
    if (drift > 1e-8) throw ProfileAccuracyError("profile energy drift exceeds 1e-8", drift);
    const auto& F = prof.f_samples();
    const auto& FP = prof.fp_samples();
    const double close_f = std::abs(F[N] - F[0] - orbit.winding);
    const double close_fp = std::abs(FP[N] - FP[0]) / (1.0 + std::abs(FP[0]));
    if (close_f > 1e-8 || close_fp > 1e-8)
        throw ProfileAccuracyError("profile does not close after one period", std::max(close_f, close_fp));
    return prof;
}

HillCoefficient::HillCoefficient(double T, CoefficientSource src, Evaluator P,
                                 std::optional<WaveSeed> seed, std::optional<double> speed)
    : T_(T), source_(src), P_(std::move(P)), seed_(std::move(seed)), speed_(speed) {
    if (!(T_ > 0.0) || !std::isfinite(T_)) throw ConfigError("coefficient period must be positive");
    if (!P_) throw ConfigError("coefficient evaluator is empty");
    pmax_ = -std::numeric_limits<double>::infinity();
    pmin_ = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 2048; ++i) {
        const double v = P_(T_ * i / 2048.0);
        if (!std::isfinite(v)) throw DomainError("coefficient P(z) is not finite");
        pmax_ = std::max(pmax_, v);
        pmin_ = std::min(pmin_, v);
    }
}

HillCoefficient HillCoefficient::synthetic(double T, Evaluator P) {
    return HillCoefficient(T, CoefficientSource::synthetic, std::move(P), std::nullopt, std::nullopt);
}

HillCoefficient HillCoefficient::constant(double T, double P0) {
    return synthetic(T, [P0](double) { return P0; });
}

double HillCoefficient::operator()(double z) const {
    return P_(z - T_ * std::floor(z / T_));
}

HillCoefficient hill_coefficient(const WaveProfile& prof) {
    auto shared = std::make_shared<const WaveProfile>(prof);
    const double c2m1 = prof.params().c2m1();
    auto P = [shared, c2m1](double z) { return shared->potential().eval(shared->f(z)).Vpp / c2m1; };
    WaveSeed seed{prof.potential(), c2m1, prof.f_samples().front(), prof.fp_samples().front()};
    return HillCoefficient(prof.period(), CoefficientSource::wave, std::move(P), std::move(seed),
                           prof.params().c);
}

}  // namespace kghopf
