#include "kghopf/spectrum2d.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <unordered_map>

#include "kghopf/errors.hpp"
#include "kghopf/parallel.hpp"

namespace kghopf {

using cplx = std::complex<double>;

MultiplierPair multipliers(const HillCoefficient& coef, double c, cplx lambda, const HillOptions& opt) {
    const double c2m1 = c * c - 1.0;
    const double k = c * coef.period() / c2m1;
    const auto M = monodromy_matrix(coef, nu_of_lambda(lambda, c), opt);
    MultiplierPair p;
    p.lambda = lambda;
    p.hill_delta = M[0] + M[3];
    p.hill_det = M[0] * M[3] - M[1] * M[2];
    // Roots of m^2 - Delta m + det = 0; take the larger-modulus root first so
    // the second (det / m1) is free of cancellation.
    cplx root = std::sqrt((M[0] - M[3]) * (M[0] - M[3]) + 4.0 * M[1] * M[2]);
    if (std::abs(p.hill_delta + root) < std::abs(p.hill_delta - root)) root = -root;
    const cplx m1 = 0.5 * (p.hill_delta + root);
    const cplx m2 = p.hill_det / m1;
    const cplx scale = std::exp(lambda * k);
    p.mu1 = scale * m1;
    p.mu2 = scale * m2;
    p.log_abs1 = lambda.real() * k + std::log(std::abs(m1));
    p.log_abs2 = lambda.real() * k + std::log(std::abs(m2));
    return p;
}

cplx evaluate_evans(const HillCoefficient& coef, double c, cplx lambda, cplx mu, const HillOptions& opt) {
    const double k = c * coef.period() / (c * c - 1.0);
    const auto M = monodromy_matrix(coef, nu_of_lambda(lambda, c), opt);
    const cplx e = std::exp(lambda * k);
    const cplx trace = e * (M[0] + M[3]);
    const cplx det = e * e * (M[0] * M[3] - M[1] * M[2]);
    return mu * mu - trace * mu + det;
}

std::vector<double> SpectralCurves::axis_crossings() const {
    std::vector<double> out;
    for (const auto& line : segments)
        for (std::size_t k = 0; k + 1 < line.size(); ++k) {
            const auto a = line[k], b = line[k + 1];
            if ((a.real() < 0.0) != (b.real() < 0.0) || a.real() == 0.0) {
                const double t = a.real() == b.real() ? 0.0 : a.real() / (a.real() - b.real());
                out.push_back(a.imag() + t * (b.imag() - a.imag()));
            }
        }
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

struct Segment {
    std::size_t a;
    std::size_t b;
};

bool lex_less(cplx x, cplx y) { return x.real() < y.real() || (x.real() == y.real() && x.imag() < y.imag()); }

}  // namespace

std::vector<Polyline> extract_zero_set(const std::vector<double>& values, std::size_t nx, std::size_t ny,
                                       const Window& w, std::size_t* skipped) {
    if (nx < 2 || ny < 2 || values.size() != nx * ny) throw ConfigError("grid shape mismatch");
    const double dx = (w.re_max - w.re_min) / double(nx - 1);
    const double dy = (w.im_max - w.im_min) / double(ny - 1);
    auto at = [&](std::size_t i, std::size_t j) { return values[j * nx + i]; };
    auto pos = [&](std::size_t i, std::size_t j) { return cplx(w.re_min + double(i) * dx, w.im_min + double(j) * dy); };
    const std::size_t n_h = (nx - 1) * ny;
    auto h_edge = [&](std::size_t i, std::size_t j) { return j * (nx - 1) + i; };
    auto v_edge = [&](std::size_t i, std::size_t j) { return n_h + j * nx + i; };

    std::unordered_map<std::size_t, cplx> crossing;
    auto cross = [&](std::size_t id, std::size_t i0, std::size_t j0, std::size_t i1, std::size_t j1) {
        auto it = crossing.find(id);
        if (it != crossing.end()) return id;
        const double g0 = at(i0, j0), g1 = at(i1, j1);
        const double t = g0 / (g0 - g1);
        crossing.emplace(id, pos(i0, j0) + t * (pos(i1, j1) - pos(i0, j0)));
        return id;
    };

    std::vector<Segment> segs;
    std::size_t bad = 0;
    for (std::size_t j = 0; j + 1 < ny; ++j) {
        for (std::size_t i = 0; i + 1 < nx; ++i) {
            const double g[4] = {at(i, j), at(i + 1, j), at(i + 1, j + 1), at(i, j + 1)};
            if (!std::all_of(g, g + 4, [](double v) { return std::isfinite(v); })) {
                ++bad;
                continue;
            }
            const int code = (g[0] > 0) | (g[1] > 0) << 1 | (g[2] > 0) << 2 | (g[3] > 0) << 3;
            if (code == 0 || code == 15) continue;
            // Edges: 0 bottom, 1 right, 2 top, 3 left.
            auto edge = [&](int e) {
                switch (e) {
                    case 0: return cross(h_edge(i, j), i, j, i + 1, j);
                    case 1: return cross(v_edge(i + 1, j), i + 1, j, i + 1, j + 1);
                    case 2: return cross(h_edge(i, j + 1), i, j + 1, i + 1, j + 1);
                    default: return cross(v_edge(i, j), i, j, i, j + 1);
                }
            };
            const bool center_pos = 0.25 * (g[0] + g[1] + g[2] + g[3]) > 0.0;
            auto add = [&](int e0, int e1) { segs.push_back({edge(e0), edge(e1)}); };
            switch (code) {
                case 1: case 14: add(0, 3); break;
                case 2: case 13: add(0, 1); break;
                case 3: case 12: add(1, 3); break;
                case 4: case 11: add(1, 2); break;
                case 6: case 9: add(0, 2); break;
                case 7: case 8: add(2, 3); break;
                case 5:
                    if (center_pos) { add(0, 1); add(2, 3); } else { add(0, 3); add(1, 2); }
                    break;
                case 10:
                    if (center_pos) { add(0, 3); add(1, 2); } else { add(0, 1); add(2, 3); }
                    break;
                default: break;
            }
        }
    }
    if (skipped) *skipped = bad;

    // Link segments sharing an edge crossing into polylines.
    std::unordered_map<std::size_t, std::vector<std::size_t>> by_edge;
    for (std::size_t s = 0; s < segs.size(); ++s) {
        by_edge[segs[s].a].push_back(s);
        by_edge[segs[s].b].push_back(s);
    }
    std::vector<bool> used(segs.size(), false);
    std::vector<Polyline> lines;
    auto walk = [&](std::size_t seg, std::size_t from, std::vector<std::size_t>& chain) {
        std::size_t cur = seg, edge = from;
        for (;;) {
            const std::size_t next_edge = segs[cur].a == edge ? segs[cur].b : segs[cur].a;
            chain.push_back(next_edge);
            std::size_t next = segs.size();
            for (std::size_t cand : by_edge[next_edge])
                if (!used[cand]) next = cand;
            if (next == segs.size()) return;
            used[next] = true;
            cur = next;
            edge = next_edge;
        }
    };
    for (std::size_t s = 0; s < segs.size(); ++s) {
        if (used[s]) continue;
        used[s] = true;
        std::vector<std::size_t> fwd, bwd;
        walk(s, segs[s].a, fwd);  // a -> b -> ...
        walk(s, segs[s].b, bwd);  // b -> a -> ...
        std::vector<std::size_t> chain(bwd.rbegin(), bwd.rend());
        // bwd ends with ... , a ; fwd starts at b.  bwd's first element is a.
        chain.insert(chain.end(), fwd.begin(), fwd.end());
        Polyline line;
        for (std::size_t e : chain) {
            const cplx p = crossing.at(e);
            if (line.empty() || line.back() != p) line.push_back(p);
        }
        if (line.size() < 2) continue;
        const bool closed = line.front() == line.back();
        if (closed) {
            line.pop_back();
            auto m = std::min_element(line.begin(), line.end(), lex_less);
            std::rotate(line.begin(), m, line.end());
            line.push_back(line.front());
        } else if (lex_less(line.back(), line.front())) {
            std::reverse(line.begin(), line.end());
        }
        lines.push_back(std::move(line));
    }
    std::sort(lines.begin(), lines.end(), [](const Polyline& x, const Polyline& y) {
        for (std::size_t k = 0; k < std::min(x.size(), y.size()); ++k) {
            if (lex_less(x[k], y[k])) return true;
            if (lex_less(y[k], x[k])) return false;
        }
        return x.size() < y.size();
    });
    return lines;
}

std::vector<std::pair<double, double>> axis_bands_from_hill(const BandStructure& bands, double c, double im_lo,
                                                            double im_hi) {
    const double s = std::abs(c * c - 1.0);
    std::vector<std::pair<double, double>> pos;
    for (const auto& b : bands.bands) {
        if (b.lower.nu >= 0.0) continue;
        const double lo = s * std::sqrt(-std::min(b.upper.nu, 0.0));
        const double hi = s * std::sqrt(-b.lower.nu);
        if (!pos.empty() && std::abs(pos.back().first - hi) <= 1e-12 * (1.0 + hi)) {
            pos.back().first = lo;  // touching at a double point: merge
        } else {
            pos.push_back({lo, hi});
        }
    }
    // pos is descending in beta; emit both half-axes, clipped.
    std::vector<std::pair<double, double>> out;
    for (const auto& [lo, hi] : pos) {
        for (int sign : {1, -1}) {
            double a = sign * lo, b = sign * hi;
            if (a > b) std::swap(a, b);
            a = std::max(a, im_lo);
            b = std::min(b, im_hi);
            if (a < b || (a == b && lo == hi)) out.push_back({a, b});
        }
    }
    std::sort(out.begin(), out.end());
    // Merge the two halves where they meet at beta = 0.
    std::vector<std::pair<double, double>> merged;
    for (const auto& iv : out) {
        if (!merged.empty() && iv.first <= merged.back().second) merged.back().second = std::max(merged.back().second, iv.second);
        else merged.push_back(iv);
    }
    return merged;
}

std::vector<std::pair<double, double>> axis_bands_from_multipliers(const HillCoefficient& coef, double c, double im_lo,
                                                                   double im_hi, std::size_t n, double tol,
                                                                   const HillOptions& opt) {
    if (n < 2) throw ConfigError("need at least two samples");
    const double h = (im_hi - im_lo) / double(n - 1);
    std::vector<char> in(n, 0);
    parallel_for(n, [&](std::size_t k) {
        const auto p = multipliers(coef, c, cplx(0.0, im_lo + double(k) * h), opt);
        in[k] = std::max(std::abs(p.log_abs1), std::abs(p.log_abs2)) <= tol;
    });
    std::vector<std::pair<double, double>> out;
    for (std::size_t k = 0; k < n; ++k) {
        if (!in[k]) continue;
        const double b = im_lo + double(k) * h;
        if (k > 0 && in[k - 1]) out.back().second = b;
        else out.push_back({b, b});
    }
    return out;
}

SpectralCurves trace_spectrum(const HillCoefficient& coef, double c, const Window& window, std::size_t nx,
                              std::size_t ny, const HillOptions& opt) {
    if (nx < 64 || ny < 64) throw ConfigError("spectrum grid must be at least 64 x 64");
    if (!(window.re_max > window.re_min) || !(window.im_max > window.im_min))
        throw ConfigError("spectrum window is empty");
    SpectralCurves out;
    out.window = window;
    out.nx = nx;
    out.ny = ny;
    out.values.assign(nx * ny, 0.0);
    const double dx = out.dx(), dy = out.dy();
    for (std::size_t i = 0; i < nx; ++i)
        if (std::abs(window.re_min + double(i) * dx) < 1e-9 * dx) out.axis_on_grid = true;
    parallel_for(nx * ny, [&](std::size_t idx) {
        const std::size_t i = idx % nx, j = idx / nx;
        const cplx lambda(window.re_min + double(i) * dx, window.im_min + double(j) * dy);
        try {
            out.values[idx] = multipliers(coef, c, lambda, opt).indicator();
        } catch (const IntegrationError&) {
            out.values[idx] = std::numeric_limits<double>::quiet_NaN();
        }
    });
    out.segments = extract_zero_set(out.values, nx, ny, window, &out.skipped_cells);

    const double beta_max = std::max(std::abs(window.im_min), std::abs(window.im_max));
    const double s = std::abs(c * c - 1.0);
    const bool axis_in_window = window.re_min <= 0.0 && window.re_max >= 0.0;
    if (axis_in_window && beta_max > 0.0 && (window.im_min < 0.0 || window.im_max > 0.0)) {
        const double nu_min = -std::pow(beta_max / s, 2) - 1.0;
        const auto bands = band_structure(coef, nu_min, BandOptions{.hill = opt});
        out.axis_bands = axis_bands_from_hill(bands, c, window.im_min, window.im_max);
    }
    return out;
}

std::string to_string(ProbeResult r) {
    switch (r) {
        case ProbeResult::unstable_nearby: return "unstable_nearby";
        case ProbeResult::stable_nearby: return "stable_nearby";
        case ProbeResult::indeterminate: return "indeterminate";
    }
    return "?";
}

OffAxisProbe off_axis_probe(const HillCoefficient& coef, double c, double beta, double radius, std::size_t samples,
                            const HillOptions& opt) {
    if (radius <= 0.0) radius = 1e-2 * (1.0 + std::abs(beta));
    std::vector<double> g(samples);
    parallel_for(samples, [&](std::size_t k) {
        const double th = -0.5 * std::numbers::pi + std::numbers::pi * (double(k) + 0.5) / double(samples);
        const cplx lambda(radius * std::cos(th), beta + radius * std::sin(th));
        g[k] = multipliers(coef, c, lambda, opt).indicator();
    });
    OffAxisProbe r;
    r.g_min = *std::min_element(g.begin(), g.end());
    r.g_max = *std::max_element(g.begin(), g.end());
    if (std::max(std::abs(r.g_min), std::abs(r.g_max)) < 1e-14) {
        r.result = ProbeResult::indeterminate;
    } else {
        r.result = (r.g_min < 0.0 && r.g_max > 0.0) ? ProbeResult::unstable_nearby : ProbeResult::stable_nearby;
    }
    return r;
}

OffAxisProbe off_axis_probe(const HillCoefficient& coef, double c, const HHPoint& point, double radius,
                            std::size_t samples, const HillOptions& opt) {
    return off_axis_probe(coef, c, point.beta, radius, samples, opt);
}

}  // namespace kghopf
