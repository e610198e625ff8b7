#include "kghopf/cli.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include <CLI11.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <json.hpp>

#include "kghopf/errors.hpp"
#include "kghopf/parallel.hpp"

#ifndef KGHOPF_VERSION
#define KGHOPF_VERSION "0.0.0"
#endif

namespace kghopf::cli {
namespace {

using json = nlohmann::ordered_json;
namespace pt = boost::property_tree;

double parse_real(const std::string& key, const std::string& text) {
    std::istringstream is(text);
    is.imbue(std::locale::classic());
    double v = 0.0;
    is >> v;
    if (is.fail() || !(is >> std::ws).eof()) throw ConfigError("'" + key + "' is not a number: " + text);
    if (!std::isfinite(v)) throw ConfigError("'" + key + "' must be finite");
    return v;
}

std::size_t parse_count(const std::string& key, const std::string& text) {
    const double v = parse_real(key, text);
    if (v < 0.0 || v != std::floor(v) || v > 1e9) throw ConfigError("'" + key + "' must be a non-negative integer");
    return static_cast<std::size_t>(v);
}

Format parse_format(const std::string& s) {
    if (s == "csv") return Format::csv;
    if (s == "json") return Format::json;
    throw ConfigError("format must be csv or json, got '" + s + "'");
}

std::string format_name(Format f) { return f == Format::csv ? "csv" : "json"; }

// A wave together with the derived quantities every command needs.
struct Wave {
    WaveProfile profile;
    HillCoefficient coef;
    double nu_min;
    double c4_depth;
};

Wave make_wave(const RunConfig& cfg) {
    cfg.validate();
    const auto pot = Potential::from_name(cfg.potential, cfg.potential_params);
    WaveOptions wopt;
    wopt.well = cfg.well;
    auto prof = build_profile(pot, {cfg.c, cfg.E}, cfg.nodes, wopt);
    auto coef = hill_coefficient(prof);
    const double T = prof.period();
    const double nu_min = cfg.nu_min.value_or(default_nu_min(T));
    if (!(nu_min < 0.0)) throw ConfigError("nu_min must be negative");
    return Wave{std::move(prof), std::move(coef), nu_min, cfg.c4_depth.value_or(default_c4_depth(T))};
}

BandOptions band_options(const RunConfig& cfg) {
    BandOptions o;
    o.step_fraction = cfg.scan_step;
    return o;
}

ScanOptions scan_options(const RunConfig& cfg) {
    ScanOptions o;
    o.step_fraction = cfg.scan_step;
    return o;
}

// Spectrum window: explicit, or everything down to nu_min on the upper half axis.
Window window_for(const RunConfig& cfg, double nu_min) {
    if (cfg.window) return *cfg.window;
    const double beta_max = std::abs(cfg.c * cfg.c - 1.0) * std::sqrt(-nu_min);
    return Window{-0.25 * beta_max, 0.25 * beta_max, 0.0, beta_max};
}

json number(double x) {
    if (!std::isfinite(x)) return nullptr;
    return x;
}

std::string edge_kind(EdgeKind k) {
    switch (k) {
        case EdgeKind::periodic: return "periodic";
        case EdgeKind::antiperiodic: return "antiperiodic";
        case EdgeKind::scan_boundary: return "scan_boundary";
    }
    return "?";
}

std::string multiplicity(Multiplicity m) {
    switch (m) {
        case Multiplicity::simple: return "simple";
        case Multiplicity::double_point: return "double";
        case Multiplicity::none: return "none";
    }
    return "?";
}

json edge_json(const BandEdge& e) {
    return json{{"nu", number(e.nu)},
                {"kind", edge_kind(e.kind)},
                {"multiplicity", multiplicity(e.multiplicity)},
                {"delta", number(e.values.delta)},
                {"delta_nu", number(e.values.delta_nu)}};
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("cannot write " + path.string());
    os << text;
    if (!os) throw ConfigError("failed writing " + path.string());
}

void prepare_out_dir(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create output directory " + dir.string() + ": " + ec.message());
}

// Band edges this close to 0 are the periodic point every wave has at nu = 0.
constexpr double kZeroEdge = 1e-8;

// Maps library exceptions to exit codes.
template <class Fn>
int guarded(std::ostream& log, Fn&& fn) {
    try {
        return fn();
    } catch (const ConfigError& e) {
        log << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const NoOrbitError& e) {
        log << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const InconsistentTheoryError& e) {
        log << "consistency error: " << e.what() << '\n';
        return kConsistencyError;
    } catch (const ProfileAccuracyError& e) {
        log << "numerical error: " << e.what() << " (drift " << format_number(e.drift()) << ")\n";
        return kNumericalError;
    } catch (const Error& e) {
        log << "numerical error: " << e.what() << '\n';
        return kNumericalError;
    }
}

// Closed forms for P = P0: Delta = 2 cosh(sqrt(nu - P0) T) and its
// nu-derivatives, via the power series when |nu - P0| T^2 is small.
std::array<double, 3> constant_delta(double P0, double T, double nu) {
    const double x = nu - P0;
    if (x == 0.0) return {2.0, T * T, std::pow(T, 4) / 6.0};
    if (std::abs(x) * T * T < 1.0) {
        double d0 = 0.0, d1 = 0.0, d2 = 0.0;
        double term = 2.0;  // 2 x^k T^(2k) / (2k)!
        for (int k = 0; k < 30; ++k) {
            d0 += term;
            if (k >= 1) d1 += k * term / x;
            if (k >= 2) d2 += k * (k - 1) * term / (x * x);
            term *= x * T * T / double((2 * k + 1) * (2 * k + 2));
        }
        return {d0, d1, d2};
    }
    if (x < 0.0) {
        const double s = std::sqrt(-x);
        const double cs = std::cos(s * T), sn = std::sin(s * T);
        return {2.0 * cs, T * sn / s, -T * T * cs / (2.0 * s * s) + T * sn / (2.0 * s * s * s)};
    }
    const double r = std::sqrt(x);
    const double ch = std::cosh(r * T), sh = std::sinh(r * T);
    return {2.0 * ch, T * sh / r, T * T * ch / (2.0 * r * r) - T * sh / (2.0 * r * r * r)};
}

}  // namespace

void RunConfig::validate() const {
    WaveParameters{c, E}.validate();
    if (well && !std::isfinite(*well)) throw ConfigError("well must be finite");
    if (nodes < 256) throw ConfigError("nodes must be at least 256");
    if (nu_min && !(std::isfinite(*nu_min) && *nu_min < 0.0)) throw ConfigError("nu_min must be negative and finite");
    if (!(std::isfinite(scan_step) && scan_step > 0.0 && scan_step <= 0.5))
        throw ConfigError("scan_step must lie in (0, 0.5]");
    if (c4_depth && !std::isfinite(*c4_depth)) throw ConfigError("c4_depth must be finite");
    if (nx < 64 || ny < 64) throw ConfigError("spectrum grid must be at least 64 x 64");
    if (window) {
        const auto& w = *window;
        for (double v : {w.re_min, w.re_max, w.im_min, w.im_max})
            if (!std::isfinite(v)) throw ConfigError("spectrum window must be finite");
        if (!(w.re_max > w.re_min) || !(w.im_max > w.im_min)) throw ConfigError("spectrum window is empty");
    }
    if (curve_samples < 2) throw ConfigError("curve samples must be at least 2");
    for (const auto& [k, v] : potential_params)
        if (!std::isfinite(v)) throw ConfigError("potential parameter " + k + " must be finite");
}

RunConfig parse_config(std::istream& in) {
    pt::ptree tree;
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
    RunConfig cfg;
    bool have_c = false, have_E = false;
    std::array<std::optional<double>, 4> win;
    for (const auto& [section, body] : tree) {
        if (body.empty() && !body.data().empty())
            throw ConfigError("key '" + section + "' outside any section");
        for (const auto& [key, node] : body) {
            const std::string& v = node.data();
            const std::string where = section + "." + key;
            if (section == "wave") {
                if (key == "potential") cfg.potential = v;
                else if (key == "c") { cfg.c = parse_real(where, v); have_c = true; }
                else if (key == "E") { cfg.E = parse_real(where, v); have_E = true; }
                else if (key == "well") cfg.well = parse_real(where, v);
                else if (key == "nodes") cfg.nodes = parse_count(where, v);
                else throw ConfigError("unknown key " + where);
            } else if (section == "potential") {
                cfg.potential_params[key] = parse_real(where, v);
            } else if (section == "hill") {
                if (key == "nu_min") cfg.nu_min = parse_real(where, v);
                else if (key == "scan_step") cfg.scan_step = parse_real(where, v);
                else throw ConfigError("unknown key " + where);
            } else if (section == "criterion") {
                if (key == "c4_depth") cfg.c4_depth = parse_real(where, v);
                else throw ConfigError("unknown key " + where);
            } else if (section == "spectrum") {
                if (key == "re_min") win[0] = parse_real(where, v);
                else if (key == "re_max") win[1] = parse_real(where, v);
                else if (key == "im_min") win[2] = parse_real(where, v);
                else if (key == "im_max") win[3] = parse_real(where, v);
                else if (key == "nx") cfg.nx = parse_count(where, v);
                else if (key == "ny") cfg.ny = parse_count(where, v);
                else throw ConfigError("unknown key " + where);
            } else if (section == "curve") {
                if (key == "samples") cfg.curve_samples = parse_count(where, v);
                else throw ConfigError("unknown key " + where);
            } else if (section == "output") {
                if (key == "dir") cfg.out_dir = v;
                else if (key == "format") cfg.format = parse_format(v);
                else if (key == "threads") cfg.threads = static_cast<unsigned>(parse_count(where, v));
                else throw ConfigError("unknown key " + where);
            } else {
                throw ConfigError("unknown section [" + section + "]");
            }
        }
    }
    if (!have_c || !have_E) throw ConfigError("[wave] needs both c and E");
    const auto set = std::count_if(win.begin(), win.end(), [](const auto& o) { return o.has_value(); });
    if (set == 4) cfg.window = Window{*win[0], *win[1], *win[2], *win[3]};
    else if (set != 0) throw ConfigError("[spectrum] window needs all of re_min, re_max, im_min, im_max");
    cfg.validate();
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config " + path.string());
    return parse_config(is);
}

std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    if (x == 0.0) x = 0.0;  // no "-0"
    std::array<char, 40> buf{};
    const auto r = std::to_chars(buf.data(), buf.data() + buf.size(), x, std::chars_format::general, 17);
    return std::string(buf.data(), r.ptr);
}

std::string echo_config(const RunConfig& cfg) {
    std::ostringstream os;
    // Shortest round-trip form; reads back to the same double.
    auto format_number = [](double x) {
        std::array<char, 40> buf{};
        const auto r = std::to_chars(buf.data(), buf.data() + buf.size(), x);
        return std::string(buf.data(), r.ptr);
    };
    os << "[wave]\n"
       << "potential = " << cfg.potential << '\n'
       << "c = " << format_number(cfg.c) << '\n'
       << "E = " << format_number(cfg.E) << '\n';
    if (cfg.well) os << "well = " << format_number(*cfg.well) << '\n';
    os << "nodes = " << cfg.nodes << '\n';
    if (!cfg.potential_params.empty()) {
        os << "\n[potential]\n";
        for (const auto& [k, v] : cfg.potential_params) os << k << " = " << format_number(v) << '\n';
    }
    os << "\n[hill]\n";
    if (cfg.nu_min) os << "nu_min = " << format_number(*cfg.nu_min) << '\n';
    os << "scan_step = " << format_number(cfg.scan_step) << '\n';
    if (cfg.c4_depth) os << "\n[criterion]\n" << "c4_depth = " << format_number(*cfg.c4_depth) << '\n';
    os << "\n[spectrum]\n";
    if (cfg.window) {
        os << "re_min = " << format_number(cfg.window->re_min) << '\n'
           << "re_max = " << format_number(cfg.window->re_max) << '\n'
           << "im_min = " << format_number(cfg.window->im_min) << '\n'
           << "im_max = " << format_number(cfg.window->im_max) << '\n';
    }
    os << "nx = " << cfg.nx << '\n'
       << "ny = " << cfg.ny << '\n'
       << "\n[curve]\n"
       << "samples = " << cfg.curve_samples << '\n';
    if (cfg.format) os << "\n[output]\n" << "format = " << format_name(*cfg.format) << '\n';
    return os.str();
}

AnalysisOutput analyze(const RunConfig& cfg) {
    const auto wave = make_wave(cfg);
    const auto& coef = wave.coef;
    const double c = cfg.c;
    const double T = wave.profile.period();

    const auto idx = compute_indices(coef, c);
    const auto bands = band_structure(coef, wave.nu_min, band_options(cfg));
    const auto hh = scan_hh_points(coef, c, bands, scan_options(cfg));
    const auto cor = corollary_report(idx, bands, c, hh.points, wave.c4_depth);

    std::vector<double> probes;
    const double c2m1 = c * c - 1.0;
    for (int k = 1; k <= 5; ++k) probes.push_back(-100.0 * k / (c2m1 * c2m1));
    const auto asym = asymptotic_check(coef, c, probes);
    const auto small = small_nu_check(coef, c);

    AnalysisOutput out;
    std::vector<std::string> failures;

    json report;
    report["tool"] = {{"name", "kghopf"}, {"version", KGHOPF_VERSION}};
    report["wave"] = {{"potential", cfg.potential},
                      {"regime", to_string(wave.profile.regime())},
                      {"c", number(c)},
                      {"E", number(cfg.E)},
                      {"T", number(T)},
                      {"winding", number(wave.profile.winding())},
                      {"energy_drift", number(wave.profile.energy_drift())},
                      {"nodes", cfg.nodes}};
    report["indices"] = {{"gamma_M", idx.gamma_M},
                         {"gamma_P", idx.gamma_P},
                         {"delta_at_0", number(idx.delta_at_0)},
                         {"delta_nu_at_0", number(idx.delta_nu_at_0)},
                         {"delta_nunu_at_0", number(idx.delta_nunu_at_0)},
                         {"c2T2", number(c * c * T * T)},
                         {"degenerate", idx.degenerate},
                         {"gamma_M_zero", idx.gamma_M_zero}};

    json band_rows = json::array();
    std::ostringstream bcsv;
    bcsv << "index,nu_lo,kind_lo,mult_lo,nu_hi,kind_hi,mult_hi\n";
    for (std::size_t i = 0; i < bands.bands.size(); ++i) {
        const auto& b = bands.bands[i];
        band_rows.push_back({{"index", i}, {"lower", edge_json(b.lower)}, {"upper", edge_json(b.upper)}});
        bcsv << i << ',' << format_number(b.lower.nu) << ',' << edge_kind(b.lower.kind) << ','
             << multiplicity(b.lower.multiplicity) << ',' << format_number(b.upper.nu) << ','
             << edge_kind(b.upper.kind) << ',' << multiplicity(b.upper.multiplicity) << '\n';
    }
    json gap_rows = json::array();
    for (const auto& g : bands.gaps)
        gap_rows.push_back({{"lo", number(g.lo)},
                            {"hi", number(g.hi)},
                            {"truncated", g.truncated},
                            {"critical_nu", number(g.critical_nu)}});
    report["spectrum"] = {{"nu_min", number(wave.nu_min)},
                          {"nu_max", number(bands.nu_max)},
                          {"scanned", {number(bands.nu_min_scanned), number(bands.nu_max_scanned)}},
                          {"bands", band_rows},
                          {"gaps", gap_rows}};

    json hh_rows = json::array();
    std::ostringstream hcsv;
    hcsv << "nu_star,beta,band_index,residual,delta_plus,delta_minus,double_point\n";
    for (const auto& p : hh.points) {
        const double dp = p.trans.double_point ? p.trans.delta_hat_plus : p.trans.delta_plus;
        const double dm = p.trans.double_point ? p.trans.delta_hat_minus : p.trans.delta_minus;
        hh_rows.push_back({{"nu_star", number(p.nu_star)},
                           {"beta", number(p.beta)},
                           {"band_index", p.band_index},
                           {"residual", number(p.residual)},
                           {"delta_plus", number(dp)},
                           {"delta_minus", number(dm)},
                           {"double_point", p.trans.double_point}});
        hcsv << format_number(p.nu_star) << ',' << format_number(p.beta) << ',' << p.band_index << ','
             << format_number(p.residual) << ',' << format_number(dp) << ',' << format_number(dm) << ','
             << (p.trans.double_point ? "true" : "false") << '\n';
        if (p.band_index >= bands.bands.size() || !bands.bands[p.band_index].contains(p.nu_star, 1e-9))
            failures.push_back("HH point at nu = " + format_number(p.nu_star) + " has no matching band");
    }
    report["hh_points"] = hh_rows;

    // Simple negative band edges are roots of F and never HH points.  F is
    // ill-conditioned at the edges of very narrow gaps, so a value above
    // 1e-6 only warns; the check fails when F comes near nu itself.
    json excl = json::array();
    std::vector<std::string> warnings = hh.warnings;
    for (const auto& e : bands.simple_edges()) {
        if (!(e.nu < -kZeroEdge)) continue;  // nu = 0 is always a periodic point
        const auto F = extended_F(coef, c, e.nu);
        double nearest = INFINITY;
        for (const auto& p : hh.points) nearest = std::min(nearest, std::abs(p.nu_star - e.nu));
        const bool finite = F.kind == FKind::finite;
        const bool small_F = finite && std::abs(F.value) <= 1e-6;
        const bool ok = finite && std::abs(F.value) < 0.5 * std::abs(e.nu) && nearest > 1e-6;
        excl.push_back({{"nu", number(e.nu)}, {"F", number(finite ? F.value : NAN)},
                        {"nearest_hh", number(nearest)}, {"F_below_1e-6", small_F}, {"ok", ok}});
        if (!ok) failures.push_back("band edge at nu = " + format_number(e.nu) + " fails the exclusion check");
        else if (!small_F) warnings.push_back("F = " + format_number(F.value) + " at band edge nu = " + format_number(e.nu));
    }

    report["scan"] = {{"evaluations", hh.evaluations}, {"warnings", warnings}};

    json gap_checks = json::array();
    for (const auto& g : cor.gaps)
        gap_checks.push_back({{"lo", number(g.gap.lo)},
                              {"hi", number(g.gap.hi)},
                              {"hh_below", g.hh_below},
                              {"hh_above", g.hh_above},
                              {"outcome", to_string(g.outcome)}});
    const int product = idx.gamma_M * idx.gamma_P;
    report["corollaries"] = {
        {"C2", {{"predicate", "gamma_M * gamma_P = -1"}, {"outcome", to_string(cor.c2)}}},
        {"C3", {{"predicate", "gamma_M * gamma_P = +1, negative gap, c^2 > 1"}, {"outcome", to_string(cor.c3)}}},
        {"C4", {{"predicate", "c^2 > 1, open gap below c4_depth"},
                {"outcome", to_string(cor.c4)},
                {"c4_depth", number(cor.c4_depth)},
                {"gaps", gap_checks}}},
        {"index_product", product},
        {"consistent", cor.consistent()}};
    if (!cor.consistent()) failures.push_back("a fired corollary has no matching HH point");

    json asym_rows = json::array();
    for (const auto& a : asym)
        asym_rows.push_back({{"nu", number(a.nu)},
                             {"accepted", a.accepted},
                             {"ratio", a.accepted ? number(a.ratio) : json(nullptr)},
                             {"residual", a.accepted ? number(std::abs(a.ratio - 1.0)) : json(nullptr)}});
    report["checks"] = {{"edge_exclusion", excl},
                        {"asymptotic", asym_rows},
                        {"small_nu",
                         {{"branch", small.branch},
                          {"predicted", number(small.predicted)},
                          {"measured", number(small.measured)},
                          {"relative_error", number(small.relative_error())}}},
                        {"failures", failures}};
    RunConfig resolved = cfg;
    resolved.nu_min = wave.nu_min;
    resolved.c4_depth = wave.c4_depth;
    resolved.window = window_for(cfg, wave.nu_min);
    report["config"] = echo_config(resolved);

    out.consistent = failures.empty();
    out.json = report.dump(2) + "\n";
    out.bands_csv = bcsv.str();
    out.hh_csv = hcsv.str();
    return out;
}

namespace {

struct CurveTable {
    std::vector<double> beta;
    std::vector<ExtendedFValue> F;
};

CurveTable curve_table(const HillCoefficient& coef, double c, double nu_min, std::size_t n) {
    if (!(nu_min < 0.0) || n < 2) throw ConfigError("curve needs nu_min < 0 and at least two samples");
    const double c2m1 = std::abs(c * c - 1.0);
    const double beta_max = c2m1 * std::sqrt(-nu_min);
    CurveTable t{std::vector<double>(n), std::vector<ExtendedFValue>(n)};
    parallel_for(n, [&](std::size_t k) {
        t.beta[k] = beta_max * double(k + 1) / double(n);
        const double nu = -(t.beta[k] / c2m1) * (t.beta[k] / c2m1);
        t.F[k] = extended_F(coef, c, nu);
    });
    return t;
}

CurveTable curve_table(const RunConfig& cfg) {
    const auto wave = make_wave(cfg);
    return curve_table(wave.coef, cfg.c, wave.nu_min, cfg.curve_samples);
}

std::string curve_csv(const CurveTable& t) {
    std::ostringstream os;
    os << "beta,nu,F,kind\n";
    for (std::size_t k = 0; k < t.beta.size(); ++k) {
        const auto& v = t.F[k];
        os << format_number(t.beta[k]) << ',' << format_number(v.nu) << ',';
        if (v.kind == FKind::finite) os << format_number(v.value);
        os << ',' << to_string(v) << '\n';
    }
    return os.str();
}

}  // namespace

std::string curve_csv(const RunConfig& cfg) { return curve_csv(curve_table(cfg)); }

std::string curve_csv(const HillCoefficient& coef, double c, double nu_min, std::size_t samples) {
    return curve_csv(curve_table(coef, c, nu_min, samples));
}

SpectrumOutput spectrum(const RunConfig& cfg) {
    const auto wave = make_wave(cfg);
    const auto win = window_for(cfg, wave.nu_min);
    const auto sc = trace_spectrum(wave.coef, cfg.c, win, cfg.nx, cfg.ny);
    SpectrumOutput out;
    std::ostringstream os;
    os << "beta_lo,beta_hi\n";
    for (const auto& [lo, hi] : sc.axis_bands) os << format_number(lo) << ',' << format_number(hi) << '\n';
    out.axis_bands_csv = os.str();
    json curves = json::array();
    for (const auto& poly : sc.segments) {
        json line = json::array();
        for (const auto& z : poly) line.push_back({number(z.real()), number(z.imag())});
        curves.push_back(std::move(line));
    }
    out.curves_json = curves.dump() + "\n";
    return out;
}

std::vector<SelftestRow> selftest(const SelftestHooks& hooks) {
    std::vector<SelftestRow> rows;
    auto add = [&](std::string name, double measured, double tol) {
        for (const auto& [n, s] : hooks.tolerance_scale)
            if (n == name) tol *= s;
        rows.push_back({std::move(name), measured, tol, std::isfinite(measured) && measured <= tol});
    };
    auto guard = [&](const std::string& name, double tol, auto&& fn) {
        double m = NAN;
        try {
            m = fn();
        } catch (const Error&) {
            m = NAN;
        }
        add(name, m, tol);
    };

    guard("constant_coefficient_delta", 1e-8, [] {
        double worst = 0.0;
        for (double P0 : {0.0, 1.0}) {
            const auto coef = HillCoefficient::constant(2.5, P0);
            for (int i = 0; i < 25; ++i) {
                const double nu = -50.0 + (P0 + 55.0) * i / 24.0;
                const auto d = discriminant(coef, nu);
                const auto ref = constant_delta(P0, 2.5, nu);
                worst = std::max(worst, std::abs(d.delta - ref[0]));
            }
        }
        return worst;
    });
    guard("constant_coefficient_derivatives", 1e-7, [] {
        double worst = 0.0;
        const auto coef = HillCoefficient::constant(std::numbers::pi, -2.0);
        for (int i = 0; i < 25; ++i) {
            const double nu = -50.0 + 47.0 * i / 24.0;
            const auto d = discriminant(coef, nu);
            const auto ref = constant_delta(-2.0, std::numbers::pi, nu);
            worst = std::max({worst, std::abs(d.delta_nu - ref[1]), std::abs(d.delta_nunu - ref[2])});
        }
        return worst;
    });
    guard("harmonic_limit_period", 1e-3, [] {
        const double c = 1.45;
        const double T = compute_period(Potential::sine_gordon(), {c, 1e-3});
        return std::abs(T - 2.0 * std::numbers::pi * std::sqrt(c * c - 1.0)) / T;
    });

    // The remaining rows use the c = 1.45, E = 6 sine-Gordon wave.
    std::optional<HillCoefficient> wave;
    try {
        wave = hill_coefficient(build_profile(Potential::sine_gordon(), {1.45, 6.0}, 1024));
    } catch (const Error&) {
    }
    auto with_wave = [&](const std::string& name, double tol, auto&& fn) {
        if (!wave) return add(name, NAN, tol);
        guard(name, tol, [&] { return fn(*wave); });
    };
    with_wave("wave_periodic_point", 1e-6, [](const HillCoefficient& co) {
        return std::abs(discriminant(co, 0.0).delta - 2.0);
    });
    with_wave("abel_invariant_real", 1e-9, [](const HillCoefficient& co) {
        double worst = 0.0;
        for (int i = 0; i < 12; ++i) {
            const double nu = -60.0 + 62.0 * i / 11.0;
            worst = std::max(worst, std::abs(monodromy(co, nu).det() - 1.0));
        }
        return worst;
    });
    with_wave("abel_invariant_complex", 1e-9, [](const HillCoefficient& co) {
        double worst = 0.0;
        for (int i = 0; i < 6; ++i) {
            const std::complex<double> nu(-20.0 + 4.0 * i, 3.0 - 1.1 * i);
            worst = std::max(worst, std::abs(monodromy(co, nu).det() - 1.0));
        }
        return worst;
    });
    with_wave("finite_difference_delta_nu", 1e-6, [](const HillCoefficient& co) {
        double worst = 0.0;
        for (double nu : {-3.3, -0.7, 0.05}) {
            const double h = 1e-4 * (1.0 + std::abs(nu));
            const auto d = discriminant(co, nu);
            const double fd = (discriminant(co, nu + h).delta - discriminant(co, nu - h).delta) / (2.0 * h);
            worst = std::max(worst, std::abs(fd - d.delta_nu) / (1.0 + std::abs(d.delta_nu)));
        }
        return worst;
    });
    with_wave("finite_difference_delta_nunu", 1e-6, [](const HillCoefficient& co) {
        double worst = 0.0;
        for (double nu : {-3.3, -0.7, 0.05}) {
            const double h = 1e-4 * (1.0 + std::abs(nu));
            const auto d = discriminant(co, nu);
            const double fd = (discriminant(co, nu + h).delta_nu - discriminant(co, nu - h).delta_nu) / (2.0 * h);
            worst = std::max(worst, std::abs(fd - d.delta_nunu) / (1.0 + std::abs(d.delta_nunu)));
        }
        return worst;
    });
    guard("zero_potential_F", 1e-9, [] {
        const double c = 1.45;
        const auto coef = HillCoefficient::constant(2.0, 0.0);
        double worst = 0.0;
        for (int i = 0; i < 20; ++i) {
            const double nu = -50.0 + 49.9 * i / 19.0;
            const auto F = extended_F(coef, c, nu);
            if (F.kind != FKind::finite) return double(INFINITY);
            worst = std::max(worst, std::abs(F.value - c * c * nu) / std::abs(c * c * nu));
        }
        return worst;
    });
    return rows;
}

std::string format_selftest(const std::vector<SelftestRow>& rows) {
    auto sci = [](double x) {
        if (std::isnan(x)) return std::string("nan");
        std::array<char, 40> buf{};
        const auto r = std::to_chars(buf.data(), buf.data() + buf.size(), x, std::chars_format::scientific, 3);
        return std::string(buf.data(), r.ptr);
    };
    auto pad = [](std::string s, std::size_t w) {
        s.resize(std::max(w, s.size() + 1), ' ');
        return s;
    };
    std::ostringstream os;
    os << pad("check", 34) << pad("measured", 12) << pad("tolerance", 12) << "result\n";
    std::size_t failed = 0;
    for (const auto& r : rows) {
        os << pad(r.name, 34) << pad(sci(r.measured), 12) << pad(sci(r.tolerance), 12) << (r.pass ? "PASS" : "FAIL")
           << '\n';
        if (!r.pass) ++failed;
    }
    os << (rows.size() - failed) << "/" << rows.size() << " passed\n";
    return os.str();
}

int cmd_analyze(const RunConfig& cfg, std::ostream& log) {
    return guarded(log, [&] {
        set_thread_count(cfg.threads);
        prepare_out_dir(cfg.out_dir);
        const auto out = analyze(cfg);
        write_file(cfg.out_dir / "report.json", out.json);
        if (cfg.format == Format::csv) {
            write_file(cfg.out_dir / "bands.csv", out.bands_csv);
            write_file(cfg.out_dir / "hh_points.csv", out.hh_csv);
        }
        if (!out.consistent) {
            log << "consistency error: see checks.failures in " << (cfg.out_dir / "report.json").string() << '\n';
            return kConsistencyError;
        }
        log << "wrote " << (cfg.out_dir / "report.json").string() << '\n';
        return kOk;
    });
}

int cmd_curve(const RunConfig& cfg, std::ostream& log) {
    return guarded(log, [&] {
        set_thread_count(cfg.threads);
        prepare_out_dir(cfg.out_dir);
        if (cfg.format == Format::json) {
            // Same table as an array of row objects; infinite F becomes null.
            const auto t = curve_table(cfg);
            json rows = json::array();
            for (std::size_t k = 0; k < t.beta.size(); ++k) {
                const auto& v = t.F[k];
                rows.push_back({{"beta", number(t.beta[k])},
                                {"nu", number(v.nu)},
                                {"F", v.kind == FKind::finite ? number(v.value) : json(nullptr)},
                                {"kind", to_string(v)}});
            }
            write_file(cfg.out_dir / "curve.json", rows.dump(1) + "\n");
            log << "wrote " << (cfg.out_dir / "curve.json").string() << '\n';
        } else {
            write_file(cfg.out_dir / "curve.csv", curve_csv(cfg));
            log << "wrote " << (cfg.out_dir / "curve.csv").string() << '\n';
        }
        return kOk;
    });
}

int cmd_spectrum(const RunConfig& cfg, std::ostream& log) {
    return guarded(log, [&] {
        set_thread_count(cfg.threads);
        prepare_out_dir(cfg.out_dir);
        const auto out = spectrum(cfg);
        write_file(cfg.out_dir / "axis_bands.csv", out.axis_bands_csv);
        write_file(cfg.out_dir / "curves.json", out.curves_json);
        log << "wrote " << (cfg.out_dir / "axis_bands.csv").string() << " and curves.json\n";
        return kOk;
    });
}

int cmd_selftest(std::ostream& out, const SelftestHooks& hooks) {
    const auto rows = selftest(hooks);
    out << format_selftest(rows);
    const bool ok = std::all_of(rows.begin(), rows.end(), [](const auto& r) { return r.pass; });
    return ok ? kOk : kNumericalError;
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Floquet spectra and Hamiltonian-Hopf points of Klein-Gordon periodic waves"};
    app.set_version_flag("--version", std::string(KGHOPF_VERSION));
    app.require_subcommand(1);
    app.footer(
        "Config file (INI):\n"
        "  [wave]       potential = sine_gordon | polynomial, c, E, well (optional), nodes = 1024\n"
        "  [potential]  polynomial coefficients c0, c1, ... for V(u) = sum c_i u^i\n"
        "  [hill]       nu_min = -(40/T)^2, scan_step = 0.0625 (fraction of pi/T in sqrt(-nu))\n"
        "  [criterion]  c4_depth = -(4 pi/T)^2\n"
        "  [spectrum]   re_min, re_max, im_min, im_max (default: Im in [0, |c^2-1| sqrt(-nu_min)],\n"
        "               Re in +-1/4 of that), nx = 256, ny = 256\n"
        "  [curve]      samples = 2000\n"
        "  [output]     dir = ., format = json for analyze and csv for curve, threads = 0 (all cores)\n"
        "Exit codes: 0 ok, 1 config, 2 consistency, 3 numerical.");

    std::string config_path, out_dir, format;
    unsigned threads = 0;
    std::vector<std::string> inject;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "config file")->required();
        sub->add_option("--out", out_dir, "output directory (overrides [output] dir)");
        sub->add_option("--format", format, "csv or json (overrides [output] format)")
            ->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--threads", threads, "worker cap, 0 = all cores");
    };
    auto* analyze_cmd = app.add_subcommand("analyze", "band structure, HH points and corollary report");
    auto* curve_cmd = app.add_subcommand("curve", "F(nu(i beta)) and nu(i beta) on a beta grid");
    auto* spectrum_cmd = app.add_subcommand("spectrum", "spectral curves in a lambda window");
    auto* selftest_cmd = app.add_subcommand("selftest", "analytic oracle suite");
    for (auto* s : {analyze_cmd, curve_cmd, spectrum_cmd}) add_common(s);
    selftest_cmd->add_option("--threads", threads, "worker cap, 0 = all cores");
    selftest_cmd->add_option("--tighten", inject, "scale a row's tolerance by 1e-30 (testing hook)")->group("");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kConfigError;
    }

    if (*selftest_cmd) {
        set_thread_count(threads);
        SelftestHooks hooks;
        for (const auto& name : inject) hooks.tolerance_scale.emplace_back(name, 1e-30);
        return cmd_selftest(out, hooks);
    }

    RunConfig cfg;
    try {
        cfg = load_config(config_path);
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        if (!format.empty()) cfg.format = parse_format(format);
        if (threads != 0) cfg.threads = threads;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigError;
    }
    if (*analyze_cmd) return cmd_analyze(cfg, err);
    if (*curve_cmd) return cmd_curve(cfg, err);
    return cmd_spectrum(cfg, err);
}

}  // namespace kghopf::cli
