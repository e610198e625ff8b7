#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "kghopf/cli.hpp"
#include "kghopf/errors.hpp"
#include "kghopf/parallel.hpp"
#include "kghopf/spectrum2d.hpp"

namespace py = pybind11;
using namespace kghopf;

PYBIND11_MODULE(_kghopf, m) {
    m.doc() = "Floquet spectra and Hamiltonian-Hopf points of Klein-Gordon periodic traveling waves.";

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<NoOrbitError>(m, "NoOrbitError", base.ptr());
    py::register_exception<DomainError>(m, "DomainError", base.ptr());
    py::register_exception<IntegrationError>(m, "IntegrationError", base.ptr());
    py::register_exception<ScanResolutionError>(m, "ScanResolutionError", base.ptr());
    py::register_exception<NotAWaveError>(m, "NotAWaveError", base.ptr());

    m.def("set_thread_count", &set_thread_count, py::arg("n"));

    py::class_<Potential>(m, "Potential")
        .def_static("sine_gordon", &Potential::sine_gordon)
        .def_static("polynomial", &Potential::polynomial, py::arg("coeffs"))
        .def_static("from_name", &Potential::from_name, py::arg("name"), py::arg("params") = Potential::Params{})
        .def_property_readonly("name", &Potential::name)
        .def_property_readonly("period", &Potential::period)
        .def("__call__", [](const Potential& p, double u) {
            const auto v = p.eval(u);
            return py::make_tuple(v.V, v.Vp, v.Vpp);
        });

    py::enum_<Regime>(m, "Regime").value("librational", Regime::librational).value("rotational", Regime::rotational);

    py::class_<WaveProfile>(m, "WaveProfile")
        .def_property_readonly("period", &WaveProfile::period)
        .def_property_readonly("regime", &WaveProfile::regime)
        .def_property_readonly("winding", &WaveProfile::winding)
        .def_property_readonly("nodes", &WaveProfile::nodes)
        .def("energy_drift", &WaveProfile::energy_drift)
        .def("f", &WaveProfile::f, py::arg("z"))
        .def("fp", &WaveProfile::fp, py::arg("z"));

    m.def(
        "build_profile",
        [](const Potential& p, double c, double E, std::size_t nodes) { return build_profile(p, {c, E}, nodes); },
        py::arg("potential"), py::arg("c"), py::arg("E"), py::arg("nodes") = 1024);
    m.def(
        "compute_period", [](const Potential& p, double c, double E) { return compute_period(p, {c, E}); },
        py::arg("potential"), py::arg("c"), py::arg("E"));

    py::class_<HillCoefficient>(m, "HillCoefficient")
        .def_static("constant", &HillCoefficient::constant, py::arg("T"), py::arg("P0"))
        .def_static("synthetic", &HillCoefficient::synthetic, py::arg("T"), py::arg("P"))
        .def_property_readonly("period", &HillCoefficient::period)
        .def("__call__", &HillCoefficient::operator(), py::arg("z"));
    m.def("hill_coefficient", &hill_coefficient, py::arg("profile"));

    py::class_<Discriminant>(m, "Discriminant")
        .def_readonly("delta", &Discriminant::delta)
        .def_readonly("delta_nu", &Discriminant::delta_nu)
        .def_readonly("delta_nunu", &Discriminant::delta_nunu)
        .def_readonly("disc", &Discriminant::disc);
    m.def(
        "discriminant", [](const HillCoefficient& c, double nu) { return discriminant(c, nu); }, py::arg("coef"),
        py::arg("nu"));
    m.def(
        "monodromy",
        [](const HillCoefficient& c, std::complex<double> nu) { return monodromy_matrix(c, nu); },
        py::arg("coef"), py::arg("nu"), "Monodromy entries [m11, m12, m21, m22].");

    py::class_<Band>(m, "Band")
        .def_property_readonly("lower", [](const Band& b) { return b.lower.nu; })
        .def_property_readonly("upper", [](const Band& b) { return b.upper.nu; });
    py::class_<Gap>(m, "Gap").def_readonly("lo", &Gap::lo).def_readonly("hi", &Gap::hi).def_readonly(
        "truncated", &Gap::truncated);
    py::class_<BandStructure>(m, "BandStructure")
        .def_readonly("bands", &BandStructure::bands)
        .def_readonly("gaps", &BandStructure::gaps)
        .def_readonly("nu_max", &BandStructure::nu_max);
    m.def(
        "band_structure", [](const HillCoefficient& c, double nu_min) { return band_structure(c, nu_min); },
        py::arg("coef"), py::arg("nu_min"));

    m.def(
        "extended_F",
        [](const HillCoefficient& coef, double c, double nu) {
            const auto v = extended_F(coef, c, nu);
            return py::make_tuple(v.kind == FKind::finite ? v.value : v.excess(), to_string(v));
        },
        py::arg("coef"), py::arg("c"), py::arg("nu"), "Returns (F, kind); F is +-inf when kind is +inf/-inf.");

    py::class_<HHPoint>(m, "HHPoint")
        .def_readonly("nu_star", &HHPoint::nu_star)
        .def_readonly("beta", &HHPoint::beta)
        .def_readonly("band_index", &HHPoint::band_index)
        .def_readonly("residual", &HHPoint::residual)
        .def_property_readonly("transversality", [](const HHPoint& p) { return p.trans.min_abs(); });
    m.def(
        "scan_hh_points",
        [](const HillCoefficient& coef, double c, const BandStructure& bands) {
            return scan_hh_points(coef, c, bands).points;
        },
        py::arg("coef"), py::arg("c"), py::arg("bands"));
    m.def("default_nu_min", &default_nu_min, py::arg("T"));

    py::class_<Indices>(m, "Indices")
        .def_readonly("gamma_M", &Indices::gamma_M)
        .def_readonly("gamma_P", &Indices::gamma_P)
        .def_readonly("delta_nu_at_0", &Indices::delta_nu_at_0);
    m.def(
        "compute_indices", [](const HillCoefficient& coef, double c) { return compute_indices(coef, c); },
        py::arg("coef"), py::arg("c"));

    py::class_<Window>(m, "Window")
        .def(py::init<double, double, double, double>(), py::arg("re_min"), py::arg("re_max"), py::arg("im_min"),
             py::arg("im_max"));
    py::class_<SpectralCurves>(m, "SpectralCurves")
        .def_readonly("segments", &SpectralCurves::segments)
        .def_readonly("axis_bands", &SpectralCurves::axis_bands)
        .def_readonly("values", &SpectralCurves::values)
        .def("axis_crossings", &SpectralCurves::axis_crossings);
    m.def(
        "trace_spectrum",
        [](const HillCoefficient& coef, double c, const Window& w, std::size_t nx, std::size_t ny) {
            py::gil_scoped_release release;
            return trace_spectrum(coef, c, w, nx, ny);
        },
        py::arg("coef"), py::arg("c"), py::arg("window"), py::arg("nx"), py::arg("ny"));

    m.def(
        "analyze",
        [](const std::string& config_text) {
            std::istringstream is(config_text);
            const auto out = cli::analyze(cli::parse_config(is));
            return py::make_tuple(out.json, out.consistent);
        },
        py::arg("config"), "Runs the analysis for an INI config string; returns (report_json, consistent).");
    m.def(
        "selftest",
        []() {
            const auto rows = cli::selftest();
            py::list out;
            for (const auto& r : rows) out.append(py::make_tuple(r.name, r.measured, r.tolerance, r.pass));
            return out;
        });
    m.def("run", [](std::vector<std::string> args) {
        args.insert(args.begin(), "kghopf");
        std::vector<char*> argv;
        for (auto& a : args) argv.push_back(a.data());
        std::ostringstream out, err;
        const int code = cli::run(int(argv.size()), argv.data(), out, err);
        return py::make_tuple(code, out.str(), err.str());
    }, py::arg("args"), "Command-line entry point; returns (exit_code, stdout, stderr).");
}
