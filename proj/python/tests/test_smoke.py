import json
import math

import pytest

import kghopf


def test_period_and_profile():
    sg = kghopf.Potential.sine_gordon()
    prof = kghopf.build_profile(sg, 1.45, 6.0)
    assert prof.regime == kghopf.Regime.rotational
    assert prof.period == pytest.approx(2.10226249895782, rel=1e-10)
    assert prof.energy_drift() < 1e-8
    assert abs(prof.winding) == pytest.approx(2 * math.pi)


def test_constant_coefficient():
    coef = kghopf.HillCoefficient.constant(2.5, 1.0)
    d = kghopf.discriminant(coef, -3.0)
    assert d.delta == pytest.approx(2 * math.cos(2.0 * 2.5), abs=1e-9)
    m11, m12, m21, m22 = kghopf.monodromy(coef, complex(-3.0, 0.5))
    assert abs(m11 * m22 - m12 * m21 - 1) < 1e-10


def test_hh_points_and_indices():
    c = 1.45
    coef = kghopf.hill_coefficient(kghopf.build_profile(kghopf.Potential.sine_gordon(), c, 6.0))
    bands = kghopf.band_structure(coef, kghopf.default_nu_min(coef.period))
    hh = kghopf.scan_hh_points(coef, c, bands)
    assert len(hh) == 2
    for p in hh:
        F, kind = kghopf.extended_F(coef, c, p.nu_star)
        assert kind == "finite"
        assert F == pytest.approx(p.nu_star, abs=1e-8)
    idx = kghopf.compute_indices(coef, c)
    assert (idx.gamma_M, idx.gamma_P) == (1, 1)


def test_trace_spectrum_small():
    c = 1.45
    coef = kghopf.hill_coefficient(kghopf.build_profile(kghopf.Potential.sine_gordon(), c, 6.0))
    sc = kghopf.trace_spectrum(coef, c, kghopf.Window(-0.3, 0.3, 0.0, 3.0), 64, 64)
    assert len(sc.axis_crossings()) == 2
    assert len(sc.axis_bands) == 2


def test_analyze_and_errors():
    report, consistent = kghopf.analyze("[wave]\nc = 1.4\nE = 1.5\n")
    assert consistent
    assert json.loads(report)["wave"]["regime"] == "librational"
    with pytest.raises(kghopf.NoOrbitError):
        kghopf.analyze("[wave]\nc = 1.45\nE = 2\n")
    with pytest.raises(kghopf.ConfigError):
        kghopf.analyze("[wave]\nc = 1\nE = 2\n")


def test_selftest_and_cli():
    assert all(row[3] for row in kghopf.selftest())
    code, out, _ = kghopf.run(["selftest"])
    assert code == 0 and "passed" in out
