import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import C2

from latticewave.ptwave import (
    IDENTITY_TOL,
    PTWaveState,
    WellError,
    causality_wave,
    classify_type,
    close_family,
    evaluate_criteria,
    jump_conditions,
    relative_flux,
    time_reversed,
    xi_and_upsilon,
)
from latticewave.spectral import OutOfBandError, kappa_single

speeds = st.floats(C2 + 1e-3, 0.995).flatmap(lambda c: st.sampled_from([c, -c]))
amps = st.floats(0.0, 3.0)


def test_jump_conditions():
    jR, jV = jump_conditions(0.6)
    assert jR == pytest.approx(3.125) and jV == pytest.approx(-1.875)
    for bad in (1.0, -1.2):
        with pytest.raises(OutOfBandError):
            jump_conditions(bad)


@given(speeds, amps, amps, st.floats(-2, 2))
def test_family_identities(c, am, ap, mv):
    s = close_family(c, am, ap, mv)
    scale = max(1.0, abs(s.Xi))
    assert abs(c * s.Upsilon - s.Xi) <= IDENTITY_TOL * scale
    assert abs(-2 * c * s.mean_R - s.Xi) <= IDENTITY_TOL * scale
    for res in s.jump_residuals():
        assert abs(res) <= IDENTITY_TOL * max(1.0, abs(s.E_osc_minus) + abs(s.E_osc_plus))
    assert s.mean_V == pytest.approx(mv)
    assert (s.Xi >= 0) == (c * s.Upsilon >= 0) or abs(s.Xi) < 1e-14


def test_validation():
    with pytest.raises(ValueError):
        close_family(0.8, -1.0, 0.0)
    with pytest.raises(ZeroDivisionError):
        close_family(0.0, 1.0, 0.0)
    with pytest.raises(OutOfBandError):
        close_family(0.1, 1.0, 0.0)


def test_well_check():
    s = close_family(0.95, 0.0, 30.0)  # mean strain pushed far into the right well
    assert not s.sign_ok
    with pytest.raises(WellError):
        xi_and_upsilon(s)
    good = causality_wave(0.8)
    xi, ups = xi_and_upsilon(good)
    assert xi == pytest.approx(0.8 * ups)


def test_types():
    assert classify_type(0.95) == "I" and classify_type(-0.95) == "I"
    assert classify_type(0.6) == "II" and classify_type(-0.3) == "II"
    for bad in (0.2, 1.0, 0.0):
        with pytest.raises(OutOfBandError):
            classify_type(bad)


def test_causality_wave_examples():
    s = causality_wave(0.95)
    assert s.A_plus == 0.0
    assert s.A_minus == pytest.approx(19.294, abs=1e-3)
    assert s.Xi == pytest.approx(18.33, abs=1e-2)
    assert s.Upsilon == pytest.approx(19.294, abs=1e-3)
    assert (s.R_minus, s.R_plus) == pytest.approx((-19.903, 0.609), abs=1e-3)
    s = causality_wave(0.6)
    assert s.A_minus == pytest.approx(1.7414, abs=1e-4)
    assert s.Xi == pytest.approx(1.0448, abs=1e-4)
    left = causality_wave(-0.6)
    assert left.A_minus == 0.0 and left.A_plus == pytest.approx(s.A_minus)
    assert left.Xi == pytest.approx(s.Xi)


def test_causality_amplitude_formula():
    for c in (0.3, 0.5, 0.7, 0.9):
        cg = kappa_single(c).c_gr
        s = causality_wave(c)
        assert s.A_minus == pytest.approx(abs(2 * c / (cg - c)))
        assert s.jump_E_osc == pytest.approx(-2 * c**2 / (cg - c) ** 2)
        assert s.Xi == pytest.approx(2 * c**2 / (c - cg))


def test_truth_table():
    r = evaluate_criteria(causality_wave(0.95))
    assert (r.som1, r.som2, r.wave_type) == (True, False, "I")
    r = evaluate_criteria(causality_wave(0.6))
    assert (r.som1, r.som2, r.wave_type) == (True, True, "II")
    r = evaluate_criteria(close_family(0.95, 0.0, 1.0))
    assert not r.som1 and not r.entropy and not r.causality_consistent
    assert r.to_dict()["wave_type"] == "I"


@given(speeds, amps, amps)
def test_som1_equals_entropy(c, am, ap):
    r = evaluate_criteria(close_family(c, am, ap))
    assert r.som1 == r.entropy


def test_time_reversal_swaps_production_sign():
    s = causality_wave(0.7)
    b = time_reversed(s)
    assert b.c_ph == -0.7 and b.c_gr == pytest.approx(-s.c_gr)
    assert b.Xi == pytest.approx(-s.Xi)
    assert not evaluate_criteria(b).som1


def test_relative_flux_points_away_for_causality_waves():
    for c in (0.3, 0.6, 0.95, -0.5, -0.9):
        qm, qp = relative_flux(causality_wave(c))
        # only the side behind the interface carries a tail
        if c > 0:
            assert qm < 0 and qp == 0
        else:
            assert qm == 0 and qp > 0
        assert evaluate_criteria(causality_wave(c)).relative_flux_away


def test_serialisation_keys():
    d = causality_wave(0.8).to_dict()
    for key in ("c_ph", "kappa", "c_gr", "R_minus", "R_plus", "V_minus", "V_plus", "A_minus", "A_plus",
                "jump_R", "jump_V", "mean_R", "Xi", "Upsilon", "direction", "sign_ok"):
        assert key in d
    assert d["direction"] == "right"
    assert isinstance(PTWaveState(**{k: d[k] for k in PTWaveState.__dataclass_fields__}), PTWaveState)


def test_confinement():
    assert causality_wave(0.6).confined and causality_wave(0.95).confined
    d = causality_wave(0.8).to_dict()
    fields = {k: d[k] for k in PTWaveState.__dataclass_fields__}
    assert not PTWaveState(**{**fields, "A_plus": fields["R_plus"] + 0.1}).confined
    s = close_family(0.8, 0.1, 0.1)
    assert s.confined == (s.R_plus - 0.1 > 0 and s.R_minus + 0.1 < 0)
    assert math.isclose(s.E_osc_plus, 0.005)
