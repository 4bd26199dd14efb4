import math

import numpy as np
import pytest

import catsim


def test_ideal_amplification_reaches_cat_amplitudes():
    p = catsim.SystemParams()
    r = catsim.amplify_ideal(12, p)
    assert r["amplitude_up"].real == pytest.approx(-2.4, abs=1e-6)
    assert r["amplitude_down"].real == pytest.approx(2.4, abs=1e-6)
    assert r["fidelity"] > 1 - 1e-10
    assert np.linalg.norm(r["state"]) == pytest.approx(1.0, abs=1e-10)


def test_cat_matches_coherent_states():
    p = catsim.SystemParams()
    cat = catsim.ideal_cat(12, p)
    up = catsim.coherent_state(-2.4, 64)
    assert abs(np.vdot(up, cat[:64])) ** 2 == pytest.approx(0.5, abs=1e-10)
    assert catsim.qubit_entropy(cat) == pytest.approx(math.log(2), abs=1e-6)


def test_coherence_probe():
    p = catsim.SystemParams(n_trunc=96)
    coherent = catsim.coherence_probe(12, p, True)
    mixed = catsim.coherence_probe(12, p, False)
    assert coherent.p_plus == pytest.approx(0.75, abs=1e-4)
    assert mixed.p_plus == pytest.approx(0.5, abs=1e-12)


def test_detection_coefficients_normalized():
    up, down, eps_bar = catsim.detection_coefficients(1.92, 1.92)
    assert abs(up) ** 2 + abs(down) ** 2 == pytest.approx(1.0, abs=1e-12)
    assert eps_bar == pytest.approx(1.92 * math.sqrt(2))


def test_truncation_guard():
    with pytest.raises(ValueError):
        catsim.coherent_state(6.0, 32)


def test_run_config_renders_csv():
    text = "[scenario]\nname = mrfm\nn_pulses = 12\nm = 2\n"
    out = catsim.run_config(text)
    header, row = out.strip().split("\n")
    assert header.startswith("n_pulses,m,amplitude,resolution")
    assert row.split(",")[2] == "4.8"


def test_config_errors_name_the_field():
    with pytest.raises(ValueError, match="sweep.step"):
        catsim.run_config("[scenario]\nname = sweep-fidelity\n[sweep]\nvariable = eps_perp\nstart = 10\nstop = 20\nstep = -1\n")
