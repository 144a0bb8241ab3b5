import cmath
import math

import _coniwave as cw


def test_gamma_anchor():
    g = cw.gamma(1 + 1j)
    assert abs(abs(g) ** 2 - math.pi / math.sinh(math.pi)) < 1e-12


def test_lz_coefficients_unitary():
    for eta2 in (0.0, 0.5, 1.0, 2.5):
        a, b = cw.lz_coefficients(eta2)
        assert abs(a * a + abs(b) ** 2 - 1.0) < 1e-12
    a0, b0 = cw.lz_coefficients(0.0)
    assert a0 == 1.0 and b0 == 0


def test_scattering_matrix_unitary():
    s = cw.scattering_matrix(1.0)
    det = s[0][0] * s[1][1] - s[0][1] * s[1][0]
    assert abs(det - 1.0) < 1e-12


def test_lz_transition_matches_a_squared():
    for eta2 in (0.5, 1.0):
        prob = cw.lz_transition(eta2, 1.0, 200.0)
        a, _ = cw.lz_coefficients(eta2)
        assert abs(prob - a * a) < 0.01


def test_classical_crossing():
    tr = cw.classical_trajectory(q0=[-0.5, 0.0], p0=[1.25, 0.0], t0=0.0, t1=2.0)
    assert tr["crossed"]
    assert abs(tr["t_flat"] - 0.5) < 1e-6
    assert abs(tr["r"] - 0.75) < 1e-6


def test_config_roundtrip():
    cfg = cw.parse_config(
        """
[run]
kind = crossing-single
epsilons = 0.02 0.01

[initial]
q0 = -0.5 0
p0 = 1.25 0
"""
    )
    assert cfg["epsilons"] == [0.02, 0.01]
    assert cfg["model"] == "linear-isotropic"


def test_config_rejects_unknown_keys():
    text = "[run]\nknid = oops\n[initial]\nq0 = -1 0\np0 = 2 0\n"
    try:
        cw.parse_config(text)
    except Exception as e:
        assert "unknown key" in str(e)
    else:
        raise AssertionError("expected a config error")
