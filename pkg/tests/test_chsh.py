"""Joint distributions, correlators, CHSH, and the Tsirelson scan."""
import numpy as np
import pytest

from dualgeo import chsh as C
from dualgeo.quantum import BipartiteState, DimensionMismatchError

RNG = np.random.default_rng(20240821)

A_OPT = (0.0, np.pi / 2.0, np.pi / 4.0, 3.0 * np.pi / 4.0)


def random_two_qubit():
    a = RNG.normal(size=(2, 2)) + 1j * RNG.normal(size=(2, 2))
    a /= np.linalg.norm(a)
    return BipartiteState(a)


# -- settings and distributions -----------------------------------------


def test_setting_validation():
    with pytest.raises(ValueError):
        C.MeasurementSetting(np.inf)
    with pytest.raises(ValueError):
        C.MeasurementSetting(0.0, party="carol")


def test_joint_distribution_normalized():
    d = C.joint_distribution(
        C.singlet(), C.MeasurementSetting(0.3), C.MeasurementSetting(1.1, C.BOB)
    )
    assert abs(d.probs.sum() - 1.0) < 1e-12
    assert np.all(d.probs >= 0.0)


def test_singlet_correlator_closed_form():
    # E(a, b) = -cos(a - b) for the singlet
    for a, b in ((0.0, 0.0), (0.3, 1.0), (2.0, 0.5)):
        d = C.joint_distribution(
            C.singlet(), C.MeasurementSetting(a), C.MeasurementSetting(b, C.BOB)
        )
        assert abs(C.correlator(d) - (-np.cos(a - b))) < 1e-12


def test_singlet_marginals_uniform():
    d = C.joint_distribution(
        C.singlet(), C.MeasurementSetting(0.7), C.MeasurementSetting(2.1, C.BOB)
    )
    assert abs(d.probs.sum(axis=1)[0] - 0.5) < 1e-12
    assert abs(d.probs.sum(axis=0)[0] - 0.5) < 1e-12


def test_geometric_correlator_identity():
    for _ in range(200):
        st = random_two_qubit()
        d = C.joint_distribution(
            st,
            C.MeasurementSetting(RNG.uniform(0, 2 * np.pi)),
            C.MeasurementSetting(RNG.uniform(0, 2 * np.pi), C.BOB),
        )
        assert abs(C.correlator(d) - C.geometric_correlator(d)) < 1e-12


def test_joint_distribution_needs_two_qubits():
    st = BipartiteState(np.eye(3) / np.sqrt(3.0))
    with pytest.raises(DimensionMismatchError):
        C.joint_distribution(st, C.MeasurementSetting(0.0), C.MeasurementSetting(0.0, C.BOB))


# -- CHSH ----------------------------------------------------------------


def test_chsh_singlet_tsirelson_settings():
    res = C.chsh_S(C.singlet(), *A_OPT)
    assert abs(res.s_value - (-C.TSIRELSON_BOUND)) < 1e-12
    assert res.regime == "quantum"


def test_chsh_product_state_classical():
    res = C.chsh_S(C.product_state(), *A_OPT)
    assert abs(res.s_value) <= C.CLASSICAL_BOUND + 1e-12
    assert res.regime == "classical"


def test_chsh_correlator_bookkeeping():
    res = C.chsh_S(C.singlet(), *A_OPT)
    s = res.correlators["ab"] - res.correlators["ab'"] + res.correlators["a'b"] + res.correlators["a'b'"]
    assert abs(s - res.s_value) < 1e-12


def test_loop_excess():
    assert C.loop_excess(C.singlet(), *A_OPT) == pytest.approx(
        C.TSIRELSON_BOUND - 2.0, abs=1e-12
    )
    assert C.loop_excess(C.product_state(), *A_OPT) == 0.0


def test_classical_polytope():
    res = C.classical_polytope_max()
    assert res.max_value == 2.0
    assert res.min_value == -2.0
    assert len(res.maximizers) == 8
    for aa, aap, bb, bbp in res.maximizers:
        assert aa * bb - aa * bbp + aap * bb + aap * bbp == 2


def test_schmidt_pair_weight_validation():
    with pytest.raises(ValueError):
        C.schmidt_pair(1.5)


# -- scans ---------------------------------------------------------------


def test_tsirelson_scan_singlet():
    table = C.tsirelson_scan(C.singlet(), 24)
    assert abs(table.meta["max_abs_S"] - C.TSIRELSON_BOUND) < 1e-6
    assert table.meta["regime"] == "quantum"


def test_tsirelson_scan_product_capped_at_two():
    table = C.tsirelson_scan(C.product_state(), 16)
    assert table.meta["max_abs_S"] <= 2.0 + 1e-9


def test_tsirelson_scan_partial_entanglement_oracle():
    p = 0.9
    table = C.tsirelson_scan(C.schmidt_pair(p), 24)
    oracle = 2.0 * np.sqrt(1.0 + 4.0 * p * (1.0 - p))
    assert abs(table.meta["max_abs_S"] - oracle) < 1e-6


def test_tsirelson_scan_never_super_quantum():
    for p in (0.5, 0.7, 1.0):
        table = C.tsirelson_scan(C.schmidt_pair(p), 12)
        assert table.meta["max_abs_S"] <= C.TSIRELSON_BOUND + 1e-9


def test_tsirelson_scan_grid_floor():
    with pytest.raises(ValueError):
        C.tsirelson_scan(C.singlet(), 4)


def test_scan_table_columns():
    table = C.tsirelson_scan(C.singlet(), 12)
    assert table.columns == ("a", "a_prime", "b", "b_prime", "S", "abs_S", "refined")
    assert len(table.rows) == 2
    # refined row at least as good as the grid row
    assert table.rows[1][5] >= table.rows[0][5] - 1e-12
