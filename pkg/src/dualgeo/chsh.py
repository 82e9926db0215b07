"""Bipartite measurement engine: joint distributions, correlators, CHSH sums,
the classical polytope, Tsirelson-point scans, and the geometric correlator.

Analyzer directions live in the z-x great circle: the +/-1 observable for an
angle a is cos(a) sigma_z + sin(a) sigma_x.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np
from scipy.optimize import minimize

from .quantum import PAULI_X, PAULI_Z, BipartiteState, DimensionMismatchError
from .tables import ScanTable

ALICE = "alice"
BOB = "bob"

CLASSICAL_BOUND = 2.0
TSIRELSON_BOUND = 2.0 * np.sqrt(2.0)
_REGIME_TOL = 1e-9


@dataclass(frozen=True)
class MeasurementSetting:
    angle: float
    party: str = ALICE

    def __post_init__(self):
        if not np.isfinite(self.angle):
            raise ValueError("setting angle must be finite")
        if self.party not in (ALICE, BOB):
            raise ValueError(f"unknown party {self.party!r}")


@dataclass(frozen=True)
class JointDistribution:
    """p(s_A, s_B); probs[i, j] with index 0 -> +1 and 1 -> -1."""

    probs: np.ndarray
    settings: tuple  # (MeasurementSetting, MeasurementSetting)

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float)
        object.__setattr__(self, "probs", p)
        if p.shape != (2, 2):
            raise ValueError("joint distribution needs a 2x2 probability table")
        if np.any(p < -1e-12) or abs(p.sum() - 1.0) > 1e-12:
            raise ValueError("probabilities must be nonnegative and sum to 1")


@dataclass(frozen=True)
class CHSHResult:
    s_value: float
    settings: tuple  # (a, a_prime, b, b_prime) angles
    correlators: dict  # {"ab": E(a,b), ...}
    regime: str


def observable(angle: float) -> np.ndarray:
    return np.cos(angle) * PAULI_Z + np.sin(angle) * PAULI_X


def singlet() -> BipartiteState:
    return BipartiteState(np.array([[0.0, 1.0], [-1.0, 0.0]]) / np.sqrt(2.0))


def product_state(a=(1.0, 0.0), b=(1.0, 0.0)) -> BipartiteState:
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    a = a / np.linalg.norm(a)
    b = b / np.linalg.norm(b)
    return BipartiteState(np.outer(a, b))


def schmidt_pair(p: float) -> BipartiteState:
    """sqrt(p)|00> + sqrt(1-p)|11>."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("weight must lie in [0, 1]")
    return BipartiteState(np.diag([np.sqrt(p), np.sqrt(1.0 - p)]))


def joint_distribution(
    state: BipartiteState, a: MeasurementSetting, b: MeasurementSetting
) -> JointDistribution:
    """Outcome probabilities from the +/-1 projectors of the two analyzers."""
    if state.dims != (2, 2):
        raise DimensionMismatchError("CHSH engine needs a two-qubit state")
    eye = np.eye(2, dtype=complex)
    proj_a = [(eye + s * observable(a.angle)) / 2.0 for s in (+1.0, -1.0)]
    proj_b = [(eye + s * observable(b.angle)) / 2.0 for s in (+1.0, -1.0)]
    c = state.amplitudes
    probs = np.empty((2, 2))
    for i in range(2):
        for j in range(2):
            # <psi| P_a (x) P_b |psi> = tr(C^dag P_a C P_b^T)
            probs[i, j] = np.trace(c.conj().T @ proj_a[i] @ c @ proj_b[j].T).real
    probs = np.clip(probs, 0.0, None)
    probs /= probs.sum()
    return JointDistribution(probs, (a, b))


def correlator(d: JointDistribution) -> float:
    """E = sum s_A s_B p(s_A, s_B)."""
    p = d.probs
    return float(p[0, 0] + p[1, 1] - p[0, 1] - p[1, 0])


def geometric_correlator(d: JointDistribution) -> float:
    """1 - 2 Omega with Omega the outcome-disagreement probability.

    Algebraically identical to the correlator for two-outcome distributions.
    """
    omega = float(d.probs[0, 1] + d.probs[1, 0])
    return 1.0 - 2.0 * omega


def _correlator_angles(state: BipartiteState, angle_a: float, angle_b: float) -> float:
    c = state.amplitudes
    x = observable(angle_a) @ c @ observable(angle_b).T
    return float(np.sum(c.conj() * x).real)


def chsh_S(
    state: BipartiteState,
    a: float,
    a_prime: float,
    b: float,
    b_prime: float,
) -> CHSHResult:
    """S = E(a,b) - E(a,b') + E(a',b) + E(a',b')."""
    es = {
        "ab": correlator(
            joint_distribution(state, MeasurementSetting(a), MeasurementSetting(b, BOB))
        ),
        "ab'": correlator(
            joint_distribution(state, MeasurementSetting(a), MeasurementSetting(b_prime, BOB))
        ),
        "a'b": correlator(
            joint_distribution(state, MeasurementSetting(a_prime), MeasurementSetting(b, BOB))
        ),
        "a'b'": correlator(
            joint_distribution(
                state, MeasurementSetting(a_prime), MeasurementSetting(b_prime, BOB)
            )
        ),
    }
    s = es["ab"] - es["ab'"] + es["a'b"] + es["a'b'"]
    if abs(s) <= CLASSICAL_BOUND + _REGIME_TOL:
        regime = "classical"
    elif abs(s) <= TSIRELSON_BOUND + _REGIME_TOL:
        regime = "quantum"
    else:
        regime = "super-quantum"
    return CHSHResult(float(s), (a, a_prime, b, b_prime), es, regime)


@dataclass(frozen=True)
class PolytopeResult:
    max_value: float
    min_value: float
    maximizers: list  # deterministic strategies (A(a), A(a'), B(b), B(b')) achieving max


def classical_polytope_max() -> PolytopeResult:
    """Enumerate all 16 deterministic local strategies; the maximum is exactly 2."""
    best = -np.inf
    worst = np.inf
    maximizers = []
    for strat in product((+1, -1), repeat=4):
        aa, aap, bb, bbp = strat
        s = aa * bb - aa * bbp + aap * bb + aap * bbp
        if s > best:
            best = s
            maximizers = [strat]
        elif s == best:
            maximizers.append(strat)
        worst = min(worst, s)
    return PolytopeResult(float(best), float(worst), maximizers)


def loop_excess(state, a, a_prime, b, b_prime) -> float:
    """Geometric surplus over the classical bound: max(0, |S| - 2)."""
    res = chsh_S(state, a, a_prime, b, b_prime)
    return max(0.0, abs(res.s_value) - CLASSICAL_BOUND)


def tsirelson_scan(state: BipartiteState, grid_size: int) -> ScanTable:
    """Grid scan of |S| over the four settings followed by local refinement.

    Returns a table with the grid optimum and the refined optimum; the
    refined row carries the reported maximum.
    """
    if grid_size < 8:
        raise ValueError("grid_size must be at least 8")
    angles = np.linspace(0.0, 2.0 * np.pi, grid_size, endpoint=False)
    e = np.empty((grid_size, grid_size))
    for i, aa in enumerate(angles):
        for j, bb in enumerate(angles):
            e[i, j] = _correlator_angles(state, aa, bb)
    s4 = (
        e[:, None, :, None]
        - e[:, None, None, :]
        + e[None, :, :, None]
        + e[None, :, None, :]
    )
    flat = np.argmax(np.abs(s4))
    ia, iap, ib, ibp = np.unravel_index(flat, s4.shape)
    grid_settings = np.array([angles[ia], angles[iap], angles[ib], angles[ibp]])
    grid_s = float(s4[ia, iap, ib, ibp])

    def neg_abs(x):
        return -abs(
            _correlator_angles(state, x[0], x[2])
            - _correlator_angles(state, x[0], x[3])
            + _correlator_angles(state, x[1], x[2])
            + _correlator_angles(state, x[1], x[3])
        )

    opt = minimize(
        neg_abs,
        grid_settings,
        method="Nelder-Mead",
        options={"xatol": 1e-10, "fatol": 1e-13, "maxiter": 20000, "maxfev": 20000},
    )
    refined = opt.x
    refined_res = chsh_S(state, *refined)
    rows = [
        list(grid_settings) + [grid_s, abs(grid_s), 0.0],
        list(refined) + [refined_res.s_value, abs(refined_res.s_value), 1.0],
    ]
    meta = {
        "operation": "tsirelson_scan",
        "grid_size": int(grid_size),
        "max_abs_S": abs(refined_res.s_value),
        "argmax_settings": [float(v) for v in refined],
        "regime": refined_res.regime,
        "tolerances": {"refinement_xatol": 1e-10, "refinement_fatol": 1e-13},
    }
    return ScanTable(
        ("a", "a_prime", "b", "b_prime", "S", "abs_S", "refined"), rows, meta
    )
