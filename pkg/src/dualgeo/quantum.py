"""Finite-dimensional quantum state kernel.

Bloch-sphere parametrization of qubits, density matrices, bipartite states
with Schmidt decomposition and entanglement entropy (nats), subsystem
rotations (local and controlled), the coherence gap of a rotation, density
overlaps on a grid, and the sin^2/cos^2 split of the quantumness budget.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import RotationMap

_ATOL = 1e-10


class NormalizationError(ValueError):
    """State vector or density matrix fails its normalization invariant."""


class DimensionMismatchError(ValueError):
    pass


@dataclass(frozen=True)
class PureState:
    amplitudes: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.amplitudes, dtype=complex)
        object.__setattr__(self, "amplitudes", a)
        if a.ndim != 1 or a.size < 2:
            raise DimensionMismatchError("state vector must be 1D with dim >= 2")
        if abs(np.vdot(a, a).real - 1.0) > 1e-12:
            raise NormalizationError("state vector not normalized")

    @property
    def dim(self):
        return self.amplitudes.size

    def density(self) -> "DensityMatrix":
        return DensityMatrix(np.outer(self.amplitudes, self.amplitudes.conj()))


@dataclass(frozen=True)
class DensityMatrix:
    components: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.components, dtype=complex)
        object.__setattr__(self, "components", m)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionMismatchError("density matrix must be square")
        if not np.allclose(m, m.conj().T, atol=1e-12):
            raise NormalizationError("density matrix not Hermitian")
        if abs(np.trace(m).real - 1.0) > 1e-12:
            raise NormalizationError("density matrix trace must be 1")
        if np.min(np.linalg.eigvalsh(m)) < -1e-10:
            raise NormalizationError("density matrix has a negative eigenvalue")

    def purity(self) -> float:
        return float(np.trace(self.components @ self.components).real)


@dataclass(frozen=True)
class BlochVector:
    theta: float
    phi: float

    def __post_init__(self):
        if not 0.0 <= self.theta <= np.pi:
            raise ValueError("polar angle must lie in [0, pi]")
        object.__setattr__(self, "phi", float(self.phi) % (2.0 * np.pi))

    @property
    def r(self) -> np.ndarray:
        st = np.sin(self.theta)
        return np.array([st * np.cos(self.phi), st * np.sin(self.phi), np.cos(self.theta)])


@dataclass(frozen=True)
class BipartiteState:
    """Amplitudes indexed (i, k) over subsystems A (rows) and B (columns)."""

    amplitudes: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.amplitudes, dtype=complex)
        object.__setattr__(self, "amplitudes", a)
        if a.ndim != 2:
            raise DimensionMismatchError("bipartite amplitudes must be a 2D array")
        if abs(np.sum(np.abs(a) ** 2) - 1.0) > 1e-12:
            raise NormalizationError("bipartite state not normalized")

    @property
    def dims(self):
        return self.amplitudes.shape

    def vector(self) -> np.ndarray:
        return self.amplitudes.reshape(-1)


@dataclass(frozen=True)
class SchmidtDecomposition:
    coefficients: np.ndarray  # descending, nonnegative
    left: np.ndarray  # columns are the A-side basis
    right: np.ndarray  # columns are the B-side basis

    def __post_init__(self):
        c = np.asarray(self.coefficients, dtype=float)
        object.__setattr__(self, "coefficients", c)
        if abs(np.sum(c**2) - 1.0) > 1e-10:
            raise NormalizationError("Schmidt coefficients must square-sum to 1")


PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def bloch_from_state(psi: PureState) -> BlochVector:
    """Polar/azimuth angles of a qubit; arg of a zero amplitude is taken as 0."""
    if psi.dim != 2:
        raise DimensionMismatchError("Bloch form requires a qubit")
    alpha, beta = psi.amplitudes
    theta = 2.0 * np.arccos(np.clip(abs(alpha), 0.0, 1.0))
    arg_a = np.angle(alpha) if abs(alpha) > _ATOL else 0.0
    arg_b = np.angle(beta) if abs(beta) > _ATOL else 0.0
    return BlochVector(float(theta), float(arg_b - arg_a))


def density_from_bloch(b) -> DensityMatrix:
    """rho = (I + r . sigma) / 2 for a Bloch vector or a raw 3-vector."""
    r = b.r if isinstance(b, BlochVector) else np.asarray(b, dtype=float)
    if np.linalg.norm(r) > 1.0 + 1e-12:
        raise ValueError("Bloch vector must have norm <= 1")
    m = 0.5 * (np.eye(2, dtype=complex) + r[0] * PAULI_X + r[1] * PAULI_Y + r[2] * PAULI_Z)
    return DensityMatrix(m)


def rotate_subsystem_local(state: BipartiteState, rot: RotationMap) -> BipartiteState:
    """Apply I (x) R; a local rotation, so the Schmidt spectrum is unchanged."""
    if rot.dimension != state.dims[1]:
        raise DimensionMismatchError("rotation dimension must match subsystem B")
    return BipartiteState(state.amplitudes @ rot.matrix.T)


def rotate_subsystem_controlled(state: BipartiteState, rot: RotationMap) -> BipartiteState:
    """Apply |0><0| (x) I + |1><1| (x) R; entangling for nontrivial R."""
    if state.dims[0] != 2:
        raise DimensionMismatchError("control subsystem A must be a qubit")
    if rot.dimension != state.dims[1]:
        raise DimensionMismatchError("rotation dimension must match subsystem B")
    out = state.amplitudes.copy()
    out[1, :] = rot.matrix @ out[1, :]
    return BipartiteState(out)


def schmidt(state: BipartiteState) -> SchmidtDecomposition:
    """Singular-value decomposition of the amplitude array."""
    u, s, vh = np.linalg.svd(state.amplitudes)
    r = s.size
    return SchmidtDecomposition(s, u[:, :r], vh.conj().T[:, :r])


def entanglement_entropy(dec: SchmidtDecomposition) -> float:
    """Von Neumann entropy -sum lambda^2 log lambda^2, in nats."""
    lam2 = dec.coefficients**2
    lam2 = lam2[lam2 > 0.0]
    return float(-np.sum(lam2 * np.log(lam2)))


def coherence_gap(x, rot: RotationMap) -> np.ndarray:
    """(I - R) x, the basis misalignment between the two submanifold copies."""
    x = np.asarray(x, dtype=float)
    if x.shape != (rot.dimension,):
        raise DimensionMismatchError("vector dimension must match rotation")
    return (np.eye(rot.dimension) - rot.matrix) @ x


def overlap(p1, p2, grid) -> float:
    """Trapezoid approximation of the product integral of two densities."""
    p1 = np.asarray(p1, dtype=float)
    p2 = np.asarray(p2, dtype=float)
    grid = np.asarray(grid, dtype=float)
    if p1.shape != grid.shape or p2.shape != grid.shape:
        raise DimensionMismatchError("densities and grid must share a shape")
    if np.any(p1 < 0.0) or np.any(p2 < 0.0):
        raise ValueError("densities must be nonnegative")
    return float(np.trapezoid(p1 * p2, grid))


def ec_decomposition(theta: float, n: float):
    """Split a quantumness budget N into E = N sin^2(theta) and C = N - E.

    The complement form makes E + C == N an exact identity.
    """
    if n <= 0.0:
        raise ValueError("normalization must be positive")
    e = n * np.sin(theta) ** 2
    c = n - e
    # re-complement so that e + c == n holds bit-exactly, not just to rounding
    e = n - c
    return float(e), float(c)
