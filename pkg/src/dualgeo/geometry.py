"""Dual-affine core: Fisher metrics, Legendre duality, Bregman/KL divergences,
alpha-connection Christoffel symbols, and rotation transforms.

Metric components are expectation values of score outer products; potentials
and their Hessians give the dual-metric route.  The alpha-connection family
interpolates between the exponential (alpha = 1), Levi-Civita (alpha = 0),
and mixture (alpha = -1) connections.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .distributions import (
    MEAN,
    NATURAL,
    ChartError,
    DistributionFamily,
    ParameterPoint,
    _fd_step,
)

PRIMAL = "primal"
DUAL = "dual"


class DegenerateMetricError(ValueError):
    """Metric or Hessian not positive definite where it must be."""


@dataclass(frozen=True)
class MetricTensor:
    """Symmetric bilinear form at a point of a named chart."""

    chart: str
    at: ParameterPoint
    components: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.components, dtype=float)
        object.__setattr__(self, "components", c)
        if not np.allclose(c, c.T, atol=1e-12):
            raise DegenerateMetricError("metric components must be symmetric")


@dataclass(frozen=True)
class ChristoffelArray:
    """Connection coefficients Gamma^i_{jk}; components[i, j, k], symmetric in (j, k)."""

    chart: str
    at: ParameterPoint
    alpha: float
    components: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.components, dtype=float)
        object.__setattr__(self, "components", c)


@dataclass(frozen=True)
class RotationMap:
    """Planar rotation embedded in n dimensions; orthogonal with det +1."""

    dimension: int
    angle: float
    plane: tuple = (0, 1)
    matrix: np.ndarray = field(init=False)

    def __post_init__(self):
        i, j = self.plane
        if not (0 <= i < self.dimension and 0 <= j < self.dimension and i != j):
            raise ValueError("rotation plane indices out of range")
        m = np.eye(self.dimension)
        c, s = np.cos(self.angle), np.sin(self.angle)
        m[i, i] = c
        m[j, j] = c
        m[i, j] = -s
        m[j, i] = s
        object.__setattr__(self, "matrix", m)


class PotentialPair:
    """A convex potential, its Legendre dual, and their gradient/Hessian maps."""

    def __init__(
        self,
        psi,
        grad_psi,
        hess_psi,
        phi,
        grad_phi,
        hess_phi,
        primal_chart=PRIMAL,
        dual_chart=DUAL,
    ):
        self.psi = psi
        self.grad_psi = grad_psi
        self.hess_psi = hess_psi
        self.phi = phi
        self.grad_phi = grad_phi
        self.hess_phi = hess_phi
        self.primal_chart = primal_chart
        self.dual_chart = dual_chart

    @classmethod
    def from_family(cls, family: DistributionFamily) -> "PotentialPair":
        """Log-partition / negative-entropy pair of an exponential family."""
        return cls(
            family.potential,
            family.grad_potential,
            family.hess_potential,
            family.dual_potential,
            family.grad_dual_potential,
            family.hess_dual_potential,
            primal_chart=NATURAL,
            dual_chart=MEAN,
        )

    @classmethod
    def quadratic(cls, dim: int = 1) -> "PotentialPair":
        """Self-dual psi(theta) = |theta|^2 / 2."""
        eye = np.eye(dim)
        return cls(
            lambda t: 0.5 * float(np.dot(t, t)),
            lambda t: np.asarray(t, dtype=float).copy(),
            lambda t: eye.copy(),
            lambda e: 0.5 * float(np.dot(e, e)),
            lambda e: np.asarray(e, dtype=float).copy(),
            lambda e: eye.copy(),
        )


def fisher_metric(family: DistributionFamily, pt: ParameterPoint) -> MetricTensor:
    """Fisher information E[score score^T] in the chart of pt."""
    family.validate(pt)
    comps = family.expect(pt, lambda x: np.outer(family.score(pt, x), family.score(pt, x)))
    comps = 0.5 * (comps + comps.T)
    return MetricTensor(pt.chart, pt, comps)


def legendre_dual(pot: PotentialPair, theta: ParameterPoint):
    """Map a primal point to its dual coordinates and the dual potential value."""
    _require_chart(theta, pot.primal_chart)
    hess = np.atleast_2d(pot.hess_psi(theta.coords))
    if np.any(np.linalg.eigvalsh(hess) <= 0.0):
        raise DegenerateMetricError("potential not strictly convex at theta")
    eta = np.atleast_1d(pot.grad_psi(theta.coords))
    phi_value = float(np.dot(theta.coords, eta) - pot.psi(theta.coords))
    return ParameterPoint(pot.dual_chart, eta), phi_value


def bregman_divergence(pot: PotentialPair, theta: ParameterPoint, eta: ParameterPoint) -> float:
    """psi(theta) + phi(eta) - <theta, eta>; nonnegative, zero iff dual pair."""
    _require_chart(theta, pot.primal_chart)
    _require_chart(eta, pot.dual_chart)
    return float(
        pot.psi(theta.coords) + pot.phi(eta.coords) - np.dot(theta.coords, eta.coords)
    )


def kl_divergence(family: DistributionFamily, p: ParameterPoint, q: ParameterPoint) -> float:
    """D_KL(p || q) in nats; +inf on absolute-continuity violation."""
    family.validate(p)
    family.validate(q)
    return family.kl(p, q)


def pythagorean_gap(
    family: DistributionFamily,
    p: ParameterPoint,
    r: ParameterPoint,
    q: ParameterPoint,
) -> float:
    """Triangle excess D(p||r) + D(r||q) - D(p||q); zero in orthogonal configurations."""
    return (
        kl_divergence(family, p, r)
        + kl_divergence(family, r, q)
        - kl_divergence(family, p, q)
    )


def dual_metrics(pot: PotentialPair, theta: ParameterPoint):
    """Hessian metrics g = psi'' at theta and g* = phi'' at the dual point."""
    _require_chart(theta, pot.primal_chart)
    g = np.atleast_2d(pot.hess_psi(theta.coords))
    if np.any(np.linalg.eigvalsh(g) <= 0.0):
        raise DegenerateMetricError("degenerate primal Hessian")
    eta, _ = legendre_dual(pot, theta)
    g_star = np.atleast_2d(pot.hess_phi(eta.coords))
    return (
        MetricTensor(pot.primal_chart, theta, g),
        MetricTensor(pot.dual_chart, eta, g_star),
    )


def christoffel_first_kind(
    family: DistributionFamily, pt: ParameterPoint, alpha: float
) -> np.ndarray:
    """Lower-index coefficients Gamma^(alpha)_{ij,k} = E[(l_ij + (1-alpha)/2 l_i l_j) l_k]."""
    family.validate(pt)
    w = 0.5 * (1.0 - alpha)

    def integrand(x):
        l1 = family.score(pt, x)
        l2 = family.logp_hessian(pt, x)
        return (l2 + w * np.outer(l1, l1))[:, :, None] * l1[None, None, :]

    return family.expect(pt, integrand)


def christoffel(
    family: DistributionFamily, pt: ParameterPoint, alpha: float
) -> ChristoffelArray:
    """Alpha-connection coefficients Gamma^i_{jk} in the chart of pt."""
    lower = christoffel_first_kind(family, pt, alpha)
    g = fisher_metric(family, pt).components
    ginv = np.linalg.inv(g)
    comps = np.einsum("il,jkl->ijk", ginv, lower)
    return ChristoffelArray(pt.chart, pt, float(alpha), comps)


def transform_metric(g: MetricTensor, rot: RotationMap) -> MetricTensor:
    """Pull back the metric along the coordinate change x = R x~."""
    r = rot.matrix
    if r.shape[0] != g.components.shape[0]:
        raise ValueError("rotation dimension does not match metric")
    comps = np.einsum("ki,lj,kl->ij", r, r, g.components)
    return MetricTensor(g.chart, g.at, comps)


def transform_christoffel(
    gamma: ChristoffelArray, rot: RotationMap, jacobian_derivative=None
) -> ChristoffelArray:
    """Pull back connection coefficients along x = R x~.

    For a constant rotation the inhomogeneous term vanishes.  A
    position-dependent map must supply jacobian_derivative[m, j, k] =
    dR^m_j / dx~^k, which contributes R^T . dR.
    """
    r = rot.matrix
    if r.shape[0] != gamma.components.shape[0]:
        raise ValueError("rotation dimension does not match connection")
    comps = np.einsum("mi,nj,pk,mnp->ijk", r, r, r, gamma.components)
    if jacobian_derivative is not None:
        comps = comps + np.einsum("mi,mjk->ijk", r, np.asarray(jacobian_derivative))
    return ChristoffelArray(gamma.chart, gamma.at, gamma.alpha, comps)


def fisher_orthogonal(
    family: DistributionFamily,
    at: ParameterPoint,
    v1: np.ndarray,
    v2: np.ndarray,
) -> float:
    """Fisher inner product of two chart-velocity vectors at a point."""
    g = fisher_metric(family, at).components
    return float(np.asarray(v1) @ g @ np.asarray(v2))


def _require_chart(pt: ParameterPoint, chart: str):
    if pt.chart != chart:
        raise ChartError(f"expected chart {chart!r}, got {pt.chart!r}")


def metric_field(family: DistributionFamily, chart: str):
    """Callable coords -> Fisher metric components, for length integrals."""

    def field_fn(coords):
        return fisher_metric(family, ParameterPoint(chart, coords)).components

    return field_fn


def divergence_hessians(family: DistributionFamily, pt: ParameterPoint):
    """Metrics induced by the KL divergence: Hessian in the first argument at
    coincidence (g) and in the second argument (g*), by central differences."""
    family.validate(pt)
    u = pt.coords
    d = u.size
    h = _fd_step(u, power=0.25)

    def kl_at(x, y):
        return family.kl(ParameterPoint(pt.chart, x), ParameterPoint(pt.chart, y))

    g = np.empty((d, d))
    g_star = np.empty((d, d))
    for i in range(d):
        for j in range(i, d):
            g[i, j] = g[j, i] = _mixed_second(kl_at, u, i, j, h, first_arg=True)
            g_star[i, j] = g_star[j, i] = _mixed_second(kl_at, u, i, j, h, first_arg=False)
    return g, g_star


def _mixed_second(kl_at, u, i, j, h, first_arg):
    def val(si, sj):
        x = u.copy()
        x[i] += si * h[i]
        x[j] += sj * h[j]
        return kl_at(x, u) if first_arg else kl_at(u, x)

    if i == j:
        return (val(1, 0) - 2.0 * val(0, 0) + val(-1, 0)) / h[i] ** 2
    return (val(1, 1) - val(1, -1) - val(-1, 1) + val(-1, -1)) / (4.0 * h[i] * h[j])
