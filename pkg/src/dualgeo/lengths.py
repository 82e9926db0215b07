"""Arc-length functionals and geodesics on dually flat statistical manifolds.

All lengths are composite-trapezoid quadratures of sqrt(v^T G v) along a
sampled path, with velocities from second-order finite differences on the
parameter grid.  Geodesics are straight segments in the flat chart for
alpha = +/-1 and a shooting RK4 integration of the Levi-Civita geodesic
equation for alpha = 0.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import root

from .distributions import (
    MEAN,
    NATURAL,
    DistributionFamily,
    ParameterPoint,
)
from .errors import NonConvergenceError
from .geometry import (
    PotentialPair,
    christoffel,
    divergence_hessians,
    metric_field,
)


@dataclass(frozen=True)
class ParamPath:
    """Uniformly sampled curve t in [0, 1] -> parameter coordinates."""

    chart: str
    samples: np.ndarray  # (count, dim)
    ts: np.ndarray = None

    def __post_init__(self):
        s = np.atleast_2d(np.asarray(self.samples, dtype=float))
        object.__setattr__(self, "samples", s)
        ts = self.ts
        if ts is None:
            ts = np.linspace(0.0, 1.0, s.shape[0])
        ts = np.asarray(ts, dtype=float)
        if s.shape[0] < 2:
            raise ValueError("path needs at least 2 samples")
        if np.any(np.diff(ts) <= 0.0):
            raise ValueError("path parameter must be strictly increasing")
        object.__setattr__(self, "ts", ts)

    @property
    def count(self):
        return self.samples.shape[0]

    @classmethod
    def straight(cls, chart, a, b, count=129):
        """Straight-line segment between two coordinate vectors."""
        a = np.atleast_1d(np.asarray(a, dtype=float))
        b = np.atleast_1d(np.asarray(b, dtype=float))
        ts = np.linspace(0.0, 1.0, count)
        return cls(chart, a[None, :] + ts[:, None] * (b - a)[None, :], ts)

    def points(self):
        return [ParameterPoint(self.chart, c) for c in self.samples]

    def refined(self, factor=2):
        """Same curve re-sampled on a grid `factor` times as fine (linear)."""
        n = (self.count - 1) * factor + 1
        ts = np.linspace(self.ts[0], self.ts[-1], n)
        cols = [np.interp(ts, self.ts, self.samples[:, j]) for j in range(self.samples.shape[1])]
        return ParamPath(self.chart, np.stack(cols, axis=1), ts)


@dataclass(frozen=True)
class LengthReport:
    primal: float
    dual: float
    harmonic: float
    divergence_based: float
    grid_size: int


def path_length(path: ParamPath, field_fn) -> float:
    """Trapezoid quadrature of sqrt(v^T G(x) v) with G from `field_fn`."""
    vel = np.gradient(path.samples, path.ts, axis=0)
    integrand = np.empty(path.count)
    for k in range(path.count):
        g = np.atleast_2d(field_fn(path.samples[k]))
        q = float(vel[k] @ g @ vel[k])
        integrand[k] = np.sqrt(max(q, 0.0))
    return float(np.trapezoid(integrand, path.ts))


def primal_length(path: ParamPath, family: DistributionFamily) -> float:
    """Fisher arc length of the path in its own chart."""
    return path_length(path, metric_field(family, path.chart))


def dual_length(path: ParamPath, pot: PotentialPair) -> float:
    """Arc length of the grad-psi image of a primal-chart path under g*."""
    if path.chart != pot.primal_chart:
        raise ValueError(f"dual_length expects a {pot.primal_chart!r}-chart path")
    image = np.stack([np.atleast_1d(pot.grad_psi(c)) for c in path.samples])
    dual_path = ParamPath(pot.dual_chart, image, path.ts)
    return path_length(dual_path, lambda c: pot.hess_phi(c))


def potential_length(path: ParamPath, pot: PotentialPair) -> float:
    """Arc length under the primal Hessian metric g = psi''."""
    if path.chart != pot.primal_chart:
        raise ValueError(f"potential_length expects a {pot.primal_chart!r}-chart path")
    return path_length(path, lambda c: pot.hess_psi(c))


def harmonic_length(path: ParamPath, g_field, g_star_field) -> float:
    """Length under H = 2 (g^-1 + g*^-1)^-1, the harmonic mean of the metrics."""

    def field_fn(coords):
        g = np.atleast_2d(g_field(coords))
        gs = np.atleast_2d(g_star_field(coords))
        return 2.0 * np.linalg.inv(np.linalg.inv(g) + np.linalg.inv(gs))

    return path_length(path, field_fn)


def divergence_length(path: ParamPath, family: DistributionFamily) -> float:
    """Length under g + g* with both metrics from KL-divergence Hessians."""

    def field_fn(coords):
        g, g_star = divergence_hessians(family, ParameterPoint(path.chart, coords))
        return g + g_star

    return path_length(path, field_fn)


def divergence_length_curvature(path: ParamPath, family: DistributionFamily) -> float:
    """Alternate estimator from the second parameter-derivative, at coincidence,
    of the symmetrized divergence D(x||y) + D(y||x) along the path."""
    vel = np.gradient(path.samples, path.ts, axis=0)
    integrand = np.empty(path.count)
    for k in range(path.count):
        u = path.samples[k]
        v = vel[k]
        h = 1e-4 / max(1.0, float(np.linalg.norm(v)))

        def sym(s):
            x = ParameterPoint(path.chart, u + s * v)
            y = ParameterPoint(path.chart, u)
            return family.kl(x, y) + family.kl(y, x)

        second = (sym(h) - 2.0 * sym(0.0) + sym(-h)) / h**2
        integrand[k] = np.sqrt(max(second, 0.0))
    return float(np.trapezoid(integrand, path.ts))


def length_report(path: ParamPath, family: DistributionFamily) -> LengthReport:
    """All length functionals of a path, with g* taken in the same chart."""
    pot = PotentialPair.from_family(family)
    if path.chart == pot.primal_chart:
        dual = dual_length(path, pot)
    else:
        theta = np.stack(
            [family.convert(p, NATURAL).coords for p in path.points()]
        )
        dual = dual_length(ParamPath(NATURAL, theta, path.ts), pot)
    g_field = metric_field(family, path.chart)

    def g_star_field(coords):
        _, g_star = divergence_hessians(family, ParameterPoint(path.chart, coords))
        return g_star

    return LengthReport(
        primal=primal_length(path, family),
        dual=dual,
        harmonic=harmonic_length(path, g_field, g_star_field),
        divergence_based=divergence_length(path, family),
        grid_size=path.count,
    )


def geodesic(
    family: DistributionFamily,
    chart: str,
    a: ParameterPoint,
    b: ParameterPoint,
    alpha: int,
    count: int = 129,
    steps: int = 128,
    tol: float = 1e-6,
) -> ParamPath:
    """Geodesic from a to b, returned as a sampled path in `chart`.

    alpha = +1: straight segment in the natural chart.
    alpha = -1: straight segment in the mean chart.
    alpha =  0: Levi-Civita geodesic by RK4 shooting on the initial velocity.
    """
    family.validate(a)
    family.validate(b)
    if alpha == 1 or alpha == -1:
        flat = NATURAL if alpha == 1 else MEAN
        fa = family.convert(a, flat).coords
        fb = family.convert(b, flat).coords
        flat_path = ParamPath.straight(flat, fa, fb, count)
        out = np.stack(
            [family.convert(p, chart).coords for p in flat_path.points()]
        )
        return ParamPath(chart, out, flat_path.ts)
    if alpha != 0:
        raise ValueError("alpha must be one of {-1, 0, 1}")

    x0 = family.convert(a, chart).coords
    x1 = family.convert(b, chart).coords
    if np.allclose(x0, x1):
        return ParamPath(chart, np.tile(x0, (count, 1)))

    def gamma_at(x):
        return christoffel(family, ParameterPoint(chart, x), 0.0).components

    def rhs(state):
        d = x0.size
        x, v = state[:d], state[d:]
        acc = -np.einsum("ijk,j,k->i", gamma_at(x), v, v)
        return np.concatenate([v, acc])

    def integrate(v0):
        state = np.concatenate([x0, v0])
        h = 1.0 / steps
        traj = [x0.copy()]
        for _ in range(steps):
            k1 = rhs(state)
            k2 = rhs(state + 0.5 * h * k1)
            k3 = rhs(state + 0.5 * h * k2)
            k4 = rhs(state + h * k3)
            state = state + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
            traj.append(state[: x0.size].copy())
        return np.stack(traj)

    def miss(v0):
        return integrate(v0)[-1] - x1

    sol = root(miss, x1 - x0, method="hybr", tol=tol * 1e-2)
    if not sol.success or np.max(np.abs(miss(sol.x))) > tol:
        raise NonConvergenceError("geodesic shooting did not converge")
    traj = integrate(sol.x)
    ts = np.linspace(0.0, 1.0, steps + 1)
    if count != steps + 1:
        tq = np.linspace(0.0, 1.0, count)
        traj = np.stack([np.interp(tq, ts, traj[:, j]) for j in range(traj.shape[1])], axis=1)
        ts = tq
    return ParamPath(chart, traj, ts)
