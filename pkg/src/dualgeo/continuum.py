"""Continuum analogies: clamped circular membrane under uniform stress and
the metric-compression string model.

The membrane is solved in axisymmetric radial form with a conservative
second-order finite-difference scheme; the string model exposes both the
exact arc-length integral and the sine approximation, with the discrepancy
reported rather than hidden.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.linalg import solve_banded

from .errors import NonConvergenceError


@dataclass(frozen=True)
class MembraneProblem:
    tension: float  # force per length
    pressure: float  # force per area (uniform load)
    radius: float  # clamp radius
    radial_nodes: int = 256

    def __post_init__(self):
        if self.tension <= 0.0:
            raise ValueError("tension must be positive")
        if self.radius <= 0.0:
            raise ValueError("radius must be positive")
        if self.radial_nodes < 16:
            raise ValueError("need at least 16 radial nodes")


@dataclass(frozen=True)
class DeflectionField:
    radii: np.ndarray
    deflections: np.ndarray

    def __post_init__(self):
        r = np.asarray(self.radii, dtype=float)
        w = np.asarray(self.deflections, dtype=float)
        object.__setattr__(self, "radii", r)
        object.__setattr__(self, "deflections", w)
        if abs(w[-1]) > 1e-12:
            raise ValueError("clamped edge requires w(R) = 0")
        if not np.all(np.isfinite(w)):
            raise ValueError("deflections must be finite")


def membrane_closed_form(prob: MembraneProblem, r: float) -> float:
    """Parabolic deflection w(r) = p (r^2 - R^2) / (4 T)."""
    if not 0.0 <= r <= prob.radius:
        raise ValueError("r outside the clamped disk")
    return prob.pressure * (r**2 - prob.radius**2) / (4.0 * prob.tension)


def membrane_solve(prob: MembraneProblem, pressure_profile=None) -> DeflectionField:
    """Finite-difference solve of T (w'' + w'/r) = p with w'(0) = 0, w(R) = 0.

    A radially varying load may be supplied as `pressure_profile(r)`; by
    default the uniform load of the problem is used.
    """
    n = prob.radial_nodes
    h = prob.radius / n
    r = np.linspace(0.0, prob.radius, n + 1)
    load = (
        np.full(n + 1, prob.pressure)
        if pressure_profile is None
        else np.array([pressure_profile(ri) for ri in r], dtype=float)
    )
    # unknowns w_0 .. w_{n-1}; w_n = 0 (clamped)
    ab = np.zeros((3, n))
    rhs = np.empty(n)
    # r = 0: regularity, Laplacian -> 2 w''(0), even extension of w
    ab[1, 0] = -4.0 / h**2
    ab[0, 1] = 4.0 / h**2
    rhs[0] = load[0] / prob.tension
    for i in range(1, n):
        rp = r[i] + 0.5 * h
        rm = r[i] - 0.5 * h
        ab[2, i - 1] = rm / (r[i] * h**2)  # sub-diagonal (w_{i-1})
        ab[1, i] = -(rp + rm) / (r[i] * h**2)
        rhs[i] = load[i] / prob.tension
        if i + 1 < n:
            ab[0, i + 1] = rp / (r[i] * h**2)
        # w_n = 0 contributes nothing to the right-hand side
    w = solve_banded((1, 1), ab, rhs)
    return DeflectionField(r, np.append(w, 0.0))


def membrane_max_error(prob: MembraneProblem) -> float:
    """Max abs difference between the FD solve and the parabolic solution."""
    field = membrane_solve(prob)
    exact = np.array([membrane_closed_form(prob, ri) for ri in field.radii])
    return float(np.max(np.abs(field.deflections - exact)))


def membrane_convergence_order(prob: MembraneProblem, nodes=(64, 128, 256)) -> list:
    """Observed convergence orders under grid doubling.

    The uniform-load solution is a parabola that second-order stencils
    reproduce to roundoff, so the order is measured on a manufactured
    quartic: load p(r) = p0 (1 + r^2/R^2).
    """
    p0, t, big_r = prob.pressure, prob.tension, prob.radius

    def load(r):
        return p0 * (1.0 + (r / big_r) ** 2)

    def exact(r):
        return (p0 / t) * (r**2 / 4.0 + r**4 / (16.0 * big_r**2) - 5.0 * big_r**2 / 16.0)

    errors = []
    for n in nodes:
        sub = MembraneProblem(t, p0, big_r, n)
        field = membrane_solve(sub, pressure_profile=load)
        ref = np.array([exact(ri) for ri in field.radii])
        errors.append(float(np.max(np.abs(field.deflections - ref))))
    return [
        float(np.log2(errors[k] / errors[k + 1])) for k in range(len(errors) - 1)
    ]


@dataclass(frozen=True)
class StringModel:
    """Inelastic-string analogue: profile W(t) = A sin(f_s t), f_s = sum E_q."""

    amplitude: float
    energy_levels: tuple

    def __post_init__(self):
        levels = tuple(float(e) for e in np.atleast_1d(self.energy_levels))
        object.__setattr__(self, "energy_levels", levels)
        if self.amplitude < 0.0:
            raise ValueError("amplitude must be nonnegative")
        if not levels or any(e <= 0.0 for e in levels):
            raise ValueError("energy levels must be positive")

    @property
    def total_frequency(self) -> float:
        return float(sum(self.energy_levels))


def string_profile(model: StringModel, t: float) -> float:
    return float(model.amplitude * np.sin(model.total_frequency * t))


def string_arc_length_exact(model: StringModel, x: float) -> float:
    """Adaptive quadrature of the true arc length; always >= x."""
    if x <= 0.0:
        raise ValueError("endpoint must be positive")
    a, fs = model.amplitude, model.total_frequency

    def integrand(u):
        return np.sqrt(1.0 + (a * fs * np.cos(fs * u)) ** 2)

    val, err = quad(integrand, 0.0, x, epsabs=1e-12, epsrel=1e-12, limit=500)
    if err > 1e-8:
        raise NonConvergenceError("arc-length quadrature did not converge")
    return float(val)


def string_effective_length(model: StringModel, x: float) -> float:
    """The sine approximation l ~ sin(f_s x)."""
    if x <= 0.0:
        raise ValueError("endpoint must be positive")
    return float(np.sin(model.total_frequency * x))


@dataclass(frozen=True)
class StringLengthReport:
    approximate: float  # sin(f_s x)
    antiderivative: float  # integral of f_s cos(f_s u); equals the approximation
    exact: float  # true arc length
    discrepancy: float  # |approximate - exact|
    relative_discrepancy: float


def string_length_report(model: StringModel, x: float) -> StringLengthReport:
    """Approximation diagnostics: the dropped-term error is measured, not hidden."""
    fs = model.total_frequency
    approx = string_effective_length(model, x)
    anti, err = quad(lambda u: fs * np.cos(fs * u), 0.0, x, epsabs=1e-12, epsrel=1e-12, limit=500)
    if err > 1e-8:
        raise NonConvergenceError("antiderivative quadrature did not converge")
    exact = string_arc_length_exact(model, x)
    return StringLengthReport(
        approximate=approx,
        antiderivative=float(anti),
        exact=exact,
        discrepancy=abs(approx - exact),
        relative_discrepancy=abs(approx - exact) / abs(exact),
    )


@dataclass(frozen=True)
class QuantizationCheck:
    wavelength: float
    waves_on_domain: float  # x / wavelength
    wavelength_over_domain: float  # the reciprocal ratio, reported alongside
    is_integer: bool


def wavelength_quantization_check(model: StringModel, x: float, tol: float = 1e-9) -> QuantizationCheck:
    """Test whether the domain holds an integer number of wavelengths."""
    if x <= 0.0:
        raise ValueError("endpoint must be positive")
    lam = 2.0 * np.pi / model.total_frequency
    ratio = x / lam
    return QuantizationCheck(
        wavelength=float(lam),
        waves_on_domain=float(ratio),
        wavelength_over_domain=float(lam / x),
        is_integer=bool(abs(ratio - round(ratio)) <= tol),
    )


def superposed_wave(b: float, k: float, omega: float, phi: float, x: float, t: float) -> float:
    """Difference of two phase-shifted traveling waves with A = 2 B cos(phi/2)."""
    a = 2.0 * b * np.cos(phi / 2.0)
    arg = k * x - omega * t
    return float(a * (np.sin(arg + phi) - np.sin(arg)))
