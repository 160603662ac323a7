"""Scalar metrics extracted from force-displacement curves."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

GRAVITY = 9.81
DEFAULT_FIT_WINDOW = (0.0, 0.5e-3)
# relative size below which a negative enclosed area counts as zero; the
# solver's force tolerance (1e-4 N) leaves noise of this order on N-scale curves
ROUNDOFF = 1e-4


class InsufficientData(ValueError):
    """Too few samples to compute a metric."""


class OutOfBound(ValueError):
    """A metric fell outside its admissible range."""


@dataclass
class CurveMetrics:
    K: float
    E_apparent: float
    W_D: float
    W_E: float
    eta: float
    fit_window: tuple


def _branch(points) -> tuple[np.ndarray, np.ndarray]:
    """Sort by displacement and drop repeated displacements (first kept)."""
    if len(points) == 0:
        return np.zeros(0), np.zeros(0)
    a = np.asarray(points, dtype=float).reshape(-1, 2)
    order = np.argsort(a[:, 0], kind="stable")
    a = a[order]
    x, idx = np.unique(a[:, 0], return_index=True)
    return x, a[idx, 1]


def fit_stiffness(curve, window=DEFAULT_FIT_WINDOW) -> float:
    """Least-squares slope of the loading branch inside ``window`` [m]."""
    loading = curve.loading if hasattr(curve, "loading") else curve
    x, f = _branch(loading)
    lo, hi = window
    m = (x >= lo - 1e-15) & (x <= hi + 1e-15)
    if m.sum() < 2:
        raise InsufficientData(f"need at least two loading samples in {window}, got {int(m.sum())}")
    slope, _ = np.polyfit(x[m], f[m], 1)
    return float(slope)


def tangent_stiffness(points, at: float) -> float:
    """Secant slope of a branch over the sample interval ending at ``at``."""
    x, f = _branch(points)
    i = int(np.searchsorted(x, at))
    if i <= 0 or i >= len(x):
        raise InsufficientData(f"{at} is outside the sampled range")
    return float((f[i] - f[i - 1]) / (x[i] - x[i - 1]))


def apparent_bending_modulus(K_b: float, L: float, D_O: float) -> float:
    """Cantilever modulus from bending stiffness: 16 K L^3 / (3 pi D^4)."""
    return 16.0 * K_b * L**3 / (3.0 * math.pi * D_O**4)


def apparent_axial_modulus(K: float, L: float, D_O: float) -> float:
    """Bar modulus from axial stiffness: 4 K L / (pi D^2)."""
    return 4.0 * K * L / (math.pi * D_O**2)


def _area(x, f) -> float:
    if len(x) < 2:
        return 0.0
    return float(np.trapezoid(f, x))


def hysteresis_energies(curve) -> tuple[float, float]:
    """Dissipated energy W_D and reference energy W_E of one load cycle.

    W_D is the area between the loading and unloading branches; W_E is half
    of W_D plus the area under the unloading branch.
    """
    xl, fl = _branch(curve.loading)
    xu, fu = _branch(curve.unloading)
    if len(xl) == 0 or len(xu) == 0:
        raise InsufficientData("both branches are needed")
    span_l = xl[-1] - xl[0]
    span_u = xu[-1] - xu[0]
    tol = 1e-9 + 1e-6 * max(abs(span_l), abs(span_u))
    if abs(xl[0] - xu[0]) > tol or abs(xl[-1] - xu[-1]) > tol:
        raise ValueError(
            f"branches cover different ranges: loading [{xl[0]}, {xl[-1]}], unloading [{xu[0]}, {xu[-1]}]"
        )
    under_l = _area(xl, fl)
    under_u = _area(xu, fu)
    W_D = under_l - under_u
    if W_D < 0.0 and -W_D <= ROUNDOFF * max(abs(under_l), abs(under_u)):
        # identical branches integrated twice: the sign of the difference is noise
        W_D = 0.0
    W_E = 0.5 * W_D + under_u
    return W_D, W_E


def loss_factor(W_D: float, W_E: float) -> float:
    if not W_E > 0.0:
        raise InsufficientData(f"reference energy must be positive, got {W_E}")
    eta = W_D / W_E
    if not 0.0 <= eta <= 2.0:
        raise OutOfBound(f"loss factor {eta} outside [0, 2]")
    return eta


def tunability_modulus(E_high: float, E_low: float) -> float:
    if not E_low > 0.0:
        raise ValueError("reference modulus must be positive")
    return E_high / E_low


def tunability_loss(eta_low: float, eta_high: float) -> float:
    if not eta_low > 0.0:
        raise ValueError("reference loss factor must be positive")
    return (eta_low - eta_high) / eta_low


def deployment_energy(F: float, L: float, E: float, A: float, m: float, h: float, g: float = GRAVITY):
    """Strain energy stored in a tensioned string plus lifted potential energy."""
    if not E * A > 0.0:
        raise ValueError("axial rigidity E*A must be positive")
    U = L * F**2 / (2.0 * E * A)
    P = m * g * h
    return U, P, U + P


def normalized_series(values, reference: float) -> list[float]:
    if not reference > 0.0:
        raise ValueError("reference must be positive")
    return [v / reference for v in values]


def curve_metrics(curve, L: float, D_O: float, window=DEFAULT_FIT_WINDOW, modulus=apparent_bending_modulus):
    K = fit_stiffness(curve, window)
    W_D, W_E = hysteresis_energies(curve)
    return CurveMetrics(K, modulus(K, L, D_O), W_D, W_E, loss_factor(W_D, W_E), tuple(window))
