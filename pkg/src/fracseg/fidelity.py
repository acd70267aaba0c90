"""Least-squares log-log regression machinery shared by every solver.

Fitting per-pixel log-leaders against octave index ``j`` over a range
``j1..j2`` is a two-parameter linear regression whose normal equations are
governed by the 2x2 matrix ``J = [[R0, R1], [R1, R2]]`` built from the octave
power sums ``Rm = sum_j j^m``.  The same matrix drives the data-fidelity
quadratic, its proximal operator, its Fenchel conjugate and the strong
convexity constant (smallest eigenvalue of ``J``).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class RegressionSystem:
    """Octave power sums and the regression normal matrix for ``j1..j2``."""

    j1: int
    j2: int
    R0: float
    R1: float
    R2: float
    det: float
    mu: float

    @property
    def octaves(self):
        return list(range(self.j1, self.j2 + 1))

    @property
    def J(self):
        return np.array([[self.R0, self.R1], [self.R1, self.R2]])

    @property
    def J_inv(self):
        return np.array([[self.R2, -self.R1], [-self.R1, self.R0]]) / self.det

    @property
    def j_inv_norm(self):
        """Spectral norm of ``J^{-1}``, equal to ``1/mu``."""
        return 1.0 / self.mu


@dataclass
class RegressionData:
    """Per-pixel octave sums of log-leaders and the squared-log total."""

    S: np.ndarray
    T: np.ndarray
    log_sq_sum: float
    system: RegressionSystem = field(repr=False, default=None)

    @property
    def shape(self):
        return self.S.shape


@dataclass
class EstimatePair:
    """A (v, h) pair of same-shape scalar fields."""

    v: np.ndarray
    h: np.ndarray

    @property
    def shape(self):
        return self.v.shape


def build_system(j1, j2):
    """Assemble the regression system for octaves ``j1..j2`` (``j1 < j2``)."""
    if not (1 <= j1 < j2):
        raise ValueError(f"octave range must satisfy 1 <= j1 < j2, got ({j1}, {j2})")
    js = np.arange(j1, j2 + 1, dtype=np.float64)
    r0 = float(len(js))
    r1 = float(js.sum())
    r2 = float((js * js).sum())
    det = r0 * r2 - r1 * r1
    if det <= 1e-9:
        raise ValueError(f"regression matrix is singular for octaves ({j1}, {j2})")
    # closed-form smallest eigenvalue of the symmetric 2x2 matrix
    mu = 0.5 * ((r0 + r2) - np.sqrt((r0 - r2) ** 2 + 4.0 * r1 * r1))
    return RegressionSystem(j1=j1, j2=j2, R0=r0, R1=r1, R2=r2, det=det, mu=mu)


def regression_stats(pyramid, system):
    """Per-pixel sums ``S = sum_j y_j`` and ``T = sum_j j*y_j`` of log-leaders."""
    if list(pyramid.octaves) != system.octaves:
        raise ValueError(
            f"pyramid octaves {list(pyramid.octaves)} do not match "
            f"system octaves {system.octaves}"
        )
    first = pyramid.log_leaders[system.j1]
    S = np.zeros_like(first)
    T = np.zeros_like(first)
    log_sq_sum = 0.0
    for j in system.octaves:
        y = pyramid.log_leaders[j]
        S += y
        T += j * y
        log_sq_sum += float(np.sum(y * y))
    return RegressionData(S=S, T=T, log_sq_sum=log_sq_sum, system=system)


def linreg(data, system):
    """Pixelwise regression estimates ``(v, h) = J^{-1} (S, T)``."""
    i11 = system.R2 / system.det
    i12 = -system.R1 / system.det
    i22 = system.R0 / system.det
    v = i11 * data.S + i12 * data.T
    h = i12 * data.S + i22 * data.T
    return EstimatePair(v=v, h=h)


def phi(v, h, data, system):
    """Value of the data-fidelity quadratic ``1/2 sum_j ||v + j h - y_j||^2``."""
    quad = (
        system.R0 * np.sum(v * v)
        + 2.0 * system.R1 * np.sum(v * h)
        + system.R2 * np.sum(h * h)
    )
    lin = np.sum(data.S * v) + np.sum(data.T * h)
    return float(0.5 * quad - lin + 0.5 * data.log_sq_sum)


def grad_phi(v, h, data, system):
    """Gradient of :func:`phi`: per pixel ``J (v, h)^T - (S, T)^T``."""
    gv = system.R0 * v + system.R1 * h - data.S
    gh = system.R1 * v + system.R2 * h - data.T
    return gv, gh


def prox_phi(v, h, delta, data, system):
    """Proximal operator of ``delta * phi``: per pixel ``(I + delta J)^{-1}``
    applied to ``(v + delta S, h + delta T)``.

    At ``delta = 1`` the denominators reduce to ``(1+R0)(1+R2) - R1^2``.
    """
    if delta <= 0:
        raise ValueError(f"proximal step must be positive, got {delta}")
    d = float(delta)
    det = (1.0 + d * system.R0) * (1.0 + d * system.R2) - (d * system.R1) ** 2
    bv = v + d * data.S
    bh = h + d * data.T
    p = ((1.0 + d * system.R2) * bv - d * system.R1 * bh) / det
    q = ((1.0 + d * system.R0) * bh - d * system.R1 * bv) / det
    return p, q


def phi_conj(zv, zh, data, system):
    """Fenchel conjugate of :func:`phi` evaluated at ``(zv, zh)``.

    ``phi*(z) = 1/2 <z, J^{-1} z> + <(S, T), J^{-1} z> + C`` with the constant
    ``C = 1/2 <(S, T), J^{-1} (S, T)> - 1/2 * sum_j sum_n y_{j,n}^2`` retained
    so that duality gaps are absolute, not up to constants.
    """
    i11 = system.R2 / system.det
    i12 = -system.R1 / system.det
    i22 = system.R0 / system.det
    quad = i11 * np.sum(zv * zv) + 2.0 * i12 * np.sum(zv * zh) + i22 * np.sum(zh * zh)
    cross = np.sum(data.S * (i11 * zv + i12 * zh)) + np.sum(data.T * (i12 * zv + i22 * zh))
    return float(0.5 * quad + cross + phi_conj_constant(data, system))


def phi_conj_constant(data, system):
    """The additive constant of the conjugate, ``phi*(0)``."""
    i11 = system.R2 / system.det
    i12 = -system.R1 / system.det
    i22 = system.R0 / system.det
    c = (
        i11 * np.sum(data.S * data.S)
        + 2.0 * i12 * np.sum(data.S * data.T)
        + i22 * np.sum(data.T * data.T)
    )
    return float(0.5 * c - 0.5 * data.log_sq_sum)


def mu_table(j_max=8):
    """Strong-convexity constants for every octave range ``1 <= j1 < j2 <= j_max``."""
    rows = []
    for j1 in range(1, j_max):
        for j2 in range(j1 + 1, j_max + 1):
            rows.append((j1, j2, build_system(j1, j2).mu))
    return rows
