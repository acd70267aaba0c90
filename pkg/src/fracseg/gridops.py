"""Discrete difference operator, adjoint, mixed norms and dual-ball projection.

All per-pixel vector fields are stored as ``(C, N1, N2)`` arrays.  The
difference operator uses forward differences with zero increments past the
last row/column (Neumann boundary), so its operator norm is bounded by
``2*sqrt(2)`` independently of the grid size.

Channel order is fixed: channel 0 holds horizontal increments (along the
second axis), channel 1 vertical increments (along the first axis).  Coupled
4-channel stacks are ordered (v-horizontal, v-vertical, h-horizontal,
h-vertical).
"""

from __future__ import annotations

import numpy as np

GRAD_NORM = 2.0 * np.sqrt(2.0)


def validate_field(x, min_size=2):
    """Return ``x`` as a float64 2-D array, checking finiteness and size."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2:
        raise ValueError(f"expected a 2-D field, got shape {x.shape}")
    if x.shape[0] < min_size or x.shape[1] < min_size:
        raise ValueError(f"field must be at least {min_size}x{min_size}, got {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError("field contains non-finite entries")
    return x


def grad(x, out=None):
    """Forward differences of a scalar field.

    Returns a ``(2, N1, N2)`` array: channel 0 is ``x[i, j+1] - x[i, j]``,
    channel 1 is ``x[i+1, j] - x[i, j]``; increments past the last
    column/row are zero.
    """
    x = np.asarray(x, dtype=np.float64)
    if out is None:
        out = np.empty((2,) + x.shape, dtype=np.float64)
    np.subtract(x[:, 1:], x[:, :-1], out=out[0, :, :-1])
    out[0, :, -1] = 0.0
    np.subtract(x[1:, :], x[:-1, :], out=out[1, :-1, :])
    out[1, -1, :] = 0.0
    return out


def grad_adjoint(y, out=None):
    """Exact adjoint of :func:`grad` (negative divergence, matching boundary).

    Satisfies ``<grad(x), y> == <x, grad_adjoint(y)>`` for every pair.
    """
    y = np.asarray(y, dtype=np.float64)
    if y.ndim != 3 or y.shape[0] != 2:
        raise ValueError(f"expected a (2, N1, N2) field, got shape {y.shape}")
    if out is None:
        out = np.empty(y.shape[1:], dtype=np.float64)
    # horizontal channel: adjoint of the truncated forward column difference
    out[:, 0] = -y[0][:, 0]
    np.subtract(y[0][:, :-2], y[0][:, 1:-1], out=out[:, 1:-1])
    out[:, -1] = y[0][:, -2]
    # vertical channel, accumulated
    out[0, :] -= y[1][0, :]
    out[1:-1, :] += y[1][:-2, :] - y[1][1:-1, :]
    out[-1, :] += y[1][-2, :]
    return out


def pixel_norms(y):
    """Per-pixel Euclidean norm of a ``(C, N1, N2)`` vector field."""
    y = np.asarray(y, dtype=np.float64)
    return np.sqrt(np.einsum("cij,cij->ij", y, y))


def norm21(y):
    """Mixed l2,1 norm: sum over pixels of the per-pixel Euclidean norm."""
    return float(np.sum(pixel_norms(y)))


def prox_conj_norm21(y, lam, out=None):
    """Per-pixel radial projection onto the Euclidean ball of radius ``lam``.

    This is the proximal operator of the Fenchel conjugate of
    ``lam * ||.||_{2,1}`` (an indicator of the dual ball), for any proximal
    step.  Pixels already inside the ball are passed through unchanged.
    """
    if lam <= 0:
        raise ValueError(f"ball radius must be positive, got {lam}")
    y = np.asarray(y, dtype=np.float64)
    norms = pixel_norms(y)
    inside = norms <= lam
    # the 1e-14 shrink keeps re-projection an exact no-op in floating point
    scale = np.where(inside, 1.0, (lam * (1.0 - 1e-14)) / np.where(inside, 1.0, norms))
    if out is None:
        return y * scale
    np.multiply(y, scale, out=out)
    return out


def prox_norm21(y, lam):
    """Proximal operator of ``lam * ||.||_{2,1}``: per-pixel vector shrinkage."""
    if lam <= 0:
        raise ValueError(f"threshold must be positive, got {lam}")
    y = np.asarray(y, dtype=np.float64)
    norms = pixel_norms(y)
    with np.errstate(invalid="ignore", divide="ignore"):
        scale = np.where(norms > lam, 1.0 - lam / norms, 0.0)
    return y * scale


def op_norm_grad():
    """Operator norm of :func:`grad`, ``2*sqrt(2)``."""
    return GRAD_NORM


def op_norm_grad_power(n1, n2, iters=200, seed=0):
    """Power-iteration estimate of ``||D||`` on an ``n1 x n2`` grid.

    Always a lower bound on the true operator norm; approaches
    ``2*sqrt(2)`` from below as the grid grows.
    """
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((n1, n2))
    x /= np.linalg.norm(x)
    for _ in range(iters):
        y = grad_adjoint(grad(x))
        nrm = np.linalg.norm(y)
        if nrm == 0.0:
            return 0.0
        x = y / nrm
    return float(np.sqrt(np.linalg.norm(grad_adjoint(grad(x)))))
