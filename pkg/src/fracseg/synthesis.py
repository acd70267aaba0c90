"""Ground-truth texture generator.

Homogeneous textures are increments of a harmonizable fractional Brownian
field synthesized spectrally on a doubled periodic grid; piecewise textures
copy independent homogeneous fields region by region under a mask.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad


@dataclass(frozen=True)
class FractalParams:
    """Parameters of one homogeneous fractal texture.

    ``sigma`` is the target standard deviation (the texture variance is
    ``sigma**2``); ``lag`` is the increment lag in pixels.
    """

    H: float
    sigma: float
    seed: int
    N: int
    lag: int = 1

    def __post_init__(self):
        if not (0.0 < self.H < 1.0):
            raise ValueError(f"H must lie in (0, 1), got {self.H}")
        if self.sigma <= 0.0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")
        if self.N < 64 or (self.N & (self.N - 1)) != 0:
            raise ValueError(f"N must be a power of two >= 64, got {self.N}")
        if self.lag < 1:
            raise ValueError(f"lag must be a positive integer, got {self.lag}")

    @classmethod
    def from_variance(cls, H, variance, seed, N, lag=1):
        return cls(H=H, sigma=math.sqrt(variance), seed=seed, N=N, lag=lag)


@dataclass
class PiecewiseSpec:
    """A mask of region indices plus one :class:`FractalParams` per region."""

    mask: np.ndarray
    region_params: list

    def __post_init__(self):
        self.mask = np.asarray(self.mask)
        if self.mask.ndim != 2:
            raise ValueError("mask must be a 2-D integer matrix")
        labels = np.unique(self.mask)
        if labels.min() < 0 or labels.max() >= len(self.region_params):
            raise ValueError(
                f"mask labels {labels} do not index {len(self.region_params)} regions"
            )
        n = self.region_params[0].N
        for p in self.region_params:
            if p.N != n:
                raise ValueError("all regions must share the same grid side N")
        if self.mask.shape != (n, n):
            raise ValueError(
                f"mask shape {self.mask.shape} does not match grid side {n}"
            )

    @classmethod
    def two_region(cls, mask, variance0, h0, variance1, h1, master_seed, N, lag=1):
        """Background/foreground spec with region seeds split from one master seed."""
        return cls(
            mask=mask,
            region_params=[
                FractalParams.from_variance(h0, variance0, region_seed(master_seed, 0), N, lag),
                FractalParams.from_variance(h1, variance1, region_seed(master_seed, 1), N, lag),
            ],
        )


def region_seed(master_seed, region_index):
    """Derive a per-region seed; adding regions never perturbs existing ones."""
    return np.random.SeedSequence(entropy=master_seed, spawn_key=(region_index,))


def c_of_h(H, d=2):
    """Normalization constant of the harmonizable fractional Brownian kernel."""
    if not (0.0 < H < 1.0):
        raise ValueError(f"H must lie in (0, 1), got {H}")
    num = math.sqrt(math.pi) * math.gamma(H + 0.5)
    den = (
        2.0 ** (d / 2.0)
        * H
        * math.gamma(2.0 * H)
        * math.sin(math.pi * H)
        * math.gamma(H + d / 2.0)
    )
    return num / den


_ALIAS_ORDER = 6
_kernel_cache = {}


def _folded_kernel_sq(H, p):
    """Squared spectral amplitude ``sum_m ||f + 2 pi m||^(-2H-2)`` per lattice bin.

    Folding the aliases is exact for fields evaluated on the integer lattice:
    frequencies ``f + 2 pi m`` are indistinguishable there, so their powers
    add.  The remaining tail beyond the folding order is restored by the
    closed-form integral of the radial power law.
    """
    key = (round(float(H), 12), int(p))
    cached = _kernel_cache.get(key)
    if cached is not None:
        return cached
    freq = 2.0 * np.pi * np.fft.fftfreq(p)
    fx = freq[None, :]
    fy = freq[:, None]
    g2 = np.zeros((p, p))
    m = _ALIAS_ORDER
    expo = -(H + 1.0)
    for m1 in range(-m, m + 1):
        ax = fx + 2.0 * np.pi * m1
        for m2 in range(-m, m + 1):
            ay = fy + 2.0 * np.pi * m2
            rho2 = ax * ax + ay * ay
            if m1 == 0 and m2 == 0:
                rho2[0, 0] = 1.0
            g2 += rho2**expo
    # tail beyond the folded square, integrated exactly over the box complement
    a = 2.0 * np.pi * (m + 0.5)
    t_box = 8.0 * quad(lambda th: math.cos(th) ** (2.0 * H), 0.0, math.pi / 4.0)[0]
    g2 += a ** (-2.0 * H) / (2.0 * H) * t_box / (2.0 * np.pi) ** 2
    g2[0, 0] = 0.0
    if len(_kernel_cache) > 8:
        _kernel_cache.clear()
    _kernel_cache[key] = g2
    return g2


def _fbf(H, sigma, rng, size):
    """Fractional Brownian field on a ``size x size`` grid.

    Spectral synthesis on a doubled ``2*size`` periodic lattice: complex white
    noise shaped by the alias-folded ``||f||^(-(H+1))`` kernel, zero DC bin,
    real part, value at the origin pixel subtracted, cropped to ``size``.
    The amplitude is calibrated so that ``E[(B_n - B_m)^2] = sigma^2
    ||n - m||^(2H)``; the calibration uses the quadrature identity
    ``int |e^(-i f.e) - 1|^2 ||f||^(-2H-2) df = 2 pi C(H)``.
    """
    p = 2 * size
    kernel = np.sqrt(_folded_kernel_sq(H, p))
    noise = rng.standard_normal((p, p)) + 1j * rng.standard_normal((p, p))
    noise *= np.sqrt(0.5)
    spec = kernel * noise
    w = np.fft.fft2(spec)
    # e^{-i f.n} - 1 amounts to subtracting the origin sample
    df = (2.0 * np.pi / p) ** 2
    scale = sigma * np.sqrt(df / (np.pi * c_of_h(H)))
    b = scale * (w.real - w.real[0, 0])
    b = b[:size, :size]
    b += scale * _dc_cell_component(H, rng, size, p)
    return b


_DC_NODES = 128


def _dc_cell_component(H, rng, size, p):
    """Low-frequency content of the zero-frequency lattice cell.

    The lattice carries no coefficient below its fundamental frequency, yet
    for large ``H`` that cell holds a non-negligible share of the increment
    energy (a slowly drifting component across the crop window).  It is
    restored by importance-sampled spectral nodes: the radial law of the
    sampler cancels the kernel singularity, and the ensemble covariance of
    the sum is the exact cell integral for any node count.
    """
    df_lin = 2.0 * np.pi / p
    df = df_lin**2
    q = _DC_NODES
    theta = rng.uniform(0.0, 2.0 * np.pi, size=q)
    umax = np.maximum(np.abs(np.cos(theta)), np.abs(np.sin(theta)))
    r_edge = (0.5 * df_lin) / umax
    expo = 2.0 - 2.0 * H
    r = r_edge * rng.uniform(0.0, 1.0, size=q) ** (1.0 / expo)
    f1 = r * np.cos(theta)
    f2 = r * np.sin(theta)
    # density of (f1, f2): uniform angle x power-law radius, per unit area
    dens = (expo * r ** (1.0 - 2.0 * H) / r_edge**expo) / (2.0 * np.pi * r)
    g2 = r ** (-2.0 * (H + 1.0))
    coeff = np.sqrt(g2 / (df * q * dens))
    xi = (rng.standard_normal(q) + 1j * rng.standard_normal(q)) * np.sqrt(0.5)
    grid = np.arange(size)
    e1 = np.exp(-1j * np.outer(f1, grid))
    e2 = np.exp(-1j * np.outer(f2, grid))
    z = np.einsum("q,qi,qj->ij", coeff * xi, e1, e2)
    return z.real - z.real[0, 0]


def synth_fbf(params):
    """Sample one fractional Brownian field (zero at the origin pixel)."""
    rng = np.random.default_rng(params.seed)
    return _fbf(params.H, params.sigma, rng, params.N)


def synth_y(params, rescale=True):
    """Stationary texture built from horizontal plus vertical fBf increments.

    The normalization makes ``E[Y^2] = sigma^2`` exactly in the continuum;
    with ``rescale`` (the default) each sampled field is additionally centered
    and scaled so its population standard deviation equals ``sigma`` exactly,
    compensating the discretization of the spectral integral.  Pass
    ``rescale=False`` for covariance studies of the raw field.
    """
    rng = np.random.default_rng(params.seed)
    d = params.lag
    # unit-amplitude base field: the prefactor below carries the target sigma
    b = _fbf(params.H, 1.0, rng, params.N + d)
    n = params.N
    pref = params.sigma / (2.0 * d**params.H * math.sqrt(1.0 - 2.0 ** (params.H - 2.0)))
    y = pref * (
        (b[:n, d : n + d] - b[:n, :n]) + (b[d : n + d, :n] - b[:n, :n])
    )
    if rescale:
        y = y - y.mean()
        sd = y.std()
        if sd > 0:
            y *= params.sigma / sd
    return y


def y_covariance(delta_n, H, sigma, lag=1):
    """Closed-form covariance of the increment texture at offset ``delta_n``."""
    dn = np.asarray(delta_n, dtype=np.float64)
    d = float(lag)
    e1 = np.array([0.0, d])
    e2 = np.array([d, 0.0])

    def r(v):
        return float(np.hypot(v[0], v[1]) ** (2.0 * H))

    total = (
        r(dn + e1)
        + r(dn - e1)
        + r(dn + e2)
        + r(dn - e2)
        - 3.0 * r(dn)
        - 0.5 * r(dn + e1 - e2)
        - 0.5 * r(dn - e1 + e2)
    )
    return sigma**2 * d ** (-2.0 * H) / (4.0 - 2.0**H) * total


def synth_piecewise(spec, rescale=True):
    """Assemble one texture by copying an independent field per region."""
    fields = [synth_y(p, rescale=rescale) for p in spec.region_params]
    out = np.empty_like(fields[0])
    for idx, f in enumerate(fields):
        sel = spec.mask == idx
        out[sel] = f[sel]
    return out


def ellipse_mask(n, center=None, semi_axes=None):
    """Binary mask, 1 inside an axis-aligned ellipse.

    Defaults to the centered ellipse with semi-axes ``(0.30 n, 0.22 n)``.
    """
    if semi_axes is None:
        semi_axes = (0.30 * n, 0.22 * n)
    if center is None:
        center = ((n - 1) / 2.0, (n - 1) / 2.0)
    a, b = float(semi_axes[0]), float(semi_axes[1])
    c0, c1 = float(center[0]), float(center[1])
    if a < 0 or b < 0:
        raise ValueError("semi-axes must be nonnegative")
    if a > 0 and (c0 - a < -0.5 or c0 + a > n - 0.5):
        raise ValueError("ellipse exceeds the grid vertically")
    if b > 0 and (c1 - b < -0.5 or c1 + b > n - 0.5):
        raise ValueError("ellipse exceeds the grid horizontally")
    if a == 0.0 or b == 0.0:
        return np.zeros((n, n), dtype=np.uint8)
    i = np.arange(n)[:, None]
    j = np.arange(n)[None, :]
    inside = ((i - c0) / a) ** 2 + ((j - c1) / b) ** 2 <= 1.0
    return inside.astype(np.uint8)
