"""Local-average sampling and truncated WKS reconstruction.

The averaging windows around node ``a_n = n pi / w`` are
``[a_n - left_n, a_n + right_n]`` with ``0 <= left_n, right_n <= pi / (2 w)``.
Because ``xi(t) = sum_k f(t, lam_k) Z_k``, every reconstruction error is a
linear functional ``sum_k g_k(t) Z_k``; :func:`error_coefficients` returns
``g`` and :func:`exact_mse` the resulting quadratic form against ``F``.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Mapping
from dataclasses import dataclass

import numpy as np

from .errors import NumericalError, ValidationError
from .kernels import SamplingGrid, index_window, sinc_term
from .quadrature import adaptive_gauss_legendre
from .spectral import KernelFunction, ProcessModel

log = logging.getLogger(__name__)

FAMILIES = ("point", "uniform", "triangular")
RULES = ("constant", "random")
MSE_NEGATIVE_TOL = 1e-10

_MASK64 = np.uint64(0xFFFFFFFFFFFFFFFF)


def _splitmix64(x: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore"):
        z = (x + np.uint64(0x9E3779B97F4A7C15)) & _MASK64
        z = ((z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)) & _MASK64
        z = ((z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)) & _MASK64
        return z ^ (z >> np.uint64(31))


def _unit_hash(seed: int, n: np.ndarray, stream: int) -> np.ndarray:
    # counter-style uniform [0, 1) draw per (seed, node, stream)
    key = _splitmix64(np.uint64(seed & 0xFFFFFFFFFFFFFFFF) ^ np.uint64(stream))
    bits = _splitmix64(key ^ np.asarray(n, dtype=np.int64).astype(np.uint64))
    return (bits >> np.uint64(11)).astype(float) / float(1 << 53)


@dataclass(frozen=True)
class AveragingScheme:
    """Non-negative normalized weights ``u_n`` supported in the node windows.

    ``sigma`` is the declared sup of all half-widths. Under the ``constant``
    rule every window is ``[a_n - sigma, a_n + sigma]``; under ``random`` the
    two half-widths of node ``n`` are drawn uniformly from ``[0, sigma]``
    by a hash of ``(seed, n)``.
    """

    family: str = "point"
    sigma: float = 0.0
    rule: str = "constant"
    seed: int = 0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValidationError(f"weight family must be one of {FAMILIES}, got {self.family!r}")
        if self.rule not in RULES:
            raise ValidationError(f"half-width rule must be one of {RULES}, got {self.rule!r}")
        sigma = float(self.sigma)
        if not (math.isfinite(sigma) and sigma >= 0):
            raise ValidationError(f"sigma must be finite and >= 0, got {self.sigma!r}")
        if (self.family == "point") != (sigma == 0):
            raise ValidationError("the point family is exactly the sigma = 0 scheme")
        object.__setattr__(self, "sigma", sigma)

    @classmethod
    def point(cls) -> "AveragingScheme":
        return cls("point", 0.0)

    def check_grid(self, grid: SamplingGrid) -> None:
        limit = math.pi / (2.0 * grid.w)
        if self.sigma > limit * (1 + 1e-12):
            raise ValidationError(
                f"sigma={self.sigma!r} exceeds the window limit pi/(2w)={limit!r}"
            )

    def half_widths(self, n, t=None):
        """``(left, right)`` half-widths for nodes ``n``; windows do not depend on ``t``."""
        n = np.asarray(n, dtype=np.int64)
        if self.rule == "constant" or self.sigma == 0:
            full = np.full(n.shape, self.sigma)
            return full, full.copy()
        return (self.sigma * _unit_hash(self.seed, n, 1),
                self.sigma * _unit_hash(self.seed, n, 2))

    def windows(self, grid: SamplingGrid, n, t=None):
        left, right = self.half_widths(n, t)
        a = grid.node(n)
        return a - left, a + right


def _ramp_char(z):
    """``psi(z) = int_0^1 2u exp(i z u) du`` (characteristic function of density 2u)."""
    z = np.asarray(z, dtype=float)
    small = np.abs(z) < 1.0
    zs = np.where(small, z, 0.0)
    series = np.zeros(z.shape, dtype=complex)
    term = np.ones(z.shape, dtype=complex)
    for k in range(26):
        series += term / (k + 2)
        term = term * (1j * zs) / (k + 1)
    zl = np.where(small, 1.0, z)
    eiz = np.exp(1j * zl)
    closed = eiz / (1j * zl) + (eiz - 1.0) / (zl * zl)
    return 2.0 * np.where(small, series, closed)


def _fourier_window_char(family: str, lam, left, right):
    """``int exp(i lam y) u(y) dy`` for the window density shifted to the node."""
    lam = np.asarray(lam, dtype=float)
    if family == "point":
        return np.ones(np.broadcast(lam, left).shape, dtype=complex)
    if family == "uniform":
        width = left + right
        centre = (right - left) / 2.0
        return np.exp(1j * lam * centre) * np.sinc(lam * width / (2.0 * np.pi))
    total = left + right
    with np.errstate(invalid="ignore", divide="ignore"):
        p_left = np.where(total > 0, left / np.where(total > 0, total, 1.0), 0.5)
    left_part = np.exp(-1j * lam * left) * _ramp_char(lam * left)
    right_part = np.exp(1j * lam * right) * _ramp_char(-lam * right)
    return p_left * left_part + (1.0 - p_left) * right_part


def _density(family: str, y, left: float, right: float):
    # window density relative to the node, for quadrature
    if family == "uniform":
        return np.full(np.shape(y), 1.0 / (left + right))
    h = 2.0 / (left + right)
    return np.where(y < 0, h * (y + left) / left if left > 0 else 0.0,
                    h * (right - y) / right if right > 0 else 0.0)


def local_average_kernel(kernel: KernelFunction, lam, scheme: AveragingScheme,
                         grid: SamplingGrid, n, t=None, rtol: float = 1e-10):
    """``<f(., lam), u_n>`` for nodes ``n``; result has shape ``broadcast(n[..., None], lam)``.

    The Fourier kernel uses closed forms; custom kernels fall back to adaptive
    Gauss-Legendre on each side of the node.
    """
    scheme.check_grid(grid)
    n = np.asarray(n, dtype=np.int64)
    lam = np.asarray(lam, dtype=float)
    a = grid.node(n)[..., None]
    left, right = scheme.half_widths(n, t)
    left, right = left[..., None], right[..., None]
    if kernel.form == "fourier" or scheme.family == "point":
        if scheme.family == "point":
            return kernel(a, lam) * np.ones(np.broadcast(a, lam).shape)
        return kernel(a, lam) * _fourier_window_char(scheme.family, lam, left, right)
    out = np.empty(np.broadcast(a, lam).shape, dtype=complex)
    for idx in np.ndindex(out.shape):
        ia = idx[:-1] + (0,)
        node, lo, hi = float(a[ia]), float(left[ia]), float(right[ia])
        lm = float(np.broadcast_to(lam, out.shape)[idx])
        if lo + hi == 0:
            out[idx] = kernel(node, lm)
            continue

        def integrand(y, node=node, lm=lm, lo=lo, hi=hi):
            return kernel(node + y, lm) * _density(scheme.family, y, lo, hi)

        value = 0j
        if lo > 0:
            value += adaptive_gauss_legendre(integrand, -lo, 0.0, rtol=rtol)
        if hi > 0:
            value += adaptive_gauss_legendre(integrand, 0.0, hi, rtol=rtol)
        out[idx] = value
    return out


def _check_band(model: ProcessModel, grid: SamplingGrid) -> None:
    if not grid.w > model.gamma:
        raise ValidationError(
            f"bandwidth w={grid.w!r} must exceed the exponential type gamma={model.gamma!r}"
        )


def wks_truncated(values, grid: SamplingGrid, t, N: int):
    """Time-shifted truncated sinc series ``sum_{n in I_N(t)} values(n) sinc(t, n)``.

    ``values`` is a mapping from node index to sample, or a vectorized callable.
    """
    ns = index_window(grid, t, N)
    if isinstance(values, Mapping):
        missing = [int(n) for n in ns if int(n) not in values]
        if missing:
            raise ValidationError(f"no sample value for node indices {missing}")
        samples = np.array([values[int(n)] for n in ns], dtype=complex)
    else:
        samples = np.asarray(values(ns), dtype=complex)
    return complex(np.dot(samples, sinc_term(grid, t, ns)))


def wks_tail(values, grid: SamplingGrid, x, N: int, n_max: int, absolute: bool = True) -> float:
    """Partial tail ``sum_{N < |x w/pi - n| <= n_max}`` of the sinc series.

    With ``absolute`` the terms enter by modulus, which majorizes the modulus
    of the signed tail.
    """
    c = float(grid.offset(x))
    outer = np.arange(math.ceil(c - n_max), math.floor(c + n_max) + 1, dtype=np.int64)
    ns = outer[np.abs(c - outer) > N]
    terms = np.asarray(values(ns), dtype=complex) * sinc_term(grid, x, ns)
    if absolute:
        return math.fsum(np.abs(terms))
    return abs(complex(math.fsum(terms.real), math.fsum(terms.imag)))


def local_average_path(real, scheme: AveragingScheme, grid: SamplingGrid, n, t=None):
    """``<xi, u_n>`` for a realization, by linearity of the spectral sum.

    ``real.Z`` may be batched with shape ``(..., m)``; the result then has
    shape ``(..., len(n))``.
    """
    A = local_average_kernel(real.model.kernel, real.model.nodes, scheme, grid, np.atleast_1d(n), t)
    out = np.asarray(real.Z) @ A.T
    return out if np.ndim(n) else out[..., 0]


def avg_truncated(real, scheme: AveragingScheme, grid: SamplingGrid, t, N: int):
    """Average-sampling reconstruction ``A_{u,N}(xi; t)`` of a realization."""
    _check_band(real.model, grid)
    ns = index_window(grid, t, N)
    samples = local_average_path(real, scheme, grid, ns, t)
    return samples @ sinc_term(grid, t, ns)


def error_coefficients(model: ProcessModel, scheme: AveragingScheme, grid: SamplingGrid, t, N: int):
    """``g_k(t) = f(t, lam_k) - sum_n <f(., lam_k), u_n> sinc(t, n)``.

    Times within a few ulps of a node are treated as that node, matching the
    snapping in :meth:`SamplingGrid.offset`.
    """
    _check_band(model, grid)
    ns = index_window(grid, t, N)
    A = local_average_kernel(model.kernel, model.nodes, scheme, grid, ns, t)
    return model.kernel(float(grid.snap(t)), model.nodes) - sinc_term(grid, t, ns) @ A


def gap_coefficients(model: ProcessModel, scheme: AveragingScheme, grid: SamplingGrid, t, N: int):
    """Coefficients of ``Y_N(xi; t) - A_{u,N}(xi; t)``: averaged minus point-sample errors."""
    _check_band(model, grid)
    ns = index_window(grid, t, N)
    point = local_average_kernel(model.kernel, model.nodes, AveragingScheme.point(), grid, ns, t)
    avg = local_average_kernel(model.kernel, model.nodes, scheme, grid, ns, t)
    return sinc_term(grid, t, ns) @ (point - avg)


def quadratic_mse(g, F) -> float:
    """``sum_jk g_j conj(g_k) F_jk`` with negative rounding dust clipped to 0."""
    g = np.asarray(g, dtype=complex)
    value = float(np.real(g @ F @ g.conj()))
    if value >= 0:
        return value
    scale = float(np.max(np.abs(F), initial=0.0)) * float(np.sum(np.abs(g))) ** 2
    if value < -MSE_NEGATIVE_TOL * scale:
        raise NumericalError(f"mean-square error {value:.3e} is negative beyond tolerance")
    log.debug("clipping negative mean-square dust %.3e to 0", value)
    return 0.0


def exact_mse(model: ProcessModel, scheme: AveragingScheme, grid: SamplingGrid, t, N: int) -> float:
    """``E |xi(t) - A_{u,N}(xi; t)|^2`` evaluated exactly on the spectral grid."""
    return quadratic_mse(error_coefficients(model, scheme, grid, t, N), model.measure.F)


def exact_gap_mse(model: ProcessModel, scheme: AveragingScheme, grid: SamplingGrid, t, N: int) -> float:
    """``E |Y_N(xi; t) - A_{u,N}(xi; t)|^2``."""
    return quadratic_mse(gap_coefficients(model, scheme, grid, t, N), model.measure.F)


def asymptotic_mse(model: ProcessModel, scheme: AveragingScheme, grid: SamplingGrid, t) -> float:
    """``lim_{N -> inf}`` of :func:`exact_mse` for constant windows and the Fourier kernel.

    The averaged samples are then samples of ``phi(lam) exp(i lam x)`` with
    ``phi`` the window characteristic function; that function has type
    ``|lam| < w`` so the full sinc series reproduces it, leaving the error
    coefficient ``exp(i lam t) (1 - phi(lam))``.
    """
    _check_band(model, grid)
    scheme.check_grid(grid)
    if model.kernel.form != "fourier" or scheme.rule != "constant":
        raise ValidationError("asymptotic error is available for fourier kernels with constant windows")
    lam = model.nodes
    s = np.full(lam.shape, scheme.sigma)
    phi = _fourier_window_char(scheme.family, lam, s, s)
    return quadratic_mse(np.exp(1j * lam * float(t)) * (1.0 - phi), model.measure.F)
