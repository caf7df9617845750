"""Scalar building blocks: sinc kernels, index windows and bound constants.

All functions broadcast over numpy arrays in ``t`` / ``n`` where that makes
sense; scalar inputs give scalar (numpy float) outputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError

# |w t - n pi| below this switches the sinc to its Taylor polynomial
SINC_TAYLOR_CUTOFF = 1e-8
# relative distance (in ulps) at which a time is snapped onto a sampling node
_NODE_SNAP_ULPS = 4.0

_ONE_MINUS_EXP_MINUS_PI = -math.expm1(-math.pi)


@dataclass(frozen=True)
class SamplingGrid:
    """Uniform sampling nodes ``n * pi / w``."""

    w: float

    def __post_init__(self):
        w = float(self.w)
        if not (math.isfinite(w) and w > 0):
            raise ValidationError(f"bandwidth w must be finite and > 0, got {self.w!r}")
        object.__setattr__(self, "w", w)

    @property
    def spacing(self) -> float:
        return math.pi / self.w

    def node(self, n):
        return np.asarray(n, dtype=float) * self.spacing

    def offset(self, t):
        """Return ``t w / pi``, snapped to the nearest integer within a few ulps.

        Snapping makes ``offset(node(m)) == m`` exactly, so that sinc values
        and ``sin(w t)`` vanish exactly at the nodes.
        """
        c = np.asarray(t, dtype=float) / self.spacing
        r = np.round(c)
        tol = _NODE_SNAP_ULPS * np.finfo(float).eps * np.maximum(1.0, np.abs(c))
        return np.where(np.abs(c - r) <= tol, r, c)

    def snap(self, t):
        """``t`` moved onto the node it snaps to, else unchanged."""
        c = self.offset(t)
        return np.where(c == np.round(c), self.node(c), np.asarray(t, dtype=float))


@dataclass(frozen=True)
class HoelderPair:
    """Conjugate exponents with ``1/p + 1/q = 1``; ``q`` is derived when omitted."""

    p: float
    q: float = field(default=None)

    def __post_init__(self):
        p = float(self.p)
        if not (math.isfinite(p) and p > 1):
            raise ValidationError(f"Hoelder exponent p must be > 1, got {self.p!r}")
        q = p / (p - 1.0) if self.q is None else float(self.q)
        if not q > 1 or abs(1.0 / p + 1.0 / q - 1.0) > 1e-12:
            raise ValidationError(f"(p, q) = ({p}, {q}) is not a conjugate pair")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)

    @classmethod
    def from_q(cls, q: float) -> "HoelderPair":
        q = float(q)
        if not q > 1:
            raise ValidationError(f"Hoelder exponent q must be > 1, got {q!r}")
        return cls(q / (q - 1.0), q)


def sin_pi(x):
    """``sin(pi x)`` that is exactly zero at integers."""
    x = np.asarray(x, dtype=float)
    k = np.round(x)
    sign = np.where(np.fmod(k, 2.0) == 0.0, 1.0, -1.0)
    return sign * np.sin(np.pi * (x - k))


def _sinc_pi(d):
    # sin(pi d) / (pi d) with the removable singularity handled
    d = np.asarray(d, dtype=float)
    y = np.pi * d
    small = np.abs(y) < SINC_TAYLOR_CUTOFF
    y2 = y * y
    taylor = 1.0 - y2 / 6.0 + y2 * y2 / 120.0
    with np.errstate(divide="ignore", invalid="ignore"):
        direct = sin_pi(d) / np.where(small, 1.0, y)
    return np.clip(np.where(small, taylor, direct), -1.0, 1.0)


def sinc_term(grid: SamplingGrid, t, n):
    """``sin(w t - n pi) / (w t - n pi)``; equals 1 at ``w t = n pi``."""
    return _sinc_pi(grid.offset(t) - np.asarray(n, dtype=float))


def sin_wt(grid: SamplingGrid, t):
    """``sin(w t)``, exactly zero at the sampling nodes."""
    return sin_pi(grid.offset(t))


def nearest_index(grid: SamplingGrid, x) -> int:
    """Integer nearest to ``x w / pi``; half-integers round toward +inf."""
    x = float(x)
    if not math.isfinite(x):
        raise ValidationError(f"time must be finite, got {x!r}")
    return int(math.floor(float(grid.offset(x)) + 0.5))


def index_window(grid: SamplingGrid, t, N: int) -> np.ndarray:
    """All integers ``n`` with ``|t w / pi - n| <= N`` in ascending order."""
    if int(N) != N or N < 1:
        raise ValidationError(f"window size N must be an integer >= 1, got {N!r}")
    t = float(t)
    if not math.isfinite(t):
        raise ValidationError(f"time must be finite, got {t!r}")
    c = float(grid.offset(t))
    return np.arange(math.ceil(c - N), math.floor(c + N) + 1, dtype=np.int64)


_EM_START = 100


def dirichlet_lambda(q: float) -> float:
    """Dirichlet lambda ``sum_{n>=1} (2n-1)^{-q}`` for ``q > 1``.

    A direct partial sum over the first terms plus the integral of the tail;
    Euler-Maclaurin boundary corrections bring the tail error far below 1e-12
    even for ``q`` close to 1.
    """
    q = float(q)
    if not (q > 1):
        raise ValidationError(f"Dirichlet lambda diverges for q <= 1, got {q!r}")
    head = math.fsum((2.0 * n - 1.0) ** -q for n in range(1, _EM_START))
    x = 2.0 * _EM_START - 1.0
    # tail over n >= _EM_START of g(n) = (2n-1)^-q
    integral = x ** (1.0 - q) / (2.0 * (q - 1.0))
    g = x**-q
    dg = -2.0 * q * x ** (-q - 1.0)
    d3g = -8.0 * q * (q + 1.0) * (q + 2.0) * x ** (-q - 3.0)
    d5g = -32.0 * q * (q + 1.0) * (q + 2.0) * (q + 3.0) * (q + 4.0) * x ** (-q - 5.0)
    tail = integral + g / 2.0 - dg / 12.0 + d3g / 720.0 - d5g / 30240.0
    return head + tail


def c_q(grid: SamplingGrid, t, pair: HoelderPair):
    """``(1 + 2^{q+1} |sin w t|^q lambda(q) / pi^q)^{2/q}``."""
    q = pair.q
    s = np.abs(sin_wt(grid, t))
    return (1.0 + 2.0 ** (q + 1.0) * s**q * dirichlet_lambda(q) / math.pi**q) ** (2.0 / q)


def _check_type(grid: SamplingGrid, gamma: float) -> None:
    if not (0 <= gamma < grid.w):
        raise ValidationError(
            f"exponential type gamma={gamma!r} must satisfy 0 <= gamma < w={grid.w!r}"
        )


def l0_deterministic(grid: SamplingGrid, gamma: float, L_f: float, z):
    """Tail constant for an entire function bounded by ``L_f`` on the real axis."""
    _check_type(grid, gamma)
    if L_f < 0:
        raise ValidationError(f"sup bound L_f must be >= 0, got {L_f!r}")
    w = grid.w
    return 4.0 * w * L_f * np.abs(sin_wt(grid, z)) / (math.pi * (w - gamma) * _ONE_MINUS_EXP_MINUS_PI)


def l0_tilde(grid: SamplingGrid, gamma: float, Lf_tilde: float, t):
    """Same constant with the kernel's uniform sup bound over all spectral nodes."""
    return l0_deterministic(grid, gamma, Lf_tilde, t)
