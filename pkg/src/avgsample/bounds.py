"""Truncation-error upper bounds and convergence-regime classification."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import ValidationError
from .kernels import HoelderPair, SamplingGrid, c_q, l0_tilde
from .sampling import AveragingScheme, _check_band, exact_gap_mse, exact_mse
from .spectral import ProcessModel, b2_sup, total_variation

DEFAULT_PAIR = HoelderPair(2.0)


def thm2_bound(model: ProcessModel, grid: SamplingGrid, t, N: int) -> float:
    """Bound on ``E|xi(t) - Y_N(xi; t)|^2``: ``L0~(t)^2 / N^2 * ||F||``."""
    _check_band(model, grid)
    if N < 1:
        raise ValidationError(f"N must be >= 1, got {N!r}")
    l0 = float(l0_tilde(grid, model.gamma, model.kernel.sup_bound, t))
    return l0 * l0 / (N * N) * total_variation(model.measure)


def _gap_factor(model: ProcessModel, grid: SamplingGrid, t, N: int, pair: HoelderPair) -> float:
    return float(c_q(grid, t, pair)) * b2_sup(model, "triangle") * (2.0 * N + 1.0) ** (2.0 / pair.p)


def lemma1_bound(model: ProcessModel, scheme: AveragingScheme, grid: SamplingGrid, t, N: int,
                 pair: HoelderPair = DEFAULT_PAIR) -> float:
    """Bound on ``E|Y_N - A_{u,N}|^2``: ``sigma^2 C_q(t) sup|B''| (2N+1)^{2/p}``."""
    scheme.check_grid(grid)
    return scheme.sigma**2 * _gap_factor(model, grid, t, N, pair)


def thm3_bound(model: ProcessModel, scheme: AveragingScheme, grid: SamplingGrid, t, N: int,
               pair: HoelderPair = DEFAULT_PAIR) -> float:
    return 2.0 * thm2_bound(model, grid, t, N) + 2.0 * lemma1_bound(model, scheme, grid, t, N, pair)


def remark3_bound(model: ProcessModel, grid: SamplingGrid, t, N: int,
                  pair: HoelderPair = DEFAULT_PAIR) -> float:
    """Scheme-free gap bound using only ``sigma <= pi / (2w)``."""
    return math.pi**2 / (4.0 * grid.w**2) * _gap_factor(model, grid, t, N, pair)


class Regime(str, enum.Enum):
    ALMOST_SURE = "almost_sure"
    MEAN_SQUARE = "mean_square"
    NONE = "none"
    INCONCLUSIVE = "inconclusive"


DYADIC_PROBE = tuple(2**k for k in range(4, 17))


def fit_power_law(Ns: Sequence[float], values: Sequence[float]):
    """Least-squares fit ``log v = log c + slope * log N``; returns ``(slope, c, max_residual)``."""
    x = np.log(np.asarray(Ns, dtype=float))
    y = np.log(np.asarray(values, dtype=float))
    slope, intercept = np.polyfit(x, y, 1)
    resid = float(np.max(np.abs(y - (slope * x + intercept))))
    return float(slope), float(math.exp(intercept)), resid


def regime_check(sigma_rule: Callable[[int], float], pair: HoelderPair = DEFAULT_PAIR,
                 eps_probe: float = 1e-3, probe: Sequence[int] = DYADIC_PROBE,
                 max_residual: float = 0.05) -> Regime:
    """Classify a window rule ``sigma(N) ~ c N^-beta`` by its fitted exponent.

    Mean-square convergence needs ``beta > 1/p``, almost-sure convergence
    ``beta > 1/2 + 1/p``; both comparisons require the margin ``eps_probe``.
    A rule that is not close to a power law on the probe set is inconclusive.
    """
    sig = np.array([float(sigma_rule(N)) for N in probe])
    if not np.all(np.isfinite(sig)) or np.any(sig <= 0):
        raise ValidationError("sigma rule must be positive and finite on the probe set")
    slope, _, resid = fit_power_law(probe, sig)
    if resid > max_residual:
        return Regime.INCONCLUSIVE
    beta = -slope
    if beta > 0.5 + 1.0 / pair.p + eps_probe:
        return Regime.ALMOST_SURE
    if beta > 1.0 / pair.p + eps_probe:
        return Regime.MEAN_SQUARE
    return Regime.NONE


def bandwidth_regime(w_rule: Callable[[int], float], pair: HoelderPair = DEFAULT_PAIR,
                     eps_probe: float = 1e-3, probe: Sequence[int] = DYADIC_PROBE) -> Regime:
    """Regime for a growing bandwidth with the widest admissible windows ``pi / (2 w(N))``."""
    return regime_check(lambda N: math.pi / (2.0 * float(w_rule(N))), pair, eps_probe, probe)


def find_n0(Ns: Sequence[int], holds: Sequence[bool]) -> Optional[int]:
    """Smallest ``N`` in the sorted sweep from which the inequality holds for every larger ``N``."""
    n0 = None
    for N, ok in sorted(zip(Ns, holds), reverse=True):
        if not ok:
            break
        n0 = N
    return n0


@dataclass(frozen=True)
class BoundReport:
    t: float
    N: int
    w: float
    sigma: float
    p: float
    thm2: float
    lemma1: float
    thm3: float
    remark3: float
    exact: float
    exact_point: float
    exact_gap: float
    mc: Optional[float] = None
    mc_se: Optional[float] = None

    @property
    def ratios(self) -> dict:
        def ratio(a, b):
            return a / b if b > 0 else None

        return {
            "exact/thm3": ratio(self.exact, self.thm3),
            "point/thm2": ratio(self.exact_point, self.thm2),
            "gap/lemma1": ratio(self.exact_gap, self.lemma1),
        }

    @property
    def dominated(self) -> bool:
        return (self.exact_point <= self.thm2 and self.exact_gap <= self.lemma1
                and self.exact <= self.thm3)


def bound_report(model: ProcessModel, scheme: AveragingScheme, grid: SamplingGrid, t, N: int,
                 pair: HoelderPair = DEFAULT_PAIR, mc: Optional[tuple] = None) -> BoundReport:
    thm2 = thm2_bound(model, grid, t, N)
    lemma1 = lemma1_bound(model, scheme, grid, t, N, pair)
    return BoundReport(
        t=float(t), N=int(N), w=grid.w, sigma=scheme.sigma, p=pair.p,
        thm2=thm2, lemma1=lemma1, thm3=2.0 * thm2 + 2.0 * lemma1,
        remark3=remark3_bound(model, grid, t, N, pair),
        exact=exact_mse(model, scheme, grid, t, N),
        exact_point=exact_mse(model, AveragingScheme.point(), grid, t, N),
        exact_gap=exact_gap_mse(model, scheme, grid, t, N),
        mc=None if mc is None else mc[0],
        mc_se=None if mc is None else mc[1],
    )
