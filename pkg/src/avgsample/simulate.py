"""Gaussian realizations of a process model and Monte Carlo error estimates.

Amplitudes are ``Z = L zeta`` with ``L L^H = F`` and ``zeta`` independent
standard circular complex Gaussians. Every trial draws from its own Philox
stream keyed by ``(seed, trial)``, so trials can run in any order or in
parallel and still reduce to the same bits.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import NotPSDError, NumericalError, ValidationError
from .kernels import SamplingGrid
from .sampling import AveragingScheme, _check_band, avg_truncated
from .spectral import PSD_TOL, ProcessModel, SpectralMeasure

_U64 = 1 << 64


@dataclass(frozen=True)
class MeasureFactor:
    L: np.ndarray

    @property
    def rank(self) -> int:
        return self.L.shape[1]


@dataclass(frozen=True)
class Realization:
    """Spectral amplitudes of one path, or a batch of paths when ``Z`` is 2-D."""

    Z: np.ndarray
    model: ProcessModel


def factorize(measure: SpectralMeasure) -> MeasureFactor:
    """Rank-revealing square root of ``F`` via eigendecomposition.

    Eigenvalues within the PSD tolerance are dropped; columns are ordered by
    decreasing eigenvalue and phase-normalized so the largest-modulus entry
    is real positive.
    """
    F = measure.F
    m = measure.size
    scale = measure.scale
    if scale == 0:
        return MeasureFactor(np.zeros((m, 0), dtype=complex))
    vals, vecs = np.linalg.eigh(F)
    tol = PSD_TOL * scale
    if vals.min() < -tol:
        raise NotPSDError(f"cannot factorize: eigenvalue {vals.min():.3e} below tolerance")
    order = np.argsort(-vals, kind="stable")
    keep = order[vals[order] > tol]
    V = vecs[:, keep]
    pivot = V[np.argmax(np.abs(V), axis=0), np.arange(V.shape[1])]
    V = V * (np.abs(pivot) / pivot)
    L = V * np.sqrt(vals[keep])
    if np.max(np.abs(L @ L.conj().T - F)) > PSD_TOL * scale:
        raise NumericalError("factorization does not reproduce the mass matrix")
    return MeasureFactor(L)


def _check_seed(seed) -> int:
    if int(seed) != seed or not 0 <= seed < _U64:
        raise ValidationError(f"seed must be an unsigned 64-bit integer, got {seed!r}")
    return int(seed)


def _amplitudes(model: ProcessModel, factor: MeasureFactor, seed: int, trial: int) -> np.ndarray:
    rng = np.random.Generator(np.random.Philox(key=seed | (trial << 64)))
    r = factor.rank
    draws = rng.standard_normal(2 * r)
    zeta = (draws[:r] + 1j * draws[r:]) / math.sqrt(2.0)
    Z = factor.L @ zeta
    if model.measure.real_valued:
        Z = (Z + Z[::-1].conj()) / math.sqrt(2.0)
    return Z


def _check_factor(model: ProcessModel, factor: MeasureFactor) -> None:
    if factor.L.shape[0] != model.measure.size:
        raise ValidationError(
            f"factor has {factor.L.shape[0]} rows but the model has {model.measure.size} nodes"
        )


def sample_path(model: ProcessModel, factor: MeasureFactor, seed: int) -> Realization:
    _check_factor(model, factor)
    return Realization(_amplitudes(model, factor, _check_seed(seed), 0), model)


def sample_ensemble(model: ProcessModel, factor: MeasureFactor, seed: int, trials: int,
                    start: int = 0) -> Realization:
    """Batch of ``trials`` paths; row ``i`` is trial ``start + i`` of ``seed``."""
    _check_factor(model, factor)
    seed = _check_seed(seed)
    m = model.measure.size
    Z = np.empty((trials, m), dtype=complex)
    for i in range(trials):
        Z[i] = _amplitudes(model, factor, seed, start + i)
    return Realization(Z, model)


def evaluate(real: Realization, t):
    """``xi(t) = sum_k f(t, lam_k) Z_k``; output shape ``Z.shape[:-1] + shape(t)``."""
    f = real.model.kernel(np.asarray(t, dtype=float)[..., None], real.model.nodes)
    return np.tensordot(np.asarray(real.Z), f, axes=([-1], [-1]))


def monte_carlo_mse(model: ProcessModel, scheme: AveragingScheme, grid: SamplingGrid, t, N: int,
                    trials: int, seed: int, workers: int = 1, chunk: int = 2048):
    """Sample mean and standard error of ``|xi(t) - A_{u,N}(xi; t)|^2``.

    Errors are computed path by path from simulated amplitudes. The final
    sums use ``math.fsum`` which is exactly rounded, so the result is
    independent of chunking, worker count and completion order.
    """
    if int(trials) != trials or trials < 2:
        raise ValidationError(f"Monte Carlo needs at least 2 trials, got {trials!r}")
    _check_band(model, grid)
    seed = _check_seed(seed)
    factor = factorize(model.measure)
    errors = np.empty(trials)

    def run(start):
        stop = min(start + chunk, trials)
        batch = sample_ensemble(model, factor, seed, stop - start, start=start)
        diff = evaluate(batch, t) - avg_truncated(batch, scheme, grid, t, N)
        errors[start:stop] = np.abs(diff) ** 2

    starts = range(0, trials, chunk)
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            list(pool.map(run, starts))
    else:
        for s in starts:
            run(s)
    mean = math.fsum(errors) / trials
    var = math.fsum((errors - mean) ** 2) / (trials - 1)
    return mean, math.sqrt(var / trials)
