"""Harmonizable process models on a discrete spectral grid.

A model couples a kernel ``f(t, lam)`` with a Hermitian PSD mass matrix
``F[j, k]`` on nodes ``lam_1 < ... < lam_m``; every double integral against
the spectral bimeasure becomes a finite double sum.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from .errors import NotPSDError, ValidationError

HERMITIAN_TOL = 1e-12
PSD_TOL = 1e-10

REFERENCE_NODES = (-1.0, -0.3, 0.5, 1.0)
REFERENCE_SEED = 2011


def _fourier(t, lam):
    return np.exp(1j * np.multiply(t, lam))


def _fourier_deriv(t, lam):
    return 1j * np.asarray(lam) * np.exp(1j * np.multiply(t, lam))


@dataclass(frozen=True)
class KernelFunction:
    """Entire kernel ``f(t, lam)`` plus the metadata the bounds need.

    ``func`` and ``deriv`` must broadcast over numpy arrays. ``type_fn(lam)``
    is the declared exponential type of ``t -> f(t, lam)``, ``sup_bound`` the
    declared ``sup_t sup_lam |f(t, lam)|``. Analyticity is trusted, not checked.
    """

    form: str
    func: Callable = field(default=_fourier, repr=False)
    deriv: Optional[Callable] = field(default=_fourier_deriv, repr=False)
    type_fn: Callable = field(default=np.abs, repr=False)
    sup_bound: float = 1.0
    M: float = 1.0
    alpha: float = 0.0

    def __post_init__(self):
        if self.form == "fourier":
            forced = dict(func=_fourier, deriv=_fourier_deriv, type_fn=np.abs,
                          sup_bound=1.0, M=1.0, alpha=0.0)
            for name, value in forced.items():
                object.__setattr__(self, name, value)
        elif self.form == "custom":
            if not callable(self.func) or not callable(self.type_fn):
                raise ValidationError("custom kernel needs callable func and type_fn")
            if not (self.sup_bound >= 0 and math.isfinite(self.sup_bound)):
                raise ValidationError(f"sup bound must be finite and >= 0, got {self.sup_bound!r}")
            if not self.M > 0:
                raise ValidationError(f"exponential bound constant M must be > 0, got {self.M!r}")
        else:
            raise ValidationError(f"unknown kernel form {self.form!r}")

    @classmethod
    def fourier(cls) -> "KernelFunction":
        return cls("fourier")

    @classmethod
    def custom(cls, func, type_fn, sup_bound, deriv=None, M=1.0, alpha=0.0) -> "KernelFunction":
        return cls("custom", func=func, deriv=deriv, type_fn=type_fn,
                   sup_bound=float(sup_bound), M=float(M), alpha=float(alpha))

    def __call__(self, t, lam):
        return np.asarray(self.func(t, lam), dtype=complex)

    def derivative(self, t, lam):
        if self.deriv is None:
            raise ValidationError("kernel has no time-derivative evaluator")
        return np.asarray(self.deriv(t, lam), dtype=complex)

    def derivative_sup(self, lam) -> np.ndarray:
        """Upper bound of ``sup_t |d/dt f(t, lam)|`` per node.

        For entire functions of exponential type ``c`` bounded by ``L`` on the
        real line, Bernstein's inequality gives ``c * L``; for the Fourier
        kernel this is exactly ``|lam|``.
        """
        return np.asarray(self.type_fn(np.asarray(lam, dtype=float)), dtype=float) * self.sup_bound


class SpectralMeasure:
    """Discrete spectral bimeasure: ascending nodes and a Hermitian PSD mass matrix."""

    def __init__(self, nodes, F, real_valued: bool = False):
        nodes = np.array(nodes, dtype=float).reshape(-1)
        F = np.array(F, dtype=complex)
        m = nodes.size
        if m == 0:
            raise ValidationError("spectral grid needs at least one node")
        if not np.all(np.isfinite(nodes)) or np.any(np.diff(nodes) <= 0):
            raise ValidationError("spectral nodes must be finite and strictly increasing")
        if F.shape != (m, m):
            raise ValidationError(f"mass matrix must be {m}x{m}, got shape {F.shape}")
        if not np.all(np.isfinite(F)):
            raise ValidationError("mass matrix has non-finite entries")
        if np.max(np.abs(F - F.conj().T)) > HERMITIAN_TOL:
            raise ValidationError("mass matrix is not Hermitian")
        scale = float(np.max(np.abs(F)))
        if scale > 0:
            min_eig = float(np.linalg.eigvalsh(F).min())
            if min_eig < -PSD_TOL * scale:
                raise NotPSDError(
                    f"mass matrix is not positive semidefinite (min eigenvalue {min_eig:.3e})"
                )
        if real_valued:
            if np.max(np.abs(nodes + nodes[::-1])) > HERMITIAN_TOL * max(1.0, np.abs(nodes).max()):
                raise ValidationError("real-valued processes need a node grid symmetric about 0")
            if np.max(np.abs(F[::-1, ::-1] - F.conj())) > HERMITIAN_TOL * max(1.0, scale):
                raise ValidationError(
                    "real-valued processes need F[-j, -k] = conj(F[j, k]) under node reflection"
                )
        nodes.setflags(write=False)
        F.setflags(write=False)
        self.nodes = nodes
        self.F = F
        self.real_valued = bool(real_valued)
        self.scale = scale

    @property
    def size(self) -> int:
        return self.nodes.size

    def is_diagonal(self) -> bool:
        return bool(np.all(self.F[~np.eye(self.size, dtype=bool)] == 0))

    def __repr__(self):
        return f"SpectralMeasure(m={self.size}, nodes={self.nodes.tolist()!r})"


@dataclass(frozen=True)
class ProcessModel:
    kernel: KernelFunction
    measure: SpectralMeasure
    gamma: float = field(init=False)

    def __post_init__(self):
        types = self.kernel.type_fn(self.measure.nodes)
        object.__setattr__(self, "gamma", float(np.max(types)))

    @property
    def nodes(self) -> np.ndarray:
        return self.measure.nodes

    @property
    def is_stationary(self) -> bool:
        return self.kernel.form == "fourier" and self.measure.is_diagonal()


def total_variation(measure: SpectralMeasure) -> float:
    return math.fsum(np.abs(measure.F).ravel())


def covariance(model: ProcessModel, t, s):
    """``B(t, s) = sum_jk f(t, lam_j) conj(f(s, lam_k)) F_jk``; broadcasts over t, s."""
    lam = model.nodes
    ft = model.kernel(np.asarray(t, dtype=float)[..., None], lam)
    fs = model.kernel(np.asarray(s, dtype=float)[..., None], lam)
    return np.einsum("...j,jk,...k->...", ft, model.measure.F, fs.conj())


def covariance_mixed_deriv(model: ProcessModel, t, s):
    """Mixed partial ``d^2 B / dt ds`` from the kernel's time derivative."""
    lam = model.nodes
    dt = model.kernel.derivative(np.asarray(t, dtype=float)[..., None], lam)
    ds = model.kernel.derivative(np.asarray(s, dtype=float)[..., None], lam)
    return np.einsum("...j,jk,...k->...", dt, model.measure.F, ds.conj())


DEFAULT_B2_GRID = np.linspace(-50.0, 50.0, 4001)


def b2_sup(model: ProcessModel, method: str = "triangle", t_grid=None) -> float:
    """Estimate ``sup_t |B''(t, t)|``.

    ``triangle`` returns the certified majorant ``sum_jk D_j D_k |F_jk|`` with
    ``D_j`` the derivative sup bound per node; ``grid`` returns the maximum
    over ``t_grid``, a lower estimate used only for tightness diagnostics.
    """
    if method == "triangle":
        d = model.kernel.derivative_sup(model.nodes)
        return float(d @ np.abs(model.measure.F) @ d)
    if method == "grid":
        ts = DEFAULT_B2_GRID if t_grid is None else np.asarray(t_grid, dtype=float).reshape(-1)
        if ts.size == 0:
            raise ValidationError("grid estimate of sup|B''| needs a non-empty t-grid")
        return float(np.max(np.abs(covariance_mixed_deriv(model, ts, ts))))
    raise ValidationError(f"unknown sup|B''| method {method!r}")


def random_psd(m: int, seed: int, rank: Optional[int] = None) -> np.ndarray:
    """Random Hermitian PSD matrix ``A A^H / m`` with complex Gaussian ``A``."""
    rng = np.random.Generator(np.random.Philox(seed))
    r = m if rank is None else rank
    A = rng.standard_normal((m, r)) + 1j * rng.standard_normal((m, r))
    F = A @ A.conj().T / m
    return (F + F.conj().T) / 2


def reference_model(seed: int = REFERENCE_SEED) -> ProcessModel:
    """The 4-node Fourier-kernel model used across the verification suites."""
    nodes = np.array(REFERENCE_NODES)
    return ProcessModel(KernelFunction.fourier(), SpectralMeasure(nodes, random_psd(nodes.size, seed)))


def constant_model(variance: float = 1.0) -> ProcessModel:
    """Single node at 0: the process is a time-constant random variable."""
    return ProcessModel(KernelFunction.fourier(), SpectralMeasure([0.0], [[variance]]))


def model_to_dict(model: ProcessModel, seed_hint: Optional[int] = None) -> dict:
    if model.kernel.form != "fourier":
        raise ValidationError("only fourier-kernel models can be serialized")
    F = model.measure.F
    doc = {
        "nodes": model.nodes.tolist(),
        "F_re": F.real.tolist(),
        "F_im": F.imag.tolist(),
        "kernel": "fourier",
    }
    if model.measure.real_valued:
        doc["real_valued"] = True
    if seed_hint is not None:
        doc["seed_hint"] = int(seed_hint)
    return doc


def model_from_dict(doc: dict) -> ProcessModel:
    try:
        kernel = doc.get("kernel", "fourier")
        if kernel != "fourier":
            raise ValidationError(f"unsupported kernel {kernel!r} in model document")
        nodes = doc["nodes"]
        F = np.asarray(doc["F_re"], dtype=float) + 1j * np.asarray(doc["F_im"], dtype=float)
    except KeyError as exc:
        raise ValidationError(f"model document is missing key {exc.args[0]!r}") from None
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"malformed model document: {exc}") from None
    measure = SpectralMeasure(nodes, F, real_valued=bool(doc.get("real_valued", False)))
    return ProcessModel(KernelFunction.fourier(), measure)


def save_model(model: ProcessModel, path, seed_hint: Optional[int] = None) -> None:
    Path(path).write_text(json.dumps(model_to_dict(model, seed_hint), indent=2) + "\n")


def load_model(path) -> ProcessModel:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: not valid JSON ({exc})") from None
    return model_from_dict(doc)
