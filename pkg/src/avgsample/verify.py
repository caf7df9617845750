"""Verification suites run by ``avgsample verify``.

Each suite returns a plain dict (JSON-ready) with a ``passed`` flag, the
individual checks and, for the asymptotic inequalities, the recorded ``N0``.
All randomness goes through Philox streams keyed by the master seed.
"""

from __future__ import annotations

import math
from typing import Callable, Optional, Sequence

import numpy as np

from .bounds import (HoelderPair, Regime, find_n0, fit_power_law, lemma1_bound, regime_check,
                     remark3_bound, thm2_bound, thm3_bound)
from .kernels import (SamplingGrid, c_q, dirichlet_lambda, index_window, l0_deterministic,
                      sin_wt, sinc_term)
from .sampling import AveragingScheme, asymptotic_mse, exact_gap_mse, exact_mse, wks_tail
from .sampling import avg_truncated
from .simulate import evaluate, factorize, monte_carlo_mse, sample_ensemble
from .spectral import (KernelFunction, ProcessModel, SpectralMeasure, constant_model, covariance,
                       random_psd)

DYADIC_N = (8, 16, 32, 64, 128, 256, 512)
DECAY_TIMES = (0.3, 0.77, 1.1, 2.05, -1.3)
SLOPE_LIMIT = -2.0 + 0.15


def _rng(seed: int, stream: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=seed | (stream << 64)))


def _suite(name: str, checks: list, **extra) -> dict:
    return {"name": name, "passed": all(c["ok"] for c in checks), **extra, "checks": checks}


def closed_forms() -> dict:
    grid = SamplingGrid(2.0)
    checks = [
        {"what": "lambda(2) = pi^2/8", "error": abs(dirichlet_lambda(2.0) - math.pi**2 / 8)},
        {"what": "lambda(4) = pi^4/96", "error": abs(dirichlet_lambda(4.0) - math.pi**4 / 96)},
        {"what": "C_2 = 2 at w t = pi/2",
         "error": abs(float(c_q(grid, math.pi / (2 * grid.w), HoelderPair(2.0))) - 2.0)},
    ]
    for c in checks:
        c["ok"] = c["error"] <= 1e-12
    return _suite("closed_forms", checks)


def sinc_power_sum(seed: int, cases: int = 200) -> dict:
    rng = _rng(seed, 1)
    violations = 0
    worst = 0.0
    for _ in range(cases):
        grid = SamplingGrid(float(rng.uniform(0.5, 6.0)))
        t = float(rng.uniform(-20.0, 20.0))
        N = int(rng.integers(1, 257))
        q = float(rng.choice([1.5, 2.0, 3.0, 4.0]))
        lhs = math.fsum(np.abs(sinc_term(grid, t, index_window(grid, t, N))) ** q)
        rhs = 1.0 + 2.0 ** (q + 1) * dirichlet_lambda(q) * abs(float(sin_wt(grid, t))) ** q / math.pi**q
        violations += lhs > rhs
        worst = max(worst, lhs / rhs)
    return _suite("sinc_power_sum", [{"what": "sum |sinc|^q <= 1 + 2^(q+1) lambda(q) |sin wt|^q / pi^q",
                                      "cases": cases, "violations": int(violations),
                                      "max_ratio": worst, "ok": violations == 0}])


def truncation_tail(seed: int, xs: int = 50, Ns: Sequence[int] = (16, 64, 256),
                  widths: Sequence[float] = (2.0, math.pi), n_max: int = 4096) -> dict:
    """Absolute tail of the sinc series of ``sin(x)/x`` against ``L0(x)/N``."""
    rng = _rng(seed, 2)
    gamma = 1.0

    def f(n, grid):
        x = grid.node(n)
        return np.sinc(gamma * x / math.pi)

    checks = []
    for w in widths:
        grid = SamplingGrid(w)
        holds = {N: True for N in Ns}
        worst = {N: 0.0 for N in Ns}
        for x in rng.uniform(-10.0, 10.0, xs):
            for N in Ns:
                tail = wks_tail(lambda n: f(n, grid), grid, x, N, n_max)
                bound = float(l0_deterministic(grid, gamma, 1.0, x)) / N
                holds[N] &= tail < bound
                worst[N] = max(worst[N], tail / bound)
        n0 = find_n0(list(Ns), [holds[N] for N in Ns])
        checks.append({"w": w, "n0": n0, "max_ratio": {str(N): worst[N] for N in Ns},
                       "ok": n0 is not None and n0 <= 16})
    return _suite("truncation_tail", checks)


def _dominance(model: ProcessModel, grid: SamplingGrid, ts, Ns, lhs: Callable, rhs: Callable):
    holds = []
    worst = 0.0
    for N in Ns:
        ok = True
        for t in ts:
            a, b = lhs(t, N), rhs(t, N)
            ok &= a <= b
            if b > 0:
                worst = max(worst, a / b)
        holds.append(bool(ok))
    return find_n0(list(Ns), holds), worst


def point_dominance(model: ProcessModel, grid: SamplingGrid, ts, Ns=DYADIC_N) -> dict:
    point = AveragingScheme.point()
    n0, worst = _dominance(model, grid, ts, Ns,
                           lambda t, N: exact_mse(model, point, grid, t, N),
                           lambda t, N: thm2_bound(model, grid, t, N))
    return _suite("point_dominance", [{"what": "E|xi - Y_N|^2 <= thm2", "n0": n0,
                                          "max_ratio": worst, "ok": n0 is not None}])


def averaging_dominance(model: ProcessModel, grid: SamplingGrid, ts, Ns=DYADIC_N,
                              sigmas: Optional[Sequence[float]] = None,
                              ps: Sequence[float] = (2.0, 3.0)) -> dict:
    if sigmas is None:
        sigmas = (0.05, 0.1, math.pi / (2 * grid.w))
    checks = []
    for sigma in sigmas:
        scheme = AveragingScheme("uniform", sigma)
        for p in ps:
            pair = HoelderPair(p)
            n0_l1, worst_l1 = _dominance(model, grid, ts, Ns,
                                         lambda t, N: exact_gap_mse(model, scheme, grid, t, N),
                                         lambda t, N: lemma1_bound(model, scheme, grid, t, N, pair))
            n0_t3, worst_t3 = _dominance(model, grid, ts, Ns,
                                         lambda t, N: exact_mse(model, scheme, grid, t, N),
                                         lambda t, N: thm3_bound(model, scheme, grid, t, N, pair))
            r3 = all(remark3_bound(model, grid, t, N, pair) >= lemma1_bound(model, scheme, grid, t, N, pair)
                     for t in ts for N in Ns)
            checks.append({"sigma": sigma, "p": p, "n0_lemma1": n0_l1, "max_ratio_lemma1": worst_l1,
                           "n0_thm3": n0_t3, "max_ratio_thm3": worst_t3, "remark3_dominates": r3,
                           "ok": n0_l1 is not None and n0_t3 is not None and r3})
    return _suite("averaging_dominance", checks)


def decay_slope(model: ProcessModel, grid: SamplingGrid, ts=DECAY_TIMES, Ns=DYADIC_N) -> dict:
    point = AveragingScheme.point()
    checks = []
    for t in ts:
        mse = [exact_mse(model, point, grid, t, N) for N in Ns]
        slope, _, _ = fit_power_law(Ns, mse)
        checks.append({"t": t, "slope": slope, "ok": slope <= SLOPE_LIMIT})
    return _suite("decay_slope", checks)


def regime_convergence(model: ProcessModel, grid: SamplingGrid, ts=DECAY_TIMES,
                       p: float = 2.0, N_final: int = 512, const_sigma: float = 0.1) -> dict:
    """Shrinking windows converge; constant windows stall at their asymptotic floor."""
    pair = HoelderPair(p)
    beta = 1.0 / p + 0.1
    checks = [
        {"what": "classify N^-1, p=2", "regime": regime_check(lambda N: N**-1.0, HoelderPair(2.0)).value},
        {"what": "classify N^-2, p=2", "regime": regime_check(lambda N: N**-2.0, HoelderPair(2.0)).value},
        {"what": "classify const", "regime": regime_check(lambda N: 0.1, HoelderPair(2.0)).value},
        {"what": f"classify N^-{beta}", "regime": regime_check(lambda N: N**-beta, pair).value},
    ]
    expected = [Regime.MEAN_SQUARE, Regime.ALMOST_SURE, Regime.NONE, Regime.MEAN_SQUARE]
    for c, e in zip(checks, expected):
        c["ok"] = c["regime"] == e.value
    shrinking = AveragingScheme("uniform", min(N_final**-beta, math.pi / (2 * grid.w)))
    constant = AveragingScheme("uniform", const_sigma)
    for t in ts:
        var = float(np.real(covariance(model, t, t)))
        mse = exact_mse(model, shrinking, grid, t, N_final)
        checks.append({"what": "shrinking windows converge", "t": t, "mse": mse,
                       "threshold": 1e-4 * var, "ok": mse < 1e-4 * var})
        floor = asymptotic_mse(model, constant, grid, t)
        stalled = [exact_mse(model, constant, grid, t, N) for N in (128, 256, N_final)]
        checks.append({"what": "constant windows stall at floor", "t": t, "floor": floor,
                       "mse": stalled, "ok": floor > 0 and min(stalled) >= 0.5 * floor})
    return _suite("regime_convergence", checks)


def almost_sure_proxy(model: ProcessModel, grid: SamplingGrid, seed: int, paths: int = 64,
                      ts=DECAY_TIMES[:2], Ns=DYADIC_N, p: float = 2.0) -> dict:
    """Path-wise stand-in for almost-sure convergence.

    A fixed batch of realizations is reconstructed with ``sigma(N) = N^-beta``
    in the almost-sure regime; the worst squared error over the batch must
    decay along ``Ns`` and end far below the variance.
    """
    beta = 0.5 + 1.0 / p + 0.1
    cap = math.pi / (2 * grid.w)
    batch = sample_ensemble(model, factorize(model.measure), seed, paths)
    checks = []
    for t in ts:
        var = float(np.real(covariance(model, t, t)))
        exact = evaluate(batch, t)
        worst = []
        for N in Ns:
            scheme = AveragingScheme("uniform", min(N**-beta, cap))
            worst.append(float(np.max(np.abs(exact - avg_truncated(batch, scheme, grid, t, N)) ** 2)))
        slope, _, _ = fit_power_law(Ns, worst)
        checks.append({"t": t, "paths": paths, "beta": beta, "max_sq_error": worst, "slope": slope,
                       "ok": slope <= -1.0 and worst[-1] < 1e-4 * var})
    return _suite("almost_sure_proxy", checks)


def sharpness(grid: SamplingGrid, nodes: Sequence[int] = (-3, 0, 1, 7), Ns=(1, 4, 64)) -> dict:
    model = constant_model(1.7)
    point = AveragingScheme.point()
    checks = []
    for n in nodes:
        t = float(grid.node(n))
        for N in Ns:
            e = exact_mse(model, point, grid, t, N)
            b = thm3_bound(model, point, grid, t, N)
            checks.append({"t_index": n, "N": N, "exact": e, "thm3": b, "ok": e == 0.0 and b == 0.0})
    return _suite("sharpness", checks)


def monte_carlo_agreement(grid: SamplingGrid, seed: int, trials: int, configs: int = 20,
                          nodes: Sequence[float] = (-1.0, -0.3, 0.5, 1.0)) -> dict:
    rng = _rng(seed, 3)
    checks = []
    limit = math.pi / (2 * grid.w)
    for i in range(configs):
        F = random_psd(len(nodes), int(rng.integers(0, 2**63)))
        model = ProcessModel(KernelFunction.fourier(), SpectralMeasure(nodes, F))
        family = str(rng.choice(["point", "uniform", "triangular"]))
        sigma = 0.0 if family == "point" else float(rng.uniform(0.05, 1.0)) * limit
        rule = str(rng.choice(["constant", "random"]))
        scheme = AveragingScheme(family, sigma, rule=rule, seed=i)
        t = float(rng.uniform(-3.0, 3.0))
        N = int(rng.integers(2, 65))
        exact = exact_mse(model, scheme, grid, t, N)
        mc, se = monte_carlo_mse(model, scheme, grid, t, N, trials, seed + i)
        checks.append({"family": family, "sigma": sigma, "rule": rule, "t": t, "N": N,
                       "exact": exact, "mc": mc, "se": se, "ok": abs(mc - exact) <= 3 * se})
    return _suite("monte_carlo_agreement", checks, trials=trials)


def run_all(model: ProcessModel, grid: SamplingGrid, seed: int, trials: int = 0,
            ts: Optional[Sequence[float]] = None, Ns: Sequence[int] = DYADIC_N) -> dict:
    ts = list(np.linspace(-3.0, 3.0, 25)) if ts is None else list(ts)
    suites = [
        closed_forms(),
        sinc_power_sum(seed),
        truncation_tail(seed),
        point_dominance(model, grid, ts, Ns),
        averaging_dominance(model, grid, ts, Ns),
        decay_slope(model, grid, Ns=Ns),
        regime_convergence(model, grid),
        almost_sure_proxy(model, grid, seed),
        sharpness(grid),
    ]
    if trials >= 2:
        suites.append(monte_carlo_agreement(grid, seed, trials))
    return {"seed": seed, "w": grid.w, "passed": all(s["passed"] for s in suites), "suites": suites}
