import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from avgsample import (AveragingScheme, HoelderPair, KernelFunction, ProcessModel, Regime,
                       SamplingGrid, SpectralMeasure, ValidationError, bandwidth_regime,
                       bound_report, constant_model, exact_gap_mse, exact_mse, find_n0,
                       lemma1_bound, regime_check, remark3_bound, thm2_bound, thm3_bound)
from avgsample.spectral import random_psd

GRID = SamplingGrid(2.0)
PI_GRID = SamplingGrid(math.pi)
P2 = HoelderPair(2.0)


def single(lam, mass):
    return ProcessModel(KernelFunction.fourier(), SpectralMeasure([lam], [[mass]]))


def test_thm2_examples(ref_model):
    for m in (-1, 0, 4):
        t = float(GRID.node(m))
        assert thm2_bound(ref_model, GRID, t, 8) == 0.0
        assert exact_mse(ref_model, AveragingScheme.point(), GRID, t, 8) == 0.0
    # |sin(2 t)| = 1, gamma = 1, ||F|| = 1; value from 30-digit mpmath evaluation
    assert thm2_bound(single(1.0, 1.0), GRID, math.pi / 4, 10) == pytest.approx(0.0708354293299324055, rel=1e-13)
    scaled = ProcessModel(ref_model.kernel, SpectralMeasure(ref_model.nodes, 3.5 * ref_model.measure.F))
    assert thm2_bound(scaled, GRID, 0.4, 16) == pytest.approx(3.5 * thm2_bound(ref_model, GRID, 0.4, 16), rel=1e-14)
    with pytest.raises(ValidationError):
        thm2_bound(ref_model, SamplingGrid(1.0), 0.4, 16)


def test_lemma1_examples(ref_model):
    assert lemma1_bound(ref_model, AveragingScheme.point(), GRID, 0.3, 16) == 0.0
    scheme = AveragingScheme("uniform", 0.2)
    at_node = lemma1_bound(ref_model, scheme, GRID, float(GRID.node(2)), 7, HoelderPair(3.0))
    from avgsample import b2_sup
    assert at_node == pytest.approx(0.04 * b2_sup(ref_model) * 15 ** (2 / 3), rel=1e-14)
    model = single(2.0, 0.5)  # sup|B''| majorant = 4 * 0.5 = 2
    assert lemma1_bound(model, AveragingScheme("uniform", 0.1), PI_GRID, 0.5, 4, P2) == pytest.approx(0.36, rel=1e-12)


def test_thm3_examples(ref_model):
    point = AveragingScheme.point()
    assert thm3_bound(ref_model, point, GRID, 0.7, 12) == 2 * thm2_bound(ref_model, GRID, 0.7, 12)
    assert thm3_bound(ref_model, point, GRID, float(GRID.node(3)), 12) == 0.0
    assert 2 * 0.0708354293299324055 + 2 * 0.36 == pytest.approx(0.861670858659864784, rel=1e-15)


def test_remark3_examples(ref_model):
    model = single(2.0, 0.5)
    assert remark3_bound(model, PI_GRID, 0.5, 4, P2) == pytest.approx(9.0, rel=1e-12)
    values = [remark3_bound(ref_model, SamplingGrid(w), 0.0, 10) * w**2 for w in (2.0, 8.0, 64.0)]
    np.testing.assert_allclose(values, values[0], rtol=1e-13)


schemes = st.builds(
    AveragingScheme, st.sampled_from(["uniform", "triangular"]), st.floats(1e-3, math.pi / 4),
    st.sampled_from(["constant", "random"]), st.integers(0, 50))


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10**6), schemes, st.floats(-8, 8), st.sampled_from([8, 16, 64, 256]),
       st.sampled_from([1.5, 2.0, 3.0]))
def test_bounds_dominate_exact_errors(seed, scheme, t, N, p):
    rng = np.random.default_rng(seed)
    nodes = np.sort(rng.uniform(-1.5, 1.5, 4))
    model = ProcessModel(KernelFunction.fourier(), SpectralMeasure(nodes, random_psd(4, seed)))
    pair = HoelderPair(p)
    r = bound_report(model, scheme, GRID, t, N, pair)
    assert r.exact_point <= r.thm2
    assert r.exact_gap <= r.lemma1
    assert r.exact <= r.thm3
    assert r.lemma1 <= r.remark3
    assert r.thm3 == 2 * r.thm2 + 2 * r.lemma1
    assert min(r.thm2, r.lemma1, r.thm3, r.remark3) >= 0


def test_bounds_vanish_at_nodes_without_averaging(ref_model):
    point = AveragingScheme.point()
    t = float(GRID.node(-6))
    r = bound_report(ref_model, point, GRID, t, 32)
    assert (r.thm2, r.lemma1, r.thm3, r.exact) == (0.0, 0.0, 0.0, 0.0)


def test_sharpness_witness():
    model = constant_model(0.8)
    point = AveragingScheme.point()
    for m in (-2, 0, 5):
        t = float(GRID.node(m))
        assert exact_mse(model, point, GRID, t, 3) == 0.0
        assert thm3_bound(model, point, GRID, t, 3) == 0.0
        # the averaged gap of a time-constant process vanishes too
        assert exact_gap_mse(model, AveragingScheme("uniform", 0.5), GRID, t, 3) == pytest.approx(0, abs=1e-30)


@pytest.mark.parametrize("rule, p, expected", [
    (lambda N: N**-1.0, 2.0, Regime.MEAN_SQUARE),
    (lambda N: N**-2.0, 2.0, Regime.ALMOST_SURE),
    (lambda N: 0.1, 2.0, Regime.NONE),
    (lambda N: 3.0 * N**-0.6, 2.0, Regime.MEAN_SQUARE),
    (lambda N: N**-0.5, 2.0, Regime.NONE),
    (lambda N: N**-0.9, 3.0, Regime.ALMOST_SURE),
    (lambda N: N**-0.8, 3.0, Regime.MEAN_SQUARE),
])
def test_regime_check(rule, p, expected):
    assert regime_check(rule, HoelderPair(p)) is expected


def test_regime_check_edge_cases():
    assert regime_check(lambda N: 1.0 if N < 1000 else 1e-8) is Regime.INCONCLUSIVE
    with pytest.raises(ValidationError):
        regime_check(lambda N: 0.0)
    assert bandwidth_regime(lambda N: N**0.6) is Regime.MEAN_SQUARE
    assert bandwidth_regime(lambda N: N**1.2) is Regime.ALMOST_SURE
    assert bandwidth_regime(lambda N: 5.0) is Regime.NONE


def test_find_n0():
    Ns = [8, 16, 32, 64]
    assert find_n0(Ns, [True] * 4) == 8
    assert find_n0(Ns, [False, True, False, True]) == 64
    assert find_n0(Ns, [True, True, True, False]) is None
    assert find_n0(Ns[::-1], [True, True, False, False]) == 32


def test_bound_report_ratios(ref_model):
    r = bound_report(ref_model, AveragingScheme("uniform", 0.1), GRID, 0.3, 16, P2, mc=(1.0, 0.1))
    assert r.ratios["exact/thm3"] == pytest.approx(r.exact / r.thm3)
    assert (r.mc, r.mc_se) == (1.0, 0.1)
    at_node = bound_report(ref_model, AveragingScheme.point(), GRID, 0.0, 16)
    assert at_node.ratios["exact/thm3"] is None
