import math

import numpy as np
import pytest

from avgsample.errors import QuadratureError
from avgsample.quadrature import adaptive_gauss_legendre


@pytest.mark.parametrize("func, a, b, exact", [
    (np.exp, 0.0, 1.0, math.e - 1),
    (lambda x: x**7, -1.0, 2.0, (2**8 - 1) / 8),
    (lambda x: np.exp(3j * x), 0.0, math.pi, (np.exp(3j * math.pi) - 1) / 3j),
    (lambda x: np.sqrt(x), 0.0, 1.0, 2 / 3),
])
def test_integrates_to_tolerance(func, a, b, exact):
    assert adaptive_gauss_legendre(func, a, b) == pytest.approx(exact, rel=1e-10)


def test_empty_interval():
    assert adaptive_gauss_legendre(np.exp, 1.0, 1.0) == 0


def test_non_convergence_is_reported():
    with pytest.raises(QuadratureError):
        adaptive_gauss_legendre(lambda x: np.sin(1.0 / np.maximum(x, 1e-300)), 0.0, 1.0, max_depth=6)
