import math

import numpy as np
import pytest

from qslkit.errors import QuadratureError
from qslkit.quadrature import adaptive_simpson, cumulative_integrals, segment_integrals


def test_sine_integral():
    assert adaptive_simpson(np.sin, 0.0, math.pi, tol=1e-12) == pytest.approx(2.0, abs=1e-11)


def test_reversed_and_empty_intervals():
    assert adaptive_simpson(np.cos, 1.0, 0.0) == pytest.approx(-math.sin(1.0), abs=1e-10)
    assert adaptive_simpson(np.cos, 2.0, 2.0) == 0.0


def test_cubics_are_exact():
    f = lambda x: 3 * x**3 - x + 2
    pts = np.array([0.0, 0.5, 1.0, 2.5])
    exact = [0.75 * x**4 - 0.5 * x**2 + 2 * x for x in pts]
    assert np.allclose(cumulative_integrals(f, pts), exact, atol=1e-12)


def test_peaked_integrand_refines():
    f = lambda x: 1.0 / (1e-4 + (x - 0.3) ** 2)
    exact = (math.atan(0.7 / 1e-2) + math.atan(0.3 / 1e-2)) / 1e-2
    assert adaptive_simpson(f, 0.0, 1.0, tol=1e-8) == pytest.approx(exact, rel=1e-9)


def test_segments_sum_to_whole():
    pts = np.linspace(0, 3, 7)
    assert segment_integrals(np.exp, pts).sum() == pytest.approx(math.expm1(3.0), abs=1e-9)


def test_bad_points_rejected():
    with pytest.raises(ValueError):
        segment_integrals(np.exp, [0.0])
    with pytest.raises(ValueError):
        segment_integrals(np.exp, [0.0, 1.0, 0.5])


def test_panel_budget_and_non_finite():
    with pytest.raises(QuadratureError):
        adaptive_simpson(lambda x: np.abs(x - 0.3) ** -0.9, 0.0, 1.0, tol=1e-14, max_panels=2000)
    with pytest.raises(QuadratureError):
        adaptive_simpson(lambda x: np.where(x > 0.5, np.nan, 1.0), 0.0, 1.0)
