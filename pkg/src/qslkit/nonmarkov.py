"""Non-Markovianity as deviation from temporal self-similarity.

N_L = min over constant gamma* >= 0 of (w / T) * integral_0^T |gamma(t) - gamma*| dt

where w is the trace norm of the fixed operator multiplying the rate
difference.  The integral is evaluated piecewise between the crossings
gamma(t) = gamma*, using the closed-form antiderivative of the rate, so no
quadrature error enters.  Zeros of p_t are poles of gamma; a small
neighbourhood around each is excluded and reported.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from . import channels
from .channels import ChannelConfig
from .hermitian import norms
from .states import bell_state

POLE_HALF_WIDTH = 5e-7  # excluded neighbourhoods are 1e-6 wide
SAMPLES_PER_UNIT = 2000
GAMMA_TOL = 1e-10
ROOT_XTOL = 1e-12

RateFn = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class NonMarkovReport:
    n_l: float
    gamma_star: float
    negative_intervals: list[tuple[float, float]]
    weight: float = 1.0
    horizon: float = 0.0
    excluded: list[tuple[float, float]] = field(default_factory=list)


def dephasing_weight() -> float:
    """Trace norm of |phi+><phi+| - |phi-><phi-|."""
    return float(norms(bell_state("phi+") - bell_state("phi-")).tr)


NMAD_WEIGHT = 1.0 + math.sqrt(2.0)


def channel_weight(cfg: ChannelConfig) -> float:
    return dephasing_weight() if cfg.dephasing else NMAD_WEIGHT


def _segments(horizon: float, poles) -> tuple[list[tuple[float, float]], list[tuple[float, float]]]:
    """Pole-free pieces of (0, horizon] and the excluded neighbourhoods."""
    pieces, excluded = [], []
    lo = 0.0
    for z in poles:
        a, b = z - POLE_HALF_WIDTH, min(z + POLE_HALF_WIDTH, horizon)
        excluded.append((max(a, 0.0), b))
        if a > lo:
            pieces.append((lo, a))
        lo = b
    if horizon > lo:
        pieces.append((lo, horizon))
    return pieces, excluded


def _roots(g, a: float, b: float, samples_per_unit: int) -> list[float]:
    n = max(64, int(samples_per_unit * (b - a)) + 1)
    ts = np.linspace(a, b, n + 1)
    vals = g(ts)
    out = []
    for i in np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0]:
        out.append(brentq(lambda s: float(g(np.array([s]))[0]), ts[i], ts[i + 1], xtol=ROOT_XTOL))
    return out


class _RateProblem:
    """Rate, its antiderivative and the pole-free pieces of the horizon."""

    def __init__(self, rate: RateFn, horizon: float, antiderivative: RateFn | None = None, poles=(), samples_per_unit=SAMPLES_PER_UNIT):
        if not horizon > 0:
            raise ValueError("horizon must be positive")
        self.rate = rate
        self.horizon = float(horizon)
        self.anti = antiderivative
        self.samples = samples_per_unit
        self.pieces, self.excluded = _segments(self.horizon, sorted(poles))

    def _integral(self, a: float, b: float) -> float:
        if self.anti is not None:
            return float(self.anti(np.array([b]))[0] - self.anti(np.array([a]))[0])
        from .quadrature import adaptive_simpson

        return adaptive_simpson(self.rate, a, b, tol=1e-12)

    def abs_deviation(self, gstar: float) -> float:
        """integral over the pieces of |gamma - gstar|."""
        total = 0.0
        for a, b in self.pieces:
            cuts = [a] + _roots(lambda t: self.rate(t) - gstar, a, b, self.samples) + [b]
            for lo, hi in zip(cuts[:-1], cuts[1:]):
                total += abs(self._integral(lo, hi) - gstar * (hi - lo))
        return total

    def rate_range(self) -> tuple[float, float]:
        vals = np.concatenate([self.rate(np.linspace(a, b, max(64, int(self.samples * (b - a)) + 1))) for a, b in self.pieces])
        vals = vals[np.isfinite(vals)]
        return float(np.min(vals)), float(np.max(vals))

    def negative_intervals(self) -> list[tuple[float, float]]:
        out = []
        for a, b in self.pieces:
            cuts = [a] + _roots(self.rate, a, b, self.samples) + [b]
            for lo, hi in zip(cuts[:-1], cuts[1:]):
                if float(self.rate(np.array([0.5 * (lo + hi)]))[0]) < 0:
                    out.append((lo, hi))
        # a pole bounds a negative stretch: report the pole itself as its edge
        snapped = []
        for lo, hi in out:
            for ea, eb in self.excluded:
                if abs(lo - eb) < 1e-15:
                    lo = 0.5 * (ea + eb)
                if abs(hi - ea) < 1e-15:
                    hi = 0.5 * (ea + eb)
            if snapped and abs(snapped[-1][1] - lo) < 1e-12:
                snapped[-1] = (snapped[-1][0], hi)
            else:
                snapped.append((lo, hi))
        return snapped


def _minimise(problem: _RateProblem, weight: float) -> tuple[float, float]:
    lo, hi = problem.rate_range()
    lo = max(lo, 0.0)
    hi = max(hi, lo)
    span = sum(b - a for a, b in problem.pieces)
    if hi - lo <= GAMMA_TOL:
        g = 0.5 * (lo + hi)
    else:
        res = minimize_scalar(problem.abs_deviation, bounds=(lo, hi), method="bounded", options={"xatol": GAMMA_TOL})
        g = float(res.x)
        # the bounded search never evaluates the endpoints themselves
        for edge in (lo, hi):
            if problem.abs_deviation(edge) < problem.abs_deviation(g):
                g = edge
    return weight * problem.abs_deviation(g) / span, g


def nonmarkovianity_from_rate(rate: RateFn, horizon: float, weight: float = 1.0, antiderivative: RateFn | None = None, poles=()) -> NonMarkovReport:
    """N_L for an arbitrary vectorised rate function."""
    problem = _RateProblem(rate, horizon, antiderivative, poles)
    n_l, g = _minimise(problem, weight)
    return NonMarkovReport(n_l, g, problem.negative_intervals(), weight, problem.horizon, problem.excluded)


def _channel_problem(cfg: ChannelConfig, horizon: float, samples_per_unit: int = SAMPLES_PER_UNIT) -> _RateProblem:
    poles = channels.p_zeros(cfg, horizon)
    return _RateProblem(
        lambda t: np.atleast_1d(channels.rate_unchecked(cfg, t)),
        horizon,
        lambda t: np.atleast_1d(channels.integrated_rate(cfg, t)),
        poles,
        samples_per_unit,
    )


def nonmarkovianity(cfg: ChannelConfig, horizon: float, samples_per_unit: int = SAMPLES_PER_UNIT) -> NonMarkovReport:
    """N_L, the optimal constant rate and the negative-rate intervals up to ``horizon``."""
    samples = max(samples_per_unit, int(samples_per_unit * cfg.kappa))
    problem = _channel_problem(cfg, horizon, samples)
    weight = channel_weight(cfg)
    n_l, g = _minimise(problem, weight)
    return NonMarkovReport(n_l, g, problem.negative_intervals(), weight, problem.horizon, problem.excluded)


def gamma_negative_intervals(cfg: ChannelConfig, horizon: float) -> list[tuple[float, float]]:
    """Sorted, disjoint intervals of (0, horizon] on which gamma(t) < 0."""
    return _channel_problem(cfg, horizon).negative_intervals()
