"""Generic numerical quantum speed limit pipeline.

Works for any initial density matrix of up to four qubits under any of the
configured channels: the state is propagated with local Kraus maps, the
generator is applied to the evolved state, its norm is time-averaged by
adaptive quadrature, and the distance between the initial and final state is
measured by relative purity or by the Bures angle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import channels
from .channels import ChannelConfig
from .errors import DegenerateDenominator, MixedFactorSingular
from .hermitian import bures_fidelity, norms, overlap, purity
from .quadrature import ABS_TOL, cumulative_integrals
from .states import l1_coherence, linear_entropy, m_cl

METHODS = ("rp", "bures")
NORMS = ("op", "hs", "tr")
FIDELITIES = ("super", "bures")
DEGENERATE = 1e-14
PURE_TOL = 1e-12


@dataclass(frozen=True)
class QslRequest:
    """What to compute.

    ``norm``, ``use_mixed_factor`` and ``fidelity`` only affect the Bures
    method.  ``grid_points`` is the number of initial Simpson panels laid over
    the integration range before adaptive refinement.
    """

    method: str = "bures"
    norm: str = "op"
    tau: float = 1.0
    grid_points: int = 64
    use_mixed_factor: bool = True
    fidelity: str = "super"
    tol: float = ABS_TOL

    def __post_init__(self):
        object.__setattr__(self, "method", _canonical_method(self.method))
        object.__setattr__(self, "norm", self.norm.lower())
        object.__setattr__(self, "fidelity", self.fidelity.lower())
        if self.norm not in NORMS:
            raise ValueError(f"norm must be one of {NORMS}")
        if self.fidelity not in FIDELITIES:
            raise ValueError(f"fidelity must be one of {FIDELITIES}")
        if not self.tau > 0:
            raise ValueError("driving time tau must be positive")
        if self.grid_points < 16:
            raise ValueError("grid_points must be at least 16")


def _canonical_method(m: str) -> str:
    key = m.lower().replace("-", "_")
    if key in ("rp", "relative_purity", "purity"):
        return "rp"
    if key in ("bures", "bures_angle", "fidelity"):
        return "bures"
    raise ValueError(f"unknown method {m!r}")


@dataclass(frozen=True)
class QslResult:
    tau_qsl: float
    angle: float
    averaged_norm: float
    numerator: float
    tau: float
    flags: tuple[str, ...] = field(default=())


@dataclass(frozen=True)
class TrajectoryPoint:
    """One sample of a speed-limit curve together with the state measures.

    ``t`` is the driving time for :func:`trajectory` and the dimensionless
    product kappa*tau for :func:`kappa_tau_sweep`.
    """

    t: float
    tau_qsl: float
    cl1: float
    s_l: float
    m_cl: float


def _is_pure(rho0) -> bool:
    return 1.0 - purity(rho0) <= PURE_TOL


def speed_integrand(rho0, cfg: ChannelConfig, req: QslRequest):
    """The time-dependent integrand whose average forms the bound's denominator."""
    rho0 = np.asarray(rho0, dtype=complex)
    mixed0 = 1.0 - purity(rho0)
    with_factor = req.method == "bures" and req.use_mixed_factor and mixed0 > PURE_TOL

    def f(times):
        rhos = channels.evolve_many(rho0, cfg, times)
        gen = channels.generator_many(rhos, cfg, times)
        nv = norms(gen)
        if req.method == "rp":
            return np.asarray(nv.hs)
        val = np.asarray(getattr(nv, req.norm))
        if with_factor:
            mixed_t = 1.0 - purity(rhos)
            if np.any(mixed_t <= PURE_TOL):
                i = int(np.argmin(mixed_t))
                raise MixedFactorSingular(f"evolved state is pure at t={float(np.atleast_1d(times)[i])!r}")
            val = val * (1.0 + np.sqrt(mixed0 / mixed_t))
        return val

    return f


def _rp_numerator(rho0, rhot):
    flags = []
    pur0 = purity(rho0)
    deficit = overlap(rho0, rho0 - rhot) / pur0  # 1 - P, without cancellation
    if deficit < 0:
        flags.append("relative_purity_above_one")
    if deficit > 2:
        flags.append("relative_purity_below_minus_one")
    theta = 2.0 * math.asin(math.sqrt(min(max(0.5 * deficit, 0.0), 1.0)))
    return 4.0 * theta * theta * pur0 / math.pi**2, theta, flags


def superfidelity_deficit(rho0, rhot) -> float:
    """``1 - superfidelity``, arranged to avoid cancellation for nearby states."""
    m0 = 1.0 - purity(rho0)
    mt = 1.0 - purity(rhot)
    first = overlap(rho0, rho0 - rhot)
    if m0 <= 0.0 or mt <= 0.0:
        return first + m0
    s0, st = math.sqrt(m0), math.sqrt(mt)
    # (1 - tr rho0^2) - sqrt(m0 mt) = s0 (m0 - mt) / (s0 + st)
    dpur = overlap(rhot - rho0, rhot + rho0)
    return first + s0 * dpur / (s0 + st)


def _bures_numerator(rho0, rhot, fidelity: str):
    if fidelity == "super":
        sin2 = superfidelity_deficit(rho0, rhot)
    else:
        sin2 = 1.0 - bures_fidelity(rho0, rhot)
    sin2 = min(max(sin2, 0.0), 1.0)
    return sin2, math.asin(math.sqrt(sin2)), []


def _numerator(rho0, rhot, req: QslRequest):
    if req.method == "rp":
        return _rp_numerator(rho0, rhot)
    return _bures_numerator(rho0, rhot, req.fidelity)


def _finish(num: float, avg: float, angle: float, tau: float, flags) -> QslResult:
    flags = tuple(flags)
    if not avg > DEGENERATE:
        if num <= DEGENERATE:
            return QslResult(0.0, angle, avg, num, tau, flags + ("stationary",))
        raise DegenerateDenominator(f"averaged generator norm {avg:.3e} vanishes at tau={tau!r} while the distance does not")
    return QslResult(num / avg, angle, avg, num, tau, flags)


def qsl_curve(rho0, cfg: ChannelConfig, req: QslRequest, taus) -> list[QslResult]:
    """Speed limit times for each driving time in ``taus`` (ascending, positive).

    ``req.tau`` is ignored here; one cumulative quadrature pass covers all
    driving times.
    """
    taus = np.asarray(taus, dtype=float)
    if taus.size == 0:
        return []
    if taus[0] <= 0 or np.any(np.diff(taus) <= 0):
        raise ValueError("driving times must be positive and strictly increasing")
    rho0 = np.asarray(rho0, dtype=complex)
    f = speed_integrand(rho0, cfg, req)
    integrals = cumulative_integrals(f, np.concatenate([[0.0], taus]), tol=req.tol, panels=req.grid_points)[1:]
    finals = channels.evolve_many(rho0, cfg, taus)
    out = []
    for tau, integral, rhot in zip(taus, integrals, finals):
        num, angle, flags = _numerator(rho0, rhot, req)
        out.append(_finish(num, integral / tau, angle, float(tau), flags))
    return out


def qsl(rho0, cfg: ChannelConfig, req: QslRequest) -> QslResult:
    return qsl_curve(rho0, cfg, req, [req.tau])[0]


def qsl_relative_purity(rho0, cfg: ChannelConfig, req: QslRequest) -> QslResult:
    if req.method != "rp":
        raise ValueError("request method must be relative purity")
    return qsl(rho0, cfg, req)


def qsl_bures(rho0, cfg: ChannelConfig, req: QslRequest) -> QslResult:
    if req.method != "bures":
        raise ValueError("request method must be bures")
    return qsl(rho0, cfg, req)


def _points(labels, results, finals) -> list[TrajectoryPoint]:
    cl1 = l1_coherence(finals)
    s_l = linear_entropy(finals)
    mc = m_cl(finals)
    return [
        TrajectoryPoint(float(x), r.tau_qsl, float(c), float(s), float(m))
        for x, r, c, s, m in zip(labels, results, np.atleast_1d(cl1), np.atleast_1d(s_l), np.atleast_1d(mc))
    ]


def trajectory(rho0, cfg: ChannelConfig, req: QslRequest, grid) -> list[TrajectoryPoint]:
    """tau_QSL and the final-state measures at each driving time in ``grid``."""
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0:
        return []
    results = qsl_curve(rho0, cfg, req, grid)
    return _points(grid, results, channels.evolve_many(rho0, cfg, grid))


def kappa_tau_sweep(rho0, cfg: ChannelConfig, req: QslRequest, kappa_taus) -> list[TrajectoryPoint]:
    """Speed limit at fixed driving time ``req.tau`` as the coupling varies.

    Each abscissa ``x`` sets the coupling to ``x / req.tau`` with the rate
    ratios of ``cfg`` held fixed.  Rescaling all rates by a factor rescales
    every time by its inverse, so the sweep is evaluated along a single
    evolution of ``cfg`` at times ``x / cfg.kappa`` and rescaled.
    """
    xs = np.asarray(kappa_taus, dtype=float)
    if xs.size == 0:
        return []
    times = xs / cfg.kappa
    results = qsl_curve(rho0, cfg, req, times)
    scaled = [
        QslResult(r.tau_qsl * req.tau / t, r.angle, r.averaged_norm * t / req.tau, r.numerator, req.tau, r.flags)
        for r, t in zip(results, times)
    ]
    return _points(xs, scaled, channels.evolve_many(rho0, cfg, times))
