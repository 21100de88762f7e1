"""Closed-form speed limits for the single-qubit and Bell-diagonal families.

Each bound is a numerator depending only on p at the driving time and a
scalar integrand in p_t and its derivative.  The ``corrected`` variant is the
one that agrees with the generic matrix pipeline; ``printed`` keeps the
literal original expression (typos included) so validation can report how
far it strays.  Qubit families are parameterised by the initial coherence
``cl1_0`` (taken along x) and ``eta_z``; Bell-diagonal ones by their
correlation triple.

Numerators are rearranged so that the small difference between initial and
final state is formed analytically instead of by subtracting nearby numbers.
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from . import channels
from .channels import ChannelConfig
from .errors import BadStateSpec, ComplexRadicand, MixedFactorSingular
from .quadrature import ABS_TOL, cumulative_integrals
from .speedlimit import QslResult, _finish
from .states import BellDiagonal, bloch_state

VARIANTS = ("corrected", "printed")
RADICAND_TOL = 1e-12
PI2 = math.pi**2

Numerator = Callable[[float], tuple[float, float, list]]
Integrand = Callable[[np.ndarray], np.ndarray]


def qubit_state(cl1_0: float, eta_z: float) -> np.ndarray:
    if cl1_0 < 0 or cl1_0**2 + eta_z**2 > 1.0 + 1e-12:
        raise BadStateSpec(f"need cl1_0 >= 0 and cl1_0^2 + eta_z^2 <= 1, got ({cl1_0}, {eta_z})")
    return bloch_state((cl1_0, 0.0, eta_z))


def _p(cfg, t):
    return channels.decoherence_function(cfg, t)


def _dp(cfg, t):
    return channels.decoherence_derivative(cfg, t)


def _rp_value(deficit: float, pur0: float, pref: float):
    """``pref * 4 theta^2 tr rho0^2 / pi^2`` from ``1 - P``."""
    flags = []
    if deficit < -1e-15:
        flags.append("relative_purity_above_one")
    if deficit > 2:
        flags.append("relative_purity_below_minus_one")
    theta = 2.0 * math.asin(math.sqrt(min(max(0.5 * deficit, 0.0), 1.0)))
    return pref * 4.0 * theta * theta * pur0 / PI2, theta, flags


def _sqrt_radicand(x, what: str):
    x = np.asarray(x, dtype=float)
    if np.any(x < -RADICAND_TOL):
        raise ComplexRadicand(f"{what} radicand {float(np.min(x)):.3e} is negative")
    return np.sqrt(np.clip(x, 0.0, None))


def _mixed_factor(m0: float, mt, sign: float = 1.0):
    """``1 + sqrt(m0 / mt)``; identically 1 for a pure initial state."""
    mt = np.asarray(mt, dtype=float)
    if m0 <= 0.0:
        return np.ones_like(mt)
    if np.any(mt <= 0.0):
        raise MixedFactorSingular("evolved state became pure while the initial state is mixed")
    return 1.0 + sign * np.sqrt(m0 / mt)


def _sin2_super(close: float, m0: float, mt: float, dm: float) -> float:
    """``1 - superfidelity`` from ``close = tr rho0^2 - tr rho0 rho_t``,
    the mixednesses ``m = 1 - tr rho^2`` and their difference ``dm = m0 - mt``."""
    if m0 <= 0.0:
        return close + m0
    s0, st = math.sqrt(m0), math.sqrt(max(mt, 0.0))
    return close + s0 * dm / (s0 + st)


def _curve(numerator: Numerator, integrand: Integrand, cfg: ChannelConfig, taus, tol: float, panels: int) -> list[QslResult]:
    taus = np.asarray(taus, dtype=float)
    if taus.size == 0:
        return []
    if taus[0] <= 0 or np.any(np.diff(taus) <= 0):
        raise ValueError("driving times must be positive and strictly increasing")
    integrals = cumulative_integrals(integrand, np.concatenate([[0.0], taus]), tol=tol, panels=panels)[1:]
    out = []
    for tau, integral in zip(taus, integrals):
        num, angle, flags = numerator(float(_p(cfg, tau)))
        out.append(_finish(num, integral / tau, angle, float(tau), flags))
    return out


def _require(cfg: ChannelConfig, dephasing: bool) -> None:
    if cfg.dephasing != dephasing:
        want = "a dephasing (oun/rtn)" if dephasing else "the nmad"
        raise ValueError(f"this closed form needs {want} channel, got {cfg.kind}")


def _check_variant(variant: str) -> None:
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of {VARIANTS}")


# -- single qubit -----------------------------------------------------------


def dephasing_qubit_rp_curve(cl1_0, eta_z, cfg, taus, variant="corrected", tol=ABS_TOL, panels=64):
    _require(cfg, True)
    _check_variant(variant)
    qubit_state(cl1_0, eta_z)
    c2, z2 = cl1_0**2, eta_z**2
    norm = 1.0 + c2 + z2
    pur0 = 0.5 * norm

    def numerator(p):
        return _rp_value(c2 * (1.0 - p) / norm, pur0, math.sqrt(2.0))

    if variant == "corrected":
        # |pdot / p| Cl1(rho_t) with Cl1(rho_t) = |p| cl1_0
        def integrand(t):
            return np.abs(_dp(cfg, t)) * cl1_0
    else:
        def integrand(t):
            p = _p(cfg, t)
            return np.abs(_dp(cfg, t) / p**2 * np.abs(p) * cl1_0)

    return _curve(numerator, integrand, cfg, taus, tol, panels)


def nmad_qubit_rp_curve(cl1_0, eta_z, cfg, taus, variant="corrected", tol=ABS_TOL, panels=64):
    _require(cfg, False)
    _check_variant(variant)
    qubit_state(cl1_0, eta_z)
    c2, z = cl1_0**2, eta_z
    norm = 1.0 + c2 + z * z
    pur0 = 0.5 * norm

    if variant == "corrected":
        def numerator(p):
            return _rp_value((c2 * (1.0 - p) - z * (1.0 - z) * (1.0 - p * p)) / norm, pur0, math.sqrt(2.0))

        def integrand(t):
            p = _p(cfg, t)
            return np.abs(_dp(cfg, t)) * np.sqrt(c2 + 4.0 * p * p * (1.0 - z) ** 2)
    else:
        def numerator(p):
            rp = (1.0 - z + p * c2 + p * z * (1.0 + z)) / norm
            return _rp_value(1.0 - rp, pur0, math.sqrt(2.0))

        const = math.sqrt(c2 + 4.0 * (1.0 + z * z))

        def integrand(t):
            return np.abs(_dp(cfg, t) / _p(cfg, t) * const)

    return _curve(numerator, integrand, cfg, taus, tol, panels)


def dephasing_qubit_bures_curve(cl1_0, eta_z, cfg, taus, variant="corrected", tol=ABS_TOL, panels=64):
    _require(cfg, True)
    _check_variant(variant)
    qubit_state(cl1_0, eta_z)
    c2, z2 = cl1_0**2, eta_z**2
    l1sq = max(1.0 - c2 - z2, 0.0)
    l1 = math.sqrt(l1sq)

    def l2(p):
        return np.sqrt(np.clip(1.0 - p * p * c2 - z2, 0.0, None))

    if variant == "corrected":
        def numerator(p):
            # 1 - p c^2 - z^2 - l1 l2 = c^2 (1-p) + l1 (l1 - l2), and 2 sin^2 B equals it
            l2t = float(l2(p))
            num = c2 * (1.0 - p) - (l1 * c2 * (1.0 - p * p) / (l1 + l2t) if l1 > 0 else 0.0)
            num = max(num, 0.0)
            return num, math.asin(math.sqrt(min(0.5 * num, 1.0))), []
    else:
        def numerator(p):
            num = 1.0 - p * (c2 - z2 - l1 * float(l2(p)))
            return num, math.asin(math.sqrt(min(max(0.5 * num, 0.0), 1.0))), []

    def integrand(t):
        p = _p(cfg, t)
        return np.abs(_dp(cfg, t)) * cl1_0 * _mixed_factor(l1sq, l2(p) ** 2)

    return _curve(numerator, integrand, cfg, taus, tol, panels)


def nmad_qubit_bures_curve(cl1_0, eta_z, cfg, taus, variant="corrected", tol=ABS_TOL, panels=64):
    _require(cfg, False)
    _check_variant(variant)
    qubit_state(cl1_0, eta_z)
    c2, z = cl1_0**2, eta_z
    l1sq = max(1.0 - c2 - z * z, 0.0)
    h1 = math.sqrt(l1sq)

    if variant == "corrected":
        def h2sq(p):
            s = p * p
            return s * (2.0 * (1.0 - z) - (1.0 - z) ** 2 * s) - s * c2

        def numerator(p):
            s = p * p
            hs = float(_sqrt_radicand(h2sq(p), "h2"))
            # twice (tr rho0^2 - tr rho0 rho_t), then h1 (h1 - h2)
            close = c2 * (1.0 - p) - z * (1.0 - z) * (1.0 - s)
            far = h1 * (l1sq - hs * hs) / (h1 + hs) if h1 > 0 else 0.0
            num = max(close + far, 0.0)
            return num, math.asin(math.sqrt(min(0.5 * num, 1.0))), []

        def integrand(t):
            p = _p(cfg, t)
            speed = np.abs(_dp(cfg, t)) * np.sqrt(c2 + 4.0 * p * p * (1.0 - z) ** 2)
            return speed * _mixed_factor(l1sq, _sqrt_radicand(h2sq(p), "h2") ** 2)
    else:
        def h2sq(p):
            s = p * p
            return s * (2.0 + 2.0 * z * z - s * (1.0 + z) ** 2) - s * c2

        def numerator(p):
            hs = float(_sqrt_radicand(h2sq(p), "h2"))
            num = 1.0 + z - p * (c2 + p * z * (1.0 + z)) - h1 * hs
            return num, math.asin(math.sqrt(min(max(0.5 * num, 0.0), 1.0))), []

        def integrand(t):
            p = _p(cfg, t)
            speed = np.abs(_dp(cfg, t)) * np.sqrt(c2 + 4.0 * p * p * (1.0 + z) ** 2)
            return speed * _mixed_factor(l1sq, _sqrt_radicand(h2sq(p), "h2") ** 2)

    return _curve(numerator, integrand, cfg, taus, tol, panels)


# -- Bell-diagonal two-qubit states -----------------------------------------


def _triple(k) -> BellDiagonal:
    if isinstance(k, BellDiagonal):
        return k
    return BellDiagonal(*(float(x) for x in k))


def _process(cfg: ChannelConfig, process: str | None) -> bool:
    """True for dephasing; checks an explicit ``process`` against the channel."""
    if process is None:
        return cfg.dephasing
    key = process.lower()
    if key not in ("dephasing", "nmad"):
        raise ValueError(f"process must be 'dephasing' or 'nmad', got {process!r}")
    _require(cfg, key == "dephasing")
    return key == "dephasing"


def belldiag_rp_curve(k, cfg, taus, process=None, variant="corrected", tol=ABS_TOL, panels=64):
    _check_variant(variant)
    k = _triple(k)
    dephasing = _process(cfg, process)
    big_k = k.k1**2 + k.k2**2
    k3 = k.k3
    norm = 1.0 + k.sum_sq
    pur0 = 0.25 * norm

    if dephasing:
        def numerator(p):
            return _rp_value(big_k * (1.0 - p * p) / norm, pur0, 1.0)

        if variant == "corrected":
            def integrand(t):
                return np.abs(_p(cfg, t) * _dp(cfg, t)) * math.sqrt(big_k)
        else:
            def integrand(t):
                return _p(cfg, t) * _dp(cfg, t) * math.sqrt(big_k)
    else:
        def numerator(p):
            s = p * p
            close = (1.0 - s) * (big_k + k3 * k3 * (1.0 + s) - k3 * (1.0 - s))
            return _rp_value(close / norm, pur0, 1.0)

        if variant == "corrected":
            def integrand(t):
                p = _p(cfg, t)
                u = (1.0 + k3) * p * p
                return np.abs(p * _dp(cfg, t)) * np.sqrt(big_k + 6.0 - 8.0 * u + 4.0 * u * u)
        else:
            const = math.sqrt(2.0 + big_k + 4.0 * k3 * k3)

            def integrand(t):
                return _dp(cfg, t) / _p(cfg, t) * const

    return _curve(numerator, integrand, cfg, taus, tol, panels)


def _nmad_mixedness(k: BellDiagonal, s):
    """``1 - tr rho_t^2`` for a Bell-diagonal input under local damping."""
    big_k = k.k1**2 + k.k2**2
    w = 1.0 + k.k3
    return 0.25 * s * (8.0 - (8.0 + big_k + 2.0 * k.k3) * s + 4.0 * w * s * s - w * w * s**3)


def _zetas(k: BellDiagonal, p, dp):
    """The four squared eigenvalues of the generator on the evolved state."""
    u = (1.0 + k.k3) * p * p
    pre = 0.25 * dp * dp * p * p
    r = math.sqrt((k.k1 - k.k2) ** 2 + 4.0)
    mid = 4.0 * u * (u - 2.0) + (k.k1 - k.k2) ** 2 + 8.0
    return (
        pre * (-2.0 * u + k.k1 + k.k2 + 2.0) ** 2,
        pre * (2.0 * u + k.k1 + k.k2 - 2.0) ** 2,
        pre * (mid - 4.0 * r * (u - 1.0)),
        pre * (mid + 4.0 * r * (u - 1.0)),
    )


def belldiag_bures_curve(k, cfg, taus, process=None, variant="corrected", q=1.0, tol=ABS_TOL, panels=64):
    """Bures-angle bound with the operator norm.  ``q`` is the stray factor on
    the square root of the printed damping numerator; it only enters the
    printed variant."""
    _check_variant(variant)
    k = _triple(k)
    dephasing = _process(cfg, process)
    big_k = k.k1**2 + k.k2**2
    k3 = k.k3
    m0 = max(0.25 * (3.0 - k.sum_sq), 0.0)
    sign = 1.0 if variant == "corrected" else -1.0

    if dephasing:
        spread = max(abs(k.k1 - k.k2), abs(k.k1 + k.k2))

        def numerator(p):
            s = p * p
            if variant == "corrected":
                mt = 0.25 * (3.0 - k3 * k3 - big_k * s * s)
                sin2 = _sin2_super(0.25 * big_k * (1.0 - s), m0, mt, 0.25 * big_k * (s * s - 1.0))
            else:
                rad = (3.0 - k.sum_sq) * (3.0 - k3 * k3 - big_k * s * s)
                sin2 = 0.25 * (3.0 - k3 * k3 - big_k * s - float(_sqrt_radicand(rad, "numerator")))
            sin2 = min(max(sin2, 0.0), 1.0)
            return sin2, math.asin(math.sqrt(sin2)), []

        def integrand(t):
            p = _p(cfg, t)
            dp = _dp(cfg, t)
            mt = 0.25 * (3.0 - k3 * k3 - big_k * p**4)
            if variant == "corrected":
                speed = 0.5 * np.abs(p * dp) * spread
            else:
                speed = np.maximum(0.25 * dp * (k.k1 - k.k2) * p**3, 0.25 * dp * (k.k1 + k.k2) * p**3)
            return speed * _mixed_factor(m0, mt, sign)
    else:
        def numerator(p):
            s = p * p
            mt = float(_nmad_mixedness(k, s))
            if variant == "corrected":
                close = 0.25 * (1.0 - s) * (big_k + k3 * k3 * (1.0 + s) - k3 * (1.0 - s))
                sin2 = _sin2_super(close, m0, mt, m0 - mt)
            else:
                root = float(_sqrt_radicand((3.0 - k.sum_sq) * 4.0 * mt, "numerator"))
                sin2 = 0.25 * (2 * k3 - big_k) * s - 0.25 * (k3 + k3 * k3) * s * s + 0.25 * (3.0 - k3 - q * root)
            sin2 = min(max(sin2, 0.0), 1.0)
            return sin2, math.asin(math.sqrt(sin2)), []

        def integrand(t):
            p = _p(cfg, t)
            dp = _dp(cfg, t)
            zmax = np.max(np.stack(_zetas(k, p, dp)), axis=0)
            speed = _sqrt_radicand(zmax, "zeta")
            return speed * _mixed_factor(m0, _nmad_mixedness(k, p * p), sign)

    return _curve(numerator, integrand, cfg, taus, tol, panels)


# -- single driving time wrappers -------------------------------------------


def qsl_dephasing_qubit_rp(cl1_0, eta_z, cfg, tau, variant="corrected") -> QslResult:
    return dephasing_qubit_rp_curve(cl1_0, eta_z, cfg, [tau], variant)[0]


def qsl_nmad_qubit_rp(cl1_0, eta_z, cfg, tau, variant="corrected") -> QslResult:
    return nmad_qubit_rp_curve(cl1_0, eta_z, cfg, [tau], variant)[0]


def qsl_dephasing_qubit_bures(cl1_0, eta_z, cfg, tau, variant="corrected") -> QslResult:
    return dephasing_qubit_bures_curve(cl1_0, eta_z, cfg, [tau], variant)[0]


def qsl_nmad_qubit_bures(cl1_0, eta_z, cfg, tau, variant="corrected") -> QslResult:
    return nmad_qubit_bures_curve(cl1_0, eta_z, cfg, [tau], variant)[0]


def qsl_belldiag_rp(k, cfg, tau, process=None, variant="corrected") -> QslResult:
    return belldiag_rp_curve(k, cfg, [tau], process, variant)[0]


def qsl_belldiag_bures(k, cfg, tau, process=None, variant="corrected") -> QslResult:
    return belldiag_bures_curve(k, cfg, [tau], process, variant)[0]


# -- coherence-mixedness complementarity ------------------------------------

MCL_FAMILIES = ("qubit-dephasing", "qubit-nmad", "belldiag-dephasing", "belldiag-nmad")


def mcl_closed_form(family: str, params, cfg: ChannelConfig, t):
    """M_Cl of the evolved state from its closed form.

    ``params`` is ``(cl1_0, eta_z)`` for qubit families and ``(k1, k2, k3)``
    for Bell-diagonal ones.  With index 0 as the damping attractor the qubit
    damping law reads ``p^2 (1 - eta_z) (2 - p^2 (1 - eta_z))``.
    """
    fam = family.lower()
    if fam not in MCL_FAMILIES:
        raise ValueError(f"family must be one of {MCL_FAMILIES}")
    _require(cfg, fam.endswith("dephasing"))
    p = np.asarray(_p(cfg, t), dtype=float)
    s = p * p
    if fam == "qubit-dephasing":
        val = np.full_like(p, 1.0 - params[1] ** 2)
    elif fam == "qubit-nmad":
        w = 1.0 - params[1]
        val = s * w * (2.0 - s * w)
    else:
        k1, k2, k3 = (float(x) for x in params)
        big_k = k1 * k1 + k2 * k2
        diff = abs(k1 * k1 - k2 * k2)
        s2 = s * s
        if fam == "belldiag-dephasing":
            val = (-5.0 * big_k * s2 + s2 * diff - 6.0 * k3 * k3 + 18.0) / 18.0
        else:
            w = 1.0 + k3
            val = (-6.0 * w * w * s2 * s2 + 24.0 * w * s2 * s + (-5.0 * big_k - 12.0 * (k3 + 4.0) + diff) * s2 + 48.0 * s) / 18.0
    return float(val) if np.ndim(val) == 0 else val


# -- registry used by validation --------------------------------------------

CLOSED_FORMS = {
    "dephasing_qubit_rp": dephasing_qubit_rp_curve,
    "nmad_qubit_rp": nmad_qubit_rp_curve,
    "dephasing_qubit_bures": dephasing_qubit_bures_curve,
    "nmad_qubit_bures": nmad_qubit_bures_curve,
    "belldiag_rp": belldiag_rp_curve,
    "belldiag_bures": belldiag_bures_curve,
}
