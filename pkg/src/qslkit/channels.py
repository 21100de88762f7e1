"""The three analytic non-Markovian qubit channels.

Two dephasing (unital) channels, Ornstein-Uhlenbeck noise (OUN) and random
telegraph noise (RTN), and one dissipative (non-unital) channel, the damped
Jaynes-Cummings amplitude damping (NMAD).  Each is described by a
decoherence function p_t with p_0 = 1 and a time-local rate gamma(t):

    dephasing:  gamma = -pdot / (2 p),   coherences scale with p
    NMAD:       gamma = -2 pdot / p,     coherences scale with p,
                                         excited population with p**2

All time arguments may be scalars or numpy arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import RatePole, TooManyQubits
from .states import I2, SZ, bloch_state, n_qubits

KINDS = ("oun", "rtn", "nmad")
POLE_TOL = 1e-12
MAX_QUBITS = 4

SIGMA_MINUS = np.array([[0, 1], [0, 0]], dtype=complex)  # |0><1|, decays index 1 -> 0


@dataclass(frozen=True)
class ChannelConfig:
    """Channel kind plus its rates (all in the same inverse-time unit).

    ``lam`` is the reservoir correlation rate (OUN) or spectral width (NMAD);
    ``c`` is the RTN coupling, also written ``a``.
    """

    kind: str
    kappa: float
    lam: float | None = None
    c: float | None = None

    def __post_init__(self):
        kind = self.kind.lower()
        object.__setattr__(self, "kind", kind)
        if kind not in KINDS:
            raise ValueError(f"unknown channel kind {self.kind!r}; expected one of {KINDS}")
        if not self.kappa > 0:
            raise ValueError("kappa must be positive")
        if kind in ("oun", "nmad") and not (self.lam is not None and self.lam > 0):
            raise ValueError(f"{kind} needs a positive lambda")
        if kind == "rtn" and not (self.c is not None and self.c > 0):
            raise ValueError("rtn needs a positive coupling c")

    @classmethod
    def oun(cls, kappa: float = 1.0, lam: float = 0.1) -> "ChannelConfig":
        return cls("oun", kappa, lam=lam)

    @classmethod
    def rtn(cls, kappa: float = 1.0, c: float = 0.6) -> "ChannelConfig":
        return cls("rtn", kappa, c=c)

    @classmethod
    def nmad(cls, kappa: float = 1.0, lam: float = 0.1) -> "ChannelConfig":
        return cls("nmad", kappa, lam=lam)

    @property
    def dephasing(self) -> bool:
        return self.kind != "nmad"

    @property
    def d_squared(self) -> float:
        """Squared NMAD frequency parameter; negative means oscillatory."""
        return self.lam**2 - 2.0 * self.kappa * self.lam

    def scaled(self, kappa: float) -> "ChannelConfig":
        """Same rate ratios, new coupling strength."""
        f = kappa / self.kappa
        return replace(
            self,
            kappa=kappa,
            lam=None if self.lam is None else self.lam * f,
            c=None if self.c is None else self.c * f,
        )

    def label(self) -> str:
        if self.kind == "rtn":
            return f"rtn(kappa={self.kappa:g}, c={self.c:g})"
        return f"{self.kind}(kappa={self.kappa:g}, lambda={self.lam:g})"


@dataclass(frozen=True)
class EvolvedState:
    rho_t: np.ndarray
    p_t: float
    t: float


def _ch_sh(d2: float, x):
    """``cosh(sqrt(d2) x)`` and ``sinh(sqrt(d2) x)/sqrt(d2)`` for either sign of d2."""
    x = np.asarray(x, dtype=float)
    if d2 > 0:
        r = math.sqrt(d2)
        return np.cosh(r * x), np.sinh(r * x) / r
    if d2 < 0:
        r = math.sqrt(-d2)
        return np.cos(r * x), np.sin(r * x) / r
    return np.ones_like(x), x.copy()


def _scalar(v):
    return float(v) if np.ndim(v) == 0 else v


def decoherence_function(cfg: ChannelConfig, t):
    """p_t for the configured channel."""
    t = np.asarray(t, dtype=float)
    if cfg.kind == "oun":
        p = np.exp(-0.5 * cfg.kappa * (t + np.expm1(-cfg.lam * t) / cfg.lam))
    elif cfg.kind == "rtn":
        x = cfg.kappa * t
        ch, sh = _ch_sh(1.0 - (2.0 * cfg.c / cfg.kappa) ** 2, x)
        p = np.exp(-x) * (ch + sh)
    else:
        y = 0.5 * t
        ch, sh = _ch_sh(cfg.d_squared, y)
        p = np.exp(-cfg.lam * y) * (ch + cfg.lam * sh)
    return _scalar(p)


def decoherence_derivative(cfg: ChannelConfig, t):
    """Analytic time derivative of p_t."""
    t = np.asarray(t, dtype=float)
    if cfg.kind == "oun":
        p = np.exp(-0.5 * cfg.kappa * (t + np.expm1(-cfg.lam * t) / cfg.lam))
        dp = 0.5 * cfg.kappa * np.expm1(-cfg.lam * t) * p
    elif cfg.kind == "rtn":
        x = cfg.kappa * t
        ratio2 = (2.0 * cfg.c / cfg.kappa) ** 2
        _, sh = _ch_sh(1.0 - ratio2, x)
        dp = -cfg.kappa * ratio2 * np.exp(-x) * sh
    else:
        y = 0.5 * t
        _, sh = _ch_sh(cfg.d_squared, y)
        dp = -cfg.kappa * cfg.lam * np.exp(-cfg.lam * y) * sh
    return _scalar(dp)


def rate_unchecked(cfg: ChannelConfig, t):
    """gamma(t) without pole checks; non-finite where p_t = 0."""
    t = np.asarray(t, dtype=float)
    if cfg.kind == "oun":
        return _scalar(-0.25 * cfg.kappa * np.expm1(-cfg.lam * t))
    if cfg.kind == "rtn":
        x = cfg.kappa * t
        ratio2 = (2.0 * cfg.c / cfg.kappa) ** 2
        ch, sh = _ch_sh(1.0 - ratio2, x)
        with np.errstate(divide="ignore", invalid="ignore"):
            return _scalar(0.5 * cfg.kappa * ratio2 * sh / (ch + sh))
    y = 0.5 * t
    ch, sh = _ch_sh(cfg.d_squared, y)
    with np.errstate(divide="ignore", invalid="ignore"):
        return _scalar(2.0 * cfg.kappa * cfg.lam * sh / (ch + cfg.lam * sh))


def decoherence_rate(cfg: ChannelConfig, t):
    """Time-local rate gamma(t); raises :class:`RatePole` where |p_t| < 1e-12."""
    if cfg.kind != "oun":
        p = np.atleast_1d(decoherence_function(cfg, t))
        bad = np.abs(p) < POLE_TOL
        if np.any(bad):
            tt = np.broadcast_to(np.asarray(t, dtype=float), p.shape)
            raise RatePole(float(tt[bad][0]), float(p[bad][0]))
    return rate_unchecked(cfg, t)


def rate_exponent(cfg: ChannelConfig) -> float:
    """k such that p_t = exp(-k * integral of gamma) away from zeros of p."""
    return 2.0 if cfg.dephasing else 0.5


def integrated_rate(cfg: ChannelConfig, t):
    """Lambda_t = integral_0^t gamma, as a principal value across zeros of p_t."""
    p = np.abs(np.asarray(decoherence_function(cfg, t), dtype=float))
    with np.errstate(divide="ignore"):
        return _scalar(-np.log(p) / rate_exponent(cfg))


def p_zeros(cfg: ChannelConfig, t_max: float, samples_per_unit: int = 400) -> list[float]:
    """Zeros of p_t in (0, t_max], located by sign scan plus bisection."""
    from scipy.optimize import brentq

    if cfg.kind == "oun":
        return []
    n = max(64, int(samples_per_unit * cfg.kappa * t_max) + 1)
    ts = np.linspace(0.0, t_max, n + 1)
    ps = decoherence_function(cfg, ts)
    out = []
    for i in np.nonzero(np.sign(ps[:-1]) * np.sign(ps[1:]) < 0)[0]:
        out.append(brentq(lambda s: decoherence_function(cfg, s), ts[i], ts[i + 1], xtol=1e-15, rtol=1e-15))
    out.extend(float(ts[i]) for i in np.nonzero(ps == 0.0)[0] if ts[i] > 0)
    return sorted(out)


# -- Kraus representation ---------------------------------------------------


def kraus_operators(cfg: ChannelConfig, t) -> np.ndarray:
    """Single-qubit Kraus operators, shape ``(..., n_kraus, 2, 2)``."""
    p = np.asarray(decoherence_function(cfg, t), dtype=float)
    if cfg.dephasing:
        a = np.sqrt(np.clip((1.0 + p) / 2.0, 0.0, None))[..., None, None]
        b = np.sqrt(np.clip((1.0 - p) / 2.0, 0.0, None))[..., None, None]
        return np.stack([a * I2, b * SZ], axis=-3)
    k0 = np.zeros(p.shape + (2, 2), dtype=complex)
    k0[..., 0, 0] = 1.0
    k0[..., 1, 1] = p
    k1 = np.zeros_like(k0)
    k1[..., 0, 1] = np.sqrt(np.clip(1.0 - p * p, 0.0, None))
    return np.stack([k0, k1], axis=-3)


def kraus_completeness_error(cfg: ChannelConfig, t) -> float:
    k = kraus_operators(cfg, t)
    s = np.einsum("...kji,...kjl->...il", np.conj(k), k)
    return float(np.max(np.abs(s - I2)))


def _transfer_from_kraus(k: np.ndarray) -> np.ndarray:
    # T[a, b, a', b'] = sum_k K[a, a'] conj(K[b, b'])
    return np.einsum("...kaA,...kbB->...abAB", k, np.conj(k))


def transfer_tensor(cfg: ChannelConfig, t) -> np.ndarray:
    """Single-qubit transfer tensor written directly in terms of p_t.

    Equal to the Kraus form, but coherences are scaled by p_t itself instead of
    a difference of square roots, which would lose all relative accuracy where
    p_t crosses zero.
    """
    p = np.atleast_1d(np.asarray(decoherence_function(cfg, t), dtype=float))
    tens = np.zeros(p.shape + (2, 2, 2, 2), dtype=complex)
    tens[..., 0, 1, 0, 1] = p
    tens[..., 1, 0, 1, 0] = p
    tens[..., 0, 0, 0, 0] = 1.0
    if cfg.dephasing:
        tens[..., 1, 1, 1, 1] = 1.0
    else:
        tens[..., 1, 1, 1, 1] = p * p
        tens[..., 0, 0, 1, 1] = 1.0 - p * p
    return tens


def _dissipator_tensor(op: np.ndarray) -> np.ndarray:
    ada = op.conj().T @ op
    return (
        np.einsum("aA,bB->abAB", op, op.conj())
        - 0.5 * np.einsum("aA,bB->abAB", ada, I2)
        - 0.5 * np.einsum("aA,bB->abAB", I2, ada.conj())
    )


def _apply_local(rhos: np.ndarray, tens: np.ndarray, qubit: int, n: int) -> np.ndarray:
    """Apply a single-qubit superoperator tensor to ``qubit`` of a stack of states."""
    b = rhos.shape[0]
    lo, hi = 1 << qubit, 1 << (n - qubit - 1)
    r = rhos.reshape(b, lo, 2, hi, lo, 2, hi)
    if tens.ndim == 4:
        out = np.einsum("abAB,ziAklBm->ziaklbm", tens, r)
    else:
        out = np.einsum("zabAB,ziAklBm->ziaklbm", tens, r)
    return out.reshape(rhos.shape)


def _check_arity(rho) -> int:
    n = n_qubits(rho)
    if n > MAX_QUBITS:
        raise TooManyQubits(f"{n} qubits exceeds the supported maximum of {MAX_QUBITS}")
    return n


def evolve_many(rho0, cfg: ChannelConfig, times) -> np.ndarray:
    """Evolved states at each time via local single-qubit maps; shape ``(T, d, d)``."""
    rho0 = np.asarray(rho0, dtype=complex)
    n = _check_arity(rho0)
    times = np.atleast_1d(np.asarray(times, dtype=float))
    tens = transfer_tensor(cfg, times)
    out = np.broadcast_to(rho0, (times.size,) + rho0.shape).copy()
    for j in range(n):
        out = _apply_local(out, tens, j, n)
    return out


def evolve_nqubit(rho0, cfg: ChannelConfig, t: float) -> EvolvedState:
    rho_t = evolve_many(rho0, cfg, [t])[0]
    return EvolvedState(rho_t, decoherence_function(cfg, t), float(t))


def evolve_qubit(eta, cfg: ChannelConfig, t: float) -> EvolvedState:
    """Closed-form single-qubit evolution from a Bloch vector."""
    ex, ey, ez = (float(x) for x in eta)
    rho0 = bloch_state((ex, ey, ez))
    p = decoherence_function(cfg, t)
    off = complex(ex, -ey) * p
    if cfg.dephasing:
        rho = 0.5 * np.array([[1 + ez, off], [off.conjugate(), 1 - ez]], dtype=complex)
    else:
        low = (1 - ez) * p * p
        rho = 0.5 * np.array([[2 - low, off], [off.conjugate(), low]], dtype=complex)
    if t == 0:
        rho = rho0
    return EvolvedState(rho, p, float(t))


def bell_diag_evolved(k, cfg: ChannelConfig, t) -> np.ndarray:
    """Closed-form evolved Bell-diagonal matrix (local channel on both qubits)."""
    k1, k2, k3 = k.k1, k.k2, k.k3
    p = float(decoherence_function(cfg, t))
    s = p * p
    if cfg.dephasing:
        return 0.25 * np.array(
            [
                [1 + k3, 0, 0, s * (k1 - k2)],
                [0, 1 - k3, s * (k1 + k2), 0],
                [0, s * (k1 + k2), 1 - k3, 0],
                [s * (k1 - k2), 0, 0, 1 + k3],
            ],
            dtype=complex,
        )
    u = (1 + k3) * s * s
    mid = 0.25 * (2 * s - u)
    return np.array(
        [
            [1 - s + 0.25 * u, 0, 0, 0.25 * (k1 - k2) * s],
            [0, mid, 0.25 * (k1 + k2) * s, 0],
            [0, 0.25 * (k1 + k2) * s, mid, 0],
            [0.25 * (k1 - k2) * s, 0, 0, 0.25 * u],
        ],
        dtype=complex,
    )


# -- time-local generator ---------------------------------------------------

_DEPHASING_D = _dissipator_tensor(SZ)
_DAMPING_D = _dissipator_tensor(SIGMA_MINUS)


def generator_many(rhos, cfg: ChannelConfig, times) -> np.ndarray:
    """``L(rho_t) = sum_j gamma(t) D_j[rho_t]`` for a stack of states at matching times."""
    rhos = np.asarray(rhos, dtype=complex)
    n = _check_arity(rhos[0])
    gam = np.atleast_1d(decoherence_rate(cfg, np.asarray(times, dtype=float)))
    tens = _DEPHASING_D if cfg.dephasing else _DAMPING_D
    out = np.zeros_like(rhos)
    for j in range(n):
        out += _apply_local(rhos, tens, j, n)
    return out * gam[:, None, None]


def generator(rho_t, cfg: ChannelConfig, t: float) -> np.ndarray:
    """Right-hand side of the master equation at time t (no Hamiltonian part)."""
    return generator_many(np.asarray(rho_t, dtype=complex)[None], cfg, [t])[0]
