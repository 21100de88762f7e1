"""Speed-limit curves as a witness that tells GHZ basis states apart.

Under a channel acting identically on every qubit, a GHZ pair built on the
bit string b and its complement can only depend on how many qubits of b are
flipped, up to swapping b with its complement.  States therefore fall into
classes labelled by min(r, n - r), r being the number of 1s in b, and the
class sizes follow the binomial counts C(n, r) (halved when r = n/2, where b
and its complement share a class).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .channels import ChannelConfig
from .speedlimit import QslRequest, kappa_tau_sweep
from .states import ghz_bits, ghz_state, max_coherent_entangled

GROUP_RTOL = 1e-8
GAP_MIN = 1e-3
GHZ_TAU = math.pi / 4


@dataclass(frozen=True)
class WitnessVerdict:
    groups: list[list[str]]
    intra_group_max_dev: float
    inter_group_min_gap: float
    degeneracies: dict[int, int]
    expected_sizes: list[int] = field(default_factory=list)
    curves: dict[str, np.ndarray] = field(default_factory=dict, repr=False)

    @property
    def sizes(self) -> list[int]:
        return sorted(len(g) for g in self.groups)

    @property
    def matches_binomial(self) -> bool:
        return not self.expected_sizes or self.sizes == sorted(self.expected_sizes)

    @property
    def separated(self) -> bool:
        return len(self.groups) < 2 or self.inter_group_min_gap > GAP_MIN


def group_curves(curves: dict[str, np.ndarray], rtol: float = GROUP_RTOL) -> tuple[list[list[str]], float, float]:
    """Cluster curves whose pointwise deviation is below ``rtol`` times the
    largest magnitude.  Returns groups in input order, the largest deviation
    inside any group and the smallest maximal deviation between groups."""
    labels = list(curves)
    scale = max((float(np.max(np.abs(c))) for c in curves.values()), default=0.0)
    thresh = rtol * max(scale, 1e-300)
    groups: list[list[str]] = []
    for lab in labels:
        for g in groups:
            if np.max(np.abs(curves[lab] - curves[g[0]])) < thresh:
                g.append(lab)
                break
        else:
            groups.append([lab])
    intra = 0.0
    for g in groups:
        for a in g:
            for b in g:
                intra = max(intra, float(np.max(np.abs(curves[a] - curves[b]))))
    gap = math.inf
    for i, ga in enumerate(groups):
        for gb in groups[i + 1 :]:
            gap = min(gap, float(np.max(np.abs(curves[ga[0]] - curves[gb[0]]))))
    return groups, intra, gap


def ghz_label(n: int, index: int, sign: int = 1) -> str:
    return f"GHZ{n},{index}{'+' if sign >= 0 else '-'}"


def excitation_class(n: int, index: int) -> int:
    r = bin(ghz_bits(n, index)).count("1")
    return min(r, n - r)


def expected_class_sizes(n: int, with_minus: bool = False) -> list[int]:
    sizes = []
    for r in range(n // 2 + 1):
        c = math.comb(n, r)
        sizes.append(c // 2 if 2 * r == n else c)
    return [s * (2 if with_minus else 1) for s in sizes]


def sweep_curves(states: dict[str, np.ndarray], cfg: ChannelConfig, req: QslRequest, kappa_taus) -> dict[str, np.ndarray]:
    return {lab: np.array([p.tau_qsl for p in kappa_tau_sweep(rho, cfg, req, kappa_taus)]) for lab, rho in states.items()}


def ghz_states(n: int, with_minus: bool = False) -> dict[str, np.ndarray]:
    out = {}
    for k in range(1, (1 << (n - 1)) + 1):
        for sign in (1, -1) if with_minus else (1,):
            out[ghz_label(n, k, sign)] = ghz_state(n, k, sign)
    return out


def default_request(tau: float = GHZ_TAU) -> QslRequest:
    return QslRequest(method="bures", norm="op", tau=tau)


def witness(states: dict[str, np.ndarray], cfg: ChannelConfig, req: QslRequest, kappa_taus, expected_sizes=(), degeneracies=None) -> WitnessVerdict:
    curves = sweep_curves(states, cfg, req, kappa_taus)
    groups, intra, gap = group_curves(curves)
    return WitnessVerdict(groups, intra, gap, dict(degeneracies or {}), list(expected_sizes), curves)


def ghz_witness(n: int, cfg: ChannelConfig, kappa_taus, req: QslRequest | None = None, with_minus: bool = False) -> WitnessVerdict:
    """Group the 2^(n-1) GHZ pairs on n qubits by their speed-limit curves."""
    if cfg.kind != "nmad":
        raise ValueError("the GHZ witness uses the nmad channel")
    req = req or default_request()
    degeneracies = {r: math.comb(n, r) for r in range(n + 1)}
    return witness(ghz_states(n, with_minus), cfg, req, kappa_taus, expected_class_sizes(n, with_minus), degeneracies)


def coherent_bell_witness(cfg: ChannelConfig, kappa_taus, req: QslRequest | None = None) -> WitnessVerdict:
    """The four maximally coherent entangled states; expected to form one group."""
    states = {f"mcb:{b}": max_coherent_entangled(b) for b in ("phi+", "phi-", "psi+", "psi-")}
    return witness(states, cfg, req or QslRequest(method="bures", norm="op", tau=1.0), kappa_taus, [4])
