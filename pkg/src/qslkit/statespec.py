"""Parser for the compact state strings used on the command line.

    bloch:ex,ey,ez      single-qubit Bloch vector
    chi:+|-[,q]         (1-q)/2 I + q |chi_pm><chi_pm|
    bell:phi+|phi-|psi+|psi-
    belldiag:k1,k2,k3   Bell-diagonal two-qubit state
    ghz:N,k,+|-         GHZ pair k (1-based) on N qubits
    mcb:<bell>          maximally coherent entangled two-qubit state
    werner:q,<inner>    white-noise mixing of any other spec
    mcbw:q,<bell>       shorthand for werner:q,mcb:<bell>

Parsing is case-insensitive and ignores spaces.
"""

from __future__ import annotations

from .errors import BadStateSpec
from .states import BellDiagonal, bell_state, bloch_state, chi_state, ghz_state, max_coherent_entangled, werner


def _floats(body: str, n: int, what: str) -> list[float]:
    parts = body.split(",")
    if len(parts) != n:
        raise BadStateSpec(f"{what} needs {n} comma-separated numbers, got {body!r}")
    try:
        return [float(x) for x in parts]
    except ValueError as exc:
        raise BadStateSpec(f"bad number in {what} spec {body!r}") from exc


def _sign(tok: str) -> int:
    if tok in ("+", "plus", "+1", "1"):
        return 1
    if tok in ("-", "minus", "-1"):
        return -1
    raise BadStateSpec(f"sign must be + or -, got {tok!r}")


def _split_q(body: str, what: str) -> tuple[float, str]:
    q, _, inner = body.partition(",")
    if not inner:
        raise BadStateSpec(f"{what} needs q,<state>")
    try:
        return float(q), inner
    except ValueError as exc:
        raise BadStateSpec(f"bad mixing parameter {q!r}") from exc


def parse_state(spec: str):
    """Density matrix described by ``spec``; raises :class:`BadStateSpec`."""
    text = "".join(spec.split()).lower()
    kind, sep, body = text.partition(":")
    if not sep:
        raise BadStateSpec(f"state spec {spec!r} lacks a 'kind:' prefix")
    try:
        if kind == "bloch":
            return bloch_state(_floats(body, 3, "bloch"))
        if kind == "chi":
            sign, _, q = body.partition(",")
            return chi_state(_sign(sign), float(q) if q else 1.0)
        if kind == "bell":
            return bell_state(body)
        if kind == "belldiag":
            k = BellDiagonal(*_floats(body, 3, "belldiag"))
            if not k.is_physical():
                raise BadStateSpec(f"Bell-diagonal triple {body!r} is not a valid state")
            return k.matrix()
        if kind == "ghz":
            parts = body.split(",")
            if len(parts) not in (2, 3):
                raise BadStateSpec("ghz needs N,k[,sign]")
            sign = _sign(parts[2]) if len(parts) == 3 else 1
            return ghz_state(int(parts[0]), int(parts[1]), sign)
        if kind == "mcb":
            return max_coherent_entangled(body)
        if kind == "werner":
            q, inner = _split_q(body, "werner")
            return werner(q, parse_state(inner))
        if kind == "mcbw":
            q, inner = _split_q(body, "mcbw")
            return werner(q, max_coherent_entangled(inner))
    except BadStateSpec:
        raise
    except ValueError as exc:
        raise BadStateSpec(f"invalid state spec {spec!r}: {exc}") from exc
    raise BadStateSpec(f"unknown state kind {kind!r}")
