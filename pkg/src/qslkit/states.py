"""State families and the coherence/mixedness measures evaluated on them.

Basis convention: index 0 of each qubit is the sigma_z = +1 level.  The
amplitude-damping channel pumps population from index 1 into index 0, so
``bloch_state((0, 0, 1))`` is its fixed point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BadIndex, BlochOutOfBall
from .hermitian import eig_hermitian, overlap, positivity_coefficients, purity

I2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = (SX, SY, SZ)

# Hadamard on the first qubit: maps Bell states to maximally coherent ones.
COHERENCE_UNITARY = np.array(
    [[1, 0, 1, 0], [0, 1, 0, 1], [1, 0, -1, 0], [0, 1, 0, -1]], dtype=complex
) / math.sqrt(2.0)

BELL_LABELS = ("phi+", "phi-", "psi+", "psi-")


def n_qubits(rho) -> int:
    d = np.asarray(rho).shape[-1]
    n = d.bit_length() - 1
    if 1 << n != d:
        raise ValueError(f"dimension {d} is not a power of two")
    return n


def projector(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    return np.outer(psi, psi.conj())


def bloch_state(eta) -> np.ndarray:
    """Qubit density matrix ``(I + eta . sigma) / 2``."""
    ex, ey, ez = (float(x) for x in eta)
    r = math.sqrt(ex * ex + ey * ey + ez * ez)
    if r > 1.0 + 1e-12:
        raise BlochOutOfBall(f"|eta| = {r:.15g} exceeds 1")
    return 0.5 * (I2 + ex * SX + ey * SY + ez * SZ)


def chi_state(sign: int = 1, q: float = 1.0) -> np.ndarray:
    """``(1-q)/2 I + q |chi_sign><chi_sign|`` with ``|chi_pm> = (|0> pm |1>)/sqrt 2``."""
    return bloch_state((q * (1 if sign >= 0 else -1), 0.0, 0.0))


@dataclass(frozen=True)
class BellDiagonal:
    """Two-qubit state ``(I + sum_i k_i sigma_i x sigma_i) / 4``."""

    k1: float
    k2: float
    k3: float

    def matrix(self) -> np.ndarray:
        k1, k2, k3 = self.k1, self.k2, self.k3
        return 0.25 * np.array(
            [
                [1 + k3, 0, 0, k1 - k2],
                [0, 1 - k3, k1 + k2, 0],
                [0, k1 + k2, 1 - k3, 0],
                [k1 - k2, 0, 0, 1 + k3],
            ],
            dtype=complex,
        )

    @property
    def sum_sq(self) -> float:
        return self.k1**2 + self.k2**2 + self.k3**2

    def is_physical(self, slack: float = 1e-10) -> bool:
        return bool(np.all(positivity_coefficients(self.matrix())[1:] >= -slack))

    def coherence(self) -> float:
        return 0.5 * (abs(self.k1 - self.k2) + abs(self.k1 + self.k2))

    def purity(self) -> float:
        return 0.25 * (1.0 + self.sum_sq)

    @classmethod
    def from_matrix(cls, rho, tol: float = 1e-10) -> "BellDiagonal":
        """Recover the correlation triple from a Bell-diagonal 4x4 matrix."""
        rho = np.asarray(rho)
        a = 4.0 * rho[0, 3].real
        b = 4.0 * rho[1, 2].real
        k3 = 4.0 * rho[0, 0].real - 1.0
        k = cls(0.5 * (a + b), 0.5 * (b - a), k3)
        if np.max(np.abs(k.matrix() - rho)) > tol:
            raise ValueError("matrix is not Bell-diagonal")
        return k


BELL_TRIPLES = {
    "phi+": BellDiagonal(1.0, -1.0, 1.0),
    "phi-": BellDiagonal(-1.0, 1.0, 1.0),
    "psi+": BellDiagonal(1.0, 1.0, -1.0),
    "psi-": BellDiagonal(-1.0, -1.0, -1.0),
}


def _bell_label(which: str) -> str:
    key = which.strip().lower().replace("φ", "phi").replace("ψ", "psi")
    key = key.replace("plus", "+").replace("minus", "-").replace("_", "")
    if key not in BELL_TRIPLES:
        raise BadIndex(f"unknown Bell state {which!r}")
    return key


def bell_vector(which: str) -> np.ndarray:
    key = _bell_label(which)
    s = 1.0 if key.endswith("+") else -1.0
    v = np.zeros(4, dtype=complex)
    if key.startswith("phi"):
        v[0b00], v[0b11] = 1.0, s
    else:
        v[0b01], v[0b10] = 1.0, s
    return v / math.sqrt(2.0)


def bell_state(which: str) -> np.ndarray:
    return projector(bell_vector(which))


def ghz_bits(n: int, index: int) -> int:
    """Bit pattern of the first ket of GHZ pair ``index`` (1-based, leading qubit 0)."""
    if n not in (2, 3, 4):
        raise BadIndex(f"GHZ states are defined for 2..4 qubits, got {n}")
    if not 1 <= index <= 1 << (n - 1):
        raise BadIndex(f"GHZ index {index} outside 1..{1 << (n - 1)}")
    return index - 1


def ghz_vector(n: int, index: int, sign: int = 1) -> np.ndarray:
    b = ghz_bits(n, index)
    v = np.zeros(1 << n, dtype=complex)
    v[b] = 1.0
    v[b ^ ((1 << n) - 1)] = 1.0 if sign >= 0 else -1.0
    return v / math.sqrt(2.0)


def ghz_state(n: int, index: int, sign: int = 1) -> np.ndarray:
    return projector(ghz_vector(n, index, sign))


def werner(q: float, base) -> np.ndarray:
    """``(1 - q)/d I + q base``."""
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"mixing parameter q={q} outside [0, 1]")
    base = np.asarray(base, dtype=complex)
    d = base.shape[-1]
    return (1.0 - q) / d * np.eye(d, dtype=complex) + q * base


def max_coherent_entangled(which: str) -> np.ndarray:
    u = COHERENCE_UNITARY
    return u @ bell_state(which) @ u.conj().T


def maximally_mixed(d: int) -> np.ndarray:
    return np.eye(d, dtype=complex) / d


# -- measures ---------------------------------------------------------------


def l1_coherence(rho):
    rho = np.asarray(rho)
    total = np.sum(np.abs(rho), axis=(-2, -1))
    diag = np.sum(np.abs(np.diagonal(rho, axis1=-2, axis2=-1)), axis=-1)
    val = total - diag
    return float(val) if np.ndim(val) == 0 else val


def von_neumann_entropy(rho) -> float:
    w = eig_hermitian(rho).values
    w = w[w > 1e-15]
    return float(-np.sum(w * np.log(w)))


def relative_entropy_coherence(rho) -> float:
    """``S(diag rho) - S(rho)`` in nats."""
    rho = np.asarray(rho)
    p = np.real(np.diag(rho))
    p = p[p > 1e-15]
    s_diag = float(-np.sum(p * np.log(p)))
    return max(0.0, s_diag - von_neumann_entropy(rho))


def linear_entropy(rho):
    rho = np.asarray(rho)
    d = rho.shape[-1]
    return d / (d - 1) * (1.0 - purity(rho))


def m_cl(rho):
    """Coherence-mixedness complementarity ``Cl1^2/(d-1)^2 + S_l`` (at most 1)."""
    rho = np.asarray(rho)
    d = rho.shape[-1]
    return l1_coherence(rho) ** 2 / (d - 1) ** 2 + linear_entropy(rho)


def relative_purity(rho0, rhot):
    return overlap(rhot, rho0) / purity(rho0)
