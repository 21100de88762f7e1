"""Dense linear algebra for small Hermitian matrices.

Every routine accepts either a single ``(d, d)`` array or a stack of shape
``(..., d, d)`` and operates on the trailing two axes.  Matrices are plain
complex numpy arrays; no wrapper type is imposed on callers.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import NamedTuple

import numpy as np

from .errors import NotHermitian, NotPSD, QslError

HERMITIAN_TOL = 1e-9
PSD_CLIP = 1e-10
PSD_FAIL = 1e-9
JACOBI_TOL = 1e-13
MAX_SWEEPS = 60
NEGLIGIBLE = 1e-30


@dataclass(frozen=True)
class Eigensystem:
    """Eigenvalues sorted descending, eigenvectors stored as columns."""

    values: np.ndarray
    vectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.vectors
        return (v * self.values[..., None, :]) @ np.conj(np.swapaxes(v, -1, -2))


class Norms(NamedTuple):
    op: np.ndarray | float
    hs: np.ndarray | float
    tr: np.ndarray | float


def dagger(m: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(m, -1, -2))


def hermiticity_error(m: np.ndarray) -> np.ndarray:
    m = np.asarray(m)
    return np.max(np.abs(m - dagger(m)), axis=(-2, -1))


def _as_stack(m):
    m = np.asarray(m, dtype=complex)
    if m.ndim < 2 or m.shape[-1] != m.shape[-2]:
        raise ValueError(f"expected square matrix, got shape {m.shape}")
    lead = m.shape[:-2]
    return m.reshape((-1,) + m.shape[-2:]), lead


def _check_hermitian(m: np.ndarray, tol: float = HERMITIAN_TOL) -> None:
    scale = np.maximum(1.0, np.max(np.abs(m), axis=(-2, -1)))
    err = hermiticity_error(m)
    if np.any(err > tol * scale):
        raise NotHermitian(f"matrix deviates from Hermitian by {float(np.max(err)):.3e}")


def _jacobi(a: np.ndarray, tol: float = JACOBI_TOL):
    """Cyclic complex Jacobi on a stack ``(B, d, d)`` of Hermitian matrices.

    Returns unsorted real eigenvalues ``(B, d)`` and eigenvectors ``(B, d, d)``.
    """
    a = 0.5 * (a + dagger(a))
    nb, d, _ = a.shape
    v = np.broadcast_to(np.eye(d, dtype=complex), a.shape).copy()
    if d == 1:
        return a[:, :, 0].real.copy(), v
    if not np.all(np.isfinite(a)):
        raise QslError("matrix has non-finite entries")
    offmask = ~np.eye(d, dtype=bool)
    fro = np.sqrt(np.sum(np.abs(a) ** 2, axis=(1, 2)))
    target = tol * np.maximum(fro, np.finfo(float).tiny)
    # entries this far below the matrix scale cannot move any eigenvalue
    floor = np.maximum(NEGLIGIBLE * fro, np.finfo(float).tiny)
    for _ in range(MAX_SWEEPS):
        off = np.sqrt(np.sum(np.abs(a[:, offmask]) ** 2, axis=1))
        if np.all(off <= target):
            break
        for p in range(d - 1):
            for q in range(p + 1, d):
                apq = a[:, p, q]
                mag = np.abs(apq)
                live = mag > floor
                if not np.any(live):
                    continue
                safe = np.where(live, mag, 1.0)
                phase = np.where(live, apq / safe, 1.0)
                theta = (a[:, q, q].real - a[:, p, p].real) / (2.0 * safe)
                t = np.where(theta >= 0, 1.0, -1.0) / (np.abs(theta) + np.hypot(theta, 1.0))
                t = np.where(live, t, 0.0)
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                ph = np.conj(phase)
                gpp, gpq = c, s
                gqp, gqq = -s * ph, c * ph
                # columns: A <- A G
                colp = a[:, :, p].copy()
                colq = a[:, :, q]
                a[:, :, p] = colp * gpp[:, None] + colq * gqp[:, None]
                a[:, :, q] = colp * gpq[:, None] + colq * gqq[:, None]
                # rows: A <- G^dagger A
                rowp = a[:, p, :].copy()
                rowq = a[:, q, :]
                a[:, p, :] = rowp * np.conj(gpp)[:, None] + rowq * np.conj(gqp)[:, None]
                a[:, q, :] = rowp * np.conj(gpq)[:, None] + rowq * np.conj(gqq)[:, None]
                a[:, p, q] = 0.0
                a[:, q, p] = 0.0
                a[:, p, p] = a[:, p, p].real
                a[:, q, q] = a[:, q, q].real
                vp = v[:, :, p].copy()
                vq = v[:, :, q]
                v[:, :, p] = vp * gpp[:, None] + vq * gqp[:, None]
                v[:, :, q] = vp * gpq[:, None] + vq * gqq[:, None]
    else:
        raise QslError("Jacobi eigensolver did not converge")
    return np.real(np.diagonal(a, axis1=1, axis2=2)).copy(), v


def eig_hermitian(m) -> Eigensystem:
    """Eigendecomposition of a Hermitian matrix (or stack of them).

    Values come back sorted in descending order with matching orthonormal
    eigenvector columns.  Raises :class:`NotHermitian` if ``m`` is not
    Hermitian to within ``1e-9`` (scaled by its largest entry when that
    exceeds one).
    """
    stack, lead = _as_stack(m)
    _check_hermitian(stack)
    w, v = _jacobi(stack)
    order = np.argsort(-w, axis=1, kind="stable")
    w = np.take_along_axis(w, order, axis=1)
    v = np.take_along_axis(v, order[:, None, :], axis=2)
    d = stack.shape[-1]
    return Eigensystem(w.reshape(lead + (d,)), v.reshape(lead + (d, d)))


def eigvals_hermitian(m) -> np.ndarray:
    return eig_hermitian(m).values


def norms(m) -> Norms:
    """Operator, Hilbert-Schmidt and trace norms.

    Hermitian inputs use the moduli of their eigenvalues; anything else goes
    through the eigenvalues of ``m^dagger m`` (squared singular values).
    """
    stack, lead = _as_stack(m)
    herm = hermiticity_error(stack) <= 1e-12 * np.maximum(1.0, np.max(np.abs(stack), axis=(-2, -1)))
    sv = np.empty(stack.shape[:2])
    if np.any(herm):
        sv[herm] = np.abs(_jacobi(stack[herm])[0])
    if np.any(~herm):
        g = dagger(stack[~herm]) @ stack[~herm]
        sv[~herm] = np.sqrt(np.clip(_jacobi(g)[0], 0.0, None))
    op = np.max(sv, axis=1)
    hs = np.sqrt(np.sum(sv * sv, axis=1))
    tr = np.sum(sv, axis=1)
    if lead == ():
        return Norms(float(op[0]), float(hs[0]), float(tr[0]))
    return Norms(op.reshape(lead), hs.reshape(lead), tr.reshape(lead))


def sqrt_psd(m) -> np.ndarray:
    """Principal square root of a positive semidefinite matrix.

    Eigenvalues in ``[-1e-10, 0)`` are treated as roundoff and clipped; any
    eigenvalue below ``-1e-9`` raises :class:`NotPSD`.
    """
    es = eig_hermitian(m)
    w = es.values
    if np.any(w < -PSD_FAIL):
        raise NotPSD(f"smallest eigenvalue {float(np.min(w)):.3e} is negative")
    w = np.where(w < 0.0, 0.0, w)
    return Eigensystem(np.sqrt(w), es.vectors).reconstruct()


def purity(rho) -> np.ndarray | float:
    rho = np.asarray(rho)
    val = np.real(np.einsum("...ij,...ji->...", rho, rho))
    return float(val) if np.ndim(val) == 0 else val


def overlap(a, b) -> np.ndarray | float:
    """``tr(a b)`` for Hermitian a, b (real part)."""
    val = np.real(np.einsum("...ij,...ji->...", np.asarray(a), np.asarray(b)))
    return float(val) if np.ndim(val) == 0 else val


def bures_fidelity(a, b) -> np.ndarray | float:
    """Uhlmann-Bures fidelity ``(tr sqrt(sqrt(a) b sqrt(a)))**2``."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape[-2:] != b.shape[-2:]:
        raise ValueError("dimension mismatch")
    ra = sqrt_psd(a)
    inner = ra @ b @ ra
    inner = 0.5 * (inner + dagger(inner))
    w = eig_hermitian(inner).values
    if np.any(w < -PSD_FAIL):
        raise NotPSD("sqrt(a) b sqrt(a) is not positive")
    f = np.sum(np.sqrt(np.clip(w, 0.0, None)), axis=-1) ** 2
    f = np.clip(f, 0.0, 1.0)
    return float(f) if np.ndim(f) == 0 else f


def superfidelity_bound(a, b) -> np.ndarray | float:
    """Upper bound ``tr(ab) + sqrt((1 - tr a^2)(1 - tr b^2))`` on the fidelity."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape[-2:] != b.shape[-2:]:
        raise ValueError("dimension mismatch")
    gap = np.clip((1.0 - purity(a)) * (1.0 - purity(b)), 0.0, None)
    val = overlap(a, b) + np.sqrt(gap)
    return float(val) if np.ndim(val) == 0 else val


def tensor(*ms) -> np.ndarray:
    """Kronecker product of one or more matrices, left to right."""
    if not ms:
        raise ValueError("tensor() needs at least one factor")
    return reduce(np.kron, (np.asarray(m, dtype=complex) for m in ms))


def positivity_coefficients(rho) -> np.ndarray:
    """Coefficients ``B_0 .. B_N`` of ``det(x I - rho) = sum (-1)^i B_i x^(N-i)``.

    Computed from traces of matrix powers (Faddeev-LeVerrier recursion), so no
    eigendecomposition is involved.  For a Hermitian matrix ``B_i`` is the
    i-th elementary symmetric polynomial of the spectrum.
    """
    a = np.asarray(rho, dtype=complex)
    n = a.shape[-1]
    coeffs = [1.0 + 0j]  # c_N .. c_0 of the monic characteristic polynomial
    mk = np.zeros_like(a)
    ident = np.eye(n, dtype=complex)
    for k in range(1, n + 1):
        mk = a @ mk + coeffs[-1] * ident
        coeffs.append(-np.trace(a @ mk) / k)
    c = np.array(coeffs)
    signs = np.array([(-1) ** i for i in range(n + 1)])
    return np.real(signs * c)


def is_psd_by_coefficients(rho, slack: float = PSD_CLIP) -> bool:
    return bool(np.all(positivity_coefficients(rho)[1:] >= -slack))
