"""Small dense complex linear algebra for one qubit target plus one qubit detector.

Conventions
-----------
* Two-qubit operators are ordered target (x) detector: ``tensor(A_target, B_detector)``.
* Operators are vectorized by column stacking, so
  ``vec([[a, b], [c, d]]) == (a, c, b, d)`` and ``vec(A X B) = (B^T (x) A) vec(X)``.
"""
from dataclasses import dataclass
from typing import List

import numpy as np

from .errors import ContractViolation, NumericalFailure

I2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
SPLUS = np.array([[0, 1], [0, 0]], dtype=complex)
SMINUS = SPLUS.T.copy()
PAULIS = (SX, SY, SZ)

HERM_TOL = 1e-12
MAX_QR_SWEEPS = 200
DEFECTIVE_COND = 1e8


def tensor(a, b):
    """Kronecker product with ``a`` acting on the target (first factor)."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def partial_trace_detector(m):
    """Trace out the detector (second factor) of a 4x4 operator.

    Works on a single matrix or on a stack of shape ``(..., 4, 4)``.
    """
    m = np.asarray(m)
    m4 = m.reshape(m.shape[:-2] + (2, 2, 2, 2))
    return np.einsum("...aibi->...ab", m4)


def vec(a):
    """Column-stack a 2x2 (or ``(..., 2, 2)``) operator into a length-4 vector."""
    a = np.asarray(a)
    return np.swapaxes(a, -1, -2).reshape(a.shape[:-2] + (-1,))


def unvec(v):
    """Inverse of :func:`vec`."""
    v = np.asarray(v)
    n = int(round(np.sqrt(v.shape[-1])))
    return np.swapaxes(v.reshape(v.shape[:-1] + (n, n)), -1, -2)


def dagger(a):
    return np.conj(np.swapaxes(a, -1, -2))


def hermiticity_error(a):
    a = np.asarray(a)
    return float(np.max(np.abs(a - dagger(a)))) if a.size else 0.0


def check_finite(a, name="matrix"):
    if not np.all(np.isfinite(a)):
        raise ContractViolation(f"{name} has non-finite entries")
    return a


def herm_expm(h, t):
    """Return ``exp(-i h t)`` for Hermitian ``h`` via its spectral decomposition.

    Raises :class:`ContractViolation` if ``h`` is not Hermitian within
    ``1e-12`` relative to its largest entry.
    """
    h = check_finite(np.asarray(h, dtype=complex), "generator")
    scale = max(1.0, float(np.max(np.abs(h))))
    if hermiticity_error(h) > HERM_TOL * scale:
        raise ContractViolation("herm_expm requires a Hermitian generator")
    h = 0.5 * (h + dagger(h))
    w, v = np.linalg.eigh(h)
    return (v * np.exp(-1j * w * t)) @ dagger(v)


def herm_expm_batch(h, t):
    """Vectorized :func:`herm_expm` over a stack ``h`` of shape ``(N, n, n)``.

    ``t`` broadcasts against the leading axis. Hermiticity is assumed (the
    callers build ``h`` from real-coefficient Pauli sums).
    """
    h = np.asarray(h, dtype=complex)
    w, v = np.linalg.eigh(h)
    phase = np.exp(-1j * w * np.asarray(t, dtype=float)[..., None])
    return (v * phase[..., None, :]) @ dagger(v)


# ---------------------------------------------------------------------------
# General (non-normal) eigensolver
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EigenPair4:
    eigenvalue: complex
    eigenvector: np.ndarray
    residual: float


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenpairs in Schur-diagonal order.

    ``vectors[:, k]`` is the unit eigenvector for ``values[k]``. ``condition``
    is the 2-norm condition number of the eigenvector matrix; ``defective``
    is set when it exceeds ``1e8``.
    """
    values: np.ndarray
    vectors: np.ndarray
    residuals: np.ndarray
    condition: float
    defective: bool

    @property
    def pairs(self) -> List[EigenPair4]:
        return [EigenPair4(complex(self.values[k]), self.vectors[:, k].copy(), float(self.residuals[k]))
                for k in range(len(self.values))]

    def __iter__(self):
        return iter(self.pairs)

    def __len__(self):
        return len(self.values)


def fix_phase(v):
    """Normalize ``v`` to unit 2-norm and make its largest entry real positive.

    Magnitudes are compared after rounding to 12 digits so that near-ties
    resolve to the lowest index reproducibly.
    """
    v = np.asarray(v, dtype=complex)
    nrm = np.linalg.norm(v)
    if nrm == 0:
        return v
    v = v / nrm
    k = int(np.argmax(np.round(np.abs(v), 12)))
    return v * (np.conj(v[k]) / abs(v[k]))


def _householder_hessenberg(a):
    h = np.array(a, dtype=complex)
    n = h.shape[0]
    q = np.eye(n, dtype=complex)
    for k in range(n - 2):
        x = h[k + 1:, k].copy()
        alpha = np.linalg.norm(x)
        if alpha == 0:
            continue
        phase = x[0] / abs(x[0]) if x[0] != 0 else 1.0
        x[0] += phase * alpha
        u = x / np.linalg.norm(x)
        h[k + 1:, :] -= 2.0 * np.outer(u, np.conj(u) @ h[k + 1:, :])
        h[:, k + 1:] -= 2.0 * np.outer(h[:, k + 1:] @ u, np.conj(u))
        q[:, k + 1:] -= 2.0 * np.outer(q[:, k + 1:] @ u, np.conj(u))
        h[k + 2:, k] = 0.0
    return h, q


def _givens(a, b):
    """Unitary ``G`` (2x2) with ``G @ [a, b] = [r, 0]``."""
    r = np.hypot(abs(a), abs(b))
    if r == 0:
        return np.eye(2, dtype=complex)
    c = a / r
    s = b / r
    return np.array([[np.conj(c), np.conj(s)], [-s, c]])


def _wilkinson_shift(a, b, c, d):
    """Eigenvalue of [[a, b], [c, d]] closest to ``d``."""
    tr = 0.5 * (a + d)
    disc = np.sqrt(0.25 * (a - d) ** 2 + b * c)
    l1, l2 = tr + disc, tr - disc
    return l1 if abs(l1 - d) < abs(l2 - d) else l2


def schur_qr(a, max_sweeps=MAX_QR_SWEEPS):
    """Complex Schur form ``a = Q T Q^H`` by Hessenberg reduction plus shifted QR.

    Uses Wilkinson shifts with an exceptional shift every tenth stalled sweep.
    Raises :class:`NumericalFailure` (carrying the partial ``(T, Q)``) when the
    sweep budget runs out.
    """
    t, q = _householder_hessenberg(a)
    n = t.shape[0]
    eps = np.finfo(float).eps
    hi = n - 1
    sweeps = 0
    stall = 0
    while hi > 0:
        # deflation scan on the active trailing block
        lo = hi
        while lo > 0:
            off = abs(t[lo, lo - 1])
            if off <= eps * (abs(t[lo, lo]) + abs(t[lo - 1, lo - 1])) or off < 1e-300:
                t[lo, lo - 1] = 0.0
                break
            lo -= 1
        if lo == hi:
            hi -= 1
            stall = 0
            continue
        if sweeps >= max_sweeps:
            raise NumericalFailure("shifted QR did not converge", partial=(t, q))
        sweeps += 1
        stall += 1
        if stall % 10 == 0:
            mu = t[hi, hi] + 0.75 * abs(t[hi, hi - 1]) * (1 + 1j)
        else:
            mu = _wilkinson_shift(t[hi - 1, hi - 1], t[hi - 1, hi], t[hi, hi - 1], t[hi, hi])
        m = hi - lo + 1
        win = slice(lo, hi + 1)
        hs = t[win, win] - mu * np.eye(m)
        qw = np.eye(m, dtype=complex)
        for k in range(m - 1):
            g = _givens(hs[k, k], hs[k + 1, k])
            hs[k:k + 2, :] = g @ hs[k:k + 2, :]
            qw[:, k:k + 2] = qw[:, k:k + 2] @ np.conj(g.T)
        t[:, win] = t[:, win] @ qw
        t[win, :] = np.conj(qw.T) @ t[win, :]
        q[:, win] = q[:, win] @ qw
        t[np.tril_indices(n, -2)] = 0.0
    return t, q


def _triangular_eigenvectors(t):
    n = t.shape[0]
    eps = np.finfo(float).eps
    smin = max(eps * np.linalg.norm(t), 1e-300)
    x = np.zeros((n, n), dtype=complex)
    for k in range(n):
        lam = t[k, k]
        x[k, k] = 1.0
        for j in range(k - 1, -1, -1):
            num = t[j, j + 1:k + 1] @ x[j + 1:k + 1, k]
            den = t[j, j] - lam
            if abs(den) < smin:
                den = smin
            x[j, k] = -num / den
    return x


def eig_general(m, max_sweeps=MAX_QR_SWEEPS):
    """All eigenpairs of a small general complex matrix.

    Schur form by :func:`schur_qr`, eigenvectors by back-substitution on the
    triangular factor, each normalized with :func:`fix_phase`. Residuals are
    ``||M v - lambda v||_2``.
    """
    m = check_finite(np.asarray(m, dtype=complex), "matrix")
    t, q = schur_qr(m, max_sweeps=max_sweeps)
    values = np.diag(t).copy()
    vecs = q @ _triangular_eigenvectors(t)
    for k in range(vecs.shape[1]):
        vecs[:, k] = fix_phase(vecs[:, k])
    residuals = np.linalg.norm(m @ vecs - vecs * values, axis=0)
    with np.errstate(all="ignore"):
        cond = float(np.linalg.cond(vecs))
    if not np.isfinite(cond):
        cond = np.inf
    return EigenDecomposition(values, vecs, residuals, cond, cond > DEFECTIVE_COND)


def eig_batch(m):
    """LAPACK eigen-decomposition of a stack ``(N, n, n)``; throughput path for scans."""
    return np.linalg.eig(np.asarray(m, dtype=complex))
