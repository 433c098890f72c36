"""Operator-sum (Kraus) and POVM views of a measurement cycle."""
from dataclasses import dataclass
from typing import List

import numpy as np

from .errors import NotCompletelyPositive, ZeroProbabilityOutcome
from .model import density
from .qcore import I2, PAULIS, SX, SY, SZ, dagger, fix_phase, unvec, vec

CP_TOL = 1e-6
CLIP_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class KrausSet:
    operators: List[np.ndarray]

    def __len__(self):
        return len(self.operators)

    def __iter__(self):
        return iter(self.operators)

    def completeness(self):
        """``sum_j K_j^H K_j``; the identity for a trace-preserving set."""
        return sum(dagger(k) @ k for k in self.operators)

    def completeness_error(self):
        return float(np.max(np.abs(self.completeness() - I2)))


@dataclass(frozen=True, eq=False)
class PovmSet:
    elements: List[np.ndarray]

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def completeness_error(self):
        return float(np.max(np.abs(sum(self.elements) - I2)))


def choi_matrix(superop):
    """Choi matrix ``sum_ij |i><j| (x) Phi(|i><j|)``; trace 2 for a trace-preserving map.

    With this ordering the eigenvector of a rank-one term is ``vec(K)``.
    """
    m4 = np.asarray(superop).reshape(2, 2, 2, 2)  # [b, a, j, i] for row a + 2b, column i + 2j
    return m4.transpose(3, 1, 2, 0).reshape(4, 4)


def kraus_from_channel(superop, rank_tol=1e-10):
    """Canonical Kraus operators from the eigendecomposition of the Choi matrix.

    Operators are ordered by descending Choi eigenvalue, each eigenvector
    phase-fixed. Eigenvalues in ``[-1e-10, rank_tol]`` are dropped as
    numerical noise; anything below ``-1e-6`` raises
    :class:`NotCompletelyPositive`.
    """
    j = choi_matrix(superop)
    j = 0.5 * (j + dagger(j))
    w, v = np.linalg.eigh(j)
    if w[0] < -CP_TOL:
        raise NotCompletelyPositive(f"Choi matrix has eigenvalue {w[0]:.3e}")
    ops = []
    for k in np.argsort(-w, kind="stable"):
        if w[k] > rank_tol:
            ops.append(np.sqrt(w[k]) * unvec(fix_phase(v[:, k])))
    return KrausSet(ops)


def channel_from_kraus(ks):
    """Superoperator ``sum_j conj(K_j) (x) K_j`` (column stacking)."""
    ops = ks.operators if isinstance(ks, KrausSet) else list(ks)
    return sum(np.kron(np.conj(k), k) for k in ops)


def povm_from_kraus(ks):
    ops = ks.operators if isinstance(ks, KrausSet) else list(ks)
    elements = []
    for k in ops:
        e = dagger(k) @ k
        elements.append(0.5 * (e + dagger(e)))
    return PovmSet(elements)


def outcome_probabilities(ps, rho):
    """Born-rule probabilities ``p_j = tr(E_j rho)``."""
    rho = density(rho)
    elements = ps.elements if isinstance(ps, PovmSet) else list(ps)
    return np.array([np.real(np.trace(e @ rho)) for e in elements])


def post_measurement_state(ks, j, rho):
    """Conditional state ``K_j rho K_j^H / p_j`` for outcome ``j``."""
    rho = density(rho)
    k = ks.operators[j] if isinstance(ks, KrausSet) else list(ks)[j]
    out = k @ rho @ dagger(k)
    p = float(np.real(np.trace(out)))
    if p <= 1e-14:
        raise ZeroProbabilityOutcome(f"outcome {j} has probability {p:.3e}")
    out = out / p
    return 0.5 * (out + dagger(out))


def kraus_from_pauli(c0, cx, cy, cz=0.0):
    """``c0 I + cx X + cy Y + cz Z``; convenience for printed Kraus operators."""
    return c0 * I2 + cx * SX + cy * SY + cz * SZ


def bloch_of_effect(e):
    """Return ``(a, n)`` such that ``E = a I + (n . sigma) / 2``."""
    e = np.asarray(e)
    a = float(np.real(np.trace(e))) / 2
    n = np.array([float(np.real(np.trace(e @ p))) for p in PAULIS])
    return a, n
