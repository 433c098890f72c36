"""Spectral analysis of cycle channels and n-cycle evolution."""
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from .errors import NumericalFailure, UnsupportedDecomposition
from .measurement import choi_matrix
from .model import density
from .qcore import dagger, eig_general, unvec, vec

EPS_FIXED = 1e-10
EPS_ALMOST = 1e-2
FIXED = "fixed"
ALMOST_FIXED = "almost_fixed"
TRANSIENT = "transient"


def spectral_order(values, digits=10):
    """Indices sorting by descending modulus, then descending real part, then imaginary part.

    Keys are rounded to ``digits`` decimals so conjugate pairs and
    numerically equal moduli tie deterministically.
    """
    values = np.asarray(values)
    keys = (-values.imag, -np.round(values.real, digits), -np.round(np.abs(values), digits))
    return np.lexsort(keys, axis=-1)


def classify(lam, eps_fixed=EPS_FIXED, eps_almost=EPS_ALMOST):
    d = abs(lam - 1)
    if d <= eps_fixed:
        return FIXED
    if d <= eps_almost:
        return ALMOST_FIXED
    return TRANSIENT


@dataclass(frozen=True, eq=False)
class SpectralData:
    eigenvalues: np.ndarray      # (4,) complex, sorted by spectral_order
    eigen_ops: np.ndarray        # (4, 2, 2), eigen_ops[j] = unvec(vectors[:, j])
    vectors: np.ndarray          # (4, 4), columns are the unit eigenvectors
    residuals: np.ndarray
    classes: Tuple[str, ...]
    condition: float
    defective: bool
    superop: np.ndarray

    def indices(self, cls):
        return [j for j, c in enumerate(self.classes) if c == cls]


def spectral_decompose(superop, eps_fixed=EPS_FIXED, eps_almost=EPS_ALMOST):
    superop = np.asarray(superop, dtype=complex)
    dec = eig_general(superop)
    order = spectral_order(dec.values)
    vals = dec.values[order]
    vecs = dec.vectors[:, order]
    return SpectralData(
        eigenvalues=vals,
        eigen_ops=unvec(vecs.T),
        vectors=vecs,
        residuals=dec.residuals[order],
        classes=tuple(classify(v, eps_fixed, eps_almost) for v in vals),
        condition=dec.condition,
        defective=dec.defective,
        superop=superop,
    )


@dataclass(frozen=True, eq=False)
class EigenCoefficients:
    coefficients: np.ndarray
    residual: float

    def reconstruct(self, sd: SpectralData):
        return np.tensordot(self.coefficients, sd.eigen_ops, axes=1)


def state_decompose(rho, sd: SpectralData):
    """Coefficients ``c_j`` with ``rho = sum_j c_j V_j``."""
    if sd.defective:
        raise UnsupportedDecomposition("eigen-operators do not form a basis (defective channel)")
    target = vec(density(rho))
    c = np.linalg.solve(sd.vectors, target)
    residual = float(np.linalg.norm(sd.vectors @ c - target))
    if residual > 1e-10:
        raise NumericalFailure(f"eigenbasis solve residual {residual:.2e}")
    return EigenCoefficients(c, residual)


def evolve_n(superop, rho0, n, method="iterate", sd=None):
    """States ``rho_0 .. rho_n`` under repeated application of the channel.

    ``method="iterate"`` applies the superoperator ``n`` times (always
    available). ``method="spectral"`` uses ``sum_j lambda_j^n c_j V_j`` and
    refuses defective channels.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    superop = np.asarray(superop, dtype=complex)
    v0 = vec(density(rho0))
    if method == "iterate":
        out = np.empty((n + 1, 4), dtype=complex)
        out[0] = v0
        for k in range(n):
            out[k + 1] = superop @ out[k]
        return unvec(out)
    if method == "spectral":
        sd = sd if sd is not None else spectral_decompose(superop)
        c = state_decompose(unvec(v0), sd).coefficients
        powers = sd.eigenvalues[None, :] ** np.arange(n + 1)[:, None]
        return unvec((powers * c[None, :]) @ sd.vectors.T)
    raise ValueError(f"unknown method {method!r}")


def trace_distance_series(traj, ref):
    """Trace norm ``||rho_k - ref||_1`` along a trajectory of 2x2 states."""
    d = np.asarray(traj) - density(ref)[None]
    return np.sum(np.abs(np.linalg.eigvalsh(0.5 * (d + dagger(d)))), axis=-1)


@dataclass(frozen=True)
class CPTPDiagnostics:
    trace_dev: float
    min_choi_eig: float
    herm_dev: float

    def ok(self, trace_tol=1e-12, cp_tol=1e-10, herm_tol=1e-12):
        return self.trace_dev <= trace_tol and self.min_choi_eig >= -cp_tol and self.herm_dev <= herm_tol


_TRACE_ROW = np.array([1, 0, 0, 1], dtype=complex)


def validate_cptp(superop) -> CPTPDiagnostics:
    superop = np.asarray(superop, dtype=complex)
    trace_dev = float(np.max(np.abs(_TRACE_ROW @ superop - _TRACE_ROW)))
    herm_dev = 0.0
    for k in range(4):
        e = np.zeros(4, dtype=complex)
        e[k] = 1
        a = unvec(e)
        lhs = unvec(superop @ vec(dagger(a)))
        rhs = dagger(unvec(superop @ e))
        herm_dev = max(herm_dev, float(np.max(np.abs(lhs - rhs))))
    j = choi_matrix(superop)
    min_eig = float(np.linalg.eigvalsh(0.5 * (j + dagger(j)))[0])
    return CPTPDiagnostics(trace_dev, min_eig, herm_dev)


def conjugation_gap(values):
    """Largest distance from an eigenvalue's conjugate to the spectrum."""
    values = np.asarray(values)
    return float(max(np.min(np.abs(values - np.conj(v))) for v in values))


def hermitian_part_op(v):
    """Rotate the global phase of ``v`` to make it as Hermitian as possible, then Hermitize.

    Eigen-operators of real eigenvalues of a Hermiticity-preserving map are
    Hermitian up to a phase.
    """
    v = np.asarray(v, dtype=complex)
    # minimize ||e^{ia} v - (e^{ia} v)^H||: optimal e^{2ia} aligns with <v^H, v>
    z = np.sum(np.conj(dagger(v)) * v)
    phase = np.exp(-0.5j * np.angle(z)) if abs(z) > 0 else 1.0
    w = phase * v
    return 0.5 * (w + dagger(w))
