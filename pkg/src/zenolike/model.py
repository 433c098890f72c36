"""Target qubit measured by a stream of detector qubits.

Units: the free precession frequency is fixed to one, so every input is
dimensionless -- the coupling ``g/omega`` and the phases ``omega*dt_f`` and
``omega*dt_m``.

One cycle is free evolution of the target for ``dt_f`` under ``sigma_z``,
followed by joint evolution with a fresh detector for ``dt_m`` under

    H = g sx(x)sx + sz(x)1 + 1(x)sz,

after which the detector is discarded.
"""
from dataclasses import dataclass
import math

import numpy as np

from .errors import ContractViolation
from .qcore import (I2, PAULIS, SX, SY, SZ, check_finite, dagger, herm_expm, herm_expm_batch,
                    partial_trace_detector, tensor, unvec, vec)

STATE_TOL = 1e-12


@dataclass(frozen=True)
class ModelParams:
    """Measurement-cycle parameters in units where omega = 1."""
    g_over_omega: float
    omega_dtf: float
    omega_dtm: float

    def __post_init__(self):
        vals = (self.g_over_omega, self.omega_dtf, self.omega_dtm)
        if not all(math.isfinite(v) for v in vals):
            raise ContractViolation(f"non-finite parameters {vals}")
        if min(vals) < 0:
            raise ContractViolation(f"parameters must be non-negative, got {vals}")

    @property
    def big_omega(self):
        """Generalized Rabi frequency sqrt(g^2 + 4 omega^2)."""
        return math.sqrt(self.g_over_omega ** 2 + 4.0)

    def as_tuple(self):
        return (self.g_over_omega, self.omega_dtf, self.omega_dtm)


@dataclass(frozen=True, eq=False)
class QubitState:
    """A validated 2x2 density matrix."""
    rho: np.ndarray

    def __post_init__(self):
        rho = check_finite(np.asarray(self.rho, dtype=complex), "density matrix")
        if rho.shape != (2, 2):
            raise ContractViolation(f"expected a 2x2 matrix, got {rho.shape}")
        if np.max(np.abs(rho - dagger(rho))) > STATE_TOL:
            raise ContractViolation("density matrix is not Hermitian")
        if abs(np.trace(rho) - 1) > STATE_TOL:
            raise ContractViolation(f"density matrix has trace {np.trace(rho).real}")
        if np.linalg.eigvalsh(rho)[0] < -STATE_TOL:
            raise ContractViolation("density matrix is not positive semidefinite")
        object.__setattr__(self, "rho", rho)

    @classmethod
    def from_bloch(cls, r):
        r = np.asarray(r, dtype=float)
        if r.shape != (3,):
            raise ContractViolation("Bloch vector must have three components")
        if np.linalg.norm(r) > 1 + 1e-10:
            raise ContractViolation(f"Bloch vector {r} lies outside the unit ball")
        return cls(0.5 * (I2 + r[0] * SX + r[1] * SY + r[2] * SZ))

    @classmethod
    def ground(cls):
        """The detector ground state |0><0| (Bloch vector +z)."""
        return cls(np.diag([1.0, 0.0]).astype(complex))

    @classmethod
    def maximally_mixed(cls):
        return cls(0.5 * I2)

    @property
    def bloch(self):
        return bloch_vector(self.rho)

    def __array__(self, dtype=None, copy=None):
        return self.rho if dtype is None else self.rho.astype(dtype)


def bloch_vector(rho):
    rho = np.asarray(rho)
    return np.real(np.stack([np.trace(rho @ p, axis1=-2, axis2=-1) for p in PAULIS], axis=-1))


def density(x):
    """Coerce a :class:`QubitState`, 2x2 array or Bloch 3-vector to a 2x2 array."""
    if isinstance(x, QubitState):
        return x.rho
    a = np.asarray(x)
    if a.shape == (3,):
        return QubitState.from_bloch(a).rho
    return a.astype(complex)


def apply_channel(superop, rho):
    """Apply a superoperator (column-stacking convention) to an operator."""
    return unvec(np.asarray(superop) @ vec(density(rho)))


def joint_hamiltonian(p: ModelParams):
    return (p.g_over_omega * tensor(SX, SX) + tensor(SZ, I2) + tensor(I2, SZ))


def free_unitary(omega_dt):
    return np.diag([np.exp(-1j * omega_dt), np.exp(1j * omega_dt)])


def cycle_unitary(p: ModelParams):
    """Joint unitary of one cycle, ``U_M (U_F (x) 1)``."""
    um = herm_expm(joint_hamiltonian(p), p.omega_dtm)
    return um @ tensor(free_unitary(p.omega_dtf), I2)


def cycle_channel(p: ModelParams, rho_d=None):
    """Superoperator of one cycle, built by pushing the basis operators E_ij through the map.

    This is the reference construction; every closed form is checked against it.
    """
    rho_d = density(QubitState.ground() if rho_d is None else rho_d)
    uf = free_unitary(p.omega_dtf)
    um = herm_expm(joint_hamiltonian(p), p.omega_dtm)
    m = np.zeros((4, 4), dtype=complex)
    for k in range(4):
        e = np.zeros(4, dtype=complex)
        e[k] = 1.0
        b = uf @ unvec(e) @ dagger(uf)
        joint = um @ tensor(b, rho_d) @ dagger(um)
        m[:, k] = vec(partial_trace_detector(joint))
    return m


def _superop_from_unitaries(u, rho_d):
    # M[(a,a'),(b,b')] = sum_{i,j,k} U[ai,bj] rho_d[j,k] conj(U[a'i,b'k]), row a + 2a'
    n = u.shape[0]
    u4 = u.reshape(n, 2, 2, 2, 2)
    m = np.einsum("naibj,njk,ncidk->ncadb", u4, rho_d, np.conj(u4), optimize=True)
    return m.reshape(n, 4, 4)


def cycle_kraus(p: ModelParams, rho_d=None):
    """Kraus operators ``sqrt(w_j) <i|U|d_j>`` of one cycle, from the eigen-decomposition of ``rho_d``."""
    rho_d = density(QubitState.ground() if rho_d is None else rho_d)
    u4 = cycle_unitary(p).reshape(2, 2, 2, 2)  # [a, i, b, j]
    w, v = np.linalg.eigh(rho_d)
    ops = []
    for j in range(2):
        if w[j] > 1e-15:
            kj = np.sqrt(w[j]) * np.einsum("aibj,j->iab", u4, v[:, j])
            ops.extend(kj)
    return ops


def _lift_constants():
    trace_d = np.zeros((4, 16), dtype=complex)
    embed = np.zeros((16, 4, 4), dtype=complex)
    eye16, eye4 = np.eye(16), np.eye(4)
    for k in range(16):
        trace_d[:, k] = vec(partial_trace_detector(unvec(eye16[k])))
    for k in range(4):
        for l in range(4):
            embed[:, k, l] = vec(tensor(unvec(eye4[k]), unvec(eye4[l])))
    return trace_d, embed


# vec(Tr_D X) = _TRACE_D vec(X);  vec(A (x) s) = (_EMBED @ vec(s)) vec(A)
_TRACE_D, _EMBED = _lift_constants()
_XX = tensor(SX, SX)
_ZZ_FREE = tensor(SZ, I2) + tensor(I2, SZ)


def cycle_channel_algebraic(p: ModelParams, rho_d=None):
    """Same channel as :func:`cycle_channel`, from the matrix identity
    ``M = T_D (conj(U) (x) U) E(rho_d)`` with constant partial-trace and
    embedding maps. Independent of the basis-pushing loop and about five
    times faster, so the optimizers use it.
    """
    rho_d = density(QubitState.ground() if rho_d is None else rho_d)
    w, v = np.linalg.eigh(p.g_over_omega * _XX + _ZZ_FREE)
    u = (v * np.exp(-1j * w * p.omega_dtm)) @ dagger(v)
    ef = np.exp(-1j * p.omega_dtf)
    u = u * np.array([ef, ef, np.conj(ef), np.conj(ef)])
    return _TRACE_D @ np.kron(np.conj(u), u) @ (_EMBED @ vec(rho_d))


def cycle_channels(g, dtf, dtm, rho_d=None):
    """Vectorized channel construction for arrays of parameters.

    ``g``, ``dtf``, ``dtm`` broadcast to a common 1-D shape ``(N,)``;
    ``rho_d`` is a single 2x2 state or a stack ``(N, 2, 2)``. Returns ``(N, 4, 4)``.
    """
    g, dtf, dtm = np.broadcast_arrays(*(np.atleast_1d(np.asarray(x, dtype=float)) for x in (g, dtf, dtm)))
    n = g.shape[0]
    if rho_d is None:
        rho_d = QubitState.ground().rho
    rho_d = np.asarray(rho_d, dtype=complex)
    if rho_d.ndim == 2:
        rho_d = np.broadcast_to(rho_d, (n, 2, 2))
    h = g[:, None, None] * _XX + _ZZ_FREE[None]
    u = herm_expm_batch(h, dtm)
    # right-multiplying by U_F (x) 1 scales the columns with target index b
    uf = np.stack([np.exp(-1j * dtf), np.exp(-1j * dtf), np.exp(1j * dtf), np.exp(1j * dtf)], axis=-1)
    u = u * uf[:, None, :]
    return _superop_from_unitaries(u, rho_d)


def analytic_superop(p: ModelParams):
    """Closed-form superoperator for a ground-state detector, kept entry by entry in its tabulated form.

    Only the eight tabulated entries are nonzero. The formulas are kept
    verbatim, including the ones that disagree with the brute-force channel;
    :mod:`zenolike.reconcile` quantifies the disagreement.
    """
    g, w = p.g_over_omega, 1.0
    dtf, dtm = p.omega_dtf, p.omega_dtm
    om = math.sqrt(g * g + 4 * w * w)
    den = om ** 2 * (g + om) ** 2
    k = om * g + g * g + 4 * w * w
    cO, sO = math.cos(om * dtm), math.sin(om * dtm)
    m = np.zeros((4, 4), dtype=complex)
    m[0, 0] = 2 * ((g ** 3 * om + g ** 4 + 2 * g * g * w * w) * cO ** 2
                   + 4 * om * g * w * w + 4 * g * g * w * w + 8 * w ** 4) / den
    m[0, 3] = k ** 2 * sO ** 2 / den
    m[1, 1] = (math.cos(g * dtm) * (om * g + om ** 2) * np.exp(2j * w * dtf)
               * (k * cO + 2j * (w * om + 2 * w * g) * sO) / den)
    m[2, 2] = np.conj(m[1, 1])
    m[1, 2] = np.exp(-2j * w * dtf) * g * sO * math.sin(g * dtm) * k / den
    m[2, 1] = np.conj(m[1, 2])
    m[3, 0] = g * g * sO ** 2 / om ** 2
    m[3, 3] = k ** 2 * cO ** 2 / den
    return m


# Pauli basis: column k is vec(sigma_k), sigma_0 = identity
PAULI_VEC = np.stack([vec(I2), vec(SX), vec(SY), vec(SZ)], axis=1)


def superop_from_ptm(r):
    """Superoperator for the Pauli transfer matrix ``r`` (acting on (1, x, y, z))."""
    return PAULI_VEC @ np.asarray(r) @ dagger(PAULI_VEC) / 2


def ptm_from_superop(m):
    """Pauli transfer matrix of a superoperator; real for Hermiticity-preserving maps."""
    return dagger(PAULI_VEC) @ np.asarray(m) @ PAULI_VEC / 2


def idealized_channel(theta, phi):
    """Infinite-frequency limit with fixed interaction strength ``theta = g dt_m``.

    A z-rotation by ``2 phi`` (``phi = omega dt_f``) followed by partial
    dephasing in the x basis: ``rho -> cos^2(theta) rho + sin^2(theta) X rho X``.
    Built directly as a Bloch map.
    """
    c = math.cos(2 * theta)
    ca, sa = math.cos(2 * phi), math.sin(2 * phi)
    rot = np.array([[1, 0, 0, 0], [0, ca, -sa, 0], [0, sa, ca, 0], [0, 0, 0, 1]], dtype=float)
    dephase = np.diag([1.0, 1.0, c, c])
    return superop_from_ptm(dephase @ rot)
