import math

import numpy as np
import pytest

from zenolike.errors import NotCompletelyPositive, ZeroProbabilityOutcome
from zenolike.measurement import (KrausSet, bloch_of_effect, channel_from_kraus, choi_matrix,
                                  kraus_from_channel, kraus_from_pauli, outcome_probabilities,
                                  post_measurement_state, povm_from_kraus)
from zenolike.model import ModelParams, QubitState, apply_channel, cycle_channel, idealized_channel
from zenolike.qcore import I2, SX, SY

from conftest import random_kraus, random_params, random_state, random_unitary

PLUS = np.array([1, 1]) / math.sqrt(2)
MINUS = np.array([1, -1]) / math.sqrt(2)


def choi_by_definition(m):
    out = np.zeros((4, 4), dtype=complex)
    for i in range(2):
        for j in range(2):
            e = np.zeros((2, 2), dtype=complex)
            e[i, j] = 1
            out += np.kron(e, apply_channel(m, e))
    return out


def test_choi_examples(rng):
    assert np.allclose(np.sort(np.linalg.eigvalsh(choi_matrix(np.eye(4)))), [0, 0, 0, 2])
    j = choi_matrix(idealized_channel(math.pi / 4, 0.0))
    assert np.allclose(np.sort(np.linalg.eigvalsh(j)), [0, 0, 1, 1], atol=1e-12)
    for _ in range(10):
        m = cycle_channel(random_params(rng), random_state(rng))
        assert abs(np.trace(choi_matrix(m)) - 2) <= 1e-12
        # same spectrum as the textbook block form (the two differ by a fixed reordering)
        assert np.allclose(np.linalg.eigvalsh(choi_matrix(m)), np.linalg.eigvalsh(choi_by_definition(m)),
                           atol=1e-12)


def test_kraus_identity_and_pvm():
    ks = kraus_from_channel(np.eye(4))
    assert len(ks) == 1 and np.allclose(ks.operators[0], I2)
    ks = kraus_from_channel(idealized_channel(math.pi / 4, 0.0))
    assert len(ks) == 2
    projectors = [np.outer(PLUS, PLUS), np.outer(MINUS, MINUS)]
    span = np.stack([p.ravel() for p in projectors], axis=1)
    for k in ks:
        c, *_ = np.linalg.lstsq(span, k.ravel(), rcond=None)
        assert np.linalg.norm(span @ c - k.ravel()) <= 1e-12
    rho = random_state(np.random.default_rng(1)).rho
    dephased = 0.5 * (rho + SX @ rho @ SX)
    assert np.max(np.abs(apply_channel(channel_from_kraus(ks), rho) - dephased)) <= 1e-10


def test_kraus_reference_channel_rank_two():
    m = cycle_channel(ModelParams(0.865, 15.13, 14.96))
    ks = kraus_from_channel(m)
    assert len(ks) == 2
    assert np.max(np.abs(channel_from_kraus(ks) - m)) <= 1e-10


def test_kraus_roundtrip_and_completeness(rng):
    for _ in range(100):
        m = channel_from_kraus(random_kraus(rng, rank=int(rng.integers(1, 5))))
        ks = kraus_from_channel(m)
        assert np.max(np.abs(channel_from_kraus(ks) - m)) <= 1e-9
        assert ks.completeness_error() <= 1e-10


def test_kraus_gauge_invariance(rng):
    ks = random_kraus(rng, rank=3)
    u = random_unitary(rng, 3)
    mixed = [sum(u[i, j] * ks[j] for j in range(3)) for i in range(3)]
    assert np.max(np.abs(channel_from_kraus(mixed) - channel_from_kraus(ks))) <= 1e-12


def test_not_cp_raises():
    transpose = np.eye(4)[[0, 2, 1, 3]]
    with pytest.raises(NotCompletelyPositive):
        kraus_from_channel(transpose)


def test_povm_examples():
    povm = povm_from_kraus(KrausSet([I2]))
    assert len(povm) == 1 and np.allclose(povm.elements[0], I2)
    ks = [np.outer(PLUS, PLUS), np.outer(MINUS, MINUS)]
    povm = povm_from_kraus(ks)
    for e, k in zip(povm, ks):
        assert np.allclose(e, k)
    assert np.allclose(outcome_probabilities(povm, np.outer(PLUS, PLUS)), [1, 0])


def test_printed_style_kraus_pair():
    kp = kraus_from_pauli(0.36 + 0.55j, 0.22, 0.14)
    km = kraus_from_pauli(0.36 + 0.55j, -0.22, -0.14)
    ks = KrausSet([kp, km])
    assert ks.completeness_error() <= 0.02
    povm = povm_from_kraus(ks)
    a, n = bloch_of_effect(povm.elements[0])
    assert a == pytest.approx(0.5, abs=0.02)
    assert np.max(np.abs(n - [0.32, 0.20, 0])) <= 0.02
    assert np.allclose(outcome_probabilities(povm, I2 / 2), [0.5, 0.5], atol=0.01)
    mods = np.sort(np.abs(np.linalg.eigvals(channel_from_kraus(ks))))
    assert np.sum(np.abs(mods - 1) <= 0.02) == 2


def test_probabilities_against_entrywise_sum(rng):
    for _ in range(20):
        povm = povm_from_kraus(random_kraus(rng, 3))
        rho = random_state(rng).rho
        p = outcome_probabilities(povm, rho)
        oracle = [sum(e[i, j] * rho[j, i] for i in range(2) for j in range(2)).real for e in povm]
        assert np.max(np.abs(p - oracle)) <= 1e-14
        assert p.min() >= -1e-12 and abs(p.sum() - 1) <= 1e-10


def test_povm_invariants(rng):
    povm = povm_from_kraus(kraus_from_channel(cycle_channel(random_params(rng), random_state(rng))))
    assert povm.completeness_error() <= 1e-10
    for e in povm:
        assert np.max(np.abs(e - e.conj().T)) <= 1e-12
        assert np.linalg.eigvalsh(e)[0] >= -1e-10


def test_post_measurement_states():
    ks = [np.outer(PLUS, PLUS), np.outer(MINUS, MINUS)]
    rho = np.array([[0.6, 0.1 + 0.2j], [0.1 - 0.2j, 0.4]])
    assert np.allclose(post_measurement_state(ks, 0, rho), np.outer(PLUS, PLUS))
    assert np.allclose(post_measurement_state(KrausSet([I2]), 0, rho), rho)
    with pytest.raises(ZeroProbabilityOutcome):
        post_measurement_state(ks, 1, np.outer(PLUS, PLUS))


def test_ensemble_identity(rng):
    for _ in range(1000):
        ks = KrausSet(random_kraus(rng, int(rng.integers(1, 4))))
        rho = random_state(rng)
        p = outcome_probabilities(povm_from_kraus(ks), rho)
        mix = sum(p[j] * post_measurement_state(ks, j, rho) for j in range(len(ks)) if p[j] > 1e-14)
        assert np.max(np.abs(mix - apply_channel(channel_from_kraus(ks), rho))) <= 1e-10


def test_bloch_of_effect_roundtrip():
    n = np.array([0.1, -0.3, 0.2])
    e = 0.45 * I2 + 0.5 * (n[0] * SX + n[1] * SY)
    a, got = bloch_of_effect(e)
    assert a == pytest.approx(0.45)
    assert np.allclose(got, [n[0], n[1], 0])
