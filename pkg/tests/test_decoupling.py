"""Rank-m decoupling: phase solutions, local blocks, and rank reports."""

import numpy as np
import pytest

from cmvkit.decoupling import (
    decoupling_report,
    default_z_samples,
    det_criterion,
    local_block,
    minimal_phases,
    numerical_rank,
)
from cmvkit.coefficients import factorize_svd, sequence_from_values
from cmvkit.cli.ensembles import EnsembleSpec, generate, random_unitary


def scalar_sequence(alpha, n=12):
    vals = {k: alpha for k in range(0, n + 1)}
    vals[0] = 1.0
    vals[n] = 1.0
    return sequence_from_values(vals)


def test_minimal_phase_frozen_scalar_values():
    # alpha = 0.5 with s = 0 pins t at pi
    sol = minimal_phases(np.array([[0.5]]), [0.0])
    np.testing.assert_allclose(sol.t, [np.pi], atol=1e-12)
    np.testing.assert_allclose(sol.gamma1, [[-1.0]], atol=1e-12)
    np.testing.assert_allclose(sol.gamma2, [[1.0]], atol=1e-12)
    # alpha = 0 shifts any s by pi
    for s in (0.0, 1.3, 4.0):
        sol0 = minimal_phases(np.array([[0.0]]), [s])
        np.testing.assert_allclose(sol0.t, [(s + np.pi) % (2 * np.pi)],
                                   atol=1e-12)


def test_minimal_phase_diagonal_matrix():
    beta = np.diag([0.3, 0.6])
    sol = minimal_phases(beta, [0.0, 0.0])
    np.testing.assert_allclose(sol.t, [np.pi, np.pi], atol=1e-12)
    np.testing.assert_allclose(sol.gamma1, -np.eye(2), atol=1e-12)
    np.testing.assert_allclose(sol.gamma2, np.eye(2), atol=1e-12)


def test_det_criterion_frozen_values():
    assert det_criterion(0.5, np.pi, 0.0) == pytest.approx(0.0, abs=1e-15)
    assert det_criterion(0.0, 0.0, 0.0) == pytest.approx(-2.0, abs=1e-15)


def test_det_criterion_uses_split_unitary_phases():
    """Vanishes at the minimal phases read off gamma1 and gamma2."""
    rng = np.random.default_rng(0)
    for _ in range(25):
        r = rng.uniform(0.0, 0.8)
        a = r * np.exp(1j * rng.uniform(0, 2 * np.pi))
        s = float(rng.uniform(0, 2 * np.pi))
        sol = minimal_phases(np.array([[a]]), [s])
        t1 = float(np.angle(sol.gamma1[0, 0]))
        t2 = float(np.angle(sol.gamma2[0, 0]))
        assert abs(det_criterion(a, t1, t2)) < 1e-13
        # moving either phase away breaks the vanishing with a margin
        assert abs(det_criterion(a, t1 + 0.1, t2)) > 0.01
        assert abs(det_criterion(a, t1, t2 - 0.1)) > 0.01


def test_local_block_frozen_examples():
    seq = scalar_sequence(0.0)
    blk = local_block(seq, 6, np.array([[1.0]]), np.array([[1.0]]))
    np.testing.assert_allclose(blk, [[1.0, 1.0], [1.0, -1.0]], atol=1e-15)
    assert numerical_rank(blk) == 2
    blk_min = local_block(seq, 6, np.array([[-1.0]]), np.array([[1.0]]))
    np.testing.assert_allclose(blk_min, [[-1.0, 1.0], [1.0, -1.0]],
                               atol=1e-15)
    assert numerical_rank(blk_min) == 1


def test_numerical_rank_thresholding():
    M = np.diag([1.0, 1e-3, 1e-12])
    assert numerical_rank(M) == 2
    assert numerical_rank(M, rtol=1e-15) == 3
    assert numerical_rank(np.zeros((3, 3))) == 0


def test_scalar_report_minimal_and_perturbed():
    seq = scalar_sequence(0.4)
    sol = minimal_phases(seq.alpha(6), [0.7])
    rep = decoupling_report(seq, 6, sol.gamma1, sol.gamma2)
    assert rep.op_rank == 1
    assert rep.minimal
    assert all(r == 1 for r in rep.resolvent_ranks.values())
    assert len(rep.resolvent_ranks) == len(default_z_samples())
    # bumping one phase loses minimality
    rep2 = decoupling_report(seq, 6, sol.gamma1 * np.exp(0.1j), sol.gamma2,
                             z_samples=default_z_samples()[:2])
    assert rep2.op_rank == 2
    assert not rep2.minimal
    # a single unitary on both sides is never minimal
    rep3 = decoupling_report(seq, 6, sol.gamma2, sol.gamma2,
                             z_samples=default_z_samples()[:2])
    assert rep3.op_rank == 2


def test_matrix_report_ranks():
    for m, seed in ((2, 1), (3, 2)):
        spec = EnsembleSpec(m=m, k_min=0, k_max=12, seed=seed, radius_max=0.8)
        seq = generate(spec)
        rng = np.random.default_rng(seed)
        s = rng.uniform(0, 2 * np.pi, size=m)
        sol = minimal_phases(seq.alpha(6), s)
        rep = decoupling_report(seq, 6, sol.gamma1, sol.gamma2)
        assert rep.op_rank == m
        assert rep.minimal
        assert all(r == m for r in rep.resolvent_ranks.values())
        # one bumped channel raises the rank by exactly one
        fac = factorize_svd(seq.alpha(6))
        t = np.asarray(sol.t, dtype=float).copy()
        t[0] += 0.1
        g1 = fac.sigma @ np.diag(np.exp(1j * t)) @ fac.tau.conj().T
        repb = decoupling_report(seq, 6, g1, sol.gamma2,
                                 z_samples=default_z_samples()[:1])
        assert repb.op_rank == m + 1
        # identity pair: full local rank
        eye = np.eye(m)
        repi = decoupling_report(seq, 6, eye, eye,
                                 z_samples=default_z_samples()[:1])
        assert repi.op_rank == 2 * m


def test_phase_solution_unitaries_share_frame():
    rng = np.random.default_rng(3)
    a = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    a = 0.75 * a / np.linalg.norm(a, 2)
    s = rng.uniform(0, 2 * np.pi, size=3)
    sol = minimal_phases(a, s)
    fac = factorize_svd(a)
    want1 = fac.sigma @ np.diag(np.exp(1j * sol.t)) @ fac.tau.conj().T
    want2 = fac.sigma @ np.diag(np.exp(1j * sol.s)) @ fac.tau.conj().T
    np.testing.assert_allclose(sol.gamma1, want1, atol=1e-13)
    np.testing.assert_allclose(sol.gamma2, want2, atol=1e-13)


def test_default_z_samples_off_axis():
    zs = default_z_samples()
    assert len(zs) == 8
    for z in zs:
        assert abs(abs(z) - 1.0) > 0.1
        assert abs(z) > 0.1
