"""Operator assembly: factorization, band structure, splits, five-term action."""

import numpy as np
import pytest

from cmvkit.assembly import (
    CmvOperatorSet,
    SplitSpec,
    SplitOutOfWindow,
    apply_difference,
    assemble,
    assemble_split,
    operator_difference_block,
)
from cmvkit.coefficients import sequence_from_values
from cmvkit.cli.ensembles import EnsembleSpec, generate, random_unitary


def free_sequence(n, value_left=1.0, value_right=1.0):
    vals = {k: 0.0 for k in range(0, n + 1)}
    vals[0] = value_left
    vals[n] = value_right
    return sequence_from_values(vals)


# Every nonzero entry of the free eight-site operator, worked out by hand
# from the two-factor product with identity boundaries.
FREE_8_ENTRIES = {
    (0, 1): 1.0, (1, 3): 1.0, (2, 0): 1.0, (3, 5): 1.0,
    (4, 2): 1.0, (5, 7): 1.0, (6, 4): 1.0, (7, 6): -1.0,
}


def test_free_eight_site_matrix_is_exact():
    ops = assemble(free_sequence(8))
    expected = np.zeros((8, 8), dtype=complex)
    for (i, j), v in FREE_8_ENTRIES.items():
        expected[i, j] = v
    assert np.array_equal(ops.U, expected)
    assert np.array_equal(ops.U, ops.V @ ops.W)
    np.testing.assert_allclose(ops.U.conj().T @ ops.U, np.eye(8), atol=0)


def test_assembled_operator_is_unitary_and_factored():
    for m, seed in ((1, 0), (2, 1), (3, 2)):
        spec = EnsembleSpec(m=m, k_min=0, k_max=14, seed=seed)
        ops = assemble(generate(spec))
        n = ops.U.shape[0]
        assert n == 14 * m
        np.testing.assert_allclose(ops.U.conj().T @ ops.U, np.eye(n),
                                   atol=1e-13)
        np.testing.assert_allclose(ops.V.conj().T @ ops.V, np.eye(n),
                                   atol=1e-13)
        np.testing.assert_allclose(ops.U, ops.V @ ops.W, atol=1e-14)


def test_band_zeros_are_exact():
    """Blocks beyond two sites of the diagonal are structural zeros."""
    spec = EnsembleSpec(m=2, k_min=0, k_max=12, seed=3)
    ops = assemble(generate(spec))
    sites = range(ops.offset, ops.offset + ops.n_sites)
    for k in sites:
        for kp in sites:
            if abs(k - kp) > 2:
                assert np.all(ops.block(k, kp) == 0)


def test_scalar_diagonal_formula():
    spec = EnsembleSpec(m=1, k_min=0, k_max=16, seed=4)
    seq = generate(spec)
    ops = assemble(seq)
    for k in seq.sites:
        want = -np.conj(seq.alpha(k)[0, 0]) * seq.alpha(k + 1)[0, 0]
        np.testing.assert_allclose(ops.block(k, k)[0, 0], want, atol=1e-14)


def test_site_accessors():
    spec = EnsembleSpec(m=2, k_min=-4, k_max=6, seed=5)
    ops = assemble(generate(spec))
    s = ops.site_slice(-4)
    assert (s.start, s.stop) == (0, 2)
    assert ops.block(0, 1).shape == (2, 2)


def test_split_decouples_exactly():
    rng = np.random.default_rng(6)
    spec = EnsembleSpec(m=2, k_min=0, k_max=12, seed=7)
    seq = generate(spec)
    g1, g2 = random_unitary(rng, 2), random_unitary(rng, 2)
    ops = assemble_split(seq, SplitSpec(k0=6, gamma_left=g1, gamma_right=g2))
    n = ops.U.shape[0]
    np.testing.assert_allclose(ops.U.conj().T @ ops.U, np.eye(n), atol=1e-13)
    cut = ops.site_slice(6).start
    assert np.all(ops.U[:cut, cut:] == 0)
    assert np.all(ops.U[cut:, :cut] == 0)


def test_split_difference_factors_locally():
    """U - U_split is V D or D W with D supported on the two cut sites."""
    spec = EnsembleSpec(m=2, k_min=0, k_max=12, seed=8)
    seq = generate(spec)
    rng = np.random.default_rng(9)
    for k0 in (5, 6):
        sp = SplitSpec(k0=k0, gamma_left=random_unitary(rng, 2),
                       gamma_right=random_unitary(rng, 2))
        ops = assemble(seq)
        diff = ops.U - assemble_split(seq, sp).U
        blk = operator_difference_block(seq, sp)
        D = np.zeros_like(diff)
        lo = ops.site_slice(k0 - 1).start
        hi = ops.site_slice(k0).stop
        D[lo:hi, lo:hi] = blk
        want = ops.V @ D if k0 % 2 == 1 else D @ ops.W
        np.testing.assert_allclose(diff, want, atol=1e-14)


def test_split_outside_window_raises():
    spec = EnsembleSpec(m=1, k_min=0, k_max=10, seed=10)
    seq = generate(spec)
    eye = np.eye(1)
    with pytest.raises(SplitOutOfWindow):
        assemble_split(seq, SplitSpec(k0=-3, gamma_left=eye, gamma_right=eye))


def test_apply_difference_matches_dense():
    for m, seed in ((1, 11), (2, 12)):
        spec = EnsembleSpec(m=m, k_min=0, k_max=16, seed=seed)
        seq = generate(spec)
        ops = assemble(seq)
        rng = np.random.default_rng(seed)
        k_range = range(4, 12)
        phi = rng.normal(size=(len(k_range) + 4, m)) \
            + 1j * rng.normal(size=(len(k_range) + 4, m))
        got = apply_difference(seq, phi, k_range)
        full = np.zeros(ops.U.shape[0], dtype=complex)
        for i, k in enumerate(range(k_range.start - 2, k_range.stop + 2)):
            full[ops.site_slice(k)] = phi[i]
        want = ops.U @ full
        for i, k in enumerate(k_range):
            np.testing.assert_allclose(got[i], want[ops.site_slice(k)],
                                       atol=1e-13)


def test_apply_difference_free_stencil():
    """With zero coefficients the action shifts by two sites with unit weight."""
    seq = free_sequence(16)
    k_range = range(6, 10)
    phi = np.arange(1.0, len(k_range) + 5).reshape(-1, 1).astype(complex)
    got = apply_difference(seq, phi, k_range)
    for i, k in enumerate(k_range):
        src = (k - 2) if k % 2 == 0 else (k + 2)
        j = src - (k_range.start - 2)
        np.testing.assert_allclose(got[i], phi[j], atol=0)
