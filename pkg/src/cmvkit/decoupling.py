"""Rank analysis of the block perturbation that severs the lattice.

Replacing one 2m x 2m block of the operator by diag(-gamma1, gamma2*)
decouples the window into two halves. The perturbation U - U_split is
supported on a single 2m x 2m block, so its rank is read off a small
local matrix. A closed-form phase choice makes that rank exactly m
(rank one in the scalar case); every other unitary choice gives more.

Functions here compute the local block, its numerical rank, the minimal
phases, the scalar determinant criterion, and a combined report that
also ranks the resolvent differences at sampled z.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .assembly import SplitOutOfWindow, SplitSpec, assemble, assemble_split
from .coefficients import (
    NotContractive,
    VerblunskySequence,
    _as_square,
    defect_matrices,
    factorize_svd,
    is_contraction,
)
from .errors import SingularSolve, require_off_circle

RANK_RTOL = 1e-8


@dataclass(frozen=True)
class PhaseSolution:
    """Phases (s given, t computed) and the unitaries they induce.

    gamma1 = sigma diag(e^{i t_j}) tau* and gamma2 = sigma diag(e^{i s_j}) tau*
    where sigma, tau come from the singular value decomposition of the
    coefficient being perturbed. Each t_j lies in [0, 2 pi).
    """

    s: np.ndarray
    t: np.ndarray
    gamma1: np.ndarray
    gamma2: np.ndarray


@dataclass(frozen=True)
class DecouplingReport:
    """Observed ranks of one decoupling perturbation.

    op_rank is the numerical rank of U - U_split; resolvent_ranks maps
    each sampled z to the rank of the resolvent difference; minimal
    records whether op_rank hit the lower bound m.
    """

    local_block: np.ndarray
    singular_values: np.ndarray
    op_rank: int
    resolvent_ranks: dict = field(default_factory=dict)
    minimal: bool = False


def local_block(seq: VerblunskySequence, k0: int,
                gamma1: np.ndarray, gamma2: np.ndarray) -> np.ndarray:
    """The 2m x 2m matrix whose rank equals rank(U - U_split).

    Returns [[-alpha_k0 + gamma1, rho_tilde], [rho, alpha_k0* - gamma2*]].
    Up to unitary factors this is the only nonzero block of V - V_split
    (even k0) or W - W_split (odd k0).
    """
    if not (seq.k_min < k0 < seq.k_max):
        raise SplitOutOfWindow(f"site {k0} is not interior to the window")
    alpha = seq.alpha(k0)
    g1 = _as_square(gamma1)
    g2 = _as_square(gamma2)
    d = defect_matrices(alpha)
    m = seq.m
    block = np.zeros((2 * m, 2 * m), dtype=complex)
    block[:m, :m] = -alpha + g1
    block[:m, m:] = d.rho_tilde
    block[m:, :m] = d.rho
    block[m:, m:] = alpha.conj().T - g2.conj().T
    return block


def numerical_rank(M: np.ndarray, rtol: float = RANK_RTOL) -> int:
    """Count singular values above rtol times the largest one.

    Args:
        M: any complex matrix.
        rtol: relative threshold in (0, 1).

    Returns:
        The numerical rank; zero for the zero matrix.
    """
    if not 0 < rtol < 1:
        raise ValueError(f"rtol must lie in (0, 1), got {rtol}")
    s = np.linalg.svd(np.asarray(M, dtype=complex), compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.count_nonzero(s > rtol * s[0]))


def _wrap_two_pi(t: np.ndarray) -> np.ndarray:
    out = np.mod(t, 2 * np.pi)
    # mod can return 2*pi when the input is a tiny negative number
    out[out >= 2 * np.pi] = 0.0
    return out


def minimal_phases(alpha_k0: np.ndarray, s) -> PhaseSolution:
    """Phases making the decoupling perturbation have rank exactly m.

    Factorizes alpha_k0 = sigma beta tau* with beta = diag(beta_j) and
    solves each channel separately:

        t_j = 2 arg[i (beta_j e^{-i s_j / 2} - e^{i s_j / 2})]

    normalized to [0, 2 pi). The returned unitaries are
    gamma1 = sigma diag(e^{i t_j}) tau* and gamma2 = sigma diag(e^{i s_j}) tau*.
    """
    alpha = _as_square(alpha_k0)
    if not is_contraction(alpha):
        raise NotContractive("the perturbed coefficient must be a strict contraction")
    m = alpha.shape[0]
    s = np.atleast_1d(np.asarray(s, dtype=float))
    if s.shape != (m,):
        raise ValueError(f"need {m} phases s, got shape {s.shape}")
    fac = factorize_svd(alpha)
    beta = np.asarray(fac.beta, dtype=float)
    half = s / 2.0
    t = 2.0 * np.angle(1j * (beta * np.exp(-1j * half) - np.exp(1j * half)))
    t = _wrap_two_pi(t)
    theta1 = np.diag(np.exp(1j * t))
    theta2 = np.diag(np.exp(1j * s))
    gamma1 = fac.sigma @ theta1 @ fac.tau.conj().T
    gamma2 = fac.sigma @ theta2 @ fac.tau.conj().T
    return PhaseSolution(s=s, t=t, gamma1=gamma1, gamma2=gamma2)


def det_criterion(alpha_k0: complex, t1: float, t2: float) -> complex:
    """Scalar rank-one test for the phase pair (t1, t2).

    Returns e^{i t1} conj(alpha) + e^{-i t2} alpha - e^{i (t1 - t2)} - 1,
    which vanishes exactly when the perturbed 2 x 2 block drops rank.
    """
    a = complex(alpha_k0)
    return (np.exp(1j * t1) * np.conj(a) + np.exp(-1j * t2) * a
            - np.exp(1j * (t1 - t2)) - 1.0)


def default_z_samples() -> tuple:
    """Eight points on the circles |z| = 0.5 and |z| = 2."""
    angles = (np.pi / 8, 5 * np.pi / 8, 9 * np.pi / 8, 13 * np.pi / 8)
    return tuple(r * np.exp(1j * th) for r in (0.5, 2.0) for th in angles)


def _resolvent(U: np.ndarray, z: complex) -> np.ndarray:
    n = U.shape[0]
    try:
        out = np.linalg.solve(U - z * np.eye(n), np.eye(n))
    except np.linalg.LinAlgError as exc:
        raise SingularSolve(f"resolvent solve failed at z = {z}") from exc
    if not np.all(np.isfinite(out)):
        raise SingularSolve(f"resolvent solve overflowed at z = {z}")
    return out


def decoupling_report(seq: VerblunskySequence, k0: int,
                      gamma1: np.ndarray, gamma2: np.ndarray,
                      z_samples=None, rtol: float = RANK_RTOL) -> DecouplingReport:
    """Ranks of U - U_split and of the resolvent differences.

    Parameters
    ----------
    seq : VerblunskySequence
        The unperturbed window.
    k0 : int
        Interior site whose block is replaced.
    gamma1, gamma2 : unitary m x m
        The decoupling pair.
    z_samples : iterable of complex, optional
        Points off the unit circle and away from 0; defaults to eight
        points on |z| in {0.5, 2}.
    rtol : float
        Relative singular value threshold for rank decisions.
    """
    block = local_block(seq, k0, gamma1, gamma2)
    singular_values = np.linalg.svd(block, compute_uv=False)
    full = assemble(seq)
    split = assemble_split(seq, SplitSpec(k0=k0, gamma_left=gamma1, gamma_right=gamma2))
    op_rank = numerical_rank(full.U - split.U, rtol)
    if z_samples is None:
        z_samples = default_z_samples()
    resolvent_ranks = {}
    for z in z_samples:
        z = require_off_circle(z)
        diff = _resolvent(full.U, z) - _resolvent(split.U, z)
        resolvent_ranks[z] = numerical_rank(diff, rtol)
    return DecouplingReport(
        local_block=block,
        singular_values=singular_values,
        op_rank=op_rank,
        resolvent_ranks=resolvent_ranks,
        minimal=(op_rank == seq.m),
    )
