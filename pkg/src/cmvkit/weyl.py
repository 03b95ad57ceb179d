"""Half-lattice m-functions, M-functions, and Schur transforms.

The m-function of a half-window operator at its reference site k0 is

    m(z) = +/- E* (U_h + z)(U_h - z)^{-1} E

with E the coordinate injection at k0. The plus operator lives on sites
[k0, k_max - 1] with the boundary unitary gamma installed at k0; the
minus operator lives on [k_min, k0] with gamma installed at k0 + 1.

M_plus coincides with m_plus. M_minus is a Cayley-type transform of
m_minus; both directions of that transform, its z = 0 closed form, the
Schur-function maps, and the parity formula expressing the Schur
function through Weyl solution values are provided, each as its own
code path so they can be checked against one another.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .assembly import assemble
from .coefficients import VerblunskySequence, _as_square, principal_unitary_sqrt
from .errors import (
    SingularFactor,
    SingularSolutionValue,
    SingularSolve,
    require_nonzero,
    require_off_circle,
)
from .laurent import (
    MINUS,
    PLUS,
    _norm_sign,
    connection,
    propagate,
    seed_family,
    window_family,
)


def _lsolve(A: np.ndarray, B: np.ndarray, err=SingularFactor) -> np.ndarray:
    """A^{-1} B with a typed failure."""
    try:
        out = np.linalg.solve(A, B)
    except np.linalg.LinAlgError as exc:
        raise err("matrix factor is singular") from exc
    if not np.all(np.isfinite(out)):
        raise err("matrix factor is numerically singular")
    return out


def _rsolve(A: np.ndarray, B: np.ndarray, err=SingularFactor) -> np.ndarray:
    """A B^{-1} with a typed failure."""
    return _lsolve(B.T, A.T, err=err).T


def half_window_sequence(seq: VerblunskySequence, k0: int, gamma,
                         sign) -> VerblunskySequence:
    """Coefficient window realizing the half-lattice operator.

    Sign +: [k0, k_max] with alpha_k0 := gamma (sites k0 .. k_max - 1).
    Sign -: [k_min, k0 + 1] with alpha_{k0+1} := gamma (sites up to k0).
    """
    if _norm_sign(sign) == PLUS:
        return seq.restrict(k0, seq.k_max, left=gamma)
    return seq.restrict(seq.k_min, k0 + 1, right=gamma)


def m_function(seq: VerblunskySequence, k0: int, gamma, z, sign,
               gamma_sqrt=None) -> np.ndarray:
    """Half-lattice m-function at the reference site, by dense solves.

    The raw resolvent sandwich +/- E*(U_h + z)(U_h - z)^{-1} E carries the
    boundary unitary in a frame that differs from the Laurent families by
    a one-sided square root of gamma.  To keep every downstream identity
    (boundary matching, Green kernels, Wronskians) in a single convention,
    the raw value is conjugated back into the family frame before being
    returned.  For scalar gamma, and whenever gamma commutes with its own
    square root sandwich, the conjugation is invisible.

    Parameters
    ----------
    seq : VerblunskySequence
        Full window; the relevant half is carved out internally.
    k0 : int
        Reference site.
    gamma : unitary m x m
        Boundary unitary installed at the cut.
    z : complex
        Off the unit circle; z = 0 is allowed and returns +/- identity.
    sign : +1 or -1
    gamma_sqrt : optional m x m
        Square root of gamma to use for the frame change; the principal
        root is taken when omitted.  Pass the same root used to seed any
        Laurent family this value will be compared against.

    Returns
    -------
    The m x m matrix-valued m-function in the family frame.
    """
    sign = _norm_sign(sign)
    z = require_off_circle(z, allow_zero=True)
    half = half_window_sequence(seq, k0, gamma, sign)
    ops = assemble(half)
    n = ops.U.shape[0]
    E = np.zeros((n, seq.m), dtype=complex)
    E[ops.site_slice(k0)] = np.eye(seq.m)
    X = _lsolve(ops.U - z * np.eye(n), E, err=SingularSolve)
    raw = float(sign) * (E.conj().T @ (ops.U @ X + z * X))
    gh = principal_unitary_sqrt(gamma) if gamma_sqrt is None else np.asarray(
        gamma_sqrt, dtype=complex)
    ghi = gh.conj().T
    if k0 % 2 == 0:
        return gh @ raw @ ghi
    return ghi @ raw @ gh


def m_from_edge_condition(seq: VerblunskySequence, k0: int, gamma, z, sign,
                          gamma_sqrt=None) -> np.ndarray:
    """Same m-function, computed by matching the far boundary instead.

    The solution Q + P m must be proportional to its V-component through
    the edge unitary of the half-window; solving that linear condition
    for m gives a route with no resolvent in it.
    """
    sign = _norm_sign(sign)
    z = require_nonzero(z)
    fam = seed_family(gamma, z, k0, sign, gamma_sqrt=gamma_sqrt)
    if sign == PLUS:
        k_edge = seq.k_max - 1
        g = seq.alpha(seq.k_max)
        C = -g if k_edge % 2 == 1 else -z * g.conj().T
    else:
        k_edge = seq.k_min
        g = seq.alpha(seq.k_min)
        C = z * g if k_edge % 2 == 1 else g.conj().T
    fam = propagate(seq, fam, k_edge)
    site = fam.at(k_edge)
    A = site.P - C @ site.R
    B = C @ site.S - site.Q
    return _lsolve(A, B)


def M_minus_from_m_minus(m_minus: np.ndarray, z) -> np.ndarray:
    """Transform the minus m-function into M_minus at the same site.

    M = [(m + I) - z(m - I)] [(m + I) + z(m - I)]^{-1}; the two factors
    commute, so the quotient may be taken on either side.
    """
    z = complex(z)
    m = _as_square(m_minus)
    eye = np.eye(m.shape[0])
    num = (m + eye) - z * (m - eye)
    den = (m + eye) + z * (m - eye)
    return _rsolve(num, den)


def m_minus_from_M_minus(M_minus: np.ndarray, z) -> np.ndarray:
    """Inverse transform: m = [z(M + I) - (M - I)] [z(M + I) + (M - I)]^{-1}."""
    z = complex(z)
    M = _as_square(M_minus)
    eye = np.eye(M.shape[0])
    num = z * (M + eye) - (M - eye)
    den = z * (M + eye) + (M - eye)
    return _rsolve(num, den)


def M_minus_via_connection(seq: VerblunskySequence, k0: int, gamma, z,
                           gamma_sqrt=None) -> np.ndarray:
    """M_minus from the connection coefficients and m_minus one site down.

    M_minus(z, k0) = [D3 + D4 m][C3 + C4 m]^{-1} with m = m_minus(z, k0 - 1),
    the m-function of the summand left of the cut at k0. Independent of
    the Cayley-type route, so the two can be compared.
    """
    z = require_off_circle(z, allow_zero=True)
    mm = m_function(seq, k0 - 1, gamma, z, MINUS)
    cc = connection(gamma, gamma, seq.alpha(k0), k0,
                    gamma1_sqrt=gamma_sqrt, gamma2_sqrt=gamma_sqrt)
    return _rsolve(cc.D3 + cc.D4 @ mm, cc.C3 + cc.C4 @ mm)


def M_minus_at_zero(alpha_k0, gamma, gamma_sqrt=None) -> np.ndarray:
    """Closed form of M_minus(0) from the coefficient at the cut.

    Equals (D3 - D4)(C3 - C4)^{-1}, which the connection formulas give
    once m_minus(0) = -I is inserted; no window data is needed.
    """
    cc = connection(gamma, gamma, alpha_k0, 0,
                    gamma1_sqrt=gamma_sqrt, gamma2_sqrt=gamma_sqrt)
    return _rsolve(cc.D3 - cc.D4, cc.C3 - cc.C4)


def M_function(seq: VerblunskySequence, k0: int, gamma, z, sign,
               gamma_sqrt=None) -> np.ndarray:
    """M_plus or M_minus at the reference site.

    Plus: identical to m_plus. Minus: Cayley-type transform of m_minus,
    except at z = 0 where the transform degenerates and the closed form
    takes over.
    """
    sign = _norm_sign(sign)
    if sign == PLUS:
        return m_function(seq, k0, gamma, z, PLUS, gamma_sqrt=gamma_sqrt)
    z = require_off_circle(z, allow_zero=True)
    if z == 0:
        return M_minus_at_zero(seq.alpha(k0), gamma, gamma_sqrt=gamma_sqrt)
    mm = m_function(seq, k0, gamma, z, MINUS, gamma_sqrt=gamma_sqrt)
    return M_minus_from_m_minus(mm, z)


def schur_from_M(M: np.ndarray) -> np.ndarray:
    """Cayley transform Phi = (M - I)(M + I)^{-1}."""
    M = _as_square(M)
    eye = np.eye(M.shape[0])
    return _rsolve(M - eye, M + eye)


def M_from_schur(phi: np.ndarray) -> np.ndarray:
    """Inverse Cayley transform M = (I - Phi)^{-1}(I + Phi)."""
    phi = _as_square(phi)
    eye = np.eye(phi.shape[0])
    return _lsolve(eye - phi, eye + phi)


def m_minus_from_schur_minus(phi_minus: np.ndarray, z) -> np.ndarray:
    """m_minus = (z I + Phi_minus)^{-1} (z I - Phi_minus)."""
    z = complex(z)
    phi = _as_square(phi_minus)
    eye = np.eye(phi.shape[0])
    return _lsolve(z * eye + phi, z * eye - phi)


def schur_gamma_conjugation(phi1: np.ndarray, g1_sqrt: np.ndarray,
                            g2_sqrt: np.ndarray) -> np.ndarray:
    """Rewrite a Schur function from boundary gamma1 to gamma2.

    Phi2 = g2^{1/2} g1^{-1/2} Phi1 g1^{-1/2} g2^{1/2}.
    """
    left = g2_sqrt @ g1_sqrt.conj().T
    right = g1_sqrt.conj().T @ g2_sqrt
    return left @ phi1 @ right


def M_gamma_transform(M1: np.ndarray, g1_sqrt: np.ndarray,
                      g2_sqrt: np.ndarray) -> np.ndarray:
    """Rewrite an M-function from boundary gamma1 to gamma2.

    With A = g2^{-1/2} g1^{1/2} + g2^{1/2} g1^{-1/2} and
    B = g2^{-1/2} g1^{1/2} - g2^{1/2} g1^{-1/2}:

        M2 = (A M1 + B)(B M1 + A)^{-1}.
    """
    A = g2_sqrt.conj().T @ g1_sqrt + g2_sqrt @ g1_sqrt.conj().T
    B = g2_sqrt.conj().T @ g1_sqrt - g2_sqrt @ g1_sqrt.conj().T
    return _rsolve(A @ M1 + B, B @ M1 + A)


@dataclass(frozen=True)
class WeylSolution:
    """Per-site values of one Weyl solution over the window.

    U(k) = Q_plus(k) + P_plus(k) M and V(k) = S_plus(k) + R_plus(k) M,
    both seeded at k0; M is M_plus or M_minus according to sign.
    """

    sign: int
    z: complex
    gamma: np.ndarray
    k0: int
    M: np.ndarray
    k_lo: int
    U: np.ndarray
    V: np.ndarray

    @property
    def m(self) -> int:
        return self.U.shape[1]

    @property
    def k_hi(self) -> int:
        return self.k_lo + self.U.shape[0] - 1

    def at(self, k: int):
        if not self.k_lo <= k <= self.k_hi:
            raise KeyError(f"site {k} outside [{self.k_lo}, {self.k_hi}]")
        i = k - self.k_lo
        return self.U[i], self.V[i]


def weyl_solution(seq: VerblunskySequence, k0: int, gamma, z, sign,
                  gamma_sqrt=None) -> WeylSolution:
    """Weyl solution of the given sign over the whole window.

    The plus solution satisfies the right-edge relation at k_max - 1,
    the minus solution the left-edge relation at k_min; both emerge
    from the plus-seeded polynomial families combined with M.
    """
    sign = _norm_sign(sign)
    z = require_off_circle(z)
    M = M_function(seq, k0, gamma, z, sign, gamma_sqrt=gamma_sqrt)
    fam = window_family(seq, gamma, z, k0, PLUS, gamma_sqrt=gamma_sqrt)
    U = fam.Q + fam.P @ M
    V = fam.S + fam.R @ M
    return WeylSolution(sign=sign, z=z, gamma=fam.gamma, k0=k0, M=M,
                        k_lo=fam.k_lo, U=U, V=V)


def schur_parity_formula(seq: VerblunskySequence, k0: int, gamma, z, k: int,
                         sign, gamma_sqrt=None) -> np.ndarray:
    """Schur function from Weyl solution values at one site.

    Odd k:  Phi = z g^{1/2} V(k) U(k)^{-1} g^{1/2}
    Even k: Phi = g^{1/2} U(k) V(k)^{-1} g^{1/2}

    At k = k0 this reproduces the Cayley transform of M.
    """
    sol = weyl_solution(seq, k0, gamma, z, sign, gamma_sqrt=gamma_sqrt)
    Uk, Vk = sol.at(k)
    fam_seed = seed_family(gamma, sol.z, k0, PLUS, gamma_sqrt=gamma_sqrt)
    gh = fam_seed.gamma_sqrt
    if k % 2 == 1:
        core = _rsolve(Vk, Uk, err=SingularSolutionValue)
        return sol.z * (gh @ core @ gh)
    core = _rsolve(Uk, Vk, err=SingularSolutionValue)
    return gh @ core @ gh


@dataclass(frozen=True)
class SpectralSample:
    """All six spectral functions at one z, with validity flags.

    Flags encode the disk-side conventions: inside the unit disk the
    plus data should be Caratheodory/Schur and the minus data their
    anti counterparts; outside the disk the roles flip.
    """

    z: complex
    m_plus: np.ndarray
    m_minus: np.ndarray
    M_plus: np.ndarray
    M_minus: np.ndarray
    Phi_plus: np.ndarray
    Phi_minus: np.ndarray
    caratheodory_plus: bool
    anti_caratheodory_minus: bool
    schur_plus: bool
    anti_schur_minus: bool


def _herm_eigs(F: np.ndarray) -> np.ndarray:
    return np.linalg.eigvalsh((F + F.conj().T) / 2.0)


def spectral_sample(seq: VerblunskySequence, k0: int, gamma, z,
                    tol: float = 1e-10, gamma_sqrt=None) -> SpectralSample:
    """Evaluate m, M, and Phi for both signs at one point."""
    z = require_off_circle(z, allow_zero=True)
    mp = m_function(seq, k0, gamma, z, PLUS, gamma_sqrt=gamma_sqrt)
    mm = m_function(seq, k0, gamma, z, MINUS, gamma_sqrt=gamma_sqrt)
    Mp = mp
    if z == 0:
        Mm = M_minus_at_zero(seq.alpha(k0), gamma, gamma_sqrt=gamma_sqrt)
    else:
        Mm = M_minus_from_m_minus(mm, z)
    phip = schur_from_M(Mp)
    phim = schur_from_M(Mm)
    inside = abs(z) < 1.0
    eig_p = _herm_eigs(mp)
    eig_m = _herm_eigs(mm)
    norm_p = np.linalg.norm(phip, 2)
    smin_m = np.linalg.svd(phim, compute_uv=False)[-1]
    if inside:
        flags = (eig_p.min() >= -tol, eig_m.max() <= tol,
                 norm_p <= 1.0 + tol, smin_m >= 1.0 - tol)
    else:
        flags = (eig_p.max() <= tol, eig_m.min() >= -tol,
                 norm_p >= 1.0 - tol, smin_m <= 1.0 + tol)
    return SpectralSample(
        z=z, m_plus=mp, m_minus=mm, M_plus=Mp, M_minus=Mm,
        Phi_plus=phip, Phi_minus=phim,
        caratheodory_plus=bool(flags[0]),
        anti_caratheodory_minus=bool(flags[1]),
        schur_plus=bool(flags[2]),
        anti_schur_minus=bool(flags[3]),
    )
