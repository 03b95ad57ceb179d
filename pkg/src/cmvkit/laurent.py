"""Transfer matrices and polynomial solution families.

The eigenvalue difference equation for the five-diagonal operator is
equivalent to a two-term recursion: stacked pairs (X(k); Y(k)) of m x m
matrices move one site via a parity-dependent 2m x 2m transfer matrix.
Seeding the recursion at a reference site k0 with initial values built
from a unitary gamma produces two families per sign, conventionally
written P, R (first kind) and Q, S (second kind). Their values are
Laurent polynomials in z.

This module provides the transfer matrices and their explicit inverses,
seed construction, propagation across a window, the connection
coefficients relating families with different gamma or different sign,
and residual checks for the quadratic and conjugation identities.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import NamedTuple

import numpy as np

from .coefficients import (
    NotContractive,
    NotUnitary,
    VerblunskySequence,
    _as_square,
    defect_matrices,
    is_unitary,
    principal_unitary_sqrt,
)
from .errors import require_nonzero

PLUS = 1
MINUS = -1


class PathLeavesWindow(ValueError):
    """Propagation would need a coefficient outside the window interior."""


class MatrixCaseUnsupported(ValueError):
    """This check is defined for scalar (m = 1) data only."""


@dataclass(frozen=True)
class TransferMatrix:
    """One-step propagator of solution pairs at site k."""

    value: np.ndarray
    k: int
    z: complex


def _norm_sign(sign) -> int:
    if sign in (PLUS, MINUS):
        return sign
    if sign in ("+", "plus"):
        return PLUS
    if sign in ("-", "minus"):
        return MINUS
    raise ValueError(f"sign must be +1/-1 or '+'/'-', got {sign!r}")


def _interior_alpha(seq: VerblunskySequence, k: int) -> np.ndarray:
    if not seq.k_min < k < seq.k_max:
        raise PathLeavesWindow(
            f"transfer at site {k} needs a contractive coefficient, "
            f"window is [{seq.k_min}, {seq.k_max}]"
        )
    return seq.alpha(k)


def transfer(seq: VerblunskySequence, z, k: int) -> TransferMatrix:
    """Transfer matrix T(z, k) moving a solution pair from k-1 to k.

    Odd k:  [[rt^-1 a, z rt^-1], [z^-1 r^-1, r^-1 a*]]
    Even k: [[r^-1 a*, r^-1], [rt^-1, rt^-1 a]]

    with a = alpha_k, r = rho_k, rt = rho_tilde_k.
    """
    z = require_nonzero(z)
    alpha = _interior_alpha(seq, k)
    d = defect_matrices(alpha)
    ri = np.linalg.inv(d.rho)
    rti = np.linalg.inv(d.rho_tilde)
    m = alpha.shape[0]
    T = np.zeros((2 * m, 2 * m), dtype=complex)
    if k % 2 == 1:
        T[:m, :m] = rti @ alpha
        T[:m, m:] = z * rti
        T[m:, :m] = ri / z
        T[m:, m:] = ri @ alpha.conj().T
    else:
        T[:m, :m] = ri @ alpha.conj().T
        T[:m, m:] = ri
        T[m:, :m] = rti
        T[m:, m:] = rti @ alpha
    return TransferMatrix(value=T, k=k, z=z)


def transfer_inverse(seq: VerblunskySequence, z, k: int) -> TransferMatrix:
    """Explicit inverse of transfer(seq, z, k), no solve involved.

    Odd k:  [[-r^-1 a*, z r^-1], [z^-1 rt^-1, -rt^-1 a]]
    Even k: [[-rt^-1 a, rt^-1], [r^-1, -r^-1 a*]]
    """
    z = require_nonzero(z)
    alpha = _interior_alpha(seq, k)
    d = defect_matrices(alpha)
    ri = np.linalg.inv(d.rho)
    rti = np.linalg.inv(d.rho_tilde)
    m = alpha.shape[0]
    T = np.zeros((2 * m, 2 * m), dtype=complex)
    if k % 2 == 1:
        T[:m, :m] = -ri @ alpha.conj().T
        T[:m, m:] = z * ri
        T[m:, :m] = rti / z
        T[m:, m:] = -rti @ alpha
    else:
        T[:m, :m] = -rti @ alpha
        T[:m, m:] = rti
        T[m:, :m] = ri
        T[m:, m:] = -ri @ alpha.conj().T
    return TransferMatrix(value=T, k=k, z=z)


class FamilySite(NamedTuple):
    P: np.ndarray
    R: np.ndarray
    Q: np.ndarray
    S: np.ndarray


@dataclass(frozen=True)
class SolutionFamily:
    """Values of the four letters P, R, Q, S over a run of sites.

    Arrays have shape (n_sites, m, m) with site k stored at index
    k - k_lo. The U-components are P and Q, the V-components R and S;
    (P(k); R(k)) and (Q(k); S(k)) both satisfy the transfer recursion.
    """

    sign: int
    z: complex
    gamma: np.ndarray
    gamma_sqrt: np.ndarray
    k0: int
    k_lo: int
    P: np.ndarray
    R: np.ndarray
    Q: np.ndarray
    S: np.ndarray

    @property
    def m(self) -> int:
        return self.P.shape[1]

    @property
    def k_hi(self) -> int:
        return self.k_lo + self.P.shape[0] - 1

    def covers(self, k: int) -> bool:
        return self.k_lo <= k <= self.k_hi

    def at(self, k: int) -> FamilySite:
        if not self.covers(k):
            raise KeyError(f"site {k} not covered, family spans "
                           f"[{self.k_lo}, {self.k_hi}]")
        i = k - self.k_lo
        return FamilySite(P=self.P[i], R=self.R[i], Q=self.Q[i], S=self.S[i])


def seed_family(gamma, z, k0: int, sign, gamma_sqrt=None) -> SolutionFamily:
    """Single-site family holding the initial values at k0.

    Plus sign, odd k0:  P = z g, R = g*; Q = z g, S = -g*
    Plus sign, even k0: P = g*, R = g; Q = -g*, S = g
    Minus sign, odd k0:  P = g, R = -g*; Q = g, S = g*
    Minus sign, even k0: P = -z g*, R = g; Q = z g*, S = g

    where g is the unitary square root of gamma (principal by default,
    overridable through gamma_sqrt) and g* doubles as gamma^{-1/2}.
    """
    z = require_nonzero(z)
    sign = _norm_sign(sign)
    gamma = _as_square(gamma)
    if not is_unitary(gamma):
        raise NotUnitary("seed construction needs a unitary gamma")
    if gamma_sqrt is None:
        gh = principal_unitary_sqrt(gamma)
    else:
        gh = _as_square(gamma_sqrt)
        if not is_unitary(gh) or not np.allclose(gh @ gh, gamma, atol=1e-10):
            raise NotUnitary("gamma_sqrt must be a unitary square root of gamma")
    ghi = gh.conj().T
    if sign == PLUS:
        if k0 % 2 == 1:
            vals = (z * gh, ghi, z * gh, -ghi)
        else:
            vals = (ghi, gh, -ghi, gh)
    else:
        if k0 % 2 == 1:
            vals = (gh, -ghi, gh, ghi)
        else:
            vals = (-z * ghi, gh, z * ghi, gh)
    P, R, Q, S = (v[None, :, :].astype(complex) for v in vals)
    return SolutionFamily(sign=sign, z=z, gamma=gamma, gamma_sqrt=gh,
                          k0=k0, k_lo=k0, P=P, R=R, Q=Q, S=S)


def propagate(seq: VerblunskySequence, family: SolutionFamily,
              k_target: int) -> SolutionFamily:
    """Extend a family so that it covers k_target.

    Moves forward with transfer matrices and backward with their
    explicit inverses; already-covered sites are kept as stored.
    """
    if not seq.k_min <= k_target <= seq.k_max - 1:
        raise PathLeavesWindow(
            f"target site {k_target} outside [{seq.k_min}, {seq.k_max - 1}]"
        )
    if family.covers(k_target):
        return family
    m = family.m
    new_lo = min(family.k_lo, k_target)
    new_hi = max(family.k_hi, k_target)
    n = new_hi - new_lo + 1
    P = np.zeros((n, m, m), dtype=complex)
    R = np.zeros_like(P)
    Q = np.zeros_like(P)
    S = np.zeros_like(P)
    off = family.k_lo - new_lo
    span = family.P.shape[0]
    P[off:off + span] = family.P
    R[off:off + span] = family.R
    Q[off:off + span] = family.Q
    S[off:off + span] = family.S

    def step(T, X, Y):
        top = T[:m, :m] @ X + T[:m, m:] @ Y
        bot = T[m:, :m] @ X + T[m:, m:] @ Y
        return top, bot

    for k in range(family.k_hi + 1, new_hi + 1):
        T = transfer(seq, family.z, k).value
        i = k - new_lo
        P[i], R[i] = step(T, P[i - 1], R[i - 1])
        Q[i], S[i] = step(T, Q[i - 1], S[i - 1])
    for k in range(family.k_lo, new_lo, -1):
        Ti = transfer_inverse(seq, family.z, k).value
        i = k - 1 - new_lo
        P[i], R[i] = step(Ti, P[i + 1], R[i + 1])
        Q[i], S[i] = step(Ti, Q[i + 1], S[i + 1])
    return replace(family, k_lo=new_lo, P=P, R=R, Q=Q, S=S)


def window_family(seq: VerblunskySequence, gamma, z, k0: int, sign,
                  gamma_sqrt=None) -> SolutionFamily:
    """Seed at k0 and propagate over all sites of the window."""
    fam = seed_family(gamma, z, k0, sign, gamma_sqrt=gamma_sqrt)
    fam = propagate(seq, fam, seq.k_min)
    return propagate(seq, fam, seq.k_max - 1)


@dataclass(frozen=True)
class ConnectionCoefficients:
    """Right-multiplication coefficients relating two seed choices.

    C1/D1 map between same-sign families with boundary unitaries gamma1
    and gamma2; C3/D3/C4/D4 map the plus family referenced at k0 to the
    minus family referenced at k0 - 1. The z-dependent pair C2/D2
    (plus to minus at equal reference site) is exposed as methods since
    it also carries a z^(k0 mod 2) prefactor.
    """

    C1: np.ndarray
    D1: np.ndarray
    C3: np.ndarray
    D3: np.ndarray
    C4: np.ndarray
    D4: np.ndarray
    parity: int
    g1_sqrt: np.ndarray
    g2_sqrt: np.ndarray

    def c2(self, z) -> np.ndarray:
        z = require_nonzero(z)
        g1h, g2h = self.g1_sqrt, self.g2_sqrt
        pref = 2.0 * z ** self.parity
        return (g1h.conj().T @ g2h - z * g1h @ g2h.conj().T) / pref

    def d2(self, z) -> np.ndarray:
        z = require_nonzero(z)
        g1h, g2h = self.g1_sqrt, self.g2_sqrt
        pref = 2.0 * z ** self.parity
        return (g1h.conj().T @ g2h + z * g1h @ g2h.conj().T) / pref


def connection(gamma1, gamma2, alpha_k0, k0: int,
               gamma1_sqrt=None, gamma2_sqrt=None) -> ConnectionCoefficients:
    """Connection coefficients for families seeded at k0.

    Args:
        gamma1, gamma2: unitary boundary matrices of the two families.
        alpha_k0: the contractive coefficient at the reference site,
            used by the cross-site pairs C3/D3/C4/D4.
        k0: reference site; only its parity enters (through c2/d2).
        gamma1_sqrt, gamma2_sqrt: optional square-root overrides, which
            must match the roots used when seeding the families.

    Returns:
        ConnectionCoefficients with C1, D1, C3, D3, C4, D4 as fields
        and c2(z), d2(z) as methods.
    """
    g1 = _as_square(gamma1)
    g2 = _as_square(gamma2)
    if not (is_unitary(g1) and is_unitary(g2)):
        raise NotUnitary("connection coefficients need unitary gammas")
    g1h = principal_unitary_sqrt(g1) if gamma1_sqrt is None else _as_square(gamma1_sqrt)
    g2h = principal_unitary_sqrt(g2) if gamma2_sqrt is None else _as_square(gamma2_sqrt)
    g1i = g1h.conj().T
    g2i = g2h.conj().T
    alpha = _as_square(alpha_k0)
    d = defect_matrices(alpha)
    ri = np.linalg.inv(d.rho)
    rti = np.linalg.inv(d.rho_tilde)

    C1 = (g1i @ g2h + g1h @ g2i) / 2.0
    D1 = (g1i @ g2h - g1h @ g2i) / 2.0

    X1 = g1i @ rti @ alpha @ g2i
    X2 = g1h @ ri @ alpha.conj().T @ g2h
    X3 = g1i @ rti @ g2h
    X4 = g1h @ ri @ g2i
    C3 = ((X1 - X2) + (X3 - X4)) / 2.0
    D3 = ((X1 + X2) + (X3 + X4)) / 2.0
    C4 = (-(X1 + X2) + (X3 + X4)) / 2.0
    D4 = (-(X1 - X2) + (X3 - X4)) / 2.0
    return ConnectionCoefficients(C1=C1, D1=D1, C3=C3, D3=D3, C4=C4, D4=D4,
                                  parity=k0 % 2, g1_sqrt=g1h, g2_sqrt=g2h)


def _check_pair(fam: SolutionFamily, fam_conj: SolutionFamily):
    want = 1.0 / np.conj(fam.z)
    if abs(fam_conj.z - want) > 1e-12 * max(1.0, abs(want)):
        raise ValueError(
            f"second family must be evaluated at 1/conj(z) = {want}, "
            f"got {fam_conj.z}"
        )
    if fam.sign != fam_conj.sign or fam.k0 != fam_conj.k0:
        raise ValueError("paired families must share sign and reference site")
    if not np.allclose(fam.gamma_sqrt, fam_conj.gamma_sqrt, atol=1e-12):
        raise ValueError("paired families must use the same gamma square root")


def _rel(residual: float, *scales: float) -> float:
    return residual / max(1.0, *scales)


def quadratic_identities(pair_plus, pair_minus, k: int) -> dict:
    """Residuals of the four bilinear identities at site k.

    Each argument is a tuple (family at z, family at 1/conj(z)) of one
    sign. With A* denoting the conjugate transpose of the value at
    1/conj(z), the identities are

        P A(Q)* + Q A(P)* = 2 (-1)^(k+1) I
        R A(S)* + S A(R)* = 2 (-1)^k I
        P A(S)* + Q A(R)* = 0
        R A(Q)* + S A(P)* = 0

    Returns a dict of relative residuals keyed like "PQ+", "RS-".
    """
    out = {}
    for label, (fam, fam_conj) in (("+", pair_plus), ("-", pair_minus)):
        _check_pair(fam, fam_conj)
        a = fam.at(k)
        b = fam_conj.at(k)
        eye = np.eye(fam.m)
        sgn = -1.0 if k % 2 == 0 else 1.0
        t1, t2 = a.P @ b.Q.conj().T, a.Q @ b.P.conj().T
        out["PQ" + label] = _rel(
            np.linalg.norm(t1 + t2 - 2.0 * sgn * eye),
            np.linalg.norm(t1), np.linalg.norm(t2))
        t1, t2 = a.R @ b.S.conj().T, a.S @ b.R.conj().T
        out["RS" + label] = _rel(
            np.linalg.norm(t1 + t2 + 2.0 * sgn * eye),
            np.linalg.norm(t1), np.linalg.norm(t2))
        t1, t2 = a.P @ b.S.conj().T, a.Q @ b.R.conj().T
        out["PS" + label] = _rel(np.linalg.norm(t1 + t2),
                                 np.linalg.norm(t1), np.linalg.norm(t2))
        t1, t2 = a.R @ b.Q.conj().T, a.S @ b.P.conj().T
        out["RQ" + label] = _rel(np.linalg.norm(t1 + t2),
                                 np.linalg.norm(t1), np.linalg.norm(t2))
    return out


def conjugation_symmetry(pair, k: int) -> dict:
    """Scalar-only residuals tying R, S at z to P, Q at 1/conj(z).

    For the plus family with p = k0 mod 2:

        r(z, k) = z^p conj(p(1/conj(z), k))
        s(z, k) = -z^p conj(q(1/conj(z), k))

    and for the minus family with e = (k0 + 1) mod 2 the same relations
    with both right-hand signs flipped. Returns relative residuals
    keyed "R" and "S".
    """
    fam, fam_conj = pair
    if fam.m != 1:
        raise MatrixCaseUnsupported("conjugation symmetry applies to m = 1 only")
    _check_pair(fam, fam_conj)
    a = fam.at(k)
    b = fam_conj.at(k)
    z = fam.z
    if fam.sign == PLUS:
        w = z ** (fam.k0 % 2)
        pred_r = w * np.conj(b.P[0, 0])
        pred_s = -w * np.conj(b.Q[0, 0])
    else:
        w = z ** ((fam.k0 + 1) % 2)
        pred_r = -w * np.conj(b.P[0, 0])
        pred_s = w * np.conj(b.Q[0, 0])
    return {
        "R": _rel(abs(a.R[0, 0] - pred_r), abs(a.R[0, 0]), abs(pred_r)),
        "S": _rel(abs(a.S[0, 0] - pred_s), abs(a.S[0, 0]), abs(pred_s)),
    }
