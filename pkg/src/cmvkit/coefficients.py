"""Verblunsky coefficient sequences and their defect algebra.

A sequence assigns to each lattice index k an m x m coefficient alpha_k.
Interior coefficients are strict contractions (operator norm below one),
while the two window endpoints hold unitary matrices that close the window
off and keep every assembled operator exactly unitary.

The helpers here compute the positive defect matrices
rho = (I - alpha* alpha)^(1/2) and rho~ = (I - alpha alpha*)^(1/2),
the 2m x 2m orthogonal building block built from a single coefficient,
singular value factorizations, unitary square roots, and two-sided
unitary gauge transforms of whole sequences.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum

import numpy as np
import scipy.linalg

CONTRACTION_TOL = 1e-8
UNITARY_TOL = 1e-10


class NotContractive(ValueError):
    """Raised when a coefficient expected to be a strict contraction is not."""


class NotUnitary(ValueError):
    """Raised when a matrix expected to be unitary is not."""


class DimensionMismatch(ValueError):
    """Raised when matrix dimensions are inconsistent."""


class CoefficientKind(Enum):
    CONTRACTIVE = "contractive"
    UNITARY = "unitary"


def _as_square(value) -> np.ndarray:
    a = np.asarray(value, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix entries must be finite")
    return a


def operator_norm(a) -> float:
    """Largest singular value of a matrix."""
    return float(np.linalg.norm(np.asarray(a, dtype=complex), 2))


def is_contraction(alpha, tol: float = CONTRACTION_TOL) -> bool:
    """True when the operator norm stays at or below 1 - tol."""
    return operator_norm(alpha) <= 1.0 - tol


def is_unitary(g, tol: float = UNITARY_TOL) -> bool:
    g = np.asarray(g, dtype=complex)
    eye = np.eye(g.shape[0])
    return bool(np.linalg.norm(g.conj().T @ g - eye) <= tol)


@dataclass(frozen=True)
class VerblunskyCoefficient:
    """One coefficient together with its declared kind.

    value : complex m x m array
    kind  : CONTRACTIVE for interior sites, UNITARY for window endpoints
    """

    value: np.ndarray
    kind: CoefficientKind

    def __post_init__(self):
        v = _as_square(self.value)
        object.__setattr__(self, "value", v)
        if self.kind is CoefficientKind.CONTRACTIVE:
            if not is_contraction(v):
                raise NotContractive(
                    f"coefficient norm {operator_norm(v):.3e} exceeds "
                    f"{1.0 - CONTRACTION_TOL}"
                )
        else:
            if not is_unitary(v):
                raise NotUnitary("endpoint coefficient is not unitary")

    @property
    def m(self) -> int:
        return self.value.shape[0]


def contractive(value) -> VerblunskyCoefficient:
    return VerblunskyCoefficient(value, CoefficientKind.CONTRACTIVE)


def unitary(value) -> VerblunskyCoefficient:
    return VerblunskyCoefficient(value, CoefficientKind.UNITARY)


@dataclass(frozen=True)
class VerblunskySequence:
    """Contiguous window k_min..k_max of coefficients, unitary at both ends.

    The window of coefficients realizes an operator on the sites
    k_min..k_max-1; the endpoint unitaries close the two cut edges.
    """

    m: int
    k_min: int
    k_max: int
    alphas: dict

    def __post_init__(self):
        if self.k_max - self.k_min < 4:
            raise ValueError(
                f"coefficient window [{self.k_min}, {self.k_max}] is too short; "
                "need k_max - k_min >= 4"
            )
        for k in range(self.k_min, self.k_max + 1):
            if k not in self.alphas:
                raise ValueError(f"missing coefficient at site {k}")
            c = self.alphas[k]
            if not isinstance(c, VerblunskyCoefficient):
                raise TypeError(f"site {k}: expected VerblunskyCoefficient")
            if c.m != self.m:
                raise DimensionMismatch(
                    f"site {k}: block size {c.m} does not match m={self.m}"
                )
            boundary = k in (self.k_min, self.k_max)
            if boundary and c.kind is not CoefficientKind.UNITARY:
                raise NotUnitary(f"site {k}: window endpoint must be unitary")
            if not boundary and c.kind is not CoefficientKind.CONTRACTIVE:
                raise NotContractive(f"site {k}: interior coefficient must be contractive")

    def alpha(self, k: int) -> np.ndarray:
        return self.alphas[k].value

    def kind(self, k: int) -> CoefficientKind:
        return self.alphas[k].kind

    @property
    def n_sites(self) -> int:
        return self.k_max - self.k_min

    @property
    def sites(self) -> range:
        """Sites covered by the assembled operator."""
        return range(self.k_min, self.k_max)

    def replace(self, k: int, coeff: VerblunskyCoefficient) -> "VerblunskySequence":
        """New sequence with the coefficient at k swapped out."""
        alphas = dict(self.alphas)
        alphas[k] = coeff
        return VerblunskySequence(self.m, self.k_min, self.k_max, alphas)

    def restrict(self, k_lo: int, k_hi: int,
                 left=None, right=None) -> "VerblunskySequence":
        """Sub-window [k_lo, k_hi] with optional replacement endpoint unitaries.

        When an endpoint override is given it is installed at that end;
        otherwise the existing coefficient must already be unitary.
        """
        if not (self.k_min <= k_lo < k_hi <= self.k_max):
            raise ValueError(f"sub-window [{k_lo}, {k_hi}] leaves [{self.k_min}, {self.k_max}]")
        alphas = {k: self.alphas[k] for k in range(k_lo, k_hi + 1)}
        if left is not None:
            alphas[k_lo] = unitary(left)
        if right is not None:
            alphas[k_hi] = unitary(right)
        return VerblunskySequence(self.m, k_lo, k_hi, alphas)


def sequence_from_values(values: dict, m: int | None = None) -> VerblunskySequence:
    """Build a sequence from a plain {k: array-or-scalar} map.

    Endpoint entries are taken as unitary, everything else as contractive.
    Scalars are promoted to 1x1 matrices.
    """
    ks = sorted(values)
    k_min, k_max = ks[0], ks[-1]
    coerced = {k: np.atleast_2d(np.asarray(v, dtype=complex))
               for k, v in values.items()}
    if m is None:
        m = coerced[k_min].shape[0]
    alphas = {}
    for k in ks:
        if k in (k_min, k_max):
            alphas[k] = unitary(coerced[k])
        else:
            alphas[k] = contractive(coerced[k])
    return VerblunskySequence(m, k_min, k_max, alphas)


@dataclass(frozen=True)
class DefectPair:
    """Positive roots rho = (I - a* a)^(1/2) and rho_tilde = (I - a a*)^(1/2)."""

    rho: np.ndarray
    rho_tilde: np.ndarray


@dataclass(frozen=True)
class SumDiffPair:
    """The pair a = I + alpha and b = I - alpha."""

    a: np.ndarray
    b: np.ndarray


@dataclass(frozen=True)
class UnitaryFactorization:
    """Factorization alpha = sigma diag(beta) tau* with unitary sigma, tau."""

    sigma: np.ndarray
    beta: np.ndarray
    tau: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return self.sigma @ np.diag(self.beta) @ self.tau.conj().T


def _positive_root(h: np.ndarray) -> np.ndarray:
    """Positive square root of a Hermitian PSD matrix, clipping roundoff."""
    w, q = np.linalg.eigh(h)
    w = np.sqrt(np.clip(w, 0.0, None))
    return (q * w) @ q.conj().T


def _defects_raw(alpha: np.ndarray) -> DefectPair:
    eye = np.eye(alpha.shape[0])
    rho = _positive_root(eye - alpha.conj().T @ alpha)
    rho_tilde = _positive_root(eye - alpha @ alpha.conj().T)
    return DefectPair(rho=rho, rho_tilde=rho_tilde)


def defect_matrices(alpha, tol: float = CONTRACTION_TOL) -> DefectPair:
    """Both defect matrices of a strict contraction.

    Parameters
    ----------
    alpha : complex square array with operator norm below 1 - tol

    Returns
    -------
    DefectPair with positive definite rho and rho_tilde satisfying
    rho_tilde alpha = alpha rho.
    """
    a = _as_square(alpha)
    if not is_contraction(a, tol):
        raise NotContractive(
            f"norm {operator_norm(a):.6f} is not below {1.0 - tol}"
        )
    return _defects_raw(a)


def sum_diff_pair(alpha) -> SumDiffPair:
    a = _as_square(alpha)
    eye = np.eye(a.shape[0])
    return SumDiffPair(a=eye + a, b=eye - a)


def theta_block(alpha, defects: DefectPair | None = None) -> np.ndarray:
    """2m x 2m unitary block [[-alpha, rho~], [rho, alpha*]].

    Accepts unitary alpha as well, in which case both defects vanish and the
    block degenerates to diag(-alpha, alpha*).
    """
    a = _as_square(alpha)
    if defects is None:
        defects = _defects_raw(a)
    m = a.shape[0]
    if defects.rho.shape != (m, m) or defects.rho_tilde.shape != (m, m):
        raise DimensionMismatch("defect matrices do not match the coefficient size")
    out = np.empty((2 * m, 2 * m), dtype=complex)
    out[:m, :m] = -a
    out[:m, m:] = defects.rho_tilde
    out[m:, :m] = defects.rho
    out[m:, m:] = a.conj().T
    return out


def factorize_svd(alpha) -> UnitaryFactorization:
    """Singular value factorization alpha = sigma diag(beta) tau*.

    Singular values come in descending order. Within any group of equal
    singular values the left factor's columns are phase-normalized (first
    nonvanishing entry made real nonnegative) and the right factor follows,
    so repeated runs produce the same factors.
    """
    a = _as_square(alpha)
    u, s, vh = np.linalg.svd(a)
    v = vh.conj().T
    n = len(s)
    i = 0
    while i < n:
        j = i
        while j + 1 < n and abs(s[j + 1] - s[i]) <= 1e-12 * max(s[0], 1.0):
            j += 1
        if j > i:
            for c in range(i, j + 1):
                col = u[:, c]
                nz = np.flatnonzero(np.abs(col) > 1e-14)
                if len(nz):
                    ph = col[nz[0]] / abs(col[nz[0]])
                    u[:, c] = col / ph
                    v[:, c] = v[:, c] / ph
        i = j + 1
    return UnitaryFactorization(sigma=u, beta=s, tau=v)


def principal_unitary_sqrt(gamma, tol: float = UNITARY_TOL) -> np.ndarray:
    """Unitary square root with every eigenangle halved.

    Eigenvalues e^(i theta) with theta in (-pi, pi] map to e^(i theta / 2),
    so the result squares back to the input and stays unitary.
    """
    g = _as_square(gamma)
    if not is_unitary(g, tol):
        raise NotUnitary("input to the unitary square root must be unitary")
    t, q = scipy.linalg.schur(g, output="complex")
    angles = np.angle(np.diag(t))
    root = np.exp(0.5j * angles)
    return (q * root) @ q.conj().T


def gauge_transform(seq: VerblunskySequence, sigma, tau) -> VerblunskySequence:
    """Two-sided unitary gauge: every coefficient becomes sigma alpha_k tau*.

    Args:
        seq: source sequence.
        sigma: unitary left factor, m x m.
        tau: unitary right factor, m x m.

    Returns:
        The transformed sequence on the same window. Defect matrices
        transform by conjugation (rho by tau, rho_tilde by sigma), so
        contraction and unitarity of each site are preserved.
    """
    s = _as_square(sigma)
    t = _as_square(tau)
    if s.shape != (seq.m, seq.m) or t.shape != (seq.m, seq.m):
        raise DimensionMismatch("gauge factors must match the sequence block size")
    if not (is_unitary(s) and is_unitary(t)):
        raise NotUnitary("gauge factors must be unitary")
    alphas = {}
    for k in range(seq.k_min, seq.k_max + 1):
        alphas[k] = VerblunskyCoefficient(s @ seq.alpha(k) @ t.conj().T, seq.kind(k))
    return VerblunskySequence(seq.m, seq.k_min, seq.k_max, alphas)


def _matrix_to_json(a: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in a]


def _matrix_from_json(rows, where: str) -> np.ndarray:
    try:
        a = np.array([[complex(re, im) for re, im in row] for row in rows])
    except (TypeError, ValueError) as exc:
        raise ValueError(f"{where}: malformed matrix entries") from exc
    return a


def dump_sequence(seq: VerblunskySequence, fp) -> None:
    """Write a sequence as JSON to an open text file."""
    doc = {
        "m": seq.m,
        "k_min": seq.k_min,
        "k_max": seq.k_max,
        "alphas": {str(k): _matrix_to_json(seq.alpha(k))
                   for k in range(seq.k_min, seq.k_max + 1)},
    }
    json.dump(doc, fp, indent=1)


def save_sequence(seq: VerblunskySequence, path) -> None:
    with open(path, "w", encoding="utf-8") as fp:
        dump_sequence(seq, fp)


def parse_sequence(doc: dict) -> VerblunskySequence:
    """Validate and build a sequence from a decoded JSON document.

    Every violated invariant is reported with the offending site index.
    """
    try:
        m = int(doc["m"])
        k_min = int(doc["k_min"])
        k_max = int(doc["k_max"])
        alphas_doc = doc["alphas"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"coefficient document missing or malformed field: {exc}") from exc
    alphas = {}
    for k in range(k_min, k_max + 1):
        key = str(k)
        if key not in alphas_doc:
            raise ValueError(f"site {k}: coefficient missing")
        a = _matrix_from_json(alphas_doc[key], where=f"site {k}")
        if a.shape != (m, m):
            raise DimensionMismatch(f"site {k}: expected {m}x{m}, got {a.shape}")
        boundary = k in (k_min, k_max)
        try:
            alphas[k] = unitary(a) if boundary else contractive(a)
        except (NotUnitary, NotContractive) as exc:
            raise type(exc)(f"site {k}: {exc}") from exc
    return VerblunskySequence(m, k_min, k_max, alphas)


def load_sequence(path) -> VerblunskySequence:
    with open(path, "r", encoding="utf-8") as fp:
        doc = json.load(fp)
    return parse_sequence(doc)
