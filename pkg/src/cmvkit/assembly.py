"""Assembly of finite five-diagonal unitary operators.

The operator factors as U = V W where V and W are direct sums of 2m x 2m
blocks: V collects the blocks of even-indexed coefficients and W the odd
ones, each block occupying sites (j-1, j). At the two window edges the
unitary endpoint coefficients leave only their diagonal corners inside the
matrix, which keeps the finite V and W exactly unitary.

Also provided: the decoupled variant in which one block is replaced by
diag(-gamma_left, gamma_right*), severing the window into two independent
halves, and a matrix-free application of the five-term difference
expression for cross-checking rows of U.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .coefficients import (
    CoefficientKind,
    DimensionMismatch,
    NotUnitary,
    VerblunskySequence,
    _as_square,
    _defects_raw,
    is_unitary,
    theta_block,
)


class WindowTooSmall(ValueError):
    """Raised when a lattice window has fewer than four sites."""


class InvalidBoundary(ValueError):
    """Raised when a window endpoint coefficient is not unitary."""


class SplitOutOfWindow(ValueError):
    """Raised when a decoupling site does not sit inside the window."""


class InsufficientPadding(ValueError):
    """Raised when the input sequence does not cover the padded range."""


MAX_DENSE_ROWS = 512


@dataclass(frozen=True)
class LatticeWindow:
    """Finite slab of sites [k_min, k_max - 1] with block size m."""

    k_min: int
    k_max: int
    m: int

    def __post_init__(self):
        if self.k_max - self.k_min < 4:
            raise WindowTooSmall(
                f"window [{self.k_min}, {self.k_max}] has fewer than 4 sites"
            )
        if self.m * (self.k_max - self.k_min) > MAX_DENSE_ROWS:
            raise ValueError(
                f"dense storage limited to {MAX_DENSE_ROWS} rows, "
                f"requested {self.m * (self.k_max - self.k_min)}"
            )

    @classmethod
    def of(cls, seq: VerblunskySequence) -> "LatticeWindow":
        return cls(k_min=seq.k_min, k_max=seq.k_max, m=seq.m)

    @property
    def n_sites(self) -> int:
        return self.k_max - self.k_min


@dataclass(frozen=True)
class CmvOperatorSet:
    """Dense V, W and U = V W on a finite window.

    offset is the lattice index of block row zero; site k lives in block
    row k - offset.
    """

    V: np.ndarray
    W: np.ndarray
    U: np.ndarray
    offset: int
    m: int

    @property
    def n_sites(self) -> int:
        return self.U.shape[0] // self.m

    def site_slice(self, k: int) -> slice:
        i = k - self.offset
        if not 0 <= i < self.n_sites:
            raise IndexError(f"site {k} outside window starting at {self.offset}")
        return slice(i * self.m, (i + 1) * self.m)

    def block(self, k: int, kp: int) -> np.ndarray:
        """The m x m block U(k, k')."""
        return self.U[self.site_slice(k), self.site_slice(kp)]


@dataclass(frozen=True)
class SplitSpec:
    """Where to cut the window and which unitaries to install.

    The block of coefficient k0 is replaced by diag(-gamma_left,
    gamma_right*), so everything strictly below site k0 decouples from
    everything at and above it.
    """

    k0: int
    gamma_left: np.ndarray
    gamma_right: np.ndarray

    def __post_init__(self):
        gl = _as_square(self.gamma_left)
        gr = _as_square(self.gamma_right)
        object.__setattr__(self, "gamma_left", gl)
        object.__setattr__(self, "gamma_right", gr)
        if gl.shape != gr.shape:
            raise DimensionMismatch("split unitaries must share one size")
        if not (is_unitary(gl) and is_unitary(gr)):
            raise NotUnitary("split matrices must be unitary")


def _factor_matrices(seq: VerblunskySequence,
                     replace_k0: int | None = None,
                     replacement: tuple | None = None):
    """Build V (even blocks) and W (odd blocks), optionally replacing one block."""
    window = LatticeWindow.of(seq)
    m, n = seq.m, window.n_sites
    V = np.zeros((m * n, m * n), dtype=complex)
    W = np.zeros((m * n, m * n), dtype=complex)

    def row(k):
        return slice((k - seq.k_min) * m, (k - seq.k_min + 1) * m)

    for j in range(seq.k_min, seq.k_max + 1):
        target = V if j % 2 == 0 else W
        if replace_k0 is not None and j == replace_k0:
            gl, gr = replacement
            if j > seq.k_min:
                target[row(j - 1), row(j - 1)] = -gl
            if j < seq.k_max:
                target[row(j), row(j)] = gr.conj().T
            continue
        if j == seq.k_min:
            target[row(j), row(j)] = seq.alpha(j).conj().T
        elif j == seq.k_max:
            target[row(j - 1), row(j - 1)] = -seq.alpha(j)
        else:
            block = theta_block(seq.alpha(j))
            sl = slice((j - 1 - seq.k_min) * m, (j + 1 - seq.k_min) * m)
            target[sl, sl] = block
    return V, W


def assemble(seq: VerblunskySequence) -> CmvOperatorSet:
    """Dense V, W and U = V W for a coefficient window.

    Parameters
    ----------
    seq : VerblunskySequence
        Window with unitary endpoint coefficients.

    Returns
    -------
    CmvOperatorSet
        V and W are exactly unitary by construction; U is five-block
        diagonal with U(k, k') = 0 for |k - k'| > 2.
    """
    for k in (seq.k_min, seq.k_max):
        if seq.kind(k) is not CoefficientKind.UNITARY:
            raise InvalidBoundary(f"site {k}: endpoint coefficient must be unitary")
    V, W = _factor_matrices(seq)
    return CmvOperatorSet(V=V, W=W, U=V @ W, offset=seq.k_min, m=seq.m)


def assemble_split(seq: VerblunskySequence, spec: SplitSpec) -> CmvOperatorSet:
    """Assemble with the block at spec.k0 replaced by diag(-g1, g2*).

    The result is block diagonal across the cut between sites k0 - 1 and
    k0: rows below the cut never couple to columns at or above it.
    """
    if not (seq.k_min < spec.k0 <= seq.k_max):
        raise SplitOutOfWindow(
            f"split site {spec.k0} outside ({seq.k_min}, {seq.k_max}]"
        )
    if spec.gamma_left.shape != (seq.m, seq.m):
        raise DimensionMismatch("split unitaries must match the sequence block size")
    V, W = _factor_matrices(seq, replace_k0=spec.k0,
                            replacement=(spec.gamma_left, spec.gamma_right))
    return CmvOperatorSet(V=V, W=W, U=V @ W, offset=seq.k_min, m=seq.m)


def five_term_coefficients(seq: VerblunskySequence, k: int):
    """Coefficients of the difference expression at site k.

    Returns the five m x m matrices (c_mm, c_m, c_0, c_p, c_pp) so that
    (U phi)(k) = c_mm phi(k-2) + c_m phi(k-1) + c_0 phi(k)
               + c_p phi(k+1) + c_pp phi(k+2).
    Requires the coefficients alpha_{k-1} .. alpha_{k+2} inside the window.
    """
    if k - 1 < seq.k_min or k + 2 > seq.k_max:
        raise InsufficientPadding(
            f"site {k} needs coefficients {k - 1}..{k + 2} inside "
            f"[{seq.k_min}, {seq.k_max}]"
        )
    m = seq.m
    zero = np.zeros((m, m), dtype=complex)
    a_m1, a_0 = seq.alpha(k - 1), seq.alpha(k)
    a_p1, a_p2 = seq.alpha(k + 1), seq.alpha(k + 2)
    d_m1, d_0 = _defects_raw(a_m1), _defects_raw(a_0)
    d_p1, d_p2 = _defects_raw(a_p1), _defects_raw(a_p2)
    if k % 2 == 0:
        c_mm = d_0.rho @ d_m1.rho
        c_m = d_0.rho @ a_m1.conj().T
        c_0 = -a_0.conj().T @ a_p1
        c_p = a_0.conj().T @ d_p1.rho_tilde
        c_pp = zero
    else:
        c_mm = zero
        c_m = -a_p1 @ d_0.rho
        c_0 = -a_p1 @ a_0.conj().T
        c_p = -d_p1.rho_tilde @ a_p2
        c_pp = d_p1.rho_tilde @ d_p2.rho_tilde
    return c_mm, c_m, c_0, c_p, c_pp


def apply_difference(seq: VerblunskySequence, phi: np.ndarray, k_range) -> np.ndarray:
    """Apply the five-term difference expression, no matrix involved.

    Parameters
    ----------
    seq : VerblunskySequence
    phi : array of shape (len(k_range) + 4, m)
        Values phi(k) for k from k_range start - 2 up to k_range end + 2.
    k_range : range or pair (a, b)
        Output sites, each needing coefficients k-1 .. k+2 in the window.

    Returns
    -------
    Array of shape (len(k_range), m) holding (U phi)(k).
    """
    if isinstance(k_range, tuple):
        k_range = range(k_range[0], k_range[1])
    phi = np.asarray(phi, dtype=complex)
    if phi.ndim == 1:
        phi = phi[:, None]
    want = len(k_range) + 4
    if phi.shape != (want, seq.m):
        raise InsufficientPadding(
            f"phi must have shape ({want}, {seq.m}) covering the padded range, "
            f"got {phi.shape}"
        )
    out = np.zeros((len(k_range), seq.m), dtype=complex)
    base = k_range.start - 2
    for i, k in enumerate(k_range):
        c = five_term_coefficients(seq, k)
        window = phi[k - 2 - base:k + 3 - base]
        for j in range(5):
            out[i] += c[j] @ window[j]
    return out


def operator_difference_block(seq: VerblunskySequence, spec: SplitSpec) -> np.ndarray:
    """The 2m x 2m block by which U and its split differ, in V/W form.

    U - U_split equals V D (odd k0) or D W (even k0) where D is zero away
    from sites (k0 - 1, k0); this returns that nonzero 2m x 2m block of D.
    """
    if not (seq.k_min < spec.k0 < seq.k_max):
        raise SplitOutOfWindow("difference block needs an interior split site")
    m = seq.m
    block = theta_block(seq.alpha(spec.k0)).copy()
    block[:m, :m] += spec.gamma_left
    block[m:, m:] -= spec.gamma_right.conj().T
    return block
