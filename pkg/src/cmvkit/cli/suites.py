"""Named verification suites run by the command-line tool.

Each suite regenerates its own data from the ensemble parameters,
evaluates a handful of identities, and emits one CheckResult per
identity. Suites are pure functions of those parameters, so reports
are reproducible byte for byte;
wall-clock timing lives in the report's meta block, never in results.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, replace

import numpy as np

from .. import __version__
from ..analytic import (
    herglotz_eval,
    inverse_cayley,
    is_caratheodory,
    cayley,
    uniform_grid_measure,
    AtomicMeasure,
)
from ..assembly import SplitSpec, assemble, assemble_split
from ..coefficients import factorize_svd, gauge_transform, principal_unitary_sqrt
from ..decoupling import (
    decoupling_report,
    det_criterion,
    minimal_phases,
)
from ..greens import (
    dense_resolvent_entry,
    full_green_entries,
    half_lattice_green,
    wronskian,
    wronskian_symmetry_check,
)
from ..laurent import (
    MINUS,
    PLUS,
    connection,
    quadratic_identities,
    conjugation_symmetry,
    window_family,
)
from ..weyl import (
    M_function,
    M_gamma_transform,
    M_minus_at_zero,
    M_minus_from_m_minus,
    M_minus_via_connection,
    m_from_edge_condition,
    m_function,
    m_minus_from_M_minus,
    schur_from_M,
    schur_gamma_conjugation,
    spectral_sample,
    weyl_solution,
)
from .ensembles import EnsembleSpec, generate, random_unitary


class UnknownSuite(ValueError):
    """Requested suite name is not registered."""


@dataclass(frozen=True)
class Tolerances:
    """Rank threshold plus an optional override for identity residuals.

    identity = None keeps each check's own default; a number replaces
    all of them (to demonstrate tolerance sensitivity, for instance).
    """

    rank: float = 1e-8
    identity: float | None = None

    def pick(self, default: float) -> float:
        return default if self.identity is None else self.identity


@dataclass(frozen=True)
class CheckResult:
    suite: str
    check: str
    residual: float
    tol: float
    passed: bool


def _result(suite: str, check: str, residual, tol: float) -> CheckResult:
    residual = float(residual)
    tol = float(tol)
    return CheckResult(suite=suite, check=check, residual=residual,
                       tol=tol, passed=residual <= tol)


def _rel(diff: np.ndarray, reference: np.ndarray) -> float:
    scale = max(float(np.linalg.norm(reference)), 1e-30)
    return float(np.linalg.norm(diff) / scale)


def _mid_site(spec: EnsembleSpec) -> int:
    return (spec.k_min + spec.k_max) // 2


def _sub_seed(spec: EnsembleSpec, suite_index: int, draw: int) -> int:
    rng = np.random.default_rng([spec.seed, suite_index, draw])
    return int(rng.integers(0, 2 ** 62))


def _pair_samples(rng, lo, hi, count, max_sep):
    """Index pairs with bounded separation, where oracles stay sharp."""
    pairs = []
    for _ in range(count):
        k = int(rng.integers(lo, hi + 1))
        sep = int(rng.integers(-max_sep, max_sep + 1))
        kp = min(max(k + sep, lo), hi)
        pairs.append((k, kp))
    return pairs


def suite_unitarity(spec: EnsembleSpec, tol: Tolerances):
    out = []
    seq = generate(spec)
    ops = assemble(seq)
    n = ops.U.shape[0]
    eye = np.eye(n)
    out.append(_result("unitarity", "U-star-U",
                       np.linalg.norm(ops.U.conj().T @ ops.U - eye),
                       tol.pick(1e-10)))
    out.append(_result("unitarity", "U-equals-VW",
                       np.linalg.norm(ops.U - ops.V @ ops.W),
                       tol.pick(1e-12)))
    band = 0.0
    for k in seq.sites:
        for kp in seq.sites:
            if abs(k - kp) > 2:
                band = max(band, float(np.abs(ops.block(k, kp)).max()))
    out.append(_result("unitarity", "band-zeros", band, 0.0))
    if spec.m == 1:
        worst = 0.0
        for k in range(seq.k_min + 1, seq.k_max - 1):
            want = -np.conj(seq.alpha(k)[0, 0]) * seq.alpha(k + 1)[0, 0]
            worst = max(worst, abs(ops.block(k, k)[0, 0] - want))
        out.append(_result("unitarity", "scalar-diagonal", worst,
                           tol.pick(1e-12)))
    return out


def suite_decoupling(spec: EnsembleSpec, tol: Tolerances):
    out = []
    k0 = _mid_site(spec)
    rng = np.random.default_rng([spec.seed, 2, 0])
    z_samples = tuple(r * np.exp(1j * th)
                      for r in (0.5, 2.0)
                      for th in (np.pi / 8, 9 * np.pi / 8))

    seq1 = generate(replace(spec, m=1, seed=_sub_seed(spec, 2, 1)))
    alpha = seq1.alpha(k0)
    s = float(rng.uniform(0, 2 * np.pi))
    sol = minimal_phases(alpha, [s])
    rep = decoupling_report(seq1, k0, sol.gamma1, sol.gamma2,
                            z_samples=z_samples, rtol=tol.rank)
    out.append(_result("decoupling", "scalar-minimal-op-rank",
                       abs(rep.op_rank - 1), 0.0))
    out.append(_result("decoupling", "scalar-minimal-resolvent-rank",
                       max(abs(r - 1) for r in rep.resolvent_ranks.values()), 0.0))
    out.append(_result("decoupling", "scalar-det-criterion",
                       abs(det_criterion(alpha[0, 0],
                                         np.angle(sol.gamma1[0, 0]),
                                         np.angle(sol.gamma2[0, 0]))),
                       tol.pick(1e-12)))
    bumped = sol.gamma1 * np.exp(0.1j)
    rep2 = decoupling_report(seq1, k0, bumped, sol.gamma2,
                             z_samples=z_samples[:1], rtol=tol.rank)
    out.append(_result("decoupling", "scalar-perturbed-rank",
                       abs(rep2.op_rank - 2), 0.0))
    g = sol.gamma2
    rep3 = decoupling_report(seq1, k0, g, g, z_samples=z_samples[:1],
                             rtol=tol.rank)
    out.append(_result("decoupling", "scalar-single-gamma-rank",
                       abs(rep3.op_rank - 2), 0.0))

    if spec.m >= 2:
        seq = generate(replace(spec, seed=_sub_seed(spec, 2, 2)))
        s_vec = rng.uniform(0, 2 * np.pi, size=spec.m)
        solm = minimal_phases(seq.alpha(k0), s_vec)
        repm = decoupling_report(seq, k0, solm.gamma1, solm.gamma2,
                                 z_samples=z_samples, rtol=tol.rank)
        out.append(_result("decoupling", "matrix-minimal-op-rank",
                           abs(repm.op_rank - spec.m), 0.0))
        out.append(_result("decoupling", "matrix-minimal-resolvent-rank",
                           max(abs(r - spec.m)
                               for r in repm.resolvent_ranks.values()), 0.0))
        fac = factorize_svd(seq.alpha(k0))
        t_bumped = np.asarray(solm.t, dtype=float).copy()
        t_bumped[0] += 0.1
        g1b = fac.sigma @ np.diag(np.exp(1j * t_bumped)) @ fac.tau.conj().T
        repb = decoupling_report(seq, k0, g1b, solm.gamma2,
                                 z_samples=z_samples[:1], rtol=tol.rank)
        out.append(_result("decoupling", "matrix-single-bump-rank",
                           abs(repb.op_rank - (spec.m + 1)), 0.0))
        eye = np.eye(spec.m)
        repi = decoupling_report(seq, k0, eye, eye, z_samples=z_samples[:1],
                                 rtol=tol.rank)
        out.append(_result("decoupling", "matrix-identity-gamma-excess",
                           max(0, spec.m + 1 - repi.op_rank), 0.0))
    return out


def suite_connection(spec: EnsembleSpec, tol: Tolerances):
    out = []
    seq = generate(replace(spec, seed=_sub_seed(spec, 3, 0)))
    k0 = _mid_site(spec)
    rng = np.random.default_rng([spec.seed, 3, 1])
    g1 = random_unitary(rng, spec.m)
    g2 = random_unitary(rng, spec.m)
    cc = connection(g1, g2, seq.alpha(k0), k0)
    sites = [seq.k_min + 1, k0 - 1, k0, k0 + 2, seq.k_max - 2]
    worst = {key: 0.0 for key in ("same-sign-Q", "same-sign-P",
                                  "cross-sign-QP", "cross-site-QP")}
    for z in (0.45 * np.exp(0.7j), 1.9 * np.exp(2.1j)):
        p1 = window_family(seq, g1, z, k0, PLUS)
        p2 = window_family(seq, g2, z, k0, PLUS)
        m2 = window_family(seq, g2, z, k0, MINUS)
        m2_down = window_family(seq, g2, z, k0 - 1, MINUS)
        C2, D2 = cc.c2(z), cc.d2(z)
        for k in sites:
            a1, a2, b2, b2d = p1.at(k), p2.at(k), m2.at(k), m2_down.at(k)
            worst["same-sign-Q"] = max(
                worst["same-sign-Q"],
                _rel(a2.Q - (a1.Q @ cc.C1 + a1.P @ cc.D1), a2.Q),
                _rel(a2.S - (a1.S @ cc.C1 + a1.R @ cc.D1), a2.S))
            worst["same-sign-P"] = max(
                worst["same-sign-P"],
                _rel(a2.P - (a1.Q @ cc.D1 + a1.P @ cc.C1), a2.P),
                _rel(a2.R - (a1.S @ cc.D1 + a1.R @ cc.C1), a2.R))
            worst["cross-sign-QP"] = max(
                worst["cross-sign-QP"],
                _rel(b2.Q - (a1.Q @ C2 + a1.P @ D2), b2.Q),
                _rel(b2.P - (a1.Q @ D2 + a1.P @ C2), b2.P))
            worst["cross-site-QP"] = max(
                worst["cross-site-QP"],
                _rel(b2d.Q - (a1.Q @ cc.C3 + a1.P @ cc.D3), b2d.Q),
                _rel(b2d.P - (a1.Q @ cc.C4 + a1.P @ cc.D4), b2d.P))
    for key, val in worst.items():
        out.append(_result("connection", key, val, tol.pick(1e-9)))
    return out


def suite_quadratic(spec: EnsembleSpec, tol: Tolerances):
    out = []
    seq = generate(replace(spec, seed=_sub_seed(spec, 4, 0)))
    k0 = _mid_site(spec)
    rng = np.random.default_rng([spec.seed, 4, 1])
    g = random_unitary(rng, spec.m)
    z = 0.4 - 0.3j
    zc = 1.0 / np.conj(z)
    fams = {}
    for sign in (PLUS, MINUS):
        f = window_family(seq, g, z, k0, sign)
        fc = window_family(seq, g, zc, k0, sign, gamma_sqrt=f.gamma_sqrt)
        fams[sign] = (f, fc)
    worst = 0.0
    for k in (seq.k_min, k0 - 3, k0, k0 + 4, seq.k_max - 1):
        res = quadratic_identities(fams[PLUS], fams[MINUS], k)
        worst = max(worst, max(res.values()))
    out.append(_result("quadratic", "bilinear-identities", worst,
                       tol.pick(1e-9)))

    seq1 = generate(replace(spec, m=1, seed=_sub_seed(spec, 4, 2)))
    t = float(rng.uniform(0, np.pi))
    g1 = np.array([[np.exp(1j * t)]])
    worst1 = 0.0
    for sign in (PLUS, MINUS):
        f = window_family(seq1, g1, z, k0, sign)
        fc = window_family(seq1, g1, zc, k0, sign, gamma_sqrt=f.gamma_sqrt)
        for k in (seq1.k_min + 1, k0, k0 + 3, seq1.k_max - 1):
            res = conjugation_symmetry((f, fc), k)
            worst1 = max(worst1, max(res.values()))
    out.append(_result("quadratic", "scalar-conjugation", worst1,
                       tol.pick(1e-10)))
    return out


def suite_green_half(spec: EnsembleSpec, tol: Tolerances):
    out = []
    seq = generate(replace(spec, seed=_sub_seed(spec, 5, 0)))
    k0 = _mid_site(spec)
    rng = np.random.default_rng([spec.seed, 5, 1])
    g = random_unitary(rng, spec.m)
    for sign, label in ((PLUS, "plus"), (MINUS, "minus")):
        # Keep sampled sites near k0: solution values at distance d are
        # differences of terms growing geometrically in d, so the digits
        # available to any relative check shrink with d at high radius.
        if sign == PLUS:
            lo, hi = k0, min(k0 + 6, spec.k_max - 1)
        else:
            lo, hi = max(spec.k_min, k0 - 6), k0
        worst = 0.0
        for z in (0.5 * np.exp(0.9j), 2.0 * np.exp(-1.3j)):
            for k, kp in _pair_samples(rng, lo, hi, 5, max_sep=6):
                entry = half_lattice_green(seq, k0, g, z, k, kp, sign)
                oracle = dense_resolvent_entry(seq, z, k, kp, half=sign,
                                               k0=k0, gamma=g)
                worst = max(worst, _rel(entry.value - oracle, oracle))
        out.append(_result("green-half", f"{label}-vs-dense", worst,
                           tol.pick(1e-8)))
    return out


def suite_green_full(spec: EnsembleSpec, tol: Tolerances):
    out = []
    seq = generate(replace(spec, seed=_sub_seed(spec, 6, 0)))
    k0 = _mid_site(spec)
    rng = np.random.default_rng([spec.seed, 6, 1])
    g = random_unitary(rng, spec.m)
    eye = np.eye(spec.m)
    worst = 0.0
    worst_gamma = 0.0
    lo = max(spec.k_min, k0 - 5)
    hi = min(spec.k_max - 1, k0 + 6)
    for z in (0.5 * np.exp(0.4j), 2.0 * np.exp(2.8j)):
        pairs = _pair_samples(rng, lo, hi, 6, max_sep=6)
        got = full_green_entries(seq, k0, g, z, pairs)
        got_eye = full_green_entries(seq, k0, eye, z, pairs)
        for entry, entry_eye, (k, kp) in zip(got, got_eye, pairs):
            oracle = dense_resolvent_entry(seq, z, k, kp)
            worst = max(worst, _rel(entry.value - oracle, oracle))
            worst_gamma = max(worst_gamma,
                              _rel(entry.value - entry_eye.value, oracle))
    out.append(_result("green-full", "kernel-vs-dense", worst, tol.pick(1e-8)))
    out.append(_result("green-full", "gamma-independence", worst_gamma,
                       tol.pick(1e-9)))
    return out


def suite_weyl(spec: EnsembleSpec, tol: Tolerances):
    out = []
    seq = generate(replace(spec, seed=_sub_seed(spec, 7, 0)))
    k0 = _mid_site(spec)
    rng = np.random.default_rng([spec.seed, 7, 1])
    g = random_unitary(rng, spec.m)
    zs = (0.35 * np.exp(0.8j), 0.55 * np.exp(-2.0j), 1.8 * np.exp(1.1j))

    worst_mp = max(
        _rel(m_function(seq, k0, g, z, PLUS)
             - m_from_edge_condition(seq, k0, g, z, PLUS),
             m_function(seq, k0, g, z, PLUS))
        for z in zs)
    out.append(_result("weyl", "M-plus-equals-m-plus", worst_mp,
                       tol.pick(1e-10)))

    worst_rt = 0.0
    worst_routes = 0.0
    for z in zs:
        mm = m_function(seq, k0, g, z, MINUS)
        Mm = M_minus_from_m_minus(mm, z)
        worst_rt = max(worst_rt, _rel(m_minus_from_M_minus(Mm, z) - mm, mm))
        worst_routes = max(worst_routes,
                           _rel(M_minus_via_connection(seq, k0, g, z) - Mm, Mm))
    out.append(_result("weyl", "minus-transform-round-trip", worst_rt,
                       tol.pick(1e-12)))
    out.append(_result("weyl", "minus-two-routes", worst_routes,
                       tol.pick(1e-10)))

    M0 = M_minus_via_connection(seq, k0, g, 0.0)
    out.append(_result("weyl", "minus-at-zero-closed-form",
                       _rel(M0 - M_minus_at_zero(seq.alpha(k0), g), M0),
                       tol.pick(1e-10)))

    floor = 0.0
    schur_excess = 0.0
    for r in (0.3, 0.6, 0.9):
        for j in range(4):
            z = r * np.exp(2j * np.pi * (j + 0.27) / 4)
            samp = spectral_sample(seq, k0, g, z)
            herm = (samp.m_plus + samp.m_plus.conj().T) / 2
            floor = max(floor, max(0.0, -float(np.linalg.eigvalsh(herm).min())))
            herm_m = (samp.m_minus + samp.m_minus.conj().T) / 2
            floor = max(floor, max(0.0, float(np.linalg.eigvalsh(herm_m).max())))
            schur_excess = max(schur_excess,
                               max(0.0, float(np.linalg.norm(samp.Phi_plus, 2)) - 1.0))
    out.append(_result("weyl", "caratheodory-floor", floor, tol.pick(1e-10)))
    out.append(_result("weyl", "schur-norm-bound", schur_excess,
                       tol.pick(1e-10)))

    g2 = random_unitary(rng, spec.m)
    g1h = principal_unitary_sqrt(g)
    g2h = principal_unitary_sqrt(g2)
    worst_law = 0.0
    for z in zs[:2]:
        M1 = M_function(seq, k0, g, z, MINUS)
        M2 = M_function(seq, k0, g2, z, MINUS)
        worst_law = max(worst_law, _rel(M_gamma_transform(M1, g1h, g2h) - M2, M2))
        p1 = schur_from_M(M1)
        p2 = schur_from_M(M2)
        worst_law = max(worst_law,
                        _rel(schur_gamma_conjugation(p1, g1h, g2h) - p2, p2))
    out.append(_result("weyl", "gamma-transformation-law", worst_law,
                       tol.pick(1e-10)))

    if spec.m == 1:
        seq1 = generate(replace(spec, m=1, seed=_sub_seed(spec, 7, 2)))
        z = 0.45 * np.exp(0.6j)
        vals = []
        for t in (0.0, np.pi / 3, np.pi):
            gt = np.array([[np.exp(1j * t)]])
            Mt = m_function(seq1, k0, gt, z, PLUS)
            vals.append(np.exp(-1j * t) * schur_from_M(Mt)[0, 0])
        worst_t = max(abs(v - vals[0]) for v in vals)
        out.append(_result("weyl", "scalar-t-independence", worst_t,
                           tol.pick(1e-10)))
    return out


def suite_wronskian(spec: EnsembleSpec, tol: Tolerances):
    out = []
    seq = generate(replace(spec, seed=_sub_seed(spec, 8, 0)))
    k0 = _mid_site(spec)
    rng = np.random.default_rng([spec.seed, 8, 1])
    g = random_unitary(rng, spec.m)
    z = 0.5 * np.exp(1.7j)
    zc = 1.0 / np.conj(z)
    sol_p = weyl_solution(seq, k0, g, z, PLUS)
    sol_m = weyl_solution(seq, k0, g, z, MINUS)
    sol_pc = weyl_solution(seq, k0, g, zc, PLUS)
    sol_mc = weyl_solution(seq, k0, g, zc, MINUS)
    W = sol_p.M - sol_m.M

    fam = window_family(seq, g, z, k0, PLUS)
    fam_c = window_family(seq, g, zc, k0, PLUS, gamma_sqrt=fam.gamma_sqrt)
    eye = np.eye(spec.m)
    # Site-independent in exact arithmetic; sampled near k0 because the
    # paired solutions grow geometrically away from the reference site
    # and the pairing is a near-cancelling difference there.
    sites = list(range(max(seq.k_min, k0 - 4), min(seq.k_max, k0 + 5)))
    worst_pq = max(
        _rel(wronskian((fam_c.at(k).P, fam_c.at(k).R),
                       (fam.at(k).Q, fam.at(k).S), k) - eye, eye)
        for k in sites)
    out.append(_result("wronskian", "first-second-kind-pairing", worst_pq,
                       tol.pick(1e-9)))

    values = [wronskian(sol_pc.at(k), sol_m.at(k), k) for k in sites]
    ref = values[len(values) // 2]
    worst_k = max(_rel(v - ref, ref) for v in values)
    out.append(_result("wronskian", "k-independence", worst_k, tol.pick(1e-9)))
    out.append(_result("wronskian", "equals-M-difference",
                       _rel((sol_m.M - sol_p.M) - ref, ref), tol.pick(1e-9)))
    out.append(_result("wronskian", "symmetry",
                       wronskian_symmetry_check(sol_p.M, sol_m.M),
                       tol.pick(1e-9)))

    worst_cross = 0.0
    worst_null = 0.0
    for k in (k0 - 3, k0, k0 + 3):
        sgn = 1.0 if k % 2 == 1 else -1.0
        Up, Vp = sol_p.at(k)
        Um, Vm = sol_m.at(k)
        Upc, Vpc = sol_pc.at(k)
        Umc, Vmc = sol_mc.at(k)
        lhs = Up @ np.linalg.solve(W, Umc.conj().T) \
            - Um @ np.linalg.solve(W, Upc.conj().T)
        worst_cross = max(worst_cross, _rel(lhs - 2.0 * sgn * eye, eye))
        lhs0 = Vp @ np.linalg.solve(W, Umc.conj().T) \
            - Vm @ np.linalg.solve(W, Upc.conj().T)
        worst_null = max(worst_null, _rel(lhs0, eye))
    out.append(_result("wronskian", "resolvent-jump", worst_cross,
                       tol.pick(1e-9)))
    out.append(_result("wronskian", "v-component-null", worst_null,
                       tol.pick(1e-9)))
    return out


def suite_analytic(spec: EnsembleSpec, tol: Tolerances):
    out = []
    rng = np.random.default_rng([spec.seed, 9, 0])
    m = spec.m
    atoms = []
    for j in range(6):
        zeta = np.exp(2j * np.pi * rng.uniform())
        g = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
        atoms.append((zeta, g @ g.conj().T / m))
    C = rng.standard_normal((m, m))
    C = C + C.T
    measure = AtomicMeasure(atoms=tuple(atoms), C=C.astype(complex))

    worst_rt = 0.0
    zs = [0.7 * np.exp(2j * np.pi * rng.uniform()) for _ in range(5)]
    samples = []
    for z in zs:
        F = herglotz_eval(measure, z)
        samples.append((z, F))
        worst_rt = max(worst_rt, _rel(inverse_cayley(cayley(F)) - F, F))
    out.append(_result("analytic", "cayley-round-trip", worst_rt,
                       tol.pick(1e-12)))
    report = is_caratheodory(samples)
    out.append(_result("analytic", "herglotz-positivity",
                       max(0.0, -min(report.min_eigenvalues)), tol.pick(1e-10)))

    lebesgue = uniform_grid_measure(2048, m=1)
    val = herglotz_eval(lebesgue, 0.3 + 0.2j)[0, 0]
    out.append(_result("analytic", "unit-mass-quadrature", abs(val - 1.0),
                       tol.pick(1e-10)))

    seq = generate(replace(spec, seed=_sub_seed(spec, 9, 1)))
    k0 = _mid_site(spec)
    g = random_unitary(rng, spec.m)
    worst_ref = 0.0
    for z in (0.4 * np.exp(0.5j), 0.55 * np.exp(-1.9j)):
        inner = m_function(seq, k0, g, z, PLUS)
        outer = m_function(seq, k0, g, 1.0 / np.conj(z), PLUS)
        worst_ref = max(worst_ref, _rel(outer + inner.conj().T, inner))
    out.append(_result("analytic", "reflection-relation", worst_ref,
                       tol.pick(1e-9)))
    return out


def suite_gauge(spec: EnsembleSpec, tol: Tolerances):
    out = []
    rng = np.random.default_rng([spec.seed, 10, 0])

    seq1 = generate(replace(spec, m=1, seed=_sub_seed(spec, 10, 1)))
    t = float(rng.uniform(0, 2 * np.pi))
    A = np.diag([np.exp(-1j * t / 2) if k % 2 == 1 else np.exp(1j * t / 2)
                 for k in seq1.sites]).astype(complex)
    beta = gauge_transform(seq1, np.array([[np.exp(-1j * t)]]), np.eye(1))
    lhs = A @ assemble(seq1).U @ A.conj().T
    rhs = assemble(beta).U
    out.append(_result("gauge", "scalar-phase-twist", _rel(lhs - rhs, rhs),
                       tol.pick(1e-10)))

    seq = generate(replace(spec, seed=_sub_seed(spec, 10, 2)))
    sigma = random_unitary(rng, spec.m)
    tau = random_unitary(rng, spec.m)
    gauged = gauge_transform(seq, sigma, tau)
    blocks = [sigma if k % 2 == 1 else tau for k in seq.sites]
    Am = np.zeros((spec.m * seq.n_sites, spec.m * seq.n_sites), dtype=complex)
    for i, b in enumerate(blocks):
        Am[i * spec.m:(i + 1) * spec.m, i * spec.m:(i + 1) * spec.m] = b
    lhs = Am @ assemble(seq).U @ Am.conj().T
    rhs = assemble(gauged).U
    out.append(_result("gauge", "matrix-conjugation", _rel(lhs - rhs, rhs),
                       tol.pick(1e-10)))

    k0 = _mid_site(spec)
    gam = random_unitary(rng, spec.m)
    gh = principal_unitary_sqrt(gam)
    ghi = gh.conj().T
    split_orig = assemble_split(seq, SplitSpec(k0=k0, gamma_left=gam,
                                               gamma_right=gam))
    gauged_g = gauge_transform(seq, ghi, gh)
    eye = np.eye(spec.m)
    split_gauged = assemble_split(gauged_g, SplitSpec(k0=k0, gamma_left=eye,
                                                      gamma_right=eye))
    blocks = [ghi if k % 2 == 1 else gh for k in seq.sites]
    Ag = np.zeros_like(split_orig.U)
    for i, b in enumerate(blocks):
        Ag[i * spec.m:(i + 1) * spec.m, i * spec.m:(i + 1) * spec.m] = b
    lhs = Ag @ split_orig.U @ Ag.conj().T
    out.append(_result("gauge", "split-consistency",
                       _rel(lhs - split_gauged.U, split_gauged.U),
                       tol.pick(1e-10)))
    return out


SUITES = {
    "unitarity": suite_unitarity,
    "decoupling": suite_decoupling,
    "connection": suite_connection,
    "quadratic": suite_quadratic,
    "green-half": suite_green_half,
    "green-full": suite_green_full,
    "weyl": suite_weyl,
    "wronskian": suite_wronskian,
    "analytic": suite_analytic,
    "gauge": suite_gauge,
}


@dataclass(frozen=True)
class VerificationReport:
    """Sorted check results plus a non-deterministic meta block."""

    results: tuple
    meta: dict

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def to_dict(self) -> dict:
        return {
            "results": [asdict(r) for r in self.results],
            "meta": dict(self.meta),
        }


def run_suite(names, spec: EnsembleSpec, tolerances: Tolerances | None = None,
              jobs: int = 1) -> VerificationReport:
    """Run the named suites and collect a report.

    Results are sorted by (suite, check) so the output does not depend
    on completion order; timing goes into meta only.
    """
    tolerances = tolerances or Tolerances()
    for name in names:
        if name not in SUITES:
            raise UnknownSuite(
                f"unknown suite {name!r}; available: {', '.join(sorted(SUITES))}"
            )
    start = time.perf_counter()
    if jobs > 1 and len(names) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(lambda n: SUITES[n](spec, tolerances), names))
    else:
        chunks = [SUITES[n](spec, tolerances) for n in names]
    results = sorted((r for chunk in chunks for r in chunk),
                     key=lambda r: (r.suite, r.check))
    meta = {
        "runtime_seconds": time.perf_counter() - start,
        "seed": spec.seed,
        "m": spec.m,
        "window": [spec.k_min, spec.k_max],
        "radius_max": spec.radius_max,
        "distribution": spec.distribution.value,
        "version": __version__,
        "numpy": np.__version__,
    }
    return VerificationReport(results=tuple(results), meta=meta)
