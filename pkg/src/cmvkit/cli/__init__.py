"""Command-line front end.

Subcommands cover generation (gen), operator assembly (assemble),
split-rank analysis (decouple), polynomial solution families (laurent),
spectral functions (mfun), Green's kernel evaluation (green), sample
validity checks (analytic), and the invariant suites (verify).

Exit codes: 0 success, 1 failed checks, 2 usage or input errors.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys

import numpy as np

from ..analytic import is_caratheodory
from ..assembly import SplitSpec, assemble, assemble_split
from ..coefficients import (
    _matrix_from_json,
    _matrix_to_json,
    dump_sequence,
    factorize_svd,
    load_sequence,
)
from ..decoupling import decoupling_report, det_criterion, minimal_phases
from ..greens import dense_resolvent_entry, full_green_entries, half_lattice_green
from ..laurent import MINUS, PLUS, window_family
from ..weyl import spectral_sample
from .ensembles import Distribution, EnsembleSpec, generate
from .suites import SUITES, Tolerances, run_suite


def _parse_window(text: str) -> tuple[int, int]:
    parts = text.split(",")
    if len(parts) != 2:
        raise ValueError(f"window must be 'A,B', got {text!r}")
    return int(parts[0]), int(parts[1])


def _parse_complex(text: str) -> complex:
    parts = text.split(",")
    if len(parts) != 2:
        raise ValueError(f"expected 'RE,IM', got {text!r}")
    return complex(float(parts[0]), float(parts[1]))


def _parse_floats(text: str) -> list[float]:
    return [float(p) for p in text.split(",")]


def _resolve_seed(value: int | None) -> int:
    if value is not None:
        return value
    env = os.environ.get("CMV_SEED")
    if env is not None:
        return int(env)
    return 0


def _load_matrix(path: str) -> np.ndarray:
    with open(path, encoding="utf-8") as fh:
        return _matrix_from_json(json.load(fh), where=str(path))


def _load_gamma(path: str | None, m: int) -> np.ndarray:
    if path is None:
        return np.eye(m, dtype=complex)
    return _load_matrix(path)


def _emit_text(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


def _emit_json(payload, out: str | None) -> None:
    _emit_text(json.dumps(payload, indent=2), out)


def _spec_from_args(args) -> EnsembleSpec:
    k_min, k_max = _parse_window(args.window)
    dist = Distribution(args.distribution)
    return EnsembleSpec(m=args.m, k_min=k_min, k_max=k_max,
                        seed=_resolve_seed(args.seed),
                        radius_max=args.radius, distribution=dist)


def cmd_gen(args) -> int:
    seq = generate(_spec_from_args(args))
    doc = {
        "m": seq.m,
        "k_min": seq.k_min,
        "k_max": seq.k_max,
        "alphas": {str(k): _matrix_to_json(seq.alpha(k))
                   for k in range(seq.k_min, seq.k_max + 1)},
    }
    _emit_json(doc, args.out)
    return 0


def cmd_assemble(args) -> int:
    seq = load_sequence(args.infile)
    if args.split is not None:
        m = seq.m
        g_left = _load_gamma(args.gamma_left, m)
        g_right = _load_gamma(args.gamma_right, m)
        ops = assemble_split(seq, SplitSpec(k0=args.split, gamma_left=g_left,
                                            gamma_right=g_right))
    else:
        ops = assemble(seq)
    payload = {
        "offset": ops.offset,
        "m": ops.m,
        "U": _matrix_to_json(ops.U),
        "V": _matrix_to_json(ops.V),
        "W": _matrix_to_json(ops.W),
    }
    _emit_json(payload, args.out)
    return 0


def cmd_decouple(args) -> int:
    seq = load_sequence(args.infile)
    m = seq.m
    alpha = seq.alpha(args.k0)
    s = np.asarray(_parse_floats(args.s), dtype=float) if args.s \
        else np.zeros(m)
    if s.size != m:
        raise ValueError(f"need {m} phases in --s, got {s.size}")
    if args.t:
        t = np.asarray(_parse_floats(args.t), dtype=float)
        if t.size != m:
            raise ValueError(f"need {m} phases in --t, got {t.size}")
        fac = factorize_svd(alpha)
        gamma1 = fac.sigma @ np.diag(np.exp(1j * t)) @ fac.tau.conj().T
        gamma2 = fac.sigma @ np.diag(np.exp(1j * s)) @ fac.tau.conj().T
    else:
        sol = minimal_phases(alpha, s)
        t, gamma1, gamma2 = sol.t, sol.gamma1, sol.gamma2
    rep = decoupling_report(seq, args.k0, gamma1, gamma2, rtol=args.tol_rank)
    payload = {
        "k0": args.k0,
        "s": list(map(float, s)),
        "t": list(map(float, t)),
        "singular_values": list(map(float, rep.singular_values)),
        "op_rank": rep.op_rank,
        "resolvent_ranks": {f"{z.real},{z.imag}": r
                            for z, r in rep.resolvent_ranks.items()},
        "minimal": rep.minimal,
        "local_block": _matrix_to_json(rep.local_block),
    }
    if m == 1:
        # the criterion takes the boundary phases themselves, which fold
        # in the unitary factors of alpha, not the bare s and t angles
        payload["det_criterion"] = abs(det_criterion(
            alpha[0, 0], float(np.angle(gamma1[0, 0])),
            float(np.angle(gamma2[0, 0]))))
    _emit_json(payload, args.out)
    return 0


_SIGNS = {"+": PLUS, "-": MINUS}


def cmd_laurent(args) -> int:
    seq = load_sequence(args.infile)
    gamma = _load_gamma(args.gamma, seq.m)
    z = _parse_complex(args.z)
    sign = _SIGNS[args.sign]
    fam = window_family(seq, gamma, z, args.k0, sign)
    lo, hi = _parse_window(args.range) if args.range \
        else (fam.k_lo, fam.k_hi)
    sites = []
    for k in range(lo, hi + 1):
        site = fam.at(k)
        sites.append({
            "k": k,
            "P": _matrix_to_json(site.P),
            "R": _matrix_to_json(site.R),
            "Q": _matrix_to_json(site.Q),
            "S": _matrix_to_json(site.S),
        })
    payload = {
        "k0": args.k0,
        "sign": args.sign,
        "z": [z.real, z.imag],
        "gamma": _matrix_to_json(gamma),
        "sites": sites,
    }
    _emit_json(payload, args.out)
    return 0


def _sample_payload(sample, sign: str | None) -> dict:
    full = {
        "z": [sample.z.real, sample.z.imag],
        "m_plus": _matrix_to_json(sample.m_plus),
        "m_minus": _matrix_to_json(sample.m_minus),
        "M_plus": _matrix_to_json(sample.M_plus),
        "M_minus": _matrix_to_json(sample.M_minus),
        "Phi_plus": _matrix_to_json(sample.Phi_plus),
        "Phi_minus": _matrix_to_json(sample.Phi_minus),
        "caratheodory_plus": sample.caratheodory_plus,
        "anti_caratheodory_minus": sample.anti_caratheodory_minus,
        "schur_plus": sample.schur_plus,
        "anti_schur_minus": sample.anti_schur_minus,
    }
    if sign == "+":
        drop = ("m_minus", "M_minus", "Phi_minus", "anti_caratheodory_minus",
                "anti_schur_minus")
    elif sign == "-":
        drop = ("m_plus", "M_plus", "Phi_plus", "caratheodory_plus",
                "schur_plus")
    else:
        drop = ()
    return {key: val for key, val in full.items() if key not in drop}


def _grid_rows(seq, k0, gamma, radii, n_theta):
    m = seq.m
    names = ["z_re", "z_im"]
    mats = ("m_plus", "m_minus", "M_plus", "M_minus", "Phi_plus", "Phi_minus")
    for name in mats:
        for i in range(m):
            for j in range(m):
                names.extend([f"{name}_{i}{j}_re", f"{name}_{i}{j}_im"])
    names.extend(["caratheodory_plus", "anti_caratheodory_minus",
                  "schur_plus", "anti_schur_minus"])
    rows = [names]
    for r in radii:
        for jt in range(n_theta):
            z = r * np.exp(2j * np.pi * jt / n_theta)
            samp = spectral_sample(seq, k0, gamma, z)
            row = [z.real, z.imag]
            for name in mats:
                mat = getattr(samp, name)
                for i in range(m):
                    for j in range(m):
                        row.extend([mat[i, j].real, mat[i, j].imag])
            row.extend([int(samp.caratheodory_plus),
                        int(samp.anti_caratheodory_minus),
                        int(samp.schur_plus), int(samp.anti_schur_minus)])
            rows.append(row)
    return rows


def _emit_csv(rows, out: str | None) -> None:
    def write(fh):
        csv.writer(fh).writerows(rows)

    if out is None:
        write(sys.stdout)
    else:
        with open(out, "w", newline="", encoding="utf-8") as fh:
            write(fh)


def cmd_mfun(args) -> int:
    seq = load_sequence(args.infile)
    gamma = _load_gamma(args.gamma, seq.m)
    if args.grid:
        parts = args.grid.split(",")
        if len(parts) != 3:
            raise ValueError(f"--grid wants 'r1,r2,ntheta', got {args.grid!r}")
        radii = (float(parts[0]), float(parts[1]))
        _emit_csv(_grid_rows(seq, args.k0, gamma, radii, int(parts[2])),
                  args.out)
        return 0
    if args.z is None:
        raise ValueError("need --z RE,IM (or --grid) for mfun")
    samp = spectral_sample(seq, args.k0, gamma, _parse_complex(args.z))
    _emit_json(_sample_payload(samp, args.sign), args.out)
    return 0


def _read_pairs(path: str) -> list[tuple[int, int]]:
    pairs = []
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.reader(fh):
            if not row or not row[0].strip().lstrip("+-").isdigit():
                continue
            pairs.append((int(row[0]), int(row[1])))
    if not pairs:
        raise ValueError(f"no index pairs found in {path}")
    return pairs


def cmd_green(args) -> int:
    seq = load_sequence(args.infile)
    gamma = _load_gamma(args.gamma, seq.m)
    z = _parse_complex(args.z)
    pairs = _read_pairs(args.pairs)
    m = seq.m
    rows = [["k", "kp", "i", "j", "value_re", "value_im",
             "oracle_re", "oracle_im", "residual"]]
    if args.half:
        sign = _SIGNS[args.half]
        entries = [half_lattice_green(seq, args.k0, gamma, z, k, kp, sign)
                   for k, kp in pairs]
        oracles = [dense_resolvent_entry(seq, z, k, kp, half=sign,
                                         k0=args.k0, gamma=gamma)
                   for k, kp in pairs]
    else:
        entries = full_green_entries(seq, args.k0, gamma, z, pairs)
        oracles = [dense_resolvent_entry(seq, z, k, kp) for k, kp in pairs]
    for entry, oracle, (k, kp) in zip(entries, oracles, pairs):
        for i in range(m):
            for j in range(m):
                val = entry.value[i, j]
                ora = oracle[i, j]
                rows.append([k, kp, i, j, val.real, val.imag,
                             ora.real, ora.imag, abs(val - ora)])
    _emit_csv(rows, args.out)
    return 0


def cmd_analytic(args) -> int:
    with open(args.infile, encoding="utf-8") as fh:
        raw = json.load(fh)
    samples = [(complex(item["z"][0], item["z"][1]),
                _matrix_from_json(item["F"], where="sample")) for item in raw]
    tol = args.tol_identity if args.tol_identity is not None else 1e-10
    if args.check == "caratheodory":
        report = is_caratheodory(samples, tol=tol)
        payload = {
            "check": "caratheodory",
            "valid": report.valid,
            "min_eigenvalues": list(map(float, report.min_eigenvalues)),
            "tol": report.tol,
        }
        ok = report.valid
    else:
        excess = [max(0.0, float(np.linalg.norm(F, 2)) - 1.0)
                  for _, F in samples]
        ok = all(e <= tol for e in excess)
        payload = {"check": "schur", "valid": ok, "norm_excess": excess,
                   "tol": tol}
    _emit_json(payload, args.out)
    return 0 if ok else 1


def cmd_verify(args) -> int:
    names = list(SUITES) if args.suite is None \
        else [n.strip() for n in args.suite.split(",") if n.strip()]
    spec = _spec_from_args(args)
    tols = Tolerances(rank=args.tol_rank, identity=args.tol_identity)
    report = run_suite(names, spec, tols, jobs=args.jobs)
    for res in report.results:
        status = "PASS" if res.passed else "FAIL"
        print(f"{status} {res.suite}/{res.check}: residual {res.residual:.3e}"
              f" (tol {res.tol:.3e})", file=sys.stderr)
    if args.format == "csv":
        rows = [["suite", "check", "residual", "tol", "passed"]]
        rows += [[r.suite, r.check, r.residual, r.tol, r.passed]
                 for r in report.results]
        _emit_csv(rows, args.out)
    else:
        _emit_json(report.to_dict(), args.out)
    return 0 if report.passed else 1


def _add_ensemble_flags(p) -> None:
    p.add_argument("--seed", type=int, default=None,
                   help="RNG seed (falls back to CMV_SEED, then 0)")
    p.add_argument("--m", type=int, default=1, help="coefficient block size")
    p.add_argument("--window", default="0,20", metavar="A,B",
                   help="lattice window bounds")
    p.add_argument("--radius", type=float, default=0.9,
                   help="max coefficient norm")
    p.add_argument("--distribution", default="uniform-disk",
                   choices=[d.value for d in Distribution])


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cmv",
        description="Five-diagonal unitary operators: assembly, decoupling, "
                    "spectral functions, and Green's kernels.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a random coefficient sequence")
    _add_ensemble_flags(p)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("assemble", help="build the operator matrices")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--split", type=int, default=None, metavar="K0")
    p.add_argument("--gamma-left", default=None)
    p.add_argument("--gamma-right", default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_assemble)

    p = sub.add_parser("decouple", help="rank analysis of a lattice split")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--k0", type=int, required=True)
    p.add_argument("--s", default=None, help="comma-separated phases")
    p.add_argument("--t", default=None,
                   help="comma-separated phases (default: minimal choice)")
    p.add_argument("--tol-rank", type=float, default=1e-8)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_decouple)

    p = sub.add_parser("laurent", help="polynomial solution family")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--k0", type=int, required=True)
    p.add_argument("--gamma", default=None)
    p.add_argument("--z", required=True, metavar="RE,IM")
    p.add_argument("--sign", choices=["+", "-"], default="+")
    p.add_argument("--range", default=None, metavar="A,B")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_laurent)

    p = sub.add_parser("mfun", help="spectral function sample or grid")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--k0", type=int, required=True)
    p.add_argument("--gamma", default=None)
    p.add_argument("--z", default=None, metavar="RE,IM")
    p.add_argument("--sign", choices=["+", "-"], default=None)
    p.add_argument("--grid", default=None, metavar="R1,R2,NTHETA")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_mfun)

    p = sub.add_parser("green", help="Green's kernel entries vs dense oracle")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--k0", type=int, required=True)
    p.add_argument("--gamma", default=None)
    p.add_argument("--z", required=True, metavar="RE,IM")
    p.add_argument("--half", choices=["+", "-"], default=None)
    p.add_argument("--pairs", required=True, help="CSV of k,k' rows")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_green)

    p = sub.add_parser("analytic", help="validity checks on sampled functions")
    p.add_argument("--check", choices=["caratheodory", "schur"],
                   required=True)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--tol-identity", type=float, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_analytic)

    p = sub.add_parser("verify", help="run invariant suites")
    _add_ensemble_flags(p)
    p.add_argument("--suite", default=None,
                   help="comma-separated suite names (default: all)")
    p.add_argument("--tol-rank", type=float, default=1e-8)
    p.add_argument("--tol-identity", type=float, default=None)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
