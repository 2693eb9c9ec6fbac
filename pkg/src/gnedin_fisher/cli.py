"""Command-line front end.

Every command writes one JSON document (or CSV table) to stdout or ``--out``;
``sample`` writes newline-delimited JSON, one record per replicate.
Exit codes: 0 success, 1 verification failure, 2 invalid input.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

import numpy as np

from . import allocation, laws, models, partition, structural
from .combinatorics import DomainError, SeriesConvergenceError, integer_partitions
from .serialize import SCHEMA_VERSION, format_float, render_scalar, value_record

ENV_TOLERANCE = "GNEDIN_FISHER_TOLERANCE"
ENV_THREADS = "GNEDIN_FISHER_THREADS"


class UsageError(Exception):
    """Invalid command-line input (exit code 2)."""


def parse_number(text: str, backend: str):
    """``"1/2"``, ``"3"`` and ``"0.8"`` are read exactly unless the backend is float."""
    try:
        q = Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        try:
            x = float(text)
        except ValueError:
            raise UsageError(f"not a number: {text!r}") from None
        if backend == "exact":
            raise UsageError(f"{text!r} cannot be read as an exact rational; use --backend float")
        return x
    return q if backend == "exact" else float(q)


def parse_counts(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise UsageError(f"counts must be a comma-separated list of integers, got {text!r}") from None


def build_model(args, *, require_psi: bool = False):
    gamma = parse_number(args.gamma, args.backend)
    if args.psi is not None:
        return models.GnedinFisherPsi(gamma, parse_number(args.psi, args.backend))
    if args.zeta is None:
        raise UsageError("one of --psi or --zeta is required")
    zmodel = models.GnedinFisherZeta(gamma, parse_number(args.zeta, args.backend))
    if not require_psi:
        return zmodel
    converted = models.zeta_to_psi(zmodel)
    if isinstance(converted, models.NotRepresentable):
        raise UsageError(f"this law needs a (gamma, psi) model; (gamma, zeta) is not representable: "
                         f"{converted.reason}")
    return converted


def _parametrization(model) -> str:
    return "psi" if isinstance(model, models.GnedinFisherPsi) else "zeta"


def _header(command: str, model=None, backend: str | None = None) -> dict:
    rec = {"schema_version": SCHEMA_VERSION, "command": command}
    if model is not None:
        rec["parametrization"] = _parametrization(model)
        rec["params"] = render_scalar(model.params())
        rec["promoted"] = bool(getattr(model, "promoted", False))
    if backend is not None:
        rec["backend"] = backend
    return rec


def _tolerance(args) -> float:
    if getattr(args, "tolerance", None) is not None:
        return args.tolerance
    env = os.environ.get(ENV_TOLERANCE)
    return float(env) if env else 1e-9


def _threads(args) -> int:
    if getattr(args, "threads", None) is not None:
        return max(1, args.threads)
    env = os.environ.get(ENV_THREADS)
    return max(1, int(env)) if env else 1


def _backend_of(model) -> str:
    return "exact" if getattr(model, "exact", False) else "float"


# ---------------------------------------------------------------- commands

def cmd_eppf(args) -> tuple[dict, int]:
    model = build_model(args)
    counts = partition.OccupancyCounts(parse_counts(args.counts))
    value = partition.eppf(model, counts)
    rec = _header("eppf", model, _backend_of(model))
    rec.update({"counts": list(counts.counts), "n": counts.n, "k": counts.k})
    rec.update(value_record(value))
    return rec, 0


def _rows_exact(pairs) -> list[dict]:
    rows = []
    for x, p in pairs:
        row = {"x": x}
        row.update({"p": value_record(p)["value"], "p_float": format_float(p)})
        rows.append(row)
    return rows


def cmd_dist(args) -> tuple[dict, int]:
    law = args.law
    if law == "blocks":
        model = build_model(args)
        pmf = partition.blocks_pmf(model, args.n)
        rows = _rows_exact(zip(range(1, args.n + 1), pmf))
        total = sum(pmf, 0)
        norm = {"total": value_record(total)["value"], "tail_bound": 0.0}
    elif law == "new-blocks":
        model = build_model(args, require_psi=True)
        if args.k is None or args.m is None:
            raise UsageError("new-blocks needs --n, --k and --m")
        pmf = [laws.new_blocks_posterior(model, args.n, args.k, args.m, ks) for ks in range(args.m + 1)]
        rows = _rows_exact(zip(range(args.m + 1), pmf))
        norm = {"total": value_record(sum(pmf, 0))["value"], "tail_bound": 0.0}
    elif law in ("xi-prior", "xi-posterior"):
        model = build_model(args, require_psi=True)
        if law == "xi-prior":
            lo = 1
            if model.exact and model.psi == 0:
                values = [laws.xi_prior_pmf_one_parameter(model.gamma, xi) for xi in range(lo, args.max_xi + 1)]
            else:
                values = [laws.xi_prior_pmf(model, xi) for xi in range(lo, args.max_xi + 1)]
            tail = laws.xi_prior_tail_bound(model, max(args.max_xi, 2))
        else:
            if args.k is None:
                raise UsageError("xi-posterior needs --n and --k")
            lo = 1
            values = [laws.xi_posterior_pmf(model, args.n, args.k, xi)
                      for xi in range(lo, args.max_xi + 1)]
            post = laws.xi_posterior(model, args.n, args.k)
            tail = float(1.0 - sum(post.pmf(np.arange(args.k, args.max_xi + 1)))) if args.max_xi >= args.k else 1.0
            tail = max(tail, 0.0)
        rows = _rows_exact(zip(range(lo, args.max_xi + 1), values))
        total = sum(values, 0) if all(isinstance(v, Fraction) for v in values) else math.fsum(map(float, values))
        norm = {"total": value_record(total)["value"], "tail_bound": format_float(tail)}
    elif law == "structural":
        model = build_model(args, require_psi=True)
        g = args.grid
        ys = [i / (g + 1) for i in range(1, g + 1)]
        rows = [{"x": format_float(y), "p": repr(format_float(d)), "p_float": format_float(d)}
                for y, d in ((y, structural.structural_density(model, y)) for y in ys)]
        atom = structural.structural_atom(model)
        rows.append({"x": "atom", "p": repr(format_float(atom)), "p_float": format_float(atom)})
        mass, err = structural.structural_mass(model)
        norm = {"total": repr(format_float(mass)), "tail_bound": format_float(err)}
    else:  # pragma: no cover - argparse restricts choices
        raise UsageError(f"unknown law {law}")
    exact_rows = all(not isinstance(r["p"], str) or "." not in r["p"] and "e" not in r["p"] for r in rows)
    rec = _header("dist", model, "exact" if exact_rows and law != "structural" else "float")
    rec.update({"law": law, "rows": rows, "normalization": norm})
    return rec, 0


def _sample_one(kind: str, model, n: int, rng) -> dict:
    if kind == "structural":
        return {"y": format_float(structural.structural_sampler(model, rng))}
    if kind == "grow":
        part = allocation.sample_sequential(model, n, rng)
    else:
        part = allocation.sample_two_stage(model, n, rng)
    return {"n": n, "k": part.k, "sizes": sorted(part.sizes, reverse=True)}


def cmd_sample(args) -> tuple[list[dict], int]:
    kind = args.kind
    model = build_model(args, require_psi=kind != "grow")
    if args.seed is None:
        raise UsageError("sampling commands need --seed")
    if not 0 <= args.seed < 2**64:
        raise UsageError(f"--seed must be a 64-bit unsigned integer, got {args.seed}")
    if kind != "structural" and args.n is None:
        raise UsageError(f"sample {kind} needs --n")
    n = args.n if args.n is not None else 1

    def work(i: int) -> dict:
        rec = {"schema_version": SCHEMA_VERSION, "command": "sample", "kind": kind, "replicate": i}
        rec.update(_sample_one(kind, model, n, allocation.replicate_rng(args.seed, i)))
        return rec

    threads = _threads(args)
    if threads == 1:
        records = [work(i) for i in range(args.replicates)]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            records = list(pool.map(work, range(args.replicates)))
    return records, 0


def cmd_convert(args) -> tuple[dict, int]:
    gamma = parse_number(args.gamma, args.backend)
    rec = {"schema_version": SCHEMA_VERSION, "command": "convert"}
    if args.psi is not None:
        pmodel = models.GnedinFisherPsi(gamma, parse_number(args.psi, args.backend))
        zmodel = models.psi_to_zeta(pmodel)
        rec.update({"input": "psi", "representable": True})
    elif args.zeta is not None:
        zmodel = models.GnedinFisherZeta(gamma, parse_number(args.zeta, args.backend))
        converted = models.zeta_to_psi(zmodel)
        rec["input"] = "zeta"
        if isinstance(converted, models.NotRepresentable):
            pmodel = None
            rec.update({"representable": False, "reason": converted.reason})
        else:
            pmodel = converted
            rec["representable"] = True
        rec["discriminant"] = value_record(zmodel.gamma ** 2 - 4 * zmodel.zeta)
    else:
        raise UsageError("one of --psi or --zeta is required")
    rec["gamma"] = value_record(zmodel.gamma)
    rec["zeta"] = value_record(zmodel.zeta)
    if pmodel is not None:
        rec["psi"] = value_record(pmodel.psi)
    rec["validation"] = {"case": zmodel.case, "i0": zmodel.i0}
    return rec, 0


def _all_counts(n_max: int):
    for n in range(1, n_max + 1):
        for part in integer_partitions(n):
            yield part


def cmd_verify(args) -> tuple[dict, int]:
    suite = args.suite
    tol = _tolerance(args)
    checks: list[partition.VerificationReport] = []
    if suite == "normalization":
        model = build_model(args)
        n = args.n or 6
        checks = [partition.verify_normalization(model, m) for m in range(1, n + 1)]
    elif suite == "addition":
        model = build_model(args)
        targets = [parse_counts(args.counts)] if args.counts else list(_all_counts(args.n or 6))
        checks = [partition.verify_addition_rule(model, c) for c in targets]
    elif suite == "mixture":
        model = build_model(args, require_psi=True)
        ks = [args.k] if args.k is not None else range(1, args.n + 1)
        checks = [laws.verify_mixture(model, args.n, k, args.xi_max) for k in ks]
    elif suite == "bayes":
        model = build_model(args, require_psi=True)
        if args.k is None or args.xi is None:
            raise UsageError("bayes suite needs --n, --k and --xi")
        checks = [laws.verify_bayes_identity(model, args.n, args.k, args.xi, rel_tol=tol)]
    elif suite == "multistep":
        model = build_model(args, require_psi=True)
        state = parse_counts(args.counts) if args.counts else (1,)
        m = args.m or 2
        checks = [allocation.verify_multistep_total(model, state, mm) for mm in range(1, m + 1)]
        checks += [allocation.verify_multistep_paths(model, state, mm) for mm in range(1, m + 1)]
    elif suite == "structural":
        model = build_model(args, require_psi=True)
        ys = [args.y] if args.y is not None else [0.1, 0.5, 0.9]
        checks = [structural.structural_mixture_pdf_check(model, y, args.xi_max or 10**4, tol=max(tol, 1e-12))
                  for y in ys]
        mass, err = structural.structural_mass(model)
        checks.append(partition.VerificationReport("structural-mass", abs(mass - 1) <= 1e-6,
                                                   mass - 1, {"mass": mass, "quad_error": err}))
    else:  # pragma: no cover
        raise UsageError(f"unknown suite {suite}")
    ok = all(c.ok for c in checks)
    rec = _header("verify", model)
    rec.update({"suite": suite, "ok": ok, "checks": [c.to_dict() for c in checks]})
    return rec, 0 if ok else 1


# ---------------------------------------------------------------- parser

def _add_model_args(p: argparse.ArgumentParser):
    p.add_argument("--gamma", required=True, help="gamma, e.g. 1/2 or 0.8")
    grp = p.add_mutually_exclusive_group()
    grp.add_argument("--psi", help="psi in [0, 1)")
    grp.add_argument("--zeta", help="zeta of the (gamma, zeta) form")
    p.add_argument("--backend", choices=("exact", "float"), default="exact",
                   help="exact rationals (decimals read exactly) or floats")


def _add_output_args(p: argparse.ArgumentParser):
    p.add_argument("--output", choices=("json", "csv"), default="json")
    p.add_argument("--out", help="write to FILE instead of stdout")
    p.add_argument("--tolerance", type=float, default=None)
    p.add_argument("--threads", type=int, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gnedin-fisher",
                                     description="Gnedin-Fisher species sampling model toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eppf", help="evaluate the EPPF at block sizes")
    _add_model_args(p)
    _add_output_args(p)
    p.add_argument("--counts", required=True, help="block sizes, e.g. 2,1")
    p.set_defaults(func=cmd_eppf)

    p = sub.add_parser("dist", help="tabulate a law")
    p.add_argument("law", choices=("blocks", "xi-prior", "xi-posterior", "new-blocks", "structural"))
    _add_model_args(p)
    _add_output_args(p)
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--max-xi", type=int, default=20)
    p.add_argument("--grid", type=int, default=9)
    p.set_defaults(func=cmd_dist)

    p = sub.add_parser("sample", help="draw random partitions or box-1 frequencies")
    p.add_argument("kind", choices=("grow", "two-stage", "structural"))
    _add_model_args(p)
    _add_output_args(p)
    p.add_argument("--n", type=int)
    p.add_argument("--replicates", type=int, default=1)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("convert", help="convert between (gamma, psi) and (gamma, zeta)")
    _add_model_args(p)
    _add_output_args(p)
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("verify", help="run an identity-checking suite")
    p.add_argument("suite", choices=("normalization", "addition", "mixture", "bayes", "multistep",
                                     "structural"))
    _add_model_args(p)
    _add_output_args(p)
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--xi", type=int)
    p.add_argument("--xi-max", type=int, default=10**5)
    p.add_argument("--y", type=float)
    p.add_argument("--counts")
    p.set_defaults(func=cmd_verify)
    return parser


def _validate_indices(args):
    for name in ("n", "k", "m", "xi", "replicates", "grid"):
        v = getattr(args, name, None)
        if v is not None and v < (0 if name == "m" else 1):
            raise UsageError(f"--{name} must be positive, got {v}")
    if args.command == "dist" and args.law in ("blocks", "xi-posterior", "new-blocks") and args.n is None:
        raise UsageError(f"dist {args.law} needs --n")
    if args.command == "verify" and args.suite in ("mixture", "bayes") and args.n is None:
        raise UsageError(f"verify {args.suite} needs --n")


def _to_csv(rec) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    if isinstance(rec, list):
        keys = sorted({k for r in rec for k in r})
        writer.writerow(keys)
        for r in rec:
            writer.writerow([json.dumps(r[k]) if isinstance(r.get(k), list) else r.get(k, "") for k in keys])
    elif "rows" in rec:
        writer.writerow(["x", "p", "p_float", "tail_bound"])
        for r in rec["rows"]:
            writer.writerow([r["x"], r["p"], r["p_float"], ""])
        writer.writerow(["total", rec["normalization"]["total"], "", rec["normalization"]["tail_bound"]])
    elif "checks" in rec:
        writer.writerow(["check", "ok", "residual", "details"])
        for c in rec["checks"]:
            writer.writerow([c["check"], c["ok"], c["residual"], json.dumps(c["details"])])
    else:
        writer.writerow(list(rec))
        writer.writerow([json.dumps(v) if isinstance(v, (dict, list)) else v for v in rec.values()])
    return buf.getvalue()


def render(rec, output: str) -> str:
    if output == "csv":
        return _to_csv(rec)
    if isinstance(rec, list):
        return "".join(json.dumps(r, ensure_ascii=False) + "\n" for r in rec)
    return json.dumps(rec, ensure_ascii=False, indent=2) + "\n"


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _validate_indices(args)
        rec, code = args.func(args)
    except (UsageError, DomainError, SeriesConvergenceError, ValueError) as exc:
        print(f"gnedin-fisher: error: {exc}", file=sys.stderr)
        return 2
    text = render(rec, args.output)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
