"""Command-line frontend: parse specs, run diagnostics, emit reports.

Usage examples:

    seqlab density --set squares --modulus log1p --n 1000000
    seqlab density --set evens --n 100000
    seqlab membership --seq const:3 --limit 3 --mode density --modulus id
    seqlab membership --witness half-plateau --mode mean --blocks 10
    seqlab norm --kind luxemburg --orlicz poly:2 --seq list:3,4
    seqlab norm --kind block-mean --theta powers2 --blocks 4 --seq const:1
    seqlab witness half-plateau --nu 1 --rho 1 --blocks 10
    seqlab witness block-spike --theta powers2 --blocks 12 --orlicz linear
    seqlab witness extract --seq spike:set=squares,base=2,delta=1 --modulus id --n 100000
    seqlab witness probe --seq spike:set=squares,base=2,delta=1 --probe-moduli id,log1p --n 100000
    seqlab check --modulus id

Reports are deterministic: identical invocations produce byte-identical JSON
(stable field order, floats at 12 significant digits).  Exit status encodes
only I/O and spec validity; mathematical verdicts live in the payload.
Timing goes to stderr so it never perturbs the canonical output.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import density as density_mod
from . import membership as membership_mod
from . import witnesses as witnesses_mod
from .core import make_index_set, make_lacunary
from .errors import (CauchyConstructionError, SeqlabError,
                     WitnessExtractionError)
from .matrices import make_matrix
from .membership import SpaceParams
from .modulus import check_modulus_axioms, make_modulus
from .orlicz import (block_mean_norm, check_orlicz_axioms, luxemburg_norm,
                     make_family, make_orlicz, make_rho, orlicz_norm)
from .sequences import make_sequence

SCHEMA_VERSION = "seqlab/1"


# -----------------------------
# canonical rendering
# -----------------------------

def _canon(obj):
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return _canon(dataclasses.asdict(obj))
    if isinstance(obj, dict):
        return {str(k): _canon(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_canon(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_canon(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if not math.isfinite(v):
            return str(v)
        return float(f"{v:.12g}")
    if obj is None or isinstance(obj, str):
        return obj
    return str(obj)


def render_json(payload: dict) -> str:
    return json.dumps(_canon(payload), sort_keys=True, indent=2) + "\n"


def _fmt_scalar(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return f"{v:.12g}"
    if v is None:
        return ""
    return str(v)


def _flatten(obj, prefix: str, rows: list):
    if isinstance(obj, dict):
        for k in sorted(obj):
            _flatten(obj[k], f"{prefix}.{k}" if prefix else str(k), rows)
    elif isinstance(obj, list):
        if all(not isinstance(v, (dict, list)) for v in obj):
            for i, v in enumerate(obj, start=1):
                rows.append((prefix, str(i), _fmt_scalar(v)))
        else:
            for i, v in enumerate(obj, start=1):
                _flatten(v, f"{prefix}[{i}]", rows)
    else:
        rows.append((prefix, "", _fmt_scalar(obj)))


def render_csv(payload: dict) -> str:
    rows: list[tuple[str, str, str]] = []
    _flatten(_canon(payload), "", rows)
    lines = ["field,index,value"]
    for field, idx, val in rows:
        if "," in val or '"' in val:
            val = '"' + val.replace('"', '""') + '"'
        lines.append(f"{field},{idx},{val}")
    return "\n".join(lines) + "\n"


def render_table(payload: dict) -> str:
    flat: list[tuple[str, str]] = []

    def walk(obj, prefix):
        if isinstance(obj, dict):
            for k in sorted(obj):
                walk(obj[k], f"{prefix}.{k}" if prefix else str(k))
        elif isinstance(obj, list):
            if all(not isinstance(v, (dict, list)) for v in obj):
                flat.append((prefix, ", ".join(_fmt_scalar(v) for v in obj)))
            else:
                for i, v in enumerate(obj, start=1):
                    walk(v, f"{prefix}[{i}]")
        else:
            flat.append((prefix, _fmt_scalar(obj)))

    walk(_canon(payload), "")
    width = max((len(k) for k, _ in flat), default=0)
    return "\n".join(f"{k.ljust(width)}  {v}" for k, v in flat) + "\n"


def _emit(payload: dict, fmt: str, out: str | None) -> None:
    text = {"json": render_json, "csv": render_csv, "table": render_table}[fmt](payload)
    if out:
        Path(out).write_text(text)
    sys.stdout.write(text)


def _report(subcommand: str, inputs: dict, results: dict, warnings: list[str]) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "subcommand": subcommand,
        "inputs": inputs,
        "results": results,
        "warnings": list(warnings),
    }


def _density_payload(d) -> dict:
    return {
        "checkpoints": list(d.checkpoints),
        "ratios": list(d.ratios),
        "value": d.value,
        "verdict": d.verdict,
        "tol": d.tol,
    }


def _membership_payload(rep) -> dict:
    out = {
        "mode": rep.mode,
        "verdict": rep.verdict,
        "evidence": rep.evidence,
    }
    if rep.block_residuals is not None:
        out["block_residuals"] = list(rep.block_residuals)
    if rep.exceedance_ratios is not None:
        out["exceedance_ratios"] = list(rep.exceedance_ratios)
    if rep.exceedance_counts is not None:
        out["exceedance_counts"] = list(rep.exceedance_counts)
    if rep.density is not None:
        out["density"] = _density_payload(rep.density)
    return out


# -----------------------------
# subcommand handlers
# -----------------------------

def _cmd_density(args) -> tuple[dict, list[str]]:
    a = make_index_set(args.set)
    if args.modulus:
        f = make_modulus(args.modulus)
        est = density_mod.f_density(a, f, args.n, args.tol)
    else:
        est = density_mod.natural_density(a, args.n, args.tol)
    inputs = {"set": args.set, "modulus": args.modulus, "n": args.n, "tol": args.tol}
    return _report("density", inputs, _density_payload(est), []), []


def _resolve_membership(args):
    warnings: list[str] = []
    if args.witness:
        if args.witness == "half-plateau":
            x, params = witnesses_mod.gen_half_plateau_instance(args.nu, args.rho_value, args.blocks)
        else:
            scheme = make_lacunary(args.theta, args.blocks)
            inst = witnesses_mod.gen_block_spike_instance(
                make_orlicz(args.orlicz), scheme, args.rho_value, args.alpha)
            x, params = inst.x, inst.params
            warnings.append(witnesses_mod.BLOCK_SPIKE_DISCREPANCY)
        return x, params, warnings
    scheme = make_lacunary(args.theta, args.blocks)
    n = args.n
    if n is None:
        if args.mode in ("mean", "count"):
            # limit estimation scans a density trail, which needs room
            n = max(scheme.k_max, 1000) if args.estimate_limit else scheme.k_max
        else:
            n = max(scheme.k_max, 100_000)
    x = make_sequence(args.seq, n)
    params = SpaceParams(
        matrix=make_matrix(args.matrix),
        family=make_family(args.orlicz),
        scheme=scheme,
        alpha=args.alpha,
        rho=make_rho(args.rho),
        limit=args.limit,
        eps=args.eps,
    )
    if args.estimate_limit:
        f = make_modulus(args.modulus or "id")
        est = membership_mod.stat_limit_estimate(x, params, f, tol=args.tol)
        if est is None:
            raise SeqlabError("no candidate limit passed the density test; supply --limit")
        params = dataclasses.replace(params, limit=est)
    elif params.limit is None:
        raise SeqlabError("membership needs --limit or --estimate-limit")
    return x, params, warnings


def _cmd_membership(args) -> tuple[dict, list[str]]:
    x, params, warnings = _resolve_membership(args)
    if args.mode == "mean":
        rep = membership_mod.mean_membership(x, params, args.tol)
    elif args.mode == "count":
        rep = membership_mod.count_membership(x, params, args.tol)
    else:
        f = make_modulus(args.modulus or "id")
        rep = membership_mod.density_membership(x, params, f, args.tol)
    warnings = warnings + list(rep.warnings)
    inputs = {
        "seq": args.seq, "witness": args.witness, "mode": args.mode,
        "matrix": args.matrix, "orlicz": args.orlicz, "theta": args.theta,
        "blocks": args.blocks, "alpha": args.alpha, "rho": args.rho,
        "limit": params.limit, "eps": params.eps, "tol": args.tol,
        "modulus": args.modulus, "n": len(x),
    }
    return _report("membership", inputs, _membership_payload(rep), warnings), warnings


def _cmd_norm(args) -> tuple[dict, list[str]]:
    x = make_sequence(args.seq, args.n)
    inputs = {
        "kind": args.kind, "orlicz": args.orlicz, "seq": args.seq,
        "theta": args.theta, "blocks": args.blocks, "n": len(x),
    }
    if args.kind == "block-mean":
        scheme = make_lacunary(args.theta, args.blocks)
        results = {"value": block_mean_norm(x, scheme), "cuts": list(scheme.cuts)}
        return _report("norm", inputs, results, []), []
    family = make_family(args.orlicz)
    if args.kind == "luxemburg":
        tol = args.tol if args.tol is not None else 1e-8
        inputs["tol"] = tol
        results = {"value": luxemburg_norm(family, x, tol)}
        return _report("norm", inputs, results, []), []
    tol = args.tol if args.tol is not None else 1e-6
    inputs["tol"] = tol
    res = orlicz_norm(family, x, tol)
    results = {
        "value": res.value,
        "scale": res.scale,
        "attained": res.attained,
        "iterations": res.iterations,
    }
    return _report("norm", inputs, results, []), []


def _witness_params(args, n: int) -> SpaceParams:
    blocks = args.blocks if args.blocks is not None else max(1, int(math.log2(max(2, n))))
    scheme = make_lacunary(args.theta, blocks)
    return SpaceParams(
        matrix=make_matrix(args.matrix),
        family=make_family(args.orlicz),
        scheme=scheme,
        alpha=args.alpha,
        rho=make_rho(args.rho),
        limit=args.limit,
        eps=args.eps,
    )


def _cmd_witness(args) -> tuple[dict, list[str]]:
    warnings: list[str] = []
    inputs = {
        "task": args.task, "seq": args.seq, "modulus": args.modulus,
        "depth": args.depth, "nu": args.nu, "rho": args.rho,
        "blocks": args.blocks, "theta": args.theta, "orlicz": args.orlicz,
        "alpha": args.alpha, "limit": args.limit, "eps": args.eps,
        "tol": args.tol, "n": args.n, "probe_moduli": args.probe_moduli,
    }

    if args.task == "half-plateau":
        x, params = witnesses_mod.gen_half_plateau_instance(
            args.nu, args.rho_value, args.blocks if args.blocks is not None else 10)
        rep = witnesses_mod.half_plateau_report(x, params, args.tol)
        results = {
            "cuts": list(params.scheme.cuts),
            "eps": params.eps,
            "residuals": list(rep.residuals),
            "residual_bounds": list(rep.residual_bounds),
            "bound_satisfied": rep.bound_satisfied,
            "exceedance_ratios": list(rep.exceedance_ratios),
            "mean": _membership_payload(rep.mean_report),
            "count": _membership_payload(rep.count_report),
            "matches_expected": rep.matches_expected,
        }
        return _report("witness", inputs, results, warnings), warnings

    if args.task == "block-spike":
        scheme = make_lacunary(args.theta, args.blocks if args.blocks is not None else 12)
        inst = witnesses_mod.gen_block_spike_instance(
            make_orlicz(args.orlicz), scheme, args.rho_value, args.alpha)
        rep = witnesses_mod.block_spike_report(inst, args.tol)
        warnings.extend(rep.warnings)
        results = {
            "cuts": list(scheme.cuts),
            "spike_heights": list(inst.spike_heights),
            "residuals": list(rep.residuals),
            "residuals_at_least_one": rep.residuals_at_least_one,
            "exceedance_ratios": list(rep.exceedance_ratios),
            "exceedance_counts": list(rep.exceedance_counts),
            "one_spike_per_block": rep.one_spike_per_block,
            "mean": _membership_payload(rep.mean_report),
            "count": _membership_payload(rep.count_report),
            "matches_expected": rep.matches_expected,
        }
        return _report("witness", inputs, results, warnings), warnings

    if args.seq is None:
        raise SeqlabError(f"witness task {args.task!r} needs --seq")
    n = args.n if args.n is not None else 100_000
    x = make_sequence(args.seq, n)
    params = _witness_params(args, len(x))

    if args.task == "probe":
        if not args.probe_moduli:
            raise SeqlabError("witness probe needs --probe-moduli")
        moduli = [make_modulus(tok) for tok in args.probe_moduli.split(",") if tok.strip()]
        rep = witnesses_mod.multi_modulus_probe(x, params, moduli, args.tol)
        results = {
            "limits": rep.limits,
            "all_agree": rep.all_agree,
            "reference": rep.reference,
            "norm_convergence": rep.norm_convergence,
        }
        return _report("witness", inputs, results, warnings), warnings

    f = make_modulus(args.modulus or "id")
    if args.task == "extract":
        if params.limit is None:
            est = membership_mod.stat_limit_estimate(x, params, f, tol=args.tol)
            if est is None:
                raise SeqlabError("no candidate limit found; supply --limit")
            params = dataclasses.replace(params, limit=est)
        depth = args.depth if args.depth is not None else 5
        try:
            ws = witnesses_mod.extract_witness_set(x, params, f, depth, args.tol)
        except WitnessExtractionError as exc:
            results = {"failure": {"stuck_level": exc.stuck_level, "message": str(exc)},
                       "limit": params.limit}
            return _report("witness", inputs, results, warnings), warnings
        off = witnesses_mod.converge_off_witness(x, params, ws.members, 1.0 / depth)
        members = ws.members.members_upto(len(x))
        results = {
            "limit": params.limit,
            "thresholds": list(ws.thresholds),
            "witness_size": int(members.size),
            "witness_members_head": [int(v) for v in members[:500]],
            "density": _density_payload(ws.density),
            "off_tail_sup": ws.off_tail_sup,
            "off_check": {
                "passed": off.passed, "i0": off.i0,
                "tail_max": off.tail_max, "n_off": off.n_off,
            },
        }
        return _report("witness", inputs, results, warnings), warnings

    if args.task == "cauchy":
        depth = args.depth if args.depth is not None else 10
        base = membership_mod.stat_cauchy_check(x, params, f, tol=args.tol)
        results: dict = {"cauchy": base.cauchy, "anchor": base.anchor}
        if base.cauchy:
            try:
                nested = witnesses_mod.cauchy_limit_construction(x, params, f, depth, args.tol)
                results["limit"] = nested.value
                results["width"] = nested.width
                results["anchors"] = list(nested.anchors)
            except CauchyConstructionError as exc:
                results["failure"] = {"level": exc.level, "message": str(exc)}
        return _report("witness", inputs, results, warnings), warnings

    raise SeqlabError(f"unknown witness task {args.task!r}")


def _cmd_check(args) -> tuple[dict, list[str]]:
    if bool(args.modulus) == bool(args.orlicz):
        raise SeqlabError("check needs exactly one of --modulus or --orlicz")
    if args.modulus:
        report = check_modulus_axioms(make_modulus(args.modulus))
        kind, name = "modulus", args.modulus
    else:
        report = check_orlicz_axioms(make_orlicz(args.orlicz))
        kind, name = "orlicz", args.orlicz
    results = {
        "kind": kind,
        "name": name,
        "passed": report.passed,
        "axioms": {
            key: {"passed": chk.passed, "witness": chk.witness, "note": chk.note}
            for key, chk in report.checks().items()
        },
    }
    inputs = {"modulus": args.modulus, "orlicz": args.orlicz}
    return _report("check", inputs, results, []), []


# -----------------------------
# parser
# -----------------------------

def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("json", "csv", "table"), default="json")
    p.add_argument("--out", default=None, help="also write the report to this path")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="seqlab", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("density", help="natural or modulus-weighted density of an index set")
    p.add_argument("--set", required=True)
    p.add_argument("--modulus", default=None)
    p.add_argument("--n", type=int, default=100_000)
    p.add_argument("--tol", type=float, default=1e-2)
    _add_common(p)

    p = sub.add_parser("membership", help="block membership diagnostics")
    p.add_argument("--seq", default=None)
    p.add_argument("--witness", choices=("half-plateau", "block-spike"), default=None)
    p.add_argument("--mode", choices=("mean", "count", "density"), required=True)
    p.add_argument("--matrix", default="identity")
    p.add_argument("--orlicz", default="linear")
    p.add_argument("--theta", default="powers2")
    p.add_argument("--blocks", type=int, default=10)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--rho", default="const:1")
    p.add_argument("--nu", type=float, default=1.0)
    p.add_argument("--rho-value", type=float, default=1.0,
                   help="scalar rho for generated witness instances")
    p.add_argument("--limit", type=float, default=None, help="candidate limit L")
    p.add_argument("--estimate-limit", action="store_true")
    p.add_argument("--modulus", default=None)
    p.add_argument("--eps", type=float, default=0.1)
    p.add_argument("--tol", type=float, default=1e-2)
    p.add_argument("--n", type=int, default=None)
    _add_common(p)

    p = sub.add_parser("norm", help="Luxemburg, Orlicz, or block-mean norm")
    p.add_argument("--kind", choices=("luxemburg", "orlicz", "block-mean"), required=True)
    p.add_argument("--orlicz", default="poly:2")
    p.add_argument("--seq", required=True)
    p.add_argument("--theta", default="powers2")
    p.add_argument("--blocks", type=int, default=None)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--n", type=int, default=None)
    _add_common(p)

    p = sub.add_parser("witness", help="constructions and probes")
    p.add_argument("task", choices=("extract", "cauchy", "half-plateau", "block-spike", "probe"))
    p.add_argument("--seq", default=None)
    p.add_argument("--modulus", default=None)
    p.add_argument("--probe-moduli", default=None, help="comma list, e.g. id,log1p,pow:0.5")
    p.add_argument("--depth", type=int, default=None)
    p.add_argument("--nu", type=float, default=1.0)
    p.add_argument("--rho", default="const:1")
    p.add_argument("--rho-value", type=float, default=1.0)
    p.add_argument("--blocks", type=int, default=None)
    p.add_argument("--theta", default="powers2")
    p.add_argument("--orlicz", default="linear")
    p.add_argument("--matrix", default="identity")
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--limit", type=float, default=None)
    p.add_argument("--eps", type=float, default=0.1)
    p.add_argument("--tol", type=float, default=1e-2)
    p.add_argument("--n", type=int, default=None)
    _add_common(p)

    p = sub.add_parser("check", help="sampled axiom checks for moduli and Orlicz functions")
    p.add_argument("--modulus", default=None)
    p.add_argument("--orlicz", default=None)
    _add_common(p)

    return parser


_HANDLERS = {
    "density": _cmd_density,
    "membership": _cmd_membership,
    "norm": _cmd_norm,
    "witness": _cmd_witness,
    "check": _cmd_check,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    started = time.monotonic()
    try:
        payload, _ = _HANDLERS[args.command](args)
    except (SeqlabError, ValueError, ArithmeticError) as exc:
        print(f"seqlab: error: {exc}", file=sys.stderr)
        return 1
    _emit(payload, args.format, args.out)
    print(f"elapsed_ms={1000.0 * (time.monotonic() - started):.1f}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
