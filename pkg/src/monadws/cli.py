"""Command line front end.

Exit codes: 0 success, 1 usage error, 2 verification failure, 3 cap exceeded.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .chase import replay, stability_log_json
from .chern import (
    MonadSignature,
    cohomology_invariants,
    delta_min_over_family,
    family_delta,
    floystad_min_b,
    kernel_invariants,
    normalization_twist,
    s20_members,
    slope,
)
from .exact import MultiPoly, format_poly, parse_poly
from .hypersurface import HypersurfaceSpec
from .monad import LinearMonad, build_instanton_monad, check_complex, check_ranks, convention_change, eq8_monad
from .report import (
    SECTIONS_NOTE,
    SMOOTHNESS_NOTE,
    THRESHOLD_NOTE,
    Report,
    counterexample_rows,
    dry_row,
    frac,
    lint_report,
    render,
)
from .sections import h0_cohomology, h0_dual_kernel, h0_kernel, stability_E

# caps for symbolic subcommands; --force lifts all of them
CAPS = {"c": 8, "twist": 5, "degree": 10}

EXIT_OK, EXIT_USAGE, EXIT_VERIFY, EXIT_CAP = 0, 1, 2, 3


class UsageError(Exception):
    pass


class CapExceeded(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# --- inputs ------------------------------------------------------------------------


def _read_poly(path: Path) -> MultiPoly:
    try:
        return parse_poly(path.read_text())
    except OSError as exc:
        raise UsageError(f"cannot read polynomial file {path}: {exc}") from None


def load_spec(args) -> HypersurfaceSpec:
    """Hypersurface from ``--hypersurface fermat`` or a JSON config block."""
    source = args.hypersurface
    if source == "fermat":
        if args.degree is None:
            raise UsageError("--degree is required")
        return HypersurfaceSpec.fermat(args.degree)
    path = Path(source)
    try:
        block = json.loads(path.read_text())
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot read hypersurface config {path}: {exc}") from None
    try:
        d = int(block["degree"])
        if args.degree is not None and args.degree != d:
            raise UsageError(f"--degree {args.degree} disagrees with config degree {d}")
        base = path.parent
        eq = block.get("equation", "fermat")
        f = HypersurfaceSpec.fermat(d).f if eq == "fermat" else _read_poly(base / eq)
        secs = block.get("sections", "coordinates")
        if secs == "coordinates":
            sections = tuple(MultiPoly.var(i) for i in range(1, 5))
        else:
            sections = tuple(_read_poly(base / s) for s in secs)
        return HypersurfaceSpec(d=d, n=4, f=f, sections=sections, equation_source=str(eq))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, UsageError):
            raise
        raise UsageError(f"invalid hypersurface config: {exc}") from None


def _assumptions(spec: HypersurfaceSpec) -> list[str]:
    out = [SECTIONS_NOTE]
    if not spec.is_fermat:
        out.append(SMOOTHNESS_NOTE)
    return out


def _caps(args, c=None, d=None, t=None) -> None:
    if args.force:
        return
    for name, value, limit in (("c", c, CAPS["c"]), ("degree", d, CAPS["degree"]), ("twist", t, CAPS["twist"])):
        if value is not None and abs(value) > limit:
            raise CapExceeded(f"{name}={value} exceeds the cap {limit}; pass --force to override")


def _need(args, name: str):
    value = getattr(args, name)
    if value is None:
        raise UsageError(f"--{name} is required")
    return value


def _signature(args) -> MonadSignature:
    if args.signature:
        try:
            a, b, c = (int(x) for x in args.signature.split(","))
            return MonadSignature(a, b, c)
        except ValueError as exc:
            raise UsageError(f"bad --signature {args.signature!r}: {exc}") from None
    c = _need(args, "c")
    if c < 1:
        raise UsageError("--c must be at least 1")
    return MonadSignature.instanton(c)


def _range(text: str, name: str) -> range:
    try:
        lo, hi = (int(x) for x in text.split(":"))
    except ValueError:
        raise UsageError(f"--{name} expects lo:hi") from None
    if lo > hi:
        raise UsageError(f"--{name} is empty")
    return range(lo, hi + 1)


# --- monad files -------------------------------------------------------------------


def monad_to_json(m: LinearMonad, certificates: dict) -> dict:
    spec = m.spec
    return {
        "signature": list(m.signature.as_tuple()),
        "convention": m.convention,
        "hypersurface": {
            "degree": spec.d,
            "equation": format_poly(spec.f),
            "sections": [format_poly(s) for s in spec.sections],
        },
        "alpha": [[format_poly(x) for x in row] for row in m.alpha],
        "beta": [[format_poly(x) for x in row] for row in m.beta],
        "certificates": certificates,
    }


def monad_from_json(data: dict) -> LinearMonad:
    try:
        hs = data["hypersurface"]
        spec = HypersurfaceSpec(
            d=int(hs["degree"]), n=4, f=parse_poly(hs["equation"]),
            sections=tuple(parse_poly(s) for s in hs["sections"]), equation_source="monad file",
        )
        alpha = tuple(tuple(parse_poly(x) for x in row) for row in data["alpha"])
        beta = tuple(tuple(parse_poly(x) for x in row) for row in data["beta"])
        return LinearMonad(MonadSignature(*data["signature"]), alpha, beta, spec, data.get("convention", "sec4"))
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"invalid monad file: {exc}") from None


def _load_monad(path: str) -> LinearMonad:
    try:
        return monad_from_json(json.loads(Path(path).read_text()))
    except OSError as exc:
        raise UsageError(f"cannot read monad file {path}: {exc}") from None
    except ValueError as exc:
        raise UsageError(f"invalid monad file {path}: {exc}") from None


def _certify(m: LinearMonad, strategy: str = "structural") -> dict:
    cc = check_complex(m)
    rc = check_ranks(m, strategy)
    return {"complex": cc.to_dict(), "ranks": rc.to_dict()}


# --- commands ----------------------------------------------------------------------


def _inv_block(inv, d) -> dict:
    out = {
        "rank": inv.rank,
        "c1": inv.c1,
        "c2": frac(inv.c2),
        "delta": frac(inv.delta),
        "slope_h_units": frac(slope(inv.rank, inv.c1, HypersurfaceSpec(d=d or 1)).h_units),
        "normalization_twist": normalization_twist(inv.rank, inv.c1),
    }
    if d is not None:
        out["slope_degree"] = frac(slope(inv.rank, inv.c1, HypersurfaceSpec(d=d)).degree)
    return out


def cmd_invariants(args):
    sig = _signature(args)
    a, b, c = sig.as_tuple()
    results: dict = {}
    if b > a + c:
        results["E"] = _inv_block(cohomology_invariants(sig), args.degree)
    if b > c:
        results["K"] = _inv_block(kernel_invariants(sig), args.degree)
    if not results:
        raise UsageError(f"signature {sig.as_tuple()} has no bundle of positive rank")
    results["floystad_min_b"] = {
        reading: {"min_b": floystad_min_b(a, c, 4, reading), "b_admissible": b >= floystad_min_b(a, c, 4, reading)}
        for reading in ("dim-X", "as-stated")
    }
    assumptions = []
    if args.degree is not None:
        results["dry"] = [dry_row(sig, args.degree, bun) for bun in ("E", "K") if bun in results]
        assumptions.append(THRESHOLD_NOTE)
    return Report("invariants", {"signature": [a, b, c], "degree": args.degree}, results, True, assumptions), EXIT_OK


def cmd_dry(args):
    sig = _signature(args)
    d = _need(args, "degree")
    bundles = ("E", "K") if args.bundle == "both" else (args.bundle,)
    try:
        rows = [dry_row(sig, d, bun) for bun in bundles]
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return Report("dry", {"signature": list(sig.as_tuple()), "degree": d, "bundle": args.bundle},
                  {"rows": rows}, True, [THRESHOLD_NOTE]), EXIT_OK


def cmd_table(args):
    return Report("table counterexamples", {"signature": [1, 4, 1]}, {"counterexamples": counterexample_rows()},
                  True, [THRESHOLD_NOTE]), EXIT_OK


def cmd_sweep(args):
    cs, ds = _range(args.c_range, "c-range"), _range(args.d_range, "d-range")
    if cs.start < 1 or ds.start < 1:
        raise UsageError("ranges must start at 1 or above")
    grid = [dry_row(MonadSignature.instanton(c), d, "K") for c in cs for d in ds]
    c_star, delta_star = delta_min_over_family(cs.stop - 1)
    s20_d = args.s20_degree if args.s20_degree is not None else ds.start
    s20_c = args.s20_cmax if args.s20_cmax is not None else cs.stop - 1
    members = s20_members(s20_d, s20_c)
    results = {
        "grid": grid,
        "family_minimum": {
            "c": c_star,
            "delta": frac(delta_star),
            "c_max": cs.stop - 1,
            "values": {str(c): frac(family_delta(c)) for c in range(1, cs.stop)},
        },
        "s20": {"degree": s20_d, "c_max": s20_c,
                "members": [{"value": m.value, "signature": list(m.signature.as_tuple())} for m in members]},
        "summary": {
            "cells": len(grid),
            "violated": sum(r["verdict"] == "violated" for r in grid),
            "all_d_ge_7_violated": all(r["verdict"] == "violated" for r in grid if r["degree"] >= 7),
        },
    }
    inputs = {"c_range": args.c_range, "d_range": args.d_range, "s20_degree": s20_d, "s20_cmax": s20_c}
    return Report("sweep", inputs, results, True, [THRESHOLD_NOTE]), EXIT_OK


def _build(args, spec) -> LinearMonad:
    c = _need(args, "c")
    if c < 1:
        raise UsageError("--c must be at least 1")
    if args.convention == "eq8":
        if c != 1:
            raise UsageError("the eq8 convention exists only for c = 1")
        return eq8_monad(spec)
    return build_instanton_monad(c, spec)


def cmd_monad_build(args):
    spec = load_spec(args)
    _caps(args, c=args.c, d=spec.d)
    m = _build(args, spec)
    certs = _certify(m)
    if args.convention == "eq8":
        try:
            certs["convention_change"] = convention_change(spec).to_dict()
        except LookupError as exc:
            certs["convention_change"] = {"error": str(exc)}
    ok = certs["complex"]["ok"] and certs["ranks"]["ok"]
    doc = monad_to_json(m, certs)
    return doc, (EXIT_OK if ok else EXIT_VERIFY)


def cmd_monad_check(args):
    if not args.input:
        raise UsageError("--in is required")
    m = _load_monad(args.input)
    _caps(args, c=m.signature.c, d=m.spec.d)
    certs = _certify(m, args.strategy)
    ok = certs["complex"]["ok"] and certs["ranks"]["ok"]
    verdict = "pass" if ok else "fail"
    results = {"check": {"verdict": verdict, "certificates": certs}}
    if not ok:
        results["check"]["first_failure"] = "complex" if not certs["complex"]["ok"] else "ranks"
    rep = Report("monad check", {"monad": args.input, "strategy": args.strategy}, results, ok, _assumptions(m.spec))
    return rep, (EXIT_OK if ok else EXIT_VERIFY)


def cmd_sections(args):
    spec = load_spec(args)
    c, t = _need(args, "c"), _need(args, "twist")
    _caps(args, c=c, d=spec.d, t=t)
    m = build_instanton_monad(c, spec)
    if args.sheaf == "K":
        space = h0_kernel(m, t, basis=args.basis)
    elif args.sheaf == "E":
        space = h0_cohomology(m, t, basis=args.basis)
    else:
        if args.basis:
            raise UsageError("--basis is not available for Kdual")
        space = h0_dual_kernel(m, t)
    inputs = {"c": c, "degree": spec.d, "sheaf": args.sheaf, "twist": t, "basis": args.basis}
    return Report("sections", inputs, {"sections": space.to_dict()}, True, _assumptions(spec)), EXIT_OK


def cmd_chase(args):
    if args.replay:
        try:
            log = json.loads(Path(args.replay).read_text())
        except (OSError, ValueError) as exc:
            raise UsageError(f"cannot read proof log {args.replay}: {exc}") from None
        rep = replay(log)
        results = {"replay": {"verdict": "pass" if rep.ok else "fail", "proof_log": args.replay, **rep.to_dict()}}
        return Report("chase", {"replay": args.replay}, results, rep.ok), (EXIT_OK if rep.ok else EXIT_VERIFY)
    spec = load_spec(args)
    c = _need(args, "c")
    if c < 1:
        raise UsageError("--c must be at least 1")
    _caps(args, c=c, d=spec.d)
    log = stability_log_json(c, spec)
    rep = replay(log, spec)
    if args.emit:
        Path(args.emit).write_text(json.dumps(log, indent=2, sort_keys=True) + "\n")
    rules: dict[str, int] = {}
    for st in log["steps"]:
        rules[st["rule"]] = rules.get(st["rule"], 0) + 1
    results = {
        "chase": {
            "verdict": log["verdict"] if rep.ok else "fail",
            "proof_log": args.emit or "inline",
            "goal": log["goal"]["text"],
            "steps": len(log["steps"]),
            "rules": rules,
            "replay": rep.to_dict(),
            "remarks": log["remarks"],
        }
    }
    if not args.emit:
        results["chase"]["log"] = log
    return Report("chase", {"c": c, "degree": spec.d}, results, rep.ok, _assumptions(spec)), (
        EXIT_OK if rep.ok else EXIT_VERIFY
    )


def cmd_verify(args):
    if args.monad:
        m = _load_monad(args.monad)
        spec = m.spec
        if args.degree is not None and args.degree != spec.d:
            raise UsageError("--degree disagrees with the monad file")
    else:
        spec = load_spec(args)
        m = _build(args, spec)
    _caps(args, c=m.signature.c, d=spec.d)

    stages: list[dict] = []
    cc = check_complex(m)
    stages.append({"stage": "complex", "ok": cc.ok, "certificate": cc.to_dict()})
    if cc.ok:
        rc = check_ranks(m)
        stages.append({"stage": "ranks", "ok": rc.ok, "certificate": rc.to_dict()})
    if all(s["ok"] for s in stages):
        if not m.signature.is_instanton:
            stages.append({"stage": "stability_E", "ok": False,
                           "certificate": {"error": "stability needs a (c, 2+2c, c) monad"}})
        else:
            sv = stability_E(m)
            stages.append({"stage": "stability_E", "ok": sv.stable, "verdict": sv.verdict,
                           "certificate": sv.to_dict()["certificate"]})
    if all(s["ok"] for s in stages):
        log = stability_log_json(m.signature.c, spec)
        rp = replay(log, spec)
        stages.append({"stage": "stability_K", "ok": rp.ok, "verdict": log["verdict"] if rp.ok else "fail",
                       "proof_log": "inline", "certificate": {"replay": rp.to_dict(), "steps": len(log["steps"])}})
    ok = all(s["ok"] for s in stages)
    result = {"verdict": "pass" if ok else "fail", "certificate": "see stages", "stages": stages}
    if not ok:
        result["first_failure"] = next(s["stage"] for s in stages if not s["ok"])
    inputs = {"c": m.signature.c, "degree": spec.d, "monad": args.monad or "built"}
    return Report("verify", inputs, {"verify": result}, ok, _assumptions(spec)), (EXIT_OK if ok else EXIT_VERIFY)


# --- parser ------------------------------------------------------------------------


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--degree", type=int, help="degree d of the hypersurface")
    p.add_argument("--c", type=int, help="monad parameter c of (c, 2+2c, c)")
    p.add_argument("--hypersurface", default="fermat", help="'fermat' or a JSON config block")
    p.add_argument("--out", help="write the report here instead of stdout")
    p.add_argument("--format", choices=("json", "md"), default="json")
    p.add_argument("--force", action="store_true", help="lift the size caps")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(prog="monadws", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser, required=True)

    p = sub.add_parser("invariants", parents=[common], help="rank, Chern classes, discriminant, slope")
    p.add_argument("--signature", help="a,b,c (default: the (c, 2+2c, c) family)")
    p.set_defaults(func=cmd_invariants)

    p = sub.add_parser("dry", parents=[common], help="strong Bogomolov comparison")
    p.add_argument("--signature")
    p.add_argument("--bundle", choices=("E", "K", "both"), default="both")
    p.set_defaults(func=cmd_dry)

    p = sub.add_parser("table", help="reference tables")
    tsub = p.add_subparsers(dest="table", parser_class=_Parser, required=True)
    t = tsub.add_parser("counterexamples", parents=[common])
    t.set_defaults(func=cmd_table)

    p = sub.add_parser("sweep", parents=[common], help="grid of verdicts over c and d")
    p.add_argument("--c-range", default="1:10")
    p.add_argument("--d-range", default="4:12")
    p.add_argument("--s20-degree", type=int)
    p.add_argument("--s20-cmax", type=int)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("monad", help="build or check monads")
    msub = p.add_subparsers(dest="action", parser_class=_Parser, required=True)
    b = msub.add_parser("build", parents=[common])
    b.add_argument("--convention", choices=("sec4", "eq8"), default="sec4")
    b.set_defaults(func=cmd_monad_build)
    k = msub.add_parser("check", parents=[common])
    k.add_argument("--in", dest="input")
    k.add_argument("--strategy", choices=("structural", "probabilistic"), default="structural")
    k.set_defaults(func=cmd_monad_check)

    p = sub.add_parser("sections", parents=[common], help="h0 of twists of K, E, K*")
    p.add_argument("--sheaf", choices=("K", "E", "Kdual"), required=True)
    p.add_argument("--twist", type=int)
    p.add_argument("--basis", action="store_true")
    p.set_defaults(func=cmd_sections)

    p = sub.add_parser("chase", parents=[common], help="mechanized stability proof for K")
    p.add_argument("--emit", help="write the proof log here")
    p.add_argument("--replay", help="replay an existing proof log")
    p.set_defaults(func=cmd_chase)

    p = sub.add_parser("verify", parents=[common], help="all certificates for one monad")
    p.add_argument("--monad", help="monad file to verify instead of the built one")
    p.add_argument("--convention", choices=("sec4", "eq8"), default="sec4")
    p.set_defaults(func=cmd_verify)
    return parser


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        result, code = args.func(args)
        if isinstance(result, Report):
            problems = lint_report(result)
            if problems:
                raise RuntimeError("report lint failed: " + "; ".join(problems))
            _emit(render(result, args.format), args.out)
        else:
            _emit(json.dumps(result, indent=2, sort_keys=True) + "\n", args.out)
        if code == EXIT_VERIFY:
            print("monadws: verification failed", file=sys.stderr)
        return code
    except (UsageError, ValueError) as exc:
        print(f"monadws: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CapExceeded as exc:
        print(f"monadws: {exc}", file=sys.stderr)
        return EXIT_CAP


if __name__ == "__main__":
    sys.exit(main())
