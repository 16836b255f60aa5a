"""Report assembly: one structure rendered as JSON or markdown, plus a linter."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

from . import __version__
from .chern import (
    MonadSignature,
    cohomology_invariants,
    dry_check,
    dry_threshold,
    kernel_invariants,
)
from .hypersurface import HypersurfaceSpec

# verdict strings that must carry a certificate or a proof-log pointer
CERTIFIED_VERDICTS = {"violated", "holds", "stable (Hoppe)", "K stable (Hoppe)", "pass", "fail"}

THRESHOLD_NOTE = (
    "threshold = c2(TX)/12 = (d^2 - 5d + 10)/12; the alternative reading r^2/12 is rejected "
    "because the expected values 1/2 (d=4) and 5/6 (d=5) equal 6/12 and 10/12"
)
SECTIONS_NOTE = (
    "four linear sections are used although h0(O_X(1)) = 5; the construction only needs them "
    "linearly independent with no common zero on X"
)
SMOOTHNESS_NOTE = "smoothness of the user-supplied equation is assumed, not certified"


def frac(x) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def dry_row(sig: MonadSignature, d: int, bundle: str) -> dict:
    """One strong-Bogomolov comparison, with its arithmetic as certificate."""
    if bundle == "E":
        inv = cohomology_invariants(sig)
    elif bundle == "K":
        inv = kernel_invariants(sig)
    else:
        raise ValueError(f"bundle must be E or K, not {bundle!r}")
    v = dry_check(inv, HypersurfaceSpec(d=d))
    return {
        "signature": list(sig.as_tuple()),
        "degree": d,
        "bundle": bundle,
        "rank": inv.rank,
        "c1": inv.c1,
        "c2": frac(inv.c2),
        "delta": frac(inv.delta),
        "threshold": frac(v.threshold),
        "verdict": v.verdict,
        "certificate": {
            "delta": f"(2*{inv.rank}*{frac(inv.c2)} - {inv.rank - 1}*({inv.c1})^2)/{inv.rank}^2 = {frac(inv.delta)}",
            "threshold": f"({d}^2 - 5*{d} + 10)/12 = {frac(dry_threshold(d))}",
            "margin": frac(v.margin),
        },
    }


COUNTEREXAMPLES = ((6, "E"), (4, "K"), (5, "K"))


def counterexample_rows() -> list[dict]:
    sig = MonadSignature(1, 4, 1)
    return [dry_row(sig, d, bundle) for d, bundle in COUNTEREXAMPLES]


@dataclass
class Report:
    command: str
    inputs: dict
    results: dict
    passed: bool = True
    assumptions: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "tool": "monadws",
            "version": __version__,
            "command": self.command,
            "inputs": self.inputs,
            "results": self.results,
            "assumptions": sorted(set(self.assumptions)),
            "status": "pass" if self.passed else "fail",
        }


def render_json(report: Report) -> str:
    return json.dumps(report.to_json(), indent=2, sort_keys=True) + "\n"


def _cell(v) -> str:
    if isinstance(v, str):
        return v.replace("|", "\\|")
    return json.dumps(v, sort_keys=True).replace("|", "\\|")


def _is_table(v) -> bool:
    return isinstance(v, list) and bool(v) and all(isinstance(r, dict) for r in v)


def _table(rows: list[dict]) -> list[str]:
    cols: list[str] = []
    for r in rows:
        cols.extend(k for k in r if k not in cols)
    out = ["| " + " | ".join(cols) + " |", "|" + "---|" * len(cols)]
    out += ["| " + " | ".join(_cell(r.get(k, "")) for k in cols) + " |" for r in rows]
    return out


def _block(key: str, value, level: int) -> list[str]:
    if _is_table(value):
        return [f"{'#' * level} {key}", ""] + _table(value) + [""]
    if isinstance(value, dict):
        scalars = {k: v for k, v in value.items() if not isinstance(v, (dict, list))}
        nested = {k: v for k, v in value.items() if isinstance(v, (dict, list))}
        out = [f"{'#' * level} {key}", ""]
        out += [f"- **{k}**: {_cell(v)}" for k, v in sorted(scalars.items())]
        if scalars:
            out.append("")
        for k, v in sorted(nested.items()):
            out += _block(k, v, min(level + 1, 6))
        return out
    if isinstance(value, list):
        return [f"{'#' * level} {key}", ""] + [f"- {_cell(v)}" for v in value] + [""]
    return [f"- **{key}**: {_cell(value)}", ""]


def render_markdown(report: Report) -> str:
    data = report.to_json()
    lines = [f"# monadws {data['command']}", "", f"- **status**: {data['status']}", f"- **version**: {data['version']}", ""]
    lines += _block("inputs", data["inputs"], 2)
    for key in sorted(data["results"]):
        lines += _block(key, data["results"][key], 2)
    if data["assumptions"]:
        lines += ["## assumptions", ""] + [f"- {a}" for a in data["assumptions"]] + [""]
    return "\n".join(lines).rstrip() + "\n"


def render(report: Report, fmt: str) -> str:
    if fmt == "json":
        return render_json(report)
    if fmt == "md":
        return render_markdown(report)
    raise ValueError(f"unknown format {fmt!r}")


def lint_report(report: Report | dict) -> list[str]:
    """Paths of verdicts that lack a sibling ``certificate`` or ``proof_log``."""
    data = report.to_json() if isinstance(report, Report) else report
    problems: list[str] = []

    def walk(node, path):
        if isinstance(node, dict):
            verdict = node.get("verdict")
            if isinstance(verdict, str) and verdict in CERTIFIED_VERDICTS:
                # a node carrying goal and steps is itself a proof log
                if not ({"certificate", "certificates", "proof_log"} & node.keys() or {"goal", "steps"} <= node.keys()):
                    problems.append(f"{path}: verdict {verdict!r} has no certificate")
            for k, v in node.items():
                walk(v, f"{path}.{k}")
        elif isinstance(node, list):
            for i, v in enumerate(node):
                walk(v, f"{path}[{i}]")

    walk(data.get("results", {}), "results")
    return problems
