"""Deterministic JSON reports.

Every polynomial is emitted in canonical text together with its ring
declaration, so the report re-parses to exactly the objects that produced it.
Floats serialize through repr (shortest round-trip), complex values as
[re, im] pairs, and all section/key orders are fixed by construction, so the
same run with the same seed writes byte-identical files.
"""

from __future__ import annotations

import json
from pathlib import Path

from .ratfn import RatFn
from .rings import MPoly


def poly_entry(p: MPoly) -> dict:
    return {
        "vars": list(p.ring.variables),
        "params": list(p.ring.parameters),
        "poly": str(p),
    }


def ratfn_entry(r: RatFn) -> dict:
    return {
        "vars": list(r.ring.variables),
        "params": list(r.ring.parameters),
        "num": str(r.num),
        "den": str(r.den),
        "text": str(r),
    }


def complex_entry(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


def emit_report(report: dict, path) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_text(render_report(report), encoding="utf-8")


def render_report(report: dict) -> str:
    return json.dumps(report, indent=2, ensure_ascii=True, allow_nan=False) + "\n"
