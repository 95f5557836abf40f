"""Problem files: the line-oriented input format of the engine.

    [mapping]
    n = 1
    family = weierstrass        # exp, rational, weierstrass, singular2-case1..case5, none
    param g2 = 4
    param g3 = 0
    [aat]
    G1 = <polynomial in L1, x1..xn, y1..yn, params>   # or: auto
    [options]
    tol = 1e-9
    samples = 100
    seed = 42

`#` starts a comment; parameter values are exact rationals.  `G_k = auto`
asks the built-in generator for the declared family's addition polynomials.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from . import naming
from .backends import make_backend
from .parsing import ParseError, parse_poly
from .rings import StructuralError, VarRing

_FAMILIES = (
    "exp",
    "rational",
    "weierstrass",
    "singular2-case1",
    "singular2-case2",
    "singular2-case3",
    "singular2-case4",
    "singular2-case5",
    "none",
)

_OPTION_TYPES = {
    "tol": float,
    "samples": int,
    "seed": int,
    "box": float,
    "period_box": float,
    "grid": int,
    "retries": int,
    "mode": str,
}


class ProblemError(StructuralError):
    """Malformed problem file."""


@dataclass
class Options:
    tol: float = 1e-9
    samples: int = 100
    seed: int = 42
    box: float | None = None
    period_box: float | None = None
    grid: int | None = None
    retries: int = 8
    mode: str = "exact-point"

    def to_json(self) -> dict:
        return {
            "tol": self.tol,
            "samples": self.samples,
            "seed": self.seed,
            "box": self.box,
            "period_box": self.period_box,
            "grid": self.grid,
            "retries": self.retries,
            "mode": self.mode,
        }


@dataclass
class ProblemSpec:
    n: int
    family: str
    params: dict  # name -> Fraction
    ring: VarRing
    aat_texts: list  # raw texts ('auto' resolved before storing)
    aat_polys: list  # MPoly with parameter values substituted
    options: Options
    source: str = ""

    def make_backend(self):
        if self.family == "none":
            raise ProblemError("this problem declares no numeric family")
        return make_backend(self.family, self.params)


def _parse_rational(text: str, where: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as err:
        raise ProblemError(f"bad rational value in {where}: {text!r}") from err


def parse_problem(text: str, source: str = "<string>") -> ProblemSpec:
    section = None
    mapping: dict = {"params": {}}
    aat_lines: dict = {}
    opts: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            if section not in ("mapping", "aat", "options"):
                raise ProblemError(f"{source}:{lineno}: unknown section [{section}]")
            continue
        if section is None:
            raise ProblemError(f"{source}:{lineno}: content before any section header")
        if "=" not in line:
            raise ProblemError(f"{source}:{lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        if section == "mapping":
            if key == "n":
                try:
                    mapping["n"] = int(value)
                except ValueError as err:
                    raise ProblemError(f"{source}:{lineno}: n must be an integer") from err
            elif key == "family":
                mapping["family"] = value
            elif key.startswith("param "):
                name = key[len("param ") :].strip()
                if not name.isidentifier():
                    raise ProblemError(f"{source}:{lineno}: bad parameter name {name!r}")
                mapping["params"][name] = _parse_rational(value, f"{source}:{lineno}")
            else:
                raise ProblemError(f"{source}:{lineno}: unknown mapping key {key!r}")
        elif section == "aat":
            if not (key.startswith("G") and key[1:].isdigit()):
                raise ProblemError(f"{source}:{lineno}: addition polynomials are named G1, G2, ...")
            aat_lines[int(key[1:])] = (value, lineno)
        else:
            if key not in _OPTION_TYPES:
                raise ProblemError(f"{source}:{lineno}: unknown option {key!r}")
            try:
                opts[key] = _OPTION_TYPES[key](value)
            except ValueError as err:
                raise ProblemError(f"{source}:{lineno}: bad value for {key}") from err
    if "n" not in mapping:
        raise ProblemError(f"{source}: missing 'n' in [mapping]")
    n = mapping["n"]
    if n < 1:
        raise ProblemError(f"{source}: n must be positive")
    family = mapping.get("family", "none")
    if family not in _FAMILIES:
        raise ProblemError(f"{source}: unknown family {family!r}")
    params = mapping["params"]
    options = Options(**opts)
    if options.mode not in ("exact-point", "numeric-reconstruct"):
        raise ProblemError(f"{source}: mode must be exact-point or numeric-reconstruct")

    ring = naming.problem_ring(n, tuple(sorted(params)))
    expected = set(range(1, n + 1))
    given = set(aat_lines)
    if given != expected:
        raise ProblemError(
            f"{source}: expected {n} addition polynomials G1..G{n}, got {sorted(given) or 'none'}"
        )
    texts = []
    polys = []
    auto_needed = any(aat_lines[k][0].strip() == "auto" for k in sorted(aat_lines))
    auto_polys = None
    if auto_needed:
        if family == "none":
            raise ProblemError(f"{source}: 'auto' needs a concrete family")
        from .generate import build_auto_aat  # deferred: generator pulls in elimination

        backend = make_backend(family, params)
        auto_polys = build_auto_aat(family, n, ring, backend, params, seed=options.seed)
    for k in sorted(aat_lines):
        text, lineno = aat_lines[k]
        if text.strip() == "auto":
            poly = auto_polys[k - 1]
            texts.append(str(poly))
        else:
            try:
                poly = parse_poly(text, ring)
            except ParseError as err:
                raise ProblemError(f"{source}:{lineno}: G{k}: {err}") from err
            texts.append(text.strip())
        poly = poly.subs_exact({name: value for name, value in params.items() if poly.degree_in(name) > 0})
        if poly.degree_in(naming.L(k)) < 1:
            raise ProblemError(f"{source}: G{k} must have positive degree in {naming.L(k)}")
        for name in poly.variables_present():
            cls = naming.classify(name)
            if cls is not None and cls[0] in ("z", "w", "theta"):
                raise ProblemError(
                    f"{source}: G{k} may only use the value slots (L, x, y), found {name!r}"
                )
        polys.append(poly)
    return ProblemSpec(
        n=n,
        family=family,
        params=params,
        ring=ring,
        aat_texts=texts,
        aat_polys=polys,
        options=options,
        source=source,
    )


def load_problem(path) -> ProblemSpec:
    p = Path(path)
    if not p.exists():
        raise FileNotFoundError(f"problem file not found: {path}")
    return parse_problem(p.read_text(encoding="utf-8"), source=str(path))
