"""Period detection: find p with F(u + p) = F(u) from value/derivative collisions.

Two distinct points with equal mapping values and equal first-derivative
matrices force a period (their whole Taylor expansions coincide).  The
detector seeds Newton iterations on F(b) = F(a) over a grid of offsets,
keeps solutions whose derivative matrices also match, verifies each candidate
difference on independent samples, and reduces the verified candidates to a
small generator set by integer-combination sweeps.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

import numpy as np

from . import naming
from .rings import PoleError
from .sampling import draw_point


@dataclass
class PeriodCandidate:
    p: tuple
    witness: tuple  # (a, b) with p = b - a
    residual: float
    note: str = ""

    def to_json(self):
        return {
            "period": [[c.real, c.imag] for c in self.p],
            "residual": self.residual,
            "note": self.note,
        }


def _norm(p) -> float:
    return max(abs(c) for c in p)


def _newton_solve(backend, target, b0, *, iters=40, tol=1e-12):
    """Solve F(b) = target by damped Newton with the backend's derivative matrix."""
    b = np.array(b0, dtype=complex)

    def mismatch(point):
        if backend.is_pole(tuple(point)):
            return None, None
        val = np.array(backend.value(tuple(point)), dtype=complex)
        return val - target, val

    try:
        err, _ = mismatch(b)
    except PoleError:
        return None
    if err is None:
        return None
    for _ in range(iters):
        size = max(abs(c) for c in err)
        if size < tol:
            return tuple(b)
        try:
            jac = np.array(backend.jacobian(tuple(b)), dtype=complex)
            step = np.linalg.solve(jac, err)
        except (PoleError, np.linalg.LinAlgError):
            return None
        if max(abs(c) for c in step) > 8.0:
            return None
        # backtracking keeps wildly overshooting steps inside the basin
        for _ in range(5):
            try:
                nerr, _ = mismatch(b - step)
            except PoleError:
                nerr = None
            if nerr is not None and max(abs(c) for c in nerr) < size:
                b = b - step
                err = nerr
                break
            step = step / 2
        else:
            return None
    return None


def _verify_period(backend, p, *, samples, seed, tol, box):
    rng = random.Random(naming.stage_seed(seed, f"period-verify:{p}"))
    worst = 0.0
    good = 0
    trials = 0
    while good < samples and trials < 12 * samples:
        trials += 1
        u = draw_point(rng, backend.n, box)
        shifted = tuple(a + b for a, b in zip(u, p))
        try:
            if backend.is_pole(u) or backend.is_pole(shifted):
                continue
            v0 = backend.value(u)
            v1 = backend.value(shifted)
        except PoleError:
            continue
        for c0, c1 in zip(v0, v1):
            if abs(c0) > 1e6:
                break
            worst = max(worst, abs(c0 - c1) / (1 + abs(c0)))
        else:
            good += 1
            if worst > tol:
                return None
            continue
    if good < samples:
        return None
    return worst


def _reduce_against(p, basis):
    """Subtract the best integer combination of the basis from p."""
    if not basis:
        return p
    n = len(p)
    cols = []
    for b in basis:
        col = []
        for i in range(n):
            col.extend((b[i].real, b[i].imag))
        cols.append(col)
    rhs = []
    for i in range(n):
        rhs.extend((p[i].real, p[i].imag))
    A = np.array(cols, dtype=float).T
    y = np.array(rhs, dtype=float)
    coeffs, *_ = np.linalg.lstsq(A, y, rcond=None)
    out = list(p)
    for c, b in zip(coeffs, basis):
        m = round(float(c))
        if m:
            out = [o - m * bb for o, bb in zip(out, b)]
    return tuple(out)


def reduce_candidates(cands, *, tol=1e-7, max_rank=None):
    """Greedy integer-lattice reduction of verified period candidates."""
    basis: list = []
    for p in sorted(cands, key=_norm):
        r = _reduce_against(p, basis)
        for _ in range(4):
            r2 = _reduce_against(r, basis)
            if r2 == r:
                break
            r = r2
        if _norm(r) <= tol * (1 + _norm(p)):
            continue
        if max_rank is not None and len(basis) >= max_rank:
            continue
        basis.append(r)
        basis.sort(key=_norm)
        changed = True
        while changed:
            changed = False
            for i in range(len(basis)):
                others = basis[:i] + basis[i + 1 :]
                r = _reduce_against(basis[i], others)
                if _norm(r) <= tol * (1 + _norm(basis[i])):
                    basis.pop(i)
                    changed = True
                    break
                if _norm(r) < _norm(basis[i]) - 1e-12:
                    basis[i] = r
                    changed = True
            basis.sort(key=_norm)
    return basis


def is_integer_combination(p, basis, tol=1e-7) -> bool:
    r = _reduce_against(p, basis)
    for _ in range(4):
        r = _reduce_against(r, basis)
    return _norm(r) <= tol * (1 + _norm(p))


def detect_period(
    backend,
    *,
    box: float | None = None,
    grid: int | None = None,
    tol: float = 1e-9,
    seed: int = 0,
    samples: int = 50,
    jac_tol: float = 1e-8,
) -> list:
    """Period candidates of the mapping, reduced to lattice generators.

    An empty result is a valid outcome: rational mappings have no period.
    """
    n = backend.n
    box = box if box is not None else backend.period_box()
    grid = grid if grid is not None else (13 if n == 1 else 9)
    rng = random.Random(naming.stage_seed(seed, "period-base"))
    base = None
    for _ in range(200):
        a = draw_point(rng, n, 0.8)
        try:
            if backend.is_pole(a):
                continue
            val_a = np.array(backend.value(a), dtype=complex)
            jac_a = np.array(backend.jacobian(a), dtype=complex)
            if max(abs(c) for c in val_a) > 1e4:
                continue
        except PoleError:
            continue
        base = a
        break
    if base is None:
        return []
    steps = [(-box + (2 * box) * i / (grid - 1)) for i in range(grid)]
    offsets_1d = [complex(re, im) for re in steps for im in steps]
    raw = []
    seen = set()
    if n == 1:
        seeds = [(base[0] + off,) for off in offsets_1d]
    else:
        # dense grid in the first coordinate, coarse in the second; the
        # damped Newton pulls in the rest
        coarse = steps[:: max(1, (len(steps) - 1) // 2)] or steps
        offs = [complex(re, im) for re in coarse for im in coarse]
        seeds = [
            (base[0] + o1, base[1] + o2)
            for o1 in offsets_1d
            for o2 in offs
        ]
    for b0 in seeds:
        b = _newton_solve(backend, np.array(backend.value(base), dtype=complex), b0)
        if b is None:
            continue
        p = tuple(bb - aa for bb, aa in zip(b, base))
        if _norm(p) < 1e-6:
            continue
        key = tuple((round(c.real, 6), round(c.imag, 6)) for c in p)
        if key in seen:
            continue
        seen.add(key)
        try:
            jac_b = np.array(backend.jacobian(b), dtype=complex)
        except PoleError:
            continue
        jac_a = np.array(backend.jacobian(base), dtype=complex)
        if np.max(np.abs(jac_b - jac_a)) > jac_tol * (1 + np.max(np.abs(jac_a))):
            continue
        residual = _verify_period(backend, p, samples=samples, seed=seed, tol=tol, box=1.0)
        if residual is None:
            continue
        raw.append(PeriodCandidate(p=p, witness=(base, b), residual=residual))
    generators = reduce_candidates([c.p for c in raw], tol=1e-6, max_rank=2 * n)
    out = []
    for g in generators:
        residual = _verify_period(backend, g, samples=samples, seed=seed + 1, tol=tol, box=1.0)
        if residual is None:
            continue
        out.append(PeriodCandidate(p=g, witness=(base, tuple(a + b for a, b in zip(base, g))), residual=residual))
    out.sort(key=lambda c: _norm(c.p))
    basis = [c.p for c in out]
    for cand in sorted(raw, key=lambda c: _norm(c.p)):
        # anything the rank-capped reduction could not absorb is reported raw
        if not is_integer_combination(cand.p, basis, tol=1e-6):
            cand.note = "raw candidate beyond the reduction rank cap"
            out.append(cand)
    return out
