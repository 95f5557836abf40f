"""The elimination pipeline: from addition-theorem polynomials to first-order
differential relations.

For each component k and direction p the engine forms the cross-difference of
the differentiated addition theorem, strips the shared factor with the
theorem itself, eliminates the value slot L_k by a resultant, fixes the
second argument v at a point where the backend takes exact rational values
(or reconstructs rational coefficients from a generic numeric point), and
finally eliminates the other derivative slots, leaving one polynomial
relation between df_k/du_p and the component values.  Every candidate factor
is vetted numerically before it is kept.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import naming
from .euclid import exact_div, factor_candidates, gcd, resultant
from .reconstruct import complex_reconstruct, rational_reconstruct
from .rings import MPoly, PoleError, StructuralError, VarRing, transport
from .sampling import draw_point, vanishes

SYMBOLIC_COST_LIMIT = 20_000  # term-count product beyond which H is not expanded symbolically


class DegenerateSystemError(StructuralError):
    """The addition polynomial does not involve the mapping values."""


class EliminationError(StructuralError):
    """The elimination chain collapsed or no specialization was found."""


@dataclass
class AATSystem:
    """The n addition-theorem polynomials plus their shared ring."""

    n: int
    ring: VarRing
    polys: list

    def __post_init__(self):
        if len(self.polys) != self.n:
            raise StructuralError(f"expected {self.n} addition polynomials, got {len(self.polys)}")
        for k, g in enumerate(self.polys, start=1):
            if g.degree_in(naming.L(k)) < 1:
                raise StructuralError(f"G{k} must have positive degree in {naming.L(k)}")
            for name in g.variables_present():
                cls = naming.classify(name)
                if cls is None:
                    continue
                if cls[0] in ("z", "w", "theta"):
                    raise StructuralError(f"G{k} must not contain derivative slot {name!r}")

    def poly(self, k: int) -> MPoly:
        return self.polys[k - 1]


@dataclass
class SpecializationRecord:
    mode: str
    point: str
    retries: int

    def to_json(self):
        return {"mode": self.mode, "point": self.point, "retries": self.retries}


@dataclass
class FirstOrderRelation:
    k: int
    p: int
    poly: MPoly  # in the presentation ring (z{k}_{p}, x1..xn)

    @property
    def zvar(self) -> str:
        return naming.z(self.k, self.p)


@dataclass
class TraceEntry:
    k: int
    p: int
    delta: MPoly
    shared: MPoly
    eliminant: MPoly | None
    specialized: MPoly
    record: SpecializationRecord
    relation: MPoly | None
    degree_bound: int
    notes: list = field(default_factory=list)


@dataclass
class DerivationTrace:
    entries: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    def entry(self, k, p) -> TraceEntry:
        return self.entries[(k, p)]


def cross_difference(sys: AATSystem, k: int, p: int) -> MPoly:
    """Difference of the u_p and v_p derivatives of G_k after the value-slot
    derivatives cancel: sum_i (dG_k/dx_i * z{i}_{p} - dG_k/dy_i * w{i}_{p})."""
    g = sys.poly(k)
    ring = sys.ring
    delta = ring.zero()
    for i in range(1, sys.n + 1):
        gx = g.diff(naming.x(i))
        gy = g.diff(naming.y(i))
        if not gx.is_zero():
            delta = delta + gx * ring.var(naming.z(i, p))
        if not gy.is_zero():
            delta = delta - gy * ring.var(naming.w(i, p))
    if delta.is_zero():
        raise DegenerateSystemError(
            f"G{k} is independent of the mapping values; the system is degenerate"
        )
    return delta


def gcd_and_eliminant(gk: MPoly, delta: MPoly, k: int):
    """(shared factor, L_k-free eliminant).  A None eliminant means the
    cross-difference carried no new information for this (k, p)."""
    lvar = naming.L(k)
    shared = gcd(gk, delta)
    if not shared.is_constant():
        gk = exact_div(gk, shared)
        delta = exact_div(delta, shared)
    if delta.degree_in(lvar) <= 0:
        h = delta.normalized()
        return shared, (None if h.is_zero() else h)
    if gk.degree_in(lvar) <= 0:
        raise EliminationError(
            f"the shared factor absorbed the whole {lvar} dependence of G{k}"
        )
    h = resultant(gk, delta, lvar).normalized()
    return shared, (None if h.is_zero() else h)


def _exact_bindings(sys: AATSystem, point) -> dict:
    """y/w substitution map from one exact backend point."""
    out = {}
    for i in range(1, sys.n + 1):
        out[naming.y(i)] = Fraction(point.values[i - 1])
        for p in range(1, sys.n + 1):
            out[naming.w(i, p)] = Fraction(point.jac[i - 1][p - 1])
    return out


def _is_usable_h(h: MPoly, backend, *, seed, tol) -> bool:
    # must keep at least one derivative slot (constant maps have none to keep;
    # pure-x leftovers mean the point was degenerate)
    if h.is_zero() or h.is_constant():
        return False
    kinds = {naming.classify(n)[0] for n in h.variables_present() if naming.classify(n)}
    if "z" not in kinds:
        return False
    return vanishes(h, backend, seed=seed, tol=tol)


def specialize_v(
    H: MPoly,
    sys: AATSystem,
    backend,
    *,
    mode: str = "exact-point",
    retries: int = 8,
    seed: int = 0,
    tol: float = 1e-7,
):
    """Fix the second argument v, turning the eliminant into a relation in
    the x and z variables only.

    exact-point mode substitutes backend points with exactly rational values;
    numeric-reconstruct mode fixes a generic v numerically and lifts the
    coefficients back to rationals by continued fractions, re-verifying
    numerically.  exact-point falls back to numeric reconstruction when every
    special point degenerates.
    """
    if mode not in ("exact-point", "numeric-reconstruct"):
        raise StructuralError(f"unknown specialization mode {mode!r}")
    # resultants carry extraneous factors; specialize the numerically
    # vanishing factors that still hold a derivative slot, smallest first
    cands = []
    for i, cand in enumerate(factor_candidates(H)):
        kinds = {naming.classify(n)[0] for n in cand.variables_present() if naming.classify(n)}
        if "z" not in kinds:
            continue
        if vanishes(cand, backend, seed=naming.stage_seed(seed, f"spec-factor:{i}"), tol=tol):
            cands.append(cand)
    if not cands:
        cands = [H.normalized()]
    attempts = 0
    if mode == "exact-point":
        for cand in cands:
            for point in backend.exact_points():
                if attempts >= retries:
                    break
                attempts += 1
                h = cand.subs_exact(_exact_bindings(sys, point))
                if _is_usable_h(h, backend, seed=naming.stage_seed(seed, f"spec:{point.label}"), tol=tol):
                    return h, SpecializationRecord("exact-point", point.label, attempts - 1)
    rng = random.Random(naming.stage_seed(seed, "spec-numeric"))
    for cand in cands:
        for trial in range(retries):
            attempts += 1
            h = _numeric_specialize(cand, sys, backend, rng, tol=tol, seed=seed)
            if h is not None:
                return h, SpecializationRecord("numeric-reconstruct", f"trial {trial}", attempts - 1)
    raise EliminationError("no generic specialization found")


def _numeric_specialize(H: MPoly, sys: AATSystem, backend, rng, *, tol, seed):
    box = backend.default_box()
    for _ in range(30):
        v = draw_point(rng, sys.n, box)
        if not backend.is_pole(v):
            break
    else:
        return None
    try:
        vals = backend.value(v)
        jac = backend.jacobian(v)
    except PoleError:
        return None
    numeric = {naming.y(i): vals[i - 1] for i in range(1, sys.n + 1)}
    for i in range(1, sys.n + 1):
        for p in range(1, sys.n + 1):
            numeric[naming.w(i, p)] = jac[i - 1][p - 1]
    ring = H.ring
    yw_idx = {ring.index(n) for n in numeric}
    buckets: dict = {}
    for exps, c in H.terms.items():
        factor = complex(c)
        key = list(exps)
        for i in yw_idx:
            e = exps[i]
            key[i] = 0
            if e:
                factor *= numeric[ring.names[i]] ** e
        key = tuple(key)
        buckets[key] = buckets.get(key, 0j) + factor
    buckets = {k: c for k, c in buckets.items() if abs(c) > 1e-12}
    if not buckets:
        return None
    lead = buckets[max(buckets)]
    terms = {}
    for exps, c in buckets.items():
        lifted = complex_reconstruct(c / lead, max_den=10**6, tol=1e-9)
        if lifted is None:
            return None
        re, im = lifted
        if im != 0:
            return None  # relation coefficients must be real rationals
        if re:
            terms[exps] = re
    h = ring.poly(terms)
    if _is_usable_h(h, backend, seed=naming.stage_seed(seed, "spec-numeric-vet"), tol=tol):
        return h
    return None


def _clean_relation(h: MPoly, backend, *, prefer_var: str | None, seed, tol) -> MPoly:
    """Minimal-degree numerically vanishing factor, preferring those that keep
    prefer_var when any such factor exists."""
    cands = factor_candidates(h)
    keep = [c for c in cands if prefer_var is None or c.degree_in(prefer_var) > 0]
    pools = [keep, cands] if keep else [cands]
    for pool in pools:
        for i, cand in enumerate(pool):
            if cand.is_constant():
                continue
            if vanishes(cand, backend, seed=naming.stage_seed(seed, f"clean:{i}"), tol=tol):
                return cand.normalized()
    return h.normalized()


def _column_relations(sys, backend, p, *, mode, retries, seed, tol, trace):
    """Specialized, cleaned relations h_{k p} for one direction p, all k."""
    out = {}
    for k in range(1, sys.n + 1):
        gk = sys.poly(k)
        delta = cross_difference(sys, k, p)
        lvar = naming.L(k)
        cost = (len(gk.terms) * len(delta.terms)) * (gk.degree_in(lvar) + delta.degree_in(lvar) + 1)
        notes = []
        if cost <= SYMBOLIC_COST_LIMIT:
            shared, H = gcd_and_eliminant(gk, delta, k)
            if H is None:
                raise EliminationError(f"cross-difference for (k={k}, p={p}) carries no new relation")
            h, record = specialize_v(
                H, sys, backend, mode=mode, retries=retries, seed=naming.stage_seed(seed, f"h{k}{p}"), tol=tol
            )
        else:
            # the symbolic eliminant would blow up; fix v first (exact points),
            # and when those all degenerate, reconstruct the relation's
            # rational coefficients from backend samples
            shared = sys.ring.one()
            H = None
            try:
                shared, H, h, record = _specialize_then_eliminate(
                    sys, backend, k, p, gk, delta, retries=retries, seed=seed, tol=tol
                )
                notes.append("eliminant computed after exact specialization (size policy)")
            except EliminationError as err:
                notes.append(f"exact specialization unavailable ({err})")
                h, record = _relation_search(
                    sys,
                    backend,
                    k,
                    p,
                    seed=naming.stage_seed(seed, f"nullspace{k}{p}"),
                    tol=tol,
                )
                notes.append("coefficients reconstructed from samples (numeric-reconstruct)")
        h_clean = _clean_relation(
            h, backend, prefer_var=naming.z(k, p), seed=naming.stage_seed(seed, f"hc{k}{p}"), tol=tol
        )
        bound = max(1, gk.degree_in(lvar)) * max(1, delta.total_degree())
        trace.entries[(k, p)] = TraceEntry(
            k=k,
            p=p,
            delta=delta,
            shared=shared,
            eliminant=H,
            specialized=h_clean,
            record=record,
            relation=None,
            degree_bound=bound,
            notes=notes,
        )
        out[k] = h_clean
    return out


def _monomials(names, total_degree):
    """All exponent dictionaries over `names` with total degree <= bound."""
    out = [{}]
    for name in names:
        extended = []
        for mono in out:
            used = sum(mono.values())
            for e in range(0, total_degree - used + 1):
                m = dict(mono)
                if e:
                    m[name] = e
                extended.append(m)
        out = extended
    out.sort(key=lambda m: (sum(m.values()), sorted(m.items())))
    return out


def _relation_search(sys, backend, k, p, *, seed, tol, max_degree=6):
    """Numeric-reconstruct route for heavy components: find the lowest-degree
    polynomial in (z{k}_{p}, column-p slots, x) that vanishes along the
    mapping, by sampling, nullspace extraction, and continued-fraction lifts.
    Every candidate is re-verified on fresh samples before it is accepted."""
    ring = sys.ring
    target = naming.z(k, p)
    names = [naming.z(i, p) for i in range(1, sys.n + 1)]
    names += [naming.x(i) for i in range(1, sys.n + 1)]
    rng = random.Random(naming.stage_seed(seed, "search-samples"))
    box = backend.default_box()
    for degree in range(1, max_degree + 1):
        basis = _monomials(names, degree)
        rows = []
        tries = 0
        while len(rows) < 2 * len(basis) + 10 and tries < 40 * len(basis):
            tries += 1
            u = draw_point(rng, sys.n, box)
            try:
                if backend.is_pole(u):
                    continue
                vals = backend.value(u)
                jac = backend.jacobian(u)
            except PoleError:
                continue
            values = {naming.x(i): vals[i - 1] for i in range(1, sys.n + 1)}
            for i in range(1, sys.n + 1):
                values[naming.z(i, p)] = jac[i - 1][p - 1]
            if any(abs(c) > 50 for c in values.values()):
                continue
            rows.append([_eval_monomial(m, values) for m in basis])
        if len(rows) < len(basis) + 4:
            continue
        matrix = np.array(rows, dtype=complex)
        scales = np.maximum(np.abs(matrix).max(axis=0), 1e-12)
        matrix = matrix / scales
        _, svals, vh = np.linalg.svd(matrix)
        smax = svals[0] if len(svals) else 1.0
        null_rows = [vh[i] for i in range(len(svals)) if svals[i] < 1e-8 * smax]
        null_rows += [vh[i] for i in range(len(svals), vh.shape[0])]
        if not null_rows:
            continue
        for vec in _rational_rows(np.array(null_rows) / scales):
            cand = _vector_to_poly(vec, basis, ring)
            if cand is None or cand.is_zero() or cand.degree_in(target) < 1:
                continue
            if vanishes(
                cand, backend, seed=naming.stage_seed(seed, f"search-vet:{degree}"), tol=tol
            ):
                record = SpecializationRecord(
                    "numeric-reconstruct", f"sample nullspace, degree {degree}", 0
                )
                return cand.normalized(), record
    raise EliminationError(
        f"no vanishing relation for (k={k}, p={p}) found up to degree {max_degree}"
    )


def _eval_monomial(mono, values):
    out = 1 + 0j
    for name, e in mono.items():
        out *= values[name] ** e
    return out


def _rational_rows(null_rows):
    """Reduced row echelon over the numeric nullspace: the canonical basis of a
    rational subspace has rational entries, which then lift entrywise."""
    rows = [list(r) for r in null_rows]
    if not rows:
        return
    m = len(rows[0])
    rr = 0
    for col in range(m):
        best, idx = 1e-7, None
        for i in range(rr, len(rows)):
            if abs(rows[i][col]) > best:
                best, idx = abs(rows[i][col]), i
        if idx is None:
            continue
        rows[rr], rows[idx] = rows[idx], rows[rr]
        piv = rows[rr][col]
        rows[rr] = [c / piv for c in rows[rr]]
        for i in range(len(rows)):
            if i != rr and abs(rows[i][col]) > 1e-12:
                f = rows[i][col]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[rr])]
        rr += 1
        if rr == len(rows):
            break
    for row in rows[:rr]:
        lifted = []
        ok = True
        for c in row:
            if abs(c) < 1e-7:
                lifted.append(Fraction(0))
                continue
            if abs(c.imag) > 1e-6 * (1 + abs(c)):
                ok = False
                break
            r = rational_reconstruct(c.real, max_den=10**6, tol=1e-6)
            if r is None:
                ok = False
                break
            lifted.append(r)
        if ok:
            yield lifted


def _vector_to_poly(vec, basis, ring):
    terms = {}
    width = len(ring.names)
    for coeff, mono in zip(vec, basis):
        if not coeff:
            continue
        exps = [0] * width
        for name, e in mono.items():
            exps[ring.index(name)] = e
        terms[tuple(exps)] = coeff
    if not terms:
        return None
    return ring.poly(terms)


def _specialize_then_eliminate(sys, backend, k, p, gk, delta, *, retries, seed, tol):
    lvar = naming.L(k)
    attempts = 0
    last_error = "no exact points available"
    for point in backend.exact_points():
        if attempts >= retries:
            break
        attempts += 1
        bindings = _exact_bindings(sys, point)
        gk_s = gk.subs_exact(bindings)
        delta_s = delta.subs_exact(bindings)
        if gk_s.degree_in(lvar) != gk.degree_in(lvar) or delta_s.degree_in(lvar) != delta.degree_in(lvar):
            last_error = f"leading coefficient vanished at {point.label}"
            continue
        try:
            shared, h = gcd_and_eliminant(gk_s, delta_s, k)
        except EliminationError as err:
            last_error = str(err)
            continue
        if h is None:
            last_error = f"specialized eliminant vanished at {point.label}"
            continue
        if _is_usable_h(h, backend, seed=naming.stage_seed(seed, f"ste:{k}{p}:{point.label}"), tol=tol):
            record = SpecializationRecord("exact-point/pre-eliminant", point.label, attempts - 1)
            return shared, None, h, record
        last_error = f"specialized eliminant failed numeric vetting at {point.label}"
    raise EliminationError(f"no generic specialization found for (k={k}, p={p}): {last_error}")


def derive_first_order(
    sys: AATSystem,
    backend,
    *,
    mode: str = "exact-point",
    retries: int = 8,
    seed: int = 0,
    tol: float = 1e-7,
):
    """All n^2 first-order relations P_{k p}, with the full derivation trace."""
    if sys.n > 2:
        raise StructuralError("symbolic derivation is limited to n <= 2; use numeric checks for larger n")
    trace = DerivationTrace()
    relations = []
    for p in range(1, sys.n + 1):
        column = _column_relations(
            sys, backend, p, mode=mode, retries=retries, seed=seed, tol=tol, trace=trace
        )
        for k in range(1, sys.n + 1):
            poly = _isolate(sys, backend, column, k, p, seed=seed, tol=tol)
            pres = naming.relation_ring(sys.n, k, p, sys.ring.parameters)
            rel = FirstOrderRelation(k=k, p=p, poly=transport(poly, pres).normalized())
            entry = trace.entries[(k, p)]
            entry.relation = rel.poly
            if rel.poly.degree_in(rel.zvar) < 1:
                raise EliminationError(f"relation for (k={k}, p={p}) lost its derivative slot")
            if rel.poly.degree_in(rel.zvar) > entry.degree_bound:
                entry.notes.append("degree bound exceeded")  # defensive; should not happen
            relations.append(rel)
    return relations, trace


def _isolate(sys, backend, column, k, p, *, seed, tol):
    """Eliminate the other derivative slots of direction p from h_{k p}."""
    target = naming.z(k, p)
    others = [i for i in range(1, sys.n + 1) if i != k]
    orders = list(itertools.permutations(others)) or [()]
    last_error = None
    for order in orders:
        r = column[k]
        try:
            for i in order:
                var = naming.z(i, p)
                if r.degree_in(var) <= 0:
                    continue
                partner = column[i]
                if partner.degree_in(var) <= 0:
                    raise EliminationError(
                        f"no relation available to eliminate {var} for (k={k}, p={p})"
                    )
                r = resultant(r, partner, var).normalized()
                r = _clean_relation(
                    r, backend, prefer_var=target, seed=naming.stage_seed(seed, f"iso{k}{p}{i}"), tol=tol
                )
                if r.is_zero():
                    raise EliminationError("chain collapsed to zero")
            if r.is_zero() or r.degree_in(target) < 1:
                raise EliminationError(
                    f"dependent eliminant chain for (k={k}, p={p}) - choose different elimination order"
                    f" (tried {order})"
                )
            if not vanishes(r, backend, seed=naming.stage_seed(seed, f"iso-final{k}{p}"), tol=tol):
                raise EliminationError(f"relation for (k={k}, p={p}) failed numeric vetting")
            return r
        except EliminationError as err:
            last_error = err
            continue
    raise last_error if last_error else EliminationError(f"could not isolate {target}")


def verify_general_dependence(sys: AATSystem, selection, backend, relations=None, *, seed=0, tol=1e-7):
    """A nonzero relation among any (n+1)-subset of the component values and
    first derivatives, produced by chaining resultants over the first-order
    relation set."""
    selection = list(selection)
    if len(selection) != sys.n + 1:
        raise StructuralError(f"selection must have n+1 = {sys.n + 1} names")
    if relations is None:
        relations, _ = derive_first_order(sys, backend, seed=seed)
    by_z = {rel.zvar: rel for rel in relations}
    ring = sys.ring
    pool = []
    for name in selection:
        cls = naming.classify(name)
        if cls is None or cls[0] not in ("x", "z"):
            raise StructuralError(f"selection must draw from the x and z names, got {name!r}")
        if cls[0] == "z":
            if name not in by_z:
                raise StructuralError(f"no first-order relation for {name}")
            pool.append(transport(by_z[name].poly, ring))
    if not pool:
        raise StructuralError("selection needs at least one derivative slot")
    allowed = set(selection)

    def extraneous():
        out = set()
        for q in pool:
            for nm in q.variables_present():
                if nm not in allowed:
                    out.add(nm)
        return sorted(out)

    guard = 0
    while True:
        extra = extraneous()
        if not extra:
            break
        guard += 1
        if guard > 12:
            raise EliminationError("dependence elimination did not converge")
        v = extra[0]
        holders = [q for q in pool if q.degree_in(v) > 0]
        if len(holders) < 2:
            cls = naming.classify(v)
            pulled = None
            if cls and cls[0] == "x":
                # pull in another first-order relation touching v; its own
                # derivative slot is outside the selection, so the loop will
                # eliminate it next
                for zname, rel in sorted(by_z.items()):
                    if zname in allowed:
                        continue
                    cand = transport(rel.poly, ring)
                    if cand.degree_in(v) > 0 and all(str(cand) != str(q) for q in pool):
                        pulled = cand
                        break
            if pulled is not None:
                pool.append(pulled)
                continue
            # nothing can cancel v; the polys mentioning it cannot contribute
            survivors = [q for q in pool if q.degree_in(v) <= 0]
            if not survivors:
                raise EliminationError(f"cannot eliminate {v}: only one relation mentions it")
            pool = survivors
            continue
        pivot = min(holders, key=lambda q: (q.degree_in(v), len(q.terms)))
        new_pool = [q for q in pool if q is not pivot and q.degree_in(v) <= 0]
        for q in holders:
            if q is pivot:
                continue
            r = resultant(q, pivot, v).normalized()
            if not r.is_zero():
                new_pool.append(r)
        pool = new_pool
        if not pool:
            raise EliminationError(f"elimination of {v} collapsed the relation pool")
    for cand in sorted(pool, key=lambda q: (q.total_degree(), len(q.terms), str(q))):
        cleaned = _clean_relation(cand, backend, prefer_var=None, seed=naming.stage_seed(seed, "dep"), tol=tol)
        if not cleaned.is_constant() and vanishes(
            cleaned, backend, seed=naming.stage_seed(seed, "dep-final"), tol=tol
        ):
            return cleaned
    raise EliminationError("no vanishing dependence relation found for the selection")
