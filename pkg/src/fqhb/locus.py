"""Geometric predicates on a hypersurface X = {F = 0} in P^{n+1}(F_q).

Containment of a flat L in X is symbolic: the restriction of F to L must be
the zero polynomial.  When deg F <= q this agrees with "every rational point
of L lies on X" (a nonzero form of degree <= q cannot vanish on all of
P^k(F_q)), and the layered Thas search uses that shortcut; for larger
degrees every candidate flat is checked by substitution.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from . import bounds
from .gf import GF, get_field
from .forms import (
    FormError,
    HomogPoly,
    count_points,
    evaluate,
    partials,
    point_values,
    restrict,
    substitute,
)
from .projgeom import Flat, SpaceIndex, normalize, null_space, points_array, proj_count, space_index


class BoundViolation(RuntimeError):
    """A point count exceeded its proven upper bound (an implementation bug)."""


def flat_contained(F: HomogPoly, L: Flat) -> bool:
    return restrict(F, L).is_zero()


def _singular_mask(F: HomogPoly, pts: np.ndarray) -> np.ndarray:
    on = point_values(F, pts) == 0
    for D in partials(F):
        if not on.any():
            break
        if not D.is_zero():
            on &= point_values(D, pts) == 0
    return on


def singular_points(F: HomogPoly) -> list[tuple[int, ...]]:
    """Rational points where F and all its partial derivatives vanish."""
    if F.is_zero():
        raise FormError("the zero polynomial does not define a hypersurface")
    pts = points_array(F.field, F.nvars - 1)
    return [tuple(int(x) for x in pts[i]) for i in np.flatnonzero(_singular_mask(F, pts))]


def tangent_flat(F: HomogPoly, p) -> Flat:
    """The tangent hyperplane at a nonsingular rational point."""
    p = tuple(p)
    if evaluate(F, p) != 0:
        raise ValueError(f"{p} is not on the hypersurface")
    grad = [evaluate(D, p) for D in partials(F)]
    if not any(grad):
        raise ValueError(f"{p} is a singular point")
    return Flat.hyperplane(F.field, grad)


def thas_search(F: HomogPoly, index: SpaceIndex | None = None) -> list[list[Flat]]:
    """All contained flats, by dimension.

    Level 0 holds the rational points of X; level j+1 holds every flat one
    dimension up that contains a level-j flat and lies on X.  Returns an
    empty list when X has no rational point.
    """
    if F.is_zero():
        raise FormError("the zero polynomial does not define a hypersurface")
    idx = index or space_index(F.field, F.nvars - 1)
    onx_flags = point_values(F, idx.array) == 0
    onx = idx.points_mask(onx_flags)
    level = [int(i) for i in np.flatnonzero(onx_flags)]
    if not level:
        return []
    symbolic = F.degree > F.field.q
    levels = [level]
    dim = 0
    while dim < idx.N:
        seen = set()
        nxt = []
        for fid in level:
            for gid in idx.up(dim, fid):
                if gid in seen:
                    continue
                seen.add(gid)
                if idx.mask(dim + 1, gid) & ~onx:
                    continue
                if symbolic and not flat_contained(F, idx.flat(dim + 1, gid)):
                    continue
                nxt.append(gid)
        if not nxt:
            break
        levels.append(nxt)
        level = nxt
        dim += 1
    return [[idx.flat(d, i) for i in lv] for d, lv in enumerate(levels)]


def thas_invariant(F: HomogPoly, index: SpaceIndex | None = None) -> tuple[int, Flat]:
    """Largest dimension of a contained flat, with a witness.

    ``(-1, empty flat)`` when X has no rational points.
    """
    levels = thas_search(F, index)
    if not levels:
        return -1, Flat.empty(F.field, F.nvars - 1)
    return len(levels) - 1, min(levels[-1], key=lambda L: L.basis)


def _apex_rows(p) -> list[tuple[int, ...]]:
    n = len(p)
    j = next(i for i, c in enumerate(p) if c)
    cols = [tuple(int(a == b) for b in range(n)) for a in range(n)]
    cols[j] = cols[0]
    cols[0] = tuple(p)
    return cols


def is_apex(F: HomogPoly, p) -> bool:
    """True when X is a cone with vertex p: after a coordinate change sending
    p to (1:0:...:0) the form no longer involves X0."""
    G = substitute(F, _apex_rows(p))
    return all(e[0] == 0 for e in G.terms)


def cone_apexes(F: HomogPoly, candidates=None) -> list[tuple[int, ...]]:
    """Rational vertices of X viewed as a cone.

    ``candidates`` restricts the scan (apexes are always singular points, so
    callers that already know the singular set may pass it).
    """
    if F.is_zero():
        raise FormError("the zero polynomial does not define a hypersurface")
    if candidates is None:
        pts = points_array(F.field, F.nvars - 1)
        vals = point_values(F, pts)
        candidates = [tuple(int(x) for x in pts[i]) for i in np.flatnonzero(vals == 0)]
    return [tuple(p) for p in candidates if is_apex(F, p)]


def vertex_flat(F: HomogPoly, apexes=None) -> Flat:
    """The flat spanned by the apexes (empty flat if there are none)."""
    if apexes is None:
        apexes = cone_apexes(F)
    if not apexes:
        return Flat.empty(F.field, F.nvars - 1)
    return Flat.from_rows(F.field, apexes)


def cone_base(F: HomogPoly, vertex: Flat) -> HomogPoly:
    """The form of the base after splitting off the vertex variables."""
    n = F.nvars
    if vertex.dim < 0:
        return F
    piv = set(vertex.pivots)
    rows = [tuple(int(a == b) for b in range(n)) for a in range(n) if a not in piv]
    rows += list(vertex.basis)
    G = substitute(F, rows)
    m = len(rows) - len(vertex.basis)
    if any(any(e[m:]) for e in G.terms):
        raise ValueError("the given flat is not a vertex of the hypersurface")
    return HomogPoly(F.field, m, F.degree, {e[:m]: c for e, c in G.terms.items()})


def section_count(F: HomogPoly, L: Flat, index: SpaceIndex | None = None) -> int:
    """Number of rational points of X on the flat L."""
    idx = index or space_index(F.field, F.nvars - 1)
    onx = idx.points_mask(point_values(F, idx.array) == 0)
    return bin(idx.mask(L.dim, idx.register(L)) & onx).count("1")


def theta_for(F: HomogPoly, k: int) -> int | None:
    """theta(n, k, d, q) for the hypersurface, or None where it is undefined."""
    n = F.nvars - 2
    if k < 0 or n < 1 or F.degree < 2 or k > n:
        return None
    return bounds.theta(n, k, F.degree, F.field.q)


@dataclass
class InvariantReport:
    N: int
    k: int
    witness: Flat
    sing_rational: list
    apexes: list
    theta: int | None
    is_maximizer: bool
    form: HomogPoly | None = dc_field(default=None, repr=False, compare=False)

    def to_dict(self) -> dict:
        fmt = self.witness.field.format

        def pt(p):
            return ",".join(fmt(x) for x in p)

        return {
            "N": self.N,
            "k": self.k,
            "witness": self.witness.serialize(),
            "sing_rational": [pt(p) for p in self.sing_rational],
            "apexes": [pt(p) for p in self.apexes],
            "theta": self.theta,
            "is_maximizer": self.is_maximizer,
        }


def check_bounds(F: HomogPoly, N: int, k: int, sing_count: int) -> None:
    t = theta_for(F, max(k, 0))
    if k < 0 and N:
        raise BoundViolation(f"{F}: no contained point but N = {N}")
    if t is not None and N > t:
        raise BoundViolation(f"{F}: N = {N} exceeds theta = {t} (k = {k})")
    if k == 0 and sing_count and F.nvars >= 3 and F.degree >= 2:
        s = bounds.singular_k0_bound(F.degree, F.nvars - 2, F.field.q)
        if N > s:
            raise BoundViolation(f"{F}: singular k=0 hypersurface with N = {N} > {s}")


def invariant_report(F: HomogPoly, index: SpaceIndex | None = None) -> InvariantReport:
    N = count_points(F)
    k, witness = thas_invariant(F, index)
    sing = singular_points(F)
    apexes = cone_apexes(F)
    check_bounds(F, N, k, len(sing))
    t = theta_for(F, k)
    return InvariantReport(N, k, witness, sing, apexes, t, t is not None and N == t, form=F)


@dataclass
class LemmaResult:
    passed: bool
    counterexample: tuple | None = None
    checked: int = 0


def lemma_checks(F: HomogPoly, index: SpaceIndex | None = None) -> dict[str, LemmaResult]:
    """Structural properties every maximizer with k > 0 must have.

    ``"1"``: each rational point lies on a contained k-flat.
    ``"2"``: each rational singular point lies on every contained k-flat.
    ``"4"``: for 0 < k < n, each nonsingular rational point p has
    N(X and T_pX) = theta(n-1, k, d, q).
    """
    idx = index or space_index(F.field, F.nvars - 1)
    levels = thas_search(F, idx)
    k = len(levels) - 1
    N = len(levels[0]) if levels else 0
    n = F.nvars - 2
    t = theta_for(F, k)
    if k <= 0 or N != t:
        raise ValueError("lemma checks need a maximizer with k > 0")
    pts = idx.array
    onx_flags = point_values(F, pts) == 0
    onx = idx.points_mask(onx_flags)
    top = [idx.mask(k, idx.register(L)) for L in levels[k]]
    covered = 0
    for m in top:
        covered |= m
    out = {}
    missing = onx & ~covered
    first = idx.points[(missing & -missing).bit_length() - 1] if missing else None
    out["1"] = LemmaResult(not missing, first, N)

    grads = np.stack([point_values(D, pts) for D in partials(F)], axis=1)
    sing_flags = onx_flags & ~grads.any(axis=1)
    bad = None
    for i in np.flatnonzero(sing_flags):
        if any(not (m >> int(i) & 1) for m in top):
            bad = idx.points[int(i)]
            break
    out["2"] = LemmaResult(bad is None, bad, int(sing_flags.sum()))

    if 0 < k <= n - 1:
        target = bounds.theta(n - 1, k, F.degree, F.field.q)
        bad = None
        checked = 0
        for i in np.flatnonzero(onx_flags & ~sing_flags):
            hmask = idx.hyperplane_mask(tuple(int(x) for x in grads[i]))
            checked += 1
            if bin(hmask & onx).count("1") != target:
                bad = idx.points[int(i)]
                break
        out["4"] = LemmaResult(bad is None, bad, checked)
    return out


# -- smoothness ------------------------------------------------------------

def quadric_polar_matrix(F: HomogPoly) -> list[list[int]]:
    if F.degree != 2:
        raise ValueError("not a quadric")
    f = F.field
    n = F.nvars
    B = [[0] * n for _ in range(n)]
    for e, c in F.terms.items():
        idx = [i for i, x in enumerate(e) for _ in range(x)]
        i, j = idx
        if i == j:
            B[i][i] = f.add(B[i][i], f.add(c, c))
        else:
            B[i][j] = f.add(B[i][j], c)
            B[j][i] = f.add(B[j][i], c)
    return B


def quadric_radical(F: HomogPoly) -> tuple[tuple[int, ...], ...]:
    """Kernel of the polar bilinear form, as RREF rows."""
    return null_space(F.field, quadric_polar_matrix(F), F.nvars)


def quadric_nonsingular(F: HomogPoly) -> bool:
    """Exact smoothness of a quadric over the algebraic closure."""
    W = quadric_radical(F)
    if not W:
        return True
    return len(W) == 1 and evaluate(F, W[0]) != 0


def embed_field(small: GF, big: GF) -> list[int]:
    """Image of every element of ``small`` in ``big`` (``big`` must be an extension)."""
    if big.p != small.p or big.r % small.r:
        raise ValueError("not an extension field")
    if small.r == 1:
        return list(range(small.q))
    mod = small.modulus
    root = None
    for a in range(big.q):
        acc, pw = 0, 1
        for c in mod:
            acc = big.add(acc, big.mul(c, pw))
            pw = big.mul(pw, a)
        if acc == 0:
            root = a
            break
    if root is None:
        raise ValueError("modulus has no root in the extension")
    image = []
    for v in range(small.q):
        acc, pw = 0, 1
        for c in small._to_poly(v):
            acc = big.add(acc, big.mul(c, pw))
            pw = big.mul(pw, root)
        image.append(acc)
    return image


def smoothness(F: HomogPoly, max_degree: int = 3, point_budget: int = 300_000) -> dict:
    """Best-effort smoothness verdict.

    Quadrics are decided exactly.  Otherwise singular points are searched
    over F_{q^m} for m = 1..max_degree while the point count stays within
    budget; finding none gives only a heuristic "nonsingular".
    """
    if F.degree == 2:
        ok = quadric_nonsingular(F)
        return {"verdict": "nonsingular" if ok else "singular", "method": "exact-quadric"}
    base = F.field
    searched = []
    for m in range(1, max_degree + 1):
        r = base.r * m
        if base.p ** r > 2 ** 16 or proj_count(F.nvars - 1, base.p ** r) > point_budget:
            break
        big = get_field(base.p, r) if m > 1 else base
        image = embed_field(base, big)
        G = HomogPoly(big, F.nvars, F.degree, {e: image[c] for e, c in F.terms.items()})
        pts = points_array(big, F.nvars - 1)
        searched.append(m)
        if _singular_mask(G, pts).any():
            return {"verdict": "singular", "method": "rational" if m == 1 else f"extension-degree-{m}"}
    return {"verdict": "nonsingular", "method": "heuristic", "extension_degrees": searched}
