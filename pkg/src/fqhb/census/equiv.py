"""Exact projective equivalence by exhausting PGL_m(F_q) for small m and q."""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass

from ..forms import HomogPoly, count_points, substitute
from ..gf import GF
from ..locus import thas_invariant
from ..projgeom import enumerate_points, rref

DEFAULT_BUDGET = 10 ** 6


class EquivStatus(str, enum.Enum):
    EQUIVALENT = "equivalent"
    INEQUIVALENT = "inequivalent"
    BUDGET_EXCEEDED = "budget_exceeded"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class EquivResult:
    status: EquivStatus
    matrix: tuple[tuple[int, ...], ...] | None = None
    reason: str = ""
    checked: int = 0

    def to_dict(self, field: GF | None = None) -> dict:
        fmt = field.format if field else str
        mat = None if self.matrix is None else [[fmt(x) for x in row] for row in self.matrix]
        return {"status": self.status.value, "matrix": mat, "reason": self.reason, "checked": self.checked}


def gl_order(m: int, q: int) -> int:
    out = 1
    for i in range(m):
        out *= q ** m - q ** i
    return out


def pgl_order(m: int, q: int) -> int:
    return gl_order(m, q) // (q - 1)


def iter_pgl(field: GF, m: int):
    """One invertible matrix per element of PGL_m(F_q), as a tuple of columns.

    The first column is a normalized point; the remaining columns range over
    all vectors outside the span of the earlier ones.
    """
    vectors = list(itertools.product(range(field.q), repeat=m))

    def extend(cols):
        if len(cols) == m:
            yield tuple(cols)
            return
        for v in vectors:
            if len(rref(field, cols + [v])) == len(cols) + 1:
                yield from extend(cols + [v])

    for first in enumerate_points(field, m - 1):
        yield from extend([first])


def transform(F: HomogPoly, cols) -> HomogPoly:
    """The form X -> F(M X) where M has the given columns."""
    return substitute(F, cols)


def _rows_of(cols) -> tuple[tuple[int, ...], ...]:
    return tuple(zip(*cols))


def equiv(F: HomogPoly, G: HomogPoly, budget: int = DEFAULT_BUDGET) -> EquivResult:
    """Search PGL for M with F(M X) a scalar multiple of G(X)."""
    if (F.field, F.nvars, F.degree) != (G.field, G.nvars, G.degree):
        return EquivResult(EquivStatus.INEQUIVALENT, reason="different field, variable count or degree")
    if count_points(F) != count_points(G):
        return EquivResult(EquivStatus.INEQUIVALENT, reason="point counts differ")
    if thas_invariant(F)[0] != thas_invariant(G)[0]:
        return EquivResult(EquivStatus.INEQUIVALENT, reason="Thas invariants differ")
    order = pgl_order(F.nvars, F.field.q)
    if order > budget:
        return EquivResult(EquivStatus.BUDGET_EXCEEDED, reason=f"|PGL| = {order} exceeds budget {budget}")
    target = G.normalized()
    if F.normalized() == target:
        eye = tuple(tuple(int(i == j) for j in range(F.nvars)) for i in range(F.nvars))
        return EquivResult(EquivStatus.EQUIVALENT, eye, reason="forms agree up to a scalar", checked=1)
    checked = 0
    for cols in iter_pgl(F.field, F.nvars):
        checked += 1
        if transform(F, cols).normalized() == target:
            return EquivResult(EquivStatus.EQUIVALENT, _rows_of(cols), checked=checked)
    return EquivResult(EquivStatus.INEQUIVALENT, reason="no element of PGL maps one onto the other",
                       checked=checked)


def orbit(F: HomogPoly, budget: int = DEFAULT_BUDGET) -> dict[HomogPoly, tuple]:
    """Every normalized image of F under PGL, each with one matrix achieving it."""
    order = pgl_order(F.nvars, F.field.q)
    if order > budget:
        raise ValueError(f"|PGL| = {order} exceeds budget {budget}")
    out: dict = {}
    for cols in iter_pgl(F.field, F.nvars):
        G = transform(F, cols).normalized()
        if G not in out:
            out[G] = _rows_of(cols)
    return out
