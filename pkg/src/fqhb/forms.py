"""Homogeneous forms over F_q: parsing, printing, evaluation and substitution."""
from __future__ import annotations

import functools
import itertools
import re

import numpy as np

from .gf import GF, FieldError
from .projgeom import Flat, space_index


class FormError(ValueError):
    """Malformed or inconsistent polynomial input."""


DIGITS = "0123456789abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ-_"


@functools.lru_cache(maxsize=None)
def monomials(nvars: int, degree: int) -> tuple[tuple[int, ...], ...]:
    """Exponent vectors of total degree ``degree``, lexicographically descending.

    X0^d comes first and X_{n-1}^d last; this order fixes coefficient vectors
    and census form identifiers.
    """
    if nvars == 0:
        return ((),) if degree == 0 else ()
    out = []
    for first in range(degree, -1, -1):
        for rest in monomials(nvars - 1, degree - first):
            out.append((first,) + rest)
    return tuple(out)


@functools.lru_cache(maxsize=None)
def monomial_index(nvars: int, degree: int) -> dict:
    return {e: i for i, e in enumerate(monomials(nvars, degree))}


class HomogPoly:
    """A homogeneous polynomial of fixed degree in ``nvars`` variables.

    ``terms`` maps exponent tuples to nonzero encoded coefficients.  An empty
    map is the zero polynomial, which only appears as the result of
    :func:`restrict`, :func:`partials` or :func:`substitute`.
    """

    __slots__ = ("field", "nvars", "degree", "terms", "_hash")

    def __init__(self, field: GF, nvars: int, degree: int, terms: dict | None = None):
        self.field = field
        self.nvars = nvars
        self.degree = degree
        clean = {}
        for e, c in (terms or {}).items():
            e = tuple(e)
            if len(e) != nvars or sum(e) != degree or min(e, default=0) < 0:
                raise FormError(f"monomial {e} does not fit {nvars} variables of degree {degree}")
            if c:
                clean[e] = c
        self.terms = clean
        self._hash = None

    @classmethod
    def from_coefficients(cls, field: GF, nvars: int, degree: int, coeffs) -> "HomogPoly":
        monos = monomials(nvars, degree)
        if len(coeffs) != len(monos):
            raise FormError("coefficient vector has the wrong length")
        return cls(field, nvars, degree, {e: int(c) for e, c in zip(monos, coeffs) if c})

    def coefficients(self) -> list[int]:
        return [self.terms.get(e, 0) for e in monomials(self.nvars, self.degree)]

    def is_zero(self) -> bool:
        return not self.terms

    def variables(self) -> set[int]:
        return {i for e in self.terms for i, x in enumerate(e) if x}

    def __eq__(self, other):
        return (
            isinstance(other, HomogPoly)
            and self.field == other.field
            and self.nvars == other.nvars
            and self.degree == other.degree
            and self.terms == other.terms
        )

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.field, self.nvars, self.degree, frozenset(self.terms.items())))
        return self._hash

    def __repr__(self):
        return f"HomogPoly({format_form(self)!r}, nvars={self.nvars}, F_{self.field.q})"

    def __str__(self):
        return format_form(self)

    def __add__(self, other: "HomogPoly") -> "HomogPoly":
        if (other.nvars, other.degree) != (self.nvars, self.degree) or other.field != self.field:
            raise FormError("cannot add forms of different shapes")
        f = self.field
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = f.add(out.get(e, 0), c)
        return HomogPoly(f, self.nvars, self.degree, out)

    def __mul__(self, other):
        if isinstance(other, int):
            return self.scale(other)
        if other.nvars != self.nvars or other.field != self.field:
            raise FormError("cannot multiply forms in different rings")
        f = self.field
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = f.add(out.get(e, 0), f.mul(c1, c2))
        return HomogPoly(f, self.nvars, self.degree + other.degree, out)

    def scale(self, c: int) -> "HomogPoly":
        f = self.field
        return HomogPoly(f, self.nvars, self.degree, {e: f.mul(c, v) for e, v in self.terms.items()})

    def normalized(self) -> "HomogPoly":
        """Scalar multiple whose leading coefficient (in monomial order) is 1."""
        for e in monomials(self.nvars, self.degree):
            c = self.terms.get(e)
            if c:
                return self.scale(self.field.inv(c))
        return self

    def embed(self, nvars: int) -> "HomogPoly":
        """The same form in more variables (the new ones appended, absent)."""
        pad = (0,) * (nvars - self.nvars)
        return HomogPoly(self.field, nvars, self.degree, {e + pad: c for e, c in self.terms.items()})


def linear_form(field: GF, coeffs) -> HomogPoly:
    n = len(coeffs)
    terms = {tuple(int(i == j) for j in range(n)): c for i, c in enumerate(coeffs) if c}
    return HomogPoly(field, n, 1, terms)


def variable(field: GF, nvars: int, i: int) -> HomogPoly:
    return linear_form(field, [int(j == i) for j in range(nvars)])


# -- text ----------------------------------------------------------------

_FACTOR = re.compile(r"X(\d+)(?:\^(\d+))?")


def parse_form(text: str, field: GF, nvars: int) -> HomogPoly:
    s = re.sub(r"\s+", "", text)
    if not s:
        raise FormError("empty form")
    terms: dict = {}
    degree = None
    for raw in s.split("+"):
        if not raw:
            raise FormError(f"empty term in {text!r}")
        factors = raw.split("*")
        coeff = 1
        exps = [0] * nvars
        for pos, tok in enumerate(factors):
            m = _FACTOR.fullmatch(tok)
            if m:
                i = int(m.group(1))
                if i >= nvars:
                    raise FormError(f"unknown variable X{i} (form has {nvars} variables)")
                exps[i] += int(m.group(2)) if m.group(2) else 1
            elif pos == 0:
                try:
                    coeff = field.parse(tok)
                except FieldError as exc:
                    raise FormError(f"coefficient {tok!r} is not an element of F_{field.q}") from exc
            else:
                raise FormError(f"cannot parse factor {tok!r}")
        d = sum(exps)
        if degree is None:
            degree = d
        elif d != degree:
            raise FormError(f"form is not homogeneous: degrees {degree} and {d}")
        e = tuple(exps)
        terms[e] = field.add(terms.get(e, 0), coeff)
    return HomogPoly(field, nvars, degree, terms)


def format_form(F: HomogPoly) -> str:
    if F.is_zero():
        return "0"
    out = []
    fmt = F.field.format
    for e in monomials(F.nvars, F.degree):
        c = F.terms.get(e)
        if not c:
            continue
        factors = [f"X{i}" if x == 1 else f"X{i}^{x}" for i, x in enumerate(e) if x]
        if c != 1 or not factors:
            factors.insert(0, fmt(c))
        out.append("*".join(factors))
    return "+".join(out)


def coeff_id(F: HomogPoly) -> str:
    """Base-q digit string of the coefficient vector (census identifier)."""
    return "".join(DIGITS[c] for c in F.coefficients())


def from_coeff_id(field: GF, nvars: int, degree: int, ident: str) -> HomogPoly:
    return HomogPoly.from_coefficients(field, nvars, degree, [DIGITS.index(ch) for ch in ident])


# -- evaluation ------------------------------------------------------------

def evaluate(F: HomogPoly, point) -> int:
    if len(point) != F.nvars:
        raise FormError(f"point has {len(point)} coordinates, form has {F.nvars} variables")
    f = F.field
    total = 0
    for e, c in F.terms.items():
        v = c
        for x, k in zip(point, e):
            if k:
                v = f.mul(v, f.pow(x, k))
                if not v:
                    break
        total = f.add(total, v)
    return total


def monomial_table(field: GF, points: np.ndarray, exps) -> np.ndarray:
    """Values of each monomial (columns) at each point (rows)."""
    exps = np.array(exps, dtype=np.int64).reshape(len(exps), points.shape[1])
    logs = field.np_log[points]
    zero = (points == 0).astype(np.int64)
    L = (logs @ exps.T) % (field.q - 1)
    Z = (zero @ (exps > 0).T.astype(np.int64)) > 0
    vals = field.np_exp[L]
    vals[Z] = 0
    return vals


def point_values(F: HomogPoly, points: np.ndarray | None = None) -> np.ndarray:
    """F evaluated at every point of P^{nvars-1} (or at the given rows)."""
    if points is None:
        points = space_index(F.field, F.nvars - 1).array
    if not F.terms:
        return np.zeros(len(points), dtype=np.int64)
    exps = list(F.terms)
    coeffs = np.array([F.terms[e] for e in exps], dtype=np.int64)
    table = monomial_table(F.field, points, exps)
    return F.field.vsum(F.field.vmul(table, coeffs[None, :]), axis=1)


def count_points(F: HomogPoly) -> int:
    """N_q(X): rational points of P^{nvars-1} where F vanishes."""
    if F.is_zero():
        raise FormError("the zero polynomial does not define a hypersurface")
    return int(np.count_nonzero(point_values(F) == 0))


def zero_set(F: HomogPoly) -> list[tuple[int, ...]]:
    idx = space_index(F.field, F.nvars - 1)
    vals = point_values(F, idx.array)
    return [idx.points[i] for i in np.flatnonzero(vals == 0)]


# -- substitution and derivatives -------------------------------------------

def _poly_mul(f: GF, a: dict, b: dict) -> dict:
    out: dict = {}
    for e1, c1 in a.items():
        for e2, c2 in b.items():
            e = tuple(x + y for x, y in zip(e1, e2))
            v = f.add(out.get(e, 0), f.mul(c1, c2))
            if v:
                out[e] = v
            else:
                out.pop(e, None)
    return out


def substitute(F: HomogPoly, rows) -> HomogPoly:
    """F(u_0 rows[0] + ... + u_{m-1} rows[m-1]) as a form in u_0..u_{m-1}."""
    rows = [tuple(r) for r in rows]
    if any(len(r) != F.nvars for r in rows):
        raise FormError("substitution rows must have one entry per variable")
    f = F.field
    m = len(rows)
    unit = [tuple(int(a == b) for b in range(m)) for a in range(m)]
    lin = [{unit[a]: rows[a][i] for a in range(m) if rows[a][i]} for i in range(F.nvars)]
    one = {(0,) * m: 1}
    powers: dict = {}

    def power(i, k):
        key = (i, k)
        if key not in powers:
            powers[key] = one if k == 0 else _poly_mul(f, power(i, k - 1), lin[i])
        return powers[key]

    out: dict = {}
    for e, c in F.terms.items():
        acc = {(0,) * m: c}
        for i, k in enumerate(e):
            if k:
                acc = _poly_mul(f, acc, power(i, k))
                if not acc:
                    break
        for ee, cc in acc.items():
            v = f.add(out.get(ee, 0), cc)
            if v:
                out[ee] = v
            else:
                out.pop(ee, None)
    return HomogPoly(f, m, F.degree, out)


def restrict(F: HomogPoly, L: Flat) -> HomogPoly:
    """F pulled back along the parametrisation u -> u . basis(L)."""
    if L.ambient != F.nvars - 1:
        raise FormError("flat and form live in different projective spaces")
    if L.dim < 0:
        raise FormError("cannot restrict to the empty flat")
    return substitute(F, L.basis)


def partials(F: HomogPoly) -> list[HomogPoly]:
    """Formal partial derivatives, exponents reduced into the prime field."""
    f = F.field
    out = []
    for i in range(F.nvars):
        terms = {}
        for e, c in F.terms.items():
            k = e[i] % f.p
            if e[i] and k:
                ee = list(e)
                ee[i] -= 1
                terms[tuple(ee)] = f.mul(k, c)
        out.append(HomogPoly(f, F.nvars, F.degree - 1, terms))
    return out


def gradient_at(F: HomogPoly, point) -> list[int]:
    return [evaluate(D, point) for D in partials(F)]


def divide_linear(F: HomogPoly, ell: HomogPoly) -> HomogPoly | None:
    """Exact quotient F / ell for a linear form ell, or ``None``."""
    if ell.degree != 1 or ell.is_zero():
        raise FormError("divisor must be a nonzero linear form")
    f = F.field
    n = F.nvars
    coeffs = [ell.terms.get(tuple(int(a == b) for b in range(n)), 0) for a in range(n)]
    j = next(i for i, c in enumerate(coeffs) if c)
    inv = f.inv(coeffs[j])
    # ell = c_j (X_j - a) with a linear in the other variables
    a = {}
    for i, c in enumerate(coeffs):
        if i != j and c:
            a[tuple(int(b == i) for b in range(n))] = f.neg(f.mul(c, inv))
    if F.is_zero():
        return HomogPoly(f, n, F.degree - 1, {})
    top = max(e[j] for e in F.terms)
    slices = [{} for _ in range(top + 1)]
    for e, c in F.terms.items():
        ee = list(e)
        t = ee[j]
        ee[j] = 0
        slices[t][tuple(ee)] = c
    # synthetic division by (X_j - a)
    b = [None] * top
    carry: dict = {}
    for t in range(top, 0, -1):
        cur = dict(slices[t])
        for e, c in carry.items():
            v = f.add(cur.get(e, 0), c)
            if v:
                cur[e] = v
            else:
                cur.pop(e, None)
        b[t - 1] = cur
        carry = _poly_mul(f, a, cur)
    rem = dict(slices[0])
    for e, c in carry.items():
        v = f.add(rem.get(e, 0), c)
        if v:
            rem[e] = v
        else:
            rem.pop(e, None)
    if rem:
        return None
    terms = {}
    for t, part in enumerate(b):
        for e, c in part.items():
            ee = list(e)
            ee[j] += t
            terms[tuple(ee)] = f.mul(c, inv)
    return HomogPoly(f, n, F.degree - 1, terms)


def random_form(field: GF, nvars: int, degree: int, rng) -> HomogPoly:
    """A uniformly random nonzero form, leading coefficient 1."""
    M = len(monomials(nvars, degree))
    while True:
        coeffs = [int(x) for x in rng.integers(0, field.q, size=M)]
        if any(coeffs):
            return HomogPoly.from_coefficients(field, nvars, degree, coeffs).normalized()


def all_forms(field: GF, nvars: int, degree: int):
    """One representative per scalar class of nonzero forms (lead coefficient 1)."""
    M = len(monomials(nvars, degree))
    q = field.q
    for lead in range(M - 1, -1, -1):
        for tail in itertools.product(range(q), repeat=M - 1 - lead):
            yield HomogPoly.from_coefficients(field, nvars, degree, [0] * lead + [1] + list(tail))
