"""Constructors for the extremal hypersurfaces and a classifier for maximizers."""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass

from . import bounds
from .forms import HomogPoly, FormError, divide_linear, linear_form, point_values, variable
from .gf import GF, FieldError
from .locus import InvariantReport, cone_apexes, cone_base, thas_invariant, vertex_flat
from .projgeom import determinant, enumerate_points, proj_count, rank, space_index


class FamilyError(ValueError):
    """Invalid parameters for a family constructor."""


class FamilyLabel(str, enum.Enum):
    HYPERPLANES_I = "HYPERPLANES_I"
    SPACE_FILLING_II1 = "SPACE_FILLING_II1"
    HERMITIAN_II2a = "HERMITIAN_II2a"
    HERMITIAN_CONE_II2 = "HERMITIAN_CONE_II2"
    HYPERBOLIC_CONE_II3 = "HYPERBOLIC_CONE_II3"
    CONIC_T2 = "CONIC_T2"
    ELLIPTIC_T2 = "ELLIPTIC_T2"
    NON_MAXIMIZER = "NON_MAXIMIZER"
    UNRECOGNIZED_MAXIMIZER = "UNRECOGNIZED_MAXIMIZER"

    def __str__(self):
        return self.value


THEOREM_LABELS = frozenset(FamilyLabel) - {FamilyLabel.NON_MAXIMIZER, FamilyLabel.UNRECOGNIZED_MAXIMIZER}


@dataclass(frozen=True)
class AntisymMatrix:
    """Square matrix with A^t = -A and zero diagonal."""

    field: GF
    rows: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        f = self.field
        m = len(self.rows)
        if any(len(r) != m for r in self.rows):
            raise FamilyError("matrix must be square")
        for i in range(m):
            if self.rows[i][i]:
                raise FamilyError(f"diagonal entry a_{i}{i} must be zero")
            for j in range(i + 1, m):
                if self.rows[j][i] != f.neg(self.rows[i][j]):
                    raise FamilyError(f"a_{j}{i} must equal -a_{i}{j}")

    @classmethod
    def from_upper(cls, field: GF, size: int, entries) -> "AntisymMatrix":
        """Build from a_01, a_02, ..., a_0(m-1), a_12, ... (row-major upper triangle)."""
        entries = list(entries)
        need = size * (size - 1) // 2
        if len(entries) != need:
            raise FamilyError(f"a {size}x{size} antisymmetric matrix needs {need} entries, got {len(entries)}")
        rows = [[0] * size for _ in range(size)]
        it = iter(entries)
        for i in range(size):
            for j in range(i + 1, size):
                a = next(it)
                if not 0 <= a < field.q:
                    raise FamilyError(f"entry {a} is not a field element")
                rows[i][j] = a
                rows[j][i] = field.neg(a)
        return cls(field, tuple(tuple(r) for r in rows))

    @property
    def size(self) -> int:
        return len(self.rows)

    def det(self) -> int:
        return determinant(self.field, self.rows)


def pencil(field: GF, nvars: int, d: int) -> list[HomogPoly]:
    """d distinct members of the pencil spanned by X0 and X1."""
    if d > field.q + 1:
        raise FamilyError(f"a pencil over F_{field.q} has only {field.q + 1} members")
    members = [[1, 0], [0, 1]] + [[1, c] for c in range(1, field.q)]
    return [linear_form(field, m + [0] * (nvars - 2)) for m in members[:d]]


def concurrent_hyperplanes(d: int, n: int, field: GF, hyperplanes=None) -> HomogPoly:
    """Product of d distinct hyperplanes through a common codimension-2 flat."""
    nvars = n + 2
    if hyperplanes is None:
        hyperplanes = pencil(field, nvars, d)
    hyperplanes = list(hyperplanes)
    if len(hyperplanes) != d:
        raise FamilyError(f"need exactly {d} hyperplanes")
    coeffs = []
    for ell in hyperplanes:
        if ell.degree != 1 or ell.nvars != nvars or ell.is_zero():
            raise FamilyError("hyperplanes must be nonzero linear forms in n+2 variables")
        coeffs.append(_linear_coeffs(ell))
    for a, b in itertools.combinations(coeffs, 2):
        if rank(field, [a, b]) < 2:
            raise FamilyError("hyperplanes must be pairwise distinct")
    if d >= 2 and rank(field, coeffs) != 2:
        raise FamilyError("hyperplanes do not share a codimension-2 flat")
    out = hyperplanes[0]
    for ell in hyperplanes[1:]:
        out = out * ell
    return out


def _linear_coeffs(ell: HomogPoly) -> list[int]:
    n = ell.nvars
    return [ell.terms.get(tuple(int(a == b) for b in range(n)), 0) for a in range(n)]


def space_filling(A: AntisymMatrix) -> HomogPoly:
    """sum a_ij X_i X_j^q, the form X A (X^q)^t."""
    f = A.field
    m = A.size
    terms: dict = {}
    for i in range(m):
        for j in range(m):
            a = A.rows[i][j]
            if not a:
                continue
            e = [0] * m
            e[i] += 1
            e[j] += f.q
            e = tuple(e)
            terms[e] = f.add(terms.get(e, 0), a)
    F = HomogPoly(f, m, f.q + 1, terms)
    if F.is_zero():
        raise FamilyError("the zero matrix gives the zero form")
    return F


def space_filling_nonsingular(A: AntisymMatrix) -> bool:
    return A.det() != 0


def hermitian(m: int, field: GF) -> HomogPoly:
    """X0^(s+1) + ... + X_{m+1}^(s+1) with s = sqrt(q)."""
    if field.sqrt_q is None:
        raise FamilyError(f"q = {field.q} is not a square")
    if m < 0:
        raise FamilyError("dimension must be >= 0")
    e = field.sqrt_q + 1
    nvars = m + 2
    return HomogPoly(field, nvars, e, {tuple(e * (i == j) for j in range(nvars)): 1 for i in range(nvars)})


def cone(l: int, base: HomogPoly) -> HomogPoly:
    """The cone with an l-dimensional vertex over ``base`` (vertex coordinates appended)."""
    if l < -1:
        raise FamilyError("vertex dimension must be >= -1")
    if base.is_zero():
        raise FamilyError("base form is zero")
    return base.embed(base.nvars + l + 1)


def hyperbolic_quadric(s: int, field: GF) -> HomogPoly:
    """X0X1 + X2X3 + ... + X_{2s}X_{2s+1}."""
    if s < 0:
        raise FamilyError("s must be >= 0")
    nvars = 2 * s + 2
    terms = {tuple(int(j in (2 * i, 2 * i + 1)) for j in range(nvars)): 1 for i in range(s + 1)}
    return HomogPoly(field, nvars, 2, terms)


def elliptic_alpha_valid(alpha: int, field: GF) -> bool:
    """alpha X0^2 + X0X1 + X1^2 is irreducible over F_q."""
    if field.p == 2:
        return field.trace(alpha) == 1
    disc = field.sub(1, field.mul(4 % field.p, alpha))
    return disc != 0 and not field.is_square(disc)


def default_alpha(field: GF) -> int:
    return next(a for a in range(field.q) if elliptic_alpha_valid(a, field))


def _binary_part(alpha: int, field: GF, nvars: int) -> dict:
    def mono(i, j):
        e = [0] * nvars
        e[i] += 1
        e[j] += 1
        return tuple(e)

    out = {mono(0, 1): 1, mono(1, 1): 1}
    if alpha:
        out[mono(0, 0)] = alpha
    return out


def elliptic_surface(alpha: int, field: GF) -> HomogPoly:
    """alpha X0^2 + X0X1 + X1^2 + X2X3 in P^3."""
    return elliptic_quadric(1, field, alpha)


def elliptic_quadric(s: int, field: GF, alpha: int | None = None) -> HomogPoly:
    """f(X0, X1) + X2X3 + ... + X_{2s}X_{2s+1} with f irreducible."""
    if alpha is None:
        alpha = default_alpha(field)
    if not elliptic_alpha_valid(alpha, field):
        raise FamilyError(f"alpha = {field.format(alpha)} makes alpha X0^2 + X0X1 + X1^2 reducible")
    nvars = 2 * s + 2
    terms = _binary_part(alpha, field, nvars)
    for i in range(1, s + 1):
        terms[tuple(int(j in (2 * i, 2 * i + 1)) for j in range(nvars))] = 1
    return HomogPoly(field, nvars, 2, terms)


def parabolic_quadric(s: int, field: GF) -> HomogPoly:
    """X0^2 + X1X2 + ... + X_{2s-1}X_{2s} in P^{2s}."""
    if s < 1:
        raise FamilyError("s must be >= 1")
    nvars = 2 * s + 1
    terms = {tuple(2 * (j == 0) for j in range(nvars)): 1}
    for i in range(s):
        terms[tuple(int(j in (2 * i + 1, 2 * i + 2)) for j in range(nvars))] = 1
    return HomogPoly(field, nvars, 2, terms)


def conic(field: GF) -> HomogPoly:
    """A nonsingular plane conic; X0^2 + X1X2 in characteristic 2."""
    if field.p == 2:
        return HomogPoly(field, 3, 2, {(2, 0, 0): 1, (0, 1, 1): 1})
    return HomogPoly(field, 3, 2, {(2, 0, 0): 1, (0, 2, 0): 1, (0, 0, 2): 1})


# -- classification --------------------------------------------------------

def factor_linear(F: HomogPoly, candidates=None) -> tuple[list[HomogPoly], HomogPoly]:
    """Split off rational linear factors by trial division.

    Returns ``(factors, rest)`` with F = prod(factors) * rest up to a scalar.
    ``candidates`` are coefficient vectors to try; the default is every
    hyperplane of P^{nvars-1}.
    """
    f = F.field
    if candidates is None:
        candidates = enumerate_points(f, F.nvars - 1)
    factors = []
    rest = F
    for c in candidates:
        ell = linear_form(f, list(c))
        while rest.degree >= 1:
            quo = divide_linear(rest, ell)
            if quo is None:
                break
            factors.append(ell)
            rest = quo
        if rest.degree == 0:
            break
    return factors, rest


def _contained_hyperplanes(F: HomogPoly) -> list[tuple[int, ...]]:
    idx = space_index(F.field, F.nvars - 1)
    onx = idx.points_mask(point_values(F, idx.array) == 0)
    return [h for h in idx.points if idx.hyperplane_mask(h) & ~onx == 0]


def is_concurrent_hyperplanes(F: HomogPoly) -> bool:
    """F is a product of deg F distinct linear forms spanning a 2-dimensional space."""
    factors, rest = factor_linear(F, _contained_hyperplanes(F))
    if len(factors) != F.degree:
        return False
    coeffs = [_linear_coeffs(ell) for ell in factors]
    if len({tuple(c) for c in coeffs}) != len(coeffs):
        return False
    return F.degree < 2 or rank(F.field, coeffs) == 2


def classify_maximizer(F: HomogPoly, report: InvariantReport) -> FamilyLabel:
    """Match a hypersurface to the extremal family it belongs to.

    The checks are membership evidence, tried in a fixed order; anything
    that attains the bound but fits no family is UNRECOGNIZED_MAXIMIZER.
    """
    if not report.is_maximizer:
        return FamilyLabel.NON_MAXIMIZER
    f = F.field
    q, d = f.q, F.degree
    n = F.nvars - 2
    k = report.k
    if k == n and is_concurrent_hyperplanes(F):
        return FamilyLabel.HYPERPLANES_I
    if d == q + 1 and report.N == proj_count(n + 1, q) and 0 < k <= n - 1:
        return FamilyLabel.SPACE_FILLING_II1
    apexes = report.apexes
    if f.sqrt_q is not None and d == f.sqrt_q + 1 and k > 0:
        if not apexes and n % 2 == 0 and k == n // 2:
            return FamilyLabel.HERMITIAN_II2a
        if apexes and _hermitian_base(F, apexes):
            return FamilyLabel.HERMITIAN_CONE_II2
    if d == 2 and k > 0:
        V = vertex_flat(F, apexes)
        h = V.dim
        if (n - h) % 2 == 1 and k == (n + h + 1) // 2:
            s = (n - h - 1) // 2
            base_count = (report.N - proj_count(h, q)) // q ** (h + 1)
            if base_count == (q ** s + 1) * proj_count(s, q):
                return FamilyLabel.HYPERBOLIC_CONE_II3
    if k == 0 and d == 2 and n == 1:
        return FamilyLabel.CONIC_T2
    if k == 0 and d == 2 and n == 2:
        return FamilyLabel.ELLIPTIC_T2
    return FamilyLabel.UNRECOGNIZED_MAXIMIZER


def _hermitian_base(F: HomogPoly, apexes) -> bool:
    V = vertex_flat(F, apexes)
    base = cone_base(F, V)
    m = base.nvars - 2
    if m < 2 or m % 2:
        return False
    from .locus import invariant_report

    rep = invariant_report(base)
    return classify_maximizer(base, rep) is FamilyLabel.HERMITIAN_II2a


# -- registry used by the CLI and the verifier ------------------------------

@dataclass(frozen=True)
class Construction:
    """A constructed family member with the invariants its theorem case claims."""

    family: str
    form: HomogPoly
    label: FamilyLabel
    expected_k: int | None
    expected_N: int

    @property
    def n(self) -> int:
        return self.form.nvars - 2


def _expected_theta(form: HomogPoly, k: int) -> int:
    return bounds.theta(form.nvars - 2, k, form.degree, form.field.q)


def build_hyperplanes(field: GF, n: int, d: int) -> Construction:
    F = concurrent_hyperplanes(d, n, field)
    return Construction("hyperplanes", F, FamilyLabel.HYPERPLANES_I, n, _expected_theta(F, n))


def build_space_filling(field: GF, A: AntisymMatrix) -> Construction:
    F = space_filling(A)
    k, _ = thas_invariant(F)
    label = FamilyLabel.HYPERPLANES_I if k == A.size - 2 else FamilyLabel.SPACE_FILLING_II1
    return Construction("space-filling", F, label, k, proj_count(A.size - 1, field.q))


def standard_antisym(field: GF, size: int) -> AntisymMatrix:
    """a_01 = a_23 = ... = 1: nondegenerate when size is even."""
    entries = []
    for i in range(size):
        for j in range(i + 1, size):
            entries.append(int(i % 2 == 0 and j == i + 1))
    return AntisymMatrix.from_upper(field, size, entries)


def build_hermitian(field: GF, m: int) -> Construction:
    F = hermitian(m, field)
    if m % 2:
        return Construction("hermitian", F, FamilyLabel.NON_MAXIMIZER, None, _hermitian_count(m, field.q))
    return Construction("hermitian", F, FamilyLabel.HERMITIAN_II2a, m // 2, _expected_theta(F, m // 2))


def _hermitian_count(m: int, q: int) -> int:
    s = int(round(q ** 0.5))
    # points on the nonsingular Hermitian variety in P^{m+1}
    return (s ** (m + 2) + (-1) ** (m + 1)) * (s ** (m + 1) - (-1) ** (m + 1)) // (q - 1)


def build_hermitian_cone(field: GF, l: int, m: int) -> Construction:
    base = hermitian(m, field)
    F = cone(l, base)
    q = field.q
    N = q ** (l + 1) * _hermitian_count(m, q) + proj_count(l, q)
    if m % 2 or m < 2:
        return Construction("hermitian-cone", F, FamilyLabel.NON_MAXIMIZER, None, N)
    k = l + 1 + m // 2
    return Construction("hermitian-cone", F, FamilyLabel.HERMITIAN_CONE_II2, k, N)


def build_hyperbolic_cone(field: GF, h: int, s: int) -> Construction:
    F = cone(h, hyperbolic_quadric(s, field))
    n = F.nvars - 2
    k = (n + h + 1) // 2
    label = FamilyLabel.HYPERPLANES_I if k == n else FamilyLabel.HYPERBOLIC_CONE_II3
    return Construction("hyperbolic-cone", F, label, k, _expected_theta(F, k))


def build_elliptic(field: GF, alpha: int | None = None) -> Construction:
    F = elliptic_surface(default_alpha(field) if alpha is None else alpha, field)
    return Construction("elliptic", F, FamilyLabel.ELLIPTIC_T2, 0, field.q ** 2 + 1)


def build_conic(field: GF) -> Construction:
    return Construction("conic", conic(field), FamilyLabel.CONIC_T2, 0, field.q + 1)


def applicable_constructions(field: GF, d: int, n: int) -> list[Construction]:
    """Every theorem family that lives in degree d on P^{n+1}(F_q)."""
    q = field.q
    out = []
    if 2 <= d <= q + 1:
        out.append(build_hyperplanes(field, n, d))
    if d == q + 1 and n >= 1:
        out.append(build_space_filling(field, standard_antisym(field, n + 2)))
    if field.sqrt_q is not None and d == field.sqrt_q + 1:
        if n % 2 == 0:
            out.append(build_hermitian(field, n))
        for m in range(2, n, 2):
            out.append(build_hermitian_cone(field, n - m - 1, m))
    if d == 2:
        for h in range(-1, n - 1):
            if (n - h) % 2 == 1:
                out.append(build_hyperbolic_cone(field, h, (n - h - 1) // 2))
        if n == 1:
            out.append(build_conic(field))
        if n == 2:
            out.append(build_elliptic(field))
    return out


FAMILY_NAMES = (
    "hyperplanes",
    "space-filling",
    "hermitian",
    "hermitian-cone",
    "hyperbolic",
    "hyperbolic-cone",
    "elliptic",
    "conic",
)
