"""Points and flats of P^N(F_q).

A point is a tuple of N+1 encoded field elements whose first nonzero entry
is 1.  A flat is stored as its reduced row-echelon basis, so equal flats
have identical bases and can be hashed and compared directly.
"""
from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass

import numpy as np

from .gf import GF


def proj_count(N: int, q: int) -> int:
    """Number of F_q-points of P^N; zero for N = -1."""
    if N < -1:
        raise ValueError("N must be >= -1")
    return sum(q ** i for i in range(N + 1))


def gaussian_binomial(m: int, j: int, q: int) -> int:
    """Number of j-dimensional subspaces of F_q^m."""
    if not 0 <= j <= m:
        raise ValueError("need 0 <= j <= m")
    num = den = 1
    for i in range(j):
        num *= q ** (m - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


def normalize(field: GF, vec) -> tuple[int, ...] | None:
    """Scale so the first nonzero entry is 1; ``None`` for the zero vector."""
    for c in vec:
        if c:
            if c == 1:
                return tuple(vec)
            inv = field.inv(c)
            return tuple(field.mul(inv, x) for x in vec)
    return None


def rref(field: GF, rows) -> tuple[tuple[int, ...], ...]:
    """Reduced row-echelon form with zero rows dropped."""
    m = [list(r) for r in rows]
    if not m:
        return ()
    ncols = len(m[0])
    pivot_row = 0
    for col in range(ncols):
        sel = next((i for i in range(pivot_row, len(m)) if m[i][col]), None)
        if sel is None:
            continue
        m[pivot_row], m[sel] = m[sel], m[pivot_row]
        inv = field.inv(m[pivot_row][col])
        prow = [field.mul(inv, x) for x in m[pivot_row]]
        m[pivot_row] = prow
        for i in range(len(m)):
            if i != pivot_row and m[i][col]:
                c = field.neg(m[i][col])
                m[i] = [field.add(a, field.mul(c, b)) for a, b in zip(m[i], prow)]
        pivot_row += 1
        if pivot_row == len(m):
            break
    return tuple(tuple(r) for r in m[:pivot_row])


def rank(field: GF, rows) -> int:
    return len(rref(field, rows))


def determinant(field: GF, matrix) -> int:
    m = [list(r) for r in matrix]
    n = len(m)
    det = 1
    for col in range(n):
        sel = next((i for i in range(col, n) if m[i][col]), None)
        if sel is None:
            return 0
        if sel != col:
            m[col], m[sel] = m[sel], m[col]
            det = field.neg(det)
        piv = m[col][col]
        det = field.mul(det, piv)
        inv = field.inv(piv)
        for i in range(col + 1, n):
            if m[i][col]:
                c = field.neg(field.mul(m[i][col], inv))
                m[i] = [field.add(a, field.mul(c, b)) for a, b in zip(m[i], m[col])]
    return det


def null_space(field: GF, rows, ncols: int) -> tuple[tuple[int, ...], ...]:
    """Basis (rows, RREF) of the solutions x of ``rows . x = 0``."""
    red = rref(field, rows) if rows else ()
    pivots = [next(j for j, x in enumerate(r) if x) for r in red]
    free = [j for j in range(ncols) if j not in pivots]
    basis = []
    for f in free:
        v = [0] * ncols
        v[f] = 1
        for r, pc in zip(red, pivots):
            v[pc] = field.neg(r[f])
        basis.append(v)
    return rref(field, basis)


@dataclass(frozen=True)
class Flat:
    """An F_q-linear subspace of P^N given by its canonical RREF basis."""

    field: GF
    basis: tuple[tuple[int, ...], ...]
    ambient: int

    @classmethod
    def from_rows(cls, field: GF, rows, ambient: int | None = None) -> "Flat":
        rows = [tuple(r) for r in rows]
        if ambient is None:
            if not rows:
                raise ValueError("ambient dimension needed for an empty flat")
            ambient = len(rows[0]) - 1
        return cls(field, rref(field, rows), ambient)

    @classmethod
    def empty(cls, field: GF, ambient: int) -> "Flat":
        return cls(field, (), ambient)

    @classmethod
    def whole(cls, field: GF, ambient: int) -> "Flat":
        eye = tuple(tuple(int(i == j) for j in range(ambient + 1)) for i in range(ambient + 1))
        return cls(field, eye, ambient)

    @classmethod
    def hyperplane(cls, field: GF, coeffs) -> "Flat":
        """The hyperplane sum c_i X_i = 0."""
        coeffs = tuple(coeffs)
        if not any(coeffs):
            raise ValueError("zero linear form")
        return cls(field, null_space(field, [coeffs], len(coeffs)), len(coeffs) - 1)

    @property
    def dim(self) -> int:
        return len(self.basis) - 1

    @property
    def pivots(self) -> list[int]:
        return [next(j for j, x in enumerate(r) if x) for r in self.basis]

    def __len__(self):
        return proj_count(self.dim, self.field.q)

    def reduce(self, vec) -> list[int]:
        """Remainder of ``vec`` after eliminating the pivot columns."""
        f = self.field
        v = list(vec)
        for r, pc in zip(self.basis, self.pivots):
            c = v[pc]
            if c:
                c = f.neg(c)
                v = [f.add(a, f.mul(c, b)) for a, b in zip(v, r)]
        return v

    def contains_point(self, point) -> bool:
        return not any(self.reduce(point))

    def contains_flat(self, other: "Flat") -> bool:
        return all(self.contains_point(r) for r in other.basis)

    def join(self, point) -> "Flat":
        return Flat.from_rows(self.field, list(self.basis) + [tuple(point)], self.ambient)

    def points(self):
        """Rational points of the flat, each once (normalized)."""
        f = self.field
        k = self.dim
        for u in enumerate_points(f, k) if k >= 0 else ():
            vec = [0] * (self.ambient + 1)
            for c, row in zip(u, self.basis):
                if c:
                    vec = [f.add(a, f.mul(c, b)) for a, b in zip(vec, row)]
            yield normalize(f, vec)

    def equations(self) -> tuple[tuple[int, ...], ...]:
        """Linear forms (as coefficient rows) cutting out the flat."""
        return null_space(self.field, list(self.basis), self.ambient + 1)

    def serialize(self) -> str:
        fmt = self.field.format
        return ";".join(",".join(fmt(x) for x in r) for r in self.basis)

    def __str__(self):
        return self.serialize()


def point_at(field: GF, N: int, index: int) -> tuple[int, ...]:
    """The point with the given position in the lexicographic enumeration."""
    q = field.q
    if not 0 <= index < proj_count(N, q):
        raise IndexError(index)
    # points with their leading 1 at position N come first, then N-1, ...
    for j in range(N + 1):
        size = q ** j
        if index < size:
            lead = N - j
            tail = []
            for _ in range(j):
                tail.append(index % q)
                index //= q
            return (0,) * lead + (1,) + tuple(reversed(tail))
        index -= size
    raise AssertionError


def point_rank(field: GF, point) -> int:
    q = field.q
    N = len(point) - 1
    lead = next(i for i, c in enumerate(point) if c)
    j = N - lead
    offset = sum(q ** t for t in range(j))
    value = 0
    for c in point[lead + 1:]:
        value = value * q + c
    return offset + value


def enumerate_points(field: GF, N: int, start: int = 0):
    """All points of P^N(F_q) in lexicographic order, resuming at ``start``."""
    q = field.q
    if N < 0:
        return
    done = 0
    for j in range(N + 1):
        size = q ** j
        if start >= done + size:
            done += size
            continue
        lead = (0,) * (N - j) + (1,)
        skip = max(0, start - done)
        for tail in itertools.islice(itertools.product(range(q), repeat=j), skip, None):
            yield lead + tail
        done += size


def span(field: GF, points, ambient: int | None = None) -> Flat:
    points = list(points)
    if not points:
        raise ValueError("span of an empty list")
    return Flat.from_rows(field, points, ambient)


def enumerate_flats(field: GF, N: int, k: int, start: int = 0):
    """Every k-flat of P^N(F_q) once, sorted by canonical basis."""
    if not 0 <= k <= N:
        raise ValueError("need 0 <= k <= N")
    yield from itertools.islice(_all_flats(field, N, k), start, None)


@functools.lru_cache(maxsize=64)
def _all_flats(field: GF, N: int, k: int) -> tuple[Flat, ...]:
    q = field.q
    out = []
    for piv in itertools.combinations(range(N + 1), k + 1):
        free = [(i, j) for i, pc in enumerate(piv) for j in range(pc + 1, N + 1) if j not in piv]
        for vals in itertools.product(range(q), repeat=len(free)):
            rows = [[0] * (N + 1) for _ in piv]
            for i, pc in enumerate(piv):
                rows[i][pc] = 1
            for (i, j), v in zip(free, vals):
                rows[i][j] = v
            out.append(Flat(field, tuple(tuple(r) for r in rows), N))
    out.sort(key=lambda fl: fl.basis)
    return tuple(out)


def flats_through(L: Flat):
    """Flats of dimension dim L + 1 containing L, each once."""
    N = L.ambient
    if L.dim >= N:
        raise ValueError("L is the whole space")
    field = L.field
    pivots = set(L.pivots)
    free = [j for j in range(N + 1) if j not in pivots]
    for u in enumerate_points(field, len(free) - 1):
        vec = [0] * (N + 1)
        for j, c in zip(free, u):
            vec[j] = c
        yield L.join(vec)


class SpaceIndex:
    """Numbered points of P^N(F_q) with lazily numbered flats.

    Every registered flat carries the bitmask of its points (bit i is the
    i-th point of :func:`enumerate_points`) and, on demand, the ids of the
    flats one dimension up that contain it.  Intended to be shared, read
    mostly; registration is append-only.
    """

    def __init__(self, field: GF, N: int):
        self.field = field
        self.N = N
        self.points = list(enumerate_points(field, N))
        self.index = {pt: i for i, pt in enumerate(self.points)}
        self.array = points_array(field, N)
        self._hyperplanes: dict = {}
        self._flats: dict[int, list[Flat]] = {}
        self._ids: dict[int, dict] = {}
        self._masks: dict[int, list[int]] = {}
        self._up: dict[int, dict[int, list[int]]] = {}
        self._incidence: dict[int, tuple] = {}
        for pt in self.points:
            self.register(Flat(field, (pt,), N))

    def register(self, flat: Flat) -> int:
        d = flat.dim
        ids = self._ids.setdefault(d, {})
        fid = ids.get(flat.basis)
        if fid is None:
            fid = len(ids)
            ids[flat.basis] = fid
            self._flats.setdefault(d, []).append(flat)
            mask = 0
            for pt in flat.points():
                mask |= 1 << self.index[pt]
            self._masks.setdefault(d, []).append(mask)
        return fid

    def flat(self, dim: int, fid: int) -> Flat:
        return self._flats[dim][fid]

    def mask(self, dim: int, fid: int) -> int:
        return self._masks[dim][fid]

    def up(self, dim: int, fid: int) -> list[int]:
        cache = self._up.setdefault(dim, {})
        out = cache.get(fid)
        if out is None:
            out = [self.register(g) for g in flats_through(self._flats[dim][fid])]
            cache[fid] = out
        return out

    def incidence(self, dim: int):
        """``(flats, matrix)``: all dim-flats in canonical order and their point incidence."""
        got = self._incidence.get(dim)
        if got is None:
            flats = list(_all_flats(self.field, self.N, dim))
            mat = np.zeros((len(flats), len(self.points)), dtype=np.float64)
            for row, fl in enumerate(flats):
                fid = self.register(fl)
                m = self._masks[dim][fid]
                for i in range(len(self.points)):
                    if m >> i & 1:
                        mat[row, i] = 1.0
            got = (flats, mat)
            self._incidence[dim] = got
        return got

    def hyperplane_mask(self, coeffs) -> int:
        """Point mask of the hyperplane sum c_i X_i = 0."""
        key = normalize(self.field, coeffs)
        mask = self._hyperplanes.get(key)
        if mask is None:
            vals = self.field.vsum(self.field.vmul(self.array, np.array(key, dtype=np.int64)[None, :]), axis=1)
            mask = self.points_mask(vals == 0)
            self._hyperplanes[key] = mask
        return mask

    def points_mask(self, flags) -> int:
        bits = np.packbits(np.asarray(flags, dtype=bool), bitorder="little")
        return int.from_bytes(bits.tobytes(), "little")


@functools.lru_cache(maxsize=32)
def points_array(field: GF, N: int) -> np.ndarray:
    """All points of P^N(F_q) as rows, in :func:`enumerate_points` order."""
    q = field.q
    blocks = []
    for j in range(N + 1):
        tails = np.indices((q,) * j).reshape(j, -1).T if j else np.zeros((1, 0), dtype=np.int64)
        head = np.zeros((len(tails), N + 1 - j), dtype=np.int64)
        head[:, -1] = 1
        blocks.append(np.hstack([head, tails]))
    out = np.vstack(blocks).astype(np.int64)
    out.setflags(write=False)
    return out


@functools.lru_cache(maxsize=32)
def space_index(field: GF, N: int) -> SpaceIndex:
    return SpaceIndex(field, N)
