"""Batch evaluation of many forms of one shape at once.

Every quantity the census needs (values at all points, values of all
partial derivatives, restrictions to flats) is F_p-linear in the
coefficient vector.  Writing each coefficient by its F_p digits turns
those maps into integer matrices, so a chunk of forms is processed with a
handful of matrix products followed by a reduction mod p.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from .. import bounds
from ..forms import DIGITS, HomogPoly, monomial_table, monomials, substitute
from ..gf import GF
from ..projgeom import points_array, proj_count, space_index


def _linearize(field: GF, A: np.ndarray) -> np.ndarray:
    """Integer matrix of c -> (c_j A[j, t])_t acting on F_p digits.

    ``A`` is an (M, T) table of field elements; the result has shape
    (M r, T r): row (j, s) holds the digits of x^s * A[j, t].
    """
    r = field.r
    M, T = A.shape
    out = np.empty((M, r, T, r), dtype=np.int64)
    for s in range(r):
        prod = field.vmul(np.full_like(A, field.powers_of_p[s]), A)
        out[:, s, :, :] = field.digits[prod]
    return out.reshape(M * r, T * r)


def index_to_coeffs(indices: np.ndarray, q: int, M: int) -> np.ndarray:
    """Scalar-class representatives for the given enumeration indices.

    Index order follows the numeric value of the coefficient string: block j
    holds the q^j forms whose leading 1 sits at position M-1-j.
    """
    indices = np.asarray(indices, dtype=np.int64)
    out = np.zeros((len(indices), M), dtype=np.int64)
    starts = np.array([(q ** j - 1) // (q - 1) for j in range(M + 1)], dtype=np.int64)
    block = np.searchsorted(starts, indices, side="right") - 1
    tail = indices - starts[block]
    lead = M - 1 - block
    out[np.arange(len(indices)), lead] = 1
    for col in range(M - 1, -1, -1):
        active = col > lead
        out[active, col] = tail[active] % q
        tail = np.where(active, tail // q, tail)
    return out


def coeffs_to_index(coeffs: np.ndarray, q: int) -> np.ndarray:
    """Inverse of :func:`index_to_coeffs` for normalized coefficient rows."""
    coeffs = np.atleast_2d(np.asarray(coeffs, dtype=np.int64))
    M = coeffs.shape[1]
    value = np.zeros(len(coeffs), dtype=np.int64)
    for col in range(M):
        value = value * q + coeffs[:, col]
    nz = coeffs != 0
    lead = nz.argmax(axis=1)
    j = M - 1 - lead
    qj = np.array([q ** t for t in range(M)], dtype=np.int64)[j]
    return (qj - 1) // (q - 1) + (value - qj)


def coeff_ids(coeffs: np.ndarray) -> list[str]:
    table = np.frombuffer(DIGITS.encode(), dtype=np.uint8)
    chars = np.ascontiguousarray(table[coeffs])
    M = coeffs.shape[1]
    return [s.decode() for s in chars.view(f"S{M}").ravel()]


def normalize_rows(field: GF, coeffs: np.ndarray) -> np.ndarray:
    """Scale each nonzero row so its first nonzero entry is 1."""
    coeffs = np.asarray(coeffs, dtype=np.int64)
    lead = coeffs[np.arange(len(coeffs)), (coeffs != 0).argmax(axis=1)]
    inv = field.vinv(np.where(lead == 0, 1, lead))
    return field.vmul(coeffs, inv[:, None])


@dataclass
class BatchResult:
    coeffs: np.ndarray
    onx: np.ndarray  # (F, P) bool
    N: np.ndarray
    sing: np.ndarray  # (F, P) bool
    sing_count: np.ndarray
    k: np.ndarray
    contained: list  # per dim: (F, nflats) bool
    grad: np.ndarray | None = None  # (F, P, nvars) field elements


class Engine:
    """Precomputed linear maps for forms of one (field, nvars, degree)."""

    def __init__(self, field: GF, nvars: int, degree: int):
        self.field = field
        self.nvars = nvars
        self.degree = degree
        self.n = nvars - 2
        self.monos = monomials(nvars, degree)
        self.M = len(self.monos)
        self.index = space_index(field, nvars - 1)
        self.points = points_array(field, nvars - 1)
        self.P = len(self.points)
        self.symbolic = degree > field.q
        p, r = field.p, field.r
        self.p, self.r = p, r
        self._weights = np.array([p ** u for u in range(r)], dtype=np.int64)

        mono_vals = monomial_table(field, self.points, self.monos).T  # (M, P)
        blocks = [mono_vals]
        # partial derivative maps: c_j * (e_j[i] mod p) * m_{j - e_i}(pt)
        for i in range(nvars):
            lower = []
            mult = []
            for e in self.monos:
                if e[i] % p:
                    ee = list(e)
                    ee[i] -= 1
                    lower.append(tuple(ee))
                    mult.append(field.from_int(e[i]))
                else:
                    lower.append(None)
                    mult.append(0)
            tab = np.zeros((self.M, self.P), dtype=np.int64)
            rows = [j for j, e in enumerate(lower) if e is not None]
            if rows and degree > 1:
                vals = monomial_table(field, self.points, [lower[j] for j in rows]).T
                tab[rows] = field.vmul(vals, np.array([mult[j] for j in rows], dtype=np.int64)[:, None])
            elif rows:
                tab[rows] = np.array([mult[j] for j in rows], dtype=np.int64)[:, None]
            blocks.append(tab)
        # float32 matmuls are exact while every dot product stays below 2^24
        exact32 = self.M * r * (p - 1) ** 2 < 2 ** 24
        self._dtype = np.float32 if exact32 else np.float64
        self._eval = _linearize(field, np.hstack(blocks)).astype(self._dtype)

        # containment data per flat dimension 1..n
        self.flats = {}
        self._incidence = {}
        self._flat_sizes = {}
        self._restrict = {}
        for dim in range(1, self.n + 1):
            flats, inc = self.index.incidence(dim)
            self.flats[dim] = flats
            self._incidence[dim] = inc.astype(self._dtype)
            self._flat_sizes[dim] = proj_count(dim, field.q)
            if self.symbolic:
                self._restrict[dim] = self._restriction_map(flats, dim)
        self._thetas = np.array(
            [bounds.theta(self.n, k, degree, field.q) if self.n >= 1 and degree >= 2 else -1 for k in range(self.n + 1)],
            dtype=np.int64,
        )
        width = self._eval.shape[1] + sum(
            self._restrict[d].shape[1] if self.symbolic else len(f) for d, f in self.flats.items()
        )
        self.chunk = int(max(512, min(65536, 3e7 // max(width, 1))))
        # dual incidence: row h is the hyperplane with coefficient vector points[h]
        self._dual = None

    def _restriction_map(self, flats, dim: int) -> np.ndarray:
        f = self.field
        sub = monomials(dim + 1, self.degree)
        pos = {e: i for i, e in enumerate(sub)}
        S = len(sub)
        table = np.zeros((self.M, len(flats) * S), dtype=np.int64)
        for fi, L in enumerate(flats):
            for j, e in enumerate(self.monos):
                G = substitute(HomogPoly(f, self.nvars, self.degree, {e: 1}), L.basis)
                for ee, c in G.terms.items():
                    table[j, fi * S + pos[ee]] = c
        return _linearize(f, table).astype(self._dtype)

    def _digits_of(self, coeffs: np.ndarray) -> np.ndarray:
        return self.field.digits[coeffs].reshape(len(coeffs), self.M * self.r).astype(self._dtype)

    def _residues(self, prod: np.ndarray) -> np.ndarray:
        vals = prod.astype(np.int32)
        if self.p == 2:
            vals &= 1
        else:
            vals %= self.p
        return vals

    def _reduce(self, prod: np.ndarray, width: int) -> np.ndarray:
        """Fold F_p digit products back into field elements, shape (F, width)."""
        vals = self._residues(prod)
        if self.r == 1:
            return vals.reshape(len(prod), width)
        return vals.reshape(len(prod), width, self.r) @ self._weights

    def _zero(self, prod: np.ndarray, width: int) -> np.ndarray:
        vals = self._residues(prod)
        if self.r == 1:
            return (vals == 0).reshape(len(prod), width)
        return ~vals.reshape(len(prod), width, self.r).any(axis=2)

    def evaluate(self, coeffs: np.ndarray, want_grad: bool = False) -> BatchResult:
        coeffs = np.asarray(coeffs, dtype=np.int64)
        Fn = len(coeffs)
        D = self._digits_of(coeffs)
        prod = D @ self._eval
        zero = self._zero(prod, self.P * (self.nvars + 1)).reshape(Fn, self.nvars + 1, self.P)
        onx = zero[:, 0, :]
        sing = onx & zero[:, 1:, :].all(axis=1)
        N = onx.sum(axis=1)
        k = np.where(N > 0, 0, -1)
        contained = [onx]
        onx_f = onx.astype(self._dtype)
        for dim in range(1, self.n + 1):
            if self.symbolic:
                S = len(monomials(dim + 1, self.degree))
                res = self._zero(D @ self._restrict[dim], len(self.flats[dim]) * S)
                cont = res.reshape(Fn, len(self.flats[dim]), S).all(axis=2)
            else:
                counts = onx_f @ self._incidence[dim].T
                cont = counts == self._flat_sizes[dim]
            contained.append(cont)
            k = np.where(cont.any(axis=1), dim, k)
        grad = None
        if want_grad:
            vals = self._reduce(prod, self.P * (self.nvars + 1)).reshape(Fn, self.nvars + 1, self.P)
            grad = np.transpose(vals[:, 1:, :], (0, 2, 1))
        return BatchResult(coeffs, onx, N, sing, sing.sum(axis=1), k, contained, grad)

    def theta(self, k: np.ndarray) -> np.ndarray:
        return np.where(k >= 0, self._thetas[np.clip(k, 0, None)], -1)

    def witness(self, res: BatchResult, row: int):
        k = int(res.k[row])
        if k < 0:
            return None
        if k == 0:
            return self.index.flat(0, int(np.flatnonzero(res.onx[row])[0]))
        return self.flats[k][int(np.flatnonzero(res.contained[k][row])[0])]

    def form(self, coeffs) -> HomogPoly:
        return HomogPoly.from_coefficients(self.field, self.nvars, self.degree, [int(c) for c in coeffs])

    # -- lemma properties, batched ------------------------------------

    def dual_incidence(self) -> np.ndarray:
        if self._dual is None:
            f = self.field
            pts = self.points
            prods = f.vmul(pts[:, None, :], pts[None, :, :])
            self._dual = (f.vsum(prods, axis=2) == 0).astype(np.float64)
        return self._dual

    def point_ranks(self, vecs: np.ndarray) -> np.ndarray:
        """Enumeration index of each normalized row vector."""
        q = self.field.q
        width = vecs.shape[1]
        lead = (vecs != 0).argmax(axis=1)
        j = width - 1 - lead
        offset = (q ** j - 1) // (q - 1)
        value = np.zeros(len(vecs), dtype=np.int64)
        for col in range(width):
            value = np.where(col > lead, value * q + vecs[:, col], value)
        return offset + value

    def lemma_batch(self, res: BatchResult) -> dict[str, np.ndarray]:
        """Per-form first failing point index (-1 where the property holds).

        Only meaningful for maximizers with k > 0; other rows are ignored
        and report -1.
        """
        Fn = len(res.coeffs)
        out = {key: np.full(Fn, -1, dtype=np.int64) for key in ("1", "2", "4")}
        for kk in range(1, self.n + 1):
            rows = np.flatnonzero(res.k == kk)
            if not len(rows):
                continue
            inc = self._incidence[kk]
            cont = res.contained[kk][rows].astype(np.float64)
            onx = res.onx[rows]
            covered = (cont @ inc) > 0
            miss = onx & ~covered
            out["1"][rows] = np.where(miss.any(axis=1), miss.argmax(axis=1), -1)
            outside = (cont @ (1.0 - inc)) > 0
            bad = res.sing[rows] & outside
            out["2"][rows] = np.where(bad.any(axis=1), bad.argmax(axis=1), -1)
            if kk <= self.n - 1:
                target = bounds.theta(self.n - 1, kk, self.degree, self.field.q)
                grad = res.grad[rows]  # (R, P, nvars)
                smooth = onx & ~res.sing[rows]
                flat = grad.reshape(-1, self.nvars)
                nz = flat.any(axis=1)
                safe = np.where(nz[:, None], flat, 1)
                normed = normalize_rows(self.field, safe)
                hidx = self.point_ranks(normed).reshape(len(rows), self.P)
                section = onx.astype(np.float64) @ self.dual_incidence().T  # (R, nH)
                counts = np.take_along_axis(section, hidx, axis=1)
                badt = smooth & (counts != target)
                out["4"][rows] = np.where(badt.any(axis=1), badt.argmax(axis=1), -1)
        return out


@functools.lru_cache(maxsize=16)
def get_engine(field: GF, nvars: int, degree: int) -> Engine:
    return Engine(field, nvars, degree)
