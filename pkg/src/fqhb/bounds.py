"""Closed-form point-count bounds for hypersurfaces in P^{n+1}(F_q).

Python integers are unbounded, so no overflow handling is needed anywhere.
"""
from __future__ import annotations

from dataclasses import dataclass

from .gf import prime_power, FieldError
from .projgeom import proj_count


class BoundError(ValueError):
    pass


@dataclass(frozen=True)
class BoundSpec:
    n: int
    k: int
    d: int
    q: int

    def __post_init__(self):
        if self.d < 2:
            raise BoundError("degree must be >= 2")
        if self.n < 1:
            raise BoundError("dimension must be >= 1")
        if not 0 <= self.k <= self.n:
            raise BoundError(f"need 0 <= k <= n, got k={self.k}, n={self.n}")
        try:
            prime_power(self.q)
        except FieldError as exc:
            raise BoundError(str(exc)) from exc


def theta(n: int, k: int, d: int, q: int) -> int:
    """Upper bound for N_q(X) given dimension n, Thas invariant k and degree d."""
    BoundSpec(n, k, d, q)
    if k > 0:
        return (d - 1) * q ** k * proj_count(n - k, q) + proj_count(k, q)
    return (d - 1) * q ** n + (d - 2) * proj_count(n - 1, q) + 1


def serre_bound(d: int, n: int, q: int) -> int:
    """d q^n + N_q(P^{n-1}); coincides with theta at k = n."""
    if d < 2 or n < 1:
        raise BoundError("need d >= 2 and n >= 1")
    return d * q ** n + proj_count(n - 1, q)


def singular_k0_bound(d: int, n: int, q: int) -> int:
    """Bound for k = 0 hypersurfaces carrying a rational singular point."""
    if d < 2 or n < 1:
        raise BoundError("need d >= 2 and n >= 1")
    return (d - 2) * q ** n + (d - 2) * proj_count(n - 1, q) + 1


def homma_k0_bound(d: int, n: int, q: int) -> int:
    """The comparison bound for hypersurfaces without rational lines."""
    if d < 2 or n < 1:
        raise BoundError("need d >= 2 and n >= 1")
    return (d - 1) * (q ** n + 1) + (d - 2) * (proj_count(n - 2, q) - 1)


QUADRIC_KINDS = ("parabolic", "hyperbolic", "elliptic")


def quadric_cone_count(n: int, h: int, kind: str, q: int) -> int:
    """Points on the quadric cone P^h * Q^{n-h-1} in P^{n+1}.

    Q is a nondegenerate quadric of the given kind in P^{n-h}.  Parabolic
    needs n - h even; hyperbolic and elliptic need n - h odd.
    """
    if kind not in QUADRIC_KINDS:
        raise BoundError(f"unknown quadric kind {kind!r}")
    if not -1 <= h <= n - 1:
        raise BoundError("need -1 <= h <= n-1")
    m = n - h - 1
    if kind == "parabolic":
        if m % 2 == 0:
            raise BoundError("parabolic quadrics need n - h even")
        return proj_count(n, q)
    if m % 2:
        raise BoundError(f"{kind} quadrics need n - h odd")
    sign = 1 if kind == "hyperbolic" else -1
    num = q ** (h + 1) * (q ** (m // 2) + sign) * (q ** ((n - h + 1) // 2) - sign)
    return num // (q - 1) + proj_count(h, q)
