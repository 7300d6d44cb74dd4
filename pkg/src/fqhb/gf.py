"""Arithmetic in small finite fields F_q, q = p^r <= 2^16.

Elements are plain integers in ``range(q)``: the element
``a_0 + a_1 x + ... + a_{r-1} x^{r-1}`` (reduced modulo the field modulus)
is encoded as ``a_0 + a_1 p + ... + a_{r-1} p^{r-1}``.  The prime subfield is
therefore ``range(p)`` and prime-field elements are ordinary residues.

Multiplication goes through exp/log tables built from a fixed generator.
The :class:`FieldElement` wrapper gives operator syntax and guards against
mixing elements of different fields; the heavy code paths use the integer
methods on :class:`GF` and the vectorised ``v*`` helpers directly.
"""
from __future__ import annotations

import functools
import itertools
import re

import numpy as np

from ._moduli import DEFAULT_MODULI

MAX_ORDER = 2 ** 16


class FieldError(ValueError):
    """Invalid field parameters or an illegal field operation."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    f = 2
    while f * f <= n:
        if n % f == 0:
            return False
        f += 1
    return True


def prime_factors(n: int) -> list[int]:
    out, f = [], 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        out.append(n)
    return out


def prime_power(q: int) -> tuple[int, int]:
    """Return ``(p, r)`` with ``q == p**r``; raise if q is not a prime power."""
    if q < 2:
        raise FieldError(f"{q} is not a prime power")
    p = prime_factors(q)[0]
    r, m = 0, q
    while m % p == 0:
        m //= p
        r += 1
    if m != 1:
        raise FieldError(f"{q} is not a prime power")
    return p, r


# -- polynomials over F_p, coefficient lists with the constant term first ----

def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _polymod(a: list[int], m: list[int], p: int) -> list[int]:
    a = _trim(list(a))
    dm = len(m) - 1
    inv_lead = pow(m[-1], p - 2, p)
    while len(a) - 1 >= dm and a:
        c = a[-1] * inv_lead % p
        shift = len(a) - 1 - dm
        for j, mj in enumerate(m):
            a[shift + j] = (a[shift + j] - c * mj) % p
        _trim(a)
    return a


def _polymulmod(a: list[int], b: list[int], m: list[int], p: int) -> list[int]:
    prod = [0] * (len(a) + len(b) - 1) if a and b else []
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                prod[i + j] = (prod[i + j] + x * y) % p
    return _polymod(prod, m, p)


def is_irreducible(modulus: list[int] | tuple[int, ...], p: int) -> bool:
    """Trial division by every monic polynomial of degree 1..r//2."""
    r = len(modulus) - 1
    if r < 1:
        return False
    if r == 1:
        return True
    for deg in range(1, r // 2 + 1):
        for low in itertools.product(range(p), repeat=deg):
            if not _polymod(list(modulus), list(low) + [1], p):
                return False
    return True


class GF:
    """The finite field F_{p^r} with a fixed modulus and generator.

    Immutable after construction.  Two instances compare equal when they
    share ``(p, r, modulus)``.
    """

    def __init__(self, p: int, r: int = 1, modulus=None):
        if not is_prime(p):
            raise FieldError(f"characteristic {p} is not prime")
        if r < 1:
            raise FieldError("extension degree must be >= 1")
        q = p ** r
        if q > MAX_ORDER:
            raise FieldError(f"q = {q} exceeds the supported maximum {MAX_ORDER}")
        if modulus is None:
            modulus = (0, 1) if r == 1 else DEFAULT_MODULI[(p, r)]
        modulus = tuple(int(c) % p for c in modulus)
        if len(modulus) != r + 1 or modulus[-1] != 1:
            raise FieldError(f"modulus must be monic of degree {r}")
        if not is_irreducible(modulus, p):
            raise FieldError(f"modulus {modulus} is reducible over F_{p}")
        self.p, self.r, self.q = p, r, q
        self.modulus = modulus
        self.sqrt_q = p ** (r // 2) if r % 2 == 0 else None
        self._build_tables()

    # -- construction -----------------------------------------------------

    def _to_poly(self, v: int) -> list[int]:
        out = []
        for _ in range(self.r):
            out.append(v % self.p)
            v //= self.p
        return out

    def _from_poly(self, a: list[int]) -> int:
        v = 0
        for c in reversed(a):
            v = v * self.p + c
        return v

    def _poly_pow(self, v: int, e: int) -> int:
        m, p = list(self.modulus), self.p
        base, result = self._to_poly(v), [1]
        while e:
            if e & 1:
                result = _polymulmod(result, base, m, p)
            base = _polymulmod(base, base, m, p)
            e >>= 1
        return self._from_poly(result)

    def _build_tables(self):
        p, q, r = self.p, self.q, self.r
        factors = prime_factors(q - 1) if q > 2 else []
        gen = None
        for cand in range(1, q):
            if r == 1:
                ok = all(pow(cand, (q - 1) // f, p) != 1 for f in factors)
            else:
                ok = all(self._poly_pow(cand, (q - 1) // f) != 1 for f in factors)
            if ok and (q == 2 or cand != 1):
                gen = cand
                break
        if gen is None:
            raise FieldError("no generator found")
        self.generator = gen
        exp = [0] * (2 * (q - 1))
        log = [-1] * q
        x = 1
        gpoly = self._to_poly(gen)
        for i in range(q - 1):
            exp[i] = x
            log[x] = i
            if r == 1:
                x = x * gen % p
            else:
                x = self._from_poly(_polymulmod(self._to_poly(x), gpoly, list(self.modulus), p))
        for i in range(q - 1, 2 * (q - 1)):
            exp[i] = exp[i - (q - 1)]
        if -1 in log[1:]:
            raise FieldError("generator does not have order q-1")
        self.exp, self.log = exp, log
        # digit vectors (coefficients of 1, x, x^2, ...) for vectorised addition
        self.digits = np.array([self._to_poly(v) for v in range(q)], dtype=np.int64).reshape(q, r)
        self.powers_of_p = p ** np.arange(r, dtype=np.int64)
        self.np_exp = np.array(exp + exp[:1], dtype=np.int64)
        self.np_log = np.array([max(v, 0) for v in log], dtype=np.int64)
        if p != 2 and r > 1 and q <= 256:
            self._add_table = [[self._add_digits(a, b) for b in range(q)] for a in range(q)]
        else:
            self._add_table = None
        self.neg_table = [self._neg_digits(a) for a in range(q)]

    def _add_digits(self, a: int, b: int) -> int:
        p, v, scale = self.p, 0, 1
        while a or b:
            v += ((a % p + b % p) % p) * scale
            a //= p
            b //= p
            scale *= p
        return v

    def _neg_digits(self, a: int) -> int:
        p, v, scale = self.p, 0, 1
        while a:
            v += ((-(a % p)) % p) * scale
            a //= p
            scale *= p
        return v

    # -- identity ---------------------------------------------------------

    def __eq__(self, other):
        return isinstance(other, GF) and (self.p, self.r, self.modulus) == (other.p, other.r, other.modulus)

    def __hash__(self):
        return hash((self.p, self.r, self.modulus))

    def __repr__(self):
        return f"GF({self.p}^{self.r}, modulus={self.modulus_str()})"

    def __reduce__(self):
        return (get_field, (self.p, self.r, self.modulus))

    def modulus_str(self) -> str:
        return ",".join(str(c) for c in self.modulus)

    def describe(self) -> dict:
        return {
            "p": self.p,
            "r": self.r,
            "q": self.q,
            "modulus": list(self.modulus),
            "generator": self.format(self.generator) if self.r > 1 else self.generator,
        }

    @property
    def elements(self) -> range:
        return range(self.q)

    # -- scalar arithmetic on encoded integers ----------------------------

    def add(self, a: int, b: int) -> int:
        if self.r == 1:
            return (a + b) % self.p
        if self.p == 2:
            return a ^ b
        if self._add_table is not None:
            return self._add_table[a][b]
        return self._add_digits(a, b)

    def neg(self, a: int) -> int:
        return self.neg_table[a]

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg_table[b])

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return self.exp[self.log[a] + self.log[b]]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero in " + repr(self))
        return self.exp[(self.q - 1 - self.log[a]) % (self.q - 1)]

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, k: int) -> int:
        if a == 0:
            if k < 0:
                raise ZeroDivisionError("negative power of zero")
            return 1 if k == 0 else 0
        return self.exp[(self.log[a] * k) % (self.q - 1)]

    def pow_sqm(self, a: int, k: int) -> int:
        """Square-and-multiply power, independent of the log tables."""
        if k < 0:
            a, k = self.inv(a), -k
        result = 1
        while k:
            if k & 1:
                result = self.mul(result, a)
            a = self.mul(a, a)
            k >>= 1
        return result

    def from_int(self, n: int) -> int:
        """Image of the integer n in the prime subfield."""
        return n % self.p

    # -- structure maps -----------------------------------------------------

    def frobenius_sqrt(self, x: int) -> int:
        """x -> x^sqrt(q); an involution when q is a square."""
        if self.sqrt_q is None:
            raise FieldError(f"q = {self.q} is not a square")
        return self.pow(x, self.sqrt_q)

    def trace(self, x: int) -> int:
        """Absolute trace x + x^p + ... + x^(p^(r-1)), an element of F_p."""
        t, y = 0, x
        for _ in range(self.r):
            t = self.add(t, y)
            y = self.pow(y, self.p)
        return t

    def is_square(self, x: int) -> bool:
        if self.p == 2 or x == 0:
            return True
        return self.pow(x, (self.q - 1) // 2) == 1

    # -- vectorised helpers (numpy int arrays of encoded elements) ----------

    def vmul(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        out = self.np_exp[(self.np_log[a] + self.np_log[b]) % (self.q - 1)]
        return np.where((a == 0) | (b == 0), 0, out)

    def vadd(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.r == 1:
            return (a + b) % self.p
        if self.p == 2:
            return a ^ b
        d = (self.digits[a] + self.digits[b]) % self.p
        return d @ self.powers_of_p

    def vsum(self, a, axis=-1):
        a = np.asarray(a, dtype=np.int64)
        if self.r == 1:
            return a.sum(axis=axis) % self.p
        if self.p == 2:
            return np.bitwise_xor.reduce(a, axis=axis)
        axis = axis % a.ndim
        d = self.digits[a].sum(axis=axis) % self.p
        return d @ self.powers_of_p

    def vinv(self, a):
        a = np.asarray(a, dtype=np.int64)
        if np.any(a == 0):
            raise ZeroDivisionError("inverse of zero")
        return self.np_exp[(self.q - 1 - self.np_log[a]) % (self.q - 1)]

    # -- text -----------------------------------------------------------------

    def format(self, x: int) -> str:
        if self.r == 1 or x in (0, 1):
            return str(x)
        return f"g^{self.log[x]}"

    def parse(self, text: str) -> int:
        """Parse a decimal integer (reduced mod p) or ``g^k``."""
        s = text.strip()
        m = re.fullmatch(r"g(?:\^(-?\d+))?", s)
        if m:
            k = int(m.group(1)) if m.group(1) is not None else 1
            return self.pow(self.generator, k)
        if re.fullmatch(r"-?\d+", s):
            return int(s) % self.p
        raise FieldError(f"cannot parse field element {text!r}")

    def element(self, value) -> "FieldElement":
        if isinstance(value, str):
            value = self.parse(value)
        if not 0 <= value < self.q:
            raise FieldError(f"{value} is not an element encoding of F_{self.q}")
        return FieldElement(self, value)

    def gen(self) -> "FieldElement":
        return FieldElement(self, self.generator)


class FieldElement:
    """An element of a specific :class:`GF`, with operator syntax."""

    __slots__ = ("field", "value")

    def __init__(self, field: GF, value: int):
        self.field = field
        self.value = value

    def _coerce(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise FieldError("operands belong to different fields")
            return other.value
        if isinstance(other, int):
            return self.field.from_int(other)
        return NotImplemented

    def __add__(self, other):
        b = self._coerce(other)
        return FieldElement(self.field, self.field.add(self.value, b))

    __radd__ = __add__

    def __sub__(self, other):
        b = self._coerce(other)
        return FieldElement(self.field, self.field.sub(self.value, b))

    def __rsub__(self, other):
        b = self._coerce(other)
        return FieldElement(self.field, self.field.sub(b, self.value))

    def __neg__(self):
        return FieldElement(self.field, self.field.neg(self.value))

    def __mul__(self, other):
        b = self._coerce(other)
        return FieldElement(self.field, self.field.mul(self.value, b))

    __rmul__ = __mul__

    def __truediv__(self, other):
        b = self._coerce(other)
        return FieldElement(self.field, self.field.div(self.value, b))

    def __pow__(self, k: int):
        return FieldElement(self.field, self.field.pow_sqm(self.value, k))

    def inverse(self):
        return FieldElement(self.field, self.field.inv(self.value))

    def frobenius_sqrt(self):
        return FieldElement(self.field, self.field.frobenius_sqrt(self.value))

    def trace(self):
        return FieldElement(self.field, self.field.trace(self.value))

    def is_square(self) -> bool:
        return self.field.is_square(self.value)

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.field == other.field and self.value == other.value
        if isinstance(other, int):
            return self.value == self.field.from_int(other)
        return NotImplemented

    def __hash__(self):
        return hash((self.field, self.value))

    def __int__(self):
        return self.value

    def __repr__(self):
        return f"{self.field.format(self.value)} in F_{self.field.q}"

    def __str__(self):
        return self.field.format(self.value)


@functools.lru_cache(maxsize=None)
def _cached_field(p: int, r: int, modulus) -> GF:
    return GF(p, r, modulus)


def get_field(p: int, r: int = 1, modulus=None) -> GF:
    """Cached field constructor; repeated calls return the same object."""
    if modulus is not None:
        modulus = tuple(int(c) for c in modulus)
    return _cached_field(p, r, modulus)


def field_create(p: int, r: int = 1, modulus=None) -> GF:
    return get_field(p, r, modulus)


def parse_field_spec(text: str, modulus: str | None = None) -> GF:
    """Parse ``"p^r"`` or a plain prime power ``"q"``; optional modulus ``"c0,c1,...,1"``."""
    s = text.strip()
    m = re.fullmatch(r"(\d+)\s*\^\s*(\d+)", s)
    if m:
        p, r = int(m.group(1)), int(m.group(2))
        if not is_prime(p):
            raise FieldError(f"characteristic {p} is not prime")
    elif s.isdigit():
        p, r = prime_power(int(s))
    else:
        raise FieldError(f"cannot parse field specification {text!r}")
    mod = None
    if modulus:
        mod = tuple(int(c) for c in modulus.split(","))
    return get_field(p, r, mod)
