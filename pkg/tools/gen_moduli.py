"""Regenerate src/fqhb/_moduli.py.

For every prime power p^r <= 2^16 with r >= 2 the table holds the first monic
primitive polynomial of degree r over F_p, ordered by the base-p integer
encoding of its coefficient list (constant term first).
"""
from pathlib import Path


def is_prime(n):
    if n < 2:
        return False
    f = 2
    while f * f <= n:
        if n % f == 0:
            return False
        f += 1
    return True


def prime_factors(n):
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


def polymulmod(a, b, mod, p):
    r = len(mod) - 1
    prod = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                prod[i + j] = (prod[i + j] + x * y) % p
    for i in range(len(prod) - 1, r - 1, -1):
        c = prod[i]
        if c:
            for j in range(r + 1):
                prod[i - r + j] = (prod[i - r + j] - c * mod[j]) % p
    out = prod[:r] + [0] * max(0, r - len(prod))
    return out[:r]


def polypowmod(base, e, mod, p):
    result = [1] + [0] * (len(mod) - 2)
    while e:
        if e & 1:
            result = polymulmod(result, base, mod, p)
        base = polymulmod(base, base, mod, p)
        e >>= 1
    return result


def x_is_primitive(mod, p):
    r = len(mod) - 1
    q = p ** r
    one = [1] + [0] * (r - 1)
    x = [0, 1] + [0] * (r - 2)
    if polypowmod(x, q - 1, mod, p) != one:
        return False
    return all(polypowmod(x, (q - 1) // f, mod, p) != one for f in prime_factors(q - 1))


def first_primitive(p, r):
    for code in range(p ** r):
        coeffs = []
        c = code
        for _ in range(r):
            coeffs.append(c % p)
            c //= p
        if coeffs[0] == 0:
            continue
        mod = coeffs + [1]
        if x_is_primitive(mod, p):
            return tuple(mod)
    raise RuntimeError((p, r))


def main():
    rows = []
    for p in range(2, 257):
        if not is_prime(p):
            continue
        r = 2
        while p ** r <= 2 ** 16:
            rows.append(((p, r), first_primitive(p, r)))
            r += 1
    lines = ['"""Default moduli: first monic primitive polynomial per (p, r), constant term first.\n\nGenerated by tools/gen_moduli.py; do not edit by hand.\n"""\n', "DEFAULT_MODULI = {"]
    for key, mod in rows:
        lines.append(f"    {key}: {mod},")
    lines.append("}\n")
    out = Path(__file__).resolve().parents[1] / "src" / "fqhb" / "_moduli.py"
    out.write_text("\n".join(lines))
    print(len(rows), "entries")


if __name__ == "__main__":
    main()
