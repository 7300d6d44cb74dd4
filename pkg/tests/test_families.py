import itertools

import numpy as np
import pytest

from fqhb import bounds
from fqhb.families import (
    THEOREM_LABELS,
    AntisymMatrix,
    FamilyError,
    FamilyLabel,
    applicable_constructions,
    build_hermitian_cone,
    classify_maximizer,
    concurrent_hyperplanes,
    cone,
    conic,
    elliptic_alpha_valid,
    elliptic_surface,
    factor_linear,
    hermitian,
    hyperbolic_quadric,
    is_concurrent_hyperplanes,
    space_filling,
    space_filling_nonsingular,
    standard_antisym,
)
from fqhb.forms import HomogPoly, count_points, evaluate, linear_form, parse_form
from fqhb.gf import get_field, prime_power
from fqhb.locus import invariant_report, quadric_nonsingular, singular_points, thas_invariant
from fqhb.projgeom import enumerate_points, proj_count


def field_of(q):
    return get_field(*prime_power(q))


SHAPES = [(2, 2, 1), (2, 2, 2), (2, 3, 1), (2, 3, 2), (2, 3, 3), (2, 2, 4), (3, 2, 1), (3, 2, 2),
          (3, 2, 3), (3, 4, 2), (4, 2, 2), (4, 3, 2), (4, 3, 3), (4, 5, 2), (5, 2, 2), (9, 4, 2)]


@pytest.mark.parametrize("q,d,n", SHAPES)
def test_constructions_meet_their_claims(q, d, n):
    field = field_of(q)
    cons = applicable_constructions(field, d, n)
    assert cons
    for c in cons:
        rep = invariant_report(c.form)
        assert rep.N == c.expected_N
        assert rep.k == c.expected_k
        assert rep.N == bounds.theta(n, rep.k, d, q)
        assert classify_maximizer(c.form, rep) is c.label
        assert c.label in THEOREM_LABELS
        assert set(rep.apexes) <= set(rep.sing_rational)


def test_hyperplane_examples(F2):
    pair = concurrent_hyperplanes(2, 2, F2)
    assert pair == parse_form("X0*X1", F2, 4) and count_points(pair) == 11
    tri = concurrent_hyperplanes(3, 1, F2)
    assert tri == parse_form("X0^2*X1+X0*X1^2", F2, 3)
    assert count_points(tri) == 7 == proj_count(2, 2)
    skew = concurrent_hyperplanes(2, 2, F2, [linear_form(F2, [1, 0, 0, 0]), linear_form(F2, [0, 0, 1, 0])])
    assert count_points(skew) == bounds.theta(2, 2, 2, 2)


def test_hyperplane_errors(F2, F3):
    X = [linear_form(F3, c) for c in ([1, 0, 0], [0, 1, 0], [0, 0, 1])]
    with pytest.raises(FamilyError, match="codimension-2"):
        concurrent_hyperplanes(3, 1, F3, X)
    with pytest.raises(FamilyError, match="distinct"):
        concurrent_hyperplanes(2, 1, F3, [X[0], X[0].scale(2)])
    with pytest.raises(FamilyError):
        concurrent_hyperplanes(4, 1, F2)
    with pytest.raises(FamilyError, match="exactly"):
        concurrent_hyperplanes(3, 1, F3, X[:2])


def test_space_filling_example(F2):
    A = AntisymMatrix.from_upper(F2, 4, [1, 0, 0, 0, 0, 1])
    F = space_filling(A)
    assert F == parse_form("X0*X1^2+X1*X0^2+X2*X3^2+X3*X2^2", F2, 4)
    assert count_points(F) == 15 and A.det() == 1 and space_filling_nonsingular(A)
    assert thas_invariant(F)[0] == 1 and singular_points(F) == []
    line = space_filling(AntisymMatrix.from_upper(F2, 3, [1, 0, 0]))
    assert line == concurrent_hyperplanes(3, 1, F2)


@pytest.mark.parametrize("q", [2, 3, 4])
@pytest.mark.parametrize("size", [3, 4, 5])
def test_space_filling_covers_every_point(q, size):
    field = field_of(q)
    rng = np.random.default_rng(100 * q + size)
    made = 0
    while made < 100:
        ent = [int(x) for x in rng.integers(0, q, size=size * (size - 1) // 2)]
        if not any(ent):
            continue
        A = AntisymMatrix.from_upper(field, size, ent)
        F = space_filling(A)
        assert count_points(F) == proj_count(size - 1, q)
        if size % 2:
            assert A.det() == 0
        made += 1


def test_antisym_validation(F2, F3):
    with pytest.raises(FamilyError, match="diagonal"):
        AntisymMatrix(F2, ((1, 0), (0, 0)))
    with pytest.raises(FamilyError, match="-a_01"):
        AntisymMatrix(F3, ((0, 1), (1, 0)))
    assert AntisymMatrix(F3, ((0, 1), (2, 0))).det() == 1
    with pytest.raises(FamilyError, match="square"):
        AntisymMatrix(F2, ((0, 1),))
    with pytest.raises(FamilyError, match="entries"):
        AntisymMatrix.from_upper(F2, 3, [1])
    with pytest.raises(FamilyError, match="zero form"):
        space_filling(AntisymMatrix.from_upper(F2, 3, [0, 0, 0]))
    assert standard_antisym(F3, 4).det() != 0


def test_hermitian_examples(F4):
    H = hermitian(2, F4)
    assert H == parse_form("X0^3+X1^3+X2^3+X3^3", F4, 4)
    rep = invariant_report(H)
    assert (rep.N, rep.k, rep.sing_rational) == (45, 1, [])
    curve = hermitian(1, F4)
    assert count_points(curve) == 9 < bounds.theta(1, 0, 3, 4) == 10
    with pytest.raises(FamilyError, match="square"):
        hermitian(2, get_field(2))


def test_cone_examples(F2, F4):
    assert count_points(cone(0, hermitian(2, F4))) == 181 == bounds.theta(3, 2, 3, 4)
    assert count_points(cone(0, hyperbolic_quadric(1, F2))) == 19 == bounds.theta(3, 2, 2, 2)
    base = hyperbolic_quadric(1, F2)
    assert cone(0, cone(1, base)) == cone(2, base) == cone(1, cone(0, base))
    for l in range(3):
        C = cone(l, base)
        assert count_points(C) == 2 ** (l + 1) * 9 + proj_count(l, 2)


def test_hermitian_curve_cone_is_not_a_maximizer(F4):
    c = build_hermitian_cone(F4, 0, 1)
    rep = invariant_report(c.form)
    assert rep.N == c.expected_N == 37 and not rep.is_maximizer
    assert rep.apexes == [(0, 0, 0, 1)]
    assert classify_maximizer(c.form, rep) is FamilyLabel.NON_MAXIMIZER


@pytest.mark.parametrize("s,q,N,k", [(1, 2, 9, 1), (1, 3, 16, 1), (2, 2, 35, 2)])
def test_hyperbolic_examples(s, q, N, k):
    F = hyperbolic_quadric(s, field_of(q))
    assert count_points(F) == N and thas_invariant(F)[0] == k


def test_elliptic_examples(F2, F3):
    E = elliptic_surface(1, F2)
    assert E == parse_form("X0^2+X0*X1+X1^2+X2*X3", F2, 4)
    assert count_points(E) == 5 and thas_invariant(E)[0] == 0
    with pytest.raises(FamilyError):
        elliptic_surface(1, F3)
    E3 = elliptic_surface(2, F3)
    assert count_points(E3) == 10 and thas_invariant(E3)[0] == 0


@pytest.mark.parametrize("q", [2, 3, 4, 5, 7, 8, 9])
def test_elliptic_condition_matches_irreducibility(q):
    field = field_of(q)
    line = list(enumerate_points(field, 1))
    for a in range(q):
        f = HomogPoly(field, 2, 2, {(2, 0): a, (1, 1): 1, (0, 2): 1})
        irreducible = all(evaluate(f, p) for p in line)
        assert elliptic_alpha_valid(a, field) == irreducible
        if irreducible:
            assert count_points(elliptic_surface(a, field)) == q * q + 1


@pytest.mark.parametrize("q,N", [(2, 3), (3, 4), (5, 6), (4, 5)])
def test_conic_counts(q, N):
    C = conic(field_of(q))
    assert count_points(C) == N
    assert thas_invariant(C)[0] == 0 and quadric_nonsingular(C)


def test_conic_char2_substitution(F2):
    assert conic(F2) == parse_form("X0^2+X1*X2", F2, 3)
    literal = parse_form("X0^2+X1^2+X2^2", F2, 3)
    assert not quadric_nonsingular(literal)


def test_classify_examples(F2):
    hyp = hyperbolic_quadric(1, F2)
    assert classify_maximizer(hyp, invariant_report(hyp)) is FamilyLabel.HYPERBOLIC_CONE_II3
    sf = space_filling(standard_antisym(F2, 4))
    assert classify_maximizer(sf, invariant_report(sf)) is FamilyLabel.SPACE_FILLING_II1
    pair = parse_form("X0*X1", F2, 4)
    assert classify_maximizer(pair, invariant_report(pair)) is FamilyLabel.HYPERPLANES_I
    other = parse_form("X0*X1+X2^2", F2, 4)
    assert classify_maximizer(other, invariant_report(other)) is FamilyLabel.NON_MAXIMIZER


def test_factor_linear(F3):
    ells = [linear_form(F3, c) for c in ([1, 0, 2], [0, 1, 1], [1, 1, 1])]
    F = ells[0] * ells[1] * ells[2]
    factors, rest = factor_linear(F)
    assert len(factors) == 3 and rest.degree == 0
    prod = factors[0] * factors[1] * factors[2]
    assert prod.normalized() == F.normalized()
    assert not is_concurrent_hyperplanes(F)
    G = ells[0] * ells[1] * (ells[0] + ells[1])
    assert is_concurrent_hyperplanes(G)
    irreducible = parse_form("X0^2+X1^2", F3, 3)
    assert factor_linear(irreducible) == ([], irreducible)


def test_hyperplane_repeats_are_not_concurrent(F2):
    sq = parse_form("X0^2*X1", F2, 3)
    assert not is_concurrent_hyperplanes(sq)
