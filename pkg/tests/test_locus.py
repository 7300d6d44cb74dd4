import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fqhb.families import AntisymMatrix, cone, elliptic_surface, hermitian, hyperbolic_quadric, space_filling
from fqhb.forms import HomogPoly, all_forms, count_points, evaluate, monomials, parse_form, restrict
from fqhb.gf import get_field
from fqhb.locus import (
    BoundViolation,
    check_bounds,
    cone_apexes,
    cone_base,
    embed_field,
    flat_contained,
    invariant_report,
    lemma_checks,
    quadric_nonsingular,
    singular_points,
    smoothness,
    tangent_flat,
    thas_invariant,
    thas_search,
    vertex_flat,
)
from fqhb.projgeom import Flat, enumerate_flats, enumerate_points


@pytest.fixture(scope="module")
def sf_cubic():
    f = get_field(2)
    return space_filling(AntisymMatrix.from_upper(f, 4, [1, 0, 0, 0, 0, 1]))


def brute_k(F):
    # largest flat dimension with a vanishing restriction, over every flat
    N = F.nvars - 1
    best = -1
    for k in range(N + 1):
        if any(flat_contained(F, L) for L in enumerate_flats(F.field, N, k)):
            best = k
    return best


def test_flat_contained_examples(F2, F3, sf_cubic):
    hyp = parse_form("X0*X1+X2*X3", F2, 4)
    assert flat_contained(hyp, Flat.from_rows(F2, [(1, 0, 0, 0), (0, 0, 1, 0)]))
    for P in enumerate_flats(F2, 3, 2):
        assert not flat_contained(sf_cubic, P)
        assert all(evaluate(sf_cubic, p) == 0 for p in P.points())
    conic = parse_form("X0^2+X1*X2", F3, 3)
    assert not any(flat_contained(conic, L) for L in enumerate_flats(F3, 2, 1))


def test_symbolic_equals_pointwise_when_degree_at_most_q(F3):
    # every quadric in P^2(F_3), every line and point
    flats = list(enumerate_flats(F3, 2, 0)) + list(enumerate_flats(F3, 2, 1))
    for F in all_forms(F3, 3, 2):
        for L in flats:
            pointwise = all(evaluate(F, p) == 0 for p in L.points())
            assert flat_contained(F, L) == pointwise


def test_space_filling_gap(sf_cubic):
    pts = list(enumerate_points(sf_cubic.field, 3))
    assert count_points(sf_cubic) == len(pts) == 15
    k, W = thas_invariant(sf_cubic)
    assert k == 1 and flat_contained(sf_cubic, W)


def test_singular_points_examples(F2, F4):
    assert singular_points(parse_form("X0*X1+X2*X3", F2, 4)) == []
    sq = parse_form("X0^2+X1^2+X2^2", F2, 3)  # (X0+X1+X2)^2
    assert set(singular_points(sq)) == {(0, 1, 1), (1, 0, 1), (1, 1, 0)}
    herm_cone = cone(0, hermitian(2, F4))
    assert singular_points(herm_cone) == [(0, 0, 0, 0, 1)]


def test_singular_points_need_vanishing(F3):
    # X0^3 over F_3 has all partials zero; only points on X count
    F = parse_form("X0^3+X1^3", F3, 2)
    assert singular_points(F) == [p for p in enumerate_points(F3, 1) if evaluate(F, p) == 0]


def test_tangent_flat_examples(F2, F3):
    hyp = parse_form("X0*X1+X2*X3", F2, 4)
    assert tangent_flat(hyp, (1, 0, 0, 0)) == Flat.hyperplane(F2, (0, 1, 0, 0))
    conic = parse_form("X0^2+X1*X2", F3, 3)
    assert tangent_flat(conic, (0, 1, 0)) == Flat.hyperplane(F3, (0, 0, 1))
    with pytest.raises(ValueError):
        tangent_flat(conic, (1, 0, 0))
    with pytest.raises(ValueError):
        tangent_flat(parse_form("X0*X1", F2, 3), (0, 0, 1))


@pytest.mark.parametrize("q", [2, 3, 5])
def test_point_lies_on_its_tangent_flat(q):
    f = get_field(q)
    rng = np.random.default_rng(q)
    for _ in range(10):
        coeffs = [int(x) for x in rng.integers(0, q, size=len(monomials(4, 2)))]
        F = HomogPoly.from_coefficients(f, 4, 2, coeffs)
        if F.is_zero():
            continue
        sing = set(singular_points(F))
        for p in enumerate_points(f, 3):
            if evaluate(F, p) == 0 and p not in sing:
                T = tangent_flat(F, p)
                assert T.dim == 2 and T.contains_point(p)


def test_thas_examples(F2):
    assert thas_invariant(parse_form("X0*X1+X2*X3", F2, 4))[0] == 1
    assert thas_invariant(elliptic_surface(1, F2))[0] == 0
    k, W = thas_invariant(parse_form("X0*X1", F2, 4))
    assert k == 2 and W.dim == 2


def test_thas_empty_convention(F3):
    F = parse_form("X0^2+X1^2", F3, 2)
    k, W = thas_invariant(F)
    assert k == -1 and W.dim == -1
    assert thas_search(F) == []


@settings(max_examples=60)
@given(st.sampled_from([(3, 2, 3), (4, 2, 3), (3, 3, 2), (3, 4, 2), (4, 2, 2)]), st.data())
def test_thas_matches_brute_force_random(shape, data):
    q, nvars, d = shape
    f = get_field(2, 2) if q == 4 else get_field(q)
    M = len(monomials(nvars, d))
    coeffs = data.draw(st.lists(st.integers(0, q - 1), min_size=M, max_size=M))
    if not any(coeffs):
        coeffs[0] = 1
    F = HomogPoly.from_coefficients(f, nvars, d, coeffs)
    k, W = thas_invariant(F)
    assert k == brute_k(F)
    if k >= 0:
        assert W.dim == k and flat_contained(F, W)


def test_thas_levels_are_complete(F2):
    # every contained line of a hyperbolic quadric appears at level 1
    hyp = hyperbolic_quadric(1, F2)
    levels = thas_search(hyp)
    lines = {L for L in enumerate_flats(F2, 3, 1) if flat_contained(hyp, L)}
    assert set(levels[1]) == lines and len(lines) == 6


def test_cone_apexes_examples(F2, F4):
    herm_cone = cone(0, hermitian(2, F4))
    assert cone_apexes(herm_cone) == [(0, 0, 0, 0, 1)]
    assert cone_apexes(parse_form("X0*X1+X2*X3", F2, 4)) == []
    pair = parse_form("X0*X1", F2, 4)
    assert set(cone_apexes(pair)) == {(0, 0, 0, 1), (0, 0, 1, 0), (0, 0, 1, 1)}
    assert vertex_flat(pair).dim == 1


@pytest.mark.parametrize("formtext,q,nvars", [
    ("X0*X1", 2, 4), ("X0^2+X1*X2", 3, 4), ("X0*X1+X2^2", 2, 5), ("X0^3+X1^3+X2^3", 4, 5),
    ("X0*X1*X2", 3, 4), ("X0^2", 2, 3),
])
def test_apexes_are_singular(formtext, q, nvars):
    f = get_field(2, 2) if q == 4 else get_field(q)
    F = parse_form(formtext, f, nvars)
    assert set(cone_apexes(F)) <= set(singular_points(F))


def test_cone_base_recovers_base(F2, F4):
    base = hermitian(2, F4)
    C = cone(1, base)
    V = vertex_flat(C)
    assert V.dim == 1
    assert cone_base(C, V) == base
    with pytest.raises(ValueError):
        cone_base(hyperbolic_quadric(1, F2), Flat.from_rows(F2, [(1, 0, 0, 0)]))


def test_lemma_examples(F2, sf_cubic):
    out = lemma_checks(hyperbolic_quadric(1, F2))
    assert out["1"].passed and out["1"].checked == 9
    assert out["2"].passed and out["2"].checked == 0
    assert out["4"].passed
    sf = lemma_checks(sf_cubic)
    assert all(r.passed for r in sf.values())
    assert sf["4"].checked == 15


def test_lemma_checks_reject_non_maximizers(F2):
    with pytest.raises(ValueError):
        lemma_checks(elliptic_surface(1, F2))  # k = 0
    with pytest.raises(ValueError):
        lemma_checks(parse_form("X0*X1+X2^2", F2, 4))


def test_lemma_on_cones_has_singular_points(F2):
    C = cone(0, hyperbolic_quadric(1, F2))
    out = lemma_checks(C)
    assert out["2"].checked == 1 and out["2"].passed
    assert out["1"].passed and out["4"].passed


def test_invariant_report(F2):
    rep = invariant_report(parse_form("X0*X1+X2*X3", F2, 4))
    d = rep.to_dict()
    assert list(d) == ["N", "k", "witness", "sing_rational", "apexes", "theta", "is_maximizer"]
    assert d["N"] == 9 and d["k"] == 1 and d["is_maximizer"] and d["sing_rational"] == []
    assert json.loads(json.dumps(d)) == d


def test_check_bounds_raises(F2):
    F = parse_form("X0*X1+X2*X3", F2, 4)
    with pytest.raises(BoundViolation):
        check_bounds(F, 10, 1, 0)
    with pytest.raises(BoundViolation):
        check_bounds(F, 2, 0, 1)  # singular k=0 quadric: at most one point
    with pytest.raises(BoundViolation):
        check_bounds(F, 1, -1, 0)
    check_bounds(F, 9, 1, 0)


def test_quadric_nonsingular(F2, F3):
    assert quadric_nonsingular(parse_form("X0^2+X1*X2", F2, 3))
    assert not quadric_nonsingular(parse_form("X0^2+X1^2+X2^2", F2, 3))
    assert quadric_nonsingular(parse_form("X0^2+X1^2+X2^2", F3, 3))
    assert not quadric_nonsingular(parse_form("X0*X1", F3, 3))
    assert quadric_nonsingular(elliptic_surface(1, F2))


def test_quadric_nonsingular_agrees_with_extension_search(F2):
    # a quadric over F_2 is smooth iff it has no singular point over F_8
    # (the radical is a linear space, so a singular point exists over F_2 already;
    # the search over extensions is a consistency check)
    for F in all_forms(F2, 3, 2):
        exact = quadric_nonsingular(F)
        big = get_field(2, 3)
        img = embed_field(F2, big)
        G = HomogPoly(big, 3, 2, {e: img[c] for e, c in F.terms.items()})
        assert exact == (singular_points(G) == [])


def test_smoothness(F4):
    assert smoothness(hermitian(2, F4))["verdict"] == "nonsingular"
    assert smoothness(hermitian(2, F4))["method"] == "heuristic"
    assert smoothness(cone(0, hermitian(1, F4))) == {"verdict": "singular", "method": "rational"}
    assert smoothness(hyperbolic_quadric(1, F4))["method"] == "exact-quadric"
    assert smoothness(parse_form("X0^2+X1^2+X2^2", get_field(2), 3))["verdict"] == "singular"


def test_smoothness_finds_singularity_over_extension():
    f = get_field(2)
    # a line times a conic; they meet only in two conjugate points over F_4
    F = parse_form("X2*X0^2+X2*X0*X1+X2*X1^2+X2^3", f, 3)
    assert singular_points(F) == []
    assert smoothness(F) == {"verdict": "singular", "method": "extension-degree-2"}


def test_embed_field():
    small, big = get_field(2, 2), get_field(2, 4)
    img = embed_field(small, big)
    assert len(set(img)) == 4
    for a in range(4):
        for b in range(4):
            assert img[small.mul(a, b)] == big.mul(img[a], img[b])
            assert img[small.add(a, b)] == big.add(img[a], img[b])
    with pytest.raises(ValueError):
        embed_field(get_field(2, 2), get_field(2, 3))
