from fractions import Fraction

import pytest

from fqhb import bounds
from fqhb.bounds import BoundError, BoundSpec, quadric_cone_count
from fqhb.families import cone, elliptic_quadric, hyperbolic_quadric, parabolic_quadric
from fqhb.forms import count_points
from fqhb.gf import get_field, prime_power
from fqhb.projgeom import proj_count

GRID_Q = (2, 3, 4, 5, 7, 8, 9)


def field_of(q):
    return get_field(*prime_power(q))


def test_theta_examples():
    for q in (2, 3, 5, 9):
        assert bounds.theta(2, 0, 2, q) == q * q + 1
    assert bounds.theta(2, 1, 3, 4) == 45
    assert bounds.theta(2, 1, 3, 2) == 15 == proj_count(3, 2)


def test_serre_examples():
    assert bounds.serre_bound(2, 2, 2) == 11 == bounds.theta(2, 2, 2, 2)
    assert bounds.serre_bound(3, 1, 2) == 7


def test_singular_and_homma_examples():
    assert bounds.singular_k0_bound(2, 3, 7) == 1
    assert bounds.singular_k0_bound(3, 2, 4) == 22
    assert bounds.homma_k0_bound(3, 2, 4) == 34
    for q in (2, 3, 4):
        assert bounds.homma_k0_bound(2, 2, q) == q * q + 1


def _grid():
    for q in (2, 3, 4, 5, 7, 8, 9):
        for d in range(2, q + 2):
            for n in range(1, 6):
                yield q, d, n


def test_monotone_in_k():
    for q, d, n in _grid():
        vals = [bounds.theta(n, k, d, q) for k in range(1, n + 1)]
        assert vals == sorted(vals)


def test_remark_on_ambient_count():
    for q, d, n in _grid():
        full = proj_count(n + 1, q)
        for k in range(0, n + 1):
            t = bounds.theta(n, k, d, q)
            assert t <= full
            if k > 0:
                assert (t == full) == (d == q + 1)
    # one step past the grid the bound overshoots
    for q in (2, 3, 4):
        assert bounds.theta(2, 1, q + 2, q) > proj_count(3, q)


def test_serre_identity_and_bound_ordering():
    for q, d, n in _grid():
        assert bounds.theta(n, n, d, q) == bounds.serre_bound(d, n, q)
        assert bounds.singular_k0_bound(d, n, q) <= bounds.theta(n, 0, d, q)
        assert bounds.theta(n, 0, d, q) - bounds.homma_k0_bound(d, n, q) == (d - 2) * q ** (n - 1)


def test_theta_against_rational_reevaluation():
    # geometric-series form of N_q(P^m) evaluated with exact fractions
    def N(m, q):
        return Fraction(q ** (m + 1) - 1, q - 1)

    for q, d, n in _grid():
        for k in range(n + 1):
            if k:
                want = (d - 1) * q ** k * N(n - k, q) + N(k, q)
            else:
                want = (d - 1) * q ** n + (d - 2) * N(n - 1, q) + 1
            assert bounds.theta(n, k, d, q) == want


@pytest.mark.parametrize("args", [(1, 0, 1, 2), (0, 0, 2, 2), (2, 3, 2, 2), (2, -1, 2, 2), (2, 1, 2, 6)])
def test_bound_spec_errors(args):
    with pytest.raises(BoundError):
        BoundSpec(*args)
    with pytest.raises(BoundError):
        bounds.theta(*args)


@pytest.mark.parametrize("fn", [bounds.serre_bound, bounds.singular_k0_bound, bounds.homma_k0_bound])
def test_simple_bound_errors(fn):
    with pytest.raises(BoundError):
        fn(1, 2, 2)
    with pytest.raises(BoundError):
        fn(2, 0, 2)


def test_quadric_cone_examples():
    for q in (2, 3, 4, 5):
        assert quadric_cone_count(2, -1, "hyperbolic", q) == (q + 1) ** 2 == bounds.theta(2, 1, 2, q)
        assert quadric_cone_count(2, -1, "elliptic", q) == q * q + 1 == bounds.theta(2, 0, 2, q)
        for n in range(1, 5):
            for h in range(-1, n):
                if (n - h) % 2 == 0:
                    assert quadric_cone_count(n, h, "parabolic", q) == proj_count(n, q)
    assert quadric_cone_count(2, -1, "elliptic", 2) == 5


def _brute(n, h, kind, field):
    m = n - h  # base lives in P^m, with m + 1 variables
    if kind == "parabolic":
        base = parabolic_quadric(m // 2, field)
    elif kind == "hyperbolic":
        base = hyperbolic_quadric((m - 1) // 2, field)
    else:
        base = elliptic_quadric((m - 1) // 2, field)
    form = cone(h, base) if h >= 0 else base
    assert form.nvars == n + 2
    return count_points(form)


@pytest.mark.parametrize("q", [2, 3])
def test_quadric_cone_count_matches_enumeration(q):
    f = field_of(q)
    for n in range(1, 5 if q == 2 else 4):
        for h in range(-1, n):
            kinds = ["parabolic"] if (n - h) % 2 == 0 else ["hyperbolic", "elliptic"]
            for kind in kinds:
                assert quadric_cone_count(n, h, kind, q) == _brute(n, h, kind, f), (n, h, kind)


def test_elliptic_cones_fall_short_except_the_surface():
    # hyperbolic cones meet theta at k = (n+h+1)/2; elliptic cones, with one
    # fewer dimension of contained flats, meet theta only as the k = 0 surface
    for q in (2, 3, 4, 5, 7, 8, 9):
        for n in range(1, 6):
            for h in range(-1, n):
                if (n - h) % 2 == 0:
                    continue
                hyp = quadric_cone_count(n, h, "hyperbolic", q)
                ell = quadric_cone_count(n, h, "elliptic", q)
                assert hyp - ell == 2 * q ** ((n + h + 1) // 2)
                assert hyp == bounds.theta(n, (n + h + 1) // 2, 2, q)
                k_ell = (n + h - 1) // 2
                if (n, h) == (2, -1):
                    assert ell == bounds.theta(n, 0, 2, q)
                else:
                    assert ell < bounds.theta(n, max(k_ell, 0), 2, q)


@pytest.mark.parametrize("n,h,kind", [(2, 0, "hyperbolic"), (2, -1, "parabolic"), (3, 1, "elliptic"),
                                      (2, 2, "hyperbolic"), (2, -2, "parabolic"), (2, -1, "oval")])
def test_quadric_cone_errors(n, h, kind):
    with pytest.raises(BoundError):
        quadric_cone_count(n, h, kind, 3)
