import json

import numpy as np
import pytest

from fqhb import bounds
from fqhb.census import CSV_HEADER, CensusError, census, census_budget, form_count
from fqhb.census.census import random_coefficients, record_index
from fqhb.census.engine import coeff_ids, coeffs_to_index, get_engine, index_to_coeffs, normalize_rows
from fqhb.families import FamilyLabel
from fqhb.forms import all_forms, coeff_id, count_points, evaluate, monomials
from fqhb.gf import get_field
from fqhb.locus import flat_contained, singular_points, tangent_flat, thas_invariant, thas_search
from fqhb.projgeom import enumerate_flats, enumerate_points

SHAPES = [(2, 3, 2), (2, 4, 2), (2, 3, 3), (3, 3, 2), (3, 4, 2), (4, 3, 2), (2, 5, 2), (5, 3, 2), (4, 4, 3)]


def _field(q):
    return get_field(2, 2) if q == 4 else get_field(q)


def test_index_order_matches_all_forms():
    for q, nvars, d in [(2, 3, 2), (3, 2, 2), (4, 2, 2), (3, 3, 2)]:
        f = _field(q)
        M = len(monomials(nvars, d))
        total = (q ** M - 1) // (q - 1)
        coeffs = index_to_coeffs(np.arange(total), q, M)
        want = [F.coefficients() for F in all_forms(f, nvars, d)]
        assert coeffs.tolist() == want
        assert (coeffs_to_index(coeffs, q) == np.arange(total)).all()
        ids = coeff_ids(coeffs)
        assert ids == sorted(ids)


def test_normalize_rows(F5):
    rows = np.array([[0, 3, 1], [2, 0, 4], [0, 0, 1]])
    out = normalize_rows(F5, rows)
    assert out.tolist() == [[0, 1, 2], [1, 0, 2], [0, 0, 1]]


def test_record_index_round_trip(F3):
    for i, F in enumerate(all_forms(F3, 3, 2)):
        if i % 97 == 0:
            assert record_index(F3, coeff_id(F)) == i


def _direct_lemmas(F, k):
    # independent per-point computation of the three lemma properties
    f = F.field
    n = F.nvars - 2
    top = [L for L in enumerate_flats(f, n + 1, k) if flat_contained(F, L)]
    onx = [p for p in enumerate_points(f, n + 1) if evaluate(F, p) == 0]
    sing = set(singular_points(F))
    one = all(any(L.contains_point(p) for L in top) for p in onx)
    two = all(L.contains_point(p) for p in sing for L in top)
    four = None
    if 0 < k <= n - 1:
        target = bounds.theta(n - 1, k, F.degree, f.q)
        four = True
        for p in onx:
            if p in sing:
                continue
            T = tangent_flat(F, p)
            if sum(1 for x in T.points() if evaluate(F, x) == 0) != target:
                four = False
    return one, two, four


@pytest.mark.parametrize("q,nvars,d", SHAPES)
def test_engine_agrees_with_locus(q, nvars, d):
    f = _field(q)
    rng = np.random.default_rng(q * 100 + nvars * 10 + d)
    eng = get_engine(f, nvars, d)
    coeffs = random_coefficients(f, d, nvars - 2, 40, int(rng.integers(1 << 30)))
    res = eng.evaluate(coeffs, want_grad=True)
    lem = eng.lemma_batch(res)
    for i, row in enumerate(coeffs):
        F = eng.form(row)
        k, _ = thas_invariant(F)
        assert res.N[i] == count_points(F)
        assert res.k[i] == k
        assert res.sing_count[i] == len(singular_points(F))
        if k >= 0:
            W = eng.witness(res, i)
            assert W.dim == k and flat_contained(F, W)
        if k > 0 and len(eng.index.points) <= 85:
            one, two, four = _direct_lemmas(F, k)
            assert (lem["1"][i] < 0) == one
            assert (lem["2"][i] < 0) == two
            if four is not None:
                assert (lem["4"][i] < 0) == four


def test_engine_symbolic_containment_distinguishes_space_filling(F2):
    eng = get_engine(F2, 4, 3)
    assert eng.symbolic
    from fqhb.families import space_filling, standard_antisym

    sf = space_filling(standard_antisym(F2, 4))
    res = eng.evaluate(np.array([sf.coefficients()]))
    assert res.N[0] == 15 and res.k[0] == 1


def test_budget_and_mode_errors(F2, monkeypatch):
    with pytest.raises(CensusError, match="budget"):
        census(F2, 2, 2, budget=1000)
    with pytest.raises(CensusError, match="count"):
        census(F2, 2, 2, mode="random")
    with pytest.raises(CensusError, match="mode"):
        census(F2, 2, 2, mode="sideways")
    with pytest.raises(CensusError):
        census(F2, 1, 2)
    with pytest.raises(CensusError):
        census(F2, 2, 2, shards=0)
    monkeypatch.setenv("FQHB_BUDGET", "100")
    assert census_budget() == 100
    with pytest.raises(CensusError, match="budget"):
        census(F2, 2, 1, mode="random", count=101)
    monkeypatch.setenv("FQHB_BUDGET", "lots")
    with pytest.raises(CensusError, match="integer"):
        census_budget()
    monkeypatch.setenv("FQHB_BUDGET", "0")
    with pytest.raises(CensusError):
        census_budget()


def test_form_count():
    assert form_count(2, 2, 1) == 63
    assert form_count(2, 2, 2) == 1023
    assert form_count(3, 2, 2) == 29524
    assert form_count(2, 3, 1) == 1023


def test_small_census_summary(F2):
    records, summary = census(F2, 2, 1, verify=True)
    assert len(records) == summary["total"] == 63
    assert summary["ok"] and not summary["violations"]
    # Chevalley-Warning: every plane conic over F_2 has a rational point
    assert summary["max_N_per_k"] == {"0": 3, "1": 5}
    assert summary["theta_per_k"] == {"0": 3, "1": 5}
    assert all(c["found"] for c in summary["coverage"])
    json.dumps(summary)


def test_csv_format(F2):
    records, _ = census(F2, 2, 1)
    lines = records.to_csv().splitlines()
    assert lines[0] == CSV_HEADER
    assert len(lines) == 64
    first = lines[1].split(",")
    assert first[:3] == ["2", "2", "1"] and first[7] in ("0", "1")
    assert FamilyLabel(first[8])


def test_census_records_match_direct_computation(F2):
    records, _ = census(F2, 2, 1)
    for rec, F in zip(records, all_forms(F2, 3, 2)):
        assert rec.coeff_id == coeff_id(F)
        assert rec.N == count_points(F)
        assert rec.k == thas_invariant(F)[0]
        assert rec.sing_count == len(singular_points(F))


def test_sharding_is_deterministic(F2, tmp_path):
    outs = []
    for shards in (1, 3):
        recs, _ = census(F2, 2, 1, shards=shards)
        path = tmp_path / f"s{shards}.csv"
        recs.write_csv(path)
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]


def test_random_mode_agrees_with_exhaustive(F2):
    exhaustive, _ = census(F2, 2, 2)
    sampled, summary = census(F2, 2, 2, mode="random", count=1000, seed=7)
    assert summary["seed"] == 7 and len(sampled) == 1000
    for rec in sampled:
        assert exhaustive.find(rec.coeff_id) == rec
    again, _ = census(F2, 2, 2, mode="random", count=1000, seed=7, shards=2)
    assert again.to_csv() == sampled.to_csv()


def test_random_coefficients_normalized(F3):
    c = random_coefficients(F3, 2, 2, 500, 1)
    lead = c[np.arange(len(c)), (c != 0).argmax(axis=1)]
    assert (lead == 1).all() and c.any(axis=1).all()
