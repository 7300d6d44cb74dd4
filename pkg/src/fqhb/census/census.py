"""Exhaustive and randomized surveys of all forms of one shape."""
from __future__ import annotations

import io
import os
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field as dc_field

import numpy as np

from .. import __version__, bounds
from ..families import FamilyLabel, classify_maximizer
from ..forms import coeff_id, monomials
from ..gf import GF
from ..locus import InvariantReport, cone_apexes, flat_contained
from .engine import coeff_ids, coeffs_to_index, get_engine, index_to_coeffs, normalize_rows

DEFAULT_BUDGET = 10 ** 7
CSV_HEADER = "q,d,n,coeff_id,N,k,sing_count,is_max,label"


class CensusError(RuntimeError):
    """The requested census is out of budget or malformed."""


def census_budget() -> int:
    raw = os.environ.get("FQHB_BUDGET")
    if raw is None:
        return DEFAULT_BUDGET
    try:
        value = int(raw)
    except ValueError as exc:
        raise CensusError(f"FQHB_BUDGET must be an integer, got {raw!r}") from exc
    if value < 1:
        raise CensusError("FQHB_BUDGET must be positive")
    return value


def form_count(q: int, d: int, n: int) -> int:
    """Number of scalar classes of nonzero forms of degree d in n+2 variables."""
    M = len(monomials(n + 2, d))
    return (q ** M - 1) // (q - 1)


@dataclass(frozen=True)
class CensusRecord:
    q: int
    d: int
    n: int
    coeff_id: str
    N: int
    k: int
    sing_count: int
    is_max: bool
    label: FamilyLabel

    def csv_row(self) -> str:
        return (
            f"{self.q},{self.d},{self.n},{self.coeff_id},{self.N},{self.k},"
            f"{self.sing_count},{int(self.is_max)},{self.label.value}"
        )


class RecordTable:
    """Column store of census records; indexing yields :class:`CensusRecord`."""

    def __init__(self, q, d, n, ids, N, k, sing, is_max, labels):
        self.q, self.d, self.n = q, d, n
        self.ids = ids
        self.N = N
        self.k = k
        self.sing = sing
        self.is_max = is_max
        self.labels = labels
        self._pos = None

    def __len__(self):
        return len(self.ids)

    def __getitem__(self, i) -> CensusRecord:
        return CensusRecord(
            self.q, self.d, self.n, self.ids[i], int(self.N[i]), int(self.k[i]),
            int(self.sing[i]), bool(self.is_max[i]), self.labels[i],
        )

    def __iter__(self):
        for i in range(len(self)):
            yield self[i]

    def find(self, ident: str) -> CensusRecord | None:
        if self._pos is None:
            self._pos = {s: i for i, s in enumerate(self.ids)}
        i = self._pos.get(ident)
        return None if i is None else self[i]

    def maximizers(self) -> list[CensusRecord]:
        return [self[i] for i in np.flatnonzero(self.is_max)]

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(CSV_HEADER + "\n")
        prefix = f"{self.q},{self.d},{self.n},"
        for s, N, k, sc, m, lab in zip(self.ids, self.N.tolist(), self.k.tolist(), self.sing.tolist(),
                                       self.is_max.tolist(), self.labels):
            buf.write(f"{prefix}{s},{N},{k},{sc},{int(m)},{lab.value}\n")
        return buf.getvalue()

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            fh.write(self.to_csv())


@dataclass
class ShardOutput:
    ids: list
    N: np.ndarray
    k: np.ndarray
    sing: np.ndarray
    is_max: np.ndarray
    labels: list
    violations: list = dc_field(default_factory=list)
    lemma_failures: list = dc_field(default_factory=list)
    witness_failures: list = dc_field(default_factory=list)


def _check_violations(engine, res, theta, ids) -> list:
    out = []
    over = (res.k >= 0) & (res.N > theta)
    empty = (res.k < 0) & (res.N > 0)
    n, d, q = engine.n, engine.degree, engine.field.q
    sk0 = bounds.singular_k0_bound(d, n, q)
    sing_k0 = (res.k == 0) & (res.sing_count > 0) & (res.N > sk0)
    for i in np.flatnonzero(over | empty | sing_k0):
        kind = "theta" if over[i] else ("empty" if empty[i] else "singular_k0")
        out.append({"coeff_id": ids[i], "kind": kind, "N": int(res.N[i]), "k": int(res.k[i]),
                    "bound": int(theta[i]) if over[i] else sk0})
    return out


def _process(field: GF, d: int, n: int, coeffs: np.ndarray, lemmas: bool) -> ShardOutput:
    engine = get_engine(field, n + 2, d)
    parts = []
    for start in range(0, len(coeffs), engine.chunk):
        parts.append(_process_chunk(engine, coeffs[start:start + engine.chunk], lemmas))
    if not parts:
        e = np.zeros(0, dtype=np.int64)
        return ShardOutput([], e, e, e, e.astype(bool), [])
    return ShardOutput(
        [s for p in parts for s in p.ids],
        np.concatenate([p.N for p in parts]),
        np.concatenate([p.k for p in parts]),
        np.concatenate([p.sing for p in parts]),
        np.concatenate([p.is_max for p in parts]),
        [lab for p in parts for lab in p.labels],
        [v for p in parts for v in p.violations],
        [v for p in parts for v in p.lemma_failures],
        [v for p in parts for v in p.witness_failures],
    )


def _process_chunk(engine, coeffs: np.ndarray, lemmas: bool) -> ShardOutput:
    res = engine.evaluate(coeffs)
    ids = coeff_ids(coeffs)
    theta = engine.theta(res.k)
    is_max = (res.k >= 0) & (res.N == theta)
    violations = _check_violations(engine, res, theta, ids)
    labels = [FamilyLabel.NON_MAXIMIZER] * len(coeffs)
    witness_failures = []
    points = engine.index.points
    for i in np.flatnonzero(is_max):
        F = engine.form(coeffs[i])
        witness = engine.witness(res, i)
        if not flat_contained(F, witness):
            witness_failures.append(ids[i])
        sing = [points[j] for j in np.flatnonzero(res.sing[i])]
        report = InvariantReport(
            int(res.N[i]), int(res.k[i]), witness, sing, cone_apexes(F, sing), int(theta[i]), True, form=F
        )
        labels[i] = classify_maximizer(F, report)
    lemma_failures = []
    rows = np.flatnonzero(is_max & (res.k > 0))
    if lemmas and len(rows):
        sub = engine.evaluate(coeffs[rows], want_grad=True)
        for key, first in engine.lemma_batch(sub).items():
            for j in np.flatnonzero(first >= 0):
                lemma_failures.append({"coeff_id": ids[rows[j]], "property": key, "point": list(points[first[j]])})
    return ShardOutput(ids, res.N, res.k, res.sing_count, is_max, labels, violations, lemma_failures,
                       witness_failures)


def _shard_worker(args):
    field, d, n, kind, payload, lemmas = args
    if kind == "range":
        lo, hi = payload
        coeffs = index_to_coeffs(np.arange(lo, hi, dtype=np.int64), field.q, len(monomials(n + 2, d)))
    else:
        coeffs = payload
    return _process(field, d, n, coeffs, lemmas)


def random_coefficients(field: GF, d: int, n: int, count: int, seed: int) -> np.ndarray:
    """``count`` uniformly random nonzero forms, normalized, in draw order."""
    M = len(monomials(n + 2, d))
    rng = np.random.default_rng(seed)
    coeffs = rng.integers(0, field.q, size=(count, M), dtype=np.int64)
    zero = ~coeffs.any(axis=1)
    while zero.any():
        coeffs[zero] = rng.integers(0, field.q, size=(int(zero.sum()), M), dtype=np.int64)
        zero = ~coeffs.any(axis=1)
    return normalize_rows(field, coeffs)


def census(
    field: GF,
    d: int,
    n: int,
    mode: str = "exhaustive",
    count: int | None = None,
    seed: int = 0,
    shards: int = 1,
    verify: bool = False,
    lemmas: bool | None = None,
    budget: int | None = None,
):
    """Survey degree-d hypersurfaces of P^{n+1}(F_q).

    Returns ``(records, summary)``.  Exhaustive mode visits one form per
    scalar class in coefficient order; random mode draws ``count`` forms
    with the given seed.  Output is independent of ``shards``.
    """
    if d < 2 or n < 1:
        raise CensusError("census needs d >= 2 and n >= 1")
    if shards < 1:
        raise CensusError("shards must be >= 1")
    budget = census_budget() if budget is None else budget
    lemmas = verify if lemmas is None else lemmas
    q = field.q
    t0 = time.perf_counter()
    if mode == "exhaustive":
        total = form_count(q, d, n)
        if total > budget:
            raise CensusError(f"{total} forms exceed the census budget of {budget}")
        bounds_ = np.linspace(0, total, shards + 1).astype(np.int64)
        jobs = [(field, d, n, "range", (int(a), int(b)), lemmas) for a, b in zip(bounds_[:-1], bounds_[1:])]
    elif mode == "random":
        if count is None or count < 1:
            raise CensusError("random mode needs a positive count")
        if count > budget:
            raise CensusError(f"{count} samples exceed the census budget of {budget}")
        coeffs = random_coefficients(field, d, n, count, seed)
        jobs = [(field, d, n, "coeffs", part, lemmas) for part in np.array_split(coeffs, shards)]
    else:
        raise CensusError(f"unknown mode {mode!r}")

    if shards == 1:
        outputs = [_shard_worker(jobs[0])]
    else:
        with ProcessPoolExecutor(max_workers=shards) as pool:
            outputs = list(pool.map(_shard_worker, jobs))

    records = RecordTable(
        q, d, n,
        [s for o in outputs for s in o.ids],
        np.concatenate([o.N for o in outputs]),
        np.concatenate([o.k for o in outputs]),
        np.concatenate([o.sing for o in outputs]),
        np.concatenate([o.is_max for o in outputs]),
        [lab for o in outputs for lab in o.labels],
    )
    violations = [v for o in outputs for v in o.violations]
    lemma_failures = [v for o in outputs for v in o.lemma_failures]
    witness_failures = [v for o in outputs for v in o.witness_failures]
    summary = _summarize(field, d, n, mode, count, seed, shards, records, violations, lemma_failures,
                         witness_failures, verify)
    summary["wall_time"] = round(time.perf_counter() - t0, 3)
    return records, summary


def _summarize(field, d, n, mode, count, seed, shards, records, violations, lemma_failures, witness_failures,
               verify) -> dict:
    q = field.q
    max_by_k = {}
    for k in np.unique(records.k):
        max_by_k[str(int(k))] = int(records.N[records.k == k].max())
    labels = Counter(records.labels[i].value for i in np.flatnonzero(records.is_max))
    max_ks = Counter(int(k) for k in records.k[records.is_max])
    unrecognized = [records.ids[i] for i in np.flatnonzero(records.is_max)
                    if records.labels[i] is FamilyLabel.UNRECOGNIZED_MAXIMIZER]
    summary = {
        "version": __version__,
        "field": field.describe(),
        "q": q, "d": d, "n": n,
        "mode": mode,
        "seed": seed if mode == "random" else None,
        "count": count if mode == "random" else None,
        "total": len(records),
        "max_N_per_k": max_by_k,
        "theta_per_k": {str(k): bounds.theta(n, k, d, q) for k in range(n + 1)},
        "maximizers_per_k": {str(k): v for k, v in sorted(max_ks.items())},
        "maximizers_per_label": dict(sorted(labels.items())),
        "violations": violations,
        "witness_failures": witness_failures,
        "shards": shards,
    }
    failures = bool(violations or witness_failures)
    if verify:
        summary["unrecognized"] = unrecognized
        summary["lemma_failures"] = lemma_failures
        summary["coverage"] = _coverage(field, d, n, records, mode)
        failures |= bool(unrecognized or lemma_failures)
        failures |= not all(c["found"] for c in summary["coverage"])
    summary["ok"] = not failures
    return summary


def _coverage(field, d, n, records, mode) -> list:
    """For each theorem family in this shape, confirm a maximizer with its k was seen."""
    from ..families import applicable_constructions

    ks = set(int(k) for k in records.k[records.is_max])
    out = []
    for c in applicable_constructions(field, d, n):
        if c.expected_k is None:
            continue
        entry = {"family": c.family, "form": str(c.form), "k": c.expected_k, "found": c.expected_k in ks}
        if mode == "exhaustive":
            rec = records.find(coeff_id(c.form.normalized()))
            entry["record_is_max"] = bool(rec and rec.is_max)
            entry["found"] = entry["found"] and entry["record_is_max"]
        out.append(entry)
    return out


def record_index(field: GF, ident: str) -> int:
    """Position of a coefficient string in the exhaustive enumeration."""
    from ..forms import DIGITS

    return int(coeffs_to_index(np.array([[DIGITS.index(ch) for ch in ident]]), field.q)[0])
