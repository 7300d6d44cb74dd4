"""Clause-by-clause verification of the bounds and equality cases over a grid."""
from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field

from .. import bounds
from ..families import THEOREM_LABELS, FamilyLabel, applicable_constructions
from ..forms import coeff_id, count_points, from_coeff_id
from ..gf import get_field, prime_power
from ..locus import quadric_nonsingular, thas_invariant
from ..projgeom import proj_count
from .census import census

DEFAULT_GRID = ((2, 2, 1), (2, 2, 2), (2, 3, 1), (2, 3, 2), (3, 2, 1), (3, 2, 2))


@dataclass
class Clause:
    name: str
    params: tuple
    passed: bool
    detail: str = ""
    counterexample: str | None = None

    def to_dict(self) -> dict:
        return {"clause": self.name, "q": self.params[0], "d": self.params[1], "n": self.params[2],
                "passed": self.passed, "detail": self.detail, "counterexample": self.counterexample}


@dataclass
class VerifyReport:
    clauses: list = dc_field(default_factory=list)
    summaries: list = dc_field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.clauses)

    def to_dict(self) -> dict:
        return {"passed": self.passed, "clauses": [c.to_dict() for c in self.clauses]}


def load_grid(spec: str):
    """``"default"`` or a path to JSON ``[[q, d, n], ...]``."""
    if spec == "default":
        return DEFAULT_GRID
    with open(spec) as fh:
        data = json.load(fh)
    grid = []
    for item in data:
        if len(item) != 3:
            raise ValueError(f"grid entries are [q, d, n], got {item!r}")
        grid.append(tuple(int(x) for x in item))
    return tuple(grid)


def _field_for(q: int):
    p, r = prime_power(q)
    return get_field(p, r)


def verify_theorems(grid=DEFAULT_GRID, shards: int = 1) -> VerifyReport:
    report = VerifyReport()
    for q, d, n in grid:
        field = _field_for(q)
        params = (q, d, n)
        records, summary = census(field, d, n, verify=True, shards=shards)
        report.summaries.append(summary)
        add = report.clauses.append

        v = summary["violations"]
        add(Clause("bounds", params, not v, f"{len(records)} forms checked",
                   v[0]["coeff_id"] if v else None))
        w = summary["witness_failures"]
        add(Clause("witness", params, not w, "witness flats contained in every maximizer", w[0] if w else None))

        maxrecs = records.maximizers()
        bad = [r for r in maxrecs if r.label not in THEOREM_LABELS]
        add(Clause("only_if", params, not bad, f"{len(maxrecs)} maximizers classified",
                   bad[0].coeff_id if bad else None))

        lf = summary["lemma_failures"]
        add(Clause("lemma", params, not lf, "properties (1), (2), (4) on maximizers with k > 0",
                   f"{lf[0]['coeff_id']} ({lf[0]['property']})" if lf else None))

        # "if" direction: every applicable family attains the bound it claims
        for c in applicable_constructions(field, d, n):
            if c.expected_k is None:
                continue
            N = count_points(c.form)
            k, _ = thas_invariant(c.form)
            theta = bounds.theta(n, k, d, q)
            rec = records.find(coeff_id(c.form.normalized()))
            ok = N == theta == c.expected_N and k == c.expected_k and rec is not None and rec.is_max
            add(Clause(f"if:{c.family}", params, ok, f"N={N} theta={theta} k={k}", None if ok else str(c.form)))

        # k = 0 maximizers are nonsingular quadrics with n <= 2
        k0 = [r for r in maxrecs if r.k == 0]
        bad = [r for r in k0 if d != 2 or n > 2]
        if d == 2:
            bad += [r for r in k0 if not quadric_nonsingular(from_coeff_id(field, n + 2, d, r.coeff_id))]
        want = FamilyLabel.CONIC_T2 if n == 1 else FamilyLabel.ELLIPTIC_T2
        bad += [r for r in k0 if r.label is not want]
        add(Clause("k0", params, not bad, f"{len(k0)} maximizers with k = 0", bad[0].coeff_id if bad else None))

        # remark: theta against the size of the ambient space
        full = proj_count(n + 1, q)
        ok = True
        detail = []
        for k in range(0, n + 1):
            t = bounds.theta(n, k, d, q)
            if (t <= full) != (d <= q + 1):
                ok = False
            if k > 0 and (t == full) != (d == q + 1):
                ok = False
            detail.append(f"k={k}:{t}")
        add(Clause("remark", params, ok, f"N(P^{n+1})={full} " + " ".join(detail)))
    return report
