"""The ten exit criteria, each a function returning a CriterionResult."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable

from .constructions import (
    DeltaSystemPair,
    complete_pair_mapping,
    descent_chain,
    enumeration_mapping,
    interval_mapping,
    prefix_mapping,
    verify_delta_preconditions,
)
from .core import SetMapping, is_free, middle_element_free
from .corpus import (
    case_rng,
    delta_pair_quadruple,
    delta_pair_ranked,
    random_interval_mapping,
    random_mapping,
    random_scheme,
)
from .forcing import (
    amalgamate_theorem1,
    amalgamate_theorem2,
    check_condition4,
    closed_free_sets,
    diagonalize_cor3,
    new_secured_sets,
    position_lemma_core,
    restriction_matches,
)
from .freeset import enumerate_free_sets, max_free_set, oracle_max_free_set
from .ramsey import arrow_check, is_counterexample, position_lemma_scan

SEED = 1999


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    seconds: float
    limit: float | None
    detail: str = ""
    failures: list = field(default_factory=list)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        limit = f" (limit {self.limit:g}s)" if self.limit else ""
        return f"[{status}] {self.number:2d}. {self.name}: {self.detail} [{self.seconds:.2f}s{limit}]"

    def to_dict(self) -> dict:
        return {"number": self.number, "name": self.name, "passed": self.passed,
                "seconds": round(self.seconds, 3), "limit": self.limit, "detail": self.detail,
                "failures": [str(f) for f in self.failures[:20]]}


def _result(number, name, limit, start, failures, detail) -> CriterionResult:
    took = time.monotonic() - start
    ok = not failures and (limit is None or took < limit)
    if failures:
        detail = f"{detail}; first failure: {failures[0]}"
    elif limit is not None and took >= limit:
        detail = f"{detail}; over time limit"
    return CriterionResult(number, name, ok, took, limit, detail, failures)


def ladder_exactness() -> CriterionResult:
    start = time.monotonic()
    failures = []
    hold = arrow_check(7, 5, 7, 5)
    if hold.holds is not True:
        failures.append("7 -> (5,7)^5 not confirmed by search")
    t0 = time.monotonic()
    sweep = arrow_check(7, 5, 7, 5, mode="sweep")
    sweep_s = time.monotonic() - t0
    if sweep.holds is not True or sweep.nodes != 2**21:
        failures.append("2^21 sweep did not confirm 7 -> (5,7)^5")
    if sweep_s >= 60:
        failures.append(f"sweep took {sweep_s:.1f}s")
    fail = arrow_check(6, 5, 7, 5)
    if fail.holds is not False or not is_counterexample(fail.counterexample, 5, 7):
        failures.append("6 -> (5,7)^5 not refuted")
    return _result(1, "t-ladder exactness (t_1 = 7)", 60, start, failures,
                   f"7->(5,7)^5 holds (search {hold.nodes} nodes, sweep {sweep.nodes} colorings "
                   f"in {sweep_s:.2f}s); 6->(5,7)^5 fails via {fail.counterexample.to_dict()['bits'] if fail.counterexample else None}")


def base_case_sharpness() -> CriterionResult:
    start = time.monotonic()
    failures = []
    slowest = 0.0
    for n in range(5, 21):
        f = interval_mapping(n)
        t = time.monotonic()
        rep = max_free_set(f)
        took = time.monotonic() - t
        slowest = max(slowest, took)
        if rep.optimum != 4:
            failures.append(f"n={n}: optimum {rep.optimum}")
        if took >= 10:
            failures.append(f"n={n}: {took:.1f}s")
        if n <= 14:
            orc = oracle_max_free_set(f)
            if (orc.optimum, orc.witness) != (rep.optimum, rep.witness):
                failures.append(f"n={n}: oracle {orc.optimum}/{orc.witness} vs {rep.optimum}/{rep.witness}")
    return _result(2, "base-case sharpness (max free set of interval mapping = 4)", None, start,
                   failures, f"n=5..20 all optimum 4, oracle-confirmed n<=14, slowest {slowest:.3f}s")


def position_lemma() -> CriterionResult:
    start = time.monotonic()
    failures = []
    s7, s6 = position_lemma_scan(7), position_lemma_scan(6)
    if not s7.holds:
        failures.append(f"size 7 fails at {s7.failing}")
    if s6.holds or s6.failing != (2, 3):
        failures.append(f"size 6: holds={s6.holds} failing={s6.failing}")
    return _result(3, "position lemma and minimality of 7", 1, start, failures,
                   f"size 7 holds, size 6 fails at marks {s6.failing}")


def amalgamation_quadruple(count: int = 1000) -> CriterionResult:
    start = time.monotonic()
    failures = []
    rescued = 0
    for i in range(count):
        F, p, q = delta_pair_quadruple(case_rng(SEED, i))
        try:
            out = amalgamate_theorem1(p, q)
        except Exception as e:  # noqa: BLE001 - a failure is a finding
            failures.append(f"case {i}: {e}")
            continue
        if not out.check():
            failures.append(f"case {i}: invalid amalgam")
        if not (restriction_matches(out, p) and restriction_matches(out, q)):
            failures.append(f"case {i}: restriction mismatch")
        # every 7-set the plain union would leave closed and free is killed
        # at the five-tuple the position lemma picks
        naive = SetMapping(F.n, 4, {**p.g.images, **q.g.images})
        b, c = set(p.support) - set(q.support), set(q.support) - set(p.support)
        if not check_condition4(F, out.support, naive):
            rescued += 1
        for B in closed_free_sets(F, out.support, naive, 7, first_only=False):
            m0 = min(set(B) & b)
            m1 = min(set(B) & c)
            y = position_lemma_core(B, m0, m1)
            if y[2] not in out.g.image((y[0], y[1], y[3], y[4])):
                failures.append(f"case {i}: 7-set {B} not killed at {y}")
    return _result(4, "amalgamation soundness, quadruple conditions", 300, start, failures,
                   f"{count} pairs, all amalgams valid and extension-correct; "
                   f"{rescued} needed the mixed images")


def amalgamation_ranked(count: int = 1000) -> CriterionResult:
    start = time.monotonic()
    failures = []
    new_total = 0
    for i in range(count):
        F, p, q = delta_pair_ranked(case_rng(SEED, i))
        pair = DeltaSystemPair.from_conditions(p, q)
        if not verify_delta_preconditions(pair, F):
            failures.append(f"case {i}: generator broke the preconditions")
            continue
        try:
            out = amalgamate_theorem2(p, q)
        except Exception as e:  # noqa: BLE001
            failures.append(f"case {i}: {e}")
            continue
        if not out.check():
            failures.append(f"case {i}: invalid amalgam")
        if not (restriction_matches(out, p) and restriction_matches(out, q)):
            failures.append(f"case {i}: restriction mismatch")
        b, c = set(pair.branch), set(pair.other_branch)
        for u in new_secured_sets(out, p, q):
            new_total += 1
            if not (set(u) & b == {u[0]} or set(u) & c == {u[0]}):
                failures.append(f"case {i}: new secured set {u} meets both branches past its minimum")
            if any(u[:j] in p.r or u[:j] in q.r for j in range(3, len(u))):
                failures.append(f"case {i}: new secured set {u} end-extends an old one")
    return _result(5, "amalgamation with rank extension, ranked conditions", 300, start, failures,
                   f"{count} pairs, all amalgams valid; {new_total} new secured sets, "
                   f"each meets one branch only at its minimum and end-extends no old one")


def descent_property(count: int = 100, n: int = 12) -> CriterionResult:
    start = time.monotonic()
    failures = []
    checked = 0
    for i in range(count):
        scheme = random_scheme(case_rng(SEED, i), n)
        f = enumeration_mapping(scheme)
        for m in range(2, n + 1):
            sets = enumerate_free_sets(f, m)
            if not sets:
                break
            for H in sets:
                checked += 1
                d = descent_chain(scheme, H)
                if any(x <= y for x, y in zip(d, d[1:])):
                    failures.append(f"scheme {i}: {H} gives {d}")
    return _result(6, "descent property of the enumeration mapping", None, start, failures,
                   f"{count} schemes on n={n}, {checked} free sets, zero violations")


def diagonalization() -> CriterionResult:
    start = time.monotonic()
    failures = []
    F = complete_pair_mapping(4)
    t = time.monotonic()
    sat = diagonalize_cor3(F, 3)
    if time.monotonic() - t >= 1:
        failures.append("SAT case over 1s")
    if not sat.sat:
        failures.append("complete F, n=4, m=3 reported UNSAT")
    else:
        g = sat.g
        if not g.contained_in(F) or any(len(v) > 1 for v in g.images.values()):
            failures.append("SAT assignment not a singleton mapping inside F")
        if enumerate_free_sets(g, 3):
            failures.append("SAT assignment leaves a free triple")
    t = time.monotonic()
    unsat = diagonalize_cor3(prefix_mapping(4), 3)
    if time.monotonic() - t >= 1:
        failures.append("UNSAT case over 1s")
    if unsat.sat:
        failures.append("prefix mapping n=4, m=3 reported SAT")
    shown = {",".join(map(str, x)): sorted(v)[0] for x, v in sorted(sat.g.images.items())} if sat.g else None
    return _result(7, "diagonalization core", None, start, failures,
                   f"complete n=4 SAT with g={shown}; prefix n=4 UNSAT after {unsat.nodes} nodes")


def oracle_equivalence(count: int = 200) -> CriterionResult:
    start = time.monotonic()
    failures = []
    for i in range(count):
        rng = case_rng(SEED, i)
        k = (1, 2, 4)[i % 3]
        n = rng.randint(max(1, k), 14)
        f = random_mapping(rng, n, k)
        a, b = max_free_set(f), oracle_max_free_set(f)
        if (a.optimum, a.witness) != (b.optimum, b.witness):
            failures.append(f"case {i} (n={n}, k={k}): search {a.optimum}/{a.witness} oracle {b.optimum}/{b.witness}")
    return _result(8, "branch-and-bound vs oracle", None, start, failures,
                   f"{count} random mappings, n<=14, k in {{1,2,4}}, zero discrepancies")


def reduction_equivalence(count: int = 50, n: int = 10) -> CriterionResult:
    start = time.monotonic()
    failures = []
    checked = 0
    for i in range(count):
        rng = case_rng(SEED, i)
        f = random_interval_mapping(rng, n, rng.uniform(0.2, 1.0))
        for size in range(0, 8):
            for H in combinations(range(n), size):
                checked += 1
                if is_free(f, H) != middle_element_free(f, H):
                    failures.append(f"mapping {i}: {H}")
    return _result(9, "freeness reduces to the middle-element test", None, start, failures,
                   f"{count} mappings, {checked} subsets, zero discrepancies")


def ramsey_anchors() -> CriterionResult:
    start = time.monotonic()
    failures = []
    if arrow_check(6, 3, 3, 2).holds is not True:
        failures.append("6 -> (3,3)^2 not confirmed")
    v = arrow_check(5, 3, 3, 2)
    if v.holds is not False or not is_counterexample(v.counterexample, 3, 3):
        failures.append("5 -> (3,3)^2 not refuted by a verified counterexample")
    bits = v.counterexample.to_dict()["bits"] if v.counterexample else None
    return _result(10, "Ramsey sanity anchors", 5, start, failures,
                   f"6->(3,3)^2 holds; 5->(3,3)^2 fails via {bits}")


CRITERIA: list[Callable[[], CriterionResult]] = [
    ladder_exactness,
    base_case_sharpness,
    position_lemma,
    amalgamation_quadruple,
    amalgamation_ranked,
    descent_property,
    diagonalization,
    oracle_equivalence,
    reduction_equivalence,
    ramsey_anchors,
]


def run_all(echo: Callable[[str], None] | None = None) -> list[CriterionResult]:
    out = []
    for crit in CRITERIA:
        res = crit()
        if echo:
            echo(res.line())
        out.append(res)
    return out
