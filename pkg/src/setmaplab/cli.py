"""Command-line experiment driver.

    setmaplab freeset --family interval --n 12
    setmaplab ladder --n-max 2 --format csv --out ladder.csv
    setmaplab acceptance

Exit status: 0 when every case passes, 1 on a failed case or an aborted
search, 2 on usage or input errors. With no --out, reports go to
$SETMAPLAB_OUTPUT_DIR/<experiment>.<format> if that variable is set, else
to stdout.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

from . import acceptance as acc
from .constructions import (
    EnumerationScheme,
    complete_pair_mapping,
    enumeration_mapping,
    interval_mapping,
    prefix_mapping,
)
from .core import MappingError, SetMapping
from .corpus import (
    case_rng,
    delta_pair_quadruple,
    delta_pair_ranked,
    random_initial_segment_mapping,
    random_interval_mapping,
    random_mapping,
)
from .forcing import (
    AmalgamationError,
    GenericBuildError,
    amalgamate_theorem1,
    amalgamate_theorem2,
    condition_from_dict,
    diagonalize_cor3,
    generic_build,
    restriction_matches,
)
from .freeset import (
    DEFAULT_NODE_BUDGET,
    DEFAULT_TIME_BUDGET,
    ResourceLimitExceeded,
    enumerate_free_sets,
    max_free_set,
    oracle_max_free_set,
)
from .ramsey import arrow_check, position_lemma_scan, t_ladder

OUTPUT_DIR_ENV = "SETMAPLAB_OUTPUT_DIR"
CSV_COLUMNS = ["experiment", "case_id", "params", "result", "value", "witness", "millis"]
EXPERIMENTS = ["freeset", "construct", "amalgamate", "force", "diagonalize", "ramsey",
               "ladder", "position-lemma", "acceptance"]
FAMILIES = ["interval", "prefix", "complete", "empty", "enumeration", "random",
            "random-interval", "random-initial"]


class UsageError(ValueError):
    pass


@dataclass
class ExperimentSpec:
    experiment: str
    n: int | None = None
    k: int | None = None
    mu: int | None = None
    m: int | None = None
    seed: int | None = None
    cap_nodes: int = DEFAULT_NODE_BUDGET
    cap_seconds: float = DEFAULT_TIME_BUDGET
    input: str | None = None
    output: str | None = None
    format: str = "json"
    family: str | None = None
    flavor: str | None = None
    count: int | None = None
    a: int | None = None
    b: int | None = None
    c: int | None = None
    r: int | None = None
    mode: str = "search"
    n_max: int = 2
    workers: int = 1

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise UsageError(f"unknown experiment {self.experiment!r}")
        if self.format not in ("json", "csv", "text"):
            raise UsageError(f"unknown format {self.format!r}")

    def echo(self) -> dict:
        skip = {"output", "format"}
        return {k: v for k, v in self.__dict__.items() if v is not None and k not in skip}


@dataclass
class Report:
    experiment: str
    params: dict
    cases: list[dict] = field(default_factory=list)
    passed: bool = True
    status: str = "ok"
    wall_clock: float = 0.0
    artifact: dict | None = None

    def add(self, case_id, params, result, value=None, witness=None, millis=0.0, ok=True):
        self.cases.append({"case_id": case_id, "params": params, "result": result, "value": value,
                           "witness": witness if witness is None or isinstance(witness, str) else list(witness),
                           "millis": round(millis, 3), "ok": ok})
        self.passed = self.passed and ok

    def body(self) -> dict:
        """The report minus timings; identical across reruns of one spec."""
        cases = [{k: v for k, v in c.items() if k != "millis"} for c in self.cases]
        return {"experiment": self.experiment, "params": self.params, "cases": cases,
                "passed": self.passed, "status": self.status, "artifact": self.artifact}

    def to_dict(self) -> dict:
        return {"experiment": self.experiment, "params": self.params, "cases": self.cases,
                "passed": self.passed, "status": self.status,
                "wall_clock": round(self.wall_clock, 3), "artifact": self.artifact}

    def render(self, fmt: str) -> str:
        if fmt == "json":
            return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"
        if fmt == "csv":
            buf = io.StringIO()
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(CSV_COLUMNS)
            for c in self.cases:
                w.writerow([self.experiment, c["case_id"], json.dumps(c["params"], sort_keys=True),
                            c["result"], "" if c["value"] is None else c["value"],
                            _flat(c["witness"]), c["millis"]])
            return buf.getvalue()
        lines = [f"{self.experiment}: {'PASS' if self.passed else 'FAIL'} ({self.status}, "
                 f"{self.wall_clock:.2f}s)"]
        for c in self.cases:
            flag = "ok " if c["ok"] else "BAD"
            wit = f" witness={c['witness']}" if c["witness"] is not None else ""
            val = f" value={c['value']}" if c["value"] is not None else ""
            lines.append(f"  [{flag}] {c['case_id']}: {c['result']}{val}{wit}")
        return "\n".join(lines) + "\n"


def _flat(witness) -> str:
    if witness is None or isinstance(witness, str):
        return witness or ""
    return " ".join(map(str, witness))


def parse_mapping(path: str | os.PathLike) -> SetMapping:
    """Read and validate a mapping document; raises MappingError with the offending tuple."""
    return SetMapping.from_json(Path(path).read_text())


def _read_json(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise MappingError(f"malformed JSON in {path}: {e}") from e


def _trim(f: SetMapping, mu: int | None) -> SetMapping:
    if mu is None:
        return f
    images = {x: frozenset(sorted(img)[: mu - 1]) for x, img in f.images.items()}
    return SetMapping(f.n, f.k, images, mu, f.interval_bounded, f.initial_segment)


def build_family(spec: ExperimentSpec, default: str, default_n: int = 10) -> SetMapping:
    fam = spec.family or default
    n = spec.n if spec.n is not None else default_n
    k = spec.k
    seed = spec.seed if spec.seed is not None else 0
    if fam == "interval":
        f = interval_mapping(n)
    elif fam == "prefix":
        f = prefix_mapping(n)
    elif fam == "complete":
        f = complete_pair_mapping(n)
    elif fam == "empty":
        f = SetMapping(n, k or 2)
    elif fam == "enumeration":
        scheme = EnumerationScheme.identity(n) if spec.seed is None else EnumerationScheme.random(n, seed)
        f = enumeration_mapping(scheme)
    elif fam in ("random", "random-interval", "random-initial"):
        if spec.seed is None:
            raise UsageError(f"--seed is required for the {fam} family")
        rng = case_rng(seed, 0)
        if fam == "random":
            f = random_mapping(rng, n, k or 2)
        elif fam == "random-interval":
            f = random_interval_mapping(rng, n, 0.8)
        else:
            f = random_initial_segment_mapping(rng, n, 0.8)
    else:
        raise UsageError(f"unknown family {fam!r}; expected one of {FAMILIES}")
    return _trim(f, spec.mu)


def _mapping(spec: ExperimentSpec, default: str, default_n: int = 10) -> SetMapping:
    if spec.input:
        return parse_mapping(spec.input)
    return build_family(spec, default, default_n)


# --- experiments -------------------------------------------------------------

def _freeset(spec, rep):
    f = _mapping(spec, "interval", 12)
    res = max_free_set(f, spec.cap_nodes, spec.cap_seconds, spec.workers)
    rep.add("max_free_set", {"n": f.n, "k": f.k}, "optimum", res.optimum, res.witness,
            res.elapsed * 1000)
    if f.n <= 14:
        orc = oracle_max_free_set(f)
        same = (orc.optimum, orc.witness) == (res.optimum, res.witness)
        rep.add("oracle", {"n": f.n, "k": f.k}, "agrees" if same else "disagrees", orc.optimum,
                orc.witness, orc.elapsed * 1000, ok=same)
    if spec.m is not None:
        t = time.monotonic()
        sets = enumerate_free_sets(f, spec.m, spec.cap_nodes, spec.cap_seconds)
        rep.add("enumerate", {"m": spec.m}, "count", len(sets), sets[0] if sets else None,
                (time.monotonic() - t) * 1000)


def _construct(spec, rep):
    f = build_family(spec, "interval", 6)
    rep.artifact = f.to_dict()
    rep.add(spec.family or "interval", {"n": f.n, "k": f.k}, "constructed", len(f.images))


def _amalgamate(spec, rep):
    if spec.input:
        doc = _read_json(spec.input)
        p, q = condition_from_dict(doc["p"]), condition_from_dict(doc["q"])
        amalg = amalgamate_theorem1 if p.flavor == "quadruple" else amalgamate_theorem2
        t = time.monotonic()
        try:
            out = amalg(p, q)
        except AmalgamationError as e:
            rep.add("amalgam", {"flavor": p.flavor}, f"failed: {e}", witness=e.witness, ok=False)
            return
        ok = bool(out.check()) and restriction_matches(out, p) and restriction_matches(out, q)
        rep.artifact = out.to_dict()
        rep.add("amalgam", {"flavor": p.flavor}, "valid" if ok else "invalid", len(out.support),
                out.support, (time.monotonic() - t) * 1000, ok=ok)
        return
    flavor = spec.flavor or "quadruple"
    if flavor not in ("quadruple", "ranked"):
        raise UsageError("amalgamate --flavor must be quadruple or ranked")
    seed = spec.seed if spec.seed is not None else acc.SEED
    count = spec.count or 100
    gen, amalg = ((delta_pair_quadruple, amalgamate_theorem1) if flavor == "quadruple"
                  else (delta_pair_ranked, amalgamate_theorem2))
    for i in range(count):
        t = time.monotonic()
        F, p, q = gen(case_rng(seed, i))
        try:
            out = amalg(p, q)
            ok = bool(out.check()) and restriction_matches(out, p) and restriction_matches(out, q)
            rep.add(i, {"n": F.n, "flavor": flavor}, "valid" if ok else "invalid", len(out.support),
                    out.support, (time.monotonic() - t) * 1000, ok=ok)
        except AmalgamationError as e:
            rep.add(i, {"n": F.n, "flavor": flavor}, f"failed: {e}", witness=e.witness, ok=False)


def _force(spec, rep):
    flavor = spec.flavor or "pair"
    default = {"quadruple": "interval", "ranked": "prefix", "pair": "complete"}.get(flavor)
    if default is None:
        raise UsageError("force --flavor must be quadruple, ranked or pair")
    F = _mapping(spec, default, 6)
    kills = {}
    if flavor == "pair" and spec.m is not None:
        diag = diagonalize_cor3(F, spec.m)
        rep.add("diagonalize", {"n": F.n, "m": spec.m}, "SAT" if diag.sat else "UNSAT", diag.nodes)
        if diag.sat:
            kills = {x: min(img) for x, img in diag.g.images.items()}
    t = time.monotonic()
    try:
        g = generic_build(flavor, F, range(F.n), kills)
    except GenericBuildError as e:
        rep.add("generic", {"flavor": flavor, "n": F.n}, f"stuck: {e}", ok=False)
        return
    ok = g.contained_in(F) and all(g.image(x) == {v} for x, v in kills.items())
    rep.artifact = g.to_dict()
    rep.add("generic", {"flavor": flavor, "n": F.n, "kills": len(kills)},
            "built" if ok else "broken", len(g.images), None, (time.monotonic() - t) * 1000, ok=ok)
    if spec.m is not None:
        free = enumerate_free_sets(g, spec.m)
        # with every killing goal met nothing of size m may survive
        ok = not (kills and free)
        rep.add("free-sets", {"m": spec.m}, "count", len(free), free[0] if free else None, ok=ok)


def _diagonalize(spec, rep):
    if spec.m is None:
        raise UsageError("diagonalize needs --m")
    F = _mapping(spec, "complete", 4)
    res = diagonalize_cor3(F, spec.m)
    if res.sat:
        left = enumerate_free_sets(res.g, spec.m)
        ok = not left and res.g.contained_in(F)
        rep.artifact = res.to_dict()
        rep.add("diagonalize", {"n": F.n, "m": spec.m}, "SAT", len(res.g.images), None,
                res.elapsed * 1000, ok=ok)
    else:
        rep.artifact = res.to_dict()
        rep.add("diagonalize", {"n": F.n, "m": spec.m}, "UNSAT", res.nodes, None, res.elapsed * 1000)


def _ramsey(spec, rep):
    if None in (spec.a, spec.b, spec.c, spec.r):
        raise UsageError("ramsey needs --a --b --c --r")
    v = arrow_check(spec.a, spec.b, spec.c, spec.r, mode=spec.mode,
                    max_nodes=spec.cap_nodes, seed=spec.seed or 0)
    result = {True: "holds", False: "fails", None: "unknown"}[v.holds]
    rep.artifact = v.to_dict()
    wit = v.counterexample.bits if v.counterexample else None
    rep.add(f"{spec.a}->({spec.b},{spec.c})^{spec.r}", {"mode": spec.mode}, result, v.nodes, wit,
            v.elapsed * 1000)


def _ladder(spec, rep):
    for e in t_ladder(spec.n_max):
        rep.add(f"t_{e.index}", {"exact": e.exact}, "exact" if e.exact else "lower-bound",
                e.value)
    rep.artifact = {"values": [c["value"] for c in rep.cases]}


def _position(spec, rep):
    top = spec.n if spec.n is not None else 8
    for size in range(5, top + 1):
        s = position_lemma_scan(size)
        expect = size >= 7
        rep.add(f"size-{size}", {"size": size}, "holds" if s.holds else "fails", None, s.failing,
                ok=s.holds == expect)


def _acceptance(spec, rep):
    for res in acc.run_all():
        rep.add(res.number, {"name": res.name}, "PASS" if res.passed else "FAIL", res.detail, None,
                res.seconds * 1000, ok=res.passed)


DISPATCH = {
    "freeset": _freeset,
    "construct": _construct,
    "amalgamate": _amalgamate,
    "force": _force,
    "diagonalize": _diagonalize,
    "ramsey": _ramsey,
    "ladder": _ladder,
    "position-lemma": _position,
    "acceptance": _acceptance,
}


def run(spec: ExperimentSpec) -> Report:
    rep = Report(spec.experiment, spec.echo())
    start = time.monotonic()
    try:
        DISPATCH[spec.experiment](spec, rep)
    except ResourceLimitExceeded as e:
        rep.status = "resource-limit"
        rep.passed = False
        rep.add("aborted", {"nodes": e.nodes}, str(e), ok=False)
    rep.wall_clock = time.monotonic() - start
    return rep


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="setmaplab", description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("experiment", choices=EXPERIMENTS)
    ap.add_argument("--n", type=int)
    ap.add_argument("--k", type=int)
    ap.add_argument("--mu", type=int)
    ap.add_argument("--m", type=int)
    ap.add_argument("--seed", type=int)
    ap.add_argument("--cap-nodes", type=int, default=DEFAULT_NODE_BUDGET)
    ap.add_argument("--cap-seconds", type=float, default=DEFAULT_TIME_BUDGET)
    ap.add_argument("--in", dest="input")
    ap.add_argument("--out", dest="output")
    ap.add_argument("--format", choices=["json", "csv", "text"], default="json")
    ap.add_argument("--family", choices=FAMILIES)
    ap.add_argument("--flavor", choices=["quadruple", "ranked", "pair"])
    ap.add_argument("--count", type=int)
    ap.add_argument("--a", type=int)
    ap.add_argument("--b", type=int)
    ap.add_argument("--c", type=int)
    ap.add_argument("--r", type=int)
    ap.add_argument("--mode", choices=["search", "sweep", "refute"], default="search")
    ap.add_argument("--n-max", type=int, default=2)
    ap.add_argument("--workers", type=int, default=1)
    return ap


def _destination(spec: ExperimentSpec) -> Path | None:
    if spec.output:
        return Path(spec.output)
    outdir = os.environ.get(OUTPUT_DIR_ENV)
    if outdir:
        return Path(outdir) / f"{spec.experiment}.{spec.format}"
    return None


def main(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    try:
        spec = ExperimentSpec(**vars(args))
        rep = run(spec)
    except (UsageError, MappingError, ValueError, KeyError, OSError) as e:
        print(f"setmaplab: error: {e}", file=sys.stderr)
        return 2
    text = rep.render(spec.format)
    dest = _destination(spec)
    if dest is None:
        sys.stdout.write(text)
    else:
        dest.parent.mkdir(parents=True, exist_ok=True)
        dest.write_text(text)
    return 0 if rep.passed else 1


if __name__ == "__main__":
    sys.exit(main())
