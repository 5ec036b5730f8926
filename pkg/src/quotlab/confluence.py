"""Bounded certification of subdistributivity through a confluent rewrite relation.

Three properties are checked on every term within the bounds: strong
confluence of the one-step relation, containment of the equivalence in the
rewrite closure, and that rewrites of a projected value factor through a
pair-valued value with no new atoms. Certificates never claim more than the
bounds they were computed at.
"""
from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from typing import Callable, Iterable

from .atoms import STAR, ResourceLimit, fst, pair_atoms, snd
from .functors import FunctorSpec
from .laws import CheckConfig, check_map_respect
from .quotient import EquivSpec

DEFAULT_REACH_LIMIT = 20_000


@dataclass
class RewriteSystem:
    name: str
    step: Callable[..., Iterable]
    size: Callable | None = None
    mode: str = "strong"   # or "bounded": plain joinability for every peak

    def succ(self, x) -> frozenset:
        return frozenset(self.step(x))


@dataclass
class ConfluenceCertificate:
    system: str
    equivalence: str
    bounds: dict
    strong_confluence: str = "pass"
    closure_contains: str = "pass"
    factors_projections: str = "pass"
    rewrites_in_equiv: str = "pass"
    certified: bool = False
    withheld_at: str | None = None
    counterexample: dict | None = None
    traces: list = field(default_factory=list)
    cases: dict = field(default_factory=dict)
    millis: int = 0
    notes: list = field(default_factory=list)

    def to_json(self, timings: bool = False) -> dict:
        d = {"system": self.system, "equivalence": self.equivalence, "bounded": True, "bounds": self.bounds,
             "strong_confluence": self.strong_confluence, "closure_contains": self.closure_contains,
             "factors_projections": self.factors_projections, "rewrites_in_equiv": self.rewrites_in_equiv,
             "certified": self.certified, "cases": self.cases}
        if self.withheld_at:
            d["withheld_at"] = self.withheld_at
        if self.counterexample is not None:
            d["counterexample"] = self.counterexample
        d["traces"] = self.traces
        d["millis"] = self.millis if timings else None
        if self.notes:
            d["notes"] = self.notes
        return d


# -- reachability ----------------------------------------------------------------

def rw_levels(S: RewriteSystem, x, depth: int, cap: int | None = None, limit: int = DEFAULT_REACH_LIMIT):
    """Yield the cumulative reachable sets after 0, 1, ..., depth steps."""
    size = S.size or (lambda v: 0)
    seen = {x}
    frontier = [x]
    yield seen
    for _ in range(depth):
        nxt = []
        for v in frontier:
            for w in S.succ(v):
                if w in seen or (cap is not None and size(w) > cap):
                    continue
                seen.add(w)
                nxt.append(w)
                if len(seen) > limit:
                    raise ResourceLimit(f"{S.name} reachable set", limit, len(seen))
        frontier = nxt
        yield seen
        if not frontier:
            return


def rw_reachable(S: RewriteSystem, x, depth: int, limit: int = DEFAULT_REACH_LIMIT) -> frozenset:
    if depth < 0:
        raise ValueError("depth must be >= 0")
    out = frozenset()
    for out in rw_levels(S, x, depth, limit=limit):
        pass
    return frozenset(out)


def _first_common(a: Iterable, b: set, order=None):
    common = [v for v in a if v in b]
    if not common:
        return None
    return min(common, key=order or repr)


def rw_joinable(S: RewriteSystem, y, z, depth: int, cap: int | None = None,
                limit: int = DEFAULT_REACH_LIMIT):
    """A common reduct of y and z within ``depth`` steps each, or None."""
    if y == z:
        return y
    ly, lz = rw_levels(S, y, depth, cap, limit), rw_levels(S, z, depth, cap, limit)
    ry = rz = None
    for ry_, rz_ in itertools.zip_longest(ly, lz):
        ry = ry_ if ry_ is not None else ry
        rz = rz_ if rz_ is not None else rz
        u = _first_common(ry, rz)
        if u is not None:
            return u
    return None


def _join_strong(S: RewriteSystem, y, z, depth: int, cap, limit):
    """A join where one side takes at most one step."""
    y1, z1 = {y} | S.succ(y), {z} | S.succ(z)
    ly, lz = rw_levels(S, y, depth, cap, limit), rw_levels(S, z, depth, cap, limit)
    ry = rz = set()
    for ry_, rz_ in itertools.zip_longest(ly, lz):
        ry = ry_ if ry_ is not None else ry
        rz = rz_ if rz_ is not None else rz
        u = _first_common(y1, rz)
        if u is not None:
            return u
        u = _first_common(z1, ry)
        if u is not None:
            return u
    return None


# -- certificate fragments -------------------------------------------------------

def rw_strong_confluence(S: RewriteSystem, F: FunctorSpec, cfg: CheckConfig | None = None,
                         bound: int | None = None, slack: int = 2, keep_traces: int = 5,
                         values: list | None = None) -> dict:
    cfg = cfg or CheckConfig()
    bound = cfg.bound if bound is None else bound
    us = cfg.universes(F.arity)
    size = S.size or F.size
    out = {"status": "pass", "cases": 0, "traces": [], "counterexample": None}
    for x in (F.enumerate(us, bound) if values is None else values):
        succ = sorted(S.succ(x), key=repr)
        for y, z in itertools.combinations(succ, 2):
            out["cases"] += 1
            cap = size(y) + size(z) + slack
            try:
                if S.mode == "strong":
                    u = _join_strong(S, y, z, cfg.join_depth, cap, DEFAULT_REACH_LIMIT)
                else:
                    u = rw_joinable(S, y, z, cfg.join_depth, cap)
            except ResourceLimit as e:
                out["status"] = "resource-exhausted"
                out["counterexample"] = {"peak": [F.show(x), F.show(y), F.show(z)], "reason": str(e)}
                return out
            if u is None:
                out["status"] = "fail"
                out["counterexample"] = {"peak": [F.show(x), F.show(y), F.show(z)]}
                return out
            if len(out["traces"]) < keep_traces:
                out["traces"].append({"peak": [F.show(x), F.show(y), F.show(z)], "join": F.show(u)})
    return out


def rw_closure_contains(S: RewriteSystem, E: EquivSpec, F: FunctorSpec, generators: Callable,
                        cfg: CheckConfig | None = None, bound: int | None = None, slack: int = 2) -> dict:
    """Every generator instance, over the universe plus a fresh atom, is joinable."""
    cfg = cfg or CheckConfig()
    bound = cfg.bound if bound is None else bound
    us = tuple(u + (STAR,) for u in cfg.universes(F.arity))
    size = S.size or F.size
    out = {"status": "pass", "cases": 0, "counterexample": None}
    for x in F.enumerate(us, bound):
        for y in sorted(generators(x), key=repr):
            out["cases"] += 1
            cap = size(x) + size(y) + slack
            try:
                u = rw_joinable(S, x, y, cfg.join_depth, cap)
            except ResourceLimit as e:
                out["status"] = "resource-exhausted"
                out["counterexample"] = {"x": F.show(x), "y": F.show(y), "reason": str(e)}
                return out
            if u is None:
                out["status"] = "fail"
                out["counterexample"] = {"x": F.show(x), "y": F.show(y)}
                return out
    return out


def rw_rewrites_in_equiv(S: RewriteSystem, E: EquivSpec, F: FunctorSpec, cfg: CheckConfig | None = None,
                         bound: int | None = None) -> dict:
    """Every single rewrite step stays inside the equivalence."""
    cfg = cfg or CheckConfig()
    bound = cfg.bound if bound is None else bound
    out = {"status": "pass", "cases": 0, "counterexample": None}
    for x in F.enumerate(cfg.universes(F.arity), bound):
        for y in sorted(S.succ(x), key=repr):
            out["cases"] += 1
            if not E.decide(x, y):
                out["status"] = "fail"
                out["counterexample"] = {"x": F.show(x), "y": F.show(y)}
                return out
    return out


def _lifts(F: FunctorSpec, x, y, proj: int, limit: int = 4096):
    """Values y' with the given projection y whose atoms come from x."""
    pools = [[p for p in F.set(s, x)] for s in range(1, F.arity + 1)]
    opts = []
    total = 1
    for s, a in F.leaves(y):
        cands = sorted((p for p in pools[s - 1] if p[proj] == a), key=repr)
        total *= max(len(cands), 1)
        if not cands:
            return
        opts.append(cands)
    if total > limit:
        raise ResourceLimit("projection lift candidates", limit, total)
    for combo in itertools.product(*opts):
        yield F.refill(y, list(combo))


def rw_factors_projections(S: RewriteSystem, E: EquivSpec, F: FunctorSpec, cfg: CheckConfig | None = None,
                           bound: int | None = None) -> dict:
    cfg = cfg or CheckConfig()
    bound = cfg.bound if bound is None else bound
    us = cfg.universes(F.arity)
    pus = pair_atoms(us, us)
    out = {"status": "pass", "cases": 0, "counterexample": None}
    for x in F.enumerate(pus, bound):
        for proj, pf, pname in ((0, fst, "fst"), (1, snd, "snd")):
            px = F.map([pf] * F.arity, x)
            for y in sorted(S.succ(px), key=repr):
                out["cases"] += 1
                try:
                    ok = any(E.decide(x, y2) for y2 in _lifts(F, x, y, proj))
                except ResourceLimit as e:
                    out["status"] = "resource-exhausted"
                    out["counterexample"] = {"x": F.show(x), "reason": str(e)}
                    return out
                if not ok:
                    out["status"] = "fail"
                    out["counterexample"] = {"x": F.show(x), "projection": pname, "step": [F.show(px), F.show(y)]}
                    return out
    return out


def theorem4_certify(S: RewriteSystem, E: EquivSpec, F: FunctorSpec, generators: Callable,
                     cfg: CheckConfig | None = None, bound: int | None = None) -> ConfluenceCertificate:
    """Bundle the three conditions; the certificate is withheld if any fails."""
    cfg = cfg or CheckConfig()
    bound = cfg.bound if bound is None else bound
    t0 = time.perf_counter()
    cert = ConfluenceCertificate(S.name, E.name, {"universe": cfg.universe, "bound": bound,
                                                  "join_depth": cfg.join_depth, "mode": S.mode})
    mr = check_map_respect(E, F, cfg)
    if mr.status != "pass":
        cert.withheld_at = "precondition (map respect)"
        cert.counterexample = mr.counterexample
        cert.millis = int((time.perf_counter() - t0) * 1000)
        return cert
    parts = [
        ("strong_confluence", "strong confluence", rw_strong_confluence(S, F, cfg, bound)),
        ("closure_contains", "condition (i)", rw_closure_contains(S, E, F, generators, cfg, bound)),
        ("factors_projections", "condition (ii)", rw_factors_projections(S, E, F, cfg, bound)),
        ("rewrites_in_equiv", "rewrites within the equivalence", rw_rewrites_in_equiv(S, E, F, cfg, bound)),
    ]
    for attr, label, res in parts:
        setattr(cert, attr, res["status"])
        cert.cases[attr] = res["cases"]
        if res["status"] != "pass" and cert.withheld_at is None:
            cert.withheld_at = label
            cert.counterexample = res["counterexample"]
        if attr == "strong_confluence":
            cert.traces = res["traces"]
    if S.mode != "strong":
        cert.notes.append("peaks joined by plain bounded search (strong-confluence search not used)")
    cert.certified = cert.withheld_at is None
    cert.millis = int((time.perf_counter() - t0) * 1000)
    return cert
