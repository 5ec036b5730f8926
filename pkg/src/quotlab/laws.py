"""Bounded checkers for the functor laws and the quotient preservation conditions.

Every checker enumerates values exhaustively at the configured bounds and
returns a LawReport; a failing report carries a counterexample that can be
replayed through the core operations (``report.raw``).
"""
from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np

from .atoms import (
    STAR, ResourceLimit, all_bijections, all_functions, all_relations, compose_rel, converse, fst,
    identity, pair_atoms, sample_relations, show_atom, show_set, snd,
)
from .functors import FunctorSpec
from .quotient import EquivSpec, QuotientSpec


@dataclass
class CheckConfig:
    universe: int = 2
    set_universe: int = 3
    bound: int = 3
    class_depth: int = 6
    class_slack: int = 2
    join_depth: int = 4
    seed: int = 0
    rel_exhaustive_pairs: int = 4
    rel_samples: int = 48
    fn_limit: int = 10**6
    fn_sample: int = 512

    def __post_init__(self) -> None:
        for k in ("universe", "set_universe", "bound", "class_depth", "join_depth"):
            if getattr(self, k) < 1:
                raise ValueError(f"{k} must be >= 1")

    def universes(self, arity: int, size: int | None = None) -> tuple:
        n = self.universe if size is None else size
        return tuple(tuple(range(n)) for _ in range(arity))

    def as_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass
class LawReport:
    law: str
    status: str = "pass"
    counterexample: dict | None = None
    cases: int = 0
    millis: int = 0
    notes: list = field(default_factory=list)
    raw: Any = None
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.status == "pass"

    def to_json(self, timings: bool = False) -> dict:
        d = {"law": self.law, "status": self.status}
        if self.counterexample is not None:
            d["counterexample"] = self.counterexample
        d["cases"] = self.cases
        d["millis"] = self.millis if timings else None
        if self.notes:
            d["notes"] = list(self.notes)
        return d


class _Fail(Exception):
    def __init__(self, cex: dict, raw: Any = None):
        self.cex, self.raw = cex, raw


def _run(law: str, body: Callable[[LawReport], None]) -> LawReport:
    rep = LawReport(law)
    t0 = time.perf_counter()
    try:
        body(rep)
    except _Fail as f:
        rep.status, rep.counterexample, rep.raw = "fail", f.cex, f.raw
    except ResourceLimit as e:
        rep.status = "resource-exhausted"
        rep.notes.append(str(e))
    rep.millis = int((time.perf_counter() - t0) * 1000)
    return rep


def _show(F, x) -> str:
    return F.show(x)


def _show_fn(f: dict) -> str:
    return "{" + ",".join(f"{show_atom(a)}->{show_atom(b)}" for a, b in f.items()) + "}"


def _show_rel(r) -> str:
    return "{" + ",".join(f"({show_atom(a)},{show_atom(b)})" for a, b in sorted(r, key=lambda p: (str(p)))) + "}"


def fn_tuples(us: Sequence, ws: Sequence, cfg: CheckConfig, rng: random.Random, rep: LawReport | None = None) -> list:
    per = [all_functions(u, w) for u, w in zip(us, ws)]
    total = 1
    for p in per:
        total *= len(p)
    if total <= cfg.fn_limit and total <= 65536:
        return list(itertools.product(*per))
    if rep is not None:
        rep.notes.append(f"functions sampled: {cfg.fn_sample} of {total}, seed {cfg.seed}")
    return [tuple(rng.choice(p) for p in per) for _ in range(cfg.fn_sample)]


def rel_tuples(us: Sequence, ws: Sequence, cfg: CheckConfig, rng: random.Random,
               rep: LawReport | None = None) -> list:
    if all(len(u) * len(w) <= cfg.rel_exhaustive_pairs for u, w in zip(us, ws)):
        return list(itertools.product(*[all_relations(u, w) for u, w in zip(us, ws)]))
    if rep is not None:
        rep.notes.append(f"relations sampled: {cfg.rel_samples}, seed {cfg.seed}")
    return [tuple(sample_relations(u, w, 1, rng)[0] for u, w in zip(us, ws)) for _ in range(cfg.rel_samples)]


_HELPERS: dict = {}


def classes(E: EquivSpec, F: FunctorSpec, cfg: CheckConfig) -> QuotientSpec:
    """An unchecked quotient used only for class enumeration."""
    k = (id(E), id(F), cfg.class_slack)
    if k not in _HELPERS:
        _HELPERS[k] = (E, F, QuotientSpec(F, E, class_slack=cfg.class_slack))
    return _HELPERS[k][2]


# -- BNF laws ------------------------------------------------------------------

def laws_bnf(F: FunctorSpec, cfg: CheckConfig | None = None) -> list[LawReport]:
    cfg = cfg or CheckConfig()
    rng = random.Random(cfg.seed)
    us = cfg.universes(F.arity)
    vals = F.enumerate(us, cfg.bound)
    out = []

    def map_id(rep):
        ids = [identity] * F.arity
        for x in vals:
            rep.cases += 1
            y = F.map(ids, x)
            if not F.eq(y, x):
                raise _Fail({"x": _show(F, x), "map id x": _show(F, y)}, ("map_id", x))
    out.append(_run("map_id", map_id))

    def map_comp(rep):
        fs = fn_tuples(us, us, cfg, rng, rep)
        for x in vals:
            for f in fs:
                fx = F.map(f, x)
                for g in fs:
                    rep.cases += 1
                    gf = [{a: gi[fi[a]] for a in fi} for fi, gi in zip(f, g)]
                    lhs, rhs = F.map(g, fx), F.map(gf, x)
                    if not F.eq(lhs, rhs):
                        raise _Fail({"x": _show(F, x), "f": [_show_fn(d) for d in f], "g": [_show_fn(d) for d in g],
                                     "lhs": _show(F, lhs), "rhs": _show(F, rhs)}, ("map_comp", x, f, g))
    out.append(_run("map_comp", map_comp))

    def set_map(rep):
        fs = fn_tuples(us, us, cfg, rng, rep)
        for x in vals:
            sx = F.sets(x)
            for f in fs:
                sfx = F.sets(F.map(f, x))
                for i in range(F.arity):
                    rep.cases += 1
                    img = frozenset(f[i][a] for a in sx[i])
                    if frozenset(sfx[i]) != img:
                        raise _Fail({"x": _show(F, x), "f": [_show_fn(d) for d in f], "sort": i + 1,
                                     "lhs": show_set(sfx[i]), "rhs": show_set(img)}, ("set_map", x, f, i + 1))
    out.append(_run("set_map", set_map))

    def map_cong(rep):
        fs = fn_tuples(us, us, cfg, rng, rep)
        for x in vals:
            sx = F.sets(x)
            for f in fs:
                fx = F.map(f, x)
                variants = []
                for i, fi in enumerate(f):
                    outside = [a for a in us[i] if a not in sx[i]]
                    variants.append([{**fi, **h} for h in all_functions(outside, us[i])])
                for g in itertools.product(*variants):
                    rep.cases += 1
                    gx = F.map(g, x)
                    if not F.eq(fx, gx):
                        raise _Fail({"x": _show(F, x), "f": [_show_fn(d) for d in f], "g": [_show_fn(d) for d in g],
                                     "map f x": _show(F, fx), "map g x": _show(F, gx)}, ("map_cong", x, f, g))
    out.append(_run("map_cong", map_cong))

    tables: dict = {}

    def rel_table(r):
        if r not in tables:
            m = np.zeros((len(vals), len(vals)), dtype=np.float32)
            for a, x in enumerate(vals):
                for b, y in enumerate(vals):
                    if F.rel(r, x, y):
                        m[a, b] = 1
            tables[r] = m
        return tables[r]

    def in_rel(rep):
        pus = pair_atoms(us, us)
        zs = F.enumerate(pus, cfg.bound)
        fsts, snds = [fst] * F.arity, [snd] * F.arity
        keys = {F.key(v): k for k, v in enumerate(vals)}
        info = []
        for z in zs:
            kx, ky = keys.get(F.key(F.map(fsts, z))), keys.get(F.key(F.map(snds, z)))
            if kx is not None and ky is not None:
                info.append((F.sets(z), kx, ky, z))
        for r in rel_tuples(us, us, cfg, rng, rep):
            m = rel_table(r) > 0
            wit = {}
            for sz, kx, ky, z in info:
                if all(s <= ri for s, ri in zip(sz, r)):
                    wit.setdefault((kx, ky), z)
            w = np.zeros_like(m)
            for a, b in wit:
                w[a, b] = True
            rep.cases += m.size
            for a, b in np.argwhere(m != w):
                x, y = vals[a], vals[b]
                lhs, rhs = bool(m[a, b]), bool(w[a, b])
                if lhs and not rhs:
                    z = _zip_witness(F, r, x, y, us)
                    if z is not None:
                        wit[(a, b)] = z
                        continue
                cex = {"R": [_show_rel(ri) for ri in r], "x": _show(F, x), "y": _show(F, y),
                       "rel": lhs, "witness": _show(F, wit[(a, b)]) if rhs else None}
                raise _Fail(cex, ("in_rel", r, x, y))
    out.append(_run("in_rel", in_rel))

    def rel_comp(rep):
        rels = rel_tuples(us, us, cfg, rng, rep)
        for r in rels:
            for s in rels:
                t = tuple(compose_rel(ri, si) for ri, si in zip(r, s))
                rep.cases += 1
                lhs = rel_table(r) @ rel_table(s)
                bad = np.argwhere((lhs > 0) & (rel_table(t) == 0))
                if len(bad):
                    a, c = bad[0]
                    raise _Fail({"R": [_show_rel(ri) for ri in r], "S": [_show_rel(si) for si in s],
                                 "x": _show(F, vals[a]), "z": _show(F, vals[c])}, ("rel_comp", r, s, vals[a], vals[c]))
    out.append(_run("rel_comp", rel_comp))

    def set_bd(rep):
        rep.notes.append("substituted-axiom: cardinal bounds replaced by finiteness of every setter")
        for x in vals:
            for s in F.sets(x):
                rep.cases += 1
                if not isinstance(s, frozenset):
                    raise _Fail({"x": _show(F, x)}, ("set_bd", x))
    out.append(_run("set_bd", set_bd))
    return out


def _zip_witness(F: FunctorSpec, rs, x, y, us):
    """A witness for rel rs x y built by zipping class members; reaches pair
    values longer than the enumeration bound (stream cycles multiply)."""
    if isinstance(F, QuotientSpec):
        raw, cx, cy = F.raw, F.class_members(x, us)[0], F.class_members(y, us)[0]
    else:
        raw, cx, cy = F, [x], [y]
    fsts, snds = [fst] * F.arity, [snd] * F.arity
    for u in cx:
        for v in cy:
            z = raw.zip(u, v)
            if z is None:
                continue
            if not (F.eq(F.map(fsts, z), x) and F.eq(F.map(snds, z), y)):
                continue
            # the quotient's atoms are a subset of the raw ones, so the raw test suffices when it holds
            if all(s <= ri for s, ri in zip(raw.sets(z), rs)):
                return z
            sx, sy = raw.size(x), raw.size(y)
            if raw.size(z) > sx * sy + sx + sy:
                continue
            try:
                if all(s <= ri for s, ri in zip(F.sets(z), rs)):
                    return z
            except ResourceLimit:
                continue
    return None


# -- conditions on the equivalence ---------------------------------------------

def _decide(E: EquivSpec):
    return E.decide


def _class_groups(E: EquivSpec, vals: list) -> list[list]:
    """Partition enumerated values into classes (by key when available)."""
    if E.has_key():
        g: dict = {}
        for v in vals:
            g.setdefault(E.canon_key(v), []).append(v)
        return list(g.values())
    groups: list = []
    for v in vals:
        for grp in groups:
            if E.decide(grp[0], v):
                grp.append(v)
                break
        else:
            groups.append([v])
    return groups


def check_equivp(E: EquivSpec, F: FunctorSpec, cfg: CheckConfig | None = None) -> LawReport:
    cfg = cfg or CheckConfig()
    vals = F.enumerate(cfg.universes(F.arity), cfg.bound)

    def body(rep):
        n = len(vals)
        rows = []
        for a in range(n):
            row = set()
            for b in range(n):
                rep.cases += 1
                if E.decide(vals[a], vals[b]):
                    row.add(b)
            rows.append(row)
        for a in range(n):
            if a not in rows[a]:
                raise _Fail({"property": "reflexive", "x": _show(F, vals[a])}, ("refl", vals[a]))
        for a in range(n):
            for b in rows[a]:
                if a not in rows[b]:
                    raise _Fail({"property": "symmetric", "x": _show(F, vals[a]), "y": _show(F, vals[b])},
                                ("sym", vals[a], vals[b]))
        for a in range(n):
            for b in rows[a]:
                extra = rows[b] - rows[a]
                if extra:
                    c = min(extra)
                    raise _Fail({"property": "transitive", "x": _show(F, vals[a]), "y": _show(F, vals[b]),
                                 "z": _show(F, vals[c])}, ("trans", vals[a], vals[b], vals[c]))
    return _run("equivp", body)


def check_equiv_naturality(E: EquivSpec, F: FunctorSpec, cfg: CheckConfig | None = None) -> LawReport:
    """Renaming atoms bijectively neither merges nor splits classes."""
    cfg = cfg or CheckConfig()

    def body(rep):
        for us in (cfg.universes(F.arity), tuple(u + (STAR,) for u in cfg.universes(F.arity))):
            vals = F.enumerate(us, cfg.bound)
            bijs = list(itertools.product(*[all_bijections(u) for u in us]))
            if E.has_key():
                keys = [E.canon_key(x) for x in vals]
                for b in bijs:
                    fwd: dict = {}
                    back: dict = {}
                    for x, k in zip(vals, keys):
                        rep.cases += 1
                        bx = F.map(b, x)
                        kb = E.canon_key(bx)
                        if fwd.setdefault(k, (kb, x))[0] != kb or back.setdefault(kb, (k, x))[0] != k:
                            y = fwd[k][1] if fwd[k][0] != kb else back[kb][1]
                            raise _Fail({"x": _show(F, x), "y": _show(F, y), "renaming": [_show_fn(f) for f in b],
                                         "before": E.decide(x, y), "after": E.decide(bx, F.map(b, y))},
                                        ("naturality", x, y, b))
                continue
            for x in vals:
                for y in vals:
                    d = E.decide(x, y)
                    for b in bijs:
                        rep.cases += 1
                        bx, by = F.map(b, x), F.map(b, y)
                        if E.decide(bx, by) != d:
                            raise _Fail({"x": _show(F, x), "y": _show(F, y), "renaming": [_show_fn(f) for f in b],
                                         "before": d, "after": not d}, ("naturality", x, y, b))
    return _run("equiv_naturality", body)


def check_map_respect(E: EquivSpec, F: FunctorSpec, cfg: CheckConfig | None = None) -> LawReport:
    cfg = cfg or CheckConfig()
    rng = random.Random(cfg.seed)
    us = cfg.universes(F.arity)
    vals = F.enumerate(us, cfg.bound)

    def body(rep):
        ws = tuple(u + (STAR,) for u in us)
        fs = fn_tuples(us, ws, cfg, rng, rep)
        for grp in _class_groups(E, vals):
            for x, y in itertools.combinations(grp, 2):
                for f in fs:
                    rep.cases += 1
                    fx, fy = F.map(f, x), F.map(f, y)
                    if not E.decide(fx, fy):
                        raise _Fail({"x": _show(F, x), "y": _show(F, y), "f": [_show_fn(d) for d in f],
                                     "map f x": _show(F, fx), "map f y": _show(F, fy)}, ("map_respect", x, y, f))
    return _run("map_respect", body)


def check_set_respect(E: EquivSpec, F: FunctorSpec, cfg: CheckConfig | None = None) -> LawReport:
    cfg = cfg or CheckConfig()
    vals = F.enumerate(cfg.universes(F.arity, cfg.set_universe), cfg.bound)

    def body(rep):
        for grp in _class_groups(E, vals):
            for x, y in itertools.combinations(grp, 2):
                rep.cases += 1
                sx, sy = F.sets(x), F.sets(y)
                if sx != sy:
                    i = next(k for k in range(F.arity) if sx[k] != sy[k])
                    raise _Fail({"x": _show(F, x), "y": _show(F, y), "sort": i + 1,
                                 "set x": show_set(sx[i]), "set y": show_set(sy[i])}, ("set_respect", x, y))
    return _run("set_respect", body)


def _min_sets(Q: QuotientSpec, x, us, i: int) -> list[frozenset]:
    members, _ = Q.class_members(x, us)
    sets = {frozenset(Q.raw.set(i, y)) for y in members}
    return [s for s in sets if not any(t < s for t in sets)]


def check_wide_intersection(E: EquivSpec, F: FunctorSpec, i: int, cfg: CheckConfig | None = None) -> LawReport:
    """For every family with nonempty intersection, membership in every
    [F<A>] implies membership in [F<intersection>]."""
    cfg = cfg or CheckConfig()
    size = min(cfg.set_universe, 3)
    us = tuple(tuple(range(size if k == i - 1 else cfg.universe)) for k in range(F.arity))
    vals = F.enumerate(us, cfg.bound)
    Q = classes(E, F, cfg)
    subsets = [frozenset(c) for n in range(len(us[i - 1]) + 1) for c in itertools.combinations(us[i - 1], n)]

    def body(rep):
        mins = {x: _min_sets(Q, x, us, i) for x in vals}
        for n in range(1, len(subsets) + 1):
            for fam in itertools.combinations(subsets, n):
                inter = frozenset.intersection(*fam)
                if not inter:
                    continue
                for x in vals:
                    rep.cases += 1
                    ms = mins[x]
                    if all(any(m <= a for m in ms) for a in fam) and not any(m <= inter for m in ms):
                        raise _Fail({"x": _show(F, x), "family": [show_set(a) for a in fam], "sort": i},
                                    ("wide_intersection", x, fam, i))
    return _run(f"wide_intersection_{i}", body)


def check_preimage(E: EquivSpec, F: FunctorSpec, cfg: CheckConfig | None = None) -> LawReport:
    """If map f x is equivalent to a value in F<A> (with nonempty preimages),
    some x' ~ x already maps into F<A>."""
    cfg = cfg or CheckConfig()
    rng = random.Random(cfg.seed)
    us = cfg.universes(F.arity)
    vals = F.enumerate(us, cfg.bound)
    Q = classes(E, F, cfg)
    subsets = [[frozenset(c) for n in range(len(u) + 1) for c in itertools.combinations(u, n)] for u in us]

    def body(rep):
        fs = fn_tuples(us, us, cfg, rng, rep)
        cls = {x: Q.class_members(x, us)[0] for x in vals}
        for f in fs:
            for aa in itertools.product(*subsets):
                if any(not any(fi[b] in ai for b in fi) for fi, ai in zip(f, aa)):
                    continue
                for x in vals:
                    rep.cases += 1
                    fx = F.map(f, x)
                    lhs = any(all(s <= a for s, a in zip(F.sets(y), aa)) for y in Q.class_members(fx, us)[0])
                    if not lhs:
                        continue
                    if not any(all(s <= a for s, a in zip(F.sets(F.map(f, x2)), aa)) for x2 in cls[x]):
                        raise _Fail({"x": _show(F, x), "f": [_show_fn(d) for d in f], "A": [show_set(a) for a in aa]},
                                    ("preimage", x, f, aa))
    return _run("preimage", body)


def check_subdistributivity(E: EquivSpec, F: FunctorSpec, cfg: CheckConfig | None = None,
                            keep_violations: int = 2000) -> LawReport:
    """rel R . ~ . rel S  is contained in  ~ . rel (R.S) . ~  whenever every R_i.S_i is nonempty.

    The left side is a boolean product: x reaches a class through rel R, z
    reaches it backwards through rel S. The right side collects the classes
    reachable through rel (R.S) from any member of x's class.
    """
    cfg = cfg or CheckConfig()
    rng = random.Random(cfg.seed)
    us = cfg.universes(F.arity)
    vals = F.enumerate(us, cfg.bound)
    Q = classes(E, F, cfg)
    key = Q.key
    far = cfg.bound + cfg.class_slack

    def body(rep):
        rels = rel_tuples(us, us, cfg, rng, rep)
        ids: dict = {}

        def kid(k):
            return ids.setdefault(k, len(ids))

        for z in vals:
            kid(key(z))
        cls = {x: Q.class_members(x, us)[0] for x in vals}
        lsets = {r: [{kid(key(y)) for y in F.related(r, x)} for x in vals] for r in rels}
        rsets = {}
        for s in rels:
            sc = tuple(converse(si) for si in s)
            rsets[s] = [{kid(key(y)) for y in F.related(sc, z)} for z in vals]
        n, k = len(vals), len(ids)

        def mat(rows, width, transpose=False):
            m = np.zeros((len(rows), width), dtype=np.float32)
            for a, row in enumerate(rows):
                for c in row:
                    if c < width:
                        m[a, c] = 1
            return m.T.copy() if transpose else m

        lmat = {r: mat(lsets[r], k) for r in rels}
        rmat = {s: mat(rsets[s], k, transpose=True) for s in rels}
        rhs: dict = {}

        def rhs_mat(t):
            if t not in rhs:
                m = np.zeros((n, n), dtype=bool)
                for a, x in enumerate(vals):
                    reach = {key(v) for u in cls[x] for v in F.related(t, u, max(far, F.size(u)))}
                    m[a] = [key(z) in reach for z in vals]
                rhs[t] = m
            return rhs[t]

        first, seen = None, set()
        for r in rels:
            for s in rels:
                t = tuple(compose_rel(ri, si) for ri, si in zip(r, s))
                if any(not ti for ti in t):
                    continue
                rep.cases += n * n
                lhs = (lmat[r] @ rmat[s]) > 0
                if not lhs.any():
                    continue
                bad = np.argwhere(lhs & ~rhs_mat(t))
                if len(bad):
                    if first is None:
                        a, c = bad[0]
                        first = (r, s, vals[a], vals[c])
                    for a, c in bad:
                        v = (vals[a], vals[c])
                        if v not in seen and len(seen) < keep_violations:
                            seen.add(v)
                            rep.violations.append(v)
        if first is not None:
            r, s, x, z = first
            cex = {"R": [_show_rel(ri) for ri in r], "S": [_show_rel(si) for si in s],
                   "x": _show(F, x), "z": _show(F, z)}
            zz = F.zip(x, z)
            if zz is not None:
                cex["zip"] = _show(F, zz)
            raise _Fail(cex, ("subdistributivity", r, s, x, z))
    return _run("subdistributivity", body)


def subdistributivity_violated(E: EquivSpec, F: FunctorSpec, rs, ss, x, z, cfg: CheckConfig | None = None) -> bool:
    """Replay one case of the subdistributivity condition."""
    cfg = cfg or CheckConfig()
    Q = classes(E, F, cfg)
    us = cfg.universes(F.arity)
    ys = {Q.key(y) for y in F.related(rs, x)}
    sc = tuple(converse(si) for si in ss)
    ys2 = {Q.key(y) for y in F.related(sc, z)}
    if not ys & ys2:
        return False
    t = tuple(compose_rel(ri, si) for ri, si in zip(rs, ss))
    kz = Q.key(z)
    far = cfg.bound + cfg.class_slack
    return not any(Q.key(v) == kz for u in Q.class_members(x, us)[0]
                   for v in F.related(t, u, max(far, F.size(u))))


# -- bundles -------------------------------------------------------------------

def condition_suite(E: EquivSpec, F: FunctorSpec, cfg: CheckConfig | None = None) -> list[LawReport]:
    cfg = cfg or CheckConfig()
    out = [check_equivp(E, F, cfg), check_equiv_naturality(E, F, cfg), check_map_respect(E, F, cfg),
           check_set_respect(E, F, cfg)]
    out.extend(check_wide_intersection(E, F, i, cfg) for i in range(1, F.arity + 1))
    out.append(check_preimage(E, F, cfg))
    out.append(check_subdistributivity(E, F, cfg))
    return out
