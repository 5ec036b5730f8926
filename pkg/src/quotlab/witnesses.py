"""Non-emptiness witnesses, subtypes of functors and partial quotients."""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Callable, Sequence

from .atoms import fst, pair_atoms, snd, show_atom
from .functors import FunctorSpec
from .laws import CheckConfig, LawReport, _Fail, _run, _show_fn, fn_tuples
from .quotient import EquivSpec, QuotientSpec, q_make


# -- witnesses -------------------------------------------------------------------

@dataclass
class Witness:
    """Builds a value from one atom per sort in ``index``.

    ``builder(args, us)`` receives the atoms for the sorts in ``index`` (in
    ascending sort order) and the universes, which a raw builder may use to
    pick atoms it was not given.
    """

    name: str
    index: frozenset
    builder: Callable

    def __post_init__(self) -> None:
        self.index = frozenset(self.index)

    def build(self, args: Sequence, us: Sequence):
        return self.builder(tuple(args), us)


class WitnessRefused(Exception):
    def __init__(self, report: LawReport):
        self.report = report
        super().__init__(f"witness property fails: {report.counterexample}")


def wt_check(F: FunctorSpec, w: Witness, cfg: CheckConfig | None = None) -> LawReport:
    """Every atom of the built value is one of the supplied arguments at its sort."""
    cfg = cfg or CheckConfig()
    us = cfg.universes(F.arity)
    sorts = sorted(w.index)

    def body(rep):
        for i in sorts:
            if not 1 <= i <= F.arity:
                raise _Fail({"witness": w.name, "sort": i, "reason": "index out of range"})
        for args in itertools.product(*[us[i - 1] for i in sorts]):
            given = dict(zip(sorts, args))
            x = w.build(args, us)
            for i in range(1, F.arity + 1):
                rep.cases += 1
                for a in F.set(i, x):
                    if i not in given or a != given[i]:
                        raise _Fail({"witness": w.name, "args": [show_atom(a) for a in args],
                                     "value": F.show(x), "sort": i, "atom": show_atom(a)},
                                    ("witness", w.name, args, i, a))
    return _run(f"witness:{w.name}", body)


def wt_lift(Q: QuotientSpec, w: Witness, cfg: CheckConfig | None = None) -> Witness:
    lifted = Witness(w.name, w.index, lambda args, us: Q.abs(w.builder(args, us)))
    rep = wt_check(Q, lifted, cfg)
    if rep.status != "pass":
        raise WitnessRefused(rep)
    return lifted


def wt_minimal(ws: Sequence[Witness]) -> list[Witness]:
    """Drop witnesses subsumed by another one; equal index sets keep the least name."""
    ws = sorted(ws, key=lambda w: w.name)
    out = []
    for w in ws:
        if any(v.index < w.index or (v.index == w.index and v.name < w.name) for v in ws if v is not w):
            continue
        out.append(w)
    return out


# -- subtypes --------------------------------------------------------------------

@dataclass
class SubtypePred:
    name: str
    holds: Callable

    def __call__(self, x) -> bool:
        return bool(self.holds(x))


class RestrictedF(FunctorSpec):
    """The subtype of F carved out by P; the relator needs a zip inside P."""

    def __init__(self, raw: FunctorSpec, pred: SubtypePred):
        self.raw, self.pred = raw, pred
        self.arity = raw.arity
        self.name = f"{raw.name}|{pred.name}"

    def leaves(self, x):
        return self.raw.leaves(x)

    def refill(self, x, atoms):
        return self.raw.refill(x, atoms)

    def size(self, x):
        return self.raw.size(x)

    def enumerate(self, us, bound):
        return [x for x in self.raw.enumerate(us, bound) if self.pred(x)]

    def show(self, x, leaf=None):
        return self.raw.show(x, leaf) if leaf else self.raw.show(x)

    def shape(self, x):
        return self.raw.shape(x)

    def zip(self, x, y):
        return self.raw.zip(x, y)

    def rel(self, rs, x, y):
        z = self.raw.zip(x, y)
        return z is not None and self.pred(z) and all(p in rs[s - 1] for s, p in self.raw.leaves(z))

    def related(self, rs, x, bound=None):
        out = []
        for y in self.raw.related(rs, x) if bound is None else self.raw.related(rs, x, bound):
            z = self.raw.zip(x, y)
            if z is not None and self.pred(z):
                out.append(y)
        return out


class SubtypeRefused(Exception):
    def __init__(self, condition: str, report: LawReport):
        self.condition, self.report = condition, report
        super().__init__(f"{condition}: {report.counterexample}")


def check_map_closed(F: FunctorSpec, P: SubtypePred, cfg: CheckConfig | None = None) -> LawReport:
    """Condition 1: the field is closed under the mapper."""
    cfg = cfg or CheckConfig()
    us = cfg.universes(F.arity)

    def body(rep):
        fs = fn_tuples(us, us, cfg, random.Random(cfg.seed), rep)
        for x in F.enumerate(us, cfg.bound):
            if not P(x):
                continue
            for f in fs:
                rep.cases += 1
                y = F.map(f, x)
                if not P(y):
                    raise _Fail({"x": F.show(x), "f": [_show_fn(d) for d in f], "map f x": F.show(y)},
                                ("map_closed", x, f))
    return _run("subtype_map_closed", body)


def check_pullback_witness(F: FunctorSpec, P: SubtypePred, cfg: CheckConfig | None = None,
                           keep: int = 500) -> LawReport:
    """Condition 2: projections in the field imply a field value with the same projections
    and no new atoms."""
    cfg = cfg or CheckConfig()
    us = cfg.universes(F.arity)
    pus = pair_atoms(us, us)
    fsts, snds = [fst] * F.arity, [snd] * F.arity

    def body(rep):
        first = None
        for z in F.enumerate(pus, cfg.bound):
            px, py = F.map(fsts, z), F.map(snds, z)
            if not (P(px) and P(py)):
                continue
            rep.cases += 1
            sub = tuple(tuple(sorted(s, key=str)) for s in F.sets(z))
            found = any(P(y) and F.map(fsts, y) == px and F.map(snds, y) == py
                        for y in F.enumerate(sub, F.size(z)))
            if not found:
                first = first or z
                if len(rep.violations) < keep:
                    rep.violations.append(z)
        if first is not None:
            raise _Fail({"z": F.show(first), "map fst z": F.show(F.map(fsts, first)),
                         "map snd z": F.show(F.map(snds, first))}, ("pullback_witness", first))
    return _run("subtype_pullback_witness", body)


def st_make(F: FunctorSpec, P: SubtypePred, cfg: CheckConfig | None = None) -> RestrictedF:
    cfg = cfg or CheckConfig()
    r1 = check_map_closed(F, P, cfg)
    if r1.status != "pass":
        raise SubtypeRefused("condition 1 (closed under map)", r1)
    r2 = check_pullback_witness(F, P, cfg)
    if r2.status != "pass":
        raise SubtypeRefused("condition 2 (pullback witness)", r2)
    return RestrictedF(F, P)


class PartialQuotientRefused(Exception):
    def __init__(self, stage: str, cause: Exception):
        self.stage, self.cause = stage, cause
        super().__init__(f"{stage} stage: {cause}")


def field_pred(E: EquivSpec, P: SubtypePred | None = None) -> SubtypePred:
    """The field of a partial equivalence, given as a predicate (reflexive on its field)."""
    if P is not None:
        return P
    return SubtypePred(f"field({E.name})", lambda x: E.decide(x, x))


def st_partial_quotient(F: FunctorSpec, P: SubtypePred, E: EquivSpec, cfg: CheckConfig | None = None,
                        name: str | None = None, **kw) -> QuotientSpec:
    """Subtype first, then the total quotient of the subtype."""
    cfg = cfg or CheckConfig()
    try:
        T = st_make(F, P, cfg)
    except SubtypeRefused as e:
        raise PartialQuotientRefused("subtype", e) from None
    try:
        return q_make(T, E, cfg, name=name, **kw)
    except Exception as e:  # QuotientRefused
        raise PartialQuotientRefused("quotient", e) from None
