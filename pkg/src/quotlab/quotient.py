"""Quotient functors: the raw functor's mapper lifted, and the setter and
relator computed through the option extension 1+a.

A class is explored inside a bounded universe: the atoms that occur in the
value (plus, for the relator, the relation's domain) and the fresh atom.
Members are drawn from every value up to ``size(x) + class_slack``, which is
exhaustive for that bound whenever the equivalence has a canonical key.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Callable, Hashable, Iterable, Sequence

from .atoms import STAR, all_functions, atom_order, atoms_of, count_functions, ResourceLimit
from .functors import DEFAULT_FN_LIMIT, FunctorSpec, Val


@dataclass
class EquivSpec:
    """A natural equivalence on raw values.

    ``key`` maps every value to a hashable canonical invariant (equal keys iff
    equivalent). ``normalizer`` returns a canonical member. ``neighbors`` gives
    single generator steps in both directions; it may use the universe.
    ``class_enum`` lists a finite class exactly over the given universes.
    """

    name: str
    decide: Callable[[Val, Val], bool] | None = None
    key: Callable[[Val], Hashable] | None = None
    normalizer: Callable[[Val], Val] | None = None
    neighbors: Callable[[Val, tuple], Iterable[Val]] | None = None
    size_preserving: bool = False
    class_enum: Callable[[Val, tuple], list] | None = None

    def __post_init__(self) -> None:
        if self.decide is None:
            kf = self.key or self.normalizer
            if kf is None:
                raise ValueError(f"{self.name}: needs decide, key or normalizer")
            self.decide = lambda x, y: kf(x) == kf(y)

    def has_key(self) -> bool:
        return self.key is not None or self.normalizer is not None

    def canon_key(self, x: Val) -> Hashable:
        if self.key is not None:
            return self.key(x)
        return self.normalizer(x)


def equality(name: str = "eq") -> EquivSpec:
    return EquivSpec(name, key=lambda x: x, normalizer=lambda x: x, size_preserving=True)


class BoundedSet(frozenset):
    """An atom set with a flag telling whether the class search was exhaustive."""

    exact: bool = True

    def __new__(cls, items=(), exact: bool = True):
        s = super().__new__(cls, items)
        s.exact = exact
        return s


@dataclass(frozen=True)
class QVal:
    rep: Any
    key: Hashable = field(compare=True)

    def __eq__(self, other):
        return isinstance(other, QVal) and self.key == other.key

    def __hash__(self):
        return hash(self.key)


class QuotientRefused(Exception):
    def __init__(self, reports):
        self.reports = reports
        bad = [r for r in reports if r.status != "pass"]
        super().__init__("; ".join(f"{r.law}: {r.status} {r.counterexample}" for r in bad))


class QuotientSpec(FunctorSpec):
    """Functor interface of F/~ on representatives; ``eq`` is the equivalence."""

    def __init__(self, raw: FunctorSpec, equiv: EquivSpec, name: str | None = None,
                 set_respecting: bool = False, class_slack: int = 2, class_cap: int = 200_000):
        self.raw, self.equiv = raw, equiv
        self.name = name or f"{raw.name}/{equiv.name}"
        self.arity = raw.arity
        self.set_respecting = set_respecting
        self.class_slack = class_slack
        self.class_cap = class_cap
        self._index: dict = {}
        self._reps: list = []
        self._kcache: dict = {}
        self._rel_cache: dict = {}
        self._set_cache: dict = {}

    # -- classes ---------------------------------------------------------
    def key(self, x):
        if self.equiv.has_key():
            return self.equiv.canon_key(x)
        # partition fallback: the first registered representative names the class
        for k, r in enumerate(self._reps):
            if self.equiv.decide(r, x):
                return ("class", k)
        self._reps.append(x)
        return ("class", len(self._reps) - 1)

    def eq(self, x, y):
        if self.equiv.has_key():
            return self.key(x) == self.key(y)
        return self.equiv.decide(x, y)

    def class_index(self, us: tuple, bound: int) -> dict:
        k = (us, bound)
        if k not in self._index:
            vals = self.raw.enumerate(us, bound)
            if len(vals) > self.class_cap:
                raise ResourceLimit(f"{self.name} class index", self.class_cap, len(vals))
            idx: dict = {}
            for v in vals:
                idx.setdefault(self.key(v), []).append(v)
            self._index[k] = idx
        return self._index[k]

    def class_members(self, x, us: Sequence, depth: int | None = None) -> tuple[list, bool]:
        """Members of x's class over ``us`` with size at most size(x) + depth.

        The flag is True when the search is known to be exhaustive.
        """
        us = atoms_of(us)
        if self.equiv.class_enum is not None:
            return list(self.equiv.class_enum(x, us)), True
        if self.equiv.neighbors is not None and not self.equiv.has_key():
            return self._class_bfs(x, us, depth if depth is not None else 6)
        slack = self.class_slack if depth is None else depth
        bound = self.raw.size(x) + (0 if self.equiv.size_preserving else slack)
        members = self.class_index(us, bound).get(self.key(x), [])
        if x not in members:
            members = [x] + members
        return members, self.equiv.size_preserving

    def _class_bfs(self, x, us, depth, cap: int = 5000):
        seen, frontier = [x], [x]
        known = {x}
        exhausted = True
        for _ in range(depth):
            nxt = []
            for v in frontier:
                for w in self.equiv.neighbors(v, us):
                    if w not in known:
                        if len(known) >= cap:
                            return seen, False
                        known.add(w)
                        seen.append(w)
                        nxt.append(w)
            frontier = nxt
            if not frontier:
                return seen, exhausted
        return seen, not frontier

    # -- functor interface ----------------------------------------------
    def size(self, x):
        return self.raw.size(x)

    def leaves(self, x):
        return self.raw.leaves(x)

    def refill(self, x, atoms):
        return self.raw.refill(x, atoms)

    def enumerate(self, us, bound):
        out, seen = [], set()
        for v in self.raw.enumerate(us, bound):
            k = self.key(v)
            if k not in seen:
                seen.add(k)
                out.append(self.abs(v))
        return out

    def abs(self, x):
        return self.equiv.normalizer(x) if self.equiv.normalizer is not None else x

    def show(self, x, leaf=None):
        return "[" + (self.raw.show(x, leaf) if leaf else self.raw.show(x)) + "]"

    def map(self, fs, x):
        return self.abs(self.raw.map(fs, x))

    def set(self, i, x):
        return self.q_set(i, x)

    def sets(self, x):
        return tuple(self.q_set(i, x) for i in range(1, self.arity + 1))

    def rel(self, rs, x, y):
        return self.q_rel(rs, x, y)

    def zip(self, x, y):
        raise NotImplementedError("no canonical zip on a quotient")

    # -- setter ----------------------------------------------------------
    def opt_universe_of(self, x, extra: Sequence | None = None) -> tuple:
        sets = self.raw.sets(x)
        out = []
        for i, s in enumerate(sets):
            atoms = set(s)
            if extra is not None:
                atoms |= set(extra[i])
            atoms.discard(STAR)
            out.append(tuple(sorted(atoms, key=atom_order)) + (STAR,))
        return tuple(out)

    def q_set(self, i, x, depth: int | None = None) -> BoundedSet:
        if not 1 <= i <= self.arity:
            from .atoms import SortError
            raise SortError(f"{self.name}: sort {i} out of range")
        if self.set_respecting:
            return BoundedSet(self.raw.set(i, x), True)
        return self.q_sets(x, depth)[i - 1]

    def q_sets(self, x, depth: int | None = None) -> tuple:
        ck = (x, depth)
        if ck in self._set_cache:
            return self._set_cache[ck]
        if self.set_respecting:
            res = tuple(BoundedSet(s, True) for s in self.raw.sets(x))
        else:
            members, exact = self.class_members(x, self.opt_universe_of(x), depth)
            acc = [set(s) for s in self.raw.sets(x)]
            for y in members:
                ys = self.raw.sets(y)
                for k in range(self.arity):
                    acc[k] &= ys[k]
            res = tuple(BoundedSet(a - {STAR}, exact) for a in acc)
        self._set_cache[ck] = res
        return res

    def q_set_by_class(self, i, x, depth: int | None = None) -> BoundedSet:
        """The class-intersection formula even when the fast path applies."""
        members, exact = self.class_members(x, self.opt_universe_of(x), depth)
        acc = set(self.raw.set(i, x))
        for y in members:
            acc &= self.raw.set(i, y)
        return BoundedSet(acc - {STAR}, exact)

    # -- relator ---------------------------------------------------------
    def q_rel(self, rs, x, y, depth: int | None = None) -> bool:
        """Related iff some u ~ e(x), v ~ e(y) are raw-related by R plus (*,*)."""
        rs = tuple(frozenset(r) | {(STAR, STAR)} for r in rs)
        # functors whose related values may outgrow x (streams) search up to y's class bound
        far = self.raw.size(y) + (0 if self.equiv.size_preserving else self.class_slack)
        ck = (rs, self.key(x), depth, far)
        if ck not in self._rel_cache:
            dom = [sorted({a for a, _ in r if a != STAR}, key=atom_order) for r in rs]
            members, _ = self.class_members(x, self.opt_universe_of(x, dom), depth)
            keys = set()
            for u in members:
                for v in self.raw.related(rs, u, max(far, self.raw.size(u))):
                    keys.add(self.key(v))
            self._rel_cache[ck] = keys
        return self.key(y) in self._rel_cache[ck]

    def q_naive_rel(self, rs, x, y, depth: int | None = None) -> bool:
        """Related iff some representatives are raw-related by R itself."""
        rs = tuple(frozenset(r) for r in rs)
        dom = [sorted({a for a, _ in r}, key=atom_order) for r in rs]
        us = tuple(tuple(u[:-1]) for u in self.opt_universe_of(x, dom))
        members, _ = self.class_members(x, us, depth)
        ky = self.key(y)
        far = self.raw.size(y) + (0 if self.equiv.size_preserving else self.class_slack)
        return any(self.key(v) == ky for u in members for v in self.raw.related(rs, u, max(far, self.raw.size(u))))


# -- module-level operations --------------------------------------------------

def _rep(q):
    return q.rep if isinstance(q, QVal) else q


def q_make(F: FunctorSpec, E: EquivSpec, cfg=None, name: str | None = None,
           set_respecting: bool | None = None, **kw) -> QuotientSpec:
    """Build F/~ after checking equivalence, naturality and map-respect at bounds."""
    from .laws import CheckConfig, check_equiv_naturality, check_equivp, check_map_respect, check_set_respect
    cfg = cfg or CheckConfig()
    reports = [check_equivp(E, F, cfg), check_equiv_naturality(E, F, cfg), check_map_respect(E, F, cfg)]
    if any(r.status != "pass" for r in reports):
        raise QuotientRefused(reports)
    if set_respecting is None:
        set_respecting = check_set_respect(E, F, cfg).status == "pass"
    return QuotientSpec(F, E, name=name, set_respecting=set_respecting, **kw)


def q_abs(Q: QuotientSpec, x, us: Sequence | None = None) -> QVal:
    if Q.equiv.normalizer is not None or us is None:
        rep = Q.abs(x)
    else:
        members, _ = Q.class_members(x, us, 0)
        vals = Q.raw.enumerate(us, Q.raw.size(x))
        order = {v: k for k, v in enumerate(vals)}
        rep = min(members, key=lambda v: order.get(v, len(order)))
    return QVal(rep, Q.key(rep))


def q_map(Q: QuotientSpec, fs: Sequence, q) -> QVal:
    v = Q.map(fs, _rep(q))
    return QVal(v, Q.key(v))


def q_set(Q: QuotientSpec, i: int, q, depth: int | None = None) -> BoundedSet:
    return Q.q_set(i, _rep(q), depth)


def q_rel(Q: QuotientSpec, rs: Sequence, p, q, depth: int | None = None) -> bool:
    return Q.q_rel(rs, _rep(p), _rep(q), depth)


def q_naive_set(Q: QuotientSpec, i: int, q) -> frozenset:
    return Q.raw.set(i, _rep(q))


def q_naive_rel(Q: QuotientSpec, rs: Sequence, p, q, depth: int | None = None) -> bool:
    return Q.q_naive_rel(rs, _rep(p), _rep(q), depth)


def q_in_sets_sim(Q: QuotientSpec, us: Sequence, sets: Sequence, x,
                  limit: int = DEFAULT_FN_LIMIT) -> bool:
    """Membership in F_in with equality replaced by the equivalence."""
    x = _rep(x)
    us = atoms_of(us)
    choices, total = [], 1
    for u, a in zip(us, sets):
        a = frozenset(a)
        outside = [b for b in u if b not in a]
        total *= count_functions(u, u + (STAR,)) * count_functions(outside, u + (STAR,))
        pairs = []
        for f in all_functions(u, u + (STAR,)):
            for h in all_functions(outside, u + (STAR,)):
                pairs.append((f, {b: (f[b] if b in a else h[b]) for b in u}))
        choices.append(pairs)
        if total > limit:
            raise ResourceLimit("q_in_sets_sim function pairs", limit, total)
    for combo in itertools.product(*choices):
        if not Q.eq(Q.raw.map([f for f, _ in combo], x), Q.raw.map([g for _, g in combo], x)):
            return False
    return True


def class_meets(Q: QuotientSpec, us: Sequence, sets: Sequence, x) -> bool:
    """Does the class of e(x) contain a value with atoms in {*} + e(A)?"""
    x = _rep(x)
    opt = tuple(tuple(u) + (STAR,) for u in atoms_of(us))
    members, _ = Q.class_members(x, opt)
    return any(all(s <= (frozenset(a) | {STAR}) for s, a in zip(Q.raw.sets(y), sets)) for y in members)
