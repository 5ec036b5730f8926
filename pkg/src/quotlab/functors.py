"""Finitely enumerable functors: mapper, setters, set-action and relator.

A functor here is a value grammar whose atoms sit at typed leaf positions.
Everything generic (map, set, zip, rel) is derived from two primitives:
``leaves`` lists the ``(sort, atom)`` leaves left to right, and ``refill``
puts a new atom sequence back into the same shape.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Any, Callable, Sequence

from .atoms import (
    STAR, MalformedValue, ResourceLimit, SortError, all_functions, as_fn, atoms_of,
    count_functions, fst, identity, show_atom, snd,
)

Val = Any
DEFAULT_FN_LIMIT = 10**6
DEFAULT_WITNESS_LIMIT = 200_000


class FunctorSpec:
    """Base class; subclasses supply leaves/refill/size/enumerate/show."""

    name = "functor"
    arity = 1

    # -- primitives ------------------------------------------------------
    def leaves(self, x: Val) -> list[tuple[int, Any]]:
        raise NotImplementedError

    def refill(self, x: Val, atoms: Sequence) -> Val:
        raise NotImplementedError

    def size(self, x: Val) -> int:
        raise NotImplementedError

    def enumerate(self, us: Sequence, bound: int) -> list:
        raise NotImplementedError

    def show(self, x: Val) -> str:
        return repr(x)

    # -- derived ---------------------------------------------------------
    def key(self, x: Val):
        return x

    def eq(self, x: Val, y: Val) -> bool:
        return x == y

    def shape(self, x: Val) -> Val:
        return self.refill(x, [None] * len(self.leaves(x)))

    def map(self, fs: Sequence, x: Val) -> Val:
        if len(fs) != self.arity:
            raise SortError(f"{self.name}: expected {self.arity} functions, got {len(fs)}")
        fns = [as_fn(f) for f in fs]
        try:
            return self.refill(x, [fns[s - 1](a) for s, a in self.leaves(x)])
        except KeyError as e:
            raise MalformedValue(f"{self.name}: atom {e} outside the function's domain") from None

    def set(self, i: int, x: Val) -> frozenset:
        if not 1 <= i <= self.arity:
            raise SortError(f"{self.name}: sort {i} out of range 1..{self.arity}")
        return frozenset(a for s, a in self.leaves(x) if s == i)

    def sets(self, x: Val) -> tuple[frozenset, ...]:
        out = [set() for _ in range(self.arity)]
        for s, a in self.leaves(x):
            out[s - 1].add(a)
        return tuple(frozenset(o) for o in out)

    def zip(self, x: Val, y: Val) -> Val | None:
        """The unique pair-valued value projecting to x and y, if shapes agree."""
        lx, ly = self.leaves(x), self.leaves(y)
        if len(lx) != len(ly) or self.shape(x) != self.shape(y):
            return None
        return self.refill(x, [(a, b) for (_, a), (_, b) in zip(lx, ly)])

    def rel(self, rs: Sequence, x: Val, y: Val) -> bool:
        z = self.zip(x, y)
        if z is None:
            return False
        return all(p in rs[s - 1] for s, p in self.leaves(z))

    def related(self, rs: Sequence, x: Val, bound: int | None = None) -> list:
        """All y with rel rs x y (shape-preserving functors: same shape as x)."""
        opts = []
        for s, a in self.leaves(x):
            opts.append(sorted({b for (a2, b) in rs[s - 1] if a2 == a}, key=_order))
        return [self.refill(x, list(c)) for c in itertools.product(*opts)]

    def wellformed(self, x: Val, us: Sequence) -> bool:
        us = atoms_of(us)
        try:
            lv = self.leaves(x)
        except Exception as e:  # noqa: BLE001 - any traversal failure means malformed
            raise MalformedValue(f"{self.name}: cannot traverse {x!r}: {e}") from None
        for s, a in lv:
            if not 1 <= s <= len(us) or a not in us[s - 1]:
                raise MalformedValue(f"{self.name}: atom {a!r} not in universe of sort {s}")
        return True


def _order(a):
    from .atoms import atom_order
    return atom_order(a)


# -- polynomial combinators --------------------------------------------------

@dataclass(frozen=True)
class Inl:
    v: Any

    def __repr__(self) -> str:
        return f"Inl({self.v!r})"


@dataclass(frozen=True)
class Inr:
    v: Any

    def __repr__(self) -> str:
        return f"Inr({self.v!r})"


class Poly(FunctorSpec):
    """A node of the polynomial grammar; sizes of exact value counts are memoized."""

    def _leaves(self, x, out: list) -> None:
        raise NotImplementedError

    def _refill(self, x, it):
        raise NotImplementedError

    def _enum(self, us: tuple, n: int) -> list:
        raise NotImplementedError

    def _show(self, x, leaf: Callable) -> str:
        raise NotImplementedError

    def leaves(self, x):
        out: list = []
        self._leaves(x, out)
        return out

    def refill(self, x, atoms):
        it = iter(atoms)
        v = self._refill(x, it)
        if next(it, _END) is not _END:
            raise MalformedValue(f"{self.name}: too many atoms for shape")
        return v

    def enumerate(self, us, bound):
        us = atoms_of(us)
        out = []
        for n in range(bound + 1):
            out.extend(self._enum_cached(us, n))
        return out

    def _enum_cached(self, us, n):
        cache = self.__dict__.setdefault("_ecache", {})
        k = (us, n)
        if k not in cache:
            cache[k] = self._enum(us, n)
        return cache[k]

    def show(self, x, leaf: Callable | None = None) -> str:
        return self._show(x, leaf or (lambda s, a: show_atom(a)))


_END = object()


class Id(Poly):
    def __init__(self, sort: int, arity: int):
        if not 1 <= sort <= arity:
            raise SortError(f"sort {sort} out of range for arity {arity}")
        self.sort, self.arity, self.name = sort, arity, f"a{sort}"

    def _leaves(self, x, out):
        out.append((self.sort, x))

    def _refill(self, x, it):
        try:
            return next(it)
        except StopIteration:
            raise MalformedValue("too few atoms for shape") from None

    def size(self, x):
        return 0

    def _enum(self, us, n):
        return list(us[self.sort - 1]) if n == 0 else []

    def _show(self, x, leaf):
        return leaf(self.sort, x)


class Unit(Poly):
    def __init__(self, arity: int):
        self.arity, self.name = arity, "1"

    def _leaves(self, x, out):
        if x != ():
            raise MalformedValue(f"unit value expected, got {x!r}")

    def _refill(self, x, it):
        return ()

    def size(self, x):
        return 0

    def _enum(self, us, n):
        return [()] if n == 0 else []

    def _show(self, x, leaf):
        return "()"


class Sum(Poly):
    def __init__(self, left: Poly, right: Poly, name: str | None = None):
        if left.arity != right.arity:
            raise SortError("sum of functors with different arities")
        self.left, self.right, self.arity = left, right, left.arity
        self.name = name or f"{left.name}+{right.name}"

    def _leaves(self, x, out):
        if isinstance(x, Inl):
            self.left._leaves(x.v, out)
        elif isinstance(x, Inr):
            self.right._leaves(x.v, out)
        else:
            raise MalformedValue(f"{self.name}: expected Inl/Inr, got {x!r}")

    def _refill(self, x, it):
        if isinstance(x, Inl):
            return Inl(self.left._refill(x.v, it))
        return Inr(self.right._refill(x.v, it))

    def size(self, x):
        return self.left.size(x.v) if isinstance(x, Inl) else self.right.size(x.v)

    def _enum(self, us, n):
        return [Inl(v) for v in self.left._enum_cached(us, n)] + \
               [Inr(v) for v in self.right._enum_cached(us, n)]

    def _show(self, x, leaf):
        side, f = ("Inl", self.left) if isinstance(x, Inl) else ("Inr", self.right)
        inner = f._show(x.v, leaf)
        return f"{side} {inner}" if inner != "()" else side


class Prod(Poly):
    def __init__(self, left: Poly, right: Poly, name: str | None = None):
        if left.arity != right.arity:
            raise SortError("product of functors with different arities")
        self.left, self.right, self.arity = left, right, left.arity
        self.name = name or f"{left.name}*{right.name}"

    def _leaves(self, x, out):
        if not (isinstance(x, tuple) and len(x) == 2):
            raise MalformedValue(f"{self.name}: expected a pair, got {x!r}")
        self.left._leaves(x[0], out)
        self.right._leaves(x[1], out)

    def _refill(self, x, it):
        return (self.left._refill(x[0], it), self.right._refill(x[1], it))

    def size(self, x):
        return self.left.size(x[0]) + self.right.size(x[1])

    def _enum(self, us, n):
        out = []
        for k in range(n + 1):
            for a in self.left._enum_cached(us, k):
                for b in self.right._enum_cached(us, n - k):
                    out.append((a, b))
        return out

    def _show(self, x, leaf):
        return f"({self.left._show(x[0], leaf)},{self.right._show(x[1], leaf)})"


class ListOf(Poly):
    """Finite lists; the size of a list is its length plus its elements' sizes."""

    def __init__(self, elem: Poly, name: str | None = None):
        self.elem, self.arity = elem, elem.arity
        self.name = name or f"{elem.name} list"

    def _leaves(self, x, out):
        if not isinstance(x, tuple):
            raise MalformedValue(f"{self.name}: expected a list, got {x!r}")
        for e in x:
            self.elem._leaves(e, out)

    def _refill(self, x, it):
        return tuple(self.elem._refill(e, it) for e in x)

    def size(self, x):
        return len(x) + sum(self.elem.size(e) for e in x)

    def _enum(self, us, n):
        if n == 0:
            return [()]
        out = []
        for m in range(n):
            for h in self.elem._enum_cached(us, m):
                for t in self._enum_cached(us, n - 1 - m):
                    out.append((h,) + t)
        return out

    def _show(self, x, leaf):
        return "[" + ",".join(self.elem._show(e, leaf) for e in x) + "]"


class Compose(Poly):
    """F o (G_1..G_m): an F-value whose sort-j atoms are G_j-values."""

    def __init__(self, outer: Poly, inner: Sequence[Poly], name: str | None = None):
        inner = tuple(inner)
        if len(inner) != outer.arity:
            raise SortError(f"compose: {outer.name} needs {outer.arity} inner functors, got {len(inner)}")
        if len({g.arity for g in inner}) != 1:
            raise SortError("compose: inner functors must share one arity")
        self.outer, self.inner, self.arity = outer, inner, inner[0].arity
        self.name = name or f"{outer.name}o({','.join(g.name for g in inner)})"

    def _leaves(self, x, out):
        for j, g in self.outer.leaves(x):
            self.inner[j - 1]._leaves(g, out)

    def _refill(self, x, it):
        new = [self.inner[j - 1]._refill(g, it) for j, g in self.outer.leaves(x)]
        return self.outer.refill(x, new)

    def size(self, x):
        return self.outer.size(x) + sum(self.inner[j - 1].size(g) for j, g in self.outer.leaves(x))

    def _enum(self, us, n):
        # inner values of every size up to n act as the outer functor's atoms
        pools = tuple(tuple(g.enumerate(us, n)) for g in self.inner)
        return [x for k in range(n + 1) for x in self.outer._enum_cached(pools, k) if self.size(x) == n]

    def _show(self, x, leaf):
        return self.outer._show(x, lambda j, g: self.inner[j - 1]._show(g, leaf))


def compose(outer: Poly, inner: Sequence[Poly]) -> Compose:
    return Compose(outer, inner)


LIST = ListOf(Id(1, 1), name="list")
SUM = Sum(Id(1, 2), Id(2, 2), name="sum")
SUM_AA = Sum(Id(1, 1), Id(1, 1), name="sum_aa")
PROD = Prod(Id(1, 2), Id(2, 2), name="prod")
PROD_AA = Prod(Id(1, 1), Id(1, 1), name="prod_aa")
OPTION = Sum(Unit(1), Id(1, 1), name="option")
NONE = Inl(())


# -- operations on any functor ----------------------------------------------

def fmap(F: FunctorSpec, fs: Sequence, x: Val) -> Val:
    return F.map(fs, x)


def set_of(F: FunctorSpec, i: int, x: Val) -> frozenset:
    return F.set(i, x)


def in_sets(F: FunctorSpec, sets: Sequence, x: Val) -> bool:
    """Membership in the set-action F<A>: every sort-i atom lies in A_i."""
    return all(s <= frozenset(a) for s, a in zip(F.sets(x), sets))


def in_sets_by_map(F: FunctorSpec, us: Sequence, sets: Sequence, x: Val,
                   limit: int = DEFAULT_FN_LIMIT) -> bool:
    """Membership in F<A> decided by the mapper alone.

    x is in F<A> iff any two functions into the option universe that agree on
    A map x to the same value. Every such pair of functions is enumerated.
    """
    us = atoms_of(us)
    per_sort = []
    total = 1
    for u, a in zip(us, sets):
        outside = [b for b in u if b not in a]
        cnt = count_functions(u, u + (STAR,)) * count_functions(outside, u + (STAR,))
        total *= cnt
        per_sort.append((u, frozenset(a), outside))
    if total > limit:
        raise ResourceLimit("in_sets_by_map function pairs", limit, total)
    choices = []
    for u, a, outside in per_sort:
        pairs = []
        for f in all_functions(u, u + (STAR,)):
            for h in all_functions(outside, u + (STAR,)):
                g = {b: (f[b] if b in a else h[b]) for b in u}
                pairs.append((f, g))
        choices.append(pairs)
    for combo in itertools.product(*choices):
        if F.map([f for f, _ in combo], x) != F.map([g for _, g in combo], x):
            return False
    return True


def rel(F: FunctorSpec, rs: Sequence, x: Val, y: Val) -> bool:
    return F.rel([frozenset(r) for r in rs], x, y)


def rel_by_witness(F: FunctorSpec, rs: Sequence, x: Val, y: Val,
                   limit: int = DEFAULT_WITNESS_LIMIT) -> bool:
    """The relator from its definition: search z over the pair atoms of R."""
    pair_us = [tuple(sorted(r, key=_order)) for r in rs]
    bound = max(F.size(x), F.size(y))
    cands = F.enumerate(pair_us, bound)
    if len(cands) > limit:
        raise ResourceLimit("rel witness search", limit, len(cands))
    fsts, snds = [fst] * F.arity, [snd] * F.arity
    for z in cands:
        if F.eq(F.map(fsts, z), x) and F.eq(F.map(snds, z), y):
            return True
    return False


def identity_fns(F: FunctorSpec) -> list:
    return [identity] * F.arity
