"""Ultimately periodic streams and the two stream-based functors.

An ultimately periodic stream is ``prefix . cycle^omega`` with a nonempty
cycle. The canonical form has a primitive cycle and the shortest prefix,
which makes it unique: two streams are equal iff their canonical forms are.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from math import lcm
from typing import Any, Sequence

from .atoms import MalformedValue, atom_order, atoms_of, show_atom
from .functors import FunctorSpec


@dataclass(frozen=True)
class Stream:
    prefix: tuple
    cycle: tuple

    def at(self, n: int) -> Any:
        if n < len(self.prefix):
            return self.prefix[n]
        return self.cycle[(n - len(self.prefix)) % len(self.cycle)]

    def take(self, n: int) -> tuple:
        p = len(self.prefix)
        if n <= p:
            return self.prefix[:n]
        reps = -(-(n - p) // len(self.cycle))
        return (self.prefix + self.cycle * reps)[:n]

    def __repr__(self) -> str:
        return f"Stream({self.prefix!r}, {self.cycle!r})"


def primitive_root(cycle: tuple) -> tuple:
    n = len(cycle)
    for p in range(1, n + 1):
        if n % p == 0 and cycle[:p] * (n // p) == cycle:
            return cycle[:p]
    return cycle


def up_canonical(prefix: Sequence, cycle: Sequence) -> Stream:
    """Primitive cycle, then fold the prefix tail into the cycle."""
    prefix, cycle = tuple(prefix), tuple(cycle)
    if not cycle:
        raise MalformedValue("ultimately periodic stream needs a nonempty cycle")
    cycle = primitive_root(cycle)
    while prefix and prefix[-1] == cycle[-1]:
        prefix = prefix[:-1]
        cycle = (cycle[-1],) + cycle[:-1]
    return Stream(prefix, cycle)


def least_rotation(xs: tuple) -> tuple:
    if not xs:
        return xs
    return min((xs[k:] + xs[:k] for k in range(len(xs))), key=lambda t: [atom_order(a) for a in t])


def tail_key(s: Stream) -> tuple:
    """Identifies streams whose tails eventually agree: the cycle up to phase."""
    return least_rotation(s.cycle)


def stream_zip(x: Stream, y: Stream) -> Stream:
    p = max(len(x.prefix), len(y.prefix))
    c = lcm(len(x.cycle), len(y.cycle))
    pairs = list(zip(x.take(p + c), y.take(p + c)))
    return up_canonical(pairs[:p], pairs[p:])


def stream_rel(r, x: Stream, y: Stream) -> bool:
    """Positionwise relatedness, checked over one joint period past both prefixes."""
    n = max(len(x.prefix), len(y.prefix)) + lcm(len(x.cycle), len(y.cycle))
    return all(p in r for p in zip(x.take(n), y.take(n)))


def show_stream(s: Stream, leaf=show_atom) -> str:
    pre = "".join(leaf(a) for a in s.prefix)
    cyc = "".join(leaf(a) for a in s.cycle)
    return f"{pre}({cyc})^w"


def stream_related(r, x: Stream, bound: int) -> list[Stream]:
    """Every stream of size at most ``bound`` related to x positionwise by r."""
    img: dict = {}
    for a, b in sorted(r, key=lambda p: (atom_order(p[0]), atom_order(p[1]))):
        img.setdefault(a, []).append(b)
    seen, out = set(), []
    for n in range(1, bound + 1):
        for cl in range(1, n + 1):
            pl = n - cl
            horizon = max(len(x.prefix), pl) + lcm(len(x.cycle), cl)
            opts = [img.get(x.at(k), []) for k in range(pl)]
            for j in range(cl):
                allowed = None
                for k in range(pl + j, horizon, cl):
                    here = img.get(x.at(k), [])
                    allowed = list(here) if allowed is None else [b for b in allowed if b in here]
                opts.append(allowed or [])
            for combo in itertools.product(*opts):
                y = up_canonical(combo[:pl], combo[pl:])
                if y not in seen:
                    seen.add(y)
                    out.append(y)
    return out


@lru_cache(maxsize=None)
def enumerate_streams(atoms: tuple, bound: int) -> list[Stream]:
    seen, out = set(), []
    for n in range(1, bound + 1):
        for c in range(1, n + 1):
            for pre in itertools.product(atoms, repeat=n - c):
                for cyc in itertools.product(atoms, repeat=c):
                    s = up_canonical(pre, cyc)
                    if s not in seen:
                        seen.add(s)
                        out.append(s)
    return out


class StreamF(FunctorSpec):
    """Finitely valued infinite sequences, modelled by ultimately periodic streams."""

    name = "upstream"
    arity = 1

    def leaves(self, x: Stream):
        return [(1, a) for a in x.prefix + x.cycle]

    def refill(self, x: Stream, atoms):
        atoms = list(atoms)
        k = len(x.prefix)
        return up_canonical(atoms[:k], atoms[k:])

    def size(self, x: Stream) -> int:
        return len(x.prefix) + len(x.cycle)

    def enumerate(self, us, bound):
        return enumerate_streams(atoms_of(us)[0], bound)

    def show(self, x, leaf=None):
        return show_stream(x, (lambda a: leaf(1, a)) if leaf else show_atom)

    def shape(self, x):
        return "stream"

    def zip(self, x, y):
        return stream_zip(x, y)

    def rel(self, rs, x, y):
        return stream_rel(rs[0], x, y)

    def related(self, rs, x, bound=None):
        return stream_related(rs[0], x, self.size(x) if bound is None else bound)


@dataclass(frozen=True)
class TL:
    """A possibly infinite list with a terminator: finite when ``cycle`` is None."""

    prefix: tuple
    cycle: tuple | None
    term: Any

    @property
    def finite(self) -> bool:
        return self.cycle is None

    def __repr__(self) -> str:
        return f"TL({self.prefix!r}, {self.cycle!r}, {self.term!r})"


def tl(prefix: Sequence, cycle: Sequence | None, term: Any) -> TL:
    if cycle is None:
        return TL(tuple(prefix), None, term)
    s = up_canonical(prefix, cycle)
    return TL(s.prefix, s.cycle, term)


class TLListF(FunctorSpec):
    """Lists that are finite or ultimately periodic, paired with a terminator (sort 2)."""

    name = "tllist_raw"
    arity = 2

    def leaves(self, x: TL):
        return [(1, a) for a in x.prefix + (x.cycle or ())] + [(2, x.term)]

    def refill(self, x: TL, atoms):
        atoms = list(atoms)
        *elems, term = atoms
        if x.cycle is None:
            return TL(tuple(elems), None, term)
        k = len(x.prefix)
        return tl(elems[:k], elems[k:], term)

    def size(self, x: TL) -> int:
        return len(x.prefix) + len(x.cycle or ())

    def enumerate(self, us, bound):
        a1, a2 = atoms_of(us)
        out = []
        for n in range(bound + 1):
            for xs in itertools.product(a1, repeat=n):
                out.extend(TL(xs, None, b) for b in a2)
        for s in enumerate_streams(a1, bound):
            out.extend(TL(s.prefix, s.cycle, b) for b in a2)
        return out

    def show(self, x, leaf=None):
        lf = leaf or (lambda s, a: show_atom(a))
        body = (("[" + ",".join(lf(1, a) for a in x.prefix) + "]") if x.finite
                else show_stream(Stream(x.prefix, x.cycle), lambda a: lf(1, a)))
        return f"<{body};{lf(2, x.term)}>"

    def shape(self, x):
        return ("fin", len(x.prefix)) if x.finite else ("inf",)

    def zip(self, x, y):
        if x.finite != y.finite:
            return None
        if x.finite:
            if len(x.prefix) != len(y.prefix):
                return None
            return TL(tuple(zip(x.prefix, y.prefix)), None, (x.term, y.term))
        s = stream_zip(Stream(x.prefix, x.cycle), Stream(y.prefix, y.cycle))
        return TL(s.prefix, s.cycle, (x.term, y.term))

    def rel(self, rs, x, y):
        if x.finite != y.finite or (x.term, y.term) not in rs[1]:
            return False
        if x.finite:
            return len(x.prefix) == len(y.prefix) and all(p in rs[0] for p in zip(x.prefix, y.prefix))
        return stream_rel(rs[0], Stream(x.prefix, x.cycle), Stream(y.prefix, y.cycle))

    def related(self, rs, x, bound=None):
        if x.finite:
            return super().related(rs, x)
        bound = self.size(x) if bound is None else bound
        img2 = sorted({b for a, b in rs[1] if a == x.term}, key=atom_order)
        return [TL(s.prefix, s.cycle, t) for s in stream_related(rs[0], Stream(x.prefix, x.cycle), bound)
                for t in img2]


STREAM = StreamF()
TLLIST_RAW = TLListF()
