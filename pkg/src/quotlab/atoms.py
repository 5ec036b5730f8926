"""Atom universes, the option extension 1+a, and finite functions/relations.

Atoms are small non-negative integers (or tuples of them for pair universes).
The fresh atom of an option universe is ``STAR = -1``; the embedding is the
identity on tokens, which keeps it injective and disjoint from ``STAR``.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Any, Callable, Hashable, Iterable, Iterator, Mapping, Sequence

Atom = Hashable
STAR = -1
LETTERS = "abcdefghijklmnopqrstuvwxyz"


class ResourceLimit(Exception):
    """A bounded search refused to run (or stopped) at an explicit limit."""

    def __init__(self, what: str, limit: int, needed: int | None = None):
        self.what = what
        self.limit = limit
        self.needed = needed
        msg = f"{what}: limit {limit}"
        if needed is not None:
            msg += f", needed {needed}"
        super().__init__(msg)


class MalformedValue(ValueError):
    pass


class SortError(ValueError):
    pass


@dataclass(frozen=True)
class Universe:
    sort: int
    atoms: tuple

    def __post_init__(self) -> None:
        if self.sort < 1:
            raise SortError(f"sort index must be >= 1, got {self.sort}")
        if len(set(self.atoms)) != len(self.atoms):
            raise ValueError("universe atoms must be distinct")

    def __len__(self) -> int:
        return len(self.atoms)

    def __iter__(self) -> Iterator:
        return iter(self.atoms)

    def __contains__(self, a: object) -> bool:
        return a in self.atoms

    def opt(self) -> "OptUniverse":
        return OptUniverse(self)


@dataclass(frozen=True)
class OptUniverse:
    """The universe extended by one fresh atom, with its embedding."""

    base: Universe
    star: Any = STAR

    def __post_init__(self) -> None:
        if self.star in self.base.atoms:
            raise ValueError("fresh atom already in the base universe")

    @property
    def sort(self) -> int:
        return self.base.sort

    @property
    def atoms(self) -> tuple:
        return self.base.atoms + (self.star,)

    def embed(self, a: Atom) -> Atom:
        if a not in self.base.atoms:
            raise MalformedValue(f"atom {a!r} not in base universe")
        return a

    def __len__(self) -> int:
        return len(self.base) + 1

    def __iter__(self) -> Iterator:
        return iter(self.atoms)


def universe(sort: int, n: int) -> Universe:
    """Universe of ``n`` atoms ``0..n-1`` for the given sort."""
    return Universe(sort, tuple(range(n)))


def universes(*sizes: int) -> tuple[Universe, ...]:
    return tuple(universe(i + 1, n) for i, n in enumerate(sizes))


def atoms_of(us: Sequence) -> tuple[tuple, ...]:
    """Normalize a per-sort sequence of universes (or plain tuples) to atom tuples."""
    out = []
    for u in us:
        out.append(tuple(u.atoms) if hasattr(u, "atoms") else tuple(u))
    return tuple(out)


def opt_atoms(us: Sequence) -> tuple[tuple, ...]:
    return tuple(a + (STAR,) if STAR not in a else a for a in atoms_of(us))


def pair_atoms(left: Sequence, right: Sequence) -> tuple[tuple, ...]:
    """Sort-wise product universes, used for witnesses of the relator."""
    return tuple(tuple(itertools.product(l, r)) for l, r in zip(atoms_of(left), atoms_of(right)))


# -- functions -------------------------------------------------------------

def as_fn(f: Callable | Mapping) -> Callable:
    if isinstance(f, Mapping):
        return f.__getitem__
    return f


def identity(a: Atom) -> Atom:
    return a


def fst(p: tuple) -> Atom:
    return p[0]


def snd(p: tuple) -> Atom:
    return p[1]


def all_functions(src: Sequence, dst: Sequence) -> list[dict]:
    """Every total function ``src -> dst`` as a dict, in a fixed order."""
    src = tuple(src)
    return [dict(zip(src, img)) for img in itertools.product(tuple(dst), repeat=len(src))]


def count_functions(src: Sequence, dst: Sequence) -> int:
    return len(tuple(dst)) ** len(tuple(src))


def all_bijections(atoms: Sequence) -> list[dict]:
    atoms = tuple(atoms)
    return [dict(zip(atoms, p)) for p in itertools.permutations(atoms)]


# -- relations -------------------------------------------------------------

def all_relations(left: Sequence, right: Sequence) -> list[frozenset]:
    pairs = list(itertools.product(tuple(left), tuple(right)))
    out = []
    for mask in range(1 << len(pairs)):
        out.append(frozenset(p for k, p in enumerate(pairs) if mask >> k & 1))
    return out


def sample_relations(left: Sequence, right: Sequence, n: int, rng: random.Random) -> list[frozenset]:
    pairs = list(itertools.product(tuple(left), tuple(right)))
    return [frozenset(p for p in pairs if rng.random() < 0.5) for _ in range(n)]


def compose_rel(r: Iterable, s: Iterable) -> frozenset:
    s = tuple(s)
    return frozenset((a, c) for a, b in r for b2, c in s if b == b2)


def converse(r: Iterable) -> frozenset:
    return frozenset((b, a) for a, b in r)


def eq_rel(atoms: Sequence) -> frozenset:
    return frozenset((a, a) for a in atoms)


def with_star(r: Iterable) -> frozenset:
    return frozenset(r) | {(STAR, STAR)}


# -- display ---------------------------------------------------------------

def show_atom(a: Atom, style: str = "letter") -> str:
    if a == STAR:
        return "*"
    if isinstance(a, tuple):
        return f"({show_atom(a[0], 'number')},{show_atom(a[1], 'letter')})"
    if isinstance(a, int):
        if style == "number":
            return str(a + 1)
        return LETTERS[a] if a < len(LETTERS) else f"x{a}"
    return repr(a)


def show_set(s: Iterable) -> str:
    return "{" + ",".join(show_atom(a) for a in sorted(s, key=atom_order)) + "}"


def atom_order(a: Atom) -> tuple:
    """Total order across plain, starred and pair atoms."""
    if isinstance(a, tuple):
        return (1,) + tuple(atom_order(c) for c in a)
    return (0, a)
