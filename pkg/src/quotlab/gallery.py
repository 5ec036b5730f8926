"""The example quotients, each bundled with its rewrite system, witnesses and
the checker outcomes it is expected to produce."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

from . import regex as rx
from .atoms import atom_order
from .confluence import RewriteSystem
from .functors import LIST, NONE, PROD_AA, SUM_AA, FunctorSpec, Inl, Inr
from .laws import CheckConfig
from .quotient import EquivSpec, equality, q_make
from .streams import STREAM, TL, TLLIST_RAW, Stream, least_rotation
from .witnesses import SubtypePred, Witness, st_partial_quotient


# -- list equivalences -----------------------------------------------------------

def sorted_atoms(xs) -> tuple:
    return tuple(sorted(set(xs), key=atom_order))


def remdups_last(xs) -> tuple:
    """Keep only the last occurrence of every element."""
    xs = tuple(xs)
    return tuple(x for k, x in enumerate(xs) if x not in xs[k + 1:])


def cyclist_canonical(xs) -> tuple:
    return least_rotation(tuple(xs))


@lru_cache(maxsize=None)
def fim_key(w: tuple):
    """Invariant of the free idempotent monoid: content, the longest prefix
    missing one letter with the letter after it, and dually for suffixes."""
    if not w:
        return ()
    content = set(w)
    n = len(content)
    seen: set = set()
    k = 0
    while True:
        seen.add(w[k])
        if len(seen) == n:
            break
        k += 1
    pre, nxt = w[:k], w[k]
    seen = set()
    k = len(w) - 1
    while True:
        seen.add(w[k])
        if len(seen) == n:
            break
        k -= 1
    suf, prv = w[k + 1:], w[k]
    return (tuple(sorted(content, key=atom_order)), fim_key(pre), nxt, prv, fim_key(suf))


def fim_decide(u, v) -> bool:
    return fim_key(tuple(u)) == fim_key(tuple(v))


# -- list rewrite steps ----------------------------------------------------------

def swap_dup_step(xs):
    xs = tuple(xs)
    out = set()
    for k in range(len(xs) - 1):
        out.add(xs[:k] + (xs[k + 1], xs[k]) + xs[k + 2:])
    for k in range(len(xs)):
        out.add(xs[:k + 1] + (xs[k],) + xs[k + 1:])
    return out


def fset_generators(xs):
    xs = tuple(xs)
    out = swap_dup_step(xs)
    for k in range(len(xs) - 1):
        if xs[k] == xs[k + 1]:
            out.add(xs[:k] + xs[k + 1:])
    out.discard(xs)
    return out


def dlist_insert_step(xs):
    """Put a copy of an element anywhere before one of its occurrences."""
    xs = tuple(xs)
    out = set()
    for j, x in enumerate(xs):
        for p in range(j + 1):
            out.add(xs[:p] + (x,) + xs[p:])
    return out


def dlist_remove_step(xs):
    """Drop an occurrence that appears again later."""
    xs = tuple(xs)
    return {xs[:k] + xs[k + 1:] for k, x in enumerate(xs) if x in xs[k + 1:]}


def dlist_generators(xs):
    return (dlist_insert_step(xs) | dlist_remove_step(xs)) - {tuple(xs)}


def rotate_step(xs):
    xs = tuple(xs)
    return {xs[1:] + xs[:1]} if xs else {xs}


def rotate_generators(xs):
    xs = tuple(xs)
    return {xs[1:] + xs[:1], xs[-1:] + xs[:-1]} - {xs} if xs else set()


def fim_step(xs):
    """Duplicate a nonempty factor."""
    xs = tuple(xs)
    return {xs[:i] + xs[i:j] + xs[i:j] + xs[j:] for i in range(len(xs)) for j in range(i + 1, len(xs) + 1)}


def fim_unstep(xs):
    """Remove one half of a square factor."""
    xs = tuple(xs)
    out = set()
    for i in range(len(xs)):
        for m in range(1, (len(xs) - i) // 2 + 1):
            if xs[i:i + m] == xs[i + m:i + 2 * m]:
                out.add(xs[:i] + xs[i + m:])
    return out


def fim_generators(xs):
    return (fim_step(xs) | fim_unstep(xs)) - {tuple(xs)}


def fim_closure_classes(alphabet, max_len: int) -> dict:
    """Connected components of the square-duplication relation on all words
    up to ``max_len``; the independent oracle for fim_decide."""
    words = [w for n in range(max_len + 1) for w in itertools.product(alphabet, repeat=n)]
    parent = {w: w for w in words}

    def find(w):
        while parent[w] != w:
            parent[w] = parent[parent[w]]
            w = parent[w]
        return w

    for w in words:
        for v in fim_unstep(w):
            a, b = find(w), find(v)
            if a != b:
                parent[a] = b
    return {w: find(w) for w in words}


# -- streams ---------------------------------------------------------------------

def fae_key(s: Stream) -> tuple:
    """The cycle aligned to absolute positions: equal iff the streams agree from some index on."""
    c, p = s.cycle, len(s.prefix)
    k = (-p) % len(c)
    return c[k:] + c[:k]


def fae_normal(s: Stream) -> Stream:
    return Stream((), fae_key(s))


def fae_positionwise(x: Stream, y: Stream) -> bool:
    """Independent oracle: compare positions past both prefixes for two joint periods."""
    from math import lcm
    p = max(len(x.prefix), len(y.prefix))
    n = lcm(len(x.cycle), len(y.cycle))
    return all(x.at(k) == y.at(k) for k in range(p, p + 2 * n))


def tllist_class(x: TL, us) -> list:
    if x.finite:
        return [x]
    return [TL(x.prefix, x.cycle, t) for t in us[1]]


def tllist_key(x: TL):
    if x.finite:
        return ("fin", x.prefix, x.term)
    return ("inf", x.prefix, x.cycle)


# -- qp --------------------------------------------------------------------------

def qp_key(x):
    return ("Inl",) if isinstance(x, Inl) else ("Inr", x.v)


def qp_class(x, us) -> list:
    return [Inl(a) for a in us[0]] if isinstance(x, Inl) else [x]


def qp_to_option(x):
    return NONE if isinstance(x, Inl) else Inr(x.v)


# -- entries ---------------------------------------------------------------------

@dataclass
class GalleryEntry:
    name: str
    raw: FunctorSpec
    equiv: EquivSpec
    build: Callable = None               # cfg -> QuotientSpec (or the restricted functor)
    rewrite: RewriteSystem | None = None
    orientations: dict = field(default_factory=dict)
    generators: Callable | None = None
    expected: dict = field(default_factory=dict)
    witnesses: list = field(default_factory=list)
    cert_bound: int | None = None
    is_quotient: bool = True
    notes: str = ""

    def expect(self, law: str) -> str:
        return self.expected.get(law, "pass")

    def construct(self, cfg: CheckConfig | None = None):
        cfg = cfg or CheckConfig()
        if self.build is not None:
            return self.build(cfg)
        return q_make(self.raw, self.equiv, cfg, name=self.name)

    def system(self, orientation: str | None = None) -> RewriteSystem | None:
        if orientation is None:
            return self.rewrite
        return self.orientations.get(orientation)


def _list_rw(name, step, mode="strong"):
    return RewriteSystem(name, step, size=len, mode=mode)


DUP = SubtypePred("has_duplicate", lambda xs: len(set(xs)) < len(xs))
FINITE_RANGE = SubtypePred("finite_range", lambda s: True)


def _dup_subtype(cfg):
    from .witnesses import RestrictedF
    return RestrictedF(LIST, DUP)


def _fae(cfg):
    return st_partial_quotient(STREAM, FINITE_RANGE, FAE, cfg, name="fae-model")


UPAIR = EquivSpec("upair", key=lambda p: tuple(sorted(p, key=atom_order)),
                  normalizer=lambda p: tuple(sorted(p, key=atom_order)), size_preserving=True,
                  class_enum=lambda p, us: sorted({p, (p[1], p[0])}, key=repr))
FSET = EquivSpec("fset", key=sorted_atoms, normalizer=sorted_atoms)
DLIST = EquivSpec("dlist", key=remdups_last, normalizer=remdups_last)
CYCLIST = EquivSpec("cyclist", key=cyclist_canonical, normalizer=cyclist_canonical, size_preserving=True,
                    class_enum=lambda xs, us: sorted({tuple(xs[k:]) + tuple(xs[:k]) for k in range(max(len(xs), 1))}))
FIM = EquivSpec("fim", key=lambda w: fim_key(tuple(w)))
QP = EquivSpec("qp", key=qp_key, size_preserving=True, class_enum=qp_class)
TLLIST = EquivSpec("tllist", key=tllist_key, size_preserving=True, class_enum=tllist_class)
FAE = EquivSpec("fae", key=fae_key, normalizer=fae_normal)
RE_ACI = EquivSpec("re_aci", key=rx.aci_canonical, normalizer=rx.aci_canonical)
RE_ACIDZ = EquivSpec("re_acidz", key=rx.acidz_normal, normalizer=rx.acidz_normal)
DUP_EQ = equality("eq")
DUP_SET = EquivSpec("same_set_with_dup", decide=lambda x, y: DUP(x) and DUP(y) and set(x) == set(y))


def _tl_witnesses():
    return [
        Witness("tlnil", {2}, lambda args, us: TL((), None, args[0])),
        Witness("tlconst", {1}, lambda args, us: TL((), (args[0],), us[1][0])),
    ]


def _entries() -> list[GalleryEntry]:
    re_size = lambda r: rx.size(r)
    return [
        GalleryEntry("upair", PROD_AA, UPAIR, generators=lambda p: {(p[1], p[0])},
                     notes="unordered pairs: (a,b) ~ (b,a); classes have at most two members"),
        GalleryEntry("fset", LIST, FSET, rewrite=_list_rw("swap_dup", swap_dup_step), generators=fset_generators,
                     witnesses=[Witness("nil", set(), lambda args, us: ())],
                     notes="finite sets as lists up to order and multiplicity"),
        GalleryEntry("dlist", LIST, DLIST, rewrite=_list_rw("dlist_insert", dlist_insert_step),
                     orientations={"removing": _list_rw("dlist_remove", dlist_remove_step)},
                     generators=dlist_generators, expected={"theorem4:removing": "fail"},
                     witnesses=[Witness("nil", set(), lambda args, us: ()),
                                Witness("single", {1}, lambda args, us: (args[0],))],
                     notes="distinct lists; remdups keeps the last occurrence"),
        GalleryEntry("cyclist", LIST, CYCLIST, rewrite=_list_rw("rotate", rotate_step), generators=rotate_generators,
                     notes="cyclic lists: rotations identified"),
        GalleryEntry("fim", LIST, FIM, rewrite=_list_rw("fim_dup", fim_step),
                     generators=fim_generators, notes="free idempotent monoid: xs@ys@ys@zs ~ xs@ys@zs"),
        GalleryEntry("qp", SUM_AA, QP, expected={"set_respect": "fail"},
                     witnesses=[Witness("inr", {1}, lambda args, us: Inr(args[0]))],
                     notes="a+a with every Inl value identified; isomorphic to the option functor"),
        GalleryEntry("tllist-model", TLLIST_RAW, TLLIST, expected={"set_respect": "fail"},
                     witnesses=_tl_witnesses(),
                     notes="terminated lists: the terminator of an infinite list is irrelevant"),
        GalleryEntry("fae-model", STREAM, FAE, build=_fae, expected={"set_respect": "fail"},
                     notes="ultimately periodic streams equal from some index on"),
        GalleryEntry("dup-subtype", LIST, DUP_EQ, build=_dup_subtype, is_quotient=False,
                     expected={"rel_comp": "fail", "subdistributivity": "fail"},
                     notes="lists containing some element twice, with the inherited relator"),
        GalleryEntry("re_aci", rx.RE, RE_ACI, rewrite=RewriteSystem("aci", rx.aci_step, size=re_size),
                     generators=rx.aci_generators, cert_bound=4,
                     notes="regular expressions modulo associativity, commutativity and idempotence of Alt"),
        GalleryEntry("re_acidz", rx.RE, RE_ACIDZ, rewrite=RewriteSystem("acidz", rx.acidz_step, size=re_size),
                     generators=rx.acidz_generators, cert_bound=4, expected={"set_respect": "fail"},
                     notes="ACI plus distributivity and Zero laws, never under Star"),
    ]


_GALLERY: dict | None = None


def gallery() -> dict[str, GalleryEntry]:
    global _GALLERY
    if _GALLERY is None:
        _GALLERY = {e.name: e for e in _entries()}
    return _GALLERY


def entry(name: str) -> GalleryEntry:
    g = gallery()
    if name not in g:
        raise KeyError(name)
    return g[name]


def checked_functor(e: GalleryEntry, cfg: CheckConfig | None = None) -> FunctorSpec:
    """The functor the conditions are checked on: the raw one, or the restriction."""
    if e.name == "dup-subtype":
        return _dup_subtype(cfg)
    return e.raw
