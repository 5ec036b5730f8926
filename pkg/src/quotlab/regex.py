"""Regular expressions as a functor over their atoms, ACI/ACIDZ rewriting,
Brzozowski derivatives and the derivative DFA construction.

Terms are tagged tuples so hashing and equality stay cheap:
``('Z',)`` Zero, ``('E',)`` Eps, ``('A', a)`` Atom, ``('+', r, s)`` Alt,
``('.', r, s)`` Conc, ``('*', r)`` Star.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

from .atoms import LETTERS, atom_order, atoms_of, show_atom
from .functors import FunctorSpec

ZERO = ("Z",)
EPS = ("E",)


def Atom(a) -> tuple:
    return ("A", a)


def Alt(r: tuple, s: tuple) -> tuple:
    return ("+", r, s)


def Conc(r: tuple, s: tuple) -> tuple:
    return (".", r, s)


def Star(r: tuple) -> tuple:
    return ("*", r)


_RANK = {"Z": 0, "E": 1, "A": 2, "+": 3, ".": 4, "*": 5}


@lru_cache(maxsize=None)
def rkey(r: tuple) -> tuple:
    """Structural total order: constructor tag first, then children left to right."""
    t = r[0]
    if t == "A":
        return (2, atom_order(r[1]))
    return (_RANK[t],) + tuple(rkey(c) for c in r[1:])


@lru_cache(maxsize=None)
def size(r: tuple) -> int:
    t = r[0]
    if t in "ZEA":
        return 1
    return 1 + sum(size(c) for c in r[1:])


def atoms(r: tuple) -> frozenset:
    out = []
    _collect(r, out)
    return frozenset(out)


def _collect(r, out):
    t = r[0]
    if t == "A":
        out.append(r[1])
    elif t in "+.*":
        for c in r[1:]:
            _collect(c, out)


def show(r: tuple, leaf=show_atom) -> str:
    """Concrete syntax: ``0``, ``e``, letters, ``|``, juxtaposition, postfix ``*``."""
    return _show(r, leaf, 0)


def _show(r, leaf, prec):
    t = r[0]
    if t == "Z":
        return "0"
    if t == "E":
        return "e"
    if t == "A":
        return leaf(r[1])
    if t == "+":
        s = _show(r[1], leaf, 0) + "|" + _show(r[2], leaf, 1)
        return f"({s})" if prec > 0 else s
    if t == ".":
        s = _show(r[1], leaf, 1) + _show(r[2], leaf, 2)
        return f"({s})" if prec > 1 else s
    return _show(r[1], leaf, 3) + "*"


# -- enumeration and the functor ----------------------------------------------

def enumerate_exact(alphabet: tuple, n: int, _memo: dict = {}) -> list:
    k = (alphabet, n)
    if k in _memo:
        return _memo[k]
    if n <= 0:
        out: list = []
    elif n == 1:
        out = [ZERO, EPS] + [Atom(a) for a in alphabet]
    else:
        out = []
        for m in range(1, n - 1):
            left, right = enumerate_exact(alphabet, m), enumerate_exact(alphabet, n - 1 - m)
            out.extend(Alt(r, s) for r in left for s in right)
        for m in range(1, n - 1):
            left, right = enumerate_exact(alphabet, m), enumerate_exact(alphabet, n - 1 - m)
            out.extend(Conc(r, s) for r in left for s in right)
        out.extend(Star(r) for r in enumerate_exact(alphabet, n - 1))
    _memo[k] = out
    return out


def enumerate_regex(alphabet: Sequence, bound: int) -> list:
    alphabet = tuple(alphabet)
    return [r for n in range(1, bound + 1) for r in enumerate_exact(alphabet, n)]


class RegexF(FunctorSpec):
    name = "re"
    arity = 1

    def leaves(self, x):
        return [(1, a) for a in _leaf_list(x)]

    def refill(self, x, new):
        it = iter(new)
        return _refill(x, it)

    def size(self, x):
        return size(x)

    def enumerate(self, us, bound):
        return enumerate_regex(atoms_of(us)[0], bound)

    def show(self, x, leaf=None):
        return show(x, (lambda a: leaf(1, a)) if leaf else show_atom)


@lru_cache(maxsize=None)
def _leaf_tuple(r):
    t = r[0]
    if t == "A":
        return (r[1],)
    if t in "ZE":
        return ()
    return tuple(itertools.chain.from_iterable(_leaf_tuple(c) for c in r[1:]))


def _leaf_list(r):
    return list(_leaf_tuple(r))


def _refill(r, it):
    t = r[0]
    if t == "A":
        return ("A", next(it))
    if t in "ZE":
        return r
    return (t,) + tuple(_refill(c, it) for c in r[1:])


RE = RegexF()


# -- language ------------------------------------------------------------------

@lru_cache(maxsize=None)
def nullable(r: tuple) -> bool:
    t = r[0]
    if t in "ZA":
        return False
    if t in "E*":
        return True
    if t == "+":
        return nullable(r[1]) or nullable(r[2])
    return nullable(r[1]) and nullable(r[2])


@lru_cache(maxsize=None)
def deriv(a, r: tuple) -> tuple:
    t = r[0]
    if t in "ZE":
        return ZERO
    if t == "A":
        return EPS if r[1] == a else ZERO
    if t == "+":
        return Alt(deriv(a, r[1]), deriv(a, r[2]))
    if t == ".":
        left = Conc(deriv(a, r[1]), r[2])
        return Alt(left, deriv(a, r[2])) if nullable(r[1]) else left
    return Conc(deriv(a, r[1]), r)


def match_oracle(r: tuple, w: Sequence) -> bool:
    """Membership by structural recursion over all split points."""
    w = tuple(w)

    @lru_cache(maxsize=None)
    def m(r, i, j):
        t = r[0]
        if t == "Z":
            return False
        if t == "E":
            return i == j
        if t == "A":
            return j == i + 1 and w[i] == r[1]
        if t == "+":
            return m(r[1], i, j) or m(r[2], i, j)
        if t == ".":
            return any(m(r[1], i, k) and m(r[2], k, j) for k in range(i, j + 1))
        if i == j:
            return True
        return any(m(r[1], i, k) and m(r, k, j) for k in range(i + 1, j + 1))

    return m(r, 0, len(w))


# -- ACI -----------------------------------------------------------------------

@lru_cache(maxsize=None)
def aci_canonical(r: tuple) -> tuple:
    """Flatten Alt spines, drop duplicates, sort structurally, nest to the right."""
    t = r[0]
    if t == "+":
        parts: dict = {}
        for p in _alt_parts(r):
            c = aci_canonical(p)
            for q in _alt_parts(c):
                parts[q] = None
        return _alt_chain(sorted(parts, key=rkey))
    if t == ".":
        return Conc(aci_canonical(r[1]), aci_canonical(r[2]))
    if t == "*":
        return Star(aci_canonical(r[1]))
    return r


@lru_cache(maxsize=None)
def aci_simplify(r: tuple) -> tuple:
    """ACI canonical form after the unit laws for Zero and Eps.

    Used for DFA states only: the unit laws preserve the language and are
    what collapses e.g. the derivatives of ``(a|b)*`` to a single state.
    """
    t = r[0]
    if t == "+":
        parts: dict = {}
        for p in _alt_parts(r):
            for q in _alt_parts(aci_simplify(p)):
                if q != ZERO:
                    parts[q] = None
        return _alt_chain(sorted(parts, key=rkey)) if parts else ZERO
    if t == ".":
        a, b = aci_simplify(r[1]), aci_simplify(r[2])
        if ZERO in (a, b):
            return ZERO
        if a == EPS:
            return b
        if b == EPS:
            return a
        return Conc(a, b)
    if t == "*":
        a = aci_simplify(r[1])
        if a in (ZERO, EPS):
            return EPS
        return a if a[0] == "*" else Star(a)
    return r


def _alt_parts(r):
    if r[0] == "+":
        return _alt_parts(r[1]) + _alt_parts(r[2])
    return [r]


def _alt_chain(parts):
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = Alt(p, out)
    return out


def _top_aci(r):
    out = {r, Alt(r, r)}
    if r[0] == "+":
        a, b = r[1], r[2]
        out.add(Alt(b, a))
        if a[0] == "+":
            out.add(Alt(a[1], Alt(a[2], b)))
        if b[0] == "+":
            out.add(Alt(Alt(a, b[1]), b[2]))
    return out


@lru_cache(maxsize=None)
def aci_step(r: tuple) -> frozenset:
    """One step of the ACI rewrite relation (reflexive, full congruence)."""
    out = _top_aci(r)
    t = r[0]
    if t in "+.":
        for x in aci_step(r[1]):
            for y in aci_step(r[2]):
                out.add((t, x, y))
    elif t == "*":
        out.update(Star(x) for x in aci_step(r[1]))
    return frozenset(out)


def aci_generators(r: tuple) -> set:
    """Single generator instances of ~aci at one position, both directions."""
    return _single_position(r, _aci_gen_top, congr="+.*")


def _aci_gen_top(r):
    out = set()
    if r[0] == "+":
        a, b = r[1], r[2]
        out.add(Alt(b, a))
        if a[0] == "+":
            out.add(Alt(a[1], Alt(a[2], b)))
        if b[0] == "+":
            out.add(Alt(Alt(a, b[1]), b[2]))
        if a == b:
            out.add(a)
    out.add(Alt(r, r))
    return out


def _single_position(r, top, congr: str, conc_right: bool = True):
    out = set(top(r))
    t = r[0]
    if t == "+" and "+" in congr:
        out.update(Alt(x, r[2]) for x in _single_position(r[1], top, congr, conc_right))
        out.update(Alt(r[1], y) for y in _single_position(r[2], top, congr, conc_right))
    elif t == "." and "." in congr:
        out.update(Conc(x, r[2]) for x in _single_position(r[1], top, congr, conc_right))
        if conc_right:
            out.update(Conc(r[1], y) for y in _single_position(r[2], top, congr, conc_right))
    elif t == "*" and "*" in congr:
        out.update(Star(x) for x in _single_position(r[1], top, congr, conc_right))
    out.discard(r)
    return out


# -- ACIDZ ---------------------------------------------------------------------

@lru_cache(maxsize=None)
def elim_zeros(r: tuple) -> tuple:
    t = r[0]
    if t == "+":
        r2, s2 = elim_zeros(r[1]), elim_zeros(r[2])
        if r2 == ZERO:
            return s2
        if s2 == ZERO:
            return r2
        return Alt(r2, s2)
    if t == ".":
        r2 = elim_zeros(r[1])
        return ZERO if r2 == ZERO else Conc(r2, r[2])
    return r


@lru_cache(maxsize=None)
def distribute(t: tuple, r: tuple) -> tuple:
    if r[0] == "+":
        return Alt(distribute(t, r[1]), distribute(t, r[2]))
    if r[0] == ".":
        return Conc(distribute(t, r[1]), r[2])
    return Conc(r, t)


@lru_cache(maxsize=None)
def acidz_step(r: tuple) -> frozenset:
    """One step of the ACIDZ rewrite relation.

    Congruence only under Alt (both sides at once) and the left of Conc;
    nothing is rewritten under Star. Every successor may be followed by
    elim_zeros.
    """
    out = _top_aci(r)
    t = r[0]
    if t == "+":
        for x in acidz_step(r[1]):
            for y in acidz_step(r[2]):
                out.add(Alt(x, y))
    elif t == ".":
        out.add(distribute(r[2], r[1]))
        out.update(Conc(x, r[2]) for x in acidz_step(r[1]))
    out.update([elim_zeros(s) for s in out])
    return frozenset(out)


def acidz_generators(r: tuple) -> set:
    """Single generator instances of ~acidz at one allowed position, both directions."""
    return _single_position(r, _acidz_gen_top, congr="+.", conc_right=False)


def _acidz_gen_top(r):
    out = _aci_gen_top(r)
    t = r[0]
    if t == "." and r[1] == ZERO:
        out.add(ZERO)
    if t == "+" and r[1] == ZERO:
        out.add(r[2])
    out.add(Alt(ZERO, r))
    if t == "." and r[1][0] == "+":
        a, b, c = r[1][1], r[1][2], r[2]
        out.add(Alt(Conc(a, c), Conc(b, c)))
    if t == "+" and r[1][0] == "." and r[2][0] == "." and r[1][2] == r[2][2]:
        out.add(Conc(Alt(r[1][1], r[2][1]), r[1][2]))
    return out


@lru_cache(maxsize=None)
def _monomials(r: tuple) -> frozenset:
    """Sum-of-monomials invariant of ACIDZ steps.

    A monomial is a head (Eps, Atom or Star, compared syntactically) with the
    multiset of right Conc arguments stacked on it.
    """
    t = r[0]
    if t == "Z":
        return frozenset()
    if t == "+":
        return _monomials(r[1]) | _monomials(r[2])
    if t == ".":
        return frozenset((h, tuple(sorted(m + (r[2],), key=rkey))) for h, m in _monomials(r[1]))
    return frozenset({(r, ())})


@lru_cache(maxsize=None)
def acidz_normal(r: tuple) -> tuple:
    """Canonical representative: an equal-invariant term every ACIDZ step preserves."""
    monos = []
    for h, m in _monomials(r):
        term = h
        for s in m:
            term = Conc(term, s)
        monos.append(term)
    if not monos:
        return ZERO
    return _alt_chain(sorted(monos, key=rkey))


# -- DFA -----------------------------------------------------------------------

class StateLimitExceeded(Exception):
    def __init__(self, limit: int):
        super().__init__(f"derivative exploration exceeded {limit} states")
        self.limit = limit


@dataclass
class Dfa:
    alphabet: tuple
    start: tuple
    states: list
    delta: dict
    accepting: frozenset = field(default_factory=frozenset)

    def accepts(self, w: Iterable) -> bool:
        q = self.start
        for a in w:
            q = self.delta[(q, a)]
        return q in self.accepting

    def __len__(self) -> int:
        return len(self.states)


def build_dfa(r: tuple, alphabet: Sequence, state_limit: int = 64) -> Dfa:
    if state_limit < 1:
        raise ValueError("state_limit must be >= 1")
    alphabet = tuple(alphabet)
    start = aci_simplify(r)
    states, delta, todo = [start], {}, [start]
    seen = {start}
    while todo:
        q = todo.pop(0)
        for a in alphabet:
            p = aci_simplify(deriv(a, q))
            delta[(q, a)] = p
            if p not in seen:
                if len(seen) >= state_limit:
                    raise StateLimitExceeded(state_limit)
                seen.add(p)
                states.append(p)
                todo.append(p)
    return Dfa(alphabet, start, states, delta, frozenset(q for q in states if nullable(q)))


def to_dot(d: Dfa) -> str:
    order = sorted(d.states, key=rkey)
    name = {q: f"q{k}" for k, q in enumerate(order)}
    lines = ["digraph dfa {", "  rankdir=LR;", "  init [shape=point];"]
    for q in order:
        shape = "doublecircle" if q in d.accepting else "circle"
        label = show(q).replace("\\", "\\\\").replace('"', '\\"')
        lines.append(f'  {name[q]} [shape={shape}, label="{label}"];')
    lines.append(f"  init -> {name[d.start]};")
    for q in order:
        for a in d.alphabet:
            lines.append(f'  {name[q]} -> {name[d.delta[(q, a)]]} [label="{show_atom(a)}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


# -- parsing -------------------------------------------------------------------

class RegexSyntaxError(ValueError):
    pass


def letter_atom(ch: str) -> int:
    if ch == "e" or ch not in LETTERS:
        raise RegexSyntaxError(f"not an atom letter: {ch!r}")
    return LETTERS.index(ch)


def parse(text: str) -> tuple:
    """Parse ``0``, ``e``, letters, ``|``, juxtaposition, ``*`` and parentheses."""
    toks = [c for c in text if not c.isspace()]
    pos = 0

    def peek():
        return toks[pos] if pos < len(toks) else None

    def alt():
        nonlocal pos
        r = conc()
        while peek() == "|":
            pos += 1
            r = Alt(r, conc())
        return r

    def conc():
        r = star()
        while peek() is not None and peek() not in "|)":
            r = Conc(r, star())
        return r

    def star():
        nonlocal pos
        r = base()
        while peek() == "*":
            pos += 1
            r = Star(r)
        return r

    def base():
        nonlocal pos
        c = peek()
        if c is None:
            raise RegexSyntaxError("unexpected end of pattern")
        pos += 1
        if c == "(":
            r = alt()
            if peek() != ")":
                raise RegexSyntaxError(f"expected ')' at position {pos}")
            pos += 1
            return r
        if c == "0":
            return ZERO
        if c == "e":
            return EPS
        if c in LETTERS:
            return Atom(letter_atom(c))
        raise RegexSyntaxError(f"unexpected {c!r} at position {pos - 1}")

    r = alt()
    if pos != len(toks):
        raise RegexSyntaxError(f"unexpected {toks[pos]!r} at position {pos}")
    return r


# named larger patterns for the acceptance sweep
NAMED_PATTERNS = {
    "any": "(a|b)*",
    "ends_ab": "(a|b)*ab",
    "even_a": "(b*ab*a)*b*",
    "no_bb": "(a|ba)*(b|e)",
    "third_last_a": "(a|b)*a(a|b)(a|b)",
    "ab_star_star": "((ab)*|(ba)*)*",
    "nested_alt": "((a|b)(a|e))*b",
    "zero_mix": "(0|a)(b|0*)a*",
    "eps_heavy": "(e|a)(e|b)*(ab|e)",
    "star_conc": "(a*b*)*a(b|aa)*",
}
