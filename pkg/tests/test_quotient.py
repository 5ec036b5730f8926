import itertools

import pytest

from quotlab import regex as rx
from quotlab.atoms import all_relations, eq_rel
from quotlab.functors import LIST, SUM_AA, Inl, Inr, in_sets_by_map
from quotlab.gallery import FSET, QP, entry
from quotlab.laws import CheckConfig
from quotlab.quotient import (
    EquivSpec, QuotientRefused, QVal, class_meets, equality, q_abs, q_make, q_map, q_naive_rel, q_naive_set,
    q_in_sets_sim, q_rel, q_set,
)
from quotlab.streams import TL

a, b, c = 0, 1, 2


@pytest.fixture(scope="module")
def qs():
    cfg = CheckConfig()
    return {n: entry(n).construct(cfg) for n in ("fset", "dlist", "qp", "upair", "tllist-model", "re_acidz")}


def subsets(atoms):
    return [frozenset(s) for n in range(len(atoms) + 1) for s in itertools.combinations(atoms, n)]


def test_q_make_accepts_gallery_equivalences():
    assert q_make(LIST, FSET).raw is LIST
    assert q_make(SUM_AA, QP).equiv is QP


def test_q_make_refuses_atom_specific_relation():
    odd = EquivSpec("a~b only", decide=lambda x, y: x == y or {x, y} == {(a,), (b,)})
    with pytest.raises(QuotientRefused) as ei:
        q_make(LIST, odd)
    assert any(r.law == "equiv_naturality" and r.status == "fail" for r in ei.value.reports)


def test_q_abs(qs):
    assert q_abs(qs["fset"], (b, a, a)).rep == (a, b)
    assert q_abs(qs["upair"], (b, a)).rep == (a, b)
    Q = q_make(LIST, equality())
    assert q_abs(Q, (b, a)).rep == (b, a)
    assert q_abs(qs["fset"], (a, b)) == q_abs(qs["fset"], (b, b, a))


def test_q_map(qs):
    Q = qs["fset"]
    assert q_map(Q, [{a: c, b: c}], q_abs(Q, (a, b))).rep == (c,)
    assert q_map(Q, [lambda x: x], q_abs(Q, (b, a))) == q_abs(Q, (a, b))
    P = qs["qp"]
    for f in ({a: a, b: a}, {a: b, b: b}):
        assert q_map(P, [f], Inl(a)) == q_abs(P, Inl(b))


def test_q_set_examples(qs):
    P = qs["qp"]
    assert q_set(P, 1, Inl(a)) == set() and q_set(P, 1, Inr(a)) == {a}
    D = qs["dlist"]
    assert q_set(D, 1, (a, b, a)) == {a, b} == D.q_set_by_class(1, (a, b, a))
    Z = qs["re_acidz"]
    assert q_set(Z, 1, rx.Conc(rx.ZERO, rx.Atom(a))) == set()


def test_q_rel_examples(qs):
    P = qs["qp"]
    assert q_rel(P, [set()], Inl(a), Inl(b))
    for r in all_relations((a, b), (a, b)):
        assert not q_rel(P, [r], Inl(a), Inr(b))
    assert q_rel(P, [{(a, b)}], Inr(a), Inr(b))
    assert not q_rel(P, [set()], Inr(a), Inr(b))


def test_naive_liftings_are_negative_controls(qs):
    P, T = qs["qp"], qs["tllist-model"]
    assert q_naive_set(P, 1, Inl(a)) == {a} != q_set(P, 1, Inl(a))
    assert not q_naive_rel(P, [set()], Inl(a), Inl(b))
    inf = TL((), (a,), c)
    assert q_naive_set(T, 2, inf) == {c} and q_set(T, 2, inf) == set()


def test_naive_liftings_agree_on_set_respecting_quotients(qs):
    F, D = qs["fset"], qs["dlist"]
    vals = LIST.enumerate([(a, b)], 3)
    for x in vals:
        assert q_naive_set(F, 1, x) == q_set(F, 1, x)
    eq = eq_rel((a, b))
    for x, y in itertools.product(vals, repeat=2):
        assert q_naive_rel(F, [eq], x, y) == (q_abs(F, x) == q_abs(F, y))
    for r in all_relations((a, b), (a, b)):
        for x, y in itertools.product(vals, repeat=2):
            assert q_naive_rel(D, [r], x, y) == q_rel(D, [r], x, y)


def test_q_in_sets_sim_examples(qs):
    P = qs["qp"]
    assert q_in_sets_sim(P, [(a, b)], [set()], Inl(a))
    assert not q_in_sets_sim(P, [(a, b)], [set()], Inr(a))
    for x in LIST.enumerate([(a, b)], 2):
        assert q_in_sets_sim(qs["fset"], [(a, b)], [{a, b}], x)
    E = q_make(LIST, equality())
    for x in LIST.enumerate([(a, b)], 2):
        for s in subsets((a, b)):
            assert q_in_sets_sim(E, [(a, b)], [s], x) == in_sets_by_map(LIST, [(a, b)], [s], x)


@pytest.mark.parametrize("name", ["fset", "dlist", "qp", "upair"])
def test_sim_membership_is_class_meeting(qs, name):
    Q = qs[name]
    us = [(a, b)] * Q.arity
    for x in Q.raw.enumerate(us, 2):
        for aa in itertools.product(subsets((a, b)), repeat=Q.arity):
            sim = q_in_sets_sim(Q, us, aa, x)
            assert sim == class_meets(Q, us, aa, x)
            if sim and all(aa):
                # nonempty sets: some equivalent value already lives in F<A>
                members, _ = Q.class_members(x, us)
                assert any(all(s <= ai for s, ai in zip(Q.raw.sets(y), aa)) for y in members)


@pytest.mark.parametrize("name", ["fset", "dlist", "qp", "upair", "tllist-model"])
def test_setter_is_least_set_with_sim_membership(qs, name):
    """q_set equals the intersection of all A with [x] in [F<A>], computed through the mapper."""
    Q = qs[name]
    us = [(a, b)] * Q.arity
    for x in Q.raw.enumerate(us, 2):
        for i in range(Q.arity):
            hits = [aa[i] for aa in itertools.product(subsets((a, b)), repeat=Q.arity)
                    if q_in_sets_sim(Q, us, aa, x)]
            assert q_set(Q, i + 1, x) == frozenset.intersection(*hits)
            assert q_set(Q, i + 1, x) == Q.q_set_by_class(i + 1, x)


@pytest.mark.parametrize("name", ["qp", "tllist-model", "dlist"])
def test_representative_independence(qs, name):
    Q = qs[name]
    us = [(a, b)] * Q.arity
    vals = Q.raw.enumerate(us, 2)
    rels = list(itertools.product([frozenset(), eq_rel((a, b)), frozenset({(a, b)})], repeat=Q.arity))
    for x, y in itertools.product(vals, repeat=2):
        if not Q.eq(x, y):
            continue
        assert Q.sets(x) == Q.sets(y)
        for z in vals:
            for r in rels:
                assert Q.rel(r, x, z) == Q.rel(r, y, z)


def test_qval_equality():
    assert QVal((a, b), 1) == QVal((b, a), 1)
    assert QVal((a,), 1) != QVal((a,), 2)
