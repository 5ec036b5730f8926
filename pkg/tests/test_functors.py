import itertools

import pytest

from quotlab.atoms import (
    STAR, MalformedValue, OptUniverse, ResourceLimit, SortError, all_relations, eq_rel, universe,
)
from quotlab.functors import (
    LIST, OPTION, PROD, SUM, SUM_AA, Inl, Inr, compose, in_sets, in_sets_by_map, rel, rel_by_witness,
)
from quotlab.laws import CheckConfig, laws_bnf

a, b, c, d = 0, 1, 2, 3


def test_map_list():
    assert LIST.map([lambda x: x], (a, b)) == (a, b)
    assert LIST.map([{a: c, b: d}], (a, b)) == (c, d)


def test_map_comp_exhaustive():
    f, g = {a: b, b: b}, {a: b, b: a}
    for x in LIST.enumerate([(a, b)], 3):
        assert LIST.map([g], LIST.map([f], x)) == LIST.map([{k: g[v] for k, v in f.items()}], x)


def test_map_rejects_atom_outside_domain():
    with pytest.raises(MalformedValue):
        LIST.map([{a: b}], (c,))
    with pytest.raises(SortError):
        LIST.map([{a: a}, {a: a}], (a,))


def test_set():
    assert LIST.set(1, (a, b, a)) == {a, b}
    assert PROD.set(1, (a, b)) == {a} and PROD.set(2, (a, b)) == {b}
    with pytest.raises(SortError):
        LIST.set(2, (a,))


def test_in_sets_examples():
    assert in_sets(LIST, [{a}], (a, a))
    assert not in_sets(LIST, [{a}], (a, b))


def test_in_sets_by_map_raw_sum():
    # the embedding and the constant-star map disagree on Inl a
    assert not in_sets_by_map(SUM_AA, [(a, b)], [set()], Inl(a))
    assert in_sets_by_map(SUM_AA, [(a, b)], [{a, b}], Inl(a))


@pytest.mark.parametrize("F", [LIST, SUM, PROD, OPTION], ids=lambda F: F.name)
def test_in_sets_agrees_with_mapper_characterization(F):
    us = [(a, b)] * F.arity
    subsets = [frozenset(s) for n in range(3) for s in itertools.combinations((a, b), n)]
    for x in F.enumerate(us, 3):
        for aa in itertools.product(subsets, repeat=F.arity):
            assert in_sets(F, aa, x) == in_sets_by_map(F, us, aa, x)


def test_in_sets_by_map_resource_limit():
    with pytest.raises(ResourceLimit):
        in_sets_by_map(LIST, [tuple(range(5))], [{0}], (0,), limit=1000)


def test_rel_examples():
    r = {(a, c)}
    assert rel(LIST, [r], (a, a), (c, c))
    assert not rel(LIST, [r], (a,), (c, c))
    eq = eq_rel((a, b))
    for x, y in itertools.product(LIST.enumerate([(a, b)], 2), repeat=2):
        assert rel(LIST, [eq], x, y) == (x == y)


@pytest.mark.parametrize("F", [LIST, SUM, PROD, OPTION], ids=lambda F: F.name)
def test_rel_fast_path_agrees_with_witness_search(F):
    us = [(a, b)] * F.arity
    vals = F.enumerate(us, 2)
    for rs in itertools.product(all_relations((a, b), (a, b)), repeat=F.arity):
        for x, y in itertools.product(vals, repeat=2):
            assert rel(F, rs, x, y) == rel_by_witness(F, rs, x, y)


def test_enumerate_counts():
    vals = LIST.enumerate([(a, b)], 2)
    assert vals == [(), (a,), (b,), (a, a), (a, b), (b, a), (b, b)]
    assert PROD.enumerate([(a,), (b,)], 5) == [(a, b)]
    assert SUM_AA.enumerate([(a,)], 1) == [Inl(a), Inr(a)]
    for n in range(4):
        vs = LIST.enumerate([(a, b)], n)
        assert len(vs) == len(set(vs)) == sum(2 ** k for k in range(n + 1))


def test_compose():
    LL = compose(LIST, [LIST])
    assert LL.map([{a: c, b: d}], ((a,), (b,))) == ((c,), (d,))
    assert compose(OPTION, [PROD]).arity == 2
    with pytest.raises(SortError):
        compose(PROD, [LIST])


def test_compose_list_sum_laws():
    reps = laws_bnf(compose(LIST, [SUM]), CheckConfig())
    assert {r.law: r.status for r in reps} == dict.fromkeys(
        ["map_id", "map_comp", "set_map", "map_cong", "in_rel", "rel_comp", "set_bd"], "pass")


def test_set_bd_is_marked_substituted():
    rep = [r for r in laws_bnf(LIST, CheckConfig()) if r.law == "set_bd"][0]
    assert any("substituted-axiom" in n for n in rep.notes)


def test_universes():
    u = universe(1, 2)
    o = OptUniverse(u)
    assert len(o) == 3 and STAR in o.atoms and STAR not in u
    with pytest.raises(MalformedValue):
        o.embed(7)
