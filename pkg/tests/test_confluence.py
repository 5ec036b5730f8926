import pytest

from quotlab import regex as rx
from quotlab.atoms import ResourceLimit
from quotlab.confluence import (
    RewriteSystem, rw_closure_contains, rw_factors_projections, rw_joinable, rw_reachable, rw_rewrites_in_equiv,
    rw_strong_confluence, theorem4_certify,
)
from quotlab.functors import LIST
from quotlab.gallery import entry, fim_decide, fim_unstep

a, b, c = 0, 1, 2

ROTATE = entry("cyclist").rewrite
DLIST_INS = entry("dlist").rewrite
FIM = entry("fim").rewrite


def word(s):
    return tuple(ord(ch) - ord("a") for ch in s)


def test_reachable():
    assert rw_reachable(ROTATE, (a, b), 2) == {(a, b), (b, a)}
    assert rw_reachable(DLIST_INS, (a, b, a), 0) == {(a, b, a)}
    assert rw_reachable(DLIST_INS, (a,), 1) == {(a,), (a, a)}
    with pytest.raises(ValueError):
        rw_reachable(ROTATE, (a,), -1)


def test_reachable_is_monotone_and_renaming_invariant():
    swap = {a: b, b: a}
    for x in LIST.enumerate([(a, b)], 3):
        prev = frozenset()
        for d in range(4):
            cur = rw_reachable(DLIST_INS, x, d)
            assert prev <= cur
            prev = cur
        assert {LIST.map([swap], v) for v in prev} == rw_reachable(DLIST_INS, LIST.map([swap], x), 3)


def test_reachable_resource_limit():
    with pytest.raises(ResourceLimit):
        rw_reachable(FIM, word("abc"), 6, limit=50)


def test_joinable():
    assert rw_joinable(ROTATE, (a, b), (a, b), 0) == (a, b)
    assert rw_joinable(ROTATE, (a, b), (b, a), 2) is not None
    # both are normal forms of ababcbabc when squares are removed; duplication rejoins them
    y, z = word("abc"), word("abcbabc")
    assert y in rw_reachable(RewriteSystem("unfim", fim_unstep), word("ababcbabc"), 4)
    assert z in rw_reachable(RewriteSystem("unfim", fim_unstep), word("ababcbabc"), 4)
    assert not fim_unstep(y) and not fim_unstep(z)
    assert rw_joinable(FIM, y, z, 4, cap=len(y) + len(z) + 2) is not None
    assert fim_decide(y, z)


def test_strong_confluence(cfg):
    assert rw_strong_confluence(ROTATE, LIST, cfg)["status"] == "pass"
    unfim = RewriteSystem("unfim", fim_unstep, size=len)
    res = rw_strong_confluence(unfim, LIST, cfg, values=[word("ababcbabc")])
    assert res["status"] == "fail" and len(res["counterexample"]["peak"]) == 3


def test_bounded_join_mode(cfg):
    S = RewriteSystem("rotate-plain", ROTATE.step, size=len, mode="bounded")
    cert = theorem4_certify(S, entry("cyclist").equiv, LIST, entry("cyclist").generators, cfg)
    assert cert.certified and cert.notes


def test_closure_contains(cfg):
    for name in ("fset", "re_aci"):
        e = entry(name)
        assert rw_closure_contains(e.rewrite, e.equiv, e.raw, e.generators, cfg, e.cert_bound)["status"] == "pass"
    e = entry("re_acidz")
    assert rw_closure_contains(e.rewrite, e.equiv, e.raw, e.generators, cfg, 4)["status"] == "pass"


def test_factors_projections(cfg):
    d = entry("dlist")
    assert rw_factors_projections(DLIST_INS, d.equiv, LIST, cfg)["status"] == "pass"
    assert rw_factors_projections(ROTATE, entry("cyclist").equiv, LIST, cfg)["status"] == "pass"
    res = rw_factors_projections(d.system("removing"), d.equiv, LIST, cfg)
    assert res["status"] == "fail"
    assert res["counterexample"]["x"] == "[(1,a),(1,b)]"
    assert res["counterexample"]["step"] == ["[a,a]", "[a]"]


def test_rewrites_stay_in_equivalence(cfg):
    for name in ("fset", "dlist", "cyclist", "fim", "re_aci", "re_acidz"):
        e = entry(name)
        assert rw_rewrites_in_equiv(e.rewrite, e.equiv, e.raw, cfg, e.cert_bound)["status"] == "pass"


def test_acidz_atoms_only_decrease(cfg):
    for r in rx.enumerate_regex((a, b), 4):
        for s in rx.acidz_step(r):
            assert rx.atoms(s) <= rx.atoms(r)


def test_certificates(cfg):
    for name in ("dlist", "cyclist", "fim", "re_aci", "re_acidz", "fset"):
        e = entry(name)
        cert = theorem4_certify(e.rewrite, e.equiv, e.raw, e.generators, cfg, e.cert_bound)
        assert cert.certified, (name, cert.withheld_at, cert.counterexample)
        d = cert.to_json()
        assert d["bounded"] is True and d["millis"] is None
        # rotation is deterministic: no peaks, hence no traces
        assert bool(d["traces"]) == (d["cases"]["strong_confluence"] > 0)
    d = entry("dlist")
    cert = theorem4_certify(d.system("removing"), d.equiv, LIST, d.generators, cfg)
    assert not cert.certified and cert.withheld_at == "condition (ii)"


def test_certificate_needs_map_respect(cfg):
    from quotlab.quotient import EquivSpec
    distinct = EquivSpec("distinct", key=lambda x: "distinct" if x and len(set(x)) == len(x) else x)
    cert = theorem4_certify(ROTATE, distinct, LIST, entry("cyclist").generators, cfg)
    assert not cert.certified and cert.withheld_at.startswith("precondition")
