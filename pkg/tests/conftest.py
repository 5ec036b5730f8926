import time

import pytest

from quotlab.gallery import checked_functor, gallery
from quotlab.laws import CheckConfig, condition_suite, laws_bnf

QUOTIENTS = ["upair", "fset", "dlist", "cyclist", "fim", "qp", "tllist-model", "fae-model", "re_aci", "re_acidz"]


@pytest.fixture(scope="session")
def cfg():
    return CheckConfig()


@pytest.fixture(scope="session")
def matrix(cfg):
    """laws_bnf and the condition suite for every gallery entry, keyed by (entry, law)."""
    out, law_seconds = {}, 0.0
    for name, e in gallery().items():
        t0 = time.perf_counter()
        Q = e.construct(cfg)
        for rep in laws_bnf(Q, cfg):
            out[(name, rep.law)] = rep
        if name in QUOTIENTS:
            law_seconds += time.perf_counter() - t0
        for rep in condition_suite(e.equiv, checked_functor(e, cfg), cfg):
            out[(name, rep.law)] = rep
    out["_law_seconds"] = law_seconds
    return out


def pytest_terminal_summary(terminalreporter):
    lines = []
    for key in ("passed", "failed"):
        for rep in terminalreporter.stats.get(key, []):
            if rep.when != "call":
                continue
            for k, v in rep.user_properties:
                if k == "criterion":
                    lines.append((v[0], f"criterion {v[0]:>2}: {'PASS' if rep.passed else 'FAIL'}  {v[1]}"))
    if lines:
        terminalreporter.write_sep("=", "acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
