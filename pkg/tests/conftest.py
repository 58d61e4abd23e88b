import functools

import pytest

from hyperlip import augtree, catalog

# criterion number -> (passed, detail); filled by test_acceptance
ACCEPTANCE = {}


@functools.lru_cache(maxsize=None)
def five_three(depth):
    return augtree.build_from_ifs(catalog.five_three(), depth)


@functools.lru_cache(maxsize=None)
def single_edge(depth):
    return catalog.single_edge_binary(depth)


@functools.lru_cache(maxsize=None)
def cantor_one(depth):
    return augtree.build_union_from_ifs([catalog.middle_third(), catalog.cantor_translate(1)], depth)


@functools.lru_cache(maxsize=None)
def planar_union(depth):
    return augtree.build_union_from_ifs(list(catalog.planar_pair()), depth)


@pytest.fixture(scope="session")
def graphs():
    return {"five_three": five_three, "single_edge": single_edge, "cantor_one": cantor_one,
            "planar_union": planar_union}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
