"""The acceptance matrix, one test per criterion.

Run with ``pytest tests/test_acceptance.py -s`` to see the verdict lines.
"""

import time

import pytest

from ellss.suite import Suite, acceptance_suite

CRITERIA = list(enumerate(Suite.CRITERIA, start=1))


@pytest.fixture(scope="module")
def results():
    return {r.id: r for r in acceptance_suite(seed_base=0)}


@pytest.mark.parametrize("cid, name", CRITERIA, ids=[n for _, n in CRITERIA])
def test_criterion(results, cid, name):
    r = results[cid]
    print(r.line())
    assert r.passed, (r.observed, r.witness)


def test_matrix_is_complete(results):
    assert sorted(results) == list(range(1, 9))


def test_lattice_exploration_runtime(results):
    assert results[6].seconds < 120


@pytest.mark.parametrize("seed_base", [1, 2])
def test_verdicts_do_not_depend_on_seed_base(results, seed_base):
    other = acceptance_suite(seed_base=seed_base)
    assert [r.passed for r in other] == [results[k].passed for k in sorted(results)]


def test_tiny_matrix_is_fast():
    t0 = time.perf_counter()
    tiny = acceptance_suite(sizes=[3])
    assert time.perf_counter() - t0 < 1.0
    assert [r.id for r in tiny] == list(range(1, 9))
