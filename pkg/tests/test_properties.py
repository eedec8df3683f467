"""Native solver against the exhaustive oracle on tiny instances."""
from __future__ import annotations

import dataclasses
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ncdc3d.model import Basic, Constraint, Default, GridSpec, Network
from ncdc3d.oracle import oracle_check, oracle_optimal_explanation
from ncdc3d.semantics import relation_of
from ncdc3d.solver import NoExplanation, check, explain, verify_solution

from conftest import planted, random_object, sampled_relations

G2 = GridSpec(2, 2, 2)
G231 = GridSpec(2, 3, 1)


def found(verdict) -> bool:
    return verdict.solution is not None


# -- verdict agreement ----------------------------------------------------------

RELATIONS = sampled_relations()


@pytest.mark.parametrize("index", range(len(RELATIONS)))
def test_two_object_verdicts_match_oracle(index):
    net = Network(("a", "b"), (Constraint("a", "b", Basic(RELATIONS[index])),))
    native, truth = check(net, grid=G2), oracle_check(net, G2)
    assert found(native) == truth.consistent
    if found(native):
        assert verify_solution(net, native.solution) == []


def test_sample_covers_both_verdicts():
    verdicts = {oracle_check(Network(("a", "b"), (Constraint("a", "b", Basic(r)),)), G2).consistent
                for r in RELATIONS}
    assert verdicts == {True, False}


def test_three_object_verdicts_and_costs_match_oracle():
    rng = random.Random(5)
    outcomes = set()
    for _ in range(40):
        net = planted(rng, G2, 3, rng.randint(1, 3), rng.randint(0, 2))
        native, truth = check(net, grid=G2), oracle_check(net, G2)
        assert found(native) == truth.consistent
        outcomes.add(truth.consistent)
        if truth.consistent:
            assert native.solution.cost == truth.solution.cost
    assert outcomes == {True, False}


# -- explanations ------------------------------------------------------------------

def test_explanations_are_minimal():
    rng = random.Random(8)
    nontrivial = 0
    for _ in range(30):
        net = planted(rng, G231, 3, rng.randint(2, 4), 0, perturb=0.5)
        try:
            k, sets = oracle_optimal_explanation(net, G231)
        except NoExplanation:
            with pytest.raises(NoExplanation):
                explain(net, grid=G231)
            continue
        e = explain(net, grid=G231)
        assert e.cost[0] == k
        assert e.violated in sets
        assert check(net.without(e.violated), grid=G231).consistent
        nontrivial += k > 0
    assert nontrivial > 0


# -- defaults ------------------------------------------------------------------------

def test_default_monotonicity():
    """Adding a default keeps the hard verdict and never lowers the number of dropped defaults."""
    rng = random.Random(13)
    for _ in range(30):
        net = planted(rng, G2, 3, rng.randint(0, 2), rng.randint(0, 2))
        taken = {c.pair for c in net.defaults}
        free = [(a, b) for a in net.objects for b in net.objects if a != b and (a, b) not in taken]
        pair = rng.choice(free)
        more = dataclasses.replace(
            net, constraints=net.constraints + (Constraint(*pair, Default(relation_of(
                random_object(rng, G2.dims), random_object(rng, G2.dims)))),))
        before, after = oracle_check(net, G2), oracle_check(more, G2)
        assert before.consistent == after.consistent
        native = check(more, grid=G2)
        assert found(native) == after.consistent
        if after.consistent:
            assert after.solution.cost[1] >= before.solution.cost[1]
            assert native.solution.cost == after.solution.cost


def test_ab_offset_invariance():
    """An ab mark behaves like deleting every default that touches the marked object."""
    rng = random.Random(17)
    for _ in range(30):
        net = planted(rng, G2, 3, rng.randint(0, 2), rng.randint(1, 3), perturb=0.5)
        marked = rng.choice(net.objects)
        with_ab = dataclasses.replace(net, ab_marks=frozenset({marked}))
        stripped = dataclasses.replace(net, constraints=tuple(
            c for c in net.constraints if not (c.is_default and marked in c.pair)))
        a, b = oracle_check(with_ab, G2), oracle_check(stripped, G2)
        assert a.consistent == b.consistent
        native = check(with_ab, grid=G2)
        assert found(native) == a.consistent
        if a.consistent:
            assert a.solution.cost == b.solution.cost
            assert native.solution.cost == a.solution.cost


# -- determinism -------------------------------------------------------------------------

@settings(max_examples=25)
@given(st.integers(0, 10_000))
def test_repeated_runs_are_identical(seed):
    net = planted(random.Random(seed), GridSpec(3, 3, 3), 3, 3, 1)
    first = check(net)
    again = check(net)
    assert first.status is again.status
    assert first.solution == again.solution
    if found(first):
        assert verify_solution(net, first.solution) == []
