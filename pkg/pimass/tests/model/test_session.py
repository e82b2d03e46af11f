import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.stats import chisquare

from pimass.model.models import TransitionTable
from pimass.model.session import QuerySession, LocalityViolation, CallBudgetExceeded


def test_step_on_single_state(single_state_chain):
    session = QuerySession(single_state_chain, 0, seed=1)
    assert session.step(0) == 0
    assert session.step_calls == 1


def test_step_frequencies_on_two_states(two_state_chain):
    session = QuerySession(two_state_chain, 0, seed=42)
    moves = sum(session.step(0) for _ in range(100_000))
    assert moves / 100_000 == pytest.approx(0.5, abs=0.01)


def test_step_frequencies_follow_probe_probabilities(skewed_torus):
    session = QuerySession(skewed_torus, 0, seed=7)
    neighbors = sorted(skewed_torus.neighbors(0))
    for u2 in neighbors:
        session.visited.add(u2)
    counts = dict.fromkeys(neighbors, 0)
    for _ in range(100_000):
        counts[session.step(0)] += 1
    expected = [100_000 * session.probe(0, u2) for u2 in neighbors]
    _, p_value = chisquare([counts[u2] for u2 in neighbors], expected)
    assert p_value > 0.001


def test_step_on_unvisited_state(path_chain):
    session = QuerySession(path_chain, 0)
    with pytest.raises(LocalityViolation):
        session.step(2)


def test_step_marks_state_visited(path_chain):
    session = QuerySession(path_chain, 0, seed=0)
    u = session.step(0)
    assert u == 1
    assert session.visited == {0, 1}


def test_probe(path_chain):
    session = QuerySession(path_chain, 1)
    session.step(1)
    session.visited.add(0)
    assert session.probe(1, 0) == 0.5
    assert session.probe_calls == 1


def test_probe_without_self_loop(path_chain):
    session = QuerySession(path_chain, 0)
    assert session.probe(0, 0) == 0


def test_probe_unvisited_state(path_chain):
    session = QuerySession(path_chain, 0)
    session.step(0)
    with pytest.raises(LocalityViolation):
        session.probe(0, 2)


def test_probe_does_not_visit(path_chain):
    session = QuerySession(path_chain, 1)
    session.probe(1, 1)
    assert session.footprint() == 1


def test_session_rejects_transition_table():
    with pytest.raises(TypeError):
        QuerySession(TransitionTable(np.eye(2)), 0)


def test_session_rejects_unknown_start(path_chain):
    with pytest.raises(IndexError):
        QuerySession(path_chain, 3)


def test_call_budget(path_chain):
    session = QuerySession(path_chain, 0, seed=0, call_budget=3)
    session.step(0)
    session.probe(0, 1)
    session.step(1)
    with pytest.raises(CallBudgetExceeded):
        session.probe(0, 1)
    assert session.calls == 3


def test_same_seed_same_walk(small_torus):
    walks = []
    for _ in range(2):
        session = QuerySession(small_torus, 0, seed=11)
        u, walk = 0, []
        for _ in range(500):
            u = session.step(u)
            walk.append(u)
        walks.append(walk)
    assert walks[0] == walks[1]


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(0, 3), min_size=1, max_size=60), st.integers(0, 2 ** 32 - 1))
def test_footprint_never_decreases(small_torus, ops, seed):
    session = QuerySession(small_torus, 0, seed=seed)
    footprint, u = session.footprint(), 0
    for op in ops:
        if op == 0:
            u = session.step(u)
        else:
            visited = sorted(session.visited)
            session.probe(visited[op % len(visited)], u)
        assert session.footprint() >= footprint
        assert 0 in session.visited
        footprint = session.footprint()
