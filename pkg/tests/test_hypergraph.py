import hypothesis.strategies as st
import pytest
from hypothesis import given, settings

from hypercontrol.errors import InputError, ResourceError
from hypercontrol.hypergraph import (Hypergraph, can_spread, find_infection_sequence, is_infecting,
                                     minimal_infecting_sets)
from oracles import infects_by_all_orderings, spread_allowed

EX1 = Hypergraph.from_edges([{1, 2, 4}, {2, 3, 5}, {4, 5, 6}])
X6 = frozenset(range(1, 7))


@st.composite
def hypergraphs(draw, max_nodes=8):
    n = draw(st.integers(1, max_nodes))
    nodes = list(range(1, n + 1))
    edges = draw(st.lists(st.frozensets(st.sampled_from(nodes), min_size=1, max_size=min(n, 4)),
                          min_size=1, max_size=6, unique=True))
    covered = frozenset().union(*edges)
    for x in nodes:
        if x not in covered:
            extra = frozenset([x]) | frozenset(draw(st.lists(st.sampled_from(nodes), max_size=2)))
            if extra not in edges:
                edges.append(extra)
            covered |= extra
    return Hypergraph(frozenset(nodes), tuple(edges))


def test_validate():
    assert EX1.errors() == []
    assert Hypergraph(frozenset({1, 2}), (frozenset({1}),)).errors() == ["node 2 uncovered"]
    errs = Hypergraph(frozenset({1}), (frozenset({1}), frozenset())).errors()
    assert any("empty edge" in e for e in errs)
    errs = Hypergraph(frozenset({1}), (frozenset({1, 9}),)).errors()
    assert any("unknown node 9" in e for e in errs)
    errs = Hypergraph(frozenset({1}), (frozenset({1}), frozenset({1}))).errors()
    assert any("duplicate edge" in e for e in errs)
    with pytest.raises(InputError):
        Hypergraph(frozenset({1, 2}), (frozenset({1}),)).validate()


def test_spread_examples_from_worked_hypergraph():
    assert can_spread(EX1, {1, 2, 4}, {2, 3, 5}) == {3, 5}
    assert can_spread(EX1, {1, 2, 3, 4, 5}, {4, 5, 6}) == {6}
    assert can_spread(EX1, {2}, {1, 2, 4}) is None
    # edge already fully infected is not a spread
    assert can_spread(EX1, {1, 2, 4}, {1, 2, 4}) is None
    with pytest.raises(InputError):
        can_spread(EX1, {1}, {1, 2})


def test_worked_example_chain():
    seq = find_infection_sequence(EX1, {1, 2, 4})
    assert seq.sets == (frozenset({1, 2, 4}), frozenset({1, 2, 3, 4, 5}), X6)
    assert seq.steps[0] == (frozenset({2, 3, 5}), frozenset({3, 5}))
    assert seq.verify(EX1)
    assert seq.render() == "{1,2,4} ⊊ {1,2,3,4,5} ⊊ {1,2,3,4,5,6}"


def test_full_set_is_trivially_infecting():
    seq = find_infection_sequence(EX1, X6)
    assert seq.length == 1 and seq.steps == ()


def test_singletons_of_worked_example():
    # oracle: every ordering of admissible spreads
    expected = {x for x in X6 if infects_by_all_orderings(X6, EX1.edges, {x})}
    assert expected == {1, 3, 6}
    assert {x for x in X6 if is_infecting(EX1, {x})} == expected
    assert find_infection_sequence(EX1, {1}).sets[1] == frozenset({1, 2, 4})


def test_minimal_infecting_sets():
    assert minimal_infecting_sets(EX1, 2, True) == [frozenset({1}), frozenset({3}), frozenset({6})]
    assert minimal_infecting_sets(EX1, 2, False) == [frozenset({1})]
    single = Hypergraph.from_edges([{1, 2, 3}])
    assert minimal_infecting_sets(single, 1) == [frozenset({x}) for x in (1, 2, 3)]
    # a triangle where every node sits in two edges: no singleton infects
    tri = Hypergraph.from_edges([{1, 2}, {2, 3}, {1, 3}])
    assert minimal_infecting_sets(tri, 1) == []
    assert minimal_infecting_sets(tri, 2) == [frozenset({1, 2}), frozenset({1, 3}), frozenset({2, 3})]
    with pytest.raises(InputError):
        minimal_infecting_sets(EX1, 0)


def test_minimal_sets_budget_reports_partial():
    with pytest.raises(ResourceError) as err:
        minimal_infecting_sets(EX1, 2, budget=2)
    assert err.value.partial == [frozenset({1})]


def test_input_and_resource_errors():
    with pytest.raises(InputError):
        find_infection_sequence(EX1, set())
    with pytest.raises(InputError):
        find_infection_sequence(EX1, {7})
    big = Hypergraph.from_edges([{i, i + 1} for i in range(1, 30)])
    with pytest.raises(ResourceError):
        find_infection_sequence(big, {1})
    assert find_infection_sequence(big, {1}, max_nodes=40).length == 30


def test_path_graph_is_zero_forcing_from_an_end():
    path = Hypergraph.from_edges([{1, 2}, {2, 3}, {3, 4}])
    assert is_infecting(path, {1})
    assert not is_infecting(path, {2})
    assert find_infection_sequence(path, {1}, "greedy").verify(path)


def test_square_from_adjacent_pair():
    h = Hypergraph.from_edges([{1, 2}, {1, 3}, {2, 4}, {3, 4}])
    exact = is_infecting(h, {1, 2})
    assert exact == infects_by_all_orderings(h.nodes, h.edges, {1, 2})


@settings(max_examples=100, deadline=None)
@given(h=hypergraphs(), data=st.data())
def test_exact_search_agrees_with_all_orderings_oracle(h, data):
    c = data.draw(st.frozensets(st.sampled_from(sorted(h.nodes)), min_size=1))
    seq = find_infection_sequence(h, c)
    assert (seq is not None) == infects_by_all_orderings(h.nodes, h.edges, c)
    if seq is not None:
        assert seq.verify(h)
        assert seq.sets[0] == c and seq.sets[-1] == h.nodes
        assert all(a < b for a, b in zip(seq.sets, seq.sets[1:]))
    greedy = find_infection_sequence(h, c, "greedy")
    if greedy is not None:
        assert seq is not None and greedy.verify(h)


@settings(max_examples=100, deadline=None)
@given(h=hypergraphs(), data=st.data())
def test_spread_predicate_matches_definition(h, data):
    a = data.draw(st.frozensets(st.sampled_from(sorted(h.nodes))))
    for e in h.edges:
        assert can_spread(h, a, e) == spread_allowed(h.edges, a, e)
