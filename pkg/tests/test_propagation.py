import numpy as np
import pytest

from hypercontrol.errors import InputError, ResourceError
from hypercontrol.lie_closure import closure
from hypercontrol.operators import OperatorTerm, SubsystemLayout, hs_inner
from hypercontrol.propagation import (check_drift_propagation, check_edge_propagation, check_subset,
                                      subsystem_algebra_basis)
from hypercontrol.system import DriftEdge, SystemSpec
from oracles import SIGMA, kron_all, naive_closure_dim, pauli_string

EXAMPLE_TERMS = [("Y", "Y", "Y"), ("Z", "Z", "Z"), ("X", "Y", "Z"), ("Y", "X", "I"), ("Z", "Y", "I")]
HEISENBERG = sum(np.kron(SIGMA[c], SIGMA[c]) for c in "XYZ")


def example_edge_operator():
    return sum(kron_all([SIGMA[c] for c in t]) for t in EXAMPLE_TERMS)


def oracle_subset_dim(h, positions, n):
    """Closure dimension for u(E') at ``positions`` (0-based) via the naive oracle."""
    import itertools
    local = []
    for letters in itertools.product("IXYZ", repeat=len(positions)):
        local.append(1j * pauli_string({p + 1: l for p, l in zip(positions, letters)}, n))
    ih = 1j * h
    return naive_closure_dim([ih @ b - b @ ih for b in local] + local)


def test_subsystem_basis_sizes_and_orthonormality():
    layout = SubsystemLayout.qubits(3)
    b = subsystem_algebra_basis({1}, {1, 2}, layout)
    assert len(b) == 4
    gram = np.array([[hs_inner(x, y) for y in b] for x in b])
    assert np.allclose(gram, np.eye(4))
    assert np.allclose(b[1], 1j * np.kron(SIGMA["X"], SIGMA["I"]) / 2)
    assert len(subsystem_algebra_basis({2}, {2}, layout)) == 4
    b2 = subsystem_algebra_basis({1, 2}, {1, 2}, layout)
    assert len(b2) == 16
    assert closure(b2).dimension == 16
    with pytest.raises(InputError):
        subsystem_algebra_basis(set(), {1}, layout)


def test_subsystem_basis_for_qutrit():
    layout = SubsystemLayout(((1, 3), (2, 2)))
    b = subsystem_algebra_basis({1}, {1, 2}, layout)
    assert len(b) == 9
    gram = np.array([[hs_inner(x, y) for y in b] for x in b])
    assert np.allclose(gram, np.eye(9))


def test_example_edge_term_per_singleton():
    layout = SubsystemLayout.qubits(3)
    h = example_edge_operator()
    rec = check_edge_propagation({1, 2, 3}, h, layout, "singletons")
    got = {min(c.subset): c.achieved for c in rec.checks}
    # frozen from the naive SVD closure oracle
    assert [oracle_subset_dim(h, [p], 3) for p in range(3)] == [64, 64, 21]
    assert got == {1: 64, 2: 64, 3: 21}
    assert rec.status == "fail"


def test_example_edge_term_all_subsets():
    layout = SubsystemLayout.qubits(3)
    rec = check_edge_propagation({1, 2, 3}, example_edge_operator(), layout, "all")
    got = {tuple(sorted(c.subset)): c.achieved for c in rec.checks}
    assert got == {(1,): 64, (2,): 64, (3,): 21, (1, 2): 64, (1, 3): 64, (2, 3): 64, (1, 2, 3): 64}


def test_zero_edge_term_propagates_nothing():
    layout = SubsystemLayout.qubits(2)
    rec = check_edge_propagation({1, 2}, np.zeros((4, 4)), layout)
    assert rec.status == "fail"
    assert all(c.achieved == 4 for c in rec.checks)


def test_heisenberg_edge_passes():
    layout = SubsystemLayout.qubits(2)
    rec = check_edge_propagation({1, 2}, HEISENBERG, layout, "all")
    assert rec.status == "pass"
    assert [c.achieved for c in rec.checks] == [16, 16, 16]
    assert oracle_subset_dim(HEISENBERG, [0], 2) == 16


def test_indeterminate_on_tiny_budget():
    layout = SubsystemLayout.qubits(2)
    chk = check_subset({1, 2}, HEISENBERG, {1}, layout, budget=2)
    assert chk.status == "indeterminate"
    rec = check_edge_propagation({1, 2}, HEISENBERG, layout, budget=2)
    assert rec.status == "indeterminate"


def test_edge_input_errors():
    layout = SubsystemLayout.qubits(7)
    with pytest.raises(InputError, match="Hermitian"):
        check_edge_propagation({1, 2}, 1j * HEISENBERG, layout)
    with pytest.raises(InputError):
        check_edge_propagation({1, 2}, np.eye(8), layout)
    with pytest.raises(ResourceError):
        check_edge_propagation(set(range(1, 8)), np.eye(128), layout)


def heisenberg_path(n, zero_edge=None):
    layout = SubsystemLayout.qubits(n)
    edges = []
    for i in range(1, n):
        terms = [] if i == zero_edge else [OperatorTerm.from_pauli({i: c, i + 1: c}) for c in "XYZ"]
        edges.append(DriftEdge({i, i + 1}, terms))
    return SystemSpec(layout, edges, {1}, assume_full=True)


def test_heisenberg_path_drift_passes():
    rep = check_drift_propagation(heisenberg_path(3))
    assert rep.passed
    assert [sorted(r.nodes) for r in rep.edges] == [[1, 2], [2, 3]]


def test_zero_edge_identified():
    rep = check_drift_propagation(heisenberg_path(4, zero_edge=2))
    assert rep.status == "fail"
    assert [sorted(r.nodes) for r in rep.failing_edges()] == [[2, 3]]


def test_example_drift(example_spec):
    rep = check_drift_propagation(example_spec)
    assert [r.status for r in rep.edges] == ["fail"] * 3
    for r in rep.edges:
        assert r.dim == 8
        assert [c.achieved for c in r.checks] == [64, 64, 21]


def test_singletons_pass_implies_all_pass():
    rng = np.random.default_rng(11)
    layout = SubsystemLayout.qubits(3)
    seen = 0
    for k in range(8):
        if k % 2:
            a = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
            h = (a + a.conj().T) / 2
        else:
            letters = [dict(zip((1, 2, 3), rng.choice(list("IXYZ"), 3))) for _ in range(3)]
            h = sum(rng.standard_normal() * pauli_string(l, 3) for l in letters)
        single = check_edge_propagation({1, 2, 3}, h, layout, "singletons")
        assert all(c.achieved <= 64 for c in single.checks)
        if single.status == "pass":
            seen += 1
            assert check_edge_propagation({1, 2, 3}, h, layout, "all").status == "pass"
    assert seen >= 4


def test_report_is_deterministic(example_spec):
    assert check_drift_propagation(example_spec) == check_drift_propagation(example_spec)
