"""Acceptance gate. Each criterion records (ok, detail) in RESULTS; conftest
prints one line per criterion at the end of the run."""

import io
import json
import time

import numpy as np
import pytest

from hypercontrol import analyzer
from hypercontrol.analyzer import Verdict
from hypercontrol.cli_io import parse_system_spec, run
from hypercontrol.hypergraph import Hypergraph, is_infecting
from hypercontrol.lie_closure import AlgebraKind, classify, closure, find_invariant_antisymmetric_form
from hypercontrol.operators import OperatorTerm, SubsystemLayout
from hypercontrol.system import DriftEdge, Options, SystemSpec
from oracles import (infects_by_all_orderings, pauli_string, standard_symplectic_form,
                     symplectic_algebra_basis)
from specgen import random_spec

RESULTS = {}


def record(num, ok, detail):
    RESULTS[num] = (bool(ok), detail)
    print(f"criterion {num}: {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, detail


def cli_json(*argv):
    out = io.StringIO()
    t0 = time.perf_counter()
    code = run([str(a) for a in argv] + ["--format", "json"], out=out)
    return code, json.loads(out.getvalue()), time.perf_counter() - t0


def test_criterion_1_infection_chain(example_spec_path):
    code, doc, dt = cli_json("infect", example_spec_path, "--control", "1,2,4")
    chain = doc["sequence"]["chain"] if doc.get("sequence") else None
    want = [[1, 2, 4], [1, 2, 3, 4, 5], [1, 2, 3, 4, 5, 6]]
    record(1, code == 0 and chain == want and dt < 0.1, f"chain={chain} t={dt:.3f}s")


def test_criterion_2_propagation_singletons(example_spec_path):
    code, doc, dt = cli_json("propagation", example_spec_path)
    dims = [[c["achieved"] for c in e["checks"]] for e in doc["edges"]]
    ok = (code == 0 and doc["mode"] == "singletons" and doc["status"] == "pass"
          and all(d == [64] * 3 for d in dims) and dt < 10)
    record(2, ok, f"singleton dims per edge={dims} t={dt:.2f}s")


def test_criterion_3_check_default(example_spec_path):
    code, doc, dt = cli_json("check", example_spec_path, "--control", "1,2,4")
    ok = code == 0 and doc["verdict"] == "CONTROLLABLE_BY_THEOREM_2" and dt < 15
    record(3, ok, f"verdict={doc['verdict']} failing_stage={doc.get('failing_stage')} t={dt:.2f}s")


def test_criterion_4_minimal_infecting_sets(example_spec_path):
    code, doc, dt = cli_json("min-infect", example_spec_path, "--all", "--max-size", "1")
    record(4, code == 0 and doc["sets"] == [[1], [3], [6]] and dt < 1, f"sets={doc['sets']} t={dt:.3f}s")


def test_criterion_5_closure_calibration():
    t0 = time.perf_counter()
    x, y = 1j * pauli_string({1: "X"}, 1), 1j * pauli_string({1: "Y"}, 1)
    d_su2 = closure([x, y]).dimension
    d_u2 = closure([x, y, 1j * np.eye(2)]).dimension
    u4 = [1j * pauli_string(dict(zip((1, 2), s)), 2) for s in ("XI", "YI", "IX", "IY", "ZZ")]
    u4.append(1j * np.eye(4))
    d_u4 = closure(u4).dimension
    sp = closure(symplectic_algebra_basis(4))
    kind = classify(sp).kind
    j = find_invariant_antisymmetric_form(sp)
    resid = max(np.abs(g.T @ j + j @ g).max() for g in sp.elements)
    resid_std = max(np.abs(g.T @ standard_symplectic_form(4) + standard_symplectic_form(4) @ g).max()
                    for g in sp.elements)
    dt = time.perf_counter() - t0
    ok = ((d_su2, d_u2, d_u4, sp.dimension) == (3, 4, 16, 10) and kind is AlgebraKind.SYMPLECTIC_ISO
          and resid < 1e-9 and np.allclose(j, -j.T) and resid_std < 1e-9 and dt < 1)
    record(5, ok, f"dims=({d_su2},{d_u2},{d_u4},{sp.dimension}) kind={kind.name} "
                  f"J residual={resid:.1e} t={dt:.2f}s")


def test_criterion_6_heisenberg_chain():
    layout = SubsystemLayout.qubits(3)
    heis = lambda a, b: [OperatorTerm.from_pauli({a: c, b: c}) for c in "XYZ"]
    controls = [OperatorTerm.from_pauli({1: c}) for c in "XYZ"] + [
        OperatorTerm(frozenset([1]), matrix=np.eye(2))]
    spec = SystemSpec(layout, [DriftEdge({1, 2}, heis(1, 2)), DriftEdge({2, 3}, heis(2, 3))],
                      {1}, controls)
    t0 = time.perf_counter()
    rep = analyzer.brute_force_controllability(spec)
    dt = time.perf_counter() - t0
    bf = rep.brute_force
    ok = bf.dimension == 64 and bf.kind is AlgebraKind.FULL_U and dt < 5
    record(6, ok, f"dim={bf.dimension} kind={bf.kind.name} t={dt:.2f}s")


def test_criterion_7_soundness():
    rng = np.random.default_rng(2026)
    t0 = time.perf_counter()
    violations, confirmed, largest = [], 0, 0
    for k in range(20):
        spec = random_spec(rng)
        largest = max(largest, spec.layout.total_dim)
        basis = analyzer.brute_force_closure(spec)
        bf = analyzer.brute_force_controllability(spec, basis).brute_force
        for mode in ("singletons", "witness"):
            local = analyzer.check_local_controllability(spec, mode)
            if local.verdict is Verdict.CONTROLLABLE_BY_THEOREM_2:
                if bf.kind in (AlgebraKind.FULL_U, AlgebraKind.SU):
                    confirmed += 1
                else:
                    violations.append((k, mode, bf.kind))
    dt = time.perf_counter() - t0
    ok = not violations and confirmed > 0 and largest <= 256 and dt < 300
    record(7, ok, f"violations={len(violations)} confirmed={confirmed} max N={largest} t={dt:.1f}s")


def _random_hypergraph(rng):
    n = int(rng.integers(1, 9))
    nodes = list(range(1, n + 1))
    edges = []
    for _ in range(int(rng.integers(1, 7))):
        e = frozenset(int(x) for x in rng.choice(nodes, int(rng.integers(1, min(n, 4) + 1)), replace=False))
        if e not in edges:
            edges.append(e)
    for x in nodes:
        if not any(x in e for e in edges):
            e = frozenset([x, int(rng.choice(nodes))])
            if e not in edges:
                edges.append(e)
    return Hypergraph(frozenset(nodes), tuple(edges))


def test_criterion_8_infection_exactness():
    rng = np.random.default_rng(8)
    t0 = time.perf_counter()
    disagreements, pairs = 0, 0
    for _ in range(100):
        h = _random_hypergraph(rng)
        assert not h.errors()
        nodes = sorted(h.nodes)
        for _ in range(5):
            size = int(rng.integers(1, len(nodes) + 1))
            c = frozenset(int(x) for x in rng.choice(nodes, size, replace=False))
            pairs += 1
            if is_infecting(h, c) != infects_by_all_orderings(h.nodes, h.edges, c):
                disagreements += 1
    dt = time.perf_counter() - t0
    record(8, disagreements == 0 and dt < 60, f"disagreements={disagreements} over {pairs} pairs t={dt:.1f}s")


@pytest.mark.slow
def test_criterion_9_full_brute_force(example_spec):
    spec = example_spec.with_options(max_dim=64)
    t0 = time.perf_counter()
    rep = analyzer.brute_force_controllability(spec)
    dt = time.perf_counter() - t0
    bf = rep.brute_force
    ok = bf.complete and bf.dimension == 4096 and bf.kind is AlgebraKind.FULL_U and dt < 3600
    record(9, ok, f"dim={bf.dimension} kind={bf.kind and bf.kind.name} commutators={bf.commutators} t={dt:.0f}s")
