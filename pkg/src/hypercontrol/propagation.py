"""Per-edge propagation check: does bracketing the edge term with a local
algebra ``u(E')`` regenerate the whole edge algebra ``u(E)``?
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .errors import InputError, ResourceError
from .hypergraph import fmt_set
from .lie_closure import DEFAULT_TOL, closure
from .operators import SubsystemLayout, embed, hermitian_basis, is_hermitian

DEFAULT_EDGE_MAX_DIM = 64


def subsystem_algebra_basis(support: Iterable[int], within: Iterable[int],
                            layout: SubsystemLayout) -> list:
    """HS-orthonormal basis of ``u(support)`` embedded into the ``within`` space."""
    support = tuple(sorted(support))
    within = tuple(sorted(within))
    if not support:
        raise InputError("subsystem algebra needs a nonempty support")
    if not set(support) <= set(within):
        raise InputError(f"{fmt_set(support)} is not inside {fmt_set(within)}")
    local = [hermitian_basis(layout.dims[i]) for i in support]
    scale = np.sqrt(layout.dim_of(within) / layout.dim_of(support))
    out = []
    for factors in itertools.product(*local):
        m = factors[0]
        for f in factors[1:]:
            m = np.kron(m, f)
        out.append(1j * embed(m, support, within, layout) / scale)
    return out


@dataclass(frozen=True)
class SubsetCheck:
    subset: frozenset
    achieved: int
    target: int
    complete: bool
    commutators: int

    @property
    def status(self) -> str:
        if not self.complete:
            return "indeterminate"
        return "pass" if self.achieved == self.target else "fail"


@dataclass(frozen=True)
class EdgeRecord:
    nodes: frozenset
    dim: int
    checks: tuple

    @property
    def status(self) -> str:
        states = {c.status for c in self.checks}
        if "fail" in states:
            return "fail"
        if "indeterminate" in states:
            return "indeterminate"
        return "pass"

    @property
    def commutators_used(self) -> int:
        return sum(c.commutators for c in self.checks)


@dataclass(frozen=True)
class PropagationReport:
    mode: str
    edges: tuple

    @property
    def status(self) -> str:
        states = {e.status for e in self.edges}
        for s in ("fail", "indeterminate"):
            if s in states:
                return s
        return "pass"

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def failing_edges(self) -> list:
        return [e for e in self.edges if e.status != "pass"]


def check_subset(edge: Iterable[int], h_edge: np.ndarray, subset: Iterable[int],
                 layout: SubsystemLayout, tol: float = DEFAULT_TOL,
                 budget: Optional[int] = None) -> SubsetCheck:
    """Closure of ``[iH_E, u(E')] + u(E')`` on the edge space."""
    edge = tuple(sorted(edge))
    local = subsystem_algebra_basis(subset, edge, layout)
    ih = 1j * np.asarray(h_edge, dtype=complex)
    gens = [ih @ b - b @ ih for b in local] + local
    basis = closure(gens, budget=budget, tol=tol)
    d = layout.dim_of(edge)
    return SubsetCheck(frozenset(subset), basis.dimension, d * d, basis.complete,
                       basis.commutators_used)


def tested_subsets(edge: Iterable[int], mode: str) -> list:
    nodes = sorted(edge)
    if mode == "singletons":
        return [frozenset([x]) for x in nodes]
    if mode == "all":
        return [frozenset(c) for r in range(1, len(nodes) + 1)
                for c in itertools.combinations(nodes, r)]
    raise InputError(f"subset mode {mode!r} does not enumerate subsets")


def _check_edge_input(edge, h_edge, layout, max_dim):
    d = layout.dim_of(edge)
    if d > max_dim:
        raise ResourceError(f"edge {fmt_set(edge)} has dimension {d} > cap {max_dim}",
                            stage="propagation")
    h_edge = np.asarray(h_edge, dtype=complex)
    if h_edge.shape != (d, d):
        raise InputError(f"edge operator shape {h_edge.shape}, edge space needs {(d, d)}")
    if not is_hermitian(h_edge, 1e-10):
        raise InputError(f"edge operator on {fmt_set(edge)} is not Hermitian")
    return d, h_edge


def check_edge_propagation(edge: Iterable[int], h_edge: np.ndarray, layout: SubsystemLayout,
                           subset_mode: str = "singletons", tol: float = DEFAULT_TOL,
                           budget: Optional[int] = None,
                           max_dim: int = DEFAULT_EDGE_MAX_DIM) -> EdgeRecord:
    edge = frozenset(edge)
    d, h_edge = _check_edge_input(edge, h_edge, layout, max_dim)
    checks = tuple(check_subset(edge, h_edge, s, layout, tol, budget)
                   for s in tested_subsets(edge, subset_mode))
    return EdgeRecord(edge, d, checks)


def check_drift_propagation(spec, subset_mode: Optional[str] = None) -> PropagationReport:
    """Run :func:`check_edge_propagation` on every drift edge of ``spec`` in order."""
    opts = spec.options
    mode = subset_mode or opts.subset_mode
    if mode == "witness":
        raise InputError("witness mode is driven by the infection search, not edge by edge")
    records = []
    for k, edge in enumerate(spec.drift_edges):
        records.append(check_edge_propagation(
            edge.nodes, spec.edge_hamiltonian(k), spec.layout, mode,
            tol=opts.tol, budget=opts.budget, max_dim=opts.edge_max_dim))
    return PropagationReport(mode, tuple(records))


class SubsetOracle:
    """Memoized ``check_subset`` for the drift edges of one spec."""

    def __init__(self, spec):
        self.spec = spec
        self._index = {e.nodes: k for k, e in enumerate(spec.drift_edges)}
        self._cache = {}

    def __call__(self, edge: frozenset, subset: frozenset) -> SubsetCheck:
        key = (edge, subset)
        if key not in self._cache:
            k = self._index[edge]
            opts = self.spec.options
            _, h = _check_edge_input(edge, self.spec.edge_hamiltonian(k), self.spec.layout,
                                     opts.edge_max_dim)
            self._cache[key] = check_subset(edge, h, subset, self.spec.layout,
                                            opts.tol, opts.budget)
        return self._cache[key]

    def report(self) -> PropagationReport:
        by_edge = {}
        for (edge, _), chk in self._cache.items():
            by_edge.setdefault(edge, []).append(chk)
        records = []
        for e in self.spec.drift_edges:
            if e.nodes in by_edge:
                checks = sorted(by_edge[e.nodes], key=lambda c: (len(c.subset), sorted(c.subset)))
                records.append(EdgeRecord(e.nodes, self.spec.layout.dim_of(e.nodes), tuple(checks)))
        return PropagationReport("witness", tuple(records))
