"""Problem instance: subsystem layout, drift edges and the controlled subsystem."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import InputError
from .hypergraph import Hypergraph, fmt_set
from .operators import DEFAULT_MAX_DIM, OperatorTerm, SubsystemLayout, sum_terms

SUBSET_MODES = ("singletons", "all", "witness")


@dataclass(frozen=True)
class Options:
    subset_mode: str = "singletons"
    tol: float = 1e-9
    budget: Optional[int] = None  # commutators per closure; None -> 4 N^4
    max_dim: int = DEFAULT_MAX_DIM  # cap for dense matrices on the whole system
    edge_max_dim: int = 64
    allow_su_controls: bool = False
    brute_force: bool = False  # `check` also runs the full-space closure

    def __post_init__(self):
        if self.subset_mode not in SUBSET_MODES:
            raise InputError(f"subset_mode must be one of {SUBSET_MODES}", path="options.subset_mode")
        if not self.tol > 0:
            raise InputError("tol must be positive", path="options.tol")
        if self.budget is not None and self.budget < 0:
            raise InputError("budget must be >= 0", path="options.budget")


@dataclass(frozen=True)
class DriftEdge:
    nodes: frozenset
    terms: tuple

    def __post_init__(self):
        object.__setattr__(self, "nodes", frozenset(self.nodes))
        object.__setattr__(self, "terms", tuple(self.terms))


@dataclass(frozen=True)
class SystemSpec:
    layout: SubsystemLayout
    drift_edges: tuple
    control_set: frozenset
    control_terms: tuple = ()
    assume_full: bool = False
    options: Options = field(default_factory=Options)

    def __post_init__(self):
        object.__setattr__(self, "drift_edges", tuple(self.drift_edges))
        object.__setattr__(self, "control_set", frozenset(self.control_set))
        object.__setattr__(self, "control_terms", tuple(self.control_terms))
        ids = set(self.layout.ids)
        for k, edge in enumerate(self.drift_edges):
            for x in sorted(edge.nodes):
                if x not in ids:
                    raise InputError(f"unknown node {x}", path=f"drift.edges[{k}]")
            for t, term in enumerate(edge.terms):
                if not term.support <= edge.nodes:
                    raise InputError(
                        f"term support {fmt_set(term.support)} leaves edge {fmt_set(edge.nodes)}",
                        path=f"drift.edges[{k}].terms[{t}]",
                    )
                try:
                    term.check_against(self.layout)
                except InputError as exc:
                    raise InputError(str(exc), path=f"drift.edges[{k}].terms[{t}]") from None
        errs = self.hypergraph.errors()
        if errs:
            raise InputError("; ".join(errs), path="drift.edges")
        if not self.control_set:
            raise InputError("control set is empty", path="controls.set")
        for x in sorted(self.control_set - ids):
            raise InputError(f"unknown node {x}", path="controls.set")
        for t, term in enumerate(self.control_terms):
            if not term.support <= self.control_set:
                raise InputError(
                    f"control term support {fmt_set(term.support)} not inside {fmt_set(self.control_set)}",
                    path=f"controls.terms[{t}]",
                )
            try:
                term.check_against(self.layout)
            except InputError as exc:
                raise InputError(str(exc), path=f"controls.terms[{t}]") from None
        if not self.assume_full and not self.control_terms:
            raise InputError("give control terms or set assume_full", path="controls")

    @property
    def hypergraph(self) -> Hypergraph:
        return Hypergraph(frozenset(self.layout.ids), tuple(e.nodes for e in self.drift_edges))

    def with_control(self, control_set, **changes) -> "SystemSpec":
        """Copy with a different control set; explicit terms outside it are dropped."""
        control_set = frozenset(control_set)
        terms = tuple(t for t in self.control_terms if t.support <= control_set)
        assume_full = changes.get("assume_full", self.assume_full)
        return SystemSpec(self.layout, self.drift_edges, control_set, terms, assume_full,
                          changes.get("options", self.options))

    def with_options(self, **kw) -> "SystemSpec":
        opts = Options(**{**self.options.__dict__, **kw})
        return SystemSpec(self.layout, self.drift_edges, self.control_set, self.control_terms,
                          self.assume_full, opts)

    def edge_hamiltonian(self, index: int) -> np.ndarray:
        """Sum of the edge's terms on the edge's own space (ascending ids)."""
        edge = self.drift_edges[index]
        return sum_terms(edge.terms, sorted(edge.nodes), self.layout)

    def drift_matrix(self) -> np.ndarray:
        self.layout.check_total_dim(self.options.max_dim)
        space = self.layout.ids
        out = np.zeros((self.layout.total_dim,) * 2, dtype=complex)
        for edge in self.drift_edges:
            out += sum_terms(edge.terms, space, self.layout)
        return out
