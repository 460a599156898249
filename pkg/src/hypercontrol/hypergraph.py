"""Hypergraphs over subsystem ids and the infection process on them."""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Iterable, Optional

from .errors import InputError, ResourceError

EXACT_MAX_NODES = 24
DEFAULT_SUBSET_BUDGET = 100_000


def fmt_set(s: Iterable[int]) -> str:
    return "{" + ",".join(str(i) for i in sorted(s)) + "}"


@dataclass(frozen=True)
class Hypergraph:
    nodes: frozenset
    edges: tuple

    def __post_init__(self):
        object.__setattr__(self, "nodes", frozenset(self.nodes))
        object.__setattr__(self, "edges", tuple(frozenset(e) for e in self.edges))

    @classmethod
    def from_edges(cls, edges: Iterable[Iterable[int]], nodes: Optional[Iterable[int]] = None):
        edges = [frozenset(e) for e in edges]
        if nodes is None:
            nodes = frozenset().union(*edges) if edges else frozenset()
        return cls(frozenset(nodes), tuple(edges))

    def errors(self) -> list:
        """Every violated hypergraph condition, as human-readable strings."""
        out = []
        if not self.nodes:
            out.append("empty node set")
        if not self.edges:
            out.append("no edges")
        seen = {}
        for k, e in enumerate(self.edges):
            if not e:
                out.append(f"empty edge at edges[{k}]")
                continue
            for x in sorted(e - self.nodes):
                out.append(f"unknown node {x} at edges[{k}]")
            if e in seen:
                out.append(f"duplicate edge {fmt_set(e)} at edges[{k}] (first at edges[{seen[e]}])")
            else:
                seen[e] = k
        covered = frozenset().union(*self.edges) if self.edges else frozenset()
        for x in sorted(self.nodes - covered):
            out.append(f"node {x} uncovered")
        return out

    def validate(self) -> None:
        errs = self.errors()
        if errs:
            raise InputError("; ".join(errs), path="hypergraph")

    @cached_property
    def incidence(self) -> dict:
        """node -> tuple of edges containing it, in input order."""
        inc = {x: [] for x in self.nodes}
        for e in self.edges:
            for x in e:
                inc.setdefault(x, []).append(e)
        return {x: tuple(v) for x, v in inc.items()}


def can_spread(h: Hypergraph, infected: Iterable[int], edge: Iterable[int]) -> Optional[frozenset]:
    """Nodes newly infected through ``edge`` from ``infected``, or None.

    Every infected node of the edge must touch no other edge that still has a
    healthy node (inclusion ``F <= A`` is non-strict).
    """
    a = frozenset(infected)
    e = frozenset(edge)
    if e not in h.edges:
        raise InputError(f"{fmt_set(e)} is not an edge")
    touch = e & a
    b = e - a
    if not touch or not b:
        return None
    for x in touch:
        for f in h.incidence[x]:
            if f != e and not f <= a:
                return None
    return b


@dataclass(frozen=True)
class InfectionSequence:
    """Chain ``C = P_1 < P_2 < ... < P_m = X`` with the edge used at each step."""

    sets: tuple
    steps: tuple  # ((edge, increment), ...)

    @property
    def length(self) -> int:
        return len(self.sets)

    def verify(self, h: Hypergraph) -> bool:
        if not self.sets or self.sets[-1] != h.nodes:
            return False
        if len(self.steps) != len(self.sets) - 1:
            return False
        for (p, q), (edge, inc) in zip(zip(self.sets, self.sets[1:]), self.steps):
            if not p < q or q - p != inc:
                return False
            if edge not in h.edges or can_spread(h, p, edge) != inc:
                return False
        return True

    def render(self) -> str:
        return " ⊊ ".join(fmt_set(s) for s in self.sets)


def _check_start(h: Hypergraph, control: Iterable[int]) -> frozenset:
    c = frozenset(control)
    if not c:
        raise InputError("control set is empty")
    if not c <= h.nodes:
        raise InputError(f"control nodes {sorted(c - h.nodes)} are not hypergraph nodes")
    return c


StepFilter = Callable[[frozenset, frozenset], bool]


def find_infection_sequence(h: Hypergraph, control: Iterable[int], mode: str = "exact",
                            max_nodes: int = EXACT_MAX_NODES,
                            allow: Optional[StepFilter] = None) -> Optional[InfectionSequence]:
    """Witness chain from ``control`` to all nodes, or None.

    ``exact`` runs a breadth-first search over infected sets (edges tried in input
    order, so the witness is reproducible); ``greedy`` follows the first admissible
    spread at every step and may miss a witness. ``allow(infected, edge)`` can veto
    individual spreads.
    """
    c = _check_start(h, control)
    if mode not in ("exact", "greedy"):
        raise InputError(f"unknown search mode {mode!r}")

    def moves(a):
        for e in h.edges:
            b = can_spread(h, a, e)
            if b is not None and (allow is None or allow(a, e)):
                yield e, b

    if mode == "greedy":
        sets, steps = [c], []
        a = c
        while a != h.nodes:
            step = next(moves(a), None)
            if step is None:
                return None
            a = a | step[1]
            sets.append(a)
            steps.append(step)
        return InfectionSequence(tuple(sets), tuple(steps))

    if len(h.nodes) > max_nodes:
        raise ResourceError(
            f"exact infection search limited to {max_nodes} nodes, hypergraph has {len(h.nodes)}",
            stage="infection",
        )
    parent = {c: None}
    queue = deque([c])
    while queue:
        a = queue.popleft()
        if a == h.nodes:
            break
        for e, b in moves(a):
            nxt = a | b
            if nxt not in parent:
                parent[nxt] = (a, e, b)
                queue.append(nxt)
    if h.nodes not in parent:
        return None
    sets, steps = [h.nodes], []
    cur = h.nodes
    while parent[cur] is not None:
        prev, e, b = parent[cur]
        sets.append(prev)
        steps.append((e, b))
        cur = prev
    return InfectionSequence(tuple(reversed(sets)), tuple(reversed(steps)))


def is_infecting(h: Hypergraph, control: Iterable[int], max_nodes: int = EXACT_MAX_NODES) -> bool:
    return find_infection_sequence(h, control, "exact", max_nodes) is not None


def minimal_infecting_sets(h: Hypergraph, max_size: int, find_all: bool = True,
                           budget: int = DEFAULT_SUBSET_BUDGET) -> list:
    """Smallest infecting sets of size at most ``max_size``, in lexicographic order.

    Raises ResourceError (``partial`` holds what was found) after ``budget``
    candidate subsets.
    """
    if max_size < 1:
        raise InputError("max_size must be >= 1")
    nodes = sorted(h.nodes)
    tried = 0
    for size in range(1, min(max_size, len(nodes)) + 1):
        found = []
        for combo in itertools.combinations(nodes, size):
            if tried >= budget:
                raise ResourceError(
                    f"subset budget {budget} exhausted at size {size}",
                    stage="min-infect", partial=found,
                )
            tried += 1
            if is_infecting(h, combo):
                found.append(frozenset(combo))
                if not find_all:
                    return found
        if found:
            return found
    return []
