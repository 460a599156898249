"""Two routes to a controllability verdict and a consistency check between them.

The local route combines the control-algebra assumption, the propagation
property of the drift and hypergraph infection from the control set. The
brute-force route closes all generators on the full space and classifies the
result. The local route is sufficient only: its failure is never reported as
"not controllable".
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ResourceError
from .hypergraph import InfectionSequence, find_infection_sequence, fmt_set
from .lie_closure import AlgebraKind, classify, closure, contains_many
from .operators import OperatorTerm, SubsystemLayout, hermitian_basis, term_matrix
from .propagation import PropagationReport, SubsetOracle, check_drift_propagation, subsystem_algebra_basis
from .system import DriftEdge, Options, SystemSpec  # noqa: F401


class Verdict(enum.Enum):
    CONTROLLABLE_BY_THEOREM_2 = "CONTROLLABLE_BY_THEOREM_2"
    CONTROLLABLE_BY_BRUTE_FORCE = "CONTROLLABLE_BY_BRUTE_FORCE"
    INCONCLUSIVE = "INCONCLUSIVE"
    NOT_CONTROLLABLE_BRUTE_FORCE = "NOT_CONTROLLABLE_BRUTE_FORCE"


class ControlAlgebra(enum.Enum):
    FULL_U = "FULL_U"
    SU_ONLY = "SU_ONLY"
    INSUFFICIENT = "INSUFFICIENT"
    ASSUMED = "ASSUMED"


@dataclass(frozen=True)
class BruteForceResult:
    kind: Optional[AlgebraKind]  # None when the closure ran out of budget
    dimension: int
    dim_space: int
    complete: bool
    commutators: int
    operator_controllable: bool = False
    state_controllable: bool = False


@dataclass(frozen=True)
class ControllabilityReport:
    verdict: Verdict
    failing_stage: Optional[str] = None
    control_algebra: Optional[ControlAlgebra] = None
    propagation: Optional[PropagationReport] = None
    infection: Optional[InfectionSequence] = None
    brute_force: Optional[BruteForceResult] = None
    notes: tuple = ()
    control_set: frozenset = field(default_factory=frozenset)


@dataclass(frozen=True)
class CrossValidation:
    local: ControllabilityReport
    brute: ControllabilityReport
    status: str  # "consistent" | "criterion incomplete here" | "inconsistent" | "unknown"
    chain_inclusions: tuple = ()  # (P_j, contained?) for each set of the witness chain

    @property
    def consistent(self) -> bool:
        return self.status != "inconsistent"


def _control_closure(spec: SystemSpec):
    space = sorted(spec.control_set)
    gens = [1j * term_matrix(t, space, spec.layout) for t in spec.control_terms]
    gens = [g for g in gens if np.abs(g).max() > 0]
    if not gens:
        return None
    return closure(gens, budget=spec.options.budget, tol=spec.options.tol)


def check_control_algebra(spec: SystemSpec) -> ControlAlgebra:
    """Classify what the explicit controls generate on the control subsystem."""
    return _assess_controls(spec)[0]


def _assess_controls(spec: SystemSpec):
    if spec.assume_full:
        return ControlAlgebra.ASSUMED, ()
    basis = _control_closure(spec)
    if basis is None:
        return ControlAlgebra.INSUFFICIENT, ("control terms are all zero",)
    if not basis.complete:
        return ControlAlgebra.INSUFFICIENT, ("control-algebra closure budget exhausted",)
    kind = classify(basis).kind
    if kind is AlgebraKind.FULL_U:
        return ControlAlgebra.FULL_U, ()
    if kind is AlgebraKind.SU:
        return ControlAlgebra.SU_ONLY, ()
    return ControlAlgebra.INSUFFICIENT, (
        f"controls generate a {basis.dimension}-dimensional algebra on {fmt_set(spec.control_set)}",
    )


def check_local_controllability(spec: SystemSpec, subset_mode: Optional[str] = None) -> ControllabilityReport:
    """Sufficient criterion: full control algebra, propagating drift, infecting control set.

    ``subset_mode="witness"`` only asks for propagation on the subsets the
    infection actually uses (edge intersected with the infected set at each step).
    """
    mode = subset_mode or spec.options.subset_mode
    h = spec.hypergraph
    h.validate()
    notes = []
    ctrl, ctrl_notes = _assess_controls(spec)
    notes.extend(ctrl_notes)
    c = spec.control_set
    ok_ctrl = ctrl in (ControlAlgebra.FULL_U, ControlAlgebra.ASSUMED)
    if ctrl is ControlAlgebra.SU_ONLY:
        if spec.options.allow_su_controls:
            ok_ctrl = True
            notes.append("outside the criterion's assumptions: controls generate su(C), not u(C)")
        else:
            notes.append("controls generate su(C) only; the criterion assumes u(C)")

    if mode == "witness":
        oracle = SubsetOracle(spec)
        witness = find_infection_sequence(
            h, c, "exact",
            allow=lambda a, e: oracle(e, e & a).status == "pass")
        prop = oracle.report()
        plain = witness or find_infection_sequence(h, c, "exact")
        if witness is None:
            failing = "infection" if plain is None else "propagation"
            if plain is not None:
                notes.append("every infection path needs a subset without the propagation property")
        else:
            failing = None
            notes.append("propagation checked only on the subsets used by the witness chain")
        infection = witness or plain
    else:
        prop = check_drift_propagation(spec, mode)
        infection = find_infection_sequence(h, c, "exact")
        failing = None
        if prop.status != "pass":
            failing = "propagation"
            for rec in prop.failing_edges():
                bad = [f"{fmt_set(k.subset)}:{k.achieved}/{k.target}" for k in rec.checks if k.status != "pass"]
                notes.append(f"edge {fmt_set(rec.nodes)} {rec.status}: " + ", ".join(bad))
        elif infection is None:
            failing = "infection"
    if infection is None and failing is None:
        failing = "infection"
    if not ok_ctrl:
        failing = "control_algebra"

    verdict = Verdict.CONTROLLABLE_BY_THEOREM_2 if failing is None else Verdict.INCONCLUSIVE
    if failing == "infection":
        notes.append(f"{fmt_set(c)} does not infect the hypergraph")
    return ControllabilityReport(verdict, failing, ctrl, prop, infection, None, tuple(notes), c)


def canonical_control_terms(control_set, layout: SubsystemLayout) -> list:
    """Fixed generating set of u(C): local algebras on each node, the identity,
    and one diagonal coupling per node pair (ZZ for qubits)."""
    nodes = sorted(control_set)
    terms = []
    for i in nodes:
        d = layout.dims[i]
        if d == 2:
            terms += [OperatorTerm.from_pauli({i: c}) for c in "XYZ"]
        else:
            terms += [OperatorTerm(frozenset([i]), matrix=m) for m in hermitian_basis(d)[1:]]
    d0 = layout.dims[nodes[0]]
    terms.append(OperatorTerm(frozenset([nodes[0]]), matrix=np.eye(d0)))
    for a, b in itertools.combinations(nodes, 2):
        if layout.dims[a] == 2 and layout.dims[b] == 2:
            terms.append(OperatorTerm.from_pauli({a: "Z", b: "Z"}))
        else:
            za = hermitian_basis(layout.dims[a])[-1]
            zb = hermitian_basis(layout.dims[b])[-1]
            terms.append(OperatorTerm(frozenset([a, b]), matrix=np.kron(za, zb)))
    return terms


def global_generators(spec: SystemSpec) -> list:
    space = spec.layout.ids
    terms = list(spec.control_terms)
    if spec.assume_full:
        terms = canonical_control_terms(spec.control_set, spec.layout)
    gens = [1j * spec.drift_matrix()]
    gens += [1j * term_matrix(t, space, spec.layout) for t in terms]
    return [g for g in gens if np.abs(g).max() > 0]


def brute_force_closure(spec: SystemSpec):
    layout = spec.layout
    if layout.total_dim > spec.options.max_dim:
        raise ResourceError(
            f"total dimension {layout.total_dim} exceeds brute-force cap {spec.options.max_dim}; "
            "use the local (infection) route or raise --max-dim",
            stage="lie",
        )
    gens = global_generators(spec)
    n = layout.total_dim
    if not gens:
        gens = [np.zeros((n, n), dtype=complex)]
    return closure(gens, budget=spec.options.budget, tol=spec.options.tol)


def brute_force_controllability(spec: SystemSpec, basis=None) -> ControllabilityReport:
    """Full-space closure and classification; ``basis`` may be passed in if already computed."""
    if basis is None:
        basis = brute_force_closure(spec)
    notes = []
    if spec.assume_full:
        notes.append("controls materialized as the canonical u(C) generating set")
    if not basis.complete:
        res = BruteForceResult(None, basis.dimension, basis.dim_space, False, basis.commutators_used)
        notes.append("closure budget exhausted")
        return ControllabilityReport(Verdict.INCONCLUSIVE, "lie", brute_force=res,
                                     notes=tuple(notes), control_set=spec.control_set)
    cls = classify(basis)
    res = BruteForceResult(cls.kind, basis.dimension, basis.dim_space, True, basis.commutators_used,
                           cls.operator_controllable, cls.state_controllable)
    if cls.kind is AlgebraKind.OTHER:
        verdict = Verdict.NOT_CONTROLLABLE_BRUTE_FORCE
    else:
        verdict = Verdict.CONTROLLABLE_BY_BRUTE_FORCE
        if cls.kind is AlgebraKind.SYMPLECTIC_ISO:
            notes.append("state controllable, not operator controllable")
    return ControllabilityReport(verdict, None, brute_force=res, notes=tuple(notes),
                                 control_set=spec.control_set)


def chain_inclusions(spec: SystemSpec, basis, chain: InfectionSequence) -> tuple:
    """For each infected set P_j of the witness: is u(P_j) inside the generated algebra?"""
    out = []
    space = spec.layout.ids
    for p in chain.sets:
        local = subsystem_algebra_basis(p, space, spec.layout)
        out.append((p, bool(np.all(contains_many(basis, np.stack(local))))))
    return tuple(out)


def cross_validate(spec: SystemSpec, subset_mode: Optional[str] = None) -> CrossValidation:
    """Both routes on one spec. A local verdict of controllable that brute force
    does not confirm is an inconsistency (a bug, the criterion being proved)."""
    local = check_local_controllability(spec, subset_mode)
    basis = brute_force_closure(spec)
    brute = brute_force_controllability(spec, basis)
    bf = brute.brute_force
    inclusions = ()
    if not bf.complete:
        status = "unknown"
    elif local.verdict is Verdict.CONTROLLABLE_BY_THEOREM_2:
        status = "consistent" if bf.kind in (AlgebraKind.FULL_U, AlgebraKind.SU) else "inconsistent"
    elif bf.kind in (AlgebraKind.FULL_U, AlgebraKind.SU):
        status = "criterion incomplete here"
    else:
        status = "consistent"
    if bf.complete and local.infection is not None and local.verdict is Verdict.CONTROLLABLE_BY_THEOREM_2:
        inclusions = chain_inclusions(spec, basis, local.infection)
        if not all(ok for _, ok in inclusions):
            status = "inconsistent"
    return CrossValidation(local, brute, status, inclusions)
