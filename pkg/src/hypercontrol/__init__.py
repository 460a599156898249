"""Controllability of multipartite quantum systems: Lie closure and hypergraph infection."""

from .analyzer import (ControlAlgebra, ControllabilityReport, Verdict, brute_force_controllability,
                       check_control_algebra, check_local_controllability, cross_validate)
from .errors import IncompleteClosureError, InputError, ResourceError
from .hypergraph import (Hypergraph, InfectionSequence, can_spread, find_infection_sequence,
                         is_infecting, minimal_infecting_sets)
from .lie_closure import AlgebraClass, AlgebraKind, LieBasis, classify, closure, contains
from .operators import OperatorTerm, SubsystemLayout, commutator, embed, hs_inner, pauli_matrix, term_matrix
from .propagation import check_drift_propagation, check_edge_propagation, subsystem_algebra_basis
from .system import DriftEdge, Options, SystemSpec

__version__ = "0.1.0"
