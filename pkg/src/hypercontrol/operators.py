"""Dense operator algebra on tensor products of finite-dimensional subsystems.

Operators are plain complex ``numpy`` arrays. Subsystems are labelled by
positive integer ids and tensor factors are always ordered by ascending id.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .errors import InputError

HERMITIAN_TOL = 1e-12
DEFAULT_MAX_DIM = 64

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}
for _m in PAULI.values():
    _m.setflags(write=False)


def pauli_matrix(label: str) -> np.ndarray:
    """Return the 2x2 Pauli matrix for ``label`` in ``{"I", "X", "Y", "Z"}``."""
    try:
        return PAULI[label].copy()
    except (KeyError, TypeError):
        raise InputError(f"unknown Pauli label {label!r}") from None


@dataclass(frozen=True)
class SubsystemLayout:
    """Ordered collection of ``(id, dim)`` pairs describing the composite space."""

    subsystems: tuple

    def __post_init__(self):
        pairs = []
        for entry in self.subsystems:
            sid, dim = entry
            if isinstance(sid, bool) or not isinstance(sid, (int, np.integer)) or sid < 1:
                raise InputError(f"subsystem id must be a positive integer, got {sid!r}")
            if isinstance(dim, bool) or not isinstance(dim, (int, np.integer)) or dim < 2:
                raise InputError(f"subsystem {sid} has dimension {dim!r}; need an integer >= 2")
            pairs.append((int(sid), int(dim)))
        if not pairs:
            raise InputError("layout needs at least one subsystem")
        ids = [p[0] for p in pairs]
        if len(set(ids)) != len(ids):
            raise InputError(f"duplicate subsystem ids in {ids}")
        object.__setattr__(self, "subsystems", tuple(sorted(pairs)))

    @classmethod
    def qubits(cls, n: int) -> "SubsystemLayout":
        return cls(tuple((i, 2) for i in range(1, n + 1)))

    @property
    def ids(self) -> tuple:
        return tuple(p[0] for p in self.subsystems)

    @property
    def dims(self) -> dict:
        return dict(self.subsystems)

    @property
    def total_dim(self) -> int:
        return math.prod(p[1] for p in self.subsystems)

    def dim_of(self, ids: Iterable[int]) -> int:
        dims = self.dims
        out = 1
        for i in ids:
            if i not in dims:
                raise InputError(f"unknown node {i}")
            out *= dims[i]
        return out

    def check_total_dim(self, max_dim: int = DEFAULT_MAX_DIM) -> None:
        if self.total_dim > max_dim:
            raise InputError(
                f"total dimension {self.total_dim} exceeds the dense cap {max_dim}"
            )


@dataclass(frozen=True)
class OperatorTerm:
    """One Hermitian summand ``coeff * payload`` acting on ``support``.

    Exactly one of ``pauli`` (id -> letter) and ``matrix`` is given. An explicit
    matrix is ordered by ascending support id.
    """

    support: frozenset
    pauli: Optional[Mapping[int, str]] = None
    matrix: Optional[np.ndarray] = field(default=None, compare=False)
    coeff: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "support", frozenset(int(i) for i in self.support))
        if not self.support:
            raise InputError("operator term has empty support")
        if (self.pauli is None) == (self.matrix is None):
            raise InputError("operator term needs exactly one of a Pauli string or a matrix")
        if self.pauli is not None:
            pauli = {int(k): v for k, v in self.pauli.items()}
            if set(pauli) != set(self.support):
                raise InputError(
                    f"Pauli string keys {sorted(pauli)} do not match support {sorted(self.support)}"
                )
            for k, v in pauli.items():
                if v not in PAULI:
                    raise InputError(f"unknown Pauli label {v!r} on node {k}")
            object.__setattr__(self, "pauli", dict(sorted(pauli.items())))
        else:
            m = np.array(self.matrix, dtype=complex)
            if m.ndim != 2 or m.shape[0] != m.shape[1]:
                raise InputError(f"explicit matrix must be square, got shape {m.shape}")
            dev = np.max(np.abs(m - m.conj().T)) if m.size else 0.0
            if dev > HERMITIAN_TOL:
                raise InputError(f"explicit matrix is not Hermitian (max |M - M^dag| = {dev:.3e})")
            m.setflags(write=False)
            object.__setattr__(self, "matrix", m)
        coeff = float(self.coeff)
        if not math.isfinite(coeff):
            raise InputError(f"coefficient must be finite, got {self.coeff!r}")
        object.__setattr__(self, "coeff", coeff)

    @classmethod
    def from_pauli(cls, letters: Mapping[int, str], coeff: float = 1.0) -> "OperatorTerm":
        """Build a Pauli-string term; identity letters are dropped from the support."""
        kept = {int(k): v for k, v in letters.items() if v != "I"}
        if not kept:
            kept = {int(k): v for k, v in letters.items()}
        return cls(support=frozenset(kept), pauli=kept, coeff=coeff)

    def __eq__(self, other):
        if not isinstance(other, OperatorTerm):
            return NotImplemented
        if (self.support, self.pauli, self.coeff) != (other.support, other.pauli, other.coeff):
            return False
        if self.matrix is None:
            return other.matrix is None
        return other.matrix is not None and np.array_equal(self.matrix, other.matrix)

    def __hash__(self):
        return hash((self.support, self.coeff))

    def check_against(self, layout: SubsystemLayout) -> None:
        dims = layout.dims
        for i in sorted(self.support):
            if i not in dims:
                raise InputError(f"unknown node {i}")
        if self.pauli is not None:
            for i in self.pauli:
                if dims[i] != 2:
                    raise InputError(f"Pauli label on node {i} of dimension {dims[i]}")
        else:
            want = layout.dim_of(self.support)
            if self.matrix.shape[0] != want:
                raise InputError(
                    f"matrix has dimension {self.matrix.shape[0]}, support needs {want}"
                )

    def local_matrix(self) -> np.ndarray:
        """The payload on its own support, without the coefficient."""
        if self.pauli is None:
            return np.array(self.matrix)
        out = np.ones((1, 1), dtype=complex)
        for i in sorted(self.support):
            out = np.kron(out, PAULI[self.pauli[i]])
        return out


def _check_space(layout: SubsystemLayout, space: Sequence[int]) -> tuple:
    space = tuple(sorted(int(i) for i in space))
    if len(set(space)) != len(space):
        raise InputError(f"repeated ids in space {space}")
    layout.dim_of(space)
    return space


def embed(op: np.ndarray, support: Iterable[int], space: Sequence[int],
          layout: SubsystemLayout) -> np.ndarray:
    """Place ``op`` (acting on ``support``) into ``space`` with identities elsewhere."""
    space = _check_space(layout, space)
    support = tuple(sorted(int(i) for i in support))
    if not set(support) <= set(space):
        raise InputError(f"support {list(support)} is not contained in space {list(space)}")
    op = np.asarray(op, dtype=complex)
    d_sup = layout.dim_of(support)
    if op.shape != (d_sup, d_sup):
        raise InputError(f"operator shape {op.shape} does not match support dimension {d_sup}")
    rest = tuple(i for i in space if i not in support)
    if not rest:
        return op.copy()
    full = np.kron(op, np.eye(layout.dim_of(rest), dtype=complex))
    # axes are currently (support..., rest...) on both row and column side
    current = support + rest
    dims = [layout.dims[i] for i in current]
    perm = [current.index(i) for i in space]
    n = len(current)
    t = full.reshape(dims + dims).transpose(perm + [n + p for p in perm])
    d = full.shape[0]
    return np.ascontiguousarray(t.reshape(d, d))


def term_matrix(term: OperatorTerm, space: Sequence[int], layout: SubsystemLayout) -> np.ndarray:
    """``coeff * payload`` embedded into ``space``."""
    term.check_against(layout)
    return term.coeff * embed(term.local_matrix(), term.support, space, layout)


def sum_terms(terms: Iterable[OperatorTerm], space: Sequence[int],
              layout: SubsystemLayout) -> np.ndarray:
    d = layout.dim_of(space)
    out = np.zeros((d, d), dtype=complex)
    for t in terms:
        out += term_matrix(t, space, layout)
    return out


def _same_shape(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape or a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InputError(f"dimension mismatch: {a.shape} vs {b.shape}")


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    _same_shape(a, b)
    return a @ b - b @ a


def hs_inner(a: np.ndarray, b: np.ndarray) -> float:
    """Real Hilbert-Schmidt inner product ``Re tr(a^dag b)``."""
    _same_shape(a, b)
    return float(np.real(np.vdot(a, b)))


def is_hermitian(m: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    return bool(np.max(np.abs(m - m.conj().T), initial=0.0) < tol)


def is_skew_hermitian(m: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    return bool(np.max(np.abs(m + m.conj().T), initial=0.0) < tol)


def hermitian_basis(d: int) -> list:
    """HS-orthonormal basis of d x d Hermitian matrices (Paulis/sqrt2 for d=2).

    For d > 2 the generalized Gell-Mann matrices plus the scaled identity.
    """
    if d == 2:
        return [PAULI[c] / math.sqrt(2) for c in "IXYZ"]
    out = [np.eye(d, dtype=complex) / math.sqrt(d)]
    for j in range(d):
        for k in range(j + 1, d):
            s = np.zeros((d, d), dtype=complex)
            s[j, k] = s[k, j] = 1 / math.sqrt(2)
            a = np.zeros((d, d), dtype=complex)
            a[j, k] = -1j / math.sqrt(2)
            a[k, j] = 1j / math.sqrt(2)
            out += [s, a]
    for l in range(1, d):
        diag = np.zeros(d)
        diag[:l] = 1
        diag[l] = -l
        out.append(np.diag(diag / np.linalg.norm(diag)).astype(complex))
    return out
