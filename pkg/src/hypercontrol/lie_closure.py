"""Real Lie closure of skew-Hermitian generators and classification of the result.

Matrices are handled as real vectors ``[Re M, Im M]`` so that independence is
tested over the reals. The accepted elements form an HS-orthonormal set.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import IncompleteClosureError, InputError
from .operators import is_skew_hermitian

DEFAULT_TOL = 1e-9
# Candidates below this HS norm are treated as exact zeros (rounding residue).
ZERO_NORM = 1e-10
TRACE_TOL = 1e-9
SKEW_TOL = 1e-10
_BATCH = 512


def default_budget(n: int) -> int:
    return 4 * n**4


def _vec(ms: np.ndarray) -> np.ndarray:
    """Stack of (k, N, N) complex matrices -> (k, 2N^2) real vectors."""
    k = ms.shape[0]
    return np.concatenate([ms.real.reshape(k, -1), ms.imag.reshape(k, -1)], axis=1)


def _unvec(vs: np.ndarray, n: int) -> np.ndarray:
    nn = n * n
    return (vs[:, :nn] + 1j * vs[:, nn:]).reshape(-1, n, n)


@dataclass(frozen=True, eq=False)
class LieBasis:
    """HS-orthonormal basis of a generated real Lie algebra."""

    dim_space: int
    vectors: np.ndarray = field(repr=False)
    complete: bool
    tolerance: float
    commutators_used: int = 0

    @property
    def elements(self) -> np.ndarray:
        """Basis as a (k, N, N) stack of skew-Hermitian matrices."""
        return _unvec(self.vectors, self.dim_space)

    def __len__(self):
        return self.vectors.shape[0]

    @property
    def dimension(self) -> int:
        return self.vectors.shape[0]


def dimension(basis: LieBasis) -> int:
    return basis.dimension


class _Span:
    """Growing orthonormal set of real vectors with relative-residual acceptance."""

    def __init__(self, n: int, tol: float):
        self.n = n
        self.tol = tol
        self.cap = n * n
        self.q = np.zeros((min(64, self.cap), 2 * n * n))
        self.mats = np.zeros((self.q.shape[0], n, n), dtype=complex)
        self.k = 0

    def _grow(self):
        new = min(self.cap, 2 * self.q.shape[0])
        q = np.zeros((new, self.q.shape[1]))
        q[: self.k] = self.q[: self.k]
        m = np.zeros((new, self.n, self.n), dtype=complex)
        m[: self.k] = self.mats[: self.k]
        self.q, self.mats = q, m

    def project_out(self, r: np.ndarray) -> np.ndarray:
        if self.k:
            qk = self.q[: self.k]
            r = r - (r @ qk.T) @ qk
        return r

    def offer(self, cands: np.ndarray) -> int:
        """Offer a (m, 2N^2) batch in order; returns how many were accepted."""
        norms = np.linalg.norm(cands, axis=1)
        live = norms > ZERO_NORM
        if not live.any():
            return 0
        cands, norms = cands[live], norms[live]
        # two passes of classical Gram-Schmidt against the existing span
        r = self.project_out(self.project_out(cands))
        added = 0
        start = self.k
        for i in range(r.shape[0]):
            if self.k >= self.cap:
                break
            ri = r[i]
            nr = np.linalg.norm(ri)
            if nr <= self.tol * norms[i]:
                continue
            # re-orthogonalize against elements accepted earlier in this batch
            if self.k > start:
                fresh = self.q[start: self.k]
                ri = ri - (fresh @ ri) @ fresh
                nr = np.linalg.norm(ri)
                if nr <= self.tol * norms[i]:
                    continue
            q = ri / nr
            q = self.project_out(q[None, :])[0]
            q /= np.linalg.norm(q)
            if self.k == self.q.shape[0]:
                self._grow()
            self.q[self.k] = q
            self.mats[self.k] = _unvec(q[None, :], self.n)[0]
            self.k += 1
            added += 1
            if i + 1 < r.shape[0]:
                r[i + 1:] -= np.outer(r[i + 1:] @ q, q)
        return added


def closure(generators: Sequence[np.ndarray], budget: Optional[int] = None,
            tol: float = DEFAULT_TOL, strategy: str = "generators") -> LieBasis:
    """Orthonormal basis of the smallest real Lie algebra containing ``generators``.

    Worklist procedure over the growing basis. With ``strategy="pairwise"``
    element j is bracketed with every element i < j; with ``"generators"``
    (default) it is bracketed only with the orthonormalized generators, which
    spans the same algebra because left-normed brackets of generators already do.
    Residuals against the current span are kept when their norm exceeds ``tol``
    times the candidate norm. Stops early at N^2 (N^2 - 1 if every generator is
    traceless). Needing more than ``budget`` commutators gives ``complete=False``.
    """
    gens = [np.asarray(g, dtype=complex) for g in generators]
    if not gens:
        raise InputError("closure needs at least one generator")
    if strategy not in ("generators", "pairwise"):
        raise InputError(f"unknown closure strategy {strategy!r}")
    n = gens[0].shape[0]
    for idx, g in enumerate(gens):
        if g.shape != (n, n):
            raise InputError(f"generator {idx} has shape {g.shape}, expected {(n, n)}")
        if not is_skew_hermitian(g, SKEW_TOL * max(1.0, float(np.abs(g).max(initial=0.0)))):
            raise InputError(f"generator {idx} is not skew-Hermitian")
    if budget is None:
        budget = default_budget(n)
    traceless = all(abs(np.trace(g)) < TRACE_TOL * max(1.0, np.linalg.norm(g)) for g in gens)
    ceiling = n * n - 1 if traceless else n * n

    span = _Span(n, tol)
    span.offer(_vec(np.stack(gens)))
    n_gens = span.k
    used = 0
    complete = True
    j = 0
    while j < span.k and span.k < ceiling:
        if strategy == "pairwise":
            a = span.mats[j]
            partners = span.mats[:j]
        else:
            # a block of pending elements against all generators
            hi = min(span.k, j + max(1, _BATCH // max(n_gens, 1)))
            a = span.mats[j:hi, None]
            partners = span.mats[:n_gens][None]
        want = int(np.prod(np.broadcast_shapes(np.shape(a)[:-2], partners.shape[:-2])))
        if want and used + want > budget:
            complete = False
            break
        if want:
            comm = (a @ partners - partners @ a).reshape(-1, n, n)
            used += want
            span.offer(_vec(comm))
        j = j + 1 if strategy == "pairwise" else hi
    if span.k >= ceiling:
        complete = True
    vectors = span.q[: span.k].copy()
    vectors.setflags(write=False)
    return LieBasis(n, vectors, complete, tol, used)


def contains(basis: LieBasis, m: np.ndarray, tol: Optional[float] = None) -> bool:
    """Whether skew-Hermitian ``m`` lies in the span of ``basis``."""
    m = np.asarray(m, dtype=complex)
    if m.shape != (basis.dim_space, basis.dim_space):
        raise InputError(f"matrix shape {m.shape} does not match algebra dimension {basis.dim_space}")
    return bool(contains_many(basis, m[None], tol)[0])


def contains_many(basis: LieBasis, ms: np.ndarray, tol: Optional[float] = None) -> np.ndarray:
    tol = basis.tolerance if tol is None else tol
    v = _vec(np.asarray(ms, dtype=complex))
    norms = np.linalg.norm(v, axis=1)
    q = basis.vectors
    r = v
    for _ in range(2):
        r = r - (r @ q.T) @ q
    return (norms == 0) | (np.linalg.norm(r, axis=1) < tol * norms)


class AlgebraKind(enum.Enum):
    FULL_U = "FULL_U"
    SU = "SU"
    SYMPLECTIC_ISO = "SYMPLECTIC_ISO"
    OTHER = "OTHER"


_FLAGS = {
    AlgebraKind.FULL_U: (True, True),
    AlgebraKind.SU: (True, True),
    AlgebraKind.SYMPLECTIC_ISO: (False, True),
    AlgebraKind.OTHER: (False, False),
}


@dataclass(frozen=True)
class AlgebraClass:
    kind: AlgebraKind
    operator_controllable: bool
    state_controllable: bool

    @classmethod
    def of(cls, kind: AlgebraKind) -> "AlgebraClass":
        return cls(kind, *_FLAGS[kind])


def _require_complete(basis: LieBasis):
    if not basis.complete:
        raise IncompleteClosureError(
            f"budget exhausted after {basis.commutators_used} commutators "
            f"(dimension {basis.dimension} so far); refusing to classify",
            stage="lie",
        )


def classify(basis: LieBasis) -> AlgebraClass:
    _require_complete(basis)
    n = basis.dim_space
    d = basis.dimension
    if d == n * n:
        return AlgebraClass.of(AlgebraKind.FULL_U)
    if d == n * n - 1:
        traces = np.einsum("kii->k", basis.elements)
        if np.all(np.abs(traces) < TRACE_TOL):
            return AlgebraClass.of(AlgebraKind.SU)
    if n % 2 == 0 and d == (n // 2) * (n + 1):
        if find_invariant_antisymmetric_form(basis) is not None:
            return AlgebraClass.of(AlgebraKind.SYMPLECTIC_ISO)
    return AlgebraClass.of(AlgebraKind.OTHER)


def _form_residual(elements: np.ndarray, j: np.ndarray) -> float:
    r = np.transpose(elements, (0, 2, 1)) @ j + j @ elements
    return float(np.abs(r).max(initial=0.0))


def find_invariant_antisymmetric_form(basis: LieBasis, seed: int = 0) -> Optional[np.ndarray]:
    """Nondegenerate antisymmetric J with ``g^T J + J g = 0`` for every basis element.

    J is normalized to unit Frobenius norm. Returns None when no nondegenerate
    solution exists. Large algebras are first constrained by a few random
    combinations of basis elements; any candidate is verified on the full basis.
    """
    _require_complete(basis)
    n = basis.dim_space
    if n < 2:
        return None
    elems = basis.elements
    pairs = [(a, b) for a in range(n) for b in range(a + 1, n)]
    rows, cols = np.array([p[0] for p in pairs]), np.array([p[1] for p in pairs])
    rng = np.random.default_rng(seed)

    def constraint_matrix(gs):
        # column c is vec(g^T E_c + E_c g) for E_c = e_a e_b^T - e_b e_a^T
        blocks = []
        for g in gs:
            gt = g.T
            # g^T E_c has columns: (g^T)[:, a] at column b, minus (g^T)[:, b] at column a
            m = np.zeros((n, n, len(pairs)), dtype=complex)
            idx = np.arange(len(pairs))
            m[:, cols, idx] += gt[:, rows]
            m[:, rows, idx] -= gt[:, cols]
            # E_c g has rows: g[b, :] at row a, minus g[a, :] at row b
            m[rows, :, idx] += g[cols, :]
            m[cols, :, idx] -= g[rows, :]
            blocks.append(m.reshape(n * n, len(pairs)))
        return np.vstack(blocks)

    k = elems.shape[0]
    full_size = k * n * n * len(pairs)
    tries = [k] if full_size <= 2e7 else [4, 8]
    for r in tries:
        if r >= k:
            gs = elems
        else:
            coeffs = rng.standard_normal((r, k))
            gs = np.einsum("rk,kij->rij", coeffs, elems)
        a = constraint_matrix(gs)
        _, s, vh = np.linalg.svd(a, full_matrices=True)
        smax = s[0] if s.size and s[0] > 0 else 1.0
        rank = int(np.sum(s > 1e-8 * smax))
        null = vh[rank:].conj()
        if null.shape[0] == 0:
            return None
        # a generic member of the nullspace is nondegenerate if any member is
        weights = rng.standard_normal(null.shape[0]) + 1j * rng.standard_normal(null.shape[0])
        if null.shape[0] == 1:
            weights = np.ones(1)
        params = weights @ null
        j = np.zeros((n, n), dtype=complex)
        j[rows, cols] = params
        j[cols, rows] = -params
        j /= np.linalg.norm(j)
        # fix the global phase so a real form comes out real
        pivot = j.flat[np.argmax(np.abs(j))]
        j *= abs(pivot) / pivot
        if _form_residual(elems, j) > 1e-9:
            continue
        if np.linalg.svd(j, compute_uv=False)[-1] <= 1e-8:
            return None
        return j
    return None
