"""
Dense complex linear algebra on multipartite Hilbert spaces.

Amplitudes are stored in row-major multi-index order over (k_1, ..., k_m),
factor 1 slowest, so ``amps.reshape(dims)`` recovers the amplitude tensor.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Sequence

import numpy as np

from .errors import EmptyComplementError, InvalidInput, LinearDependenceError

NORM_TOL = 1e-12
BASIS_TOL = 1e-10
SCHMIDT_RANK_TOL = 1e-8
DEP_TOL = 1e-10


@dataclass(frozen=True)
class SpaceSpec:
    """Tensor product of factor spaces with dimensions ``dims``."""

    dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if len(dims) < 1:
            raise InvalidInput("a space needs at least one factor")
        if any(d < 2 for d in dims):
            raise InvalidInput(f"every factor dimension must be >= 2, got {dims}")
        object.__setattr__(self, "dims", dims)

    @property
    def m(self) -> int:
        return len(self.dims)

    @property
    def D(self) -> int:
        return reduce(lambda a, b: a * b, self.dims, 1)

    @property
    def excess(self) -> int:
        """Sum of (d_j - 1), the dimension of the set of product states."""
        return sum(d - 1 for d in self.dims)

    def repeated(self, copies: int) -> "SpaceSpec":
        """Space of ``copies`` separated copies, every factor kept distinct."""
        if copies < 1:
            raise InvalidInput("copies must be >= 1")
        return SpaceSpec(self.dims * copies)

    def __str__(self):
        return "x".join(str(d) for d in self.dims)


def as_space(dims) -> SpaceSpec:
    if isinstance(dims, SpaceSpec):
        return dims
    return SpaceSpec(tuple(dims))


def canonical_phase(v: np.ndarray, tol: float = NORM_TOL) -> np.ndarray:
    """Rotate ``v`` so its first component with modulus > tol is real positive."""
    v = np.asarray(v, dtype=complex)
    idx = np.flatnonzero(np.abs(v) > tol)
    if idx.size == 0:
        return v.copy()
    a = v[idx[0]]
    return v * (np.conj(a) / abs(a))


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class StateVector:
    """Unit vector of a :class:`SpaceSpec`."""

    space: SpaceSpec
    amps: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amps, dtype=complex).reshape(-1)
        if amps.shape != (self.space.D,):
            raise InvalidInput(f"expected {self.space.D} amplitudes, got {amps.size}")
        if not np.all(np.isfinite(amps)):
            raise InvalidInput("amplitudes must be finite")
        if abs(np.linalg.norm(amps) - 1.0) > NORM_TOL:
            raise InvalidInput("state amplitudes must have unit norm")
        object.__setattr__(self, "amps", _frozen(amps))

    @classmethod
    def from_amplitudes(cls, space, amps) -> "StateVector":
        """Normalize ``amps`` and wrap them."""
        space = as_space(space)
        amps = np.asarray(amps, dtype=complex).reshape(-1)
        nrm = np.linalg.norm(amps)
        if nrm == 0 or not np.isfinite(nrm):
            raise InvalidInput("cannot normalize a zero or non-finite vector")
        return cls(space, amps / nrm)

    @classmethod
    def basis(cls, space, index) -> "StateVector":
        """Computational basis vector; ``index`` is flat or a multi-index."""
        space = as_space(space)
        if not np.isscalar(index):
            index = int(np.ravel_multi_index(tuple(index), space.dims))
        amps = np.zeros(space.D, dtype=complex)
        amps[index] = 1.0
        return cls(space, amps)

    def canonicalize(self) -> "StateVector":
        return StateVector(self.space, canonical_phase(self.amps))

    def tensor_view(self) -> np.ndarray:
        return self.amps.reshape(self.space.dims)

    def __len__(self):
        return self.space.D


@dataclass(frozen=True, eq=False)
class ProductState:
    """Product of one unit vector per factor, with its assembled global vector."""

    space: SpaceSpec
    factors: tuple[np.ndarray, ...]
    global_state: StateVector

    @property
    def amps(self) -> np.ndarray:
        return self.global_state.amps

    def fidelity(self, other: "ProductState") -> float:
        """Per-factor product fidelity  prod_j |<a_j|b_j>|^2  (phase invariant)."""
        f = 1.0
        for a, b in zip(self.factors, other.factors):
            f *= abs(np.vdot(a, b)) ** 2
        return float(f)


def kron_all(vectors: Sequence[np.ndarray]) -> np.ndarray:
    return reduce(np.kron, [np.asarray(v, dtype=complex) for v in vectors])


def tensor(factors: Sequence[np.ndarray], space) -> ProductState:
    """Assemble a product state from per-factor unit vectors.

    The global amplitude at multi-index (k_1, ..., k_m) is
    ``prod_j factors[j][k_j]``.
    """
    space = as_space(space)
    if len(factors) != space.m:
        raise InvalidInput(f"expected {space.m} factors, got {len(factors)}")
    fs = []
    for j, (f, d) in enumerate(zip(factors, space.dims)):
        f = np.asarray(f, dtype=complex).reshape(-1)
        if f.size != d:
            raise InvalidInput(f"factor {j} has length {f.size}, expected {d}")
        if abs(np.linalg.norm(f) - 1.0) > NORM_TOL:
            raise InvalidInput(f"factor {j} is not a unit vector")
        fs.append(_frozen(f))
    glob = kron_all(fs)
    # Kronecker products of unit vectors lose norm only to rounding.
    glob = glob / np.linalg.norm(glob)
    return ProductState(space, tuple(fs), StateVector(space, glob))


def product_from_unnormalized(factors: Sequence[np.ndarray], space) -> ProductState:
    return tensor([np.asarray(f) / np.linalg.norm(f) for f in factors], space)


def _check_same_space(a, b):
    if a.space != b.space:
        raise InvalidInput(f"space mismatch: {a.space} vs {b.space}")


def overlap(x, y) -> complex:
    """<x|y>, conjugate-linear in ``x``."""
    if isinstance(x, ProductState):
        x = x.global_state
    if isinstance(y, ProductState):
        y = y.global_state
    _check_same_space(x, y)
    return complex(np.vdot(x.amps, y.amps))


@dataclass(frozen=True, eq=False)
class Subspace:
    """Subspace given by a D x s matrix with orthonormal columns."""

    space: SpaceSpec
    basis: np.ndarray

    def __post_init__(self):
        B = np.asarray(self.basis, dtype=complex)
        if B.ndim == 1:
            B = B[:, None]
        if B.ndim != 2 or B.shape[0] != self.space.D:
            raise InvalidInput(f"basis must be {self.space.D} x s, got {B.shape}")
        s = B.shape[1]
        if not 1 <= s <= self.space.D:
            raise InvalidInput(f"subspace dimension {s} out of range")
        err = np.abs(B.conj().T @ B - np.eye(s)).max()
        if err > BASIS_TOL:
            raise InvalidInput(f"basis columns are not orthonormal (error {err:.2e})")
        object.__setattr__(self, "basis", _frozen(B))

    @property
    def s(self) -> int:
        return self.basis.shape[1]

    def projector(self) -> np.ndarray:
        return self.basis @ self.basis.conj().T

    def column(self, k) -> StateVector:
        return StateVector.from_amplitudes(self.space, self.basis[:, k])


def _stack(states) -> tuple[SpaceSpec, np.ndarray]:
    states = list(states)
    if not states:
        raise InvalidInput("need at least one state")
    space = states[0].space
    for x in states[1:]:
        _check_same_space(states[0], x)
    return space, np.column_stack([x.amps for x in states])


def span(states, dep_tol: float = DEP_TOL) -> Subspace:
    """Orthonormal basis for the span of ``states``.

    Raises
    ------
    LinearDependenceError
        If the smallest singular value of the stacked amplitudes is below
        ``dep_tol``.
    """
    space, M = _stack(states)
    U, sv, _ = np.linalg.svd(M, full_matrices=False)
    if sv[-1] < dep_tol:
        rank = int(np.sum(sv >= dep_tol))
        raise LinearDependenceError(
            f"{M.shape[1]} states span only {rank} dimensions",
            rank=rank, smallest_singular_value=float(sv[-1]))
    return Subspace(space, U)


def orthonormal_complement(S: Subspace) -> Subspace:
    """Orthonormal basis of the orthogonal complement of ``S``."""
    if S.s >= S.space.D:
        raise EmptyComplementError("the complement of the full space is empty")
    U, _, _ = np.linalg.svd(S.basis, full_matrices=True)
    return Subspace(S.space, U[:, S.s:])


def subspace_overlap(S: Subspace, x) -> float:
    """<x|P_S|x> = ||S^dagger x||^2."""
    if isinstance(x, ProductState):
        x = x.global_state
    _check_same_space(S, x)
    return float(np.sum(np.abs(S.basis.conj().T @ x.amps) ** 2))


def _normalize_cut(space: SpaceSpec, cut) -> tuple[tuple[int, ...], tuple[int, ...]]:
    if isinstance(cut, (int, np.integer)):
        cut = (int(cut),)
    if len(cut) == 2 and not np.isscalar(cut[0]):
        left, right = tuple(cut[0]), tuple(cut[1])
    else:
        left = tuple(int(i) for i in cut)
        right = tuple(i for i in range(space.m) if i not in left)
    left = tuple(sorted(int(i) for i in left))
    right = tuple(sorted(int(i) for i in right))
    if not left or not right:
        raise InvalidInput("both sides of a cut must be nonempty")
    if sorted(left + right) != list(range(space.m)) or len(set(left + right)) != space.m:
        raise InvalidInput(f"cut {cut} is not a bipartition of {space.m} factors")
    return left, right


def bipartite_matrix(x, cut) -> tuple[np.ndarray, tuple, tuple]:
    """Reshape amplitudes into the dL x dR matrix M(x) across ``cut``."""
    if isinstance(x, ProductState):
        x = x.global_state
    space = x.space
    left, right = _normalize_cut(space, cut)
    T = x.amps.reshape(space.dims).transpose(left + right)
    dL = int(np.prod([space.dims[i] for i in left]))
    return T.reshape(dL, -1), left, right


@dataclass(frozen=True, eq=False)
class SchmidtData:
    space: SpaceSpec
    cut: tuple[tuple[int, ...], tuple[int, ...]]
    coeffs: np.ndarray
    left_vecs: np.ndarray   # columns u_l
    right_vecs: np.ndarray  # columns v_l

    def rank_at(self, tol: float = SCHMIDT_RANK_TOL) -> int:
        return int(np.sum(self.coeffs > tol))

    def reconstruct(self) -> np.ndarray:
        """Global amplitudes  sum_l sqrt(lambda_l) u_l (x) v_l  in standard order."""
        left, right = self.cut
        M = (self.left_vecs * np.sqrt(self.coeffs)) @ self.right_vecs.T
        perm_dims = [self.space.dims[i] for i in left + right]
        T = M.reshape(perm_dims).transpose(np.argsort(left + right))
        return T.reshape(-1)


def schmidt(x, cut) -> SchmidtData:
    """Schmidt decomposition of ``x`` across a bipartition of its factors.

    ``cut`` is either the left index set or a pair (left, right).
    """
    if isinstance(x, ProductState):
        x = x.global_state
    M, left, right = bipartite_matrix(x, cut)
    U, sv, Vh = np.linalg.svd(M, full_matrices=False)
    lam = sv ** 2
    return SchmidtData(x.space, (left, right), lam, U, Vh.T)


def single_factor_cuts(space: SpaceSpec) -> list[tuple[int, ...]]:
    if space.m == 1:
        return []
    if space.m == 2:
        return [(0,)]
    return [(j,) for j in range(space.m)]


def is_product(x, tol: float = SCHMIDT_RANK_TOL) -> bool:
    """Schmidt rank 1 across every single-factor cut."""
    if isinstance(x, ProductState):
        x = x.global_state
    return all(schmidt(x, c).rank_at(tol) == 1 for c in single_factor_cuts(x.space))
