"""
Numerical search for product states and low Schmidt rank states in a subspace.

Product states are found by maximizing <phi|P_S|phi> over product vectors
with a cyclic seesaw: each step replaces one factor by the top eigenvector of
P_S contracted with all the other factors.  Restarts run as a batch, but each
one is frozen as soon as it converges, so its result does not depend on the
batch it was run in.

Presence is certified by an explicit state with overlap >= 1 - membership_tol.
Absence is heuristic: the best objective over all restarts stays below that.
"""

from __future__ import annotations

import string
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np
import scipy.linalg

from .bounds import low_rank_count_formula, product_count_formula, s_max
from .errors import CountingUnsupported, DegeneratePencilError, InvalidInput
from .hilbert import (
    ProductState,
    StateVector,
    Subspace,
    bipartite_matrix,
    canonical_phase,
    orthonormal_complement,
    product_from_unnormalized,
    subspace_overlap,
    tensor,
    _normalize_cut,
)
from .sampling import as_rng, random_vector

TIE_TOL = 1e-14
POLISH_WINDOW = 1e-4


@dataclass(frozen=True)
class SearchConfig:
    restarts: int = 200
    max_sweeps: int = 500
    conv_tol: float = 1e-12
    membership_tol: float = 1e-8
    cluster_tol: float = 0.99
    saturation_window: int = 50
    batch_size: int = 50
    polish: bool = True

    def __post_init__(self):
        for name in ("conv_tol", "membership_tol", "cluster_tol"):
            v = getattr(self, name)
            if not 0 < v < 1:
                raise InvalidInput(f"{name} must lie in (0, 1), got {v}")
        for name in ("restarts", "max_sweeps", "saturation_window", "batch_size"):
            if getattr(self, name) < 1:
                raise InvalidInput(f"{name} must be a positive integer")

    def replace(self, **kw) -> "SearchConfig":
        return SearchConfig(**{**asdict(self), **kw})

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class SearchResult:
    verdict: str
    best_overlap: float
    best_state: Optional[object]
    restarts_used: int
    sweeps_mean: float
    sweeps_max: int
    max_decrease: float = 0.0
    heuristic_absence: bool = field(init=False)

    def __post_init__(self):
        self.heuristic_absence = self.verdict == "not-found"

    @property
    def found(self) -> bool:
        return self.verdict == "found"


@dataclass
class CountResult:
    representatives: list
    count: int
    saturated: bool
    formula_expected: object
    restarts_used: int

    @property
    def formula_match(self) -> bool:
        return self.count == self.formula_expected


# ---------------------------------------------------------------------------
# seesaw


def _einsum_spec(m: int, i: int) -> str:
    letters = string.ascii_letters[:m]
    ops = [letters + "Z"]
    for j in range(m):
        if j != i:
            ops.append("Y" + letters[j])
    return ",".join(ops) + "->Y" + letters[i] + "Z"


def _partial_vectors(T: np.ndarray, factors: list, i: int) -> np.ndarray:
    """V[r, :, c] = (prod_{j != i} <f_j[r]|) applied to basis column c."""
    m = len(factors)
    others = [np.conj(factors[j]) for j in range(m) if j != i]
    return np.einsum(_einsum_spec(m, i), T, *others, optimize=True)


def _canonical_rows(U: np.ndarray) -> np.ndarray:
    """Rotate each row so its first entry with modulus > 1e-12 is real positive."""
    mask = np.abs(U) > 1e-12
    first = np.argmax(mask, axis=1)
    a = U[np.arange(U.shape[0]), first]
    ph = np.where(np.abs(a) > 0, np.conj(a) / np.where(np.abs(a) > 0, np.abs(a), 1), 1)
    return U * ph[:, None]


def _top_eigvecs(M: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    w, U = np.linalg.eigh(M)
    top = w[:, -1]
    vec = _canonical_rows(U[:, :, -1])
    if w.shape[1] > 1:
        tied = np.flatnonzero(w[:, -1] - w[:, -2] < TIE_TOL)
        for r in tied:
            cands = [canonical_phase(U[r, :, k]) for k in range(w.shape[1])
                     if w[r, -1] - w[r, k] < TIE_TOL]
            vec[r] = max(cands, key=lambda v: tuple(np.column_stack([v.real, v.imag]).ravel()))
    return vec, top


def _objective(B: np.ndarray, factors: list) -> np.ndarray:
    R = factors[0].shape[0]
    glob = factors[0]
    for f in factors[1:]:
        glob = (glob[:, :, None] * f[:, None, :]).reshape(R, -1)
    return np.sum(np.abs(glob.conj() @ B) ** 2, axis=1)


def seesaw_step(factors, S: Subspace, i: int):
    """One seesaw update of factor ``i``.

    Returns the new unit factor and the objective <phi|P_S|phi> after the
    update, which is the top eigenvalue of the contracted d_i x d_i matrix.
    """
    T = S.basis.reshape(S.space.dims + (S.s,))
    batch = [np.asarray(f, dtype=complex)[None, :] for f in factors]
    V = _partial_vectors(T, batch, i)
    M = V @ V.conj().transpose(0, 2, 1)
    vec, top = _top_eigvecs(M)
    return vec[0], float(top[0])


def _seesaw_batch(S: Subspace, factors: list, cfg: SearchConfig):
    """Run cyclic seesaw sweeps on a batch of restarts.

    Returns final factors, objectives, sweeps used per restart and the
    largest single-step objective decrease observed (rounding only).
    """
    T = S.basis.reshape(S.space.dims + (S.s,))
    m = len(factors)
    R = factors[0].shape[0]
    factors = [f.copy() for f in factors]
    obj = _objective(S.basis, factors)
    sweeps = np.zeros(R, dtype=int)
    active = np.arange(R)
    max_decrease = 0.0
    for _ in range(cfg.max_sweeps):
        if active.size == 0:
            break
        sub = [f[active] for f in factors]
        start = obj[active]
        cur = start.copy()
        for i in range(m):
            V = _partial_vectors(T, sub, i)
            M = V @ V.conj().transpose(0, 2, 1)
            vec, top = _top_eigvecs(M)
            max_decrease = max(max_decrease, float(np.max(cur - top)))
            sub[i] = vec
            cur = top
        for j in range(m):
            factors[j][active] = sub[j]
        obj[active] = cur
        sweeps[active] += 1
        active = active[cur - start >= cfg.conv_tol]
    return factors, obj, sweeps, max_decrease


def _complement_basis(S: Subspace) -> Optional[np.ndarray]:
    if S.s == S.space.D:
        return None
    return orthonormal_complement(S).basis


def _kron_rows(a: list) -> np.ndarray:
    glob = a[0]
    for f in a[1:]:
        glob = np.kron(glob, f)
    return glob


def polish_product(S: Subspace, factors, C: Optional[np.ndarray] = None, max_iter: int = 50):
    """Gauss-Newton refinement of a near-member product state.

    Solves C^dagger xi(a) = 0 for the product vector xi(a) = a^1 (x) ... (x) a^m,
    C an orthonormal basis of the complement of S, taking minimum-norm steps.
    Progress is judged on the residual norm ||C^dagger xi||, which resolves
    distances to S far below what the objective 1 - ||C^dagger xi||^2 can.
    Returns the best factors seen and their objective.
    """
    if C is None:
        C = _complement_basis(S)
    dims = S.space.dims
    a = [np.asarray(f, dtype=complex) / np.linalg.norm(f) for f in factors]
    if C is None:
        return a, float(_objective(S.basis, [f[None] for f in a])[0])
    Ch = C.conj().T
    best, best_res = [f.copy() for f in a], np.inf
    stall = 0
    for _ in range(max_iter):
        g = Ch @ _kron_rows(a)
        res = float(np.linalg.norm(g))
        if res < best_res:
            best, best_res = [f.copy() for f in a], res
            stall = 0
        else:
            stall += 1
            if stall >= 3:
                break
        if res < 1e-15:
            break
        cols = []
        for j in range(len(a)):
            pre = _kron_rows([np.ones(1, dtype=complex)] + a[:j])
            post = _kron_rows([np.ones(1, dtype=complex)] + a[j + 1:])
            dxi = np.kron(np.kron(pre[:, None], np.eye(dims[j])), post[:, None])
            cols.append(Ch @ dxi)
        J = np.hstack(cols)
        step = np.linalg.lstsq(J, -g, rcond=None)[0]
        off = 0
        for j, d in enumerate(dims):
            a[j] = a[j] + step[off:off + d]
            a[j] = a[j] / np.linalg.norm(a[j])
            off += d
    return best, 1.0 - best_res ** 2


def _initial_factors(space, rng, indices) -> list:
    per_restart = []
    for r in indices:
        child = rng.child(int(r))
        per_restart.append([random_vector(d, child) for d in space.dims])
    return [np.array([fs[j] for fs in per_restart]) for j in range(space.m)]


def _run_block(S, cfg, rng, indices, C):
    """Seesaw plus optional polish for restarts ``indices``; one entry per restart."""
    init = _initial_factors(S.space, rng, indices)
    factors, obj, sweeps, max_dec = _seesaw_batch(S, init, cfg)
    out = []
    for k in range(len(indices)):
        fs = [f[k] for f in factors]
        o = float(obj[k])
        if cfg.polish and o >= 1 - POLISH_WINDOW:
            fs, o = polish_product(S, fs, C)
        out.append((fs, o, int(sweeps[k])))
    return out, max_dec


def _blocks(total: int, size: int):
    for start in range(0, total, size):
        yield np.arange(start, min(total, start + size))


def _to_product(space, fs) -> ProductState:
    return product_from_unnormalized([canonical_phase(f) for f in fs], space)


def find_product_in_subspace(S: Subspace, cfg: SearchConfig = SearchConfig(), rng=None) -> SearchResult:
    """Multi-restart seesaw search for a product state inside ``S``.

    Restart ``r`` starts from a Haar-random product state drawn from
    ``rng.child(r)``.  The search stops after the first batch that contains a
    member (objective >= 1 - membership_tol) or when the restart budget is
    spent.
    """
    rng = as_rng(rng)
    C = _complement_basis(S) if cfg.polish else None
    best_fs, best_obj = None, -np.inf
    used = 0
    sweeps = []
    max_dec = 0.0
    for idx in _blocks(cfg.restarts, cfg.batch_size):
        res, dec = _run_block(S, cfg, rng, idx, C)
        max_dec = max(max_dec, dec)
        used += len(idx)
        for fs, o, sw in res:
            sweeps.append(sw)
            if o > best_obj:
                best_fs, best_obj = fs, o
        if best_obj >= 1 - cfg.membership_tol:
            break
    found = best_obj >= 1 - cfg.membership_tol
    state = _to_product(S.space, best_fs) if best_fs is not None else None
    return SearchResult(
        verdict="found" if found else "not-found",
        best_overlap=float(best_obj),
        best_state=state,
        restarts_used=used,
        sweeps_mean=float(np.mean(sweeps)),
        sweeps_max=int(np.max(sweeps)),
        max_decrease=max_dec,
    )


def _canonical_key(x: StateVector):
    v = canonical_phase(x.amps)
    return tuple(np.round(np.column_stack([v.real, v.imag]).ravel(), 12))


def enumerate_products(S: Subspace, cfg: SearchConfig = SearchConfig(), rng=None) -> CountResult:
    """Count the distinct product states in ``S`` by clustering repeated searches.

    Each restart that reaches membership is merged into an existing
    representative when the per-factor product fidelity is at least
    ``cluster_tol``.  Counting stops after ``saturation_window`` consecutive
    restarts that add no representative, or at the restart budget.

    Raises
    ------
    CountingUnsupported
        If ``S.s > s_max + 1``, where the generic count is infinite.
    """
    formula = product_count_formula(S.space, S.s)
    if S.s > s_max(S.space) + 1:
        raise CountingUnsupported(
            f"s={S.s} exceeds s_max+1={s_max(S.space) + 1}; generic count is infinite",
            formula_expected="infinite")
    rng = as_rng(rng)
    C = _complement_basis(S) if cfg.polish else None
    reps: list[ProductState] = []
    streak = 0
    used = 0
    saturated = False
    for idx in _blocks(cfg.restarts, cfg.batch_size):
        res, _ = _run_block(S, cfg, rng, idx, C)
        for fs, o, _sw in res:
            used += 1
            novel = False
            if o >= 1 - cfg.membership_tol:
                p = _to_product(S.space, fs)
                if all(p.fidelity(q) < cfg.cluster_tol for q in reps):
                    reps.append(p)
                    novel = True
            streak = 0 if novel else streak + 1
            if streak >= cfg.saturation_window:
                saturated = True
                break
        if saturated:
            break
    reps.sort(key=lambda p: _canonical_key(p.global_state))
    return CountResult(reps, len(reps), saturated, formula, used)


# ---------------------------------------------------------------------------
# exact pencil oracle


@dataclass
class PencilRoots:
    count: int
    roots: list          # homogeneous (alpha, beta), unit norm
    ratios: list         # t = beta / alpha  (member A + t B); inf when alpha = 0
    states: list         # normalized members alpha*a + beta*b


def _projective_distance(p, q) -> float:
    p = np.asarray(p) / np.linalg.norm(p)
    q = np.asarray(q) / np.linalg.norm(q)
    return float(np.sqrt(max(0.0, 1 - abs(np.vdot(p, q)) ** 2)))


def pencil_roots(A: np.ndarray, B: np.ndarray, root_tol: float = 1e-6) -> tuple[list, list]:
    """Projectively distinct roots (alpha, beta) of det(alpha*A + beta*B).

    Returns the unit-norm homogeneous roots and the ratios t = beta/alpha, so
    that A + t*B is singular.  Roots come from the generalized eigenvalues of
    the pencil (A, -B).

    Raises
    ------
    DegeneratePencilError
        If the binary form vanishes identically.
    """
    A = np.asarray(A, dtype=complex)
    B = np.asarray(B, dtype=complex)
    if A.shape != B.shape or A.shape[0] != A.shape[1]:
        raise InvalidInput(f"pencil needs two square matrices of equal size, got {A.shape}, {B.shape}")
    d = A.shape[0]
    probes = np.exp(2j * np.pi * np.arange(d + 1) / (d + 1))
    scale = (np.linalg.norm(A) + np.linalg.norm(B)) ** d
    if max(abs(np.linalg.det(A * np.cos(0.3) + B * p)) for p in probes) < 1e-12 * scale:
        raise DegeneratePencilError("det(alpha A + beta B) vanishes identically")
    num, den = scipy.linalg.eig(A, -B, right=False, homogeneous_eigvals=True)
    pairs = []
    for a_, b_ in zip(num, den):
        # eigenvalue a_/b_ = beta/alpha
        pair = np.array([b_, a_], dtype=complex)
        nrm = np.linalg.norm(pair)
        if nrm == 0:
            raise DegeneratePencilError("singular pencil")
        pair = canonical_phase(pair / nrm)
        if all(_projective_distance(pair, q) > root_tol for q in pairs):
            pairs.append(pair)
    ratios = [complex(p[1] / p[0]) if abs(p[0]) > 1e-15 else complex(np.inf) for p in pairs]
    return pairs, ratios


def count_rank_deficient_pencil(S: Subspace, cut=(0,), root_tol: float = 1e-6) -> PencilRoots:
    """Rank-deficient members of a two-dimensional subspace of a d x d space.

    With A and B the two basis columns reshaped across ``cut``, the members
    alpha*A + beta*B of rank <= d - 1 are the roots of the degree-d binary
    form det(alpha*A + beta*B).  For d = 2 these are the product states of S.
    """
    if S.s != 2:
        raise InvalidInput("pencil oracle needs a two-dimensional subspace")
    a = S.column(0)
    b = S.column(1)
    A, _, _ = bipartite_matrix(a, cut)
    B, _, _ = bipartite_matrix(b, cut)
    pairs, ratios = pencil_roots(A, B, root_tol)
    states = [StateVector.from_amplitudes(S.space, p[0] * a.amps + p[1] * b.amps) for p in pairs]
    return PencilRoots(len(pairs), pairs, ratios, states)


# ---------------------------------------------------------------------------
# bounded Schmidt rank


def _low_rank_batch(S: Subspace, X: np.ndarray, r: int, cut, cfg: SearchConfig):
    """Alternating projections between rank <= r states and S, batched over rows of X."""
    M0, left, right = bipartite_matrix(StateVector(S.space, X[0]), cut)
    dims = S.space.dims
    perm = left + right
    inv = np.argsort(perm)
    shape = M0.shape
    B = S.basis
    R = X.shape[0]

    def truncate(X):
        T = X.reshape((R,) + dims).transpose((0,) + tuple(p + 1 for p in perm)).reshape((R,) + shape)
        U, sv, Vh = np.linalg.svd(T, full_matrices=False)
        Y = (U[:, :, :r] * sv[:, None, :r]) @ Vh[:, :r, :]
        Y = Y.reshape((R,) + tuple(dims[p] for p in perm)).transpose((0,) + tuple(i + 1 for i in inv))
        Y = Y.reshape(R, -1)
        return Y / np.linalg.norm(Y, axis=1, keepdims=True)

    res = np.full(R, np.inf)
    Y = X
    sweeps = np.zeros(R, dtype=int)
    active = np.ones(R, dtype=bool)
    for _ in range(cfg.max_sweeps):
        if not active.any():
            break
        Ynew = truncate(X)
        proj = Ynew.conj() @ B
        rnew = 1 - np.sum(np.abs(proj) ** 2, axis=1)
        Xnew = proj.conj() @ B.T
        Xnew = Xnew / np.linalg.norm(Xnew, axis=1, keepdims=True)
        upd = active
        done = np.abs(res - rnew) < cfg.conv_tol
        Y = np.where(upd[:, None], Ynew, Y)
        X = np.where(upd[:, None], Xnew, X)
        res = np.where(upd, rnew, res)
        sweeps += upd
        active = active & ~done
    return Y, res, sweeps


def _low_rank_runs(S, r, cfg, rng, cut):
    space = S.space
    left, right = _normalize_cut(space, cut)
    dL = int(np.prod([space.dims[i] for i in left]))
    dR = int(np.prod([space.dims[i] for i in right]))
    if not 1 <= r < min(dL, dR):
        raise InvalidInput(f"need 1 <= r < min({dL}, {dR}), got r={r}")
    rng = as_rng(rng)
    for idx in _blocks(cfg.restarts, cfg.batch_size):
        X = np.array([S.basis @ random_vector(S.s, rng.child(int(k))) for k in idx])
        X = X / np.linalg.norm(X, axis=1, keepdims=True)
        Y, res, sweeps = _low_rank_batch(S, X, r, (left, right), cfg)
        yield [(Y[k], float(res[k]), int(sweeps[k])) for k in range(len(idx))]


def _rank_ok(space, y, r, cut) -> bool:
    from .hilbert import schmidt

    return schmidt(StateVector.from_amplitudes(space, y), cut).rank_at(1e-8) <= r


def find_low_rank_in_subspace(S: Subspace, r: int, cfg: SearchConfig = SearchConfig(),
                              rng=None, cut=(0,)) -> SearchResult:
    """Search ``S`` for a state of Schmidt rank <= r across ``cut``.

    Each restart starts from a random state of S and alternates SVD truncation
    to rank r with orthogonal projection onto S.  A restart succeeds when its
    truncated state has residual 1 - <y|P_S|y> <= membership_tol.
    """
    best_y, best_res = None, np.inf
    used = 0
    sweeps = []
    for block in _low_rank_runs(S, r, cfg, rng, cut):
        for y, res, sw in block:
            used += 1
            sweeps.append(sw)
            if res < best_res:
                best_y, best_res = y, res
        if best_res <= cfg.membership_tol and _rank_ok(S.space, best_y, r, cut):
            break
    found = best_res <= cfg.membership_tol and _rank_ok(S.space, best_y, r, cut)
    state = StateVector.from_amplitudes(S.space, canonical_phase(best_y))
    return SearchResult(
        verdict="found" if found else "not-found",
        best_overlap=float(1 - best_res),
        best_state=state,
        restarts_used=used,
        sweeps_mean=float(np.mean(sweeps)),
        sweeps_max=int(np.max(sweeps)),
    )


def enumerate_low_rank(S: Subspace, r: int, cfg: SearchConfig = SearchConfig(),
                       rng=None, cut=(0,)) -> CountResult:
    """Cluster the distinct rank <= r fixed points found in ``S``.

    Representatives are merged when their global fidelity |<x|y>|^2 is at
    least ``cluster_tol``.  Saturation follows :func:`enumerate_products`.
    """
    space = S.space
    left, right = _normalize_cut(space, cut)
    dL = int(np.prod([space.dims[i] for i in left]))
    dR = int(np.prod([space.dims[i] for i in right]))
    formula = low_rank_count_formula(dL, dR, r, S.s) if r < min(dL, dR) else None
    if formula == "infinite":
        raise CountingUnsupported("generic count of low-rank states is infinite here")
    reps: list[StateVector] = []
    streak = 0
    used = 0
    saturated = False
    for block in _low_rank_runs(S, r, cfg, rng, cut):
        for y, res, _sw in block:
            used += 1
            novel = False
            if res <= cfg.membership_tol and _rank_ok(space, y, r, cut):
                x = StateVector.from_amplitudes(space, canonical_phase(y))
                if all(abs(np.vdot(x.amps, q.amps)) ** 2 < cfg.cluster_tol for q in reps):
                    reps.append(x)
                    novel = True
            streak = 0 if novel else streak + 1
            if streak >= cfg.saturation_window:
                saturated = True
                break
        if saturated:
            break
    reps.sort(key=_canonical_key)
    return CountResult(reps, len(reps), saturated, formula, used)


def verify_product_member(S: Subspace, p: ProductState, membership_tol: float = 1e-8) -> bool:
    """Independent check: rank one across every single-factor cut and inside S."""
    from .hilbert import is_product

    return is_product(p.global_state) and subspace_overlap(S, p) >= 1 - membership_tol
