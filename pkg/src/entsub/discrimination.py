"""
Unambiguous local discrimination of pure-state sets.

A set of states psi_1..psi_n is certified locally unambiguously
distinguishable by n product states phi_j with <phi_j|psi_k> = 0 exactly when
j != k.  Each phi_j is searched for in the orthogonal complement of the span
of the other states.  The certificate then yields the POVM
{w_j |phi_j><phi_j|, 1 - sum_j w_j |phi_j><phi_j|}, which with w_j = 1/n is
implementable by guessing j and confirming it with local binary measurements.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .bounds import locc_threshold
from .errors import (
    IndefiniteRemainderError,
    InvalidInput,
    NumericalConsistencyError,
    SearchFailure,
)
from .hilbert import (
    DEP_TOL,
    ProductState,
    SpaceSpec,
    StateVector,
    as_space,
    kron_all,
    orthonormal_complement,
    schmidt,
    single_factor_cuts,
    span,
)
from .sampling import TRIAL_BLOCK_BASE, as_rng
from .search import SearchConfig, find_product_in_subspace

DIAG_FLOOR = 1e-6
OFFDIAG_TOL = 1e-8
POVM_TOL = 1e-10
MAX_LIFTED_FACTORS = 12
MAX_LIFTED_DIM = 4096

EXPECTED_DISTINGUISHABLE = "expected-distinguishable"
EXPECTED_INDISTINGUISHABLE = "expected-indistinguishable"


@dataclass(frozen=True, eq=False)
class StateSet:
    """Candidate states psi_1..psi_n sharing one space.

    Linear independence is checked by :meth:`check_independent`, which every
    certificate search calls; a base set for the multi-copy lift may be
    dependent.
    """

    space: SpaceSpec
    states: tuple[StateVector, ...]

    def __post_init__(self):
        states = tuple(self.states)
        if len(states) < 2:
            raise InvalidInput("a state set needs at least two states")
        for x in states:
            if x.space != self.space:
                raise InvalidInput("all states must live in the same space")
        object.__setattr__(self, "states", states)

    @classmethod
    def of(cls, states: Sequence[StateVector]) -> "StateSet":
        states = list(states)
        if not states:
            raise InvalidInput("empty state list")
        return cls(states[0].space, tuple(states))

    @property
    def n(self) -> int:
        return len(self.states)

    def matrix(self) -> np.ndarray:
        return np.column_stack([x.amps for x in self.states])

    @property
    def gram(self) -> np.ndarray:
        M = self.matrix()
        return M.conj().T @ M

    def check_independent(self, dep_tol: float = DEP_TOL):
        if self.n > self.space.D:
            raise InvalidInput(f"{self.n} states cannot be independent in dimension {self.space.D}")
        span(self.states, dep_tol)

    def lifted(self, copies: int) -> "StateSet":
        """|psi_j>^{(x) c} on the space with every factor repeated c times."""
        space = self.space.repeated(copies)
        return StateSet(space, tuple(StateVector(space, kron_all([x.amps] * copies))
                                     for x in self.states))


@dataclass
class Certificate:
    space: SpaceSpec
    states: tuple[StateVector, ...]
    products: tuple[ProductState, ...]
    overlaps: np.ndarray            # O[j, k] = <phi_j|psi_k>
    diag_floor: float = DIAG_FLOOR
    offdiag_tol: float = OFFDIAG_TOL
    copies: int = 1
    base_dims: Optional[tuple[int, ...]] = None
    search_overlaps: tuple[float, ...] = ()

    @property
    def n(self) -> int:
        return len(self.products)

    @property
    def valid(self) -> bool:
        return _verdict(self.overlaps, self.diag_floor, self.offdiag_tol)

    def state_set(self) -> StateSet:
        return StateSet(self.space, tuple(self.states))


def _overlap_matrix(products, states) -> np.ndarray:
    P = np.column_stack([p.amps for p in products])
    Q = np.column_stack([x.amps for x in states])
    return P.conj().T @ Q


def _offdiag_max(O) -> float:
    n = O.shape[0]
    mask = ~np.eye(n, dtype=bool)
    return float(np.abs(O[mask]).max()) if n > 1 else 0.0


def _verdict(O, diag_floor, offdiag_tol) -> bool:
    return bool(np.abs(np.diag(O)).min() > diag_floor and _offdiag_max(O) <= offdiag_tol)


def complement_witness(vector: StateVector) -> dict:
    """Schmidt rank (tol 1e-8) across each single-factor cut of a vector."""
    return {str(list(c)): schmidt(vector, c).rank_at(1e-8) for c in single_factor_cuts(vector.space)}


def chefles_certificate(psi: StateSet, cfg: SearchConfig = SearchConfig(), rng=None,
                        diag_floor: float = DIAG_FLOOR,
                        offdiag_tol: float = OFFDIAG_TOL) -> Certificate:
    """Search for n product states witnessing local unambiguous distinguishability.

    For each j the product search runs in the complement of
    span(psi_k, k != j) with stream ``rng.child(j)``; the state found must also
    have |<phi_j|psi_j>| > diag_floor.

    Raises
    ------
    SearchFailure
        For the first j whose complement search finds no product state.  When
        that complement is one-dimensional, ``witness`` holds its exact Schmidt
        ranks across single-factor cuts; any rank above 1 proves absence.
    InvalidInput
        If the states are linearly dependent.
    """
    if not isinstance(psi, StateSet):
        psi = StateSet.of(psi)
    psi.check_independent()
    rng = as_rng(rng)
    products = []
    best = []
    for j in range(psi.n):
        others = [x for k, x in enumerate(psi.states) if k != j]
        comp = orthonormal_complement(span(others))
        res = find_product_in_subspace(comp, cfg, rng.child(j))
        if not res.found:
            witness = complement_witness(comp.column(0)) if comp.s == 1 else None
            raise SearchFailure(
                f"no product state found orthogonal to all states but #{j} "
                f"(best overlap {res.best_overlap:.6g}; heuristic)",
                index=j, best_overlap=res.best_overlap, witness=witness)
        products.append(res.best_state)
        best.append(res.best_overlap)
    O = _overlap_matrix(products, psi.states)
    return Certificate(psi.space, psi.states, tuple(products), O, diag_floor, offdiag_tol,
                       search_overlaps=tuple(best))


@dataclass
class CertificateCheck:
    max_offdiag: float
    min_diag: float
    valid: bool


def validate_certificate(cert: Certificate, psi: Optional[StateSet] = None) -> CertificateCheck:
    """Recompute the overlap matrix from the stored product states and judge it."""
    states = psi.states if psi is not None else cert.states
    if len(states) != cert.n or states[0].space != cert.space:
        raise InvalidInput("certificate and state set do not match")
    O = _overlap_matrix(cert.products, states)
    return CertificateCheck(
        max_offdiag=_offdiag_max(O),
        min_diag=float(np.abs(np.diag(O)).min()),
        valid=_verdict(O, cert.diag_floor, cert.offdiag_tol),
    )


@dataclass
class UnambiguousPovm:
    space: SpaceSpec
    weights: np.ndarray
    products: tuple[ProductState, ...]
    elements: list = field(repr=False)   # elements[0] inconclusive, elements[k] identifies psi_k

    @property
    def n(self) -> int:
        return len(self.products)

    def completeness_error(self) -> float:
        total = sum(self.elements)
        return float(np.abs(total - np.eye(self.space.D)).max())

    def min_eigenvalues(self) -> np.ndarray:
        return np.array([np.linalg.eigvalsh(E)[0] for E in self.elements])


def build_povm(cert: Certificate, weights=None) -> UnambiguousPovm:
    """POVM {w_j |phi_j><phi_j|} plus the inconclusive remainder.

    Default weights are 1/n, for which the remainder is always positive.
    Custom weights are checked for positivity only, not for whether the
    resulting measurement can be carried out by separated parties.

    Raises
    ------
    IndefiniteRemainderError
        If custom weights make the remainder's minimum eigenvalue < -1e-10.
    """
    if not cert.valid:
        raise InvalidInput("cannot build a POVM from an invalid certificate")
    n = cert.n
    w = np.full(n, 1.0 / n) if weights is None else np.asarray(weights, dtype=float).reshape(-1)
    if w.shape != (n,) or np.any(w <= 0):
        raise InvalidInput("weights must be n positive numbers")
    D = cert.space.D
    elems = [np.outer(p.amps, p.amps.conj()) * wj for p, wj in zip(cert.products, w)]
    E0 = np.eye(D, dtype=complex) - sum(elems)
    E0 = (E0 + E0.conj().T) / 2
    lo = float(np.linalg.eigvalsh(E0)[0])
    if lo < -POVM_TOL:
        raise IndefiniteRemainderError(f"remainder has eigenvalue {lo:.3g}", lo)
    return UnambiguousPovm(cert.space, w, cert.products, [E0] + elems)


def outcome_probabilities(povm: UnambiguousPovm, psi: StateSet) -> np.ndarray:
    """P[j, k] = <psi_j|E_k|psi_j>, clipped at zero and renormalized.

    Raises
    ------
    NumericalConsistencyError
        If any probability is below -1e-10 or a row sums away from one by
        more than 1e-10.
    """
    Q = psi.matrix()
    P = np.array([np.real(np.einsum("ij,ik,kj->j", Q.conj(), E, Q)) for E in povm.elements]).T
    if P.min() < -POVM_TOL:
        raise NumericalConsistencyError(f"negative outcome probability {P.min():.3g}")
    P = np.clip(P, 0, None)
    rows = P.sum(axis=1)
    if np.abs(rows - 1).max() > POVM_TOL:
        raise NumericalConsistencyError("outcome probabilities do not sum to one")
    return P / rows[:, None]


def predicted_success(povm: UnambiguousPovm, psi: StateSet) -> float:
    """(1/n) sum_j w_j |<phi_j|psi_j>|^2 under a uniform prior."""
    d = np.array([abs(np.vdot(p.amps, x.amps)) ** 2 for p, x in zip(povm.products, psi.states)])
    return float(np.mean(povm.weights * d))


@dataclass
class SimulationReport:
    trials: int
    tallies: np.ndarray        # rows j: (correct, inconclusive, misidentified)
    empirical_success: Optional[float]
    predicted_success: float
    sigma: float

    @property
    def misidentified(self) -> int:
        return int(self.tallies[:, 2].sum())

    @property
    def interval(self) -> tuple[float, float]:
        return (self.predicted_success - 3 * self.sigma, self.predicted_success + 3 * self.sigma)

    @property
    def within_3sigma(self) -> Optional[bool]:
        if self.empirical_success is None:
            return None
        lo, hi = self.interval
        return bool(lo <= self.empirical_success <= hi)


def simulate(povm: UnambiguousPovm, psi: StateSet, trials: int, rng=None,
             block_size: int = 100_000) -> SimulationReport:
    """Monte-Carlo run of the measurement with a uniformly chosen true state.

    Trials are split into blocks; block b draws from ``rng.child(2**32 + b)``.
    Within a block the number of trials per true state is multinomial, and the
    outcomes for each true state are multinomial in the Born probabilities.
    """
    if trials < 0:
        raise InvalidInput("trials must be nonnegative")
    rng = as_rng(rng)
    P = outcome_probabilities(povm, psi)
    n = psi.n
    tallies = np.zeros((n, 3), dtype=np.int64)
    nblocks = -(-trials // block_size)
    for b in range(nblocks):
        stream = rng.child(TRIAL_BLOCK_BASE + b)
        size = min(block_size, trials - b * block_size)
        per_state = stream.multinomial(size, np.full(n, 1.0 / n))
        for j in range(n):
            counts = stream.multinomial(per_state[j], P[j])
            correct = counts[j + 1]
            tallies[j, 0] += correct
            tallies[j, 1] += counts[0]
            tallies[j, 2] += per_state[j] - correct - counts[0]
    pred = predicted_success(povm, psi)
    if trials == 0:
        return SimulationReport(0, tallies, None, pred, 0.0)
    emp = float(tallies[:, 0].sum() / trials)
    sigma = float(np.sqrt(pred * (1 - pred) / trials))
    return SimulationReport(trials, tallies, emp, pred, sigma)


def multicopy_certificate(psi, copies: int, cfg: SearchConfig = SearchConfig(), rng=None,
                          max_factors: int = MAX_LIFTED_FACTORS,
                          max_dim: int = MAX_LIFTED_DIM, **kw) -> Certificate:
    """Certificate for ``copies`` separated copies.

    Every state is lifted to |psi_j>^{(x) c} on c*m factors and the ordinary
    certificate search is run there, with product structure over all c*m
    factors.  With c = 1 this is exactly :func:`chefles_certificate`.
    """
    if not isinstance(psi, StateSet):
        psi = StateSet.of(psi)
    if copies < 1:
        raise InvalidInput("copies must be >= 1")
    if psi.space.m * copies > max_factors or psi.space.D ** copies > max_dim:
        raise InvalidInput(f"lifted space too large: {psi.space.m * copies} factors, "
                           f"dimension {psi.space.D ** copies}")
    lifted = psi.lifted(copies) if copies > 1 else psi
    cert = chefles_certificate(lifted, cfg, rng, **kw)
    cert.copies = copies
    cert.base_dims = psi.space.dims
    return cert


def generic_verdict(space, n: int, c: int = 1) -> str:
    """Verdict that holds for almost all sets of n states given c separated copies."""
    if n < 2:
        raise InvalidInput("need n >= 2")
    if n <= locc_threshold(as_space(space), c):
        return EXPECTED_DISTINGUISHABLE
    return EXPECTED_INDISTINGUISHABLE
