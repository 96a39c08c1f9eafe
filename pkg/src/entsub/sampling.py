"""
Seeded Haar sampling of pure states, subspaces and product states.

Each :class:`RngStream` is keyed by ``(seed, path, stream_id)`` and backed by
a Philox counter-based generator, so its draws never depend on how many
other streams were used before it.  Parallel work takes child streams:

* restart ``r`` of a search uses ``rng.child(r)``;
* trial block ``b`` of a simulation uses ``rng.child(2**32 + b)``;
* the complement search for state ``j`` in a certificate uses ``rng.child(j)``.

Complex Gaussians come from the Box-Muller transform of two uniform doubles,
``z = sqrt(-ln(1 - u1)) * exp(2 pi i u2)``, giving E|z|^2 = 1.
"""

from __future__ import annotations

import numpy as np

from .errors import InvalidInput
from .hilbert import ProductState, StateVector, Subspace, as_space, tensor

DEFAULT_SEED = 20070601

TRIAL_BLOCK_BASE = 2 ** 32


class RngStream:
    """Reproducible random stream identified by ``(seed, stream_id)``."""

    def __init__(self, seed: int = DEFAULT_SEED, stream_id: int = 0, path: tuple = ()):
        self.seed = int(seed) & 0xFFFFFFFFFFFFFFFF
        self.stream_id = int(stream_id) & 0xFFFFFFFFFFFFFFFF
        self.path = tuple(int(p) for p in path)
        ss = np.random.SeedSequence(self.seed, spawn_key=self.path + (self.stream_id,))
        self._gen = np.random.Generator(np.random.Philox(ss))

    def child(self, stream_id: int) -> "RngStream":
        """Independent stream nested under this one."""
        return RngStream(self.seed, stream_id, self.path + (self.stream_id,))

    def fresh(self) -> "RngStream":
        """Same key, rewound to the start."""
        return RngStream(self.seed, self.stream_id, self.path)

    def uniform(self, size=None) -> np.ndarray:
        return self._gen.random(size)

    def complex_gaussian(self, size) -> np.ndarray:
        u1 = self._gen.random(size)
        u2 = self._gen.random(size)
        return np.sqrt(-np.log1p(-u1)) * np.exp(2j * np.pi * u2)

    def choice(self, n, size=None, p=None):
        return self._gen.choice(n, size=size, p=p)

    def multinomial(self, n, pvals):
        return self._gen.multinomial(n, pvals)

    def __repr__(self):
        return f"RngStream(seed={self.seed}, stream_id={self.stream_id}, path={self.path})"


def as_rng(rng) -> RngStream:
    if rng is None:
        return RngStream()
    if isinstance(rng, RngStream):
        return rng
    return RngStream(int(rng))


def random_vector(d: int, rng: RngStream) -> np.ndarray:
    z = rng.complex_gaussian(d)
    return z / np.linalg.norm(z)


def random_state(space, rng) -> StateVector:
    """Haar-random pure state: normalized standard complex Gaussian vector."""
    space = as_space(space)
    return StateVector.from_amplitudes(space, random_vector(space.D, as_rng(rng)))


def random_subspace(space, s: int, rng) -> Subspace:
    """Uniformly random s-dimensional subspace (QR of a Gaussian D x s matrix)."""
    space = as_space(space)
    if not 1 <= s <= space.D:
        raise InvalidInput(f"subspace dimension {s} not in [1, {space.D}]")
    rng = as_rng(rng)
    G = rng.complex_gaussian((space.D, s))
    Q, _ = np.linalg.qr(G)
    return Subspace(space, Q)


def random_product_state(space, rng) -> ProductState:
    """Independent Haar-random unit vector on every factor."""
    space = as_space(space)
    rng = as_rng(rng)
    return tensor([random_vector(d, rng) for d in space.dims], space)


def random_unitary(d: int, rng) -> np.ndarray:
    """Haar-random unitary via phase-corrected QR."""
    rng = as_rng(rng)
    Z = rng.complex_gaussian((d, d))
    Q, R = np.linalg.qr(Z)
    ph = np.diag(R) / np.abs(np.diag(R))
    return Q * ph


def random_states(space, n: int, rng, product: bool = False) -> list[StateVector]:
    """``n`` independent random states; state k is drawn from ``rng.child(k)``."""
    rng = as_rng(rng)
    space = as_space(space)
    if product:
        return [random_product_state(space, rng.child(k)).global_state for k in range(n)]
    return [random_state(space, rng.child(k)) for k in range(n)]
