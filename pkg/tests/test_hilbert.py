import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from entsub.errors import EmptyComplementError, InvalidInput, LinearDependenceError
from entsub.hilbert import (
    SpaceSpec,
    StateVector,
    Subspace,
    canonical_phase,
    is_product,
    orthonormal_complement,
    overlap,
    schmidt,
    span,
    subspace_overlap,
    tensor,
)
from entsub.sampling import RngStream, random_product_state, random_state, random_subspace

S22 = SpaceSpec((2, 2))


def e(space, k):
    return StateVector.basis(space, k)


class TestSpaceSpec:
    def test_derived_dimension(self):
        sp = SpaceSpec((2, 3, 4))
        assert sp.D == 24 and sp.m == 3 and sp.excess == 6

    @pytest.mark.parametrize("dims", [(), (1, 2), (2, 0)])
    def test_rejects_bad_dims(self, dims):
        with pytest.raises(InvalidInput):
            SpaceSpec(dims)

    def test_repeated(self):
        assert SpaceSpec((2, 3)).repeated(2).dims == (2, 3, 2, 3)


class TestTensor:
    def test_basis_products(self):
        p = tensor([[1, 0], [1, 0]], S22)
        assert np.allclose(p.amps, [1, 0, 0, 0])
        p = tensor([[1, 0], [0, 1]], S22)
        assert np.allclose(p.amps, [0, 1, 0, 0])

    def test_random_factors_give_rank_one(self, rng):
        for k in range(20):
            p = random_product_state((2, 3), rng.child(k))
            sv = np.linalg.svd(p.amps.reshape(2, 3), compute_uv=False)
            assert sv[1] < 1e-12

    def test_multi_index_order(self, rng):
        sp = SpaceSpec((2, 3, 2))
        p = random_product_state(sp, rng)
        a, b, c = p.factors
        assert np.isclose(p.amps[np.ravel_multi_index((1, 2, 0), sp.dims)], a[1] * b[2] * c[0], atol=1e-15)

    def test_length_mismatch(self):
        with pytest.raises(InvalidInput):
            tensor([[1, 0], [1, 0, 0]], S22)
        with pytest.raises(InvalidInput):
            tensor([[1, 0]], S22)

    def test_norm_preservation(self, rng):
        for k in range(1000):
            p = random_product_state((2, 3), rng.child(k))
            assert abs(np.linalg.norm(p.amps) - 1) < 1e-12
            assert all(abs(np.linalg.norm(f) - 1) < 1e-12 for f in p.factors)


class TestOverlap:
    def test_basis(self):
        assert overlap(e(S22, 0), e(S22, 0)) == 1
        assert overlap(e(S22, 0), e(S22, 1)) == 0

    def test_hermitian_symmetry(self, rng):
        x, y = random_state(S22, rng.child(0)), random_state(S22, rng.child(1))
        assert np.isclose(overlap(x, y), np.conj(overlap(y, x)), atol=1e-15)
        assert abs(overlap(x, y)) <= 1 + 1e-12

    def test_space_mismatch(self, rng):
        with pytest.raises(InvalidInput):
            overlap(random_state((2, 2), rng), random_state((4,), rng))


class TestSpan:
    def test_two_basis_vectors(self):
        S = span([e(S22, 0), e(S22, 1)])
        assert S.s == 2
        assert np.isclose(subspace_overlap(S, e(S22, 0)), 1)
        assert np.isclose(subspace_overlap(S, e(S22, 1)), 1)

    def test_duplicate_is_dependent(self):
        with pytest.raises(LinearDependenceError):
            span([e(S22, 0), e(S22, 0)])

    def test_random_states_span_full_rank(self):
        full = 0
        for k in range(1000):
            r = RngStream(7, k)
            try:
                full += span([random_state(S22, r.child(i)) for i in range(3)]).s == 3
            except LinearDependenceError:
                pass
        assert full >= 999


class TestComplement:
    def test_complement_of_basis_vector(self):
        C = orthonormal_complement(span([e(S22, 0)]))
        assert C.s == 3
        P = C.projector()
        assert np.allclose(P, np.diag([0, 1, 1, 1]), atol=1e-10)

    def test_involution(self, rng):
        S = random_subspace((2, 3), 2, rng)
        CC = orthonormal_complement(orthonormal_complement(S))
        assert np.abs(CC.projector() - S.projector()).max() < 1e-10

    def test_resolution_of_identity(self, rng):
        S = random_subspace((2, 3), 2, rng)
        C = orthonormal_complement(S)
        assert np.abs(S.projector() + C.projector() - np.eye(6)).max() < 1e-10
        assert np.abs(S.basis.conj().T @ C.basis).max() < 1e-10

    def test_full_space_has_no_complement(self):
        with pytest.raises(EmptyComplementError):
            orthonormal_complement(Subspace(S22, np.eye(4)))

    def test_orthonormality_over_many_draws(self):
        for k in range(1000):
            S = random_subspace((2, 3), 1 + k % 5, RngStream(3, k))
            C = orthonormal_complement(S)
            assert np.abs(C.basis.conj().T @ C.basis - np.eye(C.s)).max() < 1e-10


class TestSchmidt:
    def test_bell_state(self):
        bell = StateVector.from_amplitudes(S22, [1, 0, 0, 1])
        sd = schmidt(bell, (0,))
        assert np.allclose(sd.coeffs, [0.5, 0.5])
        assert sd.rank_at() == 2

    def test_product_has_rank_one(self, rng):
        p = random_product_state((2, 3, 2), rng)
        for cut in [(0,), (1,), (2,), (0, 2)]:
            assert schmidt(p.global_state, cut).rank_at() == 1
        assert is_product(p.global_state)

    def test_generic_full_rank(self):
        full = sum(schmidt(random_state((3, 3), RngStream(5, k)), (0,)).rank_at(1e-8) == 3
                   for k in range(1000))
        assert full >= 999

    @pytest.mark.parametrize("dims,cut", [((3, 3), (0,)), ((2, 3, 2), (1,)), ((2, 3, 2), (0, 2)),
                                          ((2, 2, 2, 2), ((1, 3), (0, 2)))])
    def test_reconstruction(self, rng, dims, cut):
        for k in range(20):
            x = random_state(dims, rng.child(k))
            sd = schmidt(x, cut)
            assert abs(sd.coeffs.sum() - 1) < 1e-10
            assert np.all(np.diff(sd.coeffs) <= 1e-15)
            assert np.abs(sd.reconstruct() - x.amps).max() < 1e-10

    @pytest.mark.parametrize("cut", [(), (0, 1), ((0, 1), ())])
    def test_empty_side_rejected(self, rng, cut):
        with pytest.raises(InvalidInput):
            schmidt(random_state(S22, rng), cut)


class TestSubspaceOverlap:
    def test_column_and_complement(self, rng):
        S = random_subspace((2, 3), 2, rng)
        assert np.isclose(subspace_overlap(S, S.column(0)), 1, atol=1e-12)
        C = orthonormal_complement(S)
        assert subspace_overlap(S, C.column(0)) < 1e-12

    def test_one_dimensional_formula(self, rng):
        S = random_subspace((2, 2), 1, rng.child(0))
        x = random_state((2, 2), rng.child(1))
        assert abs(subspace_overlap(S, x) - abs(overlap(S.column(0), x)) ** 2) < 1e-12

    def test_complementary_sum(self):
        for k in range(200):
            r = RngStream(9, k)
            S = random_subspace((2, 3), 1 + k % 5, r.child(0))
            x = random_state((2, 3), r.child(1))
            total = subspace_overlap(S, x) + subspace_overlap(orthonormal_complement(S), x)
            assert abs(total - 1) < 1e-10


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2 ** 32), theta=st.floats(0, 2 * np.pi))
def test_canonical_phase_invariance(seed, theta):
    x = random_state((2, 3), RngStream(seed))
    c = np.exp(1j * theta)
    y = StateVector(x.space, c * x.amps)
    assert np.abs(y.canonicalize().amps - x.canonicalize().amps).max() < 1e-12
    v = x.canonicalize().amps
    first = v[np.flatnonzero(np.abs(v) > 1e-12)[0]]
    assert first.real > 0 and abs(first.imag) < 1e-15


def test_canonical_phase_skips_tiny_entries():
    v = canonical_phase(np.array([1e-14, 1j, 0]))
    assert np.isclose(v[1], 1)
