import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conelab import hs_core as hs
from conelab.errors import InvalidInputError

seeds = st.integers(min_value=0, max_value=2**32 - 1)
dims_pairs = st.sampled_from([(1, 2), (2, 2), (2, 3), (3, 2), (3, 3)])


def _labels():
    # product basis of span{f, g} (x) span{f, g}, f = e1, g = e2
    return {"ff": 0, "fg": 1, "gf": 2, "gg": 3}


class TestHSInner:
    def test_projector_has_unit_norm(self):
        f = hs.random_pure(3, 0)
        p = hs.projector(f)
        assert hs.hs_inner(p, p) == pytest.approx(1.0, abs=1e-12)

    def test_identity_against_density_is_trace(self):
        rho = hs.random_density(4, 1)
        assert hs.hs_inner(np.eye(4), rho) == pytest.approx(1.0, abs=1e-12)

    def test_sigma_theta_by_dyadic_expansion(self, sigma, theta):
        # independent oracle: nonzero entries of both 4x4 matrices written by hand
        idx = _labels()
        sigma_entries = {("fg", "fg"): 1, ("gf", "gf"): 1, ("ff", "gg"): -1, ("gg", "ff"): -1}
        theta_entries = {("ff", "ff"): 1, ("ff", "gg"): 1, ("gg", "ff"): 1, ("gg", "gg"): 1}
        expected = sum(
            np.conj(sv) * theta_entries.get(key, 0) for key, sv in sigma_entries.items()
        )
        assert expected == -2
        dense_sigma = np.zeros((4, 4))
        for (r, c), val in sigma_entries.items():
            dense_sigma[idx[r], idx[c]] = val
        np.testing.assert_array_equal(sigma, dense_sigma)
        assert hs.hs_inner(sigma, theta) == pytest.approx(-2.0, abs=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(InvalidInputError):
            hs.hs_inner(np.eye(2), np.eye(3))

    @given(seeds)
    def test_conjugate_symmetric_and_positive(self, seed):
        rng = np.random.default_rng(seed)
        a = hs.random_hermitian(3, rng) + 1j * hs.random_psd(3, rng)
        b = hs.random_psd(3, rng)
        assert hs.hs_inner(a, b) == pytest.approx(np.conj(hs.hs_inner(b, a)), abs=1e-12)
        assert hs.hs_inner(a, a).real > 0


class TestEig:
    def test_identity(self):
        w, _ = hs.hermitian_eig(np.eye(2))
        np.testing.assert_allclose(w, [1, 1])

    def test_sigma_spectrum(self, sigma):
        w, _ = hs.hermitian_eig(sigma)
        np.testing.assert_allclose(w, [-1, 1, 1, 1], atol=1e-12)

    def test_random_reconstruction(self, rng):
        h = hs.random_hermitian(6, rng)
        w, v = hs.hermitian_eig(h)
        assert np.all(np.diff(w) >= 0)
        np.testing.assert_allclose(v @ v.conj().T, np.eye(6), atol=1e-10)
        assert np.max(np.abs(v @ np.diag(w) @ v.conj().T - h)) <= 1e-10 * (1 + np.max(np.abs(w)))

    def test_rejects_non_hermitian(self):
        with pytest.raises(InvalidInputError):
            hs.hermitian_eig(np.array([[0, 1], [0, 0]]))

    def test_canonical_eigvec_is_deterministic_on_degenerate_space(self):
        # minimal eigenspace of diag(0, 0, 1) in a rotated basis is span{e1, e2}
        u = hs.random_unitary(3, 7)
        h = u @ np.diag([0.0, 0.0, 1.0]) @ u.conj().T
        low, vec = hs.canonical_min_eigvec(h)
        assert low == pytest.approx(0.0, abs=1e-12)
        # the choice maximizing |first amplitude| is the normalized projection of e1
        space = u[:, :2]
        proj = space @ space[0].conj()
        expected = proj / np.linalg.norm(proj)
        expected = expected * abs(expected[0]) / expected[0]
        np.testing.assert_allclose(vec, expected, atol=1e-10)
        assert vec[0].imag == 0 and vec[0].real > 0


class TestMatPower:
    def test_quarter_of_maximally_mixed(self):
        np.testing.assert_allclose(hs.mat_power(np.eye(2) / 2, 0.25), 2**-0.25 * np.eye(2), atol=1e-14)

    def test_half_of_diagonal(self):
        np.testing.assert_allclose(hs.mat_power(np.diag([4.0, 1.0]), 0.5), np.diag([2.0, 1.0]), atol=1e-14)

    @pytest.mark.parametrize("dim", [2, 3, 5])
    def test_round_trips(self, rng, dim):
        a = hs.random_psd(dim, rng)
        q = hs.mat_power(a, 0.25)
        h = hs.mat_power(a, 0.5)
        scale = np.linalg.norm(a)
        assert np.linalg.norm(np.linalg.matrix_power(q, 4) - a) <= 1e-9 * scale
        assert np.linalg.norm(h @ h - a) <= 1e-9 * scale
        assert np.linalg.eigvalsh(h)[0] >= -1e-12

    def test_clamps_rounding_noise(self):
        out = hs.mat_power(np.diag([1.0, -5e-11]), 0.5)
        np.testing.assert_allclose(out, np.diag([1.0, 0.0]))

    def test_rejects_indefinite(self):
        with pytest.raises(InvalidInputError):
            hs.mat_power(np.diag([1.0, -1e-6]), 0.5)


class TestKronAndRankOne:
    def test_identity_kron(self):
        np.testing.assert_array_equal(hs.kron(np.eye(2), np.eye(3)), np.eye(6))

    def test_product_projector(self):
        f, g = hs.basis_vector(2, 0), hs.basis_vector(2, 1)
        np.testing.assert_array_equal(
            hs.kron(hs.projector(f), hs.projector(g)), hs.projector(np.kron(f, g))
        )

    def test_hs_inner_factorizes(self, rng):
        a, c = hs.random_psd(2, rng), hs.random_hermitian(2, rng)
        b, d = hs.random_hermitian(3, rng), hs.random_psd(3, rng)
        lhs = hs.hs_inner(hs.kron(a, b), hs.kron(c, d))
        assert lhs == pytest.approx(hs.hs_inner(a, c) * hs.hs_inner(b, d), abs=1e-10)

    def test_projector_from_unit_vector(self):
        f = hs.random_pure(3, 4)
        p = hs.rank_one(f, f)
        assert np.trace(p) == pytest.approx(1.0)
        np.testing.assert_allclose(p @ p, p, atol=1e-10)

    def test_off_diagonal_dyad(self):
        f, g = hs.basis_vector(2, 0), hs.basis_vector(2, 1)
        m = hs.rank_one(f, g)
        assert np.trace(m) == 0
        assert hs.hs_inner(m, m) == pytest.approx(1.0)

    def test_k_level_dyad_matches_definition(self, rng):
        # |x(x)y><x(x)y| applied to f(x)g equals <x(x)y, f(x)g>_K |x(x)y>
        x, y = hs.random_psd(2, rng), hs.random_psd(3, rng)
        f, g = hs.random_hermitian(2, rng), hs.random_psd(3, rng) * 1j
        xy, fg = np.kron(x, y), np.kron(f, g)
        applied = (hs.rank_one(xy, xy) @ fg.ravel()).reshape(xy.shape)
        np.testing.assert_allclose(applied, hs.hs_inner(xy, fg) * xy, atol=1e-10)

    def test_space_mismatch(self):
        with pytest.raises(InvalidInputError):
            hs.rank_one(np.ones(2), np.ones(3))

    def test_left_multiplication_superop(self, rng):
        a, mu = hs.random_hermitian(3, rng), hs.random_psd(3, rng)
        np.testing.assert_allclose(
            (hs.left_multiplication_superop(a) @ mu.ravel()).reshape(3, 3), a @ mu, atol=1e-12
        )


class TestPartialOps:
    def test_transpose_of_product(self, rng):
        a, b = hs.random_hermitian(2, rng), hs.random_psd(3, rng) + 1j * np.eye(3)
        np.testing.assert_array_equal(hs.partial_transpose(np.kron(a, b), (2, 3), 2), np.kron(a, b.T))
        np.testing.assert_array_equal(hs.partial_transpose(np.kron(a, b), (2, 3), 1), np.kron(a.T, b))

    def test_theta_becomes_swap(self, theta):
        swap = np.eye(4)[[0, 2, 1, 3]]
        pt = hs.partial_transpose(theta, (2, 2))
        np.testing.assert_array_equal(pt, swap)
        np.testing.assert_allclose(np.linalg.eigvalsh(pt), [-1, 1, 1, 1], atol=1e-12)

    @given(seeds, dims_pairs, st.sampled_from([1, 2]))
    @settings(max_examples=50)
    def test_transpose_involution_preserves_trace_and_hermiticity(self, seed, dims, side):
        a = hs.random_hermitian(dims[0] * dims[1], seed)
        once = hs.partial_transpose(a, dims, side)
        np.testing.assert_array_equal(hs.partial_transpose(once, dims, side), a)
        assert hs.is_hermitian(once, 1e-14)
        assert np.trace(once) == pytest.approx(np.trace(a))

    def test_transpose_bad_size(self):
        with pytest.raises(InvalidInputError):
            hs.partial_transpose(np.eye(5), (2, 2))

    def test_trace_of_product(self, rng):
        a, b = hs.random_hermitian(2, rng), hs.random_psd(3, rng)
        np.testing.assert_allclose(hs.partial_trace(np.kron(a, b), (2, 3), 1), a * np.trace(b), atol=1e-12)
        np.testing.assert_allclose(hs.partial_trace(np.kron(a, b), (2, 3), 2), b * np.trace(a), atol=1e-12)

    def test_maximally_entangled_marginal(self):
        omega = np.array([1, 0, 0, 1]) / np.sqrt(2)
        rho = np.outer(omega, omega)
        # direct sum over the traced basis index
        expected = np.zeros((2, 2))
        for i in range(2):
            for k in range(2):
                expected[i, k] = sum(rho[2 * i + j, 2 * k + j] for j in range(2))
        np.testing.assert_allclose(expected, np.eye(2) / 2)
        np.testing.assert_allclose(hs.partial_trace(rho, (2, 2), 1), expected, atol=1e-15)

    @given(seeds, dims_pairs, st.sampled_from([1, 2]))
    @settings(max_examples=30)
    def test_trace_preserving(self, seed, dims, keep):
        a = hs.random_psd(dims[0] * dims[1], seed)
        assert np.trace(hs.partial_trace(a, dims, keep)) == pytest.approx(np.trace(a))

    def test_trace_bad_size(self):
        with pytest.raises(InvalidInputError):
            hs.partial_trace(np.eye(6), (2, 2), 1)


class TestRandom:
    @pytest.mark.parametrize("dim", [1, 2, 3, 6])
    def test_density_invariants(self, dim):
        rho = hs.random_density(dim, 99)
        hs.check_density(rho)

    def test_dim_one_is_scalar_one(self):
        np.testing.assert_allclose(hs.random_density(1, 5), [[1.0]])

    def test_seed_reproducible(self):
        np.testing.assert_array_equal(hs.random_density(3, 11), hs.random_density(3, 11))
        np.testing.assert_array_equal(hs.random_pure(3, 11), hs.random_pure(3, 11))
        np.testing.assert_array_equal(hs.random_psd(3, 11), hs.random_psd(3, 11))

    def test_pure_is_unit(self):
        hs.check_pure(hs.random_pure(5, 0))

    @pytest.mark.parametrize("fn", [hs.random_density, hs.random_psd, hs.random_pure])
    def test_zero_dim_rejected(self, fn):
        with pytest.raises(InvalidInputError):
            fn(0, 1)


def test_check_density_rejects_bad_trace():
    with pytest.raises(InvalidInputError):
        hs.check_density(np.eye(2))
