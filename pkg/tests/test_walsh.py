import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sparsecity import walsh
from sparsecity.errors import BudgetError

from conftest import literal_hadamard


class TestRademacher:
    def test_quarter_points(self):
        assert walsh.rademacher(0, 0.25) == 1  # sin(pi/2) = 1
        assert walsh.rademacher(0, 0.75) == -1  # sin(3pi/2) = -1

    def test_hand_evaluated(self):
        # sign(sin(4*pi*0.30)) = sign(sin(1.2*pi)) < 0
        assert walsh.rademacher(1, 0.30) == -1

    def test_sign_convention_at_zeros(self):
        # the sine vanishes at x = 0 and at x = 0.5 for n = 0
        assert walsh.rademacher(0, 0.0) == 1
        assert walsh.rademacher(0, 0.5) == 1

    def test_domain(self):
        with pytest.raises(ValueError):
            walsh.rademacher(0, 1.0)
        with pytest.raises(ValueError):
            walsh.rademacher(0, -0.1)

    @given(st.integers(0, 20), st.floats(0.0, 1.0, exclude_max=True))
    def test_matches_sine_sign(self, n, x):
        value = walsh.rademacher(n, x)
        assert value in (-1, 1)
        s = np.sin(2.0 ** (n + 1) * np.pi * x)
        # away from the vanishing set the sine sign is unambiguous
        if abs(s) > 1e-6:
            assert value == (1 if s > 0 else -1)


class TestWalshFunction:
    def test_zeroth_is_one(self):
        for x in (0.0, 0.123, 0.875):
            assert walsh.walsh_function(0, x) == 1

    def test_binary_factorization(self):
        # index 3 = 2 + 1 factors through indices 1 and 0
        for x in np.linspace(0, 1, 33, endpoint=False):
            assert walsh.walsh_function(3, x) == walsh.rademacher(1, x) * walsh.rademacher(0, x)

    def test_index_five(self):
        x = 0.10
        expected = walsh.rademacher(2, x) * walsh.rademacher(0, x)
        assert walsh.walsh_function(5, x) == expected == 1

    @given(st.integers(0, 63), st.floats(0.0, 1.0, exclude_max=True))
    def test_takes_sign_values(self, n, x):
        assert walsh.walsh_function(n, x) in (-1, 1)


class TestHadamardMatrix:
    def test_order_zero(self):
        assert np.array_equal(walsh.hadamard_matrix(0), np.array([[1.0]]))

    def test_order_one(self):
        expected = np.array([[1.0, -1.0], [1.0, 1.0]]) / np.sqrt(2.0)
        assert np.max(np.abs(walsh.hadamard_matrix(1) - expected)) < 1e-15

    def test_order_two_expanded_by_hand(self):
        expected = 0.5 * np.array(
            [
                [1, -1, -1, 1],
                [1, 1, -1, -1],
                [1, -1, 1, -1],
                [1, 1, 1, 1],
            ],
            dtype=float,
        )
        assert np.max(np.abs(walsh.hadamard_matrix(2) - expected)) < 1e-15

    @pytest.mark.parametrize("k", range(0, 7))
    def test_orthogonality(self, k):
        h = walsh.hadamard_matrix(k)
        gram = h.T @ h
        assert np.max(np.abs(gram - np.eye(1 << k))) < 1e-12

    @pytest.mark.parametrize("k", range(0, 6))
    def test_matches_literal_recursion(self, k):
        assert np.max(np.abs(walsh.hadamard_matrix(k) - literal_hadamard(k))) < 1e-14

    def test_entry_magnitudes(self):
        k = 5
        h = walsh.hadamard_matrix(k)
        assert np.allclose(np.abs(h), 2.0 ** (-k / 2.0), atol=1e-15)

    def test_dense_budget(self):
        with pytest.raises(BudgetError):
            walsh.hadamard_matrix(13)

    def test_side_length_validation(self):
        with pytest.raises(ValueError):
            walsh.HadamardOrder.from_side(12)
        assert walsh.HadamardOrder.from_side(16).k == 4


class TestFastTransforms:
    def test_first_columns_order_one(self):
        r = 2.0**-0.5
        assert np.allclose(walsh.fwht_apply(1, [1.0, 0.0]), [r, r])
        assert np.allclose(walsh.fwht_apply(1, [0.0, 1.0]), [-r, r])

    def test_adjoint_first_row(self):
        r = 2.0**-0.5
        assert np.allclose(walsh.fwht_adjoint_apply(1, [1.0, 0.0]), [r, -r])

    @pytest.mark.parametrize("k", range(0, 11))
    def test_matches_dense(self, k):
        rng = np.random.default_rng(100 + k)
        m = 1 << k
        h = walsh.hadamard_matrix(k)
        v = rng.standard_normal((m, 20))
        fast = walsh.fwht_apply(k, v)
        dense = h @ v
        assert np.linalg.norm(fast - dense) <= 1e-12 * max(np.linalg.norm(dense), 1)
        fast_adj = walsh.fwht_adjoint_apply(k, v)
        dense_adj = h.T @ v
        assert np.linalg.norm(fast_adj - dense_adj) <= 1e-12 * max(np.linalg.norm(dense_adj), 1)

    @pytest.mark.parametrize("k", [0, 1, 4, 8])
    def test_round_trip(self, k):
        rng = np.random.default_rng(7 + k)
        v = rng.standard_normal(1 << k)
        back = walsh.fwht_adjoint_apply(k, walsh.fwht_apply(k, v))
        assert np.linalg.norm(back - v) <= 1e-12 * np.linalg.norm(v)

    @pytest.mark.parametrize("k", [2, 3, 5])
    def test_column_extraction(self, k):
        m = 1 << k
        h = walsh.hadamard_matrix(k)
        for j in range(m):
            e = np.zeros(m)
            e[j] = 1.0
            assert np.max(np.abs(walsh.fwht_apply(k, e) - h[:, j])) < 1e-14

    def test_unnormalized_integer_kernel(self):
        k = 4
        m = 1 << k
        rng = np.random.default_rng(3)
        v = rng.integers(-50, 50, size=m)
        z = walsh.fwht_apply_unnormalized(k, v.astype(np.int64))
        assert z.dtype == np.int64
        dense = walsh.hadamard_matrix(k) * (2.0 ** (k / 2.0))
        assert np.max(np.abs(np.rint(dense) @ v - z)) == 0

    def test_shape_errors(self):
        with pytest.raises(ValueError):
            walsh.fwht_apply(2, [1.0, 2.0])
        with pytest.raises(ValueError):
            walsh.fwht_adjoint_apply(1, np.zeros(3))


class TestPartialWalsh:
    @pytest.mark.parametrize("k,n", [(2, 1), (2, 3), (3, 5), (4, 16), (5, 7)])
    def test_columns_orthonormal(self, k, n):
        pw = walsh.PartialWalsh(walsh.HadamardOrder(k), n)
        cols = np.column_stack(
            [walsh.partial_apply(pw, np.eye(n)[:, j]) for j in range(n)]
        )
        assert np.max(np.abs(cols.T @ cols - np.eye(n))) < 1e-12

    def test_full_width_equals_fwht(self):
        k, m = 3, 8
        pw = walsh.PartialWalsh(walsh.HadamardOrder(k), m)
        v = np.random.default_rng(0).standard_normal(m)
        assert np.array_equal(walsh.partial_apply(pw, v), walsh.fwht_apply(k, v))

    def test_basis_vector_gives_column(self):
        pw = walsh.PartialWalsh(walsh.HadamardOrder(3), 5)
        e = np.zeros(5)
        e[0] = 1.0
        assert np.allclose(walsh.partial_apply(pw, e), walsh.hadamard_matrix(3)[:, 0])

    def test_two_column_sum(self):
        pw = walsh.PartialWalsh(walsh.HadamardOrder(2), 2)
        h = walsh.hadamard_matrix(2)
        out = walsh.partial_apply(pw, np.array([1.0, 1.0]))
        assert np.max(np.abs(out - (h[:, 0] + h[:, 1]))) < 1e-14
        # frozen: (1/2)[(1,1,1,1) + (-1,1,-1,1)] = (0,1,0,1)
        assert np.allclose(out, [0.0, 1.0, 0.0, 1.0])

    def test_adjoint_round_trip_and_inner_product(self):
        pw = walsh.PartialWalsh(walsh.HadamardOrder(3), 3)
        rng = np.random.default_rng(5)
        x = rng.standard_normal(3)
        y = rng.standard_normal(8)
        assert np.allclose(walsh.partial_adjoint_apply(pw, walsh.partial_apply(pw, x)), x)
        lhs = float(np.dot(walsh.partial_apply(pw, x), y))
        rhs = float(np.dot(x, walsh.partial_adjoint_apply(pw, y)))
        assert abs(lhs - rhs) <= 1e-12 * max(abs(lhs), 1.0)

    def test_zero_maps_to_zero(self):
        pw = walsh.PartialWalsh(walsh.HadamardOrder(3), 3)
        assert np.array_equal(walsh.partial_adjoint_apply(pw, np.zeros(8)), np.zeros(3))

    def test_width_validation(self):
        with pytest.raises(ValueError):
            walsh.PartialWalsh(walsh.HadamardOrder(2), 5)
        with pytest.raises(ValueError):
            walsh.PartialWalsh(walsh.HadamardOrder(2), 0)


class TestUncertainty:
    def test_spike(self):
        e = np.zeros(4)
        e[0] = 1.0
        s_time, s_freq, holds = walsh.uncertainty_check(2, e)
        assert (s_time, s_freq, holds) == (1, 4, True)

    def test_walsh_column(self):
        col = walsh.hadamard_matrix(2)[:, 0]
        s_time, s_freq, holds = walsh.uncertainty_check(2, col)
        assert (s_time, s_freq, holds) == (4, 1, True)

    def test_random_dense_vector(self):
        y = np.random.default_rng(11).standard_normal(16)
        _, _, holds = walsh.uncertainty_check(4, y)
        assert holds

    @pytest.mark.parametrize("m", [16, 64])
    def test_always_holds_on_random_vectors(self, m):
        k = m.bit_length() - 1
        rng = np.random.default_rng(m)
        for _ in range(1000):
            y = rng.standard_normal(m)
            _, _, holds = walsh.uncertainty_check(k, y)
            assert holds

    def test_zero_vector_rejected(self):
        with pytest.raises(ValueError):
            walsh.uncertainty_check(2, np.zeros(4))


class TestColumnFunctionMap:
    @pytest.mark.parametrize("k", range(0, 5))
    def test_observed_map(self, k):
        """Each matrix column realizes exactly one Walsh function (up to the
        recorded parity sign) at the midpoint sample grid."""
        m = 1 << k
        h = walsh.hadamard_matrix(k)
        seen = set()
        for j in range(m):
            index, sign = walsh.column_function_index(j, k)
            sampled = np.array(
                [walsh.walsh_function(index, (i + 0.5) / m) for i in range(m)]
            )
            assert np.allclose(np.sqrt(m) * h[:, j], sign * sampled)
            seen.add(index)
        assert seen == set(range(m))  # the map is a bijection
