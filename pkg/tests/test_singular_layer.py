"""Eigenchannel decomposition of the transmittance matrix."""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from mcqkd import (
    EigenDecomposition,
    TransmittanceMatrix,
    load_matrix_csv,
    partition_singulars,
    rank_epsilon,
    reconstruct,
    svd_decompose,
)
from oracles import charpoly_eigs


def random_matrix(k_out, k_in, seed):
    rng = np.random.default_rng(seed)
    m = rng.normal(size=(k_out, k_in)) + 1j * rng.normal(size=(k_out, k_in))
    return TransmittanceMatrix(m)


class TestTransmittanceMatrix:
    def test_shape_properties(self):
        m = random_matrix(4, 2, seed=0)
        assert m.k_out == 4
        assert m.k_in == 2
        assert m.n_min == 2

    def test_more_senders_than_receivers_rejected(self):
        rng = np.random.default_rng(1)
        with pytest.raises(ValueError):
            TransmittanceMatrix(rng.normal(size=(2, 4)).astype(complex))

    def test_non_finite_rejected(self):
        bad = np.array([[1.0, np.nan], [0.0, 1.0]], dtype=complex)
        with pytest.raises(ValueError):
            TransmittanceMatrix(bad)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            TransmittanceMatrix(np.zeros((0, 0), dtype=complex))


class TestDecompose:
    def test_identity(self):
        d = svd_decompose(TransmittanceMatrix(np.eye(2, dtype=complex)))
        assert_allclose(d.lambdas, [1.0, 1.0])

    def test_diagonal(self):
        d = svd_decompose(TransmittanceMatrix(np.diag([3.0, 1.0]).astype(complex)))
        assert_allclose(d.lambdas, [3.0, 1.0])

    def test_descending_order(self):
        d = svd_decompose(random_matrix(5, 3, seed=3))
        assert np.all(np.diff(d.lambdas) <= 0)

    def test_lambda_squared_matches_charpoly_oracle(self):
        m = random_matrix(4, 2, seed=7)
        d = svd_decompose(m)
        # eigenvalues of F F^H: k_in nonzero ones plus k_out - k_in zeros
        oracle = charpoly_eigs(m.entries)[: m.k_in]
        assert_allclose(np.sort(d.lambdas**2), np.sort(oracle), atol=1e-8)

    @pytest.mark.parametrize("seed", range(8))
    def test_spectral_sum_is_trace(self, seed):
        m = random_matrix(4, 4, seed=seed)
        d = svd_decompose(m)
        trace = np.trace(m.entries @ m.entries.conj().T).real
        assert abs(np.sum(d.lambdas**2) - trace) / trace < 1e-10

    @pytest.mark.parametrize("shape", [(1, 1), (2, 2), (3, 2), (6, 4), (8, 8)])
    def test_factor_unitarity(self, shape):
        d = svd_decompose(random_matrix(*shape, seed=shape[0] * 10 + shape[1]))
        k_out, k_in = shape
        assert_allclose(d.u2 @ d.u2.conj().T, np.eye(k_out), atol=1e-10)
        assert_allclose(d.f1_inv @ d.f1_inv.conj().T, np.eye(k_in), atol=1e-10)


class TestReconstruct:
    def test_identity_round_trip(self):
        m = TransmittanceMatrix(np.eye(3, dtype=complex))
        r = reconstruct(svd_decompose(m))
        assert_allclose(r.entries, m.entries, atol=1e-12)

    def test_zero_lambdas_give_zero_matrix(self):
        d = svd_decompose(TransmittanceMatrix(np.zeros((3, 2), dtype=complex)))
        assert_allclose(reconstruct(d).entries, 0.0, atol=1e-15)

    @pytest.mark.parametrize("seed", range(10))
    def test_random_round_trip(self, seed):
        m = random_matrix(3, 3, seed=100 + seed)
        r = reconstruct(svd_decompose(m))
        err = np.linalg.norm(r.entries - m.entries) / np.linalg.norm(m.entries)
        assert err < 1e-10

    @pytest.mark.parametrize("shape", [(2, 1), (4, 2), (5, 5), (8, 6)])
    def test_rectangular_round_trip(self, shape):
        m = random_matrix(*shape, seed=shape[0] + 31 * shape[1])
        r = reconstruct(svd_decompose(m))
        err = np.linalg.norm(r.entries - m.entries) / np.linalg.norm(m.entries)
        assert err < 1e-10


class TestEigenDecompositionType:
    def test_order_enforced(self):
        with pytest.raises(ValueError):
            EigenDecomposition(
                np.eye(2, dtype=complex),
                np.array([1.0, 2.0]),  # ascending: invalid
                np.eye(2, dtype=complex),
            )

    def test_negative_lambda_rejected(self):
        with pytest.raises(ValueError):
            EigenDecomposition(
                np.eye(2, dtype=complex),
                np.array([1.0, -0.5]),
                np.eye(2, dtype=complex),
            )

    def test_non_unitary_factor_rejected(self):
        with pytest.raises(ValueError):
            EigenDecomposition(
                2 * np.eye(2, dtype=complex),
                np.array([1.0, 0.5]),
                np.eye(2, dtype=complex),
            )


class TestPartition:
    def test_zero_rate_puts_everything_in_tail(self):
        s0, s1, flags = partition_singulars(np.array([0.9, 0.4]), 0, snr=10.0)
        assert s0.size == 0
        assert list(s1) == [0.9, 0.4]

    def test_hand_example_bounds_hold(self):
        s0, s1, flags = partition_singulars(np.array([0.9, 0.005]), 1, snr=100.0)
        assert list(s0) == [0.9]
        assert list(s1) == [0.005]
        assert flags.s0_within_unit and flags.s1_within_inverse_snr

    def test_hand_example_tail_bound_fails(self):
        _, _, flags = partition_singulars(np.array([0.9, 0.05]), 1, snr=100.0)
        assert flags.s0_within_unit
        assert not flags.s1_within_inverse_snr

    def test_fractional_rate_rounds_up(self):
        s0, _, _ = partition_singulars(np.array([0.9, 0.4, 0.1]), 1.2, snr=10.0)
        assert s0.size == 2

    def test_unsorted_rejected(self):
        with pytest.raises(ValueError):
            partition_singulars(np.array([0.1, 0.9]), 1, snr=10.0)

    def test_rate_beyond_count_rejected(self):
        with pytest.raises(ValueError):
            partition_singulars(np.array([0.9, 0.4]), 3, snr=10.0)


class TestRankEpsilon:
    def test_all_zero(self):
        assert rank_epsilon(np.zeros(4), 1e-6) == 0

    def test_threshold_cut(self):
        assert rank_epsilon(np.array([3.0, 1.0, 1e-12]), 1e-6) == 2

    def test_constructed_low_rank(self):
        # build a rank-2 4x4 matrix from two rank-one terms
        rng = np.random.default_rng(17)
        a = rng.normal(size=(4, 1)) + 1j * rng.normal(size=(4, 1))
        b = rng.normal(size=(4, 1)) + 1j * rng.normal(size=(4, 1))
        m = a @ a.conj().T + b @ b.conj().T
        d = svd_decompose(TransmittanceMatrix(m))
        assert rank_epsilon(d.lambdas, 1e-8) == 2


class TestMatrixCsv:
    def test_load(self, tmp_path):
        p = tmp_path / "m.csv"
        p.write_text("1:0,0.5:0.1\n0:0.2,0.8:0\n0.1:0,0:0.3\n")
        m = load_matrix_csv(p)
        assert m.k_out == 3 and m.k_in == 2
        assert m.entries[0, 1] == complex(0.5, 0.1)
        assert m.entries[2, 1] == complex(0.0, 0.3)

    def test_bad_cell_reports_line(self, tmp_path):
        p = tmp_path / "m.csv"
        p.write_text("1:0\n0.5\n")
        with pytest.raises(ValueError, match=r":2:"):
            load_matrix_csv(p)

    def test_ragged_rows_rejected(self, tmp_path):
        p = tmp_path / "m.csv"
        p.write_text("1:0,2:0\n1:0\n")
        with pytest.raises(ValueError):
            load_matrix_csv(p)
