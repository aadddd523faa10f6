import json

import numpy as np
import pytest
from scipy import stats

from qwfs import (
    MediumModel,
    RngStream,
    TransmissionMatrix,
    generate,
    haar_unitary,
    load_matrix,
    save_matrix,
    total_transmission,
)


class TestModels:
    def test_unknown_kind_rejected(self):
        with pytest.raises(ValueError):
            MediumModel("banded", 8, 1)

    def test_thin_with_zero_phases_is_identity(self):
        t = TransmissionMatrix(MediumModel("thin", 6, 0), np.diag(np.exp(1j * np.zeros(6))))
        assert np.allclose(t.matrix, np.eye(6), atol=1e-15)

    def test_generated_thin_is_unit_modulus_diagonal(self):
        t = generate(MediumModel("thin", 16, 3))
        off = t.matrix - np.diag(np.diagonal(t.matrix))
        assert np.max(np.abs(off)) == 0.0
        assert np.max(np.abs(np.abs(np.diagonal(t.matrix)) - 1.0)) < 1e-14

    def test_unitary_is_unitary(self):
        t = generate(MediumModel("unitary", 64, 4))
        gram = t.matrix.conj().T @ t.matrix
        assert np.max(np.abs(gram - np.eye(64))) < 1e-10

    def test_unitary_rows_and_columns_unit_norm(self):
        t = generate(MediumModel("unitary", 48, 5))
        assert np.max(np.abs(np.sum(np.abs(t.matrix) ** 2, axis=0) - 1.0)) < 1e-10
        assert np.max(np.abs(np.sum(np.abs(t.matrix) ** 2, axis=1) - 1.0)) < 1e-10

    @pytest.mark.parametrize("seed", range(20))
    def test_gaussian_column_power(self, seed):
        t = generate(MediumModel("gaussian", 256, seed))
        column_power = np.sum(np.abs(t.matrix) ** 2, axis=0)
        assert abs(np.mean(column_power) - 1.0) < 0.05

    def test_generation_deterministic(self):
        a = generate(MediumModel("gaussian", 32, 9, stream_key=(2,)))
        b = generate(MediumModel("gaussian", 32, 9, stream_key=(2,)))
        assert np.array_equal(a.matrix, b.matrix)


class TestHaar:
    def test_single_mode_uniform_phase(self):
        rng = RngStream(6)
        samples = np.array([haar_unitary(1, rng)[0, 0] for _ in range(400)])
        assert np.max(np.abs(np.abs(samples) - 1.0)) < 1e-14
        assert abs(np.mean(samples)) < 0.15

    def test_first_entry_beta_marginal(self):
        # |t_00|^2 of an n x n Haar unitary is Beta(1, n-1) with mean 1/n.
        n = 32
        rng = RngStream(7)
        values = [np.abs(haar_unitary(n, rng)[0, 0]) ** 2 for _ in range(500)]
        assert abs(np.mean(values) - 1 / n) < 0.1 / n

    def test_invariance_under_haar_product(self):
        # |entries| of U V for independent Haar U, V match those of U alone.
        n = 100
        u = haar_unitary(n, RngStream(8, 0))
        v = haar_unitary(n, RngStream(8, 1))
        result = stats.ks_2samp(np.abs(u).ravel(), np.abs(u @ v).ravel())
        assert result.pvalue > 0.01


class TestDerivedProducts:
    def test_j_symmetry_exact(self):
        t = generate(MediumModel("gaussian", 40, 11))
        assert np.array_equal(t.j, t.j.T)

    def test_gaussian_columns_uncorrelated(self):
        acc = np.zeros(3, dtype=complex)
        count = 0
        for seed in range(30):
            m = generate(MediumModel("gaussian", 64, seed)).matrix
            for k, (c1, c2) in enumerate([(0, 1), (2, 7), (10, 63)]):
                acc[k] += np.sum(m[:, c1] * np.conj(m[:, c2]))
            count += 64
        # entries have variance 1/n, so the mean product is ~1/n per sample
        assert np.max(np.abs(acc / count)) < 3 / (64 * np.sqrt(count))


class TestTotalTransmission:
    def test_unitary_exact(self):
        t = generate(MediumModel("unitary", 32, 12))
        assert abs(total_transmission(t) - 1.0) < 1e-12

    def test_thin_exact(self):
        t = generate(MediumModel("thin", 32, 13))
        assert abs(total_transmission(t) - 1.0) < 1e-12

    @pytest.mark.parametrize("seed", range(5))
    def test_gaussian_near_unity(self, seed):
        t = generate(MediumModel("gaussian", 256, seed))
        assert abs(total_transmission(t) - 1.0) < 0.1


class TestDumpFormat:
    def test_round_trip_bit_exact(self, tmp_path):
        t = generate(MediumModel("thin", 4, 21))
        path = tmp_path / "m.qwfsmat"
        save_matrix(t, path)
        loaded = load_matrix(path)
        assert np.array_equal(loaded.matrix, t.matrix)
        assert loaded.model == t.model

    def test_identical_bytes_for_identical_seed(self, tmp_path):
        p1, p2 = tmp_path / "a", tmp_path / "b"
        save_matrix(generate(MediumModel("gaussian", 16, 5)), p1)
        save_matrix(generate(MediumModel("gaussian", 16, 5)), p2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_header_and_payload_layout(self, tmp_path):
        # parse the file independently of load_matrix
        t = generate(MediumModel("unitary", 8, 6))
        path = tmp_path / "m.qwfsmat"
        save_matrix(t, path)
        raw = path.read_bytes()
        newline = raw.index(b"\n")
        header = json.loads(raw[:newline])
        assert header["kind"] == "unitary" and header["n"] == 8 and header["seed"] == 6
        payload = np.frombuffer(raw[newline + 1 :], dtype="<f8")
        matrix = (payload[0::2] + 1j * payload[1::2]).reshape(8, 8)
        assert np.array_equal(matrix, t.matrix)
