import csv

import numpy as np
import pytest

from kernellp.errors import DegenerateInputError, InputError
from kernellp.graphs import (
    WeightMatrix,
    gaussian_weights,
    knn,
    symmetrize_normalize,
    write_weights_csv,
    write_weights_pgm,
)


class TestKnn:
    def test_collinear_points(self):
        X = np.array([[0.0, 1.0, 3.0]])
        nbr = knn(X, 1)
        assert nbr.indices[:, 0].tolist() == [1, 0, 1]

    def test_k_equals_n_minus_one(self, rng):
        X = rng.standard_normal((2, 6))
        nbr = knn(X, 5)
        for i in range(6):
            assert sorted(nbr.indices[i]) == sorted(set(range(6)) - {i})

    def test_duplicates_tie_break_by_index(self):
        X = np.array([[0.0, 0.0, 5.0, 5.0]])
        nbr = knn(X, 1)
        assert nbr.indices[:, 0].tolist() == [1, 0, 3, 2]

    def test_k_too_large_rejected(self, rng):
        with pytest.raises(InputError):
            knn(rng.standard_normal((2, 4)), 4)


class TestGaussianWeights:
    def test_two_points_single_edge(self):
        d = 1.7
        X = np.array([[0.0, d]])
        w = gaussian_weights(X, knn(X, 1)).entries
        assert w[0, 1] == pytest.approx(np.exp(-d), rel=1e-12)
        assert w[0, 0] == 0.0 and w[1, 1] == 0.0

    def test_coincident_neighbors_weight_one(self):
        X = np.array([[0.0, 0.0, 4.0]])
        w = gaussian_weights(X, knn(X, 1)).entries
        assert w[0, 1] == 1.0 and w[1, 0] == 1.0

    def test_non_neighbors_zero(self):
        X = np.array([[0.0, 1.0, 10.0, 11.0]])
        w = gaussian_weights(X, knn(X, 1)).entries
        assert w[0, 2] == 0.0 and w[0, 3] == 0.0

    def test_all_identical_points_degenerate(self):
        X = np.zeros((2, 5))
        with pytest.raises(DegenerateInputError):
            gaussian_weights(X, knn(X, 2))

    def test_translation_invariance(self, rng):
        X = rng.standard_normal((3, 15))
        nbr = knn(X, 4)
        w = gaussian_weights(X, nbr).entries
        wt = gaussian_weights(X + 13.5, knn(X + 13.5, 4)).entries
        assert np.allclose(w, wt, rtol=0.0, atol=1e-12)

    def test_scale_knob(self):
        X = np.array([[0.0, 2.0]])
        base = gaussian_weights(X, knn(X, 1)).entries[0, 1]
        doubled = gaussian_weights(X, knn(X, 1), scale=2.0).entries[0, 1]
        assert doubled == pytest.approx(np.exp(np.log(base) / 2.0), rel=1e-12)


class TestSymmetrizeNormalize:
    def test_two_node_exchange_graph(self):
        out = symmetrize_normalize(WeightMatrix(np.array([[0.0, 1.0], [1.0, 0.0]])))
        assert np.allclose(out.entries, [[0.0, 1.0], [1.0, 0.0]])

    def test_symmetric_input_only_normalized(self, rng):
        w = rng.random((5, 5))
        w = (w + w.T) / 2.0
        np.fill_diagonal(w, 0.0)
        out = symmetrize_normalize(WeightMatrix(w)).entries
        d = w.sum(axis=1)
        expected = w / np.sqrt(np.outer(d, d))
        assert np.allclose(out, expected, rtol=1e-12)

    def test_matches_scalar_loop(self, rng):
        w = rng.random((4, 4))
        out = symmetrize_normalize(WeightMatrix(w)).entries
        s = (w + w.T) / 2.0
        d = s.sum(axis=1)
        for i in range(4):
            for j in range(4):
                assert out[i, j] == pytest.approx((w[i, j] + w[j, i]) / (2.0 * np.sqrt(d[i] * d[j])), rel=1e-12)

    def test_zero_rows_left_zero(self):
        w = np.zeros((3, 3))
        w[0, 1] = w[1, 0] = 2.0
        out = symmetrize_normalize(WeightMatrix(w)).entries
        assert not out[2].any() and not out[:, 2].any()

    def test_output_symmetric_with_unit_spectral_radius(self, rng):
        for trial in range(5):
            w = rng.random((12, 12)) * rng.integers(0, 2, (12, 12))
            out = symmetrize_normalize(WeightMatrix(w)).entries
            assert np.array_equal(out, out.T)
            # power iteration on |S|
            v = np.ones(12) / np.sqrt(12)
            for _ in range(200):
                nv = out @ v
                norm = np.linalg.norm(nv)
                if norm == 0:
                    break
                v = nv / norm
            assert np.linalg.norm(out @ v) <= 1.0 + 1e-10


class TestExports:
    def test_csv_round_trip(self, rng, tmp_path):
        w = rng.random((6, 6))
        path = tmp_path / "w.csv"
        write_weights_csv(WeightMatrix(w), path)
        with open(path, newline="") as fh:
            rows = [[float(cell) for cell in row] for row in csv.reader(fh)]
        assert np.array_equal(np.array(rows), w)

    def test_pgm_format_and_scaling(self, tmp_path):
        w = np.array([[0.0, 0.5], [1.0, 0.25]])
        path = tmp_path / "w.pgm"
        write_weights_pgm(w, path)
        blob = path.read_bytes()
        header, pixels = blob.split(b"255\n", 1)
        assert header == b"P5\n2 2\n"
        assert list(pixels) == [0, 128, 255, 64]

    def test_pgm_constant_matrix(self, tmp_path):
        path = tmp_path / "flat.pgm"
        write_weights_pgm(np.full((2, 3), 7.0), path)
        assert path.read_bytes().endswith(bytes(6))
