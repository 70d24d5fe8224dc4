import numpy as np
import pytest

from afdmsec import InputShapeError, count_bit_errors, demap_hard, map_bits, qpsk

S = np.sqrt(2.0)


def test_qpsk_fixed_labeling():
    spec = qpsk()
    assert map_bits([0, 0], spec)[0] == pytest.approx((1 + 1j) / S)
    assert map_bits([1, 1], spec)[0] == pytest.approx((-1 - 1j) / S)
    assert map_bits([0, 1], spec)[0] == pytest.approx((1 - 1j) / S)
    assert map_bits([1, 0], spec)[0] == pytest.approx((-1 + 1j) / S)


def test_map_bits_concatenates():
    spec = qpsk()
    out = map_bits([0, 0, 1, 0], spec)
    assert np.allclose(out, [(1 + 1j) / S, (-1 + 1j) / S])


def test_map_bits_rejects_odd_length():
    with pytest.raises(InputShapeError):
        map_bits([0, 1, 0], qpsk())


def test_unit_average_energy():
    spec = qpsk()
    energy = np.mean(np.abs(np.asarray(spec.points)) ** 2)
    assert abs(energy - 1.0) < 1e-12


def test_gray_adjacency():
    # every minimum-distance pair of points differs in exactly one bit
    spec = qpsk()
    pts = np.asarray(spec.points)
    labels = [np.array([i >> 1, i & 1]) for i in range(4)]
    dists = np.abs(pts[:, None] - pts[None, :])
    dmin = np.min(dists[dists > 0])
    for i in range(4):
        for j in range(4):
            if i != j and abs(dists[i, j] - dmin) < 1e-12:
                assert int(np.sum(labels[i] != labels[j])) == 1


def test_demap_nearest_point():
    spec = qpsk()
    assert np.array_equal(demap_hard(np.array([(0.9 + 0.8j) / S]), spec), [0, 0])


def test_demap_exact_points_identity():
    spec = qpsk()
    for i, p in enumerate(spec.points):
        bits = demap_hard(np.array([p]), spec)
        assert int(bits[0]) * 2 + int(bits[1]) == i


def test_roundtrip_random_bits(rng):
    spec = qpsk()
    for length in (2, 8, 128, 1000):
        bits = rng.integers(0, 2, length - (length % 2)).astype(np.uint8)
        assert np.array_equal(demap_hard(map_bits(bits, spec), spec), bits)


def test_demap_tie_breaks_to_lowest_label():
    # the origin is equidistant from all four points; label 0 must win
    spec = qpsk()
    assert np.array_equal(demap_hard(np.array([0.0 + 0.0j]), spec), [0, 0])


def test_demap_vectorized_shape():
    spec = qpsk()
    sym = np.array([[(1 + 1j) / S, (-1 - 1j) / S]] * 3)
    bits = demap_hard(sym, spec)
    assert bits.shape == (3, 4)
    assert np.array_equal(bits[0], [0, 0, 1, 1])


def test_count_bit_errors():
    assert count_bit_errors([0, 1, 1, 0], [0, 1, 1, 0]) == 0
    assert count_bit_errors([0, 0], [1, 1]) == 2
    assert count_bit_errors([0, 1, 0], [0, 0, 0]) == 1
    with pytest.raises(InputShapeError):
        count_bit_errors([0, 1], [0, 1, 0])
