"""
Tests for the output function, the decoder map and the Hamming distortion.
"""
import itertools
import math

import numpy as np
import pytest

from app.codec.perceptron import decode, hamming_distortion, local_fields, output_fk
from app.exceptions import DimensionMismatchError, InvalidParameterError
from app.harness.instances import gen_source
from app.harness.rng import rng_from_seed
from app.models import BinarySeq, Codebook


def test_output_fk_two_thresholds():
    assert output_fk(0.0, 0.5) == 1
    assert output_fk(0.49, 0.5) == 1
    assert output_fk(-0.49, 0.5) == 1
    assert output_fk(0.51, 0.5) == -1
    assert output_fk(-3.0, 0.5) == -1


def test_output_fk_boundary_maps_to_minus_one():
    assert output_fk(0.5, 0.5) == -1
    assert output_fk(-0.5, 0.5) == -1


def test_output_fk_k_zero_is_all_minus_one():
    u = np.array([-1.0, -0.0, 0.0, 2.0])
    assert output_fk(u, 0.0).tolist() == [-1, -1, -1, -1]


def test_output_fk_rejects_negative_threshold():
    with pytest.raises(InvalidParameterError):
        output_fk(0.0, -1.0)


def test_local_fields_by_hand():
    cb = Codebook(seed=0, rows=2, cols=4, entries=np.array([[1.0, 2.0, 3.0, 4.0], [0.5, -0.5, 0.5, -0.5]]))
    s = BinarySeq([1, -1, 1, -1])
    u = local_fields(s, cb)
    assert u.tolist() == pytest.approx([(1 - 2 + 3 - 4) / 2.0, 2.0 / 2.0])


def test_decode_by_hand():
    cb = Codebook(seed=0, rows=3, cols=1, entries=np.array([[0.2], [-0.9], [1.5]]))
    y_hat = decode(BinarySeq([1]), cb, 1.0)
    assert y_hat.values.tolist() == [1, 1, -1]


def test_decode_is_even_in_s():
    """f_k depends on |u| only, so s and -s decode identically."""
    cb = Codebook.from_seed(17, 30, 6)
    for bits in itertools.product((1, -1), repeat=6):
        s = BinarySeq(np.array(bits))
        assert decode(s, cb, 0.67) == decode(-s, cb, 0.67)


def test_decode_matches_componentwise_threshold():
    """N = 8, M = 4: every codeword against a direct per-output evaluation."""
    cb = Codebook.from_seed(29, 4, 8)
    k = 0.67
    for bits in itertools.product((1, -1), repeat=8):
        expected = []
        for row in cb.entries:
            u = math.fsum(float(x) * b for x, b in zip(row, bits)) / math.sqrt(8)
            expected.append(1 if abs(u) < k else -1)
        assert decode(BinarySeq(np.array(bits)), cb, k).values.tolist() == expected


def test_distortion_invariant_under_joint_negation():
    cb = Codebook.from_seed(31, 24, 12)
    rng = rng_from_seed(3)
    for _ in range(20):
        y = gen_source(0.7, 24, rng)
        y_hat = decode(gen_source(0.5, 12, rng), cb, 0.67)
        assert hamming_distortion(y, y_hat) == hamming_distortion(-y, -y_hat)


def test_decode_dimension_mismatch():
    cb = Codebook.from_seed(1, 5, 3)
    with pytest.raises(DimensionMismatchError):
        decode(BinarySeq([1, 1]), cb, 0.5)


def test_hamming_distortion():
    y = BinarySeq([1, 1, -1, -1, 1])
    assert hamming_distortion(y, y) == 0
    assert hamming_distortion(y, -y) == 5
    assert hamming_distortion(y, BinarySeq([1, -1, -1, 1, 1])) == 2
    expected = int(sum((1 - a * b) // 2 for a, b in zip(y.values.tolist(), [1, -1, -1, 1, 1])))
    assert expected == 2
    with pytest.raises(DimensionMismatchError):
        hamming_distortion(y, BinarySeq([1]))


def test_distortion_of_large_threshold_is_count_of_minus_ones():
    """With k beyond every |u| the representative is all +1."""
    cb = Codebook.from_seed(5, 40, 8)
    s = BinarySeq(np.ones(8))
    k = float(np.max(np.abs(local_fields(s, cb)))) + 1.0
    y = BinarySeq(np.where(np.arange(40) % 3 == 0, -1, 1))
    assert hamming_distortion(y, decode(s, cb, k)) == int(np.sum(y.values == -1))
    assert math.isfinite(k)
