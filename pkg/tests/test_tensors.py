import itertools
import math

import numpy as np
import pytest

from trdecomp.tensors import (
    DenseTensor,
    dump_tensor,
    fnorm,
    indicator,
    inner,
    load_tensor,
    outer,
    ravel_index,
    unravel_index,
)


def test_ravel_pair_formula():
    # 2-tuple with uniform radix r: position is (k1 - 1) * r + k2
    assert ravel_index((2, 1), (2, 2)) == 3
    for r in (2, 3, 4):
        for k1 in range(1, r + 1):
            for k2 in range(1, r + 1):
                assert ravel_index((k1, k2), (r, r)) == (k1 - 1) * r + k2


def test_ravel_all_ones_is_first():
    for radixes in [(2,), (3, 3), (2, 3, 4), (5, 1, 2)]:
        assert ravel_index((1,) * len(radixes), radixes) == 1


def test_ravel_matches_lexicographic_enumeration():
    radixes = (4, 5)
    ordered = list(itertools.product(range(1, 5), range(1, 6)))
    for pos, tup in enumerate(ordered, start=1):
        assert ravel_index(tup, radixes) == pos
    assert ordered.index((2, 3)) + 1 == 8
    assert ravel_index((2, 3), (4, 5)) == 8


def test_ravel_out_of_range():
    with pytest.raises(ValueError):
        ravel_index((0, 1), (2, 2))
    with pytest.raises(ValueError):
        ravel_index((1, 3), (2, 2))
    with pytest.raises(ValueError):
        ravel_index((1, 1, 1), (2, 2))


def test_unravel_examples():
    assert unravel_index(1, (3, 3)) == (1, 1)
    assert unravel_index(3, (2, 2)) == (2, 1)


def test_unravel_out_of_range():
    with pytest.raises(ValueError):
        unravel_index(0, (2, 2))
    with pytest.raises(ValueError):
        unravel_index(5, (2, 2))


@pytest.mark.parametrize(
    "radixes", [(2, 3, 4), (7,), (5, 19), (10, 10, 10, 10), (1, 4, 1)]
)
def test_index_roundtrip_exhaustive(radixes):
    total = math.prod(radixes)
    assert total <= 10**4
    for linear in range(1, total + 1):
        assert ravel_index(unravel_index(linear, radixes), radixes) == linear
    for tup in itertools.product(*[range(1, r + 1) for r in radixes]):
        assert unravel_index(ravel_index(tup, radixes), radixes) == tup


def test_layout_consistency():
    rng = np.random.default_rng(3)
    t = DenseTensor.from_array(rng.standard_normal((2, 3, 4)))
    for tup in itertools.product(range(1, 3), range(1, 4), range(1, 5)):
        assert t.entry(tup) == t.values[ravel_index(tup, t.dims) - 1]


def test_dense_tensor_validation():
    with pytest.raises(ValueError):
        DenseTensor((2, 3), np.zeros(5))
    with pytest.raises(ValueError):
        DenseTensor((2, 0), np.zeros(0))
    t = DenseTensor.zeros((2, 2))
    with pytest.raises(ValueError):
        t.values[0] = 1.0  # frozen storage


def test_inner_bruteforce():
    rng = np.random.default_rng(4)
    x = DenseTensor.from_array(rng.standard_normal((2, 3, 2)))
    y = DenseTensor.from_array(rng.standard_normal((2, 3, 2)))
    expected = 0.0
    for tup in itertools.product(range(1, 3), range(1, 4), range(1, 3)):
        expected += x.entry(tup) * y.entry(tup)
    assert abs(inner(x, y) - expected) < 1e-12


def test_inner_zero_and_indicators():
    x = DenseTensor.from_array(np.arange(6.0).reshape(2, 3))
    assert inner(x, DenseTensor.zeros((2, 3))) == 0.0
    e23 = outer(indicator(2, 5), indicator(3, 5))
    assert inner(e23, e23) == 1.0
    for i in range(1, 6):
        for j in range(1, 6):
            assert inner(indicator(i, 5), indicator(j, 5)) == float(i == j)


def test_inner_dim_mismatch():
    with pytest.raises(ValueError):
        inner(DenseTensor.zeros((2, 3)), DenseTensor.zeros((3, 2)))


def test_fnorm_basics():
    assert fnorm(DenseTensor.zeros((3, 3, 3))) == 0.0
    rng = np.random.default_rng(5)
    x = DenseTensor.from_array(rng.standard_normal((3, 4)))
    assert abs(fnorm(x) ** 2 - inner(x, x)) < 1e-12
    c = -2.7
    cx = DenseTensor.from_array(c * x.array)
    assert abs(fnorm(cx) - abs(c) * fnorm(x)) < 1e-12


def test_triangle_inequality():
    rng = np.random.default_rng(6)
    for _ in range(25):
        a = rng.standard_normal((3, 2, 2))
        b = rng.standard_normal((3, 2, 2))
        x, y = DenseTensor.from_array(a), DenseTensor.from_array(b)
        s = DenseTensor.from_array(a + b)
        assert fnorm(s) <= (fnorm(x) + fnorm(y)) * (1 + 1e-12)


def test_outer_indicator_example():
    t = outer(indicator(1, 2), indicator(2, 3))
    assert t.dims == (2, 3)
    expected = np.zeros((2, 3))
    expected[0, 1] = 1.0
    assert np.array_equal(t.array, expected)


def test_outer_norm_multiplicative():
    rng = np.random.default_rng(7)
    x = DenseTensor.from_array(rng.standard_normal((2, 3)))
    y = DenseTensor.from_array(rng.standard_normal((4,)))
    assert abs(fnorm(outer(x, y)) - fnorm(x) * fnorm(y)) < 1e-12


def test_outer_associative():
    rng = np.random.default_rng(8)
    x = DenseTensor.from_array(rng.standard_normal((2, 2)))
    y = DenseTensor.from_array(rng.standard_normal((3,)))
    z = DenseTensor.from_array(rng.standard_normal((2,)))
    left = outer(outer(x, y), z)
    right = outer(x, outer(y, z))
    assert left.dims == right.dims
    assert np.max(np.abs(left.array - right.array)) < 1e-12


def test_outer_bilinear():
    rng = np.random.default_rng(9)
    x1 = rng.standard_normal((2, 3))
    x2 = rng.standard_normal((2, 3))
    y = DenseTensor.from_array(rng.standard_normal((4,)))
    a, b = 1.3, -0.4
    combo = outer(DenseTensor.from_array(a * x1 + b * x2), y)
    parts = a * outer(DenseTensor.from_array(x1), y).array + b * outer(
        DenseTensor.from_array(x2), y
    ).array
    assert np.max(np.abs(combo.array - parts)) < 1e-12


def test_indicator_bounds():
    assert np.array_equal(indicator(1, 1).array, np.array([1.0]))
    assert np.array_equal(indicator(3, 5).array, np.array([0, 0, 1, 0, 0.0]))
    with pytest.raises(ValueError):
        indicator(0, 4)
    with pytest.raises(ValueError):
        indicator(6, 5)


def test_text_roundtrip(tmp_path):
    rng = np.random.default_rng(10)
    t = DenseTensor.from_array(rng.standard_normal((3, 2, 4)))
    path = tmp_path / "t.txt"
    dump_tensor(t, path)
    back = load_tensor(path)
    assert back.dims == t.dims
    assert np.array_equal(back.values, t.values)


def test_load_malformed(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("2\n2 3\n1.0\n")
    with pytest.raises(ValueError):
        load_tensor(path)
    path.write_text("not-a-number\n")
    with pytest.raises(ValueError):
        load_tensor(path)
