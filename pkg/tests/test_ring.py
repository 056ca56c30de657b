import numpy as np
import pytest

from helpers import tau_bruteforce
from trdecomp.constructions import spurious_minimizer
from trdecomp.ring import (
    GaugeTuple,
    TRCores,
    as_generator,
    contract,
    contract_entry,
    dump_cores,
    gauge_transform,
    load_cores,
    max_abs,
    max_abs_last_slice,
    random_cores,
    random_padded_cores,
)


def test_cores_validation():
    with pytest.raises(ValueError):
        TRCores((np.zeros((2, 3)),) * 2)  # not third order
    with pytest.raises(ValueError):
        TRCores((np.zeros((2, 3, 2)), np.zeros((3, 3, 2))))  # bond mismatch
    with pytest.raises(ValueError):
        TRCores((np.zeros((2, 3, 2)),))  # single core


def test_contract_zero_cores():
    u = TRCores((np.zeros((2, 3, 2)), np.zeros((2, 4, 2))))
    t = contract(u)
    assert t.dims == (3, 4)
    assert np.all(t.values == 0.0)
    assert contract_entry(u, (2, 3)) == 0.0


@pytest.mark.parametrize(
    "d,rank,dims",
    [(2, 3, (4, 5)), (3, 2, (2, 3, 4)), (3, 4, (3, 3, 3)), (4, 2, (2, 2, 3, 2))],
)
def test_contract_matches_bruteforce(d, rank, dims):
    u = random_cores(d, rank, dims, seed=d * 100 + rank)
    got = contract(u).array
    expected = tau_bruteforce(u.cores)
    assert np.max(np.abs(got - expected)) < 1e-12


def test_contract_mixed_ranks():
    rng = as_generator(17)
    cores = (
        rng.standard_normal((2, 3, 4)),
        rng.standard_normal((4, 2, 3)),
        rng.standard_normal((3, 4, 2)),
    )
    u = TRCores(cores)
    assert np.max(np.abs(contract(u).array - tau_bruteforce(cores))) < 1e-12


def test_contract_entry_agreement():
    u = random_cores(3, 3, (4, 5, 3), seed=21)
    t = contract(u)
    rng = as_generator(22)
    for _ in range(100):
        idx = tuple(int(rng.integers(1, n + 1)) for n in u.dims)
        assert abs(contract_entry(u, idx) - t.entry(idx)) < 1e-12


def test_contract_entry_errors():
    u = random_cores(3, 2, 3, seed=1)
    with pytest.raises(ValueError):
        contract_entry(u, (1, 2))
    with pytest.raises(ValueError):
        contract_entry(u, (1, 2, 4))


def test_contract_multilinear():
    rng = as_generator(23)
    u = random_cores(3, 2, (3, 4, 2), rng)
    other = rng.standard_normal(u.cores[1].shape)
    a, b = 0.7, -1.9
    mixed = u.with_core(2, a * u.cores[1] + b * other)
    combo = a * contract(u).array + b * contract(u.with_core(2, other)).array
    assert np.max(np.abs(contract(mixed).array - combo)) < 1e-12


def test_gauge_identity():
    u = random_cores(3, 2, 4, seed=31)
    g = GaugeTuple(tuple(np.eye(2) for _ in range(3)))
    v = gauge_transform(u, g)
    for cu, cv in zip(u.cores, v.cores):
        assert np.max(np.abs(cu - cv)) < 1e-14


def test_gauge_invariance_random():
    rng = as_generator(32)
    for _ in range(20):
        u = random_cores(3, 2, 4, rng)
        mats = tuple(np.eye(2) + 0.4 * rng.standard_normal((2, 2)) for _ in range(3))
        try:
            v = gauge_transform(u, GaugeTuple(mats))
        except ValueError:
            continue
        base = contract(u).values
        err = np.linalg.norm(contract(v).values - base)
        assert err <= 1e-9 * max(1.0, np.linalg.norm(base))


def test_gauge_compose_inverse():
    rng = as_generator(33)
    u = random_cores(3, 3, 4, rng)
    mats = tuple(np.eye(3) + 0.3 * rng.standard_normal((3, 3)) for _ in range(3))
    inv = tuple(np.linalg.inv(m) for m in mats)
    v = gauge_transform(gauge_transform(u, GaugeTuple(mats)), GaugeTuple(inv))
    for cu, cv in zip(u.cores, v.cores):
        assert np.max(np.abs(cu - cv)) < 1e-9


def test_gauge_singular_error():
    u = random_cores(3, 2, 4, seed=34)
    mats = (np.array([[1.0, 1.0], [1.0, 1.0]]), np.eye(2), np.eye(2))
    with pytest.raises(ValueError):
        gauge_transform(u, GaugeTuple(mats))


def test_gauge_shape_errors():
    u = random_cores(3, 2, 4, seed=35)
    with pytest.raises(ValueError):
        gauge_transform(u, GaugeTuple((np.eye(2), np.eye(2))))
    with pytest.raises(ValueError):
        gauge_transform(u, GaugeTuple((np.eye(3), np.eye(2), np.eye(2))))


def test_max_abs():
    u = TRCores((np.zeros((2, 3, 2)), np.zeros((2, 4, 2))))
    assert max_abs(u) == 0.0
    u0 = spurious_minimizer(3, 2, 5)
    assert max_abs(u0) == 1.0
    scaled = u0.with_core(1, 3.0 * u0.cores[0])
    assert max_abs(scaled) == 3.0


def test_max_abs_last_slice():
    u0 = spurious_minimizer(3, 2, 5)
    assert max_abs_last_slice(u0) == 0.0
    bumped = u0.cores[0].copy()
    bumped[1, 4, 2] = 0.3
    assert max_abs_last_slice(u0.with_core(1, bumped)) == 0.3
    assert max_abs_last_slice(u0) <= max_abs(u0)
    rng = as_generator(36)
    mixed = TRCores(
        (rng.standard_normal((2, 3, 2)), rng.standard_normal((2, 4, 2)))
    )
    with pytest.raises(ValueError):
        max_abs_last_slice(mixed)


def test_random_cores_deterministic():
    a = random_cores(3, 2, (3, 4, 5), seed=99)
    b = random_cores(3, 2, (3, 4, 5), seed=99)
    for ca, cb in zip(a.cores, b.cores):
        assert np.array_equal(ca, cb)
    c = random_cores(3, 2, (3, 4, 5), seed=100)
    assert any(not np.array_equal(ca, cc) for ca, cc in zip(a.cores, c.cores))


def test_random_cores_mean():
    u = random_cores(4, 16, (100, 100, 100, 100), seed=41)
    entries = np.concatenate([c.reshape(-1) for c in u.cores])
    assert entries.size >= 10**5
    assert -0.02 < float(np.mean(entries)) < 0.02


def test_padded_cores_zero_pattern():
    u = random_padded_cores(3, 2, 5, seed=51)
    for c in u.cores:
        assert np.all(c[:, 4, :] == 0.0)
        assert np.any(c[:, :4, :] != 0.0)
    t = contract(u).array
    # any index beyond rank^2 kills the entry
    assert np.all(t[4, :, :] == 0.0)
    assert np.all(t[:, 4, :] == 0.0)
    assert np.all(t[:, :, 4] == 0.0)


def test_padded_cores_equal_plain_when_no_padding():
    a = random_padded_cores(3, 2, 4, seed=52)
    b = random_cores(3, 2, 4, seed=52)
    for ca, cb in zip(a.cores, b.cores):
        assert np.array_equal(ca, cb)


def test_padded_cores_dim_error():
    with pytest.raises(ValueError):
        random_padded_cores(3, 2, 3, seed=1)


def test_cores_text_roundtrip(tmp_path):
    u = random_cores(3, 2, (3, 4, 5), seed=61)
    path = tmp_path / "u.txt"
    dump_cores(u, path)
    back = load_cores(path)
    assert back.ranks == u.ranks and back.dims == u.dims
    for ca, cb in zip(u.cores, back.cores):
        assert np.array_equal(ca, cb)


def test_load_cores_malformed(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("2\n2 2\n3 3\n1.0\n")
    with pytest.raises(ValueError):
        load_cores(path)
